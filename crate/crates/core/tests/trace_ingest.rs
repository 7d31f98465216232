use std::io::Write;

use ciot_core::stream::EventStream;
use ciot_core::trace::{
    parse_trace, replay_rate_series, window_and_fit, write_window_report, DiurnalProfile,
};

#[test]
fn exponential_gaps_fit_and_pass() {
    let seeds = 100;
    let mut passes = 0;
    for seed in 0..seeds {
        // 1e4 gaps at rate 10 span about 1000 s
        let stream = EventStream::poisson(10.0, 1000.0, seed).unwrap();
        let w = &window_and_fit(&stream, 1000.0).unwrap()[0];
        let lambda = w.lambda_hat.unwrap();
        assert!((lambda / 10.0 - 1.0).abs() < 0.03, "seed {seed}: {lambda}");
        passes += usize::from(w.ks_pass_1pct().unwrap());
    }
    assert!(passes >= 95, "{passes}/{seeds} windows pass");
}

#[test]
fn file_round_trip_reports_bad_rows() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "timestamp_s,source_id").unwrap();
    for i in 0..200 {
        writeln!(f, "{},{}", i as f64 * 0.37, i % 7).unwrap();
    }
    writeln!(f, "-1.0,3").unwrap();
    writeln!(f, "abc,3").unwrap();
    writeln!(f, "5.0,x").unwrap();
    f.flush().unwrap();
    let (stream, report) = parse_trace(f.path()).unwrap();
    assert_eq!(report.valid, 200);
    assert_eq!(report.rejected, 3);
    assert_eq!(report.rejected_lines, vec![202, 203, 204]);
    assert_eq!(stream.len(), 200);
    assert_eq!(stream.events()[10].source, Some(3));
}

#[test]
fn morning_ramp_is_recovered_window_by_window() {
    let profile = DiurnalProfile::morning();
    let stream = profile.generate(11).unwrap();
    let windows = window_and_fit(&stream, profile.window_length).unwrap();
    assert_eq!(windows.len(), profile.rates.len());
    assert_eq!(windows[0].start, profile.start);
    let series = replay_rate_series(&windows);
    for (p, &rate) in series.iter().zip(&profile.rates) {
        assert!((p.lambda / rate - 1.0).abs() < 0.1, "{} vs {rate}", p.lambda);
    }
    // the ramp up to the peak is strictly increasing
    assert!(series[..6].windows(2).all(|w| w[1].lambda > w[0].lambda));
    let mut csv = Vec::new();
    write_window_report(&mut csv, &windows).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.starts_with("window_start_s,n_events,lambda_hat,ks_stat,ks_pass_1pct\n"));
}
