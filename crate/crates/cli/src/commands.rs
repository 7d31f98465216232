use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ciot_core::arrival::{fbeta_closed_form, KsReport, MIN_SIGNIFICANT_SAMPLES};
use ciot_core::autoscale::{ramp_windows, run_scaling_loop, trace_windows, write_decision_log};
use ciot_core::config::{Scenario, SimMode};
use ciot_core::delay::{
    constant_delay_k, delay_percentile, mme_load, DelayModelParams, EntityKind,
};
use ciot_core::sim::{run_bearer_simulation, single_job_mode, write_delays_csv, SimOutput};
use ciot_core::stats::{mean, quantile_sorted, survival_sorted};
use ciot_core::trace::{parse_trace, window_and_fit, write_window_report};
use ciot_core::traffic::generate_requests;
use ciot_core::{Error, EventStream};
use rayon::prelude::*;

use crate::manifest::RunManifest;
use crate::Common;

/// Keeps the offset draw independent of the per-source alarm streams.
const POPULATION_SEED_MIX: u64 = 0x5851_f42d_4c95_7f2d;

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Infeasible { windows: usize, min_multiplier: f64 },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Infeasible { windows, .. } => {
                write!(f, "{windows} window(s) miss the delay target at the largest multiplier")
            }
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Config { .. } | Error::Domain(_)) => 2,
            Failure::Core(Error::Io { .. } | Error::Input(_)) => 3,
            Failure::Core(Error::Overload { .. }) | Failure::Infeasible { .. } => 4,
            Failure::Core(_) => 1,
        }
    }

    pub fn hint(&self) -> Option<String> {
        match self {
            Failure::Core(Error::Overload { min_multiplier, .. })
            | Failure::Infeasible { min_multiplier, .. } => Some(format!(
                "minimum feasible MME capacity multiplier is above {min_multiplier:.4}"
            )),
            _ => None,
        }
    }
}

type Outcome = Result<(), Failure>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn scenario(common: &Common) -> Result<Scenario, Error> {
    let sc = match &common.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::reference(),
    };
    match common.sources {
        Some(q) => sc.with_sources(q),
        None => Ok(sc),
    }
}

fn out_dir(common: &Common) -> Result<&Path, Error> {
    fs::create_dir_all(&common.out).map_err(io_err(&common.out))?;
    Ok(&common.out)
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn seeds(common: &Common) -> Vec<u64> {
    (0..common.replications.max(1) as u64).map(|i| common.seed.wrapping_add(i)).collect()
}

fn named(stem: &str, ext: &str, rep: usize, reps: usize) -> String {
    if reps == 1 {
        format!("{stem}.{ext}")
    } else {
        format!("{stem}_rep{rep}.{ext}")
    }
}

/// Runs `f` over the replication seeds on a pool of `--jobs` threads.
fn replicate<T: Send>(
    common: &Common,
    f: impl Fn(u64) -> Result<T, Error> + Sync,
) -> Result<Vec<T>, Error> {
    let seeds = seeds(common);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs)
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    pool.install(|| seeds.par_iter().map(|&s| f(s)).collect())
}

fn scenario_stream(sc: &Scenario, seed: u64) -> Result<EventStream, Error> {
    let population = sc.population(seed ^ POPULATION_SEED_MIX)?;
    generate_requests(&population, &sc.traffic_params()?, sc.simulation.horizon_s, seed)
}

pub fn generate(common: &Common) -> Outcome {
    let sc = scenario(common)?;
    let dir = out_dir(common)?;
    let streams = replicate(common, |seed| scenario_stream(&sc, seed))?;
    let mut manifest = RunManifest::new("generate", common.seed, common.replications, common.config.as_deref(), &sc);
    let reps = streams.len();
    for (i, stream) in streams.iter().enumerate() {
        let csv = named("requests", "csv", i, reps);
        let bin = named("requests", "bin", i, reps);
        stream.save_csv(&dir.join(&csv))?;
        stream.save_binary(&dir.join(&bin))?;
        println!(
            "{csv}: {} requests over {} s ({:.3} req/s)",
            stream.len(),
            sc.simulation.horizon_s,
            stream.len() as f64 / sc.simulation.horizon_s
        );
        manifest.outputs.extend([csv, bin]);
    }
    manifest.write(dir)?;
    Ok(())
}

pub fn validate_arrivals(common: &Common, trace: Option<&Path>, rate: Option<f64>) -> Outcome {
    let sc = scenario(common)?;
    let dir = out_dir(common)?;
    let (stream, source) = match trace {
        Some(path) => {
            let (stream, report) = parse_trace(path)?;
            if report.rejected > 0 {
                eprintln!("warning: {} malformed row(s) skipped", report.rejected);
            }
            (stream, path.display().to_string())
        }
        None => (scenario_stream(&sc, common.seed)?, "generated".to_string()),
    };
    let mut gaps = stream.gaps();
    gaps.sort_by(f64::total_cmp);
    let rate = match (rate, trace) {
        (Some(r), _) => r,
        (None, Some(_)) => match mean(&gaps) {
            Some(m) if m > 0.0 => 1.0 / m,
            _ => return Err(Error::Input("trace has no positive inter-arrival gaps".into()).into()),
        },
        (None, None) => sc.lambda_beta()?,
    };
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!("model rate must be > 0, got {rate}")).into());
    }
    if gaps.is_empty() {
        return Err(Error::Input(format!("{} event(s): no inter-arrival gaps to test", stream.len())).into());
    }
    let model = |x: f64| fbeta_closed_form(x, rate).unwrap_or(0.0);
    let ks = KsReport::new(&gaps, model)?;

    let curve = named("interarrival_cdf", "csv", 0, 1);
    let path = dir.join(&curve);
    let mut w = create(&path)?;
    let top = quantile_sorted(&gaps, 0.999).unwrap_or(0.0).max(5.0 / rate);
    let write_curve = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "tau_s,empirical_cdf,model_cdf")?;
        for i in 0..=400 {
            let tau = top * i as f64 / 400.0;
            writeln!(w, "{tau:?},{:?},{:?}", 1.0 - survival_sorted(&gaps, tau), model(tau))?;
        }
        w.flush()
    };
    write_curve(&mut w).map_err(io_err(&path))?;

    let report_name = "ks_report.txt".to_string();
    let mut text = format!("source = {source}\nevents = {}\nmodel_rate = {rate}\n{ks}", stream.len());
    if stream.len() < MIN_SIGNIFICANT_SAMPLES {
        text.push_str("low_confidence = true\n");
        eprintln!(
            "warning: only {} events (< {MIN_SIGNIFICANT_SAMPLES}); the KS verdict is not significant",
            stream.len()
        );
    }
    let path = dir.join(&report_name);
    fs::write(&path, &text).map_err(io_err(&path))?;
    print!("{text}");

    let mut manifest = RunManifest::new("validate-arrivals", common.seed, 1, common.config.as_deref(), &sc);
    manifest.outputs = vec![curve, report_name];
    manifest.write(dir)?;
    Ok(())
}

fn check_load(sc: &Scenario) -> Result<f64, Error> {
    let lambda = sc.lambda_beta()?;
    mme_load(lambda, sc.profiles()?.mme())?;
    Ok(lambda)
}

pub fn simulate(common: &Common) -> Outcome {
    let sc = scenario(common)?;
    check_load(&sc)?;
    let dir = out_dir(common)?;
    let profiles = sc.profiles()?;
    let template = sc.template(&profiles)?;
    let sim = sc.sim_config();
    let horizon = sc.simulation.horizon_s;
    let k = constant_delay_k(&profiles)?;
    let outputs: Vec<SimOutput> = replicate(common, |seed| {
        let stream = scenario_stream(&sc, seed)?;
        match sc.simulation.mode {
            SimMode::PerMessage => run_bearer_simulation(&stream, &template, &profiles, &sim, horizon),
            SimMode::SingleJob => single_job_mode(&stream, profiles.mme(), k, horizon),
        }
    })?;

    let mut manifest = RunManifest::new("simulate", common.seed, common.replications, common.config.as_deref(), &sc);
    let reps = outputs.len();
    let mut summary = String::from("replication,seed,requests,mean_s,p50_s,p90_s,p99_s,mme_utilization\n");
    for ((i, out), seed) in outputs.iter().enumerate().zip(seeds(common)) {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        let delays_name = named("delays", "csv", i, reps);
        let path = dir.join(&delays_name);
        write_delays_csv(create(&path)?, &out.samples).map_err(io_err(&path))?;
        let util_name = named("utilization", "txt", i, reps);
        let path = dir.join(&util_name);
        fs::write(&path, out.utilization_report()).map_err(io_err(&path))?;

        let mut d = out.delays();
        d.sort_by(f64::total_cmp);
        let q = |p| quantile_sorted(&d, p).unwrap_or(f64::NAN);
        let mme = out.utilization_of(EntityKind::Mme).map_or(f64::NAN, |u| u.mean);
        let row = format!(
            "{i},{seed},{},{:?},{:?},{:?},{:?},{mme:?}",
            d.len(),
            mean(&d).unwrap_or(f64::NAN),
            q(0.5),
            q(0.9),
            q(0.99)
        );
        println!(
            "replication {i}: {} requests, mean {:.3} ms, p99 {:.3} ms, MME utilization {mme:.3}",
            d.len(),
            mean(&d).unwrap_or(f64::NAN) * 1e3,
            q(0.99) * 1e3
        );
        summary.push_str(&row);
        summary.push('\n');
        manifest.outputs.extend([delays_name, util_name]);
    }
    let path = dir.join("summary.csv");
    fs::write(&path, summary).map_err(io_err(&path))?;
    manifest.outputs.push("summary.csv".into());
    manifest.write(dir)?;
    Ok(())
}

pub fn predict(common: &Common, percentile: f64) -> Outcome {
    let sc = scenario(common)?;
    let lambda = check_load(&sc)?;
    let dir = out_dir(common)?;
    let params = DelayModelParams::from_profiles(lambda, &sc.profiles()?)?;
    let tau = delay_percentile(percentile, &params)?;

    let model_name = "model.txt".to_string();
    let text = format!("{params}percentile = {percentile}\ntau_p = {tau:?}\n");
    let path = dir.join(&model_name);
    fs::write(&path, &text).map_err(io_err(&path))?;
    let curve_name = "survival.csv".to_string();
    let path = dir.join(&curve_name);
    let tau_max = delay_percentile(0.9999, &params).unwrap_or(2.0 * tau).max(tau);
    params
        .write_survival_csv(create(&path)?, tau_max, 500)
        .map_err(io_err(&path))?;
    println!("p{} delay = {:.6} s", percentile * 100.0, tau);

    let mut manifest = RunManifest::new("predict", common.seed, 1, common.config.as_deref(), &sc);
    manifest.outputs = vec![model_name, curve_name];
    manifest.write(dir)?;
    Ok(())
}

pub fn scale(common: &Common, trace: Option<&Path>) -> Outcome {
    let sc = scenario(common)?;
    let dir = out_dir(common)?;
    let policy = sc.scaling.policy.clone();
    let sim = sc.sim_config();
    let mut profiles = sc.profiles()?;
    let mut manifest = RunManifest::new("scale", common.seed, 1, common.config.as_deref(), &sc);

    let windows = match trace {
        Some(path) => {
            let (stream, report) = parse_trace(path)?;
            if report.rejected > 0 {
                eprintln!("warning: {} malformed row(s) skipped", report.rejected);
            }
            let fitted = window_and_fit(&stream, sc.trace.window_s)?;
            let name = "windows.csv".to_string();
            let wpath: PathBuf = dir.join(&name);
            write_window_report(create(&wpath)?, &fitted).map_err(io_err(&wpath))?;
            manifest.outputs.push(name);
            profiles = profiles.scaled(sc.trace.capacity_scale, &EntityKind::ALL);
            trace_windows(&stream, &fitted)
        }
        None => ramp_windows(
            &sc.scaling.ramp_q,
            sc.population.group_size,
            &sc.traffic_params()?,
            sc.scaling.window_s,
            common.seed,
        )?,
    };
    let records = run_scaling_loop(&windows, &profiles, &policy, &sim)?;
    let name = "decisions.csv".to_string();
    let path = dir.join(&name);
    write_decision_log(create(&path)?, &records).map_err(io_err(&path))?;
    manifest.outputs.push(name);
    manifest.write(dir)?;

    let ms = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{:.2} ms", x * 1e3));
    for r in &records {
        println!(
            "window {:>10.1} s: lambda {:>9.2}/s -> x{} (predicted {}, simulated {}){}",
            r.window_start,
            r.decision.lambda_beta,
            r.decision.multiplier,
            ms(r.decision.predicted),
            ms(r.empirical),
            if r.decision.feasible { "" } else { " INFEASIBLE" }
        );
    }
    let infeasible: Vec<_> = records.iter().filter(|r| !r.decision.feasible).collect();
    if !infeasible.is_empty() {
        let d = profiles.mme().service_time();
        let min_multiplier = infeasible
            .iter()
            .map(|r| r.decision.lambda_beta * d)
            .fold(0.0, f64::max);
        return Err(Failure::Infeasible { windows: infeasible.len(), min_multiplier });
    }
    Ok(())
}
