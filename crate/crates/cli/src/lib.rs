//! Scenario runner behind the `ghz-sim` binary.
//!
//! Each scenario reads a [`SimConfig`], writes one or more CSV files and a
//! `summary.txt` into the output directory, and reports failures with the
//! exit code the binary should use.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ghz_core::montecarlo::SIX_MONTHS_S;
use ghz_core::report::{self, ScanRow};
use ghz_core::swap::{visibility_from_totals, SwapResult};
use ghz_core::{
    delay_scan, exact_outcome_probabilities, expected_rates, feasibility_estimate, monte_carlo_counts, project_bell,
    via_45_coincidence, Apparatus, BellKind, Coincidence, DelayElement, DensityMatrix, Error, MeasurementSetting, Mode,
    Outcome, SimConfig, SwapReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum Scenario {
    /// Four-fold counts with all analyzers at 0° (H/V).
    HvTable,
    /// Four-fold counts with all analyzers at 45°.
    Basis45Table,
    /// ++++ and +++- counts against PBS delay.
    DelayScan,
    /// Bell projections of the middle photons and the state left on photons 1 and 4.
    SwapReport,
    /// Measurement time for a Bell test on photons 1 and 4.
    Feasibility,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::HvTable => "hv-table",
            Scenario::Basis45Table => "basis45-table",
            Scenario::DelayScan => "delay-scan",
            Scenario::SwapReport => "swap-report",
            Scenario::Feasibility => "feasibility",
        }
    }
}

/// Everything a run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub sim: SimConfig,
    pub out_dir: PathBuf,
}

/// Command-line overrides applied on top of a loaded configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Seconds; sets both the table integration time and the scan time per point.
    pub time: Option<f64>,
    /// Femtoseconds.
    pub delay: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SimConfig) -> Result<(), RunError> {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(t) = self.time {
            if !(t.is_finite() && t >= 0.0) {
                return Err(RunError::Config(format!("--time: {t} is not a non-negative number of seconds")));
            }
            cfg.integration_time_s = t;
            cfg.delay_scan.time_per_point_s = t;
        }
        if let Some(d) = self.delay {
            if !d.is_finite() {
                return Err(RunError::Config(format!("--delay: {d} is not finite")));
            }
            cfg.apparatus = cfg.apparatus.with_delay(d);
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("physics error: {0}")]
    Physics(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl RunError {
    /// 2 for configuration and output problems, 3 when the setup cannot
    /// produce the requested coincidences.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Output { .. } => 2,
            RunError::Physics(_) => 3,
        }
    }
}

impl From<ghz_core::config::ConfigError> for RunError {
    fn from(e: ghz_core::config::ConfigError) -> Self {
        RunError::Config(e.to_string())
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), RunError> {
    let path = dir.join(name);
    let f = File::create(&path).map_err(|source| RunError::Output { path: path.display().to_string(), source })?;
    Ok((path, BufWriter::new(f)))
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<PathBuf, RunError> {
    let (path, mut w) = create(dir, name)?;
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|source| RunError::Output { path: path.display().to_string(), source })?;
    Ok(path)
}

fn outcome(s: &str) -> Outcome {
    s.parse().expect("valid outcome literal")
}

/// Runs one scenario and returns the files written.
pub fn run_scenario(run: &RunConfig) -> Result<Vec<PathBuf>, RunError> {
    run.sim.validate()?;
    fs::create_dir_all(&run.out_dir)
        .map_err(|source| RunError::Output { path: run.out_dir.display().to_string(), source })?;
    let (mut files, summary) = match run.scenario {
        Scenario::HvTable => table(run, "hv_table", MeasurementSetting::hv(&run.sim.apparatus))?,
        Scenario::Basis45Table => table(run, "basis45_table", MeasurementSetting::diagonal(&run.sim.apparatus))?,
        Scenario::DelayScan => scan(run)?,
        Scenario::SwapReport => swap(run)?,
        Scenario::Feasibility => feasibility(run)?,
    };
    files.push(write_file(&run.out_dir, "summary.txt", |w| w.write_all(summary.as_bytes()))?);
    Ok(files)
}

fn header(run: &RunConfig) -> String {
    format!("scenario: {}\nseed: {}\n", run.scenario.name(), run.sim.seed)
}

fn table(run: &RunConfig, stem: &str, default_setting: MeasurementSetting) -> Result<(Vec<PathBuf>, String), RunError> {
    let cfg = &run.sim;
    let a = &cfg.apparatus;
    let setting = cfg.setting.clone().unwrap_or(default_setting);
    let time = cfg.integration_time_s;
    let counts = monte_carlo_counts(a, &setting, &cfg.rates, time, cfg.seed)?;
    let exact = exact_outcome_probabilities(a, &setting, &a.delay(), a.visibility_ceiling)?;
    let files = vec![
        write_file(&run.out_dir, &format!("{stem}.csv"), |w| report::write_counts_csv(w, &counts))?,
        write_file(&run.out_dir, &format!("{stem}_exact.csv"), |w| {
            report::write_probabilities_csv(w, &exact, time, cfg.seed)
        })?,
    ];

    let mut s = header(run);
    let _ = writeln!(s, "integration time: {time} s\ndelay: {} fs", a.delay().delay_fs);
    let _ = writeln!(s, "total four-fold counts: {}", counts.total());
    // outcomes the fully coherent state produces against those it never does
    let ideal = exact_outcome_probabilities(a, &setting, &DelayElement::at(0.0), 1.0)?;
    let (main, rest): (Vec<_>, Vec<_>) = ideal.iter().partition(|(_, p)| **p > 1e-9);
    let main_counts: u64 = main.iter().map(|(o, _)| counts.get(o)).sum();
    let rest_counts: u64 = rest.iter().map(|(o, _)| counts.get(o)).sum();
    let _ = writeln!(s, "expected outcomes ({}): {main_counts} counts", main.len());
    if !rest.is_empty() {
        let per_main = main_counts as f64 / main.len().max(1) as f64;
        let per_rest = rest_counts as f64 / rest.len() as f64;
        let _ = writeln!(s, "other outcomes ({}): {rest_counts} counts, {per_rest:.3} per outcome", rest.len());
        if per_rest > 0.0 {
            let _ = writeln!(s, "signal to noise per outcome: {:.1}", per_main / per_rest);
        }
    }
    if let (Some(&even), Some(&odd)) = (counts.counts.get(&outcome("++++")), counts.counts.get(&outcome("+++-"))) {
        if let Ok((v, err)) = visibility_from_totals(even, odd) {
            let (pe, po) = (exact[&outcome("++++")], exact[&outcome("+++-")]);
            let _ = writeln!(s, "visibility ++++ vs +++-: {v:.3} ± {err:.3} (exact {:.6})", (pe - po) / (pe + po));
        }
    }
    Ok((files, s))
}

fn scan(run: &RunConfig) -> Result<(Vec<PathBuf>, String), RunError> {
    let cfg = &run.sim;
    let a = &cfg.apparatus;
    let setting = cfg.setting.clone().unwrap_or_else(|| MeasurementSetting::diagonal(a));
    let time = cfg.delay_scan.time_per_point_s;
    let delays = &cfg.delay_scan.delays_fs;
    let (pppp, pppm) = (outcome("++++"), outcome("+++-"));
    let tables = delay_scan(a, &setting, delays, &cfg.rates, time, cfg.seed)?;
    let mut rows = Vec::with_capacity(tables.len());
    for (d, t) in &tables {
        let expected = expected_rates(&a.with_delay(*d), &setting, &cfg.rates)?;
        let (Some(&ep), Some(&em)) = (expected.get(&pppp), expected.get(&pppm)) else {
            return Err(RunError::Config(
                "setting: delay-scan needs non-zero analyzer angles on every detector".into(),
            ));
        };
        let (np, nm) = (t.get(&pppp), t.get(&pppm));
        let vis = visibility_from_totals(np, nm).ok();
        rows.push(ScanRow {
            delay_fs: *d,
            counts_pppp: np,
            counts_pppm: nm,
            visibility: vis.map(|v| v.0),
            visibility_err: vis.map(|v| v.1),
            expected_pppp: ep * time,
            expected_pppm: em * time,
        });
    }
    let files = vec![write_file(&run.out_dir, "delay_scan.csv", |w| report::write_delay_scan_csv(w, &rows))?];

    let mut s = header(run);
    let _ = writeln!(s, "points: {}\ntime per point: {time} s", rows.len());
    let best =
        rows.iter().max_by(|x, y| (x.expected_pppp - x.expected_pppm).total_cmp(&(y.expected_pppp - y.expected_pppm)));
    if let Some(r) = best {
        let _ = writeln!(s, "expected interference maximum at {} fs", r.delay_fs);
        if let (Some(v), Some(e)) = (r.visibility, r.visibility_err) {
            let _ = writeln!(s, "visibility there: {v:.3} ± {e:.3}");
        }
    }
    Ok((files, s))
}

fn swap_row(label: &str, r: &SwapResult<f64>) -> Result<SwapReport, RunError> {
    Ok(SwapReport::from_result(label, r)?)
}

fn swap(run: &RunConfig) -> Result<(Vec<PathBuf>, String), RunError> {
    let a: &Apparatus = &run.sim.apparatus;
    let mut rows = Vec::new();

    // before the PBS: any Bell outcome on photons 2, 3 leaves 1, 4 in the same state
    let input = DensityMatrix::from_pure(&a.input_state()?)?;
    for kind in BellKind::ALL {
        let r = project_bell(&input, (Mode::new(2), Mode::new(3)), kind)?;
        rows.push(swap_row(&format!("{kind} 2/3 source pairs"), &r)?);
    }

    let mid = (Mode::primed(2), Mode::primed(3));
    let rho = a.detected_density(&a.delay(), a.visibility_ceiling)?;
    let abs = project_bell(&rho, mid, BellKind::PhiPlus)?;
    let same = via_45_coincidence(&rho, mid, Coincidence::Same)?;
    let abs_minus = project_bell(&rho, mid, BellKind::PhiMinus)?;
    let cross = via_45_coincidence(&rho, mid, Coincidence::Cross)?;
    rows.push(swap_row("phi+ 2'/3' projection", &abs)?);
    rows.push(swap_row("phi+ 2'/3' same-sign 45 coincidence", &same)?);
    rows.push(swap_row("phi- 2'/3' projection", &abs_minus)?);
    rows.push(swap_row("phi- 2'/3' opposite-sign 45 coincidence", &cross)?);

    let files = vec![
        write_file(&run.out_dir, "swap_report.csv", |w| report::write_swap_csv(w, &rows))?,
        write_file(&run.out_dir, "swap_report.json", |w| report::write_swap_json(w, &rows))?,
    ];
    let mut s = header(run);
    let _ = writeln!(s, "delay: {} fs\nvisibility ceiling: {}", a.delay().delay_fs, a.visibility_ceiling);
    let _ = writeln!(s, "phi+ detection probability: {:.6}", same.projection_probability);
    let _ = writeln!(s, "fidelity of photons 1,4 to phi+: {:.6}", same.fidelity_to_target);
    let _ = writeln!(s, "45° visibility of photons 1,4: {:.6}", same.visibility_45);
    let _ = writeln!(s, "CHSH on photons 1,4: {:.6} (local bound 2)", same.chsh()?);
    Ok((files, s))
}

fn feasibility(run: &RunConfig) -> Result<(Vec<PathBuf>, String), RunError> {
    let cfg = &run.sim;
    let target = cfg.bell_test.target_events;
    let secs = feasibility_estimate(target, &cfg.rates)?;
    let rate = cfg.rates.effective_signal_rate(4);
    let days = secs / 86_400.0;
    let exceeds = secs > SIX_MONTHS_S;
    let files = vec![write_file(&run.out_dir, "feasibility.csv", |w| {
        writeln!(w, "target_events,signal_rate_hz,duration_s,duration_days,exceeds_six_months")?;
        writeln!(w, "{target},{rate},{secs},{days},{exceeds}")
    })?];
    let mut s = header(run);
    let _ = writeln!(s, "target events: {target}\ndetected four-fold rate: {rate:.6} /s");
    let _ = writeln!(s, "duration: {secs:.4e} s ({days:.1} days, {:.2} × six months)", secs / SIX_MONTHS_S);
    Ok((files, s))
}
