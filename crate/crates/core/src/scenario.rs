//! Scenario configuration, the end-to-end runner (optimize → marginals →
//! artifacts), and the cross-run comparison report.
//!
//! Scenario files use the same structured-text grammar as parameter
//! files. Recognized keys:
//!
//! ```text
//! name            = fig1a_baseline
//! params          = ../crates/core/data/dice2016.params   # relative to this file
//! utility_variant = population_weighted                   # or: unweighted
//! temp_cap        = 2.4            # optional, degrees C
//! horizon_override = 20            # optional, truncates the horizon
//! plot_window     = [2015, 2065]   # optional
//! pin_s           = [period, value, ...]   # optional flattened pairs
//! pin_mu          = [period, value, ...]
//! output_dir      = fig1a          # optional, defaults to `name`
//! ```

use crate::error::RunError;
use crate::export;
use crate::marginals::{compute_marginals, MarginalSeries};
use crate::optimizer::{
    optimize, OptResult, OptimizeOptions, Pin, PinTarget, ScenarioConstraints,
};
use crate::params::{load_params, parse_entries, Params, RawValue};
use crate::plot;
use std::path::{Path, PathBuf};

/// Utility weighting of Figure-1 style scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilityVariant {
    PopulationWeighted,
    Unweighted,
}

/// A fully resolved scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub params_path: PathBuf,
    pub utility_variant: UtilityVariant,
    pub temp_cap: Option<f64>,
    pub horizon_override: Option<usize>,
    pub plot_window: Option<(i64, i64)>,
    pub pins: Vec<Pin>,
    /// Artifact directory, relative to the runner's output root.
    pub output_dir: PathBuf,
}

/// Parse a scenario file; `params` paths resolve relative to its parent.
pub fn load_scenario<P: AsRef<Path>>(path: P) -> Result<ScenarioConfig, RunError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    scenario_from_str(&text, base)
}

/// Parse scenario text with `base` as the directory for relative paths.
pub fn scenario_from_str(text: &str, base: &Path) -> Result<ScenarioConfig, RunError> {
    let entries = parse_entries(text)?;
    let mut name = None;
    let mut params_path = None;
    let mut variant = UtilityVariant::PopulationWeighted;
    let mut temp_cap = None;
    let mut horizon = None;
    let mut window = None;
    let mut pins = Vec::new();
    let mut output_dir = None;

    let bad = |line: usize, msg: String| RunError::Config(format!("line {line}: {msg}"));
    for (key, value, line) in entries {
        match (key.as_str(), &value) {
            ("name", RawValue::Str(s)) => name = Some(s.clone()),
            ("params", RawValue::Str(s)) => params_path = Some(base.join(s)),
            ("output_dir", RawValue::Str(s)) => output_dir = Some(PathBuf::from(s)),
            ("utility_variant", RawValue::Str(s)) => {
                variant = match s.as_str() {
                    "population_weighted" => UtilityVariant::PopulationWeighted,
                    "unweighted" => UtilityVariant::Unweighted,
                    other => {
                        return Err(bad(line, format!("unknown utility_variant `{other}`")))
                    }
                }
            }
            ("temp_cap", RawValue::Scalar(x)) => {
                if !(*x > 0.0) {
                    return Err(bad(line, format!("temp_cap must be positive, got {x}")));
                }
                temp_cap = Some(*x);
            }
            ("horizon_override", RawValue::Scalar(x))
                if *x >= 2.0 && x.fract() == 0.0 =>
            {
                horizon = Some(*x as usize)
            }
            ("plot_window", RawValue::Vector(v)) if v.len() == 2 => {
                window = Some((v[0] as i64, v[1] as i64))
            }
            ("pin_s", RawValue::Vector(v)) | ("pin_mu", RawValue::Vector(v)) => {
                if v.len() % 2 != 0 {
                    return Err(bad(line, format!("`{key}` expects flattened (period, value) pairs")));
                }
                let target = if key == "pin_s" { PinTarget::S } else { PinTarget::Mu };
                for pair in v.chunks(2) {
                    if pair[0].fract() != 0.0 || pair[0] < 1.0 {
                        return Err(bad(line, format!("bad pin period {}", pair[0])));
                    }
                    pins.push(Pin {
                        period: pair[0] as usize,
                        target,
                        value: pair[1],
                    });
                }
            }
            (k, _) => return Err(bad(line, format!("unknown or malformed scenario key `{k}`"))),
        }
    }

    let name = name.ok_or_else(|| RunError::Config("missing `name`".into()))?;
    let params_path =
        params_path.ok_or_else(|| RunError::Config("missing `params`".into()))?;
    Ok(ScenarioConfig {
        output_dir: output_dir.unwrap_or_else(|| PathBuf::from(&name)),
        name,
        params_path,
        utility_variant: variant,
        temp_cap,
        horizon_override: horizon,
        plot_window: window,
        pins,
    })
}

impl ScenarioConfig {
    /// Load and specialize the parameter set for this scenario.
    pub fn resolve_params(&self) -> Result<Params, RunError> {
        let mut p = load_params(&self.params_path)?;
        if let Some(h) = self.horizon_override {
            p = p.truncate_horizon(h)?;
        }
        if self.utility_variant == UtilityVariant::Unweighted {
            p = p.with_unweighted_utility();
        }
        if let Some((from, to)) = self.plot_window {
            let last = export::year(p.t_max);
            if from < 2015 || to > last || from >= to {
                return Err(RunError::Config(format!(
                    "plot_window ({from}, {to}) outside horizon 2015..={last}"
                )));
            }
        }
        for pin in &self.pins {
            if pin.period > p.t_max {
                return Err(RunError::Config(format!(
                    "pin period {} beyond horizon {}",
                    pin.period, p.t_max
                )));
            }
            let hi = match pin.target {
                PinTarget::S => 1.0,
                PinTarget::Mu => p.pi35[pin.period - 1],
            };
            if !(pin.value >= 0.0 && pin.value <= hi) {
                return Err(RunError::Config(format!(
                    "pin value {} outside [0, {hi}] at period {}",
                    pin.value, pin.period
                )));
            }
        }
        Ok(p)
    }

    pub fn constraints(&self) -> ScenarioConstraints {
        ScenarioConstraints {
            temp_cap: self.temp_cap,
            cumulative_cap_enabled: true,
            pinned_controls: self.pins.clone(),
        }
    }
}

/// Summary statistics of one run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub w_star: f64,
    pub max_ratio: f64,
    pub year_of_max: i64,
    pub converged: bool,
}

/// Paths of the artifacts one run writes.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub trajectory_csv: PathBuf,
    pub marginals_csv: PathBuf,
    pub plot_svg: PathBuf,
    pub convergence_log: PathBuf,
    pub summary: RunSummary,
}

/// Optimize, extract marginals, and write all artifacts under
/// `out_root/<output_dir>/`. Artifacts are written even when the
/// optimizer fails to converge; the summary carries the flag.
pub fn run_scenario(cfg: &ScenarioConfig, out_root: &Path) -> Result<RunArtifacts, RunError> {
    let p = cfg.resolve_params()?;
    let sc = cfg.constraints();
    let opt = optimize(&p, &sc, &OptimizeOptions::default())?;
    write_artifacts(cfg, &p, &sc, &opt, out_root)
}

/// Artifact-writing half of [`run_scenario`], reusable with a
/// caller-provided optimization result.
pub fn write_artifacts(
    cfg: &ScenarioConfig,
    p: &Params,
    sc: &ScenarioConstraints,
    opt: &OptResult,
    out_root: &Path,
) -> Result<RunArtifacts, RunError> {
    let dir = out_root.join(&cfg.output_dir);
    std::fs::create_dir_all(&dir).map_err(|source| RunError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let tr = crate::dynamics::simulate(p, &opt.controls, &[])?;
    let series: Option<MarginalSeries> = if opt.converged {
        Some(compute_marginals(p, sc, opt)?)
    } else {
        None
    };

    let trajectory_csv = dir.join("trajectory.csv");
    export::write_atomic(&trajectory_csv, export::trajectory_csv(&opt.controls, &tr).as_bytes())?;

    let marginals_csv = dir.join("marginals.csv");
    let plot_svg = dir.join("panel.svg");
    let years: Vec<i64> = (1..=p.t_max).map(export::year).collect();
    let (max_ratio, year_of_max) = match &series {
        Some(m) => {
            export::write_atomic(&marginals_csv, export::marginals_csv(m).as_bytes())?;
            let svg = plot::render_panel(&cfg.name, &years, &m.scc, &m.smac, cfg.plot_window);
            export::write_atomic(&plot_svg, svg.as_bytes())?;
            let ratio = m.scc_over_smac();
            let (mut best, mut best_t) = (f64::NEG_INFINITY, 0);
            for (i, &r) in ratio.iter().enumerate() {
                if r > best {
                    best = r;
                    best_t = i;
                }
            }
            (best, export::year(best_t + 1))
        }
        None => (f64::NAN, 0),
    };

    let convergence_log = dir.join("convergence.log");
    let mut log_text = String::new();
    for line in &opt.log {
        log_text.push_str(&line.to_string());
        log_text.push('\n');
    }
    if !opt.converged {
        log_text.push_str("NOT CONVERGED\n");
    }
    export::write_atomic(&convergence_log, log_text.as_bytes())?;

    Ok(RunArtifacts {
        trajectory_csv,
        marginals_csv,
        plot_svg,
        convergence_log,
        summary: RunSummary {
            w_star: opt.w_star,
            max_ratio,
            year_of_max,
            converged: opt.converged,
        },
    })
}

/// Aligned per-year table of scc, smac, and their ratio across run
/// directories, flagging years whose ratio leaves [0.9, 1.1].
/// Mismatched horizons are reported in the text, not fatal.
pub fn compare(run_dirs: &[PathBuf]) -> Result<String, RunError> {
    if run_dirs.is_empty() {
        return Err(RunError::Config("compare needs at least one run directory".into()));
    }
    let mut runs = Vec::new();
    for dir in run_dirs {
        let path = dir.join("marginals.csv");
        let text = std::fs::read_to_string(&path).map_err(|source| RunError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let label = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        runs.push((label, export::parse_marginals_csv(&text)?));
    }

    let mut out = String::new();
    let horizons: Vec<usize> = runs.iter().map(|(_, rows)| rows.len()).collect();
    if horizons.windows(2).any(|w| w[0] != w[1]) {
        out.push_str(&format!(
            "note: horizons differ across runs: {horizons:?}; rows aligned by year\n"
        ));
    }
    out.push_str(&format!("{:<6}", "year"));
    for (label, _) in &runs {
        out.push_str(&format!(" | {label:^38}"));
    }
    out.push('\n');
    out.push_str(&format!("{:<6}", ""));
    for _ in &runs {
        out.push_str(&format!(
            " | {:>11} {:>11} {:>9} {:>4}",
            "scc", "smac", "ratio", "flag"
        ));
    }
    out.push('\n');

    let max_rows = horizons.iter().copied().max().unwrap_or(0);
    for i in 0..max_rows {
        let yr = export::year(i + 1);
        out.push_str(&format!("{yr:<6}"));
        for (_, rows) in &runs {
            match rows.iter().find(|r| r.0 == yr) {
                Some(&(_, scc, smac, ratio)) => {
                    let flag = if !(0.9..=1.1).contains(&ratio) { "*" } else { "" };
                    out.push_str(&format!(
                        " | {scc:>11.4} {smac:>11.4} {ratio:>9.4} {flag:>4}"
                    ));
                }
                None => out.push_str(&format!(" | {:^38}", "-")),
            }
        }
        out.push('\n');
    }
    out.push_str("flag *: scc/smac outside [0.9, 1.1]\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;
    use std::io::Write;

    fn desk_scenario(dir: &Path, extra: &str) -> PathBuf {
        let params = dir.join("desk.params");
        std::fs::write(&params, testdata::DESK_TEXT).unwrap();
        let scn = dir.join("test.scn");
        let mut f = std::fs::File::create(&scn).unwrap();
        writeln!(f, "name = desk_smoke").unwrap();
        writeln!(f, "params = desk.params").unwrap();
        writeln!(f, "{extra}").unwrap();
        scn
    }

    #[test]
    fn scenario_parsing_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let scn = desk_scenario(
            dir.path(),
            "temp_cap = 1.7\nplot_window = [2015, 2065]\npin_mu = [1, 0.03]",
        );
        let cfg = load_scenario(&scn).unwrap();
        assert_eq!(cfg.name, "desk_smoke");
        assert_eq!(cfg.temp_cap, Some(1.7));
        assert_eq!(cfg.plot_window, Some((2015, 2065)));
        assert_eq!(cfg.pins.len(), 1);
        assert_eq!(cfg.pins[0].target, PinTarget::Mu);
        cfg.resolve_params().unwrap();

        let bad = desk_scenario(dir.path(), "plot_window = [2015, 2200]");
        let cfg = load_scenario(&bad).unwrap();
        assert!(matches!(cfg.resolve_params(), Err(RunError::Config(_))));
    }

    #[test]
    fn unknown_scenario_key_rejected() {
        let err = scenario_from_str("name = x\nparams = y\nbogus = 1\n", Path::new("."))
            .unwrap_err();
        assert!(matches!(err, RunError::Config(_)));
    }

    #[test]
    fn desk_smoke_run_and_compare() {
        let dir = tempfile::tempdir().unwrap();
        let scn = desk_scenario(dir.path(), "# no extras");
        let cfg = load_scenario(&scn).unwrap();
        let out = dir.path().join("out");
        let artifacts = run_scenario(&cfg, &out).unwrap();
        assert!(artifacts.summary.converged);
        assert!(artifacts.trajectory_csv.exists());
        assert!(artifacts.marginals_csv.exists());
        assert!(artifacts.plot_svg.exists());
        assert!(artifacts.convergence_log.exists());

        // summary recomputable from the CSV
        let rows = export::parse_marginals_csv(
            &std::fs::read_to_string(&artifacts.marginals_csv).unwrap(),
        )
        .unwrap();
        let max_ratio = rows.iter().map(|r| r.3).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max_ratio, artifacts.summary.max_ratio);

        let report = compare(&[out.join("desk_smoke")]).unwrap();
        assert!(report.contains("2015"));
        assert!(compare(&[]).is_err());
    }

    #[test]
    fn unweighted_variant_sets_unit_weights() {
        let dir = tempfile::tempdir().unwrap();
        let scn = desk_scenario(dir.path(), "utility_variant = unweighted");
        let cfg = load_scenario(&scn).unwrap();
        let p = cfg.resolve_params().unwrap();
        assert!(p.pi1.iter().all(|&w| w == 1.0));
    }
}
