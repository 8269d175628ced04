//! Running a resolved scenario and writing its self-describing CSV.
//!
//! Every file starts with the crate version and the full resolved
//! configuration as comment lines, so the run can be repeated from the output
//! alone (see [`recover_config`]). A failed run still writes the header,
//! followed by `# status = failed` and the error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::config::{parse_config, MapKind, Scenario, ScenarioConfig};
use crate::dynamics::{rabi_experiment, RabiOptions};
use crate::effective::{self, effective_params, optimal_beta, ratios_of};
use crate::eigen::{avoided_crossing_scan_n, effective_agreement_scan, ADIABATIC_RATIO};
use crate::probe::{self, ProbeOptions};
use crate::{Error, Result, ScanResult, VERSION};

const CONFIG_MARKER: &str = "config:";
const CONFIG_PREFIX: &str = "  ";

fn grid_points(cfg: &ScenarioConfig) -> Result<Vec<f64>> {
    cfg.grid
        .map(|g| g.points())
        .ok_or_else(|| Error::InvalidParameter(format!("scenario {} needs a grid", cfg.scenario)))
}

fn effective_row(cfg: &ScenarioConfig) -> Result<ScanResult> {
    let p = &cfg.params;
    let eff = effective_params(p)?;
    let r = ratios_of(&eff)?;
    let opt = optimal_beta(p.g, p.kappa1, p.kappa2)?;
    let resonance = effective::resonance_delta2(p)?;
    let cols = [
        ("alpha", eff.alpha),
        ("beta", eff.beta),
        ("g_eff", eff.g_eff),
        ("delta_eff", eff.delta_eff),
        ("kappa_eff", eff.kappa_eff),
        ("gamma_eff", eff.gamma_eff),
        ("shift_e", eff.shift_e),
        ("shift_2", eff.shift_2),
        ("g_over_kappa", r.g_over_kappa),
        ("g_over_gamma", r.g_over_gamma),
        ("cooperativity", r.cooperativity),
        ("beta_opt", opt.beta_opt),
        ("ratio_max", opt.ratio_max),
        ("strong_coupling", opt.strong_coupling as u8 as f64),
        ("delta2_resonance", resonance),
        ("adiabatic", (p.delta1.abs() >= ADIABATIC_RATIO * p.kappa1) as u8 as f64),
    ];
    let mut out = ScanResult::new("row", vec![0.0])?;
    for (name, v) in cols {
        out.push_column(name, vec![v])?;
    }
    Ok(out)
}

/// Compute the result table of a scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScanResult> {
    let p = &cfg.params;
    let cutoffs = (p.n1_cutoff, p.n2_cutoff);
    let mut out = match cfg.scenario {
        Scenario::EffectiveParams => effective_row(cfg)?,
        Scenario::EigenScan => {
            let mut s = avoided_crossing_scan_n(p, &grid_points(cfg)?, cfg.n_exc)?;
            s.add_metadata("n_exc", cfg.n_exc);
            s
        }
        Scenario::KappaScan => effective_agreement_scan(p, &grid_points(cfg)?, cfg.hold)?,
        Scenario::Rabi => {
            let opts = RabiOptions { periods: cfg.periods, samples: cfg.samples, tol: cfg.tol, horizon: None };
            let r = rabi_experiment(p, &opts)?;
            let mut s = r.to_scan()?;
            s.add_metadata("rms_deviation", r.rms_deviation);
            s.add_metadata("max_n1", r.max_n1);
            s.add_metadata("max_n2", r.max_n2);
            s.add_metadata("g_eff", r.effective.g_eff);
            s.add_metadata("steps", r.series.diagnostics.steps.accepted);
            s.add_metadata("max_trace_error", r.series.diagnostics.max_trace_error);
            s.add_metadata("min_eigenvalue", r.series.diagnostics.min_eigenvalue);
            s
        }
        Scenario::Spectrum | Scenario::G2Scan => {
            let eps = cfg
                .eps
                .ok_or_else(|| Error::InvalidParameter(format!("scenario {} needs eps", cfg.scenario)))?;
            let opts = ProbeOptions { cutoffs, coarse_cutoffs: Some((2, 2)) };
            let grid = grid_points(cfg)?;
            if cfg.scenario == Scenario::Spectrum {
                probe::excitation_spectrum(p, eps, &grid, &opts)?
            } else {
                probe::g2_scan(p, eps, &grid, &opts)?
            }
        }
        Scenario::RegimeMap => {
            let x = grid_points(cfg)?;
            let y = cfg.y_grid.map(|g| g.points()).ok_or_else(|| Error::InvalidParameter("regime-map needs a y grid".into()))?;
            let mut s = match cfg.map {
                MapKind::Ratios => effective::regime_map(p, &x, &y)?,
                MapKind::Kappa => effective::kappa_map(p, &x, &y)?,
            };
            s.add_metadata("map", cfg.map.name());
            s.add_metadata("rows", x.len());
            s.add_metadata("cols", y.len());
            s
        }
    };
    out.add_metadata("scenario", cfg.scenario);
    Ok(out)
}

/// Comment lines identifying the tool and the resolved configuration.
pub fn header_comments(cfg: &ScenarioConfig) -> Vec<String> {
    let mut lines = vec![format!("polariton {VERSION}"), CONFIG_MARKER.to_string()];
    lines.extend(cfg.serialize().lines().map(|l| format!("{CONFIG_PREFIX}{l}")));
    lines
}

/// Re-resolve the configuration embedded in a CSV written by [`write_result`].
pub fn recover_config(csv: &str) -> Result<ScenarioConfig> {
    let marker = format!("# {CONFIG_MARKER}");
    let prefix = format!("# {CONFIG_PREFIX}");
    let mut lines = csv.lines().skip_while(|l| *l != marker);
    if lines.next().is_none() {
        return Err(Error::InvalidParameter("no embedded configuration found".into()));
    }
    let text: Vec<&str> = lines.map_while(|l| l.strip_prefix(prefix.as_str())).collect();
    parse_config(&text.join("\n"))
}

pub fn write_result<W: Write>(w: W, cfg: &ScenarioConfig, result: &ScanResult) -> io::Result<()> {
    let mut comments = header_comments(cfg);
    comments.push("status = ok".into());
    result.write_csv(w, &comments)
}

pub fn write_failure<W: Write>(mut w: W, cfg: &ScenarioConfig, err: &Error) -> io::Result<()> {
    for line in header_comments(cfg) {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "# status = failed")?;
    writeln!(w, "# error = {}", err.to_string().replace('\n', " "))
}

/// A gnuplot script that plots every column of `csv` against the abscissa,
/// or a coloured map for regime maps.
pub fn gnuplot_script(cfg: &ScenarioConfig, result: &ScanResult, csv: &Path) -> String {
    let file = csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::from("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n");
    let names: Vec<&str> = result.column_names().collect();
    if cfg.scenario == Scenario::RegimeMap {
        // g_eff / kappa_eff as the colour
        let (z, log) = match cfg.map {
            MapKind::Ratios => (4, ""),
            MapKind::Kappa => (5, "set logscale xy\n"),
        };
        s.push_str(&format!(
            "set view map\nset xlabel '{}'\nset ylabel '{}'\n{log}splot '{file}' using 2:3:{z} with pm3d notitle\n",
            names[0], names[1]
        ));
        return s;
    }
    s.push_str(&format!("set xlabel '{}'\nplot ", result.abscissa_name));
    let plots: Vec<String> = (0..names.len()).map(|i| format!("'{file}' using 1:{} with lines", i + 2)).collect();
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

/// Run `cfg`, writing to `out` (or stdout when `None`), plus the gnuplot
/// companion if requested. Failures are recorded in the output before being
/// returned.
pub fn execute(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<ScanResult> {
    log::info!("running scenario {}", cfg.scenario);
    let result = run_scenario(cfg);
    match out {
        Some(path) => {
            let mut buf = Vec::new();
            match &result {
                Ok(r) => write_result(&mut buf, cfg, r)?,
                Err(e) => write_failure(&mut buf, cfg, e)?,
            }
            fs::write(path, buf)?;
            if let (Ok(r), true) = (&result, cfg.gnuplot) {
                fs::write(gnuplot_path(path), gnuplot_script(cfg, r, path))?;
            }
        }
        None => {
            let stdout = io::stdout();
            let lock = stdout.lock();
            match &result {
                Ok(r) => write_result(lock, cfg, r)?,
                Err(e) => write_failure(lock, cfg, e)?,
            }
        }
    }
    result
}

pub fn gnuplot_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}
