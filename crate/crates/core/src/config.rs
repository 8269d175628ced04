//! Scenario configuration files.
//!
//! # Grammar
//!
//! ```text
//! file    = { line }
//! line    = [ pair { pair } | "[" name "]" ] [ "#" comment ]
//! pair    = key "=" value          (whitespace around "=" is optional)
//! ```
//!
//! Keys are case-sensitive and may appear at most once. `[section]` headers
//! are accepted and ignored. Values contain no whitespace.
//!
//! | key | value |
//! |-----|-------|
//! | `scenario` | `effective-params`, `eigen-scan`, `kappa-scan`, `rabi`, `spectrum`, `g2-scan`, `regime-map` (required) |
//! | `preset` | `setA` or `setB` |
//! | `g`, `J`, `delta1`, `kappa1`, `kappa2`, `gamma` | numbers; required without a preset |
//! | `delta2` | number or `resonance` (default `resonance`) |
//! | `cutoffs` | `N1,N2` |
//! | `eps` | probe amplitude (spectrum, g2-scan) |
//! | `start`, `stop`, `count` | scan grid |
//! | `y_start`, `y_stop`, `y_count` | second grid axis (regime-map) |
//! | `output` | CSV path |
//! | `rtol`, `atol` | integrator tolerances |
//! | `tol` | shorthand: `rtol = tol`, `atol = tol / 100` (explicit `rtol`/`atol` win) |
//! | `n_exc` | excitation manifold for eigen-scan (1 or 2) |
//! | `periods`, `samples` | Rabi horizon in periods `pi / g_eff` and sample count |
//! | `hold` | kappa-scan: `ratio` (keep `delta1 / kappa1`) or `delta1` |
//! | `map` | regime-map: `ratios` (over `delta1` x `J`) or `kappa` (over `kappa1` x `kappa2`) |
//! | `gnuplot` | `true` to also write a plotting script next to the CSV |
//!
//! Explicit parameters override the preset. Scan scenarios need a grid unless
//! a preset supplies the default one.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::dynamics::Tolerances;
use crate::effective;
use crate::eigen::Delta1Policy;
use crate::probe;
use crate::{Error, Preset, Result, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    EffectiveParams,
    EigenScan,
    KappaScan,
    Rabi,
    Spectrum,
    G2Scan,
    RegimeMap,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::EffectiveParams,
        Scenario::EigenScan,
        Scenario::KappaScan,
        Scenario::Rabi,
        Scenario::Spectrum,
        Scenario::G2Scan,
        Scenario::RegimeMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::EffectiveParams => "effective-params",
            Scenario::EigenScan => "eigen-scan",
            Scenario::KappaScan => "kappa-scan",
            Scenario::Rabi => "rabi",
            Scenario::Spectrum => "spectrum",
            Scenario::G2Scan => "g2-scan",
            Scenario::RegimeMap => "regime-map",
        }
    }

    fn needs_grid(self) -> bool {
        !matches!(self, Scenario::EffectiveParams | Scenario::Rabi)
    }

    fn is_probe(self) -> bool {
        matches!(self, Scenario::Spectrum | Scenario::G2Scan)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| {
            let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
            Error::InvalidParameter(format!("unknown scenario '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MapKind {
    /// Effective ratios over `delta1` (x) and `J` (y).
    #[default]
    Ratios,
    /// `g_eff / kappa_eff` at the optimal admixture over `kappa1` (x) and `kappa2` (y).
    Kappa,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Ratios => "ratios",
            MapKind::Kappa => "kappa",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        crate::scan::linspace(self.start, self.stop, self.count)
    }
}

/// A fully resolved scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub preset: Option<Preset>,
    pub params: SystemParams,
    /// `delta2` follows the effective resonance.
    pub delta2_resonance: bool,
    /// Probe amplitude (probe scenarios only).
    pub eps: Option<f64>,
    pub grid: Option<Grid>,
    pub y_grid: Option<Grid>,
    pub output: Option<String>,
    pub tol: Tolerances,
    pub n_exc: usize,
    pub periods: f64,
    pub samples: usize,
    pub hold: Delta1Policy,
    pub map: MapKind,
    pub gnuplot: bool,
}

const KEYS: [&str; 28] = [
    "scenario", "preset", "g", "J", "delta1", "delta2", "kappa1", "kappa2", "gamma", "cutoffs", "eps", "detuning_e",
    "start", "stop", "count", "y_start", "y_stop", "y_count", "output", "rtol", "atol", "n_exc", "periods", "samples",
    "hold", "map", "gnuplot", "tol",
];

const PARAM_KEYS: [&str; 6] = ["g", "J", "delta1", "kappa1", "kappa2", "gamma"];

/// Unresolved `key = value` pairs with the line each came from (0 for overrides).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (idx, full) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = full.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(config_err(line_no, "unterminated section header"));
                }
                continue;
            }
            let spaced = line.replace('=', " = ");
            let tokens: Vec<&str> = spaced.split_whitespace().collect();
            if tokens.len() % 3 != 0 {
                return Err(config_err(line_no, format!("expected key = value pairs, got '{line}'")));
            }
            for pair in tokens.chunks(3) {
                let (key, eq, value) = (pair[0], pair[1], pair[2]);
                if eq != "=" || key == "=" || value == "=" {
                    return Err(config_err(line_no, format!("expected key = value pairs, got '{line}'")));
                }
                raw.insert(line_no, key, value)?;
            }
        }
        Ok(raw)
    }

    fn insert(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(config_err(line, format!("unknown key '{key}'")));
        }
        if let Some((prev, _)) = self.entries.get(key) {
            return Err(config_err(line, format!("duplicate key '{key}' (first set on line {prev})")));
        }
        self.entries.insert(key.to_string(), (line, value.to_string()));
        Ok(())
    }

    /// Set or replace a key, as command-line overrides do.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.entries.remove(key);
        self.insert(0, key, value)
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => {
                let x: f64 = v.parse().map_err(|_| config_err(line, format!("{key}: '{v}' is not a number")))?;
                if !x.is_finite() {
                    return Err(config_err(line, format!("{key} must be finite")));
                }
                Ok(Some(x))
            }
        }
    }

    fn integer(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| config_err(line, format!("{key}: '{v}' is not a nonnegative integer"))),
        }
    }

    fn grid(&self, prefix: &str) -> Result<Option<Grid>> {
        let keys = [format!("{prefix}start"), format!("{prefix}stop"), format!("{prefix}count")];
        let present: Vec<bool> = keys.iter().map(|k| self.get(k).is_some()).collect();
        if present.iter().all(|p| !p) {
            return Ok(None);
        }
        if let Some(missing) = keys.iter().zip(&present).find(|(_, p)| !**p) {
            let line = keys.iter().filter_map(|k| self.get(k)).map(|(l, _)| l).min().unwrap_or(0);
            return Err(config_err(line, format!("incomplete grid: missing {}", missing.0)));
        }
        let count = self.integer(&keys[2])?.unwrap();
        if count < 2 {
            return Err(config_err(self.get(&keys[2]).unwrap().0, format!("{} must be at least 2", keys[2])));
        }
        let start = self.number(&keys[0])?.unwrap();
        let stop = self.number(&keys[1])?.unwrap();
        if start == stop {
            return Err(config_err(self.get(&keys[0]).unwrap().0, "grid start and stop coincide"));
        }
        Ok(Some(Grid { start, stop, count }))
    }

    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let scenario = match self.get("scenario") {
            Some((line, v)) => v.parse::<Scenario>().map_err(|e| config_err(line, e.to_string()))?,
            None => {
                return Err(config_err(
                    0,
                    format!("missing required keys: scenario, and preset or all of {}", PARAM_KEYS.join(", ")),
                ))
            }
        };
        let preset = match self.get("preset") {
            Some((line, v)) => Some(v.parse::<Preset>().map_err(|e| config_err(line, e.to_string()))?),
            None => None,
        };

        let mut params = match preset {
            Some(pr) => pr.params(),
            None => {
                let missing: Vec<&str> = PARAM_KEYS.iter().copied().filter(|k| self.get(k).is_none()).collect();
                if !missing.is_empty() {
                    return Err(config_err(0, format!("missing required keys without a preset: {}", missing.join(", "))));
                }
                SystemParams { delta2: 0.0, ..Preset::SetA.params() }
            }
        };
        for key in PARAM_KEYS {
            if let Some(v) = self.number(key)? {
                let slot = match key {
                    "g" => &mut params.g,
                    "J" => &mut params.j,
                    "delta1" => &mut params.delta1,
                    "kappa1" => &mut params.kappa1,
                    "kappa2" => &mut params.kappa2,
                    _ => &mut params.gamma,
                };
                if let Some(pr) = preset {
                    if *slot != v {
                        log::info!("{key} = {v} overrides preset {pr} value {}", *slot);
                    }
                }
                *slot = v;
            }
        }

        let default_cutoffs = if scenario == Scenario::G2Scan { (3, 3) } else { (2, 2) };
        let (n1, n2) = match self.get("cutoffs") {
            None => default_cutoffs,
            Some((line, v)) => parse_cutoffs(v).map_err(|e| config_err(line, e.to_string()))?,
        };
        params = params.with_cutoffs(n1, n2);

        let delta2_resonance = match self.get("delta2") {
            None | Some((_, "resonance")) => true,
            Some(_) => false,
        };
        if delta2_resonance {
            params.delta2 = effective::resonance_delta2(&params).map_err(|e| config_err(0, e.to_string()))?;
        } else {
            let v = self.number("delta2")?.unwrap();
            if preset.is_some() {
                log::info!("delta2 = {v} overrides the preset's resonance value {}", params.delta2);
            }
            params.delta2 = v;
        }
        params.validate().map_err(|e| config_err(0, e.to_string()))?;

        if self.get("detuning_e").is_some() {
            return Err(config_err(self.get("detuning_e").unwrap().0, "detuning_e is scanned; use start/stop/count"));
        }

        let eps = match (scenario.is_probe(), self.number("eps")?) {
            (true, Some(e)) if e > 0.0 => Some(e),
            (_, Some(_)) => return Err(config_err(self.get("eps").unwrap().0, "eps must be positive and only applies to probe scenarios")),
            (true, None) => Some(
                match scenario {
                    Scenario::G2Scan => probe::default_g2_eps(&params),
                    _ => probe::default_spectrum_eps(&params),
                }
                .map_err(|e| config_err(0, e.to_string()))?,
            ),
            (false, None) => None,
        };

        let map = match self.get("map") {
            None => MapKind::default(),
            Some((_, "ratios")) => MapKind::Ratios,
            Some((_, "kappa")) => MapKind::Kappa,
            Some((line, v)) => return Err(config_err(line, format!("map: '{v}' is not ratios or kappa"))),
        };
        let grid = match self.grid("")? {
            Some(g) => Some(g),
            None if scenario.needs_grid() => {
                if preset.is_none() {
                    return Err(config_err(0, format!("scenario {scenario} requires a grid: start, stop, count")));
                }
                if scenario == Scenario::RegimeMap && map == MapKind::Kappa {
                    Some(Grid { start: 10.0, stop: 1000.0, count: 100 })
                } else {
                    Some(default_grid(scenario, &params).map_err(|e| config_err(0, e.to_string()))?)
                }
            }
            None => None,
        };
        let y_grid = match self.grid("y_")? {
            Some(g) => Some(g),
            None if scenario == Scenario::RegimeMap => {
                if preset.is_none() {
                    return Err(config_err(0, "regime-map requires y_start, y_stop, y_count"));
                }
                Some(default_y_grid(map))
            }
            None => None,
        };

        let mut tol = Tolerances::default();
        if let Some(t) = self.number("tol")? {
            tol = Tolerances { rtol: t, atol: t * 1e-2 };
        }
        if let Some(r) = self.number("rtol")? {
            tol.rtol = r;
        }
        if let Some(a) = self.number("atol")? {
            tol.atol = a;
        }
        let tol = Tolerances::new(tol.rtol, tol.atol).map_err(|e| config_err(0, e.to_string()))?;

        let n_exc = self.integer("n_exc")?.unwrap_or(1);
        if !(1..=2).contains(&n_exc) {
            return Err(config_err(self.get("n_exc").unwrap().0, "n_exc must be 1 or 2"));
        }
        let periods = self.number("periods")?.unwrap_or(3.0);
        if !(periods > 0.0) {
            return Err(config_err(self.get("periods").map_or(0, |x| x.0), "periods must be positive"));
        }
        let samples = self.integer("samples")?.unwrap_or(601);
        if samples < 2 {
            return Err(config_err(self.get("samples").map_or(0, |x| x.0), "samples must be at least 2"));
        }
        let hold = match self.get("hold") {
            None | Some((_, "ratio")) => Delta1Policy::FixedRatio,
            Some((_, "delta1")) => Delta1Policy::FixedDelta1,
            Some((line, v)) => return Err(config_err(line, format!("hold: '{v}' is not ratio or delta1"))),
        };
        let gnuplot = match self.get("gnuplot") {
            None | Some((_, "false")) => false,
            Some((_, "true")) => true,
            Some((line, v)) => return Err(config_err(line, format!("gnuplot: '{v}' is not true or false"))),
        };

        Ok(ScenarioConfig {
            scenario,
            preset,
            params,
            delta2_resonance,
            eps,
            grid,
            y_grid,
            output: self.get("output").map(|(_, v)| v.to_string()),
            tol,
            n_exc,
            periods,
            samples,
            hold,
            map,
            gnuplot,
        })
    }
}

pub fn parse_cutoffs(v: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = v.split(',').collect();
    let bad = || Error::InvalidParameter(format!("cutoffs: expected N1,N2 with both >= 1, got '{v}'"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let n1: usize = parts[0].trim().parse().map_err(|_| bad())?;
    let n2: usize = parts[1].trim().parse().map_err(|_| bad())?;
    if n1 == 0 || n2 == 0 {
        return Err(bad());
    }
    Ok((n1, n2))
}

/// Default grid for a scan scenario, framing the feature of interest.
pub fn default_grid(scenario: Scenario, p: &SystemParams) -> Result<Grid> {
    let eff = effective::effective_params(p)?;
    Ok(match scenario {
        Scenario::EigenScan => Grid {
            start: p.delta2 - 9.0 * eff.g_eff.abs(),
            stop: p.delta2 + 9.0 * eff.g_eff.abs(),
            count: 181,
        },
        Scenario::KappaScan => Grid { start: 10.0, stop: 1000.0, count: 100 },
        Scenario::Spectrum => Grid {
            start: eff.shift_e - 4.0 * eff.g_eff.abs(),
            stop: eff.shift_e + 4.0 * eff.g_eff.abs(),
            count: 201,
        },
        Scenario::G2Scan => Grid {
            start: eff.shift_e - 3.0 * eff.g_eff.abs(),
            stop: eff.shift_e + 3.0 * eff.g_eff.abs(),
            count: 201,
        },
        Scenario::RegimeMap => Grid { start: 100.0, stop: 3000.0, count: 59 },
        Scenario::EffectiveParams | Scenario::Rabi => {
            return Err(Error::InvalidParameter(format!("scenario {scenario} has no grid")))
        }
    })
}

fn default_y_grid(map: MapKind) -> Grid {
    match map {
        MapKind::Ratios => Grid { start: 1.0, stop: 30.0, count: 59 },
        MapKind::Kappa => Grid { start: 1e-4, stop: 1e-2, count: 100 },
    }
}

/// Parse and resolve configuration text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    RawConfig::parse(text)?.resolve()
}

impl ScenarioConfig {
    /// Configuration text that resolves back to `self`.
    pub fn serialize(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(s, "scenario = {}", self.scenario);
        if let Some(pr) = self.preset {
            let _ = writeln!(s, "preset = {pr}");
        }
        let _ = writeln!(s, "g = {:?}", p.g);
        let _ = writeln!(s, "J = {:?}", p.j);
        let _ = writeln!(s, "delta1 = {:?}", p.delta1);
        if self.delta2_resonance {
            let _ = writeln!(s, "delta2 = resonance");
        } else {
            let _ = writeln!(s, "delta2 = {:?}", p.delta2);
        }
        let _ = writeln!(s, "kappa1 = {:?}", p.kappa1);
        let _ = writeln!(s, "kappa2 = {:?}", p.kappa2);
        let _ = writeln!(s, "gamma = {:?}", p.gamma);
        let _ = writeln!(s, "cutoffs = {},{}", p.n1_cutoff, p.n2_cutoff);
        if let Some(e) = self.eps {
            let _ = writeln!(s, "eps = {e:?}");
        }
        if let Some(g) = self.grid {
            let _ = writeln!(s, "start = {:?}\nstop = {:?}\ncount = {}", g.start, g.stop, g.count);
        }
        if let Some(g) = self.y_grid {
            let _ = writeln!(s, "y_start = {:?}\ny_stop = {:?}\ny_count = {}", g.start, g.stop, g.count);
        }
        if let Some(o) = &self.output {
            let _ = writeln!(s, "output = {o}");
        }
        let _ = writeln!(s, "rtol = {:?}\natol = {:?}", self.tol.rtol, self.tol.atol);
        let _ = writeln!(s, "n_exc = {}\nperiods = {:?}\nsamples = {}", self.n_exc, self.periods, self.samples);
        let hold = match self.hold {
            Delta1Policy::FixedRatio => "ratio",
            Delta1Policy::FixedDelta1 => "delta1",
        };
        let _ = writeln!(s, "hold = {hold}\nmap = {}\ngnuplot = {}", self.map.name(), self.gnuplot);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rabi_on_preset() {
        let cfg = parse_config("scenario=rabi preset=setA").unwrap();
        assert_eq!(cfg.scenario, Scenario::Rabi);
        assert_relative_eq!(cfg.params.delta2, 2.39401e-2, max_relative = 1e-5);
        assert!(cfg.grid.is_none() && cfg.eps.is_none());
        assert_eq!((cfg.params.n1_cutoff, cfg.params.n2_cutoff), (2, 2));
    }

    #[test]
    fn empty_text_lists_required_keys() {
        let msg = parse_config("").unwrap_err().to_string();
        assert!(msg.contains("scenario") && msg.contains("kappa1"), "{msg}");
    }

    #[test]
    fn explicit_value_beats_preset() {
        let cfg = parse_config("preset = setA\nscenario = eigen-scan\ndelta2 = 0.5\n").unwrap();
        assert_eq!(cfg.params.delta2, 0.5);
        assert!(!cfg.delta2_resonance);
        let cfg = parse_config("preset = setB\nscenario = rabi\nkappa1 = 20").unwrap();
        assert_eq!(cfg.params.kappa1, 20.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("scenario = rabi\npreset = setA\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        let err = parse_config("scenario = rabi\n\npreset = setA g 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        let err = parse_config("scenario = lasing\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
        let err = parse_config("scenario = rabi\npreset = setA\ng = 1\ng = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 4, .. }));
    }

    #[test]
    fn grids() {
        let base = "scenario = g2-scan\ng=1 J=5 delta1=100 kappa1=10 kappa2=0.001 gamma=0.001\n";
        assert!(parse_config(base).unwrap_err().to_string().contains("requires a grid"));
        let err = parse_config(&format!("{base}start = -0.15\nstop = 0.15\n")).unwrap_err();
        assert!(err.to_string().contains("missing count"));
        let cfg = parse_config(&format!("{base}[grid]\nstart = -0.15 stop = 0.15 count = 201 # Fig\n")).unwrap();
        let grid = cfg.grid.unwrap();
        assert_eq!(grid.points().len(), 201);
        assert_eq!((cfg.params.n1_cutoff, cfg.params.n2_cutoff), (3, 3));
        assert!(cfg.eps.unwrap() > 0.0);
        assert!(parse_config(&format!("{base}start=0 stop=1 count=1")).is_err());
    }

    #[test]
    fn eps_only_for_probe_scenarios() {
        assert!(parse_config("scenario = rabi\npreset = setA\neps = 0.1").is_err());
        assert!(parse_config("scenario = spectrum\npreset = setA\neps = -0.1").is_err());
    }

    #[test]
    fn every_scenario_resolves_from_preset() {
        for sc in Scenario::ALL {
            let cfg = parse_config(&format!("scenario = {sc}\npreset = setB")).unwrap();
            assert_eq!(parse_config(&cfg.serialize()).unwrap(), cfg);
        }
    }

    fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
        (
            0usize..7,
            prop::option::of(prop_oneof![Just(Preset::SetA), Just(Preset::SetB)]),
            (0.5f64..2.0, 1.0f64..10.0, 50.0f64..2000.0, 5.0f64..200.0, 1e-4f64..1e-2, 1e-4f64..1e-2),
            prop::option::of(-1.0f64..1.0),
            (1usize..4, 1usize..4),
            (-1.0f64..0.0, 0.01f64..1.0, 2usize..300),
            (1e-10f64..1e-6, any::<bool>(), 1usize..3),
        )
            .prop_map(|(sc, preset, (g, j, d1, k1, k2, gm), delta2, (n1, n2), (start, stop, count), (rtol, flag, n_exc))| {
                let scenario = Scenario::ALL[sc];
                let mut text = format!("scenario = {scenario}\n");
                if let Some(pr) = preset {
                    text += &format!("preset = {pr}\n");
                }
                text += &format!("g = {g}\nJ = {j}\ndelta1 = {d1}\nkappa1 = {k1}\nkappa2 = {k2}\ngamma = {gm}\n");
                if let Some(d2) = delta2 {
                    text += &format!("delta2 = {d2}\n");
                }
                text += &format!("cutoffs = {n1},{n2}\nstart = {start}\nstop = {stop}\ncount = {count}\nrtol = {rtol}\n");
                text += &format!("y_start = 1\ny_stop = 5\ny_count = 3\ngnuplot = {flag}\nn_exc = {n_exc}\n");
                if flag {
                    text += "hold = delta1\nmap = kappa\noutput = out/run.csv\n";
                }
                parse_config(&text).unwrap()
            })
    }

    proptest! {
        #[test]
        fn serialize_round_trips(cfg in arb_config()) {
            prop_assert_eq!(parse_config(&cfg.serialize()).unwrap(), cfg);
        }
    }
}
