//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Tolerances are fixed here and never adjusted to make a line pass.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use polariton::config::{default_grid, Scenario};
use polariton::dynamics::{
    evolve, fit_decay_rate, propagator_oracle, rabi_experiment, DensityMatrix, EvolveOptions, RabiOptions, Tolerances,
};
use polariton::effective::{effective_params, kappa_map, optimal_beta, regime_map};
use polariton::eigen::{avoided_crossing_scan, avoided_crossing_scan_n, dark_doublet, effective_agreement_scan, Delta1Policy};
use polariton::hilbert::{devectorize, vectorize, Ket, LindbladModel};
use polariton::probe::{self, g2_scan, g2_zero, steady_state_oracle, ProbeOptions};
use polariton::scan::{linspace, local_maxima, local_minima};
use polariton::{Preset, ProbeDrive, SystemParams};

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((ok, name.to_string()));
    }

    fn error(&mut self, name: &str, err: impl std::fmt::Display) {
        self.check(name, false, format!("error: {err}"));
    }
}

fn set_a() -> SystemParams {
    Preset::SetA.params()
}

fn set_b() -> SystemParams {
    Preset::SetB.params()
}

fn nearest(grid: &[f64], x: f64) -> usize {
    (0..grid.len()).min_by(|&i, &j| (grid[i] - x).abs().total_cmp(&(grid[j] - x).abs())).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ac1(r: &mut Report) {
    let eff = effective_params(&set_a()).unwrap();
    let split = 2.0 * eff.g_eff;
    r.check("AC1a doublet splitting 2 g_eff = 0.01 +- 1e-6", (split - 0.01).abs() <= 1e-6, format!("2 g_eff = {split:.9}"));
    let err = rel(eff.shift_e, -0.001);
    r.check("AC1b emitter shift -alpha^2 delta1 = -0.001 within 0.3%", err < 3e-3, format!("shift_e = {:.9}, rel error {err:.2e}", eff.shift_e));
}

fn ac2(r: &mut Report) {
    let p = set_a();
    let k1 = linspace(10.0, 1000.0, 100);
    let k2 = linspace(1e-4, 1e-2, 100);
    // the closed form against g_eff / kappa_eff evaluated at beta_opt
    let mut worst = 0.0f64;
    for &a in &k1 {
        for &b in &k2 {
            let opt = optimal_beta(p.g, a, b).unwrap();
            let d = (p.delta1 * p.delta1 + a * a / 4.0).sqrt();
            let eff = effective_params(&SystemParams { kappa1: a, kappa2: b, j: opt.beta_opt * d, ..p }).unwrap();
            worst = worst.max(rel(opt.ratio_max, eff.g_eff / eff.kappa_eff));
        }
    }
    r.check("AC2a ratio_max = g / (2 sqrt(kappa1 kappa2)) to 1e-12", worst <= 1e-12, format!("max rel deviation {worst:.2e} over 10^4 points"));

    let map = kappa_map(&p, &k1, &k2).unwrap();
    let sc = map.column("strong_coupling").unwrap();
    let bd = map.column("boundary").unwrap();
    let (n1, n2) = (k1.len(), k2.len());
    let mut mismatched = 0;
    let mut off_boundary = 0;
    for i in 0..n1 {
        for j in 0..n2 {
            let idx = i * n2 + j;
            if sc[idx] != bd[idx] {
                mismatched += 1;
                let neighbours = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
                let adjacent = neighbours.iter().any(|&(a, b)| a < n1 && b < n2 && bd[a * n2 + b] != bd[idx]);
                if !adjacent {
                    off_boundary += 1;
                }
            }
        }
    }
    let strong = sc.iter().filter(|&&x| x == 1.0).count();
    r.check(
        "AC2b g_eff/kappa_eff > 1 exactly where kappa2 < g^2/(4 kappa1)",
        off_boundary == 0 && strong > 0 && strong < sc.len(),
        format!("{strong}/{} strong cells, {mismatched} mismatches ({off_boundary} away from the boundary)", sc.len()),
    );
}

fn ac3(r: &mut Report) -> f64 {
    let p = set_a();
    let eff = effective_params(&p).unwrap();
    let grid = default_grid(Scenario::EigenScan, &p).unwrap().points();
    let step = grid[1] - grid[0];
    let scan = match avoided_crossing_scan(&p, &grid) {
        Ok(s) => s,
        Err(e) => {
            r.error("AC3 avoided crossing", e);
            return f64::NAN;
        }
    };
    let split = scan.column("splitting").unwrap();
    let imin = (0..split.len()).min_by(|&a, &b| split[a].total_cmp(&split[b])).unwrap();
    let res = p.delta2;
    let err = rel(split[imin], 2.0 * eff.g_eff);
    r.check("AC3a minimum splitting = 2 g_eff within 5%", err < 0.05, format!("min {:.6e} vs {:.6e} (rel {err:.2e})", split[imin], 2.0 * eff.g_eff));
    let off = (grid[imin] - res).abs();
    r.check(
        "AC3b minimum at delta2 = (beta^2 - alpha^2) delta1 within one grid step",
        off <= step * (1.0 + 1e-9),
        format!("at {:.6e}, resonance {res:.6e}, step {step:.2e}", grid[imin]),
    );
    let ir = nearest(&grid, res);
    let (wa, wb) = (scan.column("width_a").unwrap()[ir], scan.column("width_b").unwrap()[ir]);
    r.check(
        "AC3c dark linewidths at resonance < splitting / 2",
        wa < split[ir] / 2.0 && wb < split[ir] / 2.0,
        format!("widths {wa:.3e}, {wb:.3e}; splitting {:.3e}", split[ir]),
    );
    scan.column("trace_rel_error").unwrap().iter().copied().fold(0.0, f64::max)
}

fn ac4(r: &mut Report) -> f64 {
    let p = set_b();
    let eff = effective_params(&p).unwrap();
    let target = 2.0 * 2f64.sqrt() * eff.g_eff;
    match dark_doublet(&p, 2) {
        Ok(d) => {
            let err = rel(d.splitting, target);
            r.check("AC4 two-photon dark splitting = 2 sqrt2 g_eff within 5%", err < 0.05, format!("{:.6e} vs {target:.6e} (rel {err:.2e})", d.splitting));
        }
        Err(e) => r.error("AC4 two-photon dark splitting", e),
    }
    let grid = linspace(p.delta2 - 3.0 * eff.g_eff, p.delta2 + 3.0 * eff.g_eff, 61);
    avoided_crossing_scan_n(&p, &grid, 2)
        .map(|s| s.column("trace_rel_error").unwrap().iter().copied().fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY)
}

/// Worst (trace error, Hermiticity error, min eigenvalue) across the dynamics runs.
#[derive(Default)]
struct StateHealth {
    trace: f64,
    herm: f64,
    min_eig: f64,
    runs: usize,
}

impl StateHealth {
    fn add(&mut self, d: &polariton::dynamics::Diagnostics) {
        self.trace = self.trace.max(d.max_trace_error);
        self.herm = self.herm.max(d.max_hermiticity_error);
        self.min_eig = if self.runs == 0 { d.min_eigenvalue } else { self.min_eig.min(d.min_eigenvalue) };
        self.runs += 1;
    }

    fn add_state(&mut self, rho: &DensityMatrix) {
        self.trace = self.trace.max(rho.trace_error());
        self.herm = self.herm.max(rho.hermiticity_error());
        let m = rho.min_eigenvalue();
        self.min_eig = if self.runs == 0 { m } else { self.min_eig.min(m) };
        self.runs += 1;
    }
}

fn ac5(r: &mut Report, health: &mut StateHealth) {
    match rabi_experiment(&set_a(), &RabiOptions::default()) {
        Ok(rabi) => {
            health.add(&rabi.series.diagnostics);
            r.check("AC5a Pe(t) vs effective envelope RMS < 0.02 over 3 periods", rabi.rms_deviation < 0.02, format!("RMS {:.4}", rabi.rms_deviation));
            r.check("AC5b max N1 < 1e-5", rabi.max_n1 < 1e-5, format!("max N1 {:.3e}", rabi.max_n1));
            r.check("AC5c max N2 > 0.5", rabi.max_n2 > 0.5, format!("max N2 {:.4}", rabi.max_n2));
        }
        Err(e) => r.error("AC5a-c vacuum Rabi oscillation", e),
    }

    let p = SystemParams { j: 0.0, delta1: 0.0, ..set_a() }.at_resonance().unwrap();
    match rabi_experiment(&p, &RabiOptions::default()) {
        Ok(ctl) => {
            health.add(&ctl.series.diagnostics);
            let pe = &ctl.series.pe;
            let monotone = pe.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let expected = p.gamma + 4.0 * p.g * p.g / p.kappa1;
            let rate = fit_decay_rate(&ctl.series.times, pe, 1e-8).unwrap_or(f64::NAN);
            let err = rel(rate, expected);
            r.check(
                "AC5d control J = 0, delta1 = 0: monotone decay at gamma + 4 g^2 / kappa1 within 10%",
                monotone && err < 0.1,
                format!("monotone {monotone}, fitted {rate:.5} vs {expected:.5} (rel {err:.2e})"),
            );
        }
        Err(e) => r.error("AC5d control decay", e),
    }
}

fn ac6(r: &mut Report, health: &mut StateHealth) {
    let p = set_b().with_cutoffs(3, 3);
    let eff = effective_params(&p).unwrap();
    let eps = probe::default_g2_eps(&p).unwrap();
    let grid = default_grid(Scenario::G2Scan, &p).unwrap().points();
    let step = grid[1] - grid[0];
    let scan = match g2_scan(&p, eps, &grid, &ProbeOptions::for_g2()) {
        Ok(s) => s,
        Err(e) => {
            r.error("AC6 photon blockade", e);
            return;
        }
    };
    let g2 = scan.column("g2").unwrap();
    let failed = g2.iter().filter(|x| x.is_nan()).count();
    r.check(
        "P1 steady-state residual < 1e-10 ||L|| at every g2 scan point",
        failed == 0,
        format!("{failed} of {} points failed the solve or residual check", g2.len()),
    );

    let targets = [eff.shift_e - eff.g_eff, eff.shift_e + eff.g_eff];
    let minima: Vec<f64> = local_minima(g2).into_iter().map(|i| grid[i]).collect();
    let located = targets.iter().all(|t| minima.iter().any(|m| (m - t).abs() <= step * (1.0 + 1e-9)));
    r.check(
        "AC6a g2 local minima at -alpha^2 delta1 +- g_eff within one grid step",
        located,
        format!("minima at {minima:.5?}; expected {targets:.5?}, step {step:.2e}"),
    );

    // dip values are the scan minima nearest each prediction; thresholds are
    // evaluated on an independent complex-LU solve at those points
    let minima_idx = local_minima(g2);
    let dip_idx: Vec<usize> = targets
        .iter()
        .map(|&t| {
            minima_idx
                .iter()
                .copied()
                .min_by(|&a, &b| (grid[a] - t).abs().total_cmp(&(grid[b] - t).abs()))
                .unwrap_or_else(|| nearest(&grid, t))
        })
        .collect();
    let model_at = |de: f64| LindbladModel::new(&p, &ProbeDrive::new(eps, de).unwrap()).unwrap();
    let mut oracle = Vec::new();
    let mut agreement = 0.0f64;
    for (k, idx) in [dip_idx[0], dip_idx[1], nearest(&grid, eff.shift_e)].into_iter().enumerate() {
        let m = model_at(grid[idx]);
        match steady_state_oracle(&m.liouvillian()).and_then(|rho| {
            health.add_state(&rho);
            g2_zero(&rho, &m.a2)
        }) {
            Ok(v) => {
                agreement = agreement.max(rel(g2[idx], v));
                oracle.push(v);
            }
            Err(e) => {
                r.error(&format!("AC6 oracle point {k}"), e);
                return;
            }
        }
    }
    r.check(
        "AC6b dual-method g2 agreement at dips and midpoint",
        agreement < 1e-8,
        format!("max rel difference {agreement:.2e}"),
    );
    r.check(
        "AC6c g2 < 0.2 at both dips",
        oracle[0] < 0.2 && oracle[1] < 0.2,
        format!("g2 = {:.4} at {:.5}, {:.4} at {:.5}", oracle[0], grid[dip_idx[0]], oracle[1], grid[dip_idx[1]]),
    );
    r.check("AC6d g2 > 1 at the two-photon midpoint", oracle[2] > 1.0, format!("g2 = {:.4e}", oracle[2]));

    let coarse = scan.column("g2_coarse").unwrap();
    let half = scan.column("g2_half_eps").unwrap();
    let trunc = dip_idx.iter().map(|&i| rel(coarse[i], g2[i])).fold(0.0, f64::max);
    r.check("P2 truncation (3,3) vs (2,2) changes g2 at the dips < 5%", trunc < 0.05, format!("max rel change {trunc:.2e}"));
    let weak = dip_idx.iter().map(|&i| rel(half[i], coarse[i])).fold(0.0, f64::max);
    r.check("P3 halving eps changes g2 at the dips < 2%", weak < 0.02, format!("max rel change {weak:.2e} (eps = {eps:.3e})"));
}

fn spectra(r: &mut Report) {
    let p = set_a();
    let eff = effective_params(&p).unwrap();
    let eps = probe::default_spectrum_eps(&p).unwrap();
    let grid = default_grid(Scenario::Spectrum, &p).unwrap().points();
    let scan = match probe::excitation_spectrum(&p, eps, &grid, &ProbeOptions::for_spectrum()) {
        Ok(s) => s,
        Err(e) => {
            r.error("spectrum", e);
            return;
        }
    };
    let s = scan.column("S").unwrap();
    let peaks = local_maxima(s);
    if peaks.len() != 2 {
        r.check("P4 resonant spectrum is a doublet", false, format!("{} peaks", peaks.len()));
        return;
    }
    let (lo, hi) = (grid[peaks[0]], grid[peaks[1]]);
    let split_err = rel(hi - lo, 2.0 * eff.g_eff);
    let centre_off = ((lo + hi) / 2.0 - eff.shift_e).abs();
    r.check(
        "P4 resonant spectrum: doublet split by 2 g_eff (10%) centred at -alpha^2 delta1 (0.1 g_eff)",
        split_err < 0.1 && centre_off < 0.1 * eff.g_eff,
        format!("peaks at {lo:.5e}, {hi:.5e}; split rel error {split_err:.2e}, centre offset {centre_off:.2e}"),
    );

    let s_eff = scan.column("S_eff").unwrap();
    let eff_peaks = local_maxima(s_eff);
    let agree = eff_peaks.len() == 2
        && (grid[eff_peaks[0]] - lo).abs() < 0.1 * eff.g_eff
        && (grid[eff_peaks[1]] - hi).abs() < 0.1 * eff.g_eff;
    r.check(
        "P5 exact vs effective spectrum peak positions within 10% of g_eff",
        agree,
        format!("effective peaks at {:.5?}", eff_peaks.iter().map(|&i| grid[i]).collect::<Vec<_>>()),
    );

    let (h1, h2) = (s[peaks[0]], s[peaks[1]]);
    let asym = (h1 - h2).abs() / h1.max(h2);
    r.check("P6 resonant doublet peak heights agree within 10%", asym < 0.1, format!("heights {h1:.3}, {h2:.3}"));

    let half = scan.column("S_half_eps").unwrap();
    let lin = s.iter().zip(half).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.check("AC7e halving eps changes the normalized spectrum < 1% pointwise", lin < 0.01, format!("max change {lin:.2e}"));

    let q = p.with_delta2(p.delta2 + 9.0 * eff.g_eff);
    let wide = linspace(eff.shift_e - 4.0 * eff.g_eff, eff.shift_e + 12.0 * eff.g_eff, 321);
    match probe::excitation_spectrum(&q, eps, &wide, &ProbeOptions::for_spectrum()) {
        Ok(sc) => {
            let s = sc.column("S").unwrap();
            let mut heights: Vec<f64> = local_maxima(s).into_iter().map(|i| s[i]).collect();
            heights.sort_by(|a, b| b.total_cmp(a));
            let dominant = !heights.is_empty() && heights.get(1).map_or(true, |&h2| h2 < 0.5 * heights[0]);
            r.check(
                "P7 detuned by +9 g_eff: one dominant peak",
                dominant,
                format!("peak heights {heights:.3?}"),
            );
        }
        Err(e) => r.error("P7 detuned spectrum", e),
    }
}

fn ac7(r: &mut Report, health: &mut StateHealth, eigen_trace: f64) {
    // integrator against exp(L t) on the 18-dimensional driven system
    let p = set_b();
    let eff = effective_params(&p).unwrap();
    let drive = ProbeDrive::new(0.05, eff.shift_e).unwrap();
    let model = LindbladModel::new(&p, &drive).unwrap();
    let rho0 = DensityMatrix::from_ket(&p, Ket::new(true, 0, 0)).unwrap();
    let times = linspace(0.0, 2.0 * PI / eff.g_eff, 9);
    let opts = EvolveOptions { tol: Tolerances::default(), keep_states: false };
    match evolve(&p, &drive, &rho0, &times, &opts) {
        Ok(ts) => {
            health.add(&ts.diagnostics);
            let l = model.liouvillian();
            let mut worst = 0.0f64;
            for (k, &t) in times.iter().enumerate() {
                let prop = propagator_oracle(&l, t).unwrap();
                let rho_t = devectorize(&(prop.matrix() * vectorize(rho0.matrix())), p.dim());
                for (op, got) in [(&model.n1, ts.n1[k]), (&model.n2, ts.n2[k]), (&model.excited, ts.pe[k])] {
                    worst = worst.max(((&rho_t * op.matrix()).trace().re - got).abs());
                }
            }
            r.check(
                "AC7b integrator vs matrix exponential observables < 1e-6 (dim 18)",
                worst < 1e-6,
                format!("max |difference| {worst:.2e}"),
            );
        }
        Err(e) => r.error("AC7b integrator vs matrix exponential", e),
    }

    r.check(
        "AC7a trace, positivity, Hermiticity on all acceptance runs",
        health.trace < 1e-8 && health.min_eig >= -1e-8 && health.herm < 1e-10,
        format!(
            "{} runs: max |tr - 1| {:.2e}, min eigenvalue {:.2e}, max Hermiticity error {:.2e}",
            health.runs, health.trace, health.min_eig, health.herm
        ),
    );
    r.check("AC7c eigenvalue sum = trace to 1e-10 on all eigen scans", eigen_trace < 1e-10, format!("max rel error {eigen_trace:.2e}"));

    let q = SystemParams { g: 0.0, ..set_b() }.with_cutoffs(3, 3);
    let grid = linspace(-0.05, 0.05, 21);
    match g2_scan(&q, 5e-4, &grid, &ProbeOptions { cutoffs: (3, 3), coarse_cutoffs: None }) {
        Ok(s) => {
            let worst = s.column("g2").unwrap().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
            r.check("AC7d decoupled (g = 0) g2 = 1 +- 1e-3", worst < 1e-3, format!("max |g2 - 1| {worst:.2e}"));
        }
        Err(e) => r.error("AC7d decoupled g2", e),
    }
}

fn ac8(r: &mut Report) {
    let p = set_a();
    match effective_agreement_scan(&p, &[100.0, 800.0], Delta1Policy::FixedRatio) {
        Ok(s) => {
            let d = s.column("discrepancy").unwrap();
            r.check(
                "AC8 exact/effective splitting discrepancy at kappa1 = 800 exceeds kappa1 = 100 (delta1 / kappa1 = 10)",
                d[1] > d[0],
                format!("discrepancy {:.7} at 100, {:.7} at 800", d[0], d[1]),
            );
        }
        Err(e) => r.error("AC8 breakdown trend", e),
    }
    if let Ok(s) = effective_agreement_scan(&p, &[100.0, 800.0], Delta1Policy::FixedDelta1) {
        let d = s.column("discrepancy").unwrap();
        println!("INFO AC8 with delta1 = 1000 held fixed: discrepancy {:.7} at 100, {:.7} at 800", d[0], d[1]);
    }
}

fn maps(r: &mut Report) {
    let p = set_a();
    let d1 = linspace(100.0, 3000.0, 59);
    let js = linspace(1.0, 30.0, 59);
    let map = regime_map(&p, &d1, &js).unwrap();
    let mut worst = 0.0f64;
    for (i, j) in [(0usize, 0usize), (20, 41), (58, 58)] {
        let idx = i * js.len() + j;
        let (delta1, jj) = (d1[i], js[j]);
        let d2 = delta1 * delta1 + p.kappa1 * p.kappa1 / 4.0;
        let g_eff = jj * p.g / d2.sqrt();
        let kappa_eff = p.kappa2 + jj * jj * p.kappa1 / d2;
        let gamma_eff = p.gamma + p.g * p.g * p.kappa1 / d2;
        for (col, direct) in [
            ("g_over_kappa", g_eff / kappa_eff),
            ("g_over_gamma", g_eff / gamma_eff),
            ("cooperativity", g_eff * g_eff / (kappa_eff * gamma_eff)),
        ] {
            worst = worst.max(rel(map.column(col).unwrap()[idx], direct));
        }
    }
    r.check("M1 ratio map spot values vs direct evaluation to 1e-10", worst < 1e-10, format!("max rel deviation {worst:.2e}"));

    let k1 = linspace(10.0, 1000.0, 100);
    let k2 = linspace(1e-4, 1e-2, 100);
    let map = kappa_map(&p, &k1, &k2).unwrap();
    let mut worst = 0.0f64;
    for (i, j) in [(0usize, 0usize), (37, 71), (99, 99)] {
        let idx = i * k2.len() + j;
        let (a, b) = (k1[i], k2[j]);
        let d2 = p.delta1 * p.delta1 + a * a / 4.0;
        let jj = (b / a).sqrt() * d2.sqrt();
        let direct = (jj * p.g / d2.sqrt()) / (b + jj * jj * a / d2);
        worst = worst.max(rel(map.column("g_over_kappa").unwrap()[idx], direct));
    }
    r.check("M2 kappa map spot values vs direct evaluation to 1e-10", worst < 1e-10, format!("max rel deviation {worst:.2e}"));
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut r = Report { lines: Vec::new() };
    let mut health = StateHealth::default();
    ac1(&mut r);
    ac2(&mut r);
    let t3 = ac3(&mut r);
    let t4 = ac4(&mut r);
    ac5(&mut r, &mut health);
    ac6(&mut r, &mut health);
    spectra(&mut r);
    ac7(&mut r, &mut health, t3.max(t4));
    ac8(&mut r);
    maps(&mut r);

    let failed: Vec<&str> = r.lines.iter().filter(|l| !l.0).map(|l| l.1.as_str()).collect();
    println!(
        "acceptance: {} passed, {} failed in {:.1} s",
        r.lines.len() - failed.len(),
        failed.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
