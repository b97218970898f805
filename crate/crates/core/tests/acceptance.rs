//! Acceptance gate. Every criterion prints one `PASS` or `FAIL` line on
//! stderr (bypassing the test harness capture) before asserting.

use std::f64::consts::SQRT_2;
use std::io::Write;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qftbell::bounded::surface_grid;
use qftbell::kernels::{hadamard, interval, pauli_jordan};
use qftbell::modular::{qm_chsh, spectral_products, weyl_chsh_closed_form, weyl_chsh_from_products, BELL_ANGLES};
use qftbell::quadrature::{pj_inner, QuadConfig};
use qftbell::search::{local_refine, random_search, reproduce_table, Objective, SearchConfig};
use qftbell::squeezed::{chsh_analytic, chsh_squeezed, chsh_squeezed_normalized, FockConfig};
use qftbell::table::{BobSign, TABLE};
use qftbell::{Event, KernelConvention, Mass, SpectralParams, WedgeBump};

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "\n{verdict} criterion {criterion}: {detail}");
}

fn log(line: &str) {
    let _ = writeln!(std::io::stderr().lock(), "\n    {line}");
}

#[test]
fn criterion_01_closed_form_reproduction() {
    let p = SpectralParams::new(0.01, 0.564058, 0.495456).unwrap();
    let v = weyl_chsh_closed_form(p);
    let pass = (v - 2.14931).abs() < 5e-6;
    report(1, pass, &format!("closed form = {v:.9}, reported 2.14931, tolerance 5e-6"));
    assert!(pass);
}

#[test]
fn criterion_02_algebraic_identity_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = SpectralParams::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0), rng.gen_range(0.0..=1.0)).unwrap();
        worst = worst.max((weyl_chsh_from_products(spectral_products(p)) - weyl_chsh_closed_form(p)).abs());
    }
    let pass = worst < 1e-12;
    report(2, pass, &format!("max |products route - closed form| over 1000 samples = {worst:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_03_table_reproduction() {
    let quad = QuadConfig::qmc(1 << 23, 0);
    assert!(quad.qmc_points_per_replica() >= 1_000_000);
    let conventions = [KernelConvention::Paper, KernelConvention::Standard];
    let mut worst = [0.0f64; 2];
    for (k, row) in TABLE.iter().enumerate() {
        for (ci, &conv) in conventions.iter().enumerate() {
            let r = reproduce_table(row, conv, BobSign::Direct, &quad).unwrap();
            let diff = r.value - row.reported;
            worst[ci] = worst[ci].max(diff.abs());
            log(&format!(
                "row {} {conv:<8} C = {:.6} +- {:.1e} reported {:.6} diff {diff:+.6}",
                k + 1,
                r.value,
                r.error_estimate,
                row.reported
            ));
            if conv == KernelConvention::Paper {
                let products: Vec<String> = r
                    .inner_products
                    .iter()
                    .map(|(n, p)| format!("{n}={:.5e}+-{:.1e}", p.value, p.error_estimate))
                    .collect();
                log(&format!("row {} inner products (paper): {}", k + 1, products.join(" ")));
            }
        }
    }
    let chosen = conventions.iter().zip(worst).find(|(_, w)| *w <= 0.02).map(|(c, _)| *c);
    let pass = chosen.is_some();
    let spread = format!("worst |diff|: paper {:.4}, standard {:.4}", worst[0], worst[1]);
    let detail = match chosen {
        Some(c) => format!("all four rows within 0.02 under the {c} convention ({spread})"),
        None => format!("no single kernel convention brings all four rows within 0.02 ({spread})"),
    };
    report(3, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_04_causality() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = Mass::new(0.01).unwrap();
    let quad = QuadConfig::qmc(1 << 20, 4);
    let mut pass = true;
    for i in 0..5 {
        let mut draw = |side_right: bool| {
            let decay = rng.gen_range(0.01..5.0);
            let cutoff = (rng.gen_range(0.0..600f64.ln())).exp();
            let amp = rng.gen_range(0.01..7.0);
            if side_right {
                WedgeBump::right(decay, cutoff, amp).unwrap()
            } else {
                WedgeBump::left(decay, cutoff, amp).unwrap()
            }
        };
        let (f, g) = (draw(true), draw(false));
        let r = pj_inner(&f, &g, m, &quad);
        let ok = r.value.abs() <= 3.0 * r.error_estimate;
        pass &= ok;
        log(&format!("pair {i}: D_PJ(f, g) = {:e} +- {:e}", r.value, r.error_estimate));
    }
    report(4, pass, "smeared Pauli-Jordan pairing of opposite-wedge bumps is 0 within 3 sigma for 5 pairs");
    assert!(pass);
}

#[test]
fn criterion_05_squeezed_state_convergence() {
    let cfg = FockConfig::new(64, 0.99, BELL_ANGLES).unwrap();
    let truncated = chsh_squeezed(&cfg);
    let analytic = chsh_analytic(0.99, BELL_ANGLES);
    let gap = (truncated - analytic).abs();
    let at_one = chsh_analytic(1.0, BELL_ANGLES);
    let first = gap < 1e-6;
    let second = (at_one - 2.0 * SQRT_2).abs() < 1e-12;
    log(&format!(
        "K = 64, lambda = 0.99: truncated {truncated:.12}, analytic {analytic:.12}, gap {gap:.3e}, renormalized {:.12}",
        chsh_squeezed_normalized(&cfg)
    ));
    log(&format!("lambda = 1: analytic {at_one:.15} vs 2 sqrt 2 (ok: {second})"));
    report(5, first && second, &format!("truncation gap {gap:.3e} (tolerance 1e-6); lambda = 1 limit ok: {second}"));
    assert!(first && second);
}

#[test]
fn criterion_06_qm_baseline() {
    let [a, ap, b, bp] = BELL_ANGLES;
    let v = qm_chsh(a, ap, b, bp);
    let pass = (v - 2.0 * SQRT_2).abs() < 1e-12;
    report(6, pass, &format!("qm_chsh at maximal angles = {v:.15}"));
    assert!(pass);
}

#[test]
fn criterion_07_bounded_operator_violation_region() {
    let grid: Vec<f64> = (1..=50).map(|i| 0.04 * i as f64).collect();
    let rows = surface_grid(0.8, &grid, &grid, &QuadConfig::default()).unwrap();
    let (e, ep, max) = rows.iter().copied().fold((0.0, 0.0, f64::NEG_INFINITY), |acc, r| if r.2 > acc.2 { r } else { acc });
    let above_two = rows.iter().filter(|r| r.2 > 2.0).count();
    let tsirelson = rows.iter().all(|r| r.2 <= 2.0 * SQRT_2 + 1e-6);
    log(&format!("max over 2500 nodes = {max:.9} at (eta, eta') = ({e:.2}, {ep:.2}); nodes above 2: {above_two}"));
    let pass = above_two > 0 && tsirelson;
    report(7, pass, &format!("nodes above 2: {above_two}; all below 2 sqrt 2 + 1e-6: {tsirelson}"));
    assert!(pass);
}

#[test]
fn criterion_08_search_sanity() {
    let obj = Objective::ModularClosedForm;
    let space = obj.default_space();
    let cfg = SearchConfig {
        samples: 10_000,
        seed: 8,
        keep_top: 10,
        refine: true,
        refine_iters: 200,
    };
    let out = random_search(&obj, &space, &cfg).unwrap();
    let best = &out.ranked[0];
    let refined = local_refine(&best.params, &obj, &space, &cfg).unwrap();
    let pass = best.value > 2.1 && refined.value >= best.value;
    report(8, pass, &format!("best of 1e4 samples {:.6}, refined {:.6}", best.value, refined.value));
    assert!(pass);
}

#[test]
fn criterion_09_kernel_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 2000;
    let mut fails: Vec<&str> = Vec::new();
    let mut worst_kg = 0.0f64;
    let paper = KernelConvention::Paper;
    for _ in 0..n {
        let (t, x) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        let m = Mass::new(rng.gen_range(0.001..3.0)).unwrap();
        let e = Event::new(t, x);
        if pauli_jordan(e, m) != -pauli_jordan(Event::new(-t, x), m) {
            fails.push("antisymmetry");
        }
        if interval(e) < 0.0 && pauli_jordan(e, m) != 0.0 {
            fails.push("spacelike vanishing");
        }
        if let Ok(h) = hadamard(e, m, paper) {
            if h != hadamard(Event::new(-t, x), m, paper).unwrap() || h != hadamard(Event::new(t, -x), m, paper).unwrap() {
                fails.push("parity");
            }
            let s = hadamard(e, m, KernelConvention::Standard).unwrap();
            if (s - 0.5 * h).abs() > 1e-15 * h.abs() {
                fails.push("convention scaling");
            }
        }
    }
    // Klein-Gordon: (d_t^2 - d_x^2 + m^2) K = 0 away from the light cone
    let hstep = 1e-3;
    let mut kg_points = 0;
    while kg_points < n {
        let (t, x): (f64, f64) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let m: f64 = rng.gen_range(0.1..2.0);
        let lam = t * t - x * x;
        if lam.abs() < 0.5 || (lam < 0.0 && m * (-lam).sqrt() > 30.0) {
            continue;
        }
        kg_points += 1;
        let mass = Mass::new(m).unwrap();
        let kernels: [&dyn Fn(f64, f64) -> f64; 2] = [
            &|t, x| hadamard(Event::new(t, x), mass, paper).unwrap(),
            &|t, x| pauli_jordan(Event::new(t, x), mass),
        ];
        for k in kernels {
            let c = k(t, x);
            let ktt = (k(t + hstep, x) - 2.0 * c + k(t - hstep, x)) / (hstep * hstep);
            let kxx = (k(t, x + hstep) - 2.0 * c + k(t, x - hstep)) / (hstep * hstep);
            let scale = ktt.abs() + kxx.abs() + m * m * c.abs();
            let rel = (ktt - kxx + m * m * c).abs() / scale.max(1e-300);
            worst_kg = worst_kg.max(if scale < 1e-12 { 0.0 } else { rel });
        }
    }
    if worst_kg > 1e-4 {
        fails.push("Klein-Gordon residual");
    }
    fails.sort();
    fails.dedup();
    let pass = fails.is_empty();
    report(
        9,
        pass,
        &format!("{n} points per property; worst relative Klein-Gordon residual {worst_kg:.2e}; failing: {fails:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_determinism_across_workers() {
    let dir = std::env::temp_dir().join(format!("qftbell-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("config.json");
    std::fs::write(&config, r#"{"seed": 10, "quad": {"max_evals": 8388608}}"#).unwrap();
    let run = |workers: &str, out: &str| {
        let path = dir.join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_qftbell"))
            .args(["reproduce-table", "--row", "1", "--workers", workers, "--config"])
            .arg(&config)
            .arg("--output")
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let a = run("1", "w1.json");
    let b = run("8", "w8.json");
    let pass = !a.is_empty() && a == b;
    report(10, pass, &format!("reproduce-table --row 1 with 1 and 8 workers: {} bytes, identical: {}", a.len(), a == b));
    let _ = std::fs::remove_dir_all(&dir);
    assert!(pass);
}
