//! Acceptance criteria: one PASS/FAIL line per criterion.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use tisp::generators::make_wick_voros;
use tisp::star::star;
use tisp::suite::{self, CriterionOutcome};
use tisp::{BandlimitedField, Generator, GridSpec, Momentum};

const SEED: u64 = 20240607;

/// Twisted convolution over all pairs of lattice points, written against
/// raw coefficient arrays.
fn oracle(coeffs_f: &[Complex64], coeffs_g: &[Complex64], n: usize, dp: f64, alpha: &Generator) -> Vec<Complex64> {
    let h = (n as i64 - 1) / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for px in -h..=h {
        for py in -h..=h {
            let mut acc = Complex64::new(0.0, 0.0);
            for qx in -h..=h {
                for qy in -h..=h {
                    let (rx, ry) = (px - qx, py - qy);
                    if rx.abs() > h || ry.abs() > h {
                        continue;
                    }
                    let at = |x: i64, y: i64| ((x + h) as usize) * n + (y + h) as usize;
                    let (a, b) = (coeffs_f[at(qx, qy)], coeffs_g[at(rx, ry)]);
                    if a.norm() == 0.0 || b.norm() == 0.0 {
                        continue;
                    }
                    let total = Momentum::from([px as f64 * dp, py as f64 * dp]);
                    let left = Momentum::from([qx as f64 * dp, qy as f64 * dp]);
                    acc += a * b * alpha.eval(&total, &left).exp();
                }
            }
            out[((px + h) as usize) * n + (py + h) as usize] = acc;
        }
    }
    out
}

fn local_oracle_gap() -> f64 {
    let grid = GridSpec::new(2, 9, 0.5).unwrap();
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.1, -1.1, 0.0]);
    let s = DMatrix::from_row_slice(2, 2, &[0.3, -0.1, -0.1, 0.6]);
    let alpha = make_wick_voros(&a, &s).unwrap();
    let mut worst = 0.0f64;
    for t in 0..20u64 {
        let f = BandlimitedField::random(grid, 2, 1000 + 2 * t).unwrap();
        let g = BandlimitedField::random(grid, 2, 1001 + 2 * t).unwrap();
        let engine = star(&f, &g, &alpha).unwrap();
        let direct = oracle(f.coeffs(), g.coeffs(), grid.n, grid.dp, &alpha);
        let scale = engine.max_abs().max(1.0);
        for (x, y) in engine.coeffs().iter().zip(&direct) {
            worst = worst.max((x - y).norm() / scale);
        }
    }
    worst
}

fn line(out: &mut impl Write, o: &CriterionOutcome, extra: &str) -> bool {
    let ok = o.pass && o.within_budget();
    let worst = o.checks.iter().filter(|c| c.limit > 0.0).map(|c| c.value / c.limit).fold(0.0f64, f64::max);
    writeln!(
        out,
        "criterion {} [{}] {}: {} checks, worst value/limit {:.1e}, {:.2}s of {:.0}s{}",
        o.id,
        o.name,
        if ok { "PASS" } else { "FAIL" },
        o.checks.len(),
        worst,
        o.seconds,
        o.budget_seconds,
        extra
    )
    .unwrap();
    for c in o.failed_checks() {
        writeln!(out, "    failed: {} = {:e} (limit {:e})", c.name, c.value, c.limit).unwrap();
    }
    if !o.within_budget() {
        writeln!(out, "    failed: runtime over budget").unwrap();
    }
    ok
}

fn main() -> ExitCode {
    let mut out = std::io::stdout().lock();
    let runs: [fn(u64) -> tisp::Result<CriterionOutcome>; 7] = [
        suite::criterion_cohomology,
        suite::criterion_hodge,
        suite::criterion_moyal_wick_voros,
        suite::criterion_trace,
        suite::criterion_rational_rays,
        suite::criterion_quantum,
        suite::criterion_oracle,
    ];
    let mut all = true;
    for (i, run) in runs.iter().enumerate() {
        match run(SEED) {
            Ok(mut o) => {
                let mut extra = String::new();
                if o.id == 7 {
                    let start = Instant::now();
                    let gap = local_oracle_gap();
                    o.seconds += start.elapsed().as_secs_f64();
                    o.checks.push(suite::Check::at_most("engine vs test-local oracle (20 trials)", gap, 1e-13));
                    o.pass = o.checks.iter().all(|c| c.pass);
                    extra = format!(", local oracle gap {gap:.1e}");
                }
                all &= line(&mut out, &o, &extra);
            }
            Err(e) => {
                writeln!(out, "criterion {} FAIL: error {e}", i + 1).unwrap();
                all = false;
            }
        }
    }
    writeln!(out, "acceptance: {}", if all { "all criteria PASS" } else { "FAIL" }).unwrap();
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
