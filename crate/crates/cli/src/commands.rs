use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use tisp::cochain::{is_cocycle, is_commutative, is_involutive, is_unital};
use tisp::equivalence::{decide_equivalence, quantum_identities};
use tisp::generators::{parse_generator, spec_of, GeneratorSpec};
use tisp::hodge::{commutator_matrix, decompose, harmonic_form, is_harmonic, omega, WitnessOptions};
use tisp::lattice::{FieldJson, FIELD_MAGIC};
use tisp::qft::{graph_amplitude, nonplanar_selfenergy, Amplitude, FeynmanGraph, LoopConfig};
use tisp::report::{sample_report, scaled};
use tisp::star::{self as engine, integrate, ProductBudget};
use tisp::{coboundary1, BandlimitedField, Error, ExecMode, Generator, GridSpec, Momentum, SampleSet};

use crate::report::{complex, momentum_columns, read_input, sha256_hex, CsvTable, RunReport};
use crate::Common;

fn load_generator(report: &mut RunReport, key: &str, path: &Path) -> Result<Generator> {
    let bytes = read_input(report, key, path)?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Config("spec is not UTF-8".into()))?;
    let spec = GeneratorSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    parse_generator(&spec).with_context(|| format!("building generator from {}", path.display()))
}

fn grid_for(c: &Common, dim: usize, n: usize, dp: f64) -> Result<GridSpec> {
    let grid = match &c.grid {
        Some(text) => GridSpec::parse(text)?,
        None => GridSpec::new(dim, n, dp)?,
    };
    if grid.dim != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: grid.dim }.into());
    }
    Ok(grid)
}

fn record_params(report: &mut RunReport, params: Value) {
    report.inputs.insert("parameters".into(), params);
}

fn finish(report: &mut RunReport, c: &Common, start: Instant, mut extra: BTreeMap<String, f64>) {
    if c.timing {
        extra.insert("total_seconds".into(), start.elapsed().as_secs_f64());
        report.timing = Some(extra);
    }
}

fn write_csv(c: &Common, table: &CsvTable, name: &str, written: &mut Vec<String>) -> Result<()> {
    if let Some(prefix) = &c.csv {
        written.push(table.write(prefix, name)?.display().to_string());
    }
    Ok(())
}

pub fn check(c: &Common, spec: &Path, samples: usize, radius: f64) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("check", c.seed);
    let alpha = load_generator(&mut report, "spec", spec)?;
    let tol = c.tol.unwrap_or(1e-9);
    record_params(&mut report, json!({ "samples": samples, "radius": radius, "tol": tol }));
    let set = SampleSet::random(alpha.dim(), samples, c.seed, radius);

    let cocycle = is_cocycle(&alpha, &set, tol)?;
    let unital = is_unital(&alpha, &set, tol)?;
    let commutative = is_commutative(&alpha, &set, tol)?;
    let involutive = is_involutive(&alpha, &set, tol)?;

    let h = harmonic_form(&alpha);
    let harmonic =
        sample_report("harmonic-magnitude", &set, 2, tol, ExecMode::default(), |t| h.eval(&t[0], &t[1]).norm())?;
    let expected_noncommutative = !commutative.pass && !harmonic.pass;

    report.pass = cocycle.pass && unital.pass;
    report.results = json!({
        "generator": alpha.kind(),
        "dim": alpha.dim(),
        "predicates": {
            "cocycle": { "role": "required", "report": cocycle },
            "unital": { "role": "required", "report": unital },
            "commutative": {
                "role": "property",
                "report": commutative,
                "expected_noncommutative": expected_noncommutative,
            },
            "involutive": { "role": "property", "report": involutive },
        },
        "harmonic_part_magnitude": harmonic.max_residual,
    });
    finish(&mut report, c, start, BTreeMap::new());
    Ok(report)
}

pub fn hodge(c: &Common, spec: &Path, samples: usize) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("hodge", c.seed);
    let alpha = load_generator(&mut report, "spec", spec)?;
    let dim = alpha.dim();
    let grid = grid_for(c, dim, 15, 0.25)?;
    let tol = c.tol.unwrap_or(1e-8);
    record_params(&mut report, json!({ "samples": samples, "grid": grid, "tol": tol }));

    let set = SampleSet::random(dim, samples, c.seed, 2.0);
    let opts = WitnessOptions { tol, seed: c.seed, ..WitnessOptions::default() };
    let split = decompose(&alpha, &set, &grid, &opts)?;
    let h = &split.harmonic;

    let vs_input = sample_report("harmonic-vs-input", &set, 2, tol, ExecMode::default(), |t| {
        let (a, b) = (alpha.eval(&t[0], &t[1]), h.eval(&t[0], &t[1]));
        scaled((a - b).norm(), a.norm())
    })?;
    let magnitude =
        sample_report("harmonic-magnitude", &set, 2, tol, ExecMode::default(), |t| h.eval(&t[0], &t[1]).norm())?;
    let laplace = is_harmonic(h, &set, tol)?;

    let w = omega(&alpha);
    let mut omega_csv = CsvTable::new(
        momentum_columns("p", dim).into_iter().chain(momentum_columns("q", dim)).chain(["re".into(), "im".into()]),
    );
    let mut omega_rows = Vec::new();
    for t in set.triples() {
        let v = w.eval(&t[0], &t[1]);
        let mut row: Vec<f64> = t[0].components().to_vec();
        row.extend_from_slice(t[1].components());
        row.extend([v.re, v.im]);
        omega_csv.push(row);
        if omega_rows.len() < 16 {
            omega_rows.push(json!({ "p": t[0], "q": t[1], "omega": complex(v) }));
        }
    }

    let theta = commutator_matrix(&alpha)?;
    let theta_rows: Vec<Vec<[f64; 2]>> = (0..dim).map(|i| (0..dim).map(|j| complex(theta[(i, j)])).collect()).collect();

    let mut written = Vec::new();
    write_csv(c, &omega_csv, "omega", &mut written)?;

    report.pass = laplace.pass && split.residual <= tol;
    report.results = json!({
        "generator": alpha.kind(),
        "harmonic": {
            "spec": spec_of(&harmonic_form(&alpha)),
            "equals_input": vs_input.pass,
            "is_zero": magnitude.pass,
            "difference_from_input": vs_input,
            "magnitude": magnitude,
            "laplace_beltrami": laplace,
        },
        "decomposition": {
            "residual": split.residual,
            "gauge": split.gauge.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
        },
        "omega_samples": omega_rows,
        "commutator_matrix": theta_rows,
        "csv": written,
    });
    finish(&mut report, c, start, BTreeMap::new());
    Ok(report)
}

fn load_field(report: &mut RunReport, key: &str, path: &Path) -> Result<BandlimitedField> {
    let bytes = read_input(report, key, path)?;
    let field = if bytes.starts_with(FIELD_MAGIC) {
        BandlimitedField::read_binary(&bytes[..])?
    } else {
        let j: FieldJson =
            serde_json::from_slice(&bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        BandlimitedField::from_json(&j)?
    };
    Ok(field)
}

fn field_bytes(f: &BandlimitedField) -> Vec<u8> {
    let mut buf = Vec::new();
    f.write_binary(&mut buf).expect("writing to memory");
    buf
}

pub fn star(
    c: &Common,
    spec: &Path,
    left: Option<&Path>,
    right: Option<&Path>,
    support: i64,
    field_out: Option<&Path>,
) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("star", c.seed);
    let alpha = load_generator(&mut report, "spec", spec)?;
    let f = match left {
        Some(p) => load_field(&mut report, "left", p)?,
        None => BandlimitedField::random(grid_for(c, alpha.dim(), 21, 0.25)?, support, c.seed)?,
    };
    let g = match right {
        Some(p) => load_field(&mut report, "right", p)?,
        None => BandlimitedField::random(*f.grid(), support, c.seed.wrapping_add(1))?,
    };
    if let (Some(text), Some(_)) = (&c.grid, left) {
        if GridSpec::parse(text)? != *f.grid() {
            return Err(Error::GridMismatch.into());
        }
    }
    record_params(&mut report, json!({ "grid": f.grid(), "support": support }));
    let budget = ProductBudget::for_fields(&[&f, &g])?;
    let t0 = Instant::now();
    let h = engine::star(&f, &g, &alpha)?;
    let star_seconds = t0.elapsed().as_secs_f64();
    let bytes = field_bytes(&h);
    if let Some(path) = field_out {
        std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    report.pass = true;
    report.results = json!({
        "generator": alpha.kind(),
        "grid": h.grid(),
        "budget": { "required": budget.required, "available": budget.available },
        "support_radius": h.support_radius(),
        "max_abs": h.max_abs(),
        "integral": complex(integrate(&h)),
        "zero_mode": complex(h.get(&vec![0; h.grid().dim])),
        "field_sha256": sha256_hex(&bytes),
        "field_out": field_out.map(|p| p.display().to_string()),
    });
    finish(&mut report, c, start, BTreeMap::from([("star_seconds".into(), star_seconds)]));
    Ok(report)
}

pub fn equiv(c: &Common, spec: &Path, spec2: &Path, samples: usize) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("equiv", c.seed);
    let a1 = load_generator(&mut report, "spec", spec)?;
    let a2 = load_generator(&mut report, "spec2", spec2)?;
    if a1.dim() != a2.dim() {
        return Err(Error::DimensionMismatch { expected: a1.dim(), found: a2.dim() }.into());
    }
    let dim = a1.dim();
    let grid = grid_for(c, dim, 15, 0.25)?;
    let tol = c.tol.unwrap_or(1e-8);
    record_params(&mut report, json!({ "samples": samples, "grid": grid, "tol": tol }));

    let set = SampleSet::random(dim, samples, c.seed, 2.0);
    let verdict = decide_equivalence(&a1, &a2, &set, &grid, tol)?;
    let mut results = json!({
        "generators": [a1.kind(), a2.kind()],
        "equivalent": verdict.equivalent,
        "harmonic_gap": verdict.harmonic_gap,
        "evidence": verdict.evidence,
    });
    let mut written = Vec::new();
    report.pass = verdict.equivalent;

    if let Some(w) = &verdict.witness {
        // p, q and p + q stay on the lattice
        let pairs = SampleSet::on_lattice(&grid, samples.max(1), c.seed.wrapping_add(2), grid.half() / 3);
        let d = coboundary1(&w.beta);
        let cob = sample_report("alpha1 + d beta = alpha2", &pairs, 2, tol, ExecMode::default(), |t| {
            let lhs = a1.eval(&t[0], &t[1]) + d.eval(&t[0], &t[1]);
            let rhs = a2.eval(&t[0], &t[1]);
            scaled((lhs - rhs).norm(), rhs.norm())
        })?;
        let ids = quantum_identities(&a1, &a2, &w.beta, &pairs, tol)?;

        let mut table = CsvTable::new(momentum_columns("p", dim).into_iter().chain(["re".into(), "im".into()]));
        for (i, v) in w.table.values.iter().enumerate() {
            let mut row = grid.momentum(i).components().to_vec();
            row.extend([v.re, v.im]);
            table.push(row);
        }
        write_csv(c, &table, "witness", &mut written)?;

        let origin = w.table.eval(&Momentum::zero(dim));
        report.pass &= cob.pass && ids.pass();
        results["witness"] = json!({
            "beta_at_origin": complex(origin),
            "gauge": w.gauge.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
            "harmonic_residual": w.harmonic_residual,
            "path_residual": w.path_residual,
            "involution_residual": w.involution_residual,
            "coboundary_check": cob,
            "quantum_identities": ids.reports(),
            "table_sha256": sha256_hex(table.render().as_bytes()),
        });
    }
    results["csv"] = json!(written);
    report.results = results;
    finish(&mut report, c, start, BTreeMap::new());
    Ok(report)
}

fn amplitude_json(a: &Amplitude) -> Value {
    json!({ "log_abs": a.log_abs, "phase": a.phase })
}

#[allow(clippy::too_many_arguments)]
pub fn loop_amplitudes(
    c: &Common,
    spec: &Path,
    spec2: Option<&Path>,
    graph: Option<&Path>,
    mass2: f64,
    points: usize,
    pmax: f64,
) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("loop", c.seed);
    let a1 = load_generator(&mut report, "spec", spec)?;
    let a2 = match spec2 {
        Some(p) => load_generator(&mut report, "spec2", p)?,
        None => Generator::zero(a1.dim()),
    };
    if a1.dim() != a2.dim() {
        return Err(Error::DimensionMismatch { expected: a1.dim(), found: a2.dim() }.into());
    }
    let dim = a1.dim();
    let grid = grid_for(c, dim, 9, 0.5)?;
    let cfg = LoopConfig::new(grid, mass2)?;
    record_params(&mut report, json!({ "grid": grid, "mass2": mass2, "points": points, "pmax": pmax }));

    let mut rows = Vec::new();
    let mut csv = CsvTable::new(
        momentum_columns("p", dim)
            .into_iter()
            .chain(["log_abs_1", "phase_1", "log_abs_2", "phase_2"].map(String::from)),
    );
    let mut push = |p: Option<&Momentum>, x: Amplitude, y: Amplitude| {
        let ratio = (y / x).ln();
        let mut row = p.map_or_else(|| vec![f64::NAN; dim], |p| p.components().to_vec());
        row.extend([x.log_abs, x.phase, y.log_abs, y.phase]);
        csv.push(row);
        rows.push(json!({
            "p": p,
            "amplitude_1": amplitude_json(&x),
            "amplitude_2": amplitude_json(&y),
            "log_ratio": complex(ratio),
        }));
        x.log_abs.is_finite() && y.log_abs.is_finite()
    };

    let mut finite = true;
    let mode;
    if let Some(path) = graph {
        let bytes = read_input(&mut report, "graph", path)?;
        let text = String::from_utf8(bytes).map_err(|_| Error::Config("graph is not UTF-8".into()))?;
        let g = FeynmanGraph::from_json(&text)?;
        if g.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim }.into());
        }
        finite &= push(None, graph_amplitude(&g, &a1, &cfg)?, graph_amplitude(&g, &a2, &cfg)?);
        mode = json!({ "graph": g.name, "loops": g.route()?.loop_count });
    } else {
        for j in 0..points {
            let t = if points > 1 { pmax * j as f64 / (points - 1) as f64 } else { 0.0 };
            let p = Momentum::axis(dim, 0, t);
            finite &= push(Some(&p), nonplanar_selfenergy(&a1, &p, &cfg)?, nonplanar_selfenergy(&a2, &p, &cfg)?);
        }
        mode = json!({ "graph": "non-planar self-energy scan" });
    }
    let mut written = Vec::new();
    write_csv(c, &csv, "loop", &mut written)?;

    report.pass = finite;
    report.results = json!({
        "generators": [a1.kind(), a2.kind()],
        "source": mode,
        "rows": rows,
        "csv": written,
    });
    finish(&mut report, c, start, BTreeMap::new());
    Ok(report)
}

pub fn demo(c: &Common) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::new("demo", c.seed);
    let outcomes = tisp::suite::run_all(c.seed)?;
    let mut timing = BTreeMap::new();
    for o in &outcomes {
        let line = if o.pass { "PASS" } else { "FAIL" };
        eprintln!("criterion {} [{}]: {line}", o.id, o.name);
        timing.insert(format!("criterion_{}", o.id), o.seconds);
    }
    report.pass = outcomes.iter().all(|o| o.pass);
    report.results = json!({ "criteria": outcomes });
    finish(&mut report, c, start, timing);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn amplitudes_render_as_pairs() {
        let a = Amplitude::from_complex(Complex64::new(0.0, 2.0));
        let v = amplitude_json(&a);
        assert!((v["log_abs"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((v["phase"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
