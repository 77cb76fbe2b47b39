use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use tisp::generators::make_wick_voros;
use tisp::qft::{graph_amplitude, graphs, LoopConfig};
use tisp::star::star_with;
use tisp::{BandlimitedField, ExecMode, GridSpec, Momentum};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn bench_star(c: &mut Criterion) {
    let grid = GridSpec::new(2, 31, 0.2).unwrap();
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0]);
    let s = DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.2, 0.4]);
    let alpha = make_wick_voros(&a, &s).unwrap();
    let f = BandlimitedField::random(grid, 7, 1).unwrap();
    let g = BandlimitedField::random(grid, 7, 2).unwrap();
    let mut group = c.benchmark_group("star_m2_n31");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| star_with(mode, &f, &g, &alpha).unwrap())
        });
    }
    group.finish();
}

fn bench_loop(c: &mut Criterion) {
    let grid = GridSpec::new(4, 9, 0.5).unwrap();
    let mut a = DMatrix::zeros(4, 4);
    a[(0, 1)] = 0.6;
    a[(1, 0)] = -0.6;
    a[(2, 3)] = 0.4;
    a[(3, 2)] = -0.4;
    let s = DMatrix::from_diagonal_element(4, 4, 0.1);
    let alpha = make_wick_voros(&a, &s).unwrap();
    let graph = graphs::one_loop_2pt(&Momentum::from([0.3, -0.2, 0.1, 0.4]));
    let mut group = c.benchmark_group("one_loop_m4_n9");
    group.sample_size(10);
    for (name, mode) in MODES {
        let cfg = LoopConfig::new(grid, 1.0).unwrap().with_mode(mode);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| graph_amplitude(&graph, &alpha, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_star, bench_loop);
criterion_main!(benches);
