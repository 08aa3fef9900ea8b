use std::hint::black_box;
use std::time::Duration;

use aswlab::dwork::{CharSeries, DworkMatrix};
use aswlab::gnp::{cost_matrix, min_assignment_exhaustive, CostModel, CostSpec, ResidueClass};
use aswlab::oracle::{trace_histogram, DEFAULT_BUDGET};
use aswlab::rat::qi;
use aswlab::symbolic::{g_poly, Witness};
use aswlab::{Exec, FPoly, RectDelta};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn golden(p: u64) -> FPoly {
    let d = RectDelta::new(3, 3).unwrap();
    let mut f = FPoly::new(d, p, 1).unwrap();
    for (i, v) in d.points().into_iter().enumerate() {
        f.set_int(v, ((3 * i + 1) as u64 % p).max(1) as i64).unwrap();
    }
    f
}

fn dwork_matvec(c: &mut Criterion) {
    let f = golden(5);
    let m = DworkMatrix::assemble(&f, &qi(2), 2, 40, Exec::Parallel).unwrap();
    let mut g = c.benchmark_group("dwork_berkowitz");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, m.size()), |b| {
            b.iter(|| black_box(CharSeries::compute(&m, 9, exec).unwrap()))
        });
    }
    g.finish();
}

fn exp_sum_points(c: &mut Criterion) {
    let f = golden(5);
    let mut g = c.benchmark_group("exp_sum_points");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "q=25"), |b| {
            b.iter(|| black_box(trace_histogram(&f, 2, 2, None, DEFAULT_BUDGET, exec).unwrap()))
        });
    }
    g.finish();
}

fn assignment(c: &mut Criterion) {
    let d = RectDelta::new(3, 4).unwrap();
    let class = ResidueClass::new(&d, 2, 3).unwrap();
    let m = cost_matrix(&d, CostSpec::Class(class, CostModel::Ceiling), &d.filtration(9));
    let mut g = c.benchmark_group("assignment_branch_and_bound");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, m.size()), |b| {
            b.iter(|| black_box(min_assignment_exhaustive(&m, exec).unwrap()))
        });
    }
    g.finish();
}

fn permutations(c: &mut Criterion) {
    let d = RectDelta::new(3, 3).unwrap();
    let class = ResidueClass::new(&d, 2, 2).unwrap();
    let w = Witness::default_for(&d, &class);
    let mut g = c.benchmark_group("permutation_enumeration");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "F_6 level 3"), |b| {
            b.iter(|| black_box(g_poly(&d, &class, 6, 3, w, u64::MAX, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group! {
    name = kernels;
    config = Criterion::default().measurement_time(Duration::from_secs(3)).warm_up_time(Duration::from_secs(1));
    targets = dwork_matvec, exp_sum_points, assignment, permutations
}
criterion_main!(kernels);
