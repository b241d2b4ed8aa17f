use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dlcert::gen::{Gen, Profile};
use dlcert::par::{map_range, Exec};
use dlcert::semantics::{falsify_with, sample_state};
use dlcert::{eval_formula, parse_formula, Formula};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn falsify(c: &mut Criterion) {
    let eq = parse_formula(
        "[x:=a^2+b;while(y^2<x){z:=z+y^2*x;y:=y+6;}]z>0 \
         <-> [x:=b+a^2;if(y^2<x){z:=z+y^2*x;y:=y+6;while(y^2<x){z:=z+y^2*x;y:=y+6;}}]z>0",
    )
    .unwrap();
    let mut group = c.benchmark_group("falsify_unwind");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| falsify_with(exec, black_box(&eq), 2000, 0, 50).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let formulas: Vec<Formula> = (0..200)
        .map(|seed| {
            let mut g = Gen::new(seed, Profile::Discrete);
            Formula::boxed(g.program(3), g.formula(2))
        })
        .collect();
    let vars = Gen::new(0, Profile::Discrete).vars().to_vec();
    let mut group = c.benchmark_group("random_box_sweep");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                map_range(exec, formulas.len(), |i| {
                    (0..20)
                        .filter(|&k| {
                            let w = sample_state(&vars, i as u64, k);
                            eval_formula(&w, &formulas[i], 30).is_ok()
                        })
                        .count()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, falsify, sweep);
criterion_main!(benches);
