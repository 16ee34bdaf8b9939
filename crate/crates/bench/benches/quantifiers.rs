use criterion::{black_box, criterion_group, criterion_main, Criterion};
use starres_bench::*;
use starres_core::discord::discord_quantifier;
use starres_core::games::{harsanyi_dividend, shapley_value};
use starres_core::markov::markov_quantifier;
use starres_core::total_corr::{tc_membership, tc_quantifier};
use starres_core::unistochastic::{nu_quantifier, unistochastic_oracle};

fn quantifiers(c: &mut Criterion) {
    let s = fano_state();
    c.bench_function("discord_quantifier", |b| b.iter(|| discord_quantifier(black_box(&s)).unwrap()));
    let p = joint_2x2();
    c.bench_function("tc_quantifier 2x2", |b| b.iter(|| tc_quantifier(black_box(&p)).unwrap()));
    let p3 = joint_3x3();
    c.bench_function("tc_quantifier 3x3", |b| b.iter(|| tc_quantifier(black_box(&p3)).unwrap()));
    c.bench_function("tc_membership", |b| b.iter(|| tc_membership(black_box(&p), 1e-6)));
    let u = circulant();
    c.bench_function("nu_quantifier", |b| b.iter(|| nu_quantifier(black_box(&u))));
    let m = mixture();
    c.bench_function("markov_quantifier", |b| b.iter(|| markov_quantifier(black_box(&m)).unwrap()));
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracles");
    group.sample_size(10);
    let u = circulant();
    group.bench_function("unistochastic_oracle 20 restarts", |b| b.iter(|| unistochastic_oracle(black_box(&u), 20, 1)));
    group.finish();
}

fn games(c: &mut Criterion) {
    for n in [8, 16] {
        let rs = robustness_values(n);
        c.bench_function(&format!("harsanyi_dividend n={n}"), |b| b.iter(|| harsanyi_dividend(black_box(&rs)).unwrap()));
        c.bench_function(&format!("shapley_value n={n}"), |b| b.iter(|| shapley_value(black_box(&rs), 0).unwrap()));
    }
}

criterion_group!(benches, quantifiers, oracles, games);
criterion_main!(benches);
