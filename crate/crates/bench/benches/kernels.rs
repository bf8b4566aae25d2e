use criterion::{black_box, criterion_group, criterion_main, Criterion};
use zetalab::critline::{riemann_siegel, zeta_em, EvalAccuracy};
use zetalab::moments::{joint_moment, MomentRequest, Target};
use zetalab::primes::sieve_primes;
use zetalab::twisted::{f_sum, lemma1_main, CutoffFn, ShiftConfig};
use zetalab::Complex64;
use zetalab_bench::unit_poly;

fn critical_line(c: &mut Criterion) {
    c.bench_function("riemann_siegel_1e6", |b| b.iter(|| riemann_siegel(black_box(1e6), 5).unwrap()));
    let acc = EvalAccuracy::default();
    c.bench_function("zeta_em_t1000", |b| {
        b.iter(|| zeta_em(black_box(Complex64::new(0.5, 1000.0)), &acc).unwrap())
    });
}

fn polynomials(c: &mut Criterion) {
    let p = unit_poly(1000);
    c.bench_function("poly_eval_1000", |b| b.iter(|| p.eval(black_box(12345.678))));
    let q = unit_poly(60);
    let z = Complex64::new(0.05, 0.3);
    c.bench_function("f_sum_60", |b| b.iter(|| f_sum(&q, black_box(z), z.conj()).unwrap()));
    c.bench_function("sieve_1e6", |b| b.iter(|| sieve_primes(black_box(1_000_000)).unwrap()));
}

fn integrals(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrals");
    g.sample_size(10);
    let req = MomentRequest::new(1e3, 1.0, 0.5, Target::Zeta);
    g.bench_function("joint_moment_T1e3", |b| b.iter(|| joint_moment(&req, &EvalAccuracy::default()).unwrap()));
    let phi = CutoffFn::default();
    let one = unit_poly(1);
    let cfg = ShiftConfig::paper(1e4, 32);
    g.bench_function("lemma1_n32", |b| b.iter(|| lemma1_main(&one, 1e4, &cfg, &phi, Target::Zeta).unwrap()));
    g.finish();
}

criterion_group!(benches, critical_line, polynomials, integrals);
criterion_main!(benches);
