use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zeno_core::{
    ancilla_project, decay_value, fit_decay, product_state, project, run_ensemble, run_shot, sample_detunings,
    sqrt_e_time, DecayCurve, DecayGuess, DecayParams, ExperimentPlan, InitialState, NoiseModel, PauliString,
    Readout, SpinLabel,
};

const T2: [f64; 3] = [12.4, 8.2, 21.0];

fn plan(n: u32, shots: u64) -> ExperimentPlan {
    ExperimentPlan {
        noise: NoiseModel::new(T2.to_vec()).unwrap(),
        initial_state: InitialState::Product(vec![SpinLabel::PlusX; 3]),
        observable: PauliString::parse("XXX").unwrap(),
        readouts: vec![Readout::correlator("XXX").unwrap()],
        n,
        tau_grid: (0..21).map(|i| i as f64 * 1.5).collect(),
        shots,
        seed: 1,
        amplitude: 1.0,
        offset: 0.0,
    }
}

fn projection(c: &mut Criterion) {
    let word = PauliString::parse("XXX").unwrap();
    let rho = product_state(&[SpinLabel::PlusX, SpinLabel::PlusY, SpinLabel::Zero]).unwrap();
    c.bench_function("project_xxx", |b| b.iter(|| project(black_box(&word), black_box(&rho)).unwrap()));
    c.bench_function("ancilla_project_xxx", |b| {
        b.iter(|| ancilla_project(black_box(&rho), black_box(&word)).unwrap())
    });
}

fn shots(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_shot");
    for n in [0, 4, 16] {
        let p = plan(n, 1);
        let d = sample_detunings(1, 0, 0, &p.noise);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| run_shot(black_box(&p), black_box(&d), 10.0).unwrap())
        });
    }
    group.finish();

    let p = plan(4, 200);
    c.bench_function("run_ensemble_200x21", |b| b.iter(|| run_ensemble(black_box(&p)).unwrap()));
}

fn analytic(c: &mut Criterion) {
    let p = DecayParams::new(16, 20.0, 6.84, 1.0, 0.0).unwrap();
    c.bench_function("decay_value_n16", |b| b.iter(|| decay_value(black_box(&p))));
    c.bench_function("sqrt_e_time_n16", |b| b.iter(|| sqrt_e_time(black_box(16), 6.84).unwrap()));
}

fn fitting(c: &mut Criterion) {
    let n = 4;
    let tau: Vec<f64> = (0..30).map(|i| i as f64).collect();
    let mean = tau
        .iter()
        .map(|&t| decay_value(&DecayParams::new(n, t, 6.5, 0.9, 0.05).unwrap()))
        .collect();
    let curve = DecayCurve {
        readout: "bench".into(),
        n,
        seed: 0,
        stderr: vec![0.01; tau.len()],
        tau,
        mean,
    };
    let guess = DecayGuess::new(5.0);
    c.bench_function("fit_decay_n4", |b| b.iter(|| fit_decay(black_box(&curve), n, &guess).unwrap()));
}

criterion_group!(benches, projection, shots, analytic, fitting);
criterion_main!(benches);
