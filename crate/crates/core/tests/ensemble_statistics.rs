use zeno_core::analytic::effective_t2_for;
use zeno_core::{
    decay_value, effective_t2, odd_n_asymptote, run_ensemble, DecayParams, ExperimentPlan,
    InitialState, LogicalLabel, NoiseModel, PauliString, Readout, SignedPauli, SpinLabel,
};

const T2: [f64; 3] = [12.4, 8.2, 21.0];

fn correlator_plan(k: usize, n: u32, tau_grid: Vec<f64>, shots: u64, seed: u64) -> ExperimentPlan {
    let all_x = PauliString::all_x(k).unwrap();
    ExperimentPlan {
        noise: NoiseModel::new(T2[..k].to_vec()).unwrap(),
        initial_state: InitialState::Product(vec![SpinLabel::PlusX; k]),
        observable: all_x.clone(),
        readouts: vec![Readout::Correlator(SignedPauli::plus(all_x))],
        n,
        tau_grid,
        shots,
        seed,
        amplitude: 1.0,
        offset: 0.0,
    }
}

fn within(mean: f64, stderr: f64, expected: f64, z: f64) -> bool {
    (mean - expected).abs() <= z * stderr.max(1e-12)
}

#[test]
fn ensemble_tracks_closed_form() {
    for k in 1..=3 {
        let t2eff = effective_t2(&T2[..k]).unwrap();
        for n in [0, 2, 5] {
            let tau: Vec<f64> = (0..10).map(|i| 0.4 * t2eff * (n as f64 + 1.0).sqrt() * i as f64).collect();
            let curve = &run_ensemble(&correlator_plan(k, n, tau, 4000, 17)).unwrap()[0];
            let hits = (0..curve.len())
                .filter(|&i| {
                    let p = DecayParams::normalized(n, curve.tau[i], t2eff).unwrap();
                    within(curve.mean[i], curve.stderr[i], decay_value(&p), 4.0)
                })
                .count();
            assert!(hits >= 9, "k={k} N={n}: {hits}/10");
        }
    }
}

#[test]
fn amplitude_and_offset_apply_after_averaging() {
    let mut plan = correlator_plan(1, 2, vec![0.0, 6.0, 12.0], 500, 5);
    let raw = run_ensemble(&plan).unwrap().remove(0);
    plan.amplitude = 0.8;
    plan.offset = 0.1;
    let scaled = run_ensemble(&plan).unwrap().remove(0);
    for i in 0..3 {
        assert!((scaled.mean[i] - (0.1 + 0.8 * raw.mean[i])).abs() < 1e-14);
        assert!((scaled.stderr[i] - 0.8 * raw.stderr[i]).abs() < 1e-14);
    }
}

#[test]
fn odd_projection_count_plateau() {
    for n in [1, 3] {
        let plan = correlator_plan(1, n, vec![10.0 * T2[0]], 20_000, 99);
        let c = &run_ensemble(&plan).unwrap()[0];
        assert!(within(c.mean[0], c.stderr[0], odd_n_asymptote(n).unwrap(), 4.0), "N={n}: {}", c.mean[0]);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let plan = correlator_plan(2, 4, vec![0.0, 3.0, 6.0, 9.0], 300, 123);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = run_ensemble(&plan).unwrap();
    let b = pool.install(|| run_ensemble(&plan).unwrap());
    assert_eq!(a, b);
}

#[test]
fn logical_components_follow_their_own_spins() {
    // XX projections; Z_L = XI reads spin 1 only, X_L = ZZ does not dephase.
    let t2 = vec![12.4, 8.2];
    let xx = PauliString::parse("XX").unwrap();
    let n = 4;
    let tau: Vec<f64> = (0..8).map(|i| 5.0 * i as f64).collect();
    let plan = |state: LogicalLabel, readout: &str| ExperimentPlan {
        noise: NoiseModel::new(t2.clone()).unwrap(),
        initial_state: InitialState::Logical(state),
        observable: xx.clone(),
        readouts: vec![Readout::correlator(readout).unwrap()],
        n,
        tau_grid: tau.clone(),
        shots: 4000,
        seed: 8,
        amplitude: 1.0,
        offset: 0.0,
    };
    for (state, readout) in [(LogicalLabel::Zero, "XI"), (LogicalLabel::PlusI, "-YZ")] {
        let word = SignedPauli::parse(readout).unwrap().word;
        let t = effective_t2_for(&t2, &word).unwrap().unwrap();
        assert!((t - 12.4).abs() < 1e-12);
        let c = &run_ensemble(&plan(state, readout)).unwrap()[0];
        let hits = (0..c.len())
            .filter(|&i| within(c.mean[i], c.stderr[i], decay_value(&DecayParams::normalized(n, c.tau[i], t).unwrap()), 4.0))
            .count();
        assert!(hits >= 7, "{state} {readout}: {hits}/8");
    }
    let c = &run_ensemble(&plan(LogicalLabel::Plus, "ZZ")).unwrap()[0];
    assert!(c.mean.iter().all(|m| (m - 1.0).abs() < 1e-12));
}
