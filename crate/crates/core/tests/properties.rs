use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxhist::ensemble::{
    assign_value, assign_value_pullback, expectation_exact, extend_history, label_of, position_of, EnsembleDump,
    LabeledEnsemble, ModelConfig, Segment,
};
use ctxhist::io::{frame_from_json, frame_to_json};
use ctxhist::linalg::DEFAULT_GROUP_TOL;
use ctxhist::phase_space::{tube_value, TubeValue};
use ctxhist::random::{
    random_frame, random_history, random_stable_observable, random_state, random_unitary, related_frame,
};
use ctxhist::{jacobi_eigh, reduce_history, symplectic_volume_check, CMatrix, Context, History, Observable, C64};

fn random_setup(seed: u64, n: usize, depth: usize, samples: usize) -> (ModelConfig, Vec<Context>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = Context::new(random_frame(n, &mut rng));
    let contexts = random_history(&base, depth, &mut rng);
    let state = random_state(n, &mut rng);
    let config = ModelConfig::new(state, 0.4, base, rng.random(), samples).unwrap();
    (config, contexts, rng)
}

/// Maximal runs of touching intervals.
fn unions(mut pieces: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in pieces {
        match out.last_mut() {
            Some(last) if last.1 == lo => last.1 = hi,
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn check_split_shape(segments: &[Segment]) {
    assert_eq!(segments[0].lo, 0.0);
    assert_eq!(segments.last().unwrap().hi, 1.0);
    for w in segments.windows(2) {
        assert!(w[0].hi <= w[1].lo);
        assert!((w[1].lo - w[0].hi).abs() <= 1e-12);
    }
    for s in segments {
        assert!(s.hi > s.lo);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_reconstructs_degenerate_hermitian(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(n, &mut rng);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-2..=2) as f64).collect();
        let h = CMatrix::diag_real(&values).conjugate_by(&u.dagger());
        let h = h.add(&h.dagger()).scale(C64::new(0.5, 0.0));
        let (frame, spectral) = jacobi_eigh(&h, DEFAULT_GROUP_TOL).unwrap();
        prop_assert!(frame.orthonormality_residual() < 1e-12);
        prop_assert!(spectral.reconstruct(&frame).max_abs_diff(&h) < 1e-11);
        let mut distinct = values.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let found = spectral.eigenvalues();
        prop_assert_eq!(found.len(), distinct.len());
        for (a, b) in found.iter().zip(&distinct) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn context_id_ignores_order_and_phase(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = random_frame(n, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.reverse();
        let phases: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let a = Context::new(frame.clone());
        let b = Context::new(frame.permuted(&perm, &phases));
        prop_assert_eq!(a.id(), b.id());
        prop_assert!(a.is_equivalent(&b).unwrap());
    }

    #[test]
    fn frame_json_round_trip_is_bit_exact(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Context::new(random_frame(n, &mut rng));
        let back = frame_from_json(&frame_to_json(&c).unwrap()).unwrap();
        for (a, b) in c.frame().vectors().iter().zip(back.frame().vectors()) {
            for (x, y) in a.entries().iter().zip(b.entries()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn born_rule_is_reproduced(seed in any::<u64>(), n in 2usize..=4, depth in 1usize..=5) {
        let (config, contexts, mut rng) = random_setup(seed, n, depth, 16);
        let le = LabeledEnsemble::along(&config, &contexts).unwrap();
        let o = random_stable_observable(le.current(), &mut rng).unwrap();
        let exact = expectation_exact(&le, &o).unwrap();
        let quantum = o.matrix().sandwich(config.state(), config.state()).re;
        prop_assert!((exact - quantum).abs() <= 1e-9);
    }

    #[test]
    fn split_invariants_hold_along_history(seed in any::<u64>(), n in 2usize..=4, depth in 1usize..=5) {
        let (config, contexts, _) = random_setup(seed, n, depth, 8);
        let mut le = LabeledEnsemble::along(&config, &contexts[..1]).unwrap();
        for (d, next) in contexts.iter().enumerate().skip(1) {
            let after = extend_history(&le, next.clone()).unwrap();
            let parts = ctxhist::finest_partitions(le.current(), next).unwrap();
            for (ib, jb) in parts.i_blocks.iter().zip(&parts.j_blocks) {
                let pick = |e: &LabeledEnsemble, labels: &[usize]| {
                    unions(e.split().segments.iter().filter(|s| labels.contains(&s.label)).map(|s| (s.lo, s.hi)).collect())
                };
                prop_assert_eq!(pick(&le, ib), pick(&after, jb));
            }
            check_split_shape(&after.split().segments);
            for (m, w) in after.split().masses().iter().zip(after.weights()) {
                prop_assert!((m - w).abs() <= 1e-9);
            }
            prop_assert!(after.split().segments.len() <= n * (d + 1));
            prop_assert!(after.shares_samples(&le));
            le = after;
        }
    }

    #[test]
    fn dual_paths_agree(seed in any::<u64>(), n in 2usize..=4, depth in 1usize..=5) {
        let (config, contexts, mut rng) = random_setup(seed, n, depth, 64);
        let le = LabeledEnsemble::along(&config, &contexts).unwrap();
        let o = random_stable_observable(le.current(), &mut rng).unwrap();
        prop_assert_eq!(assign_value(&le, &o).unwrap(), assign_value_pullback(&le, &o).unwrap());
    }

    #[test]
    fn values_are_a_homomorphism(seed in any::<u64>(), n in 2usize..=4, depth in 1usize..=4) {
        let (config, contexts, mut rng) = random_setup(seed, n, depth, 64);
        let le = LabeledEnsemble::along(&config, &contexts).unwrap();
        let a = random_stable_observable(le.current(), &mut rng).unwrap();
        let b = random_stable_observable(le.current(), &mut rng).unwrap();
        let va = assign_value(&le, &a).unwrap();
        let vb = assign_value(&le, &b).unwrap();
        let vsum = assign_value(&le, &a.sum(&b).unwrap()).unwrap();
        let vprod = assign_value(&le, &a.product(&b).unwrap()).unwrap();
        for s in 0..le.len() {
            prop_assert_eq!(vsum[s], va[s] + vb[s]);
            prop_assert_eq!(vprod[s], va[s] * vb[s]);
        }
    }

    #[test]
    fn identical_inputs_give_identical_ensembles(seed in any::<u64>(), n in 2usize..=4, depth in 1usize..=4) {
        let (config, contexts, _) = random_setup(seed, n, depth, 32);
        let first = EnsembleDump::of(&LabeledEnsemble::along(&config, &contexts).unwrap());
        let second = EnsembleDump::of(&LabeledEnsemble::along(&config, &contexts).unwrap());
        prop_assert_eq!(serde_json::to_string(&first).unwrap(), serde_json::to_string(&second).unwrap());
    }

    #[test]
    fn positions_sit_in_the_label_tube(seed in any::<u64>(), n in 2usize..=4, depth in 1usize..=4) {
        let (config, contexts, _) = random_setup(seed, n, depth, 32);
        let le = LabeledEnsemble::along(&config, &contexts).unwrap();
        let values: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let nondegenerate = Observable::diagonal_in(le.current().frame(), &values).unwrap();
        let chart = le.chart();
        for s in 0..le.len() {
            let label = label_of(&le, s).unwrap();
            let p = position_of(&le, s).unwrap();
            let radius = config.epsilon() * le.weights()[label].powf(1.0 / (2 * n) as f64);
            prop_assert!(p.distance(&chart.iota(le.current().vector(label)).unwrap()) < radius);
            let v = tube_value(&nondegenerate, le.current(), &chart, &p, config.epsilon()).unwrap();
            prop_assert_eq!(v, TubeValue::Value(label as f64));
        }
    }

    #[test]
    fn reduction_lands_on_frames(seed in any::<u64>(), n in 2usize..=4, depth in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = Context::new(random_frame(n, &mut rng));
        let history = History::new(random_history(&base, depth, &mut rng)).unwrap();
        let r = reduce_history(&history).unwrap();
        for i in 0..n {
            let back = r.composed.dagger().apply(history.last().vector(i));
            prop_assert!(back.sub(history.first().vector(r.pullback.apply(i))).norm() < 1e-8);
        }
        prop_assert_eq!(r.pullback.compose(&r.to_last), ctxhist::Permutation::identity(n));
    }

    #[test]
    fn unitaries_are_symplectic(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let report = symplectic_volume_check(&random_unitary(n, &mut rng)).unwrap();
        prop_assert!(report.passes(1e-9));
    }
}

#[test]
fn related_frames_share_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut nontrivial = 0;
    for _ in 0..50 {
        let a = Context::new(random_frame(4, &mut rng));
        let b = Context::new(related_frame(a.frame(), &mut rng));
        if ctxhist::finest_partitions(&a, &b).unwrap().m() > 1 {
            nontrivial += 1;
        }
    }
    assert!(nontrivial > 10);
}
