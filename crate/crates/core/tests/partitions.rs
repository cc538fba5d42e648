mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctxhist::random::{random_frame, related_frame};
use ctxhist::scenarios::peres::peres_contexts;
use ctxhist::scenarios::remark::remark_fixture;
use ctxhist::{change_unitary, finest_partitions, Context, Error};

use common::{brute_force_partitions, set_partitions};

#[test]
fn enumeration_gives_bell_numbers() {
    let counts: Vec<usize> = (1..=5).map(|n| set_partitions(n).len()).collect();
    assert_eq!(counts, vec![1, 2, 5, 15, 52]);
}

#[test]
fn remark_fixture_blocks() {
    let fx = remark_fixture().unwrap();
    let p = finest_partitions(&fx.b_context, &fx.c_context).unwrap();
    assert_eq!(p.i_blocks, vec![vec![0, 1], vec![2]]);
    assert_eq!(p.j_blocks, vec![vec![0, 1], vec![2]]);
    assert_eq!(brute_force_partitions(&fx.b_context, &fx.c_context), Some((p.i_blocks, p.j_blocks)));
}

#[test]
fn alpha_delta_pairs_and_alpha_gamma_single_block() {
    let ctx = peres_contexts();
    let ad = finest_partitions(&ctx.alpha, &ctx.delta).unwrap();
    assert_eq!(ad.i_blocks, vec![vec![0, 2], vec![1, 3]]);
    assert_eq!(ad.j_blocks, vec![vec![0, 2], vec![1, 3]]);
    let ag = finest_partitions(&ctx.alpha, &ctx.gamma).unwrap();
    assert_eq!(ag.i_blocks, vec![vec![0, 1, 2, 3]]);
    assert_eq!(brute_force_partitions(&ctx.alpha, &ctx.gamma), Some((ag.i_blocks, ag.j_blocks)));
}

#[test]
fn xi_gamma_blocks() {
    let ctx = peres_contexts();
    let p = finest_partitions(&ctx.xi, &ctx.gamma).unwrap();
    assert_eq!(p.i_blocks, vec![vec![0, 1], vec![2, 3]]);
    assert_eq!(p.j_blocks, vec![vec![0, 1], vec![2, 3]]);
}

#[test]
fn equivalent_frames_rejected() {
    let ctx = peres_contexts();
    let reordered = Context::new(ctx.alpha.frame().permuted(&[2, 0, 3, 1], &[0.3, 1.0, -2.0, 0.0]));
    assert!(matches!(finest_partitions(&ctx.alpha, &reordered), Err(Error::EquivalentContexts)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn agrees_with_enumeration(seed in any::<u64>(), n in 2usize..=4, related in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Context::new(random_frame(n, &mut rng));
        let b = if related {
            Context::new(related_frame(a.frame(), &mut rng))
        } else {
            Context::new(random_frame(n, &mut rng))
        };
        let p = finest_partitions(&a, &b).unwrap();
        prop_assert_eq!(brute_force_partitions(&a, &b), Some((p.i_blocks.clone(), p.j_blocks.clone())));
        let swapped = finest_partitions(&b, &a).unwrap();
        prop_assert_eq!(swapped.m(), p.m());
    }

    #[test]
    fn change_unitary_respects_blocks(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Context::new(random_frame(n, &mut rng));
        let b = Context::new(related_frame(a.frame(), &mut rng));
        let ch = change_unitary(&a, &b).unwrap();
        prop_assert!(ch.unitary.unitary_residual() < 1e-12);
        for i in 0..n {
            let image = ch.unitary.apply(a.vector(i));
            prop_assert!(image.sub(b.vector(ch.q.apply(i))).norm() < 1e-12);
            let k = ch.partitions.block_of_source(i);
            prop_assert!(ch.partitions.j_blocks[k].contains(&ch.q.apply(i)));
        }
        for (ib, jb) in ch.partitions.i_blocks.iter().zip(&ch.partitions.j_blocks) {
            let pa = a.frame().projector(ib);
            prop_assert!(ch.unitary.matmul(&pa).matmul(&ch.unitary.dagger()).max_abs_diff(&pa) < 1e-10);
            prop_assert!(pa.max_abs_diff(&b.frame().projector(jb)) < 1e-10);
        }
    }
}
