//! Seeded generators for states, unitaries, frames, histories and observables.
//!
//! Frames produced by [`related_frame`] share block structure with their parent,
//! so the finest partitions between consecutive contexts are usually nontrivial.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::context::{finest_partitions, Context, Frame};
use crate::error::Result;
use crate::linalg::{CMatrix, CVector, ValueTable, C64};
use crate::observable::Observable;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::new((0..n).map(|_| gaussian(rng)).collect()).normalized()
}

/// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut columns: Vec<CVector> = Vec::with_capacity(n);
    while columns.len() < n {
        let mut v = CVector::new((0..n).map(|_| gaussian(rng)).collect());
        // Two passes keep the columns orthogonal to machine precision.
        for _ in 0..2 {
            for c in &columns {
                let overlap = c.inner(&v);
                v = v.axpy(-overlap, c);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            columns.push(v.scale(C64::new(1.0 / norm, 0.0)));
        }
    }
    CMatrix::from_columns(&columns)
}

pub fn random_frame<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Frame {
    let u = random_unitary(n, rng);
    Frame::from_trusted((0..n).map(|j| u.column(j)).collect())
}

/// A frame obtained from `parent` by mixing the vectors inside random index
/// blocks, then shuffling and rephasing. Never equivalent to `parent`.
pub fn related_frame<R: Rng + ?Sized>(parent: &Frame, rng: &mut R) -> Frame {
    let n = parent.dim();
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut rest = &indices[..];
    while !rest.is_empty() {
        let size = rng.random_range(1..=rest.len());
        blocks.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    if blocks.iter().all(|b| b.len() == 1) {
        let second = blocks.remove(1);
        blocks[0].extend(second);
    }
    let mut vectors = Vec::with_capacity(n);
    for block in &blocks {
        let mix = random_unitary(block.len(), rng);
        for k in 0..block.len() {
            let v = block.iter().enumerate().fold(CVector::zeros(n), |acc, (l, &idx)| {
                acc.axpy(mix[(l, k)], parent.vector(idx))
            });
            vectors.push(v);
        }
    }
    vectors.shuffle(rng);
    let vectors = vectors
        .into_iter()
        .map(|v| v.scale(C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))))
        .collect();
    Frame::from_trusted(vectors)
}

/// `depth` contexts starting at `base`. Each step is related to the previous
/// context, except with probability 1/6 where it is a fresh random frame.
pub fn random_history<R: Rng + ?Sized>(base: &Context, depth: usize, rng: &mut R) -> Vec<Context> {
    let n = base.dim();
    let mut out = vec![base.clone()];
    while out.len() < depth {
        let prev = out.last().expect("nonempty").frame().clone();
        let frame = if rng.random_range(0..6) == 0 {
            random_frame(n, rng)
        } else {
            related_frame(&prev, rng)
        };
        out.push(Context::new(frame));
    }
    out
}

/// Observable diagonal in `c` with small integer eigenvalues (degeneracies likely).
pub fn random_stable_observable<R: Rng + ?Sized>(c: &Context, rng: &mut R) -> Result<Observable> {
    let values: Vec<f64> = (0..c.dim()).map(|_| rng.random_range(-2..=2) as f64).collect();
    Observable::diagonal_in(c.frame(), &values)
}

/// Observable stable in both `a` and `b`: a random integer combination of the
/// shared projectors.
pub fn random_shared_observable<R: Rng + ?Sized>(a: &Context, b: &Context, rng: &mut R) -> Result<Observable> {
    let partitions = finest_partitions(a, b)?;
    let mut values = vec![0.0; a.dim()];
    for block in &partitions.i_blocks {
        let v = rng.random_range(-3..=3) as f64;
        for &i in block {
            values[i] = v;
        }
    }
    Observable::diagonal_in(a.frame(), &values)
}

/// Random non-injective integer map on the given points.
pub fn random_value_table<R: Rng + ?Sized>(points: &[f64], rng: &mut R) -> ValueTable {
    ValueTable::new(points.iter().map(|&x| (x, rng.random_range(-3..=3) as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_and_frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=8 {
            assert!(random_unitary(n, &mut rng).is_unitary());
            let f = random_frame(n, &mut rng);
            assert!(Frame::new(f.vectors().to_vec()).is_ok());
            let g = related_frame(&f, &mut rng);
            assert!(Frame::new(g.vectors().to_vec()).is_ok());
            assert!(!Context::new(f).is_equivalent(&Context::new(g)).unwrap());
        }
    }

    #[test]
    fn shared_observable_is_stable_in_both() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Context::new(random_frame(4, &mut rng));
        let b = Context::new(related_frame(a.frame(), &mut rng));
        let o = random_shared_observable(&a, &b, &mut rng).unwrap();
        assert!(crate::context::is_stable(o.matrix(), &a).unwrap());
        assert!(crate::context::is_stable(o.matrix(), &b).unwrap());
    }
}
