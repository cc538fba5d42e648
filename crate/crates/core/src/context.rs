//! Contexts, stability, finest common partitions and context-change unitaries.
//!
//! A context is an orthonormal frame up to reordering and per-vector phases.
//! Between two inequivalent contexts the finest pair of index partitions with
//! equal block spans is the set of connected components of the overlap graph
//! (edge `(i, j)` iff `|<α_i|β_j>| > OVERLAP_TOL`). The context-change unitary maps
//! each `α_i` to `β_{q(i)}` with `q` order-preserving inside every block.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, STRUCTURE_TOL};

/// Overlaps at or below this magnitude count as exact zeros.
pub const OVERLAP_TOL: f64 = 1e-8;
/// Residual allowed when matching a vector against a frame vector.
pub const MATCH_TOL: f64 = 1e-8;
/// Projector residual accepted when verifying block spans.
pub const SPAN_TOL: f64 = 1e-7;
/// Relative tolerance on off-diagonal elements for stability.
pub const STABLE_TOL: f64 = 1e-8;

/// An ordered orthonormal basis of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    vectors: Vec<CVector>,
}

impl Frame {
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let n = vectors.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for v in &vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if !v.is_finite() {
                return Err(Error::NotOrthonormal { residual: f64::NAN });
            }
        }
        let frame = Frame { vectors };
        let residual = frame.orthonormality_residual();
        if residual > STRUCTURE_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(frame)
    }

    pub(crate) fn from_trusted(vectors: Vec<CVector>) -> Self {
        Frame { vectors }
    }

    pub fn standard(n: usize) -> Self {
        Frame {
            vectors: (0..n).map(|i| CVector::basis(n, i)).collect(),
        }
    }

    /// The columns of a unitary matrix.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        u.ensure_unitary()?;
        Frame::new((0..u.dim()).map(|j| u.column(j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &CVector {
        &self.vectors[i]
    }

    /// Matrix with the frame vectors as columns.
    pub fn as_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = (self.vectors[i].inner(&self.vectors[j]) - C64::new(target, 0.0)).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `Σ_{i ∈ indices} |f_i><f_i|`
    pub fn projector(&self, indices: &[usize]) -> CMatrix {
        indices.iter().fold(CMatrix::zeros(self.dim()), |acc, &i| {
            acc.add(&CMatrix::outer(&self.vectors[i], &self.vectors[i]))
        })
    }

    /// Frame with vectors reordered and rephased: output `j` is `e^{iθ_j} f_{perm[j]}`.
    pub fn permuted(&self, perm: &[usize], phases: &[f64]) -> Frame {
        Frame {
            vectors: perm
                .iter()
                .zip(phases)
                .map(|(&p, &t)| self.vectors[p].scale(C64::from_polar(1.0, t)))
                .collect(),
        }
    }
}

/// A permutation of `{0, .., n-1}` stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Validates that `image` is a bijection.
    pub fn new(image: Vec<usize>) -> Option<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Permutation(image))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| (p + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Stable key of a context: hash of the phase- and order-canonicalized frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextId(String);

impl ContextId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn context_id(frame: &Frame) -> ContextId {
    const GRID: f64 = 1e8;
    let mut keys: Vec<Vec<i64>> = frame
        .vectors()
        .iter()
        .map(|v| {
            v.canonical_phase()
                .entries()
                .iter()
                .flat_map(|z| [(z.re * GRID).round() as i64, (z.im * GRID).round() as i64])
                .collect()
        })
        .collect();
    keys.sort();
    let mut hasher = Sha256::new();
    hasher.update((frame.dim() as u64).to_le_bytes());
    for key in &keys {
        for k in key {
            hasher.update(k.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    ContextId(hex::encode(&digest[..8]))
}

/// A context with a concrete representative frame.
#[derive(Clone, Debug)]
pub struct Context {
    frame: Frame,
    id: ContextId,
    name: Option<String>,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame
    }
}

impl Context {
    pub fn new(frame: Frame) -> Self {
        let id = context_id(&frame);
        Context { frame, id, name: None }
    }

    pub fn named(frame: Frame, name: impl Into<String>) -> Self {
        let mut c = Self::new(frame);
        c.name = Some(name.into());
        c
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn id(&self) -> &ContextId {
        &self.id
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The name when present, otherwise the id.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.id.to_string())
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn vector(&self, i: usize) -> &CVector {
        self.frame.vector(i)
    }

    pub fn is_equivalent(&self, other: &Context) -> Result<bool> {
        Ok(contexts_equivalent(&self.frame, &other.frame)?.is_some())
    }
}

/// Witness of frame equivalence: `b_j = e^{i phases[p(j)]} a_{p(j)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    pub permutation: Permutation,
    /// Indexed by the `a`-frame index.
    pub phases: Vec<f64>,
}

fn check_same_dim(a: &Frame, b: &Frame) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Returns the permutation/phase witness when `b` is a reordered, rephased `a`.
pub fn contexts_equivalent(a: &Frame, b: &Frame) -> Result<Option<Equivalence>> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let mut image = Vec::with_capacity(n);
    let mut phases = vec![0.0; n];
    for j in 0..n {
        let mut hit = None;
        for i in 0..n {
            let w = a.vector(i).inner(b.vector(j)).norm_sqr();
            if (w - 1.0).abs() <= MATCH_TOL {
                if hit.is_some() {
                    return Ok(None);
                }
                hit = Some(i);
            } else if w > MATCH_TOL {
                return Ok(None);
            }
        }
        let Some(i) = hit else { return Ok(None) };
        let overlap = a.vector(i).inner(b.vector(j));
        let theta = overlap.arg();
        let residual = b.vector(j).sub(&a.vector(i).scale(C64::from_polar(1.0, theta))).norm();
        if residual > MATCH_TOL {
            return Ok(None);
        }
        image.push(i);
        phases[i] = theta;
    }
    Ok(Permutation::new(image).map(|permutation| Equivalence { permutation, phases }))
}

/// `O` is diagonal in the context's frame.
pub fn is_stable(o: &CMatrix, c: &Context) -> Result<bool> {
    o.ensure_hermitian()?;
    if o.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: o.dim(),
        });
    }
    let tol = STABLE_TOL * (1.0 + o.max_abs());
    let n = c.dim();
    let images: Vec<CVector> = c.frame().vectors().iter().map(|v| o.apply(v)).collect();
    for i in 0..n {
        for (j, image) in images.iter().enumerate() {
            if i != j && c.vector(i).inner(image).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Finest partitions `{I_k}` of the source frame and `{J_k}` of the target frame
/// with `span{α_i : i ∈ I_k} = span{β_j : j ∈ J_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPair {
    pub i_blocks: Vec<Vec<usize>>,
    pub j_blocks: Vec<Vec<usize>>,
}

impl PartitionPair {
    pub fn m(&self) -> usize {
        self.i_blocks.len()
    }

    /// Block index containing source index `i`.
    pub fn block_of_source(&self, i: usize) -> usize {
        self.i_blocks
            .iter()
            .position(|b| b.contains(&i))
            .expect("partition covers every index")
    }
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            cur = std::mem::replace(&mut self.0[cur], root);
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn finest_partitions(ca: &Context, cb: &Context) -> Result<PartitionPair> {
    check_same_dim(ca.frame(), cb.frame())?;
    if ca.is_equivalent(cb)? {
        return Err(Error::EquivalentContexts);
    }
    let n = ca.dim();
    // Nodes 0..n are source indices, n..2n target indices.
    let mut sets = DisjointSet::new(2 * n);
    for i in 0..n {
        for j in 0..n {
            if ca.vector(i).inner(cb.vector(j)).norm() > OVERLAP_TOL {
                sets.union(i, n + j);
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut i_blocks: Vec<Vec<usize>> = Vec::new();
    let mut j_blocks: Vec<Vec<usize>> = Vec::new();
    for node in 0..2 * n {
        let root = sets.find(node);
        let k = match roots.iter().position(|&r| r == root) {
            Some(k) => k,
            None => {
                roots.push(root);
                i_blocks.push(Vec::new());
                j_blocks.push(Vec::new());
                roots.len() - 1
            }
        };
        if node < n {
            i_blocks[k].push(node);
        } else {
            j_blocks[k].push(node - n);
        }
    }
    // Every target vector overlaps some source vector, so each component holds a
    // source index; components with unequal sides mean the threshold broke the span.
    let mut pairs: Vec<(Vec<usize>, Vec<usize>)> = i_blocks.into_iter().zip(j_blocks).collect();
    if pairs.iter().any(|(i, j)| i.len() != j.len() || i.is_empty()) {
        return Err(Error::SpanMismatch { residual: f64::INFINITY });
    }
    pairs.sort_by_key(|(i, _)| i[0]);
    let (i_blocks, j_blocks): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let partitions = PartitionPair { i_blocks, j_blocks };

    let residual = partitions
        .i_blocks
        .iter()
        .zip(&partitions.j_blocks)
        .map(|(i, j)| ca.frame().projector(i).max_abs_diff(&cb.frame().projector(j)))
        .fold(0.0, f64::max);
    if residual > SPAN_TOL {
        return Err(Error::SpanMismatch { residual });
    }
    Ok(partitions)
}

/// Projectors `P_k = Σ_{i ∈ I_k} |α_i><α_i|` of the finest partitions.
pub fn shared_projectors(ca: &Context, cb: &Context) -> Result<Vec<CMatrix>> {
    let partitions = finest_partitions(ca, cb)?;
    Ok(partitions.i_blocks.iter().map(|b| ca.frame().projector(b)).collect())
}

/// The unitary `U_{α→β}` together with the data it was built from.
#[derive(Clone, Debug)]
pub struct ContextChange {
    pub source: Context,
    pub target: Context,
    pub unitary: CMatrix,
    /// `U α_i = β_{q(i)}`.
    pub q: Permutation,
    pub partitions: PartitionPair,
}

pub fn change_unitary(ca: &Context, cb: &Context) -> Result<ContextChange> {
    let partitions = finest_partitions(ca, cb)?;
    let n = ca.dim();
    let mut image = vec![0; n];
    for (ib, jb) in partitions.i_blocks.iter().zip(&partitions.j_blocks) {
        for (&i, &j) in ib.iter().zip(jb) {
            image[i] = j;
        }
    }
    let q = Permutation::new(image).expect("blocks partition the index set");
    let mut unitary = CMatrix::zeros(n);
    for i in 0..n {
        unitary = unitary.add(&CMatrix::outer(cb.vector(q.apply(i)), ca.vector(i)));
    }
    unitary.ensure_unitary()?;
    Ok(ContextChange {
        source: ca.clone(),
        target: cb.clone(),
        unitary,
        q,
        partitions,
    })
}

/// `‖U O U^† - O‖_max` within tolerance.
pub fn invariance_check(o: &CMatrix, ch: &ContextChange) -> Result<bool> {
    o.ensure_hermitian()?;
    let u = &ch.unitary;
    let rotated = u.matmul(o).matmul(&u.dagger());
    Ok(rotated.max_abs_diff(o) <= STABLE_TOL * (1.0 + o.max_abs()))
}

/// The permutation `p` with `op f_i = t_{p(i)}` (residual `<= MATCH_TOL`), if any.
pub fn frame_permutation(op: &CMatrix, from: &Frame, to: &Frame) -> Result<Permutation> {
    let n = from.dim();
    let mut image = Vec::with_capacity(n);
    for i in 0..n {
        let w = op.apply(from.vector(i));
        let hit = (0..n).find(|&k| w.sub(to.vector(k)).norm() <= MATCH_TOL);
        image.push(hit.ok_or(Error::NotPermutation { index: i })?);
    }
    Permutation::new(image).ok_or(Error::NotPermutation { index: 0 })
}

/// `p` with `U_{α→γ}^† U_{β→γ} U_{α→β} α_i = α_{p(i)}`.
pub fn s_permutation(ca: &Context, cb: &Context, cc: &Context) -> Result<Permutation> {
    let ab = change_unitary(ca, cb)?;
    let bc = change_unitary(cb, cc)?;
    let ac = change_unitary(ca, cc)?;
    let s = ac.unitary.dagger().matmul(&bc.unitary).matmul(&ab.unitary);
    frame_permutation(&s, ca.frame(), ca.frame())
}

/// A nonempty sequence of contexts with no two consecutive equivalent ones.
#[derive(Clone, Debug)]
pub struct History {
    contexts: Vec<Context>,
}

impl History {
    pub fn new(contexts: Vec<Context>) -> Result<Self> {
        let first = contexts.first().ok_or(Error::EmptyHistory)?;
        let n = first.dim();
        for (pos, pair) in contexts.windows(2).enumerate() {
            if pair[1].dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: pair[1].dim(),
                });
            }
            if pair[0].is_equivalent(&pair[1])? {
                return Err(Error::RepeatedContext { position: pos + 1 });
            }
        }
        Ok(History { contexts })
    }

    pub fn single(c: Context) -> Self {
        History { contexts: vec![c] }
    }

    pub fn extended(&self, next: Context) -> Result<History> {
        let last = self.last();
        if next.dim() != last.dim() {
            return Err(Error::DimensionMismatch {
                expected: last.dim(),
                found: next.dim(),
            });
        }
        if last.is_equivalent(&next)? {
            return Err(Error::RepeatedContext {
                position: self.contexts.len(),
            });
        }
        let mut contexts = self.contexts.clone();
        contexts.push(next);
        Ok(History { contexts })
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn first(&self) -> &Context {
        &self.contexts[0]
    }

    pub fn last(&self) -> &Context {
        self.contexts.last().expect("history is nonempty")
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// One context change per consecutive pair.
    pub fn changes(&self) -> Result<Vec<ContextChange>> {
        self.contexts
            .windows(2)
            .map(|w| change_unitary(&w[0], &w[1]))
            .collect()
    }

    /// Context names joined with arrows, e.g. `ξ→δ→α`.
    pub fn label(&self) -> String {
        self.contexts
            .iter()
            .map(Context::label)
            .collect::<Vec<_>>()
            .join("→")
    }
}

/// Result of collapsing a history `α → ξ → … → β` to its endpoints.
#[derive(Clone, Debug)]
pub struct HistoryReduction {
    /// `U_{ζ→β} ⋯ U_{α→ξ}`
    pub composed: CMatrix,
    /// `composed α_i = β_{r(i)}`.
    pub to_last: Permutation,
    /// `U_{α→β}`; absent when the first and last contexts are equivalent.
    pub direct: Option<ContextChange>,
    /// `composed α_i = U_{α→β} α_{p(i)}`; present with `direct`.
    pub base_permutation: Option<Permutation>,
    /// `composed^† β_i = α_{p'(i)}`.
    pub pullback: Permutation,
}

pub fn reduce_history(h: &History) -> Result<HistoryReduction> {
    if h.len() < 2 {
        return Err(Error::InvalidConfig(
            "history reduction needs at least two contexts".into(),
        ));
    }
    let n = h.first().dim();
    let composed = h
        .changes()?
        .iter()
        .fold(CMatrix::identity(n), |acc, ch| ch.unitary.matmul(&acc));
    let alpha = h.first().frame();
    let beta = h.last().frame();
    let to_last = frame_permutation(&composed, alpha, beta)?;
    let pullback = frame_permutation(&composed.dagger(), beta, alpha)?;

    let (direct, base_permutation) = if h.first().is_equivalent(h.last())? {
        (None, None)
    } else {
        let direct = change_unitary(h.first(), h.last())?;
        let reduced = direct.unitary.dagger().matmul(&composed);
        let p = frame_permutation(&reduced, alpha, alpha)?;
        (Some(direct), Some(p))
    };
    Ok(HistoryReduction {
        composed,
        to_last,
        direct,
        base_permutation,
        pullback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn remark_frames() -> (Context, Context) {
        let h = FRAC_1_SQRT_2;
        let b = Context::new(Frame::standard(3));
        let cf = Frame::new(vec![
            CVector::from_real(&[h, h, 0.0]),
            CVector::from_real(&[-h, h, 0.0]),
            CVector::from_real(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        (b, Context::new(cf))
    }

    #[test]
    fn standard_basis_is_equivalent_to_itself() {
        let f = Frame::standard(3);
        let w = contexts_equivalent(&f, &f).unwrap().unwrap();
        assert!(w.permutation.is_identity());
        assert!(w.phases.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn swap_with_phase_is_equivalent() {
        let a = Frame::standard(3);
        let b = Frame::new(vec![
            CVector::basis(3, 1),
            CVector::basis(3, 0).scale(c(0.0, 1.0)),
            CVector::basis(3, 2),
        ])
        .unwrap();
        let w = contexts_equivalent(&a, &b).unwrap().unwrap();
        assert_eq!(w.permutation.image(), &[1, 0, 2]);
        assert!((w.phases[0] - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(w.phases[1], 0.0);
        assert_eq!(Context::new(a).id(), Context::new(b).id());
    }

    #[test]
    fn dimension_mismatch() {
        let r = contexts_equivalent(&Frame::standard(2), &Frame::standard(3));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn non_orthonormal_frame_rejected() {
        let r = Frame::new(vec![CVector::from_real(&[1.0, 0.0]), CVector::from_real(&[1.0, 1.0])]);
        assert!(matches!(r, Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn remark_partitions_and_unitary() {
        let (b, cc) = remark_frames();
        let p = finest_partitions(&b, &cc).unwrap();
        assert_eq!(p.i_blocks, vec![vec![0, 1], vec![2]]);
        assert_eq!(p.j_blocks, vec![vec![0, 1], vec![2]]);
        let ch = change_unitary(&b, &cc).unwrap();
        assert!(ch.unitary.is_unitary());
        let e3 = CVector::basis(3, 2);
        assert!(ch.unitary.apply(&e3).max_abs_diff(&e3) < 1e-15);
        for i in 0..3 {
            let image = ch.unitary.apply(b.vector(i));
            assert!(image.max_abs_diff(cc.vector(ch.q.apply(i))) < 1e-15);
        }
    }

    #[test]
    fn shared_projectors_of_remark_frames() {
        let (b, cc) = remark_frames();
        let ps = shared_projectors(&b, &cc).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps[0].max_abs_diff(&CMatrix::diag_real(&[1.0, 1.0, 0.0])) < 1e-15);
        assert!(ps[1].max_abs_diff(&CMatrix::diag_real(&[0.0, 0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn equivalent_contexts_have_no_partition() {
        let a = Context::new(Frame::standard(2));
        let b = Context::new(Frame::standard(2).permuted(&[1, 0], &[0.3, 0.0]));
        assert!(matches!(finest_partitions(&a, &b), Err(Error::EquivalentContexts)));
    }

    #[test]
    fn stability_of_identity_and_diag() {
        let (b, cc) = remark_frames();
        assert!(is_stable(&CMatrix::identity(3), &cc).unwrap());
        let a = CMatrix::diag_real(&[2.0, 2.0, 3.0]);
        assert!(is_stable(&a, &b).unwrap());
        assert!(is_stable(&a, &cc).unwrap());
        assert!(!is_stable(&CMatrix::diag_real(&[1.0, 2.0, 3.0]), &cc).unwrap());
        let ch = change_unitary(&b, &cc).unwrap();
        assert!(invariance_check(&a, &ch).unwrap());
    }

    #[test]
    fn s_permutation_fixes_shared_vector() {
        let (b, cc) = remark_frames();
        let h = FRAC_1_SQRT_2;
        let d = Context::new(
            Frame::new(vec![
                CVector::new(vec![c(h, 0.0), c(0.0, h), c(0.0, 0.0)]),
                CVector::new(vec![c(h, 0.0), c(0.0, -h), c(0.0, 0.0)]),
                CVector::basis(3, 2),
            ])
            .unwrap(),
        );
        let p = s_permutation(&b, &cc, &d).unwrap();
        assert_eq!(p.apply(2), 2);
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn history_rejects_repeats() {
        let (b, _) = remark_frames();
        let same = Context::new(b.frame().permuted(&[2, 0, 1], &[0.0, 1.0, 2.0]));
        assert!(matches!(
            History::new(vec![b.clone(), same.clone()]),
            Err(Error::RepeatedContext { position: 1 })
        ));
        assert!(History::single(b).extended(same).is_err());
        assert!(matches!(History::new(vec![]), Err(Error::EmptyHistory)));
    }

    #[test]
    fn two_step_reduction_is_trivial() {
        let (b, cc) = remark_frames();
        let h = History::new(vec![b, cc]).unwrap();
        let r = reduce_history(&h).unwrap();
        assert!(r.base_permutation.unwrap().is_identity());
        assert_eq!(r.to_last, r.direct.unwrap().q);
        assert_eq!(r.pullback, r.to_last.inverse());
    }

    #[test]
    fn permutation_algebra() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.compose(&p).image(), &[1, 2, 0]);
        assert!(Permutation::new(vec![0, 0]).is_none());
        assert_eq!(p.to_string(), "[3 1 2]");
    }
}
