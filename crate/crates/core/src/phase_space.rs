//! The hidden-variable space `Ω = R^{2n}` with the chart of a fixed base context.
//!
//! Coordinates are `(x^1..x^n, y^1..y^n)`, the real and imaginary parts of the
//! expansion coefficients in the base frame. Unitaries act on `Ω` through
//! [`realify`] of their matrix in that frame.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::context::{is_stable, Context, ContextChange};
use crate::error::{Error, Result};
use crate::linalg::{realify, CMatrix, CVector, RMatrix, C64};
use crate::observable::Observable;

/// Upper bound (exclusive) on ε: orthonormal centres are `√2` apart.
pub const EPSILON_BOUND: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A point of `Ω`, `2n` real coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhasePoint(pub Vec<f64>);

impl PhasePoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self + s * offset`
    pub fn displaced(&self, s: f64, offset: &[f64]) -> PhasePoint {
        PhasePoint(self.0.iter().zip(offset).map(|(a, e)| a + s * e).collect())
    }
}

/// Coordinate chart `ι_α` of a base context.
#[derive(Clone, Debug)]
pub struct Chart {
    base: Context,
}

impl Chart {
    pub fn new(base: Context) -> Self {
        Chart { base }
    }

    pub fn base(&self) -> &Context {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    fn check(&self, found: usize, expected: usize) -> Result<()> {
        if found != expected {
            return Err(Error::DimensionMismatch { expected, found });
        }
        Ok(())
    }

    pub fn iota(&self, v: &CVector) -> Result<PhasePoint> {
        let n = self.dim();
        self.check(v.len(), n)?;
        let z: Vec<C64> = self.base.frame().vectors().iter().map(|a| a.inner(v)).collect();
        let mut coords: Vec<f64> = z.iter().map(|c| c.re).collect();
        coords.extend(z.iter().map(|c| c.im));
        Ok(PhasePoint(coords))
    }

    pub fn iota_inv(&self, p: &PhasePoint) -> Result<CVector> {
        let n = self.dim();
        self.check(p.dim(), 2 * n)?;
        let mut v = CVector::zeros(n);
        for (i, a) in self.base.frame().vectors().iter().enumerate() {
            v = v.axpy(C64::new(p.0[i], p.0[i + n]), a);
        }
        Ok(v)
    }

    /// Matrix of `u` in the base frame, `A^† U A`.
    pub fn in_chart(&self, u: &CMatrix) -> CMatrix {
        let a = self.base.frame().as_matrix();
        a.dagger().matmul(u).matmul(&a)
    }

    /// `ι_α ∘ U ∘ ι_α^{-1}` as a real matrix.
    pub fn realified(&self, u: &CMatrix) -> RMatrix {
        realify(&self.in_chart(u))
    }
}

/// `T = ι ∘ U ∘ ι^{-1}` (or its inverse) applied to `p`.
pub fn context_change_map(chart: &Chart, ch: &ContextChange, p: &PhasePoint, inverse: bool) -> Result<PhasePoint> {
    let n = chart.dim();
    if p.dim() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: p.dim(),
        });
    }
    let m = chart.realified(&ch.unitary);
    let m = if inverse { m.transpose() } else { m };
    Ok(PhasePoint(m.apply(&p.0)))
}

/// The constant symplectic matrix of `Σ dx^i ∧ dy^i`.
pub fn symplectic_j(n: usize) -> RMatrix {
    let mut j = RMatrix::zeros(2 * n);
    for i in 0..n {
        j[(i, i + n)] = 1.0;
        j[(i + n, i)] = -1.0;
    }
    j
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticReport {
    /// `‖MᵀJM − J‖_max`
    pub symplectic_residual: f64,
    pub det: f64,
}

impl SymplecticReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.symplectic_residual <= tol && (self.det - 1.0).abs() <= tol
    }
}

/// Symplectic residual and determinant of an arbitrary real `2n x 2n` matrix.
pub fn symplectic_report(m: &RMatrix) -> SymplecticReport {
    let n = m.dim() / 2;
    let j = symplectic_j(n);
    let residual = m.transpose().matmul(&j).matmul(m).max_abs_diff(&j);
    SymplecticReport {
        symplectic_residual: residual,
        det: m.determinant(),
    }
}

pub fn symplectic_volume_check(u: &CMatrix) -> Result<SymplecticReport> {
    u.ensure_unitary()?;
    Ok(symplectic_report(&realify(u)))
}

/// A ball in `H` of the given radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: CVector,
    pub radius: f64,
}

impl Ball {
    /// `radius` must be finite and nonnegative; zero gives a point mass.
    pub fn new(center: CVector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidConfig(format!("ball radius {radius}")));
        }
        Ok(Ball { center, radius })
    }
}

/// Uniform point of the open unit ball in `R^dim`.
pub fn unit_ball_offset<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let u: f64 = rng.random();
        let r = u.powf(1.0 / dim as f64);
        let e: Vec<f64> = g.iter().map(|x| x * r / norm).collect();
        if e.iter().map(|x| x * x).sum::<f64>() < 1.0 {
            return e;
        }
    }
}

/// Uniform sample of `ball`, in the coordinates of `chart`.
pub fn sample_ball<R: Rng + ?Sized>(chart: &Chart, ball: &Ball, rng: &mut R) -> Result<PhasePoint> {
    let center = chart.iota(&ball.center)?;
    let e = unit_ball_offset(center.dim(), rng);
    Ok(center.displaced(ball.radius, &e))
}

/// Outcome of a tube lookup: an eigenvalue, or the unspecified branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TubeValue {
    Value(f64),
    Undefined,
}

/// Preprocessed eigenspace blocks of an observable stable in a context.
#[derive(Clone, Debug)]
pub struct TubeClassifier {
    dim: usize,
    /// (eigenvalue, chart coordinates of the frame vectors spanning its eigenspace)
    blocks: Vec<(f64, Vec<Vec<C64>>)>,
    epsilon: f64,
}

impl TubeClassifier {
    pub fn new(o: &Observable, c: &Context, chart: &Chart, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < EPSILON_BOUND) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if c.dim() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                found: c.dim(),
            });
        }
        if !is_stable(o.matrix(), c)? {
            return Err(Error::NotStable);
        }
        let base = chart.base().frame();
        let mut blocks: Vec<(f64, Vec<Vec<C64>>)> = Vec::new();
        for v in c.frame().vectors() {
            let lambda = o.value_on(v);
            let coords: Vec<C64> = base.vectors().iter().map(|a| a.inner(v)).collect();
            match blocks.iter_mut().find(|(l, _)| *l == lambda) {
                Some((_, vs)) => vs.push(coords),
                None => blocks.push((lambda, vec![coords])),
            }
        }
        Ok(TubeClassifier {
            dim: chart.dim(),
            blocks,
            epsilon,
        })
    }

    /// Eigenvalue of the block whose unit sphere lies within ε of `p`.
    ///
    /// With `f* = Pz/‖Pz‖` the nearest unit vector of the block,
    /// `‖z - f*‖² = ‖z‖² - 2‖Pz‖ + 1`.
    pub fn classify(&self, p: &PhasePoint) -> Result<TubeValue> {
        let n = self.dim;
        if p.dim() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: p.dim(),
            });
        }
        let (x, y) = p.coords().split_at(n);
        let z_sqr: f64 = p.coords().iter().map(|t| t * t).sum();
        let eps_sqr = self.epsilon * self.epsilon;
        let mut found = None;
        for (lambda, vectors) in &self.blocks {
            let proj_sqr: f64 = vectors
                .iter()
                .map(|w| {
                    w.iter()
                        .zip(x.iter().zip(y))
                        .map(|(wi, (&xi, &yi))| wi.conj() * C64::new(xi, yi))
                        .sum::<C64>()
                        .norm_sqr()
                })
                .sum();
            if proj_sqr == 0.0 {
                continue;
            }
            if z_sqr - 2.0 * proj_sqr.sqrt() + 1.0 < eps_sqr {
                if found.is_some() {
                    return Err(Error::AmbiguousTube);
                }
                found = Some(*lambda);
            }
        }
        Ok(found.map_or(TubeValue::Undefined, TubeValue::Value))
    }
}

/// Value of `o` at `p` from tube membership around the eigenspaces of `o` in `c`.
pub fn tube_value(o: &Observable, c: &Context, chart: &Chart, p: &PhasePoint, epsilon: f64) -> Result<TubeValue> {
    TubeClassifier::new(o, c, chart, epsilon)?.classify(p)
}
