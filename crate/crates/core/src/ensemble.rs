//! Labeled ensembles: ε-ball samples, splittings as interval partitions of
//! `[0, 1)`, and history-dependent value assignment.
//!
//! Each hidden sample carries a persistent coordinate `u ∈ [0, 1)` and a unit-ball
//! offset `e`. The split of the current context assigns `u` a label `j`, and the
//! sample sits at `ι(β_j) + ε·|<β_j|φ>|^{1/n}·e` in phase space.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::{finest_partitions, is_stable, Context, History};
use crate::error::{Error, Result};
use crate::linalg::{CVector, RMatrix, SpectralFn, C64};
use crate::observable::Observable;
use crate::phase_space::{unit_ball_offset, Chart, PhasePoint, TubeClassifier, TubeValue, EPSILON_BOUND};

/// Labels whose Born weight falls below this get no segment.
pub const MASS_FLOOR: f64 = 1e-14;
/// Allowed drift between the source and target mass of a block.
pub const BLOCK_MASS_TOL: f64 = 1e-9;
const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ModelConfig {
    state: CVector,
    epsilon: f64,
    base: Context,
    seed: u64,
    n_samples: usize,
}

impl ModelConfig {
    pub fn new(state: CVector, epsilon: f64, base: Context, seed: u64, n_samples: usize) -> Result<Self> {
        if state.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: state.len(),
            });
        }
        if !state.is_finite() || (state.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidConfig(format!("state norm {} is not 1", state.norm())));
        }
        if !(epsilon > 0.0 && epsilon < EPSILON_BOUND) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if n_samples == 0 {
            return Err(Error::InvalidConfig("n_samples must be positive".into()));
        }
        Ok(ModelConfig {
            state: state.normalized(),
            epsilon,
            base,
            seed,
            n_samples,
        })
    }

    pub fn state(&self) -> &CVector {
        &self.state
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn base(&self) -> &Context {
        &self.base
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub label: usize,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// Interval partition of `[0, 1)` labeled by indices of `context`.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub segments: Vec<Segment>,
    pub context: Context,
}

impl Split {
    /// Total length of the segments carrying `label`.
    pub fn mass(&self, label: usize) -> f64 {
        self.segments.iter().filter(|s| s.label == label).map(Segment::len).sum()
    }

    pub fn masses(&self) -> Vec<f64> {
        (0..self.context.dim()).map(|j| self.mass(j)).collect()
    }

    pub fn label_at(&self, u: f64) -> Result<usize> {
        let k = self.segments.partition_point(|s| s.lo <= u);
        match k.checked_sub(1).map(|k| &self.segments[k]) {
            Some(s) if u < s.hi => Ok(s.label),
            _ => Err(Error::UnlabeledPoint { u }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenSample {
    pub u: f64,
    pub e: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LabeledEnsemble {
    config: ModelConfig,
    history: History,
    split: Split,
    samples: Arc<Vec<HiddenSample>>,
    /// Born weights `|<β_j|φ>|²` in the current context.
    weights: Vec<f64>,
}

fn born_weights(state: &CVector, c: &Context) -> Vec<f64> {
    c.frame().vectors().iter().map(|b| b.inner(state).norm_sqr()).collect()
}

/// Draws the samples and lays out the base split.
pub fn prepare(config: &ModelConfig) -> Result<LabeledEnsemble> {
    let n = config.base.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples: Vec<HiddenSample> = (0..config.n_samples)
        .map(|_| {
            let u: f64 = rng.random();
            let e = unit_ball_offset(2 * n, &mut rng);
            HiddenSample { u, e }
        })
        .collect();

    let weights = born_weights(&config.state, &config.base);
    let mut segments = Vec::with_capacity(n);
    let mut cum = 0.0;
    for (label, &w) in weights.iter().enumerate() {
        if w < MASS_FLOOR {
            continue;
        }
        let hi = cum + w;
        segments.push(Segment { lo: cum, hi, label });
        cum = hi;
    }
    if let Some(last) = segments.last_mut() {
        last.hi = 1.0;
    }
    Ok(LabeledEnsemble {
        config: config.clone(),
        history: History::single(config.base.clone()),
        split: Split {
            segments,
            context: config.base.clone(),
        },
        samples: Arc::new(samples),
        weights,
    })
}

/// Re-subdivides, inside each finest block, the union of the source segments into
/// target segments of the new Born weights. Boundaries of block unions are kept.
pub fn extend_history(le: &LabeledEnsemble, next: Context) -> Result<LabeledEnsemble> {
    let history = le.history.extended(next.clone())?;
    let partitions = finest_partitions(le.current(), &next)?;
    let weights = born_weights(&le.config.state, &next);
    let mut segments: Vec<Segment> = Vec::with_capacity(le.split.segments.len() + next.dim());

    for (block, (ib, jb)) in partitions.i_blocks.iter().zip(&partitions.j_blocks).enumerate() {
        let source: Vec<Segment> = le
            .split
            .segments
            .iter()
            .filter(|s| ib.contains(&s.label))
            .copied()
            .collect();
        let source_mass: f64 = source.iter().map(Segment::len).sum();
        let mut targets: Vec<(usize, f64)> = jb
            .iter()
            .copied()
            .filter(|&j| weights[j] >= MASS_FLOOR)
            .map(|j| (j, weights[j]))
            .collect();
        targets.sort_by_key(|&(j, _)| j);
        let target_mass: f64 = jb.iter().map(|&j| weights[j]).sum();
        if (source_mass - target_mass).abs() > BLOCK_MASS_TOL {
            return Err(Error::BlockMassMismatch {
                block,
                source_mass,
                target_mass,
            });
        }
        if source.is_empty() {
            continue;
        }
        if targets.is_empty() {
            let j = *jb
                .iter()
                .max_by(|&&a, &&b| weights[a].total_cmp(&weights[b]))
                .expect("blocks are nonempty");
            targets.push((j, weights[j]));
        }
        cut_block(&source, &targets, &mut segments);
    }

    segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut merged: Vec<Segment> = Vec::with_capacity(segments.len());
    for s in segments {
        match merged.last_mut() {
            Some(prev) if prev.label == s.label && prev.hi == s.lo => prev.hi = s.hi,
            _ => merged.push(s),
        }
    }
    Ok(LabeledEnsemble {
        config: le.config.clone(),
        history,
        split: Split {
            segments: merged,
            context: next,
        },
        samples: Arc::clone(&le.samples),
        weights,
    })
}

/// Walks `source` left to right, handing out lengths `targets[k].1` in order.
/// The last target takes whatever remains, so the union is reproduced exactly.
fn cut_block(source: &[Segment], targets: &[(usize, f64)], out: &mut Vec<Segment>) {
    let mut t = 0;
    let mut need = targets[0].1;
    for s in source {
        let mut lo = s.lo;
        while lo < s.hi {
            let label = targets[t].0;
            let last = t + 1 == targets.len();
            let hi = if last || lo + need >= s.hi { s.hi } else { lo + need };
            if hi > lo {
                out.push(Segment { lo, hi, label });
                need -= hi - lo;
            } else {
                // Remaining need is below the resolution at `lo`.
                need = 0.0;
            }
            lo = hi;
            if !last && need <= 0.0 {
                t += 1;
                need += targets[t].1;
            }
        }
    }
}

impl LabeledEnsemble {
    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn split(&self) -> &Split {
        &self.split
    }

    pub fn samples(&self) -> &[HiddenSample] {
        &self.samples
    }

    pub fn current(&self) -> &Context {
        &self.split.context
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Whether both ensembles share the same sample storage.
    pub fn shares_samples(&self, other: &LabeledEnsemble) -> bool {
        Arc::ptr_eq(&self.samples, &other.samples)
    }

    pub fn chart(&self) -> Chart {
        Chart::new(self.config.base.clone())
    }

    /// Builds the ensemble reached by running `contexts` after the base context.
    pub fn along(config: &ModelConfig, contexts: &[Context]) -> Result<LabeledEnsemble> {
        let mut le = prepare(config)?;
        let rest = match contexts.first() {
            Some(c) if c == config.base() => &contexts[1..],
            _ => contexts,
        };
        for c in rest {
            le = extend_history(&le, c.clone())?;
        }
        Ok(le)
    }
}

pub fn label_of(le: &LabeledEnsemble, sample: usize) -> Result<usize> {
    le.split.label_at(le.samples[sample].u)
}

pub fn position_of(le: &LabeledEnsemble, sample: usize) -> Result<PhasePoint> {
    let label = label_of(le, sample)?;
    TargetBalls::new(le, &le.chart())?.position(le, sample, label)
}

/// Centre `ι(β_j)` and radius `ε·|<β_j|φ>|^{1/n}` of each label's target ball.
struct TargetBalls {
    balls: Vec<(PhasePoint, f64)>,
}

impl TargetBalls {
    fn new(le: &LabeledEnsemble, chart: &Chart) -> Result<Self> {
        let n = le.current().dim();
        let balls = le
            .current()
            .frame()
            .vectors()
            .iter()
            .zip(&le.weights)
            .map(|(b, &w)| Ok((chart.iota(b)?, le.config.epsilon * w.powf(1.0 / (2 * n) as f64))))
            .collect::<Result<_>>()?;
        Ok(TargetBalls { balls })
    }

    fn position(&self, le: &LabeledEnsemble, sample: usize, label: usize) -> Result<PhasePoint> {
        if le.weights[label] == 0.0 {
            return Err(Error::ZeroMassLabel { label });
        }
        let (center, radius) = &self.balls[label];
        Ok(center.displaced(*radius, &le.samples[sample].e))
    }
}

fn ensure_stable(o: &Observable, c: &Context) -> Result<()> {
    if o.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: o.dim(),
        });
    }
    if !is_stable(o.matrix(), c)? {
        return Err(Error::NotStable);
    }
    Ok(())
}

/// Eigenvalue of `o` on each vector of the current frame.
fn label_values(le: &LabeledEnsemble, o: &Observable) -> Result<Vec<f64>> {
    ensure_stable(o, le.current())?;
    Ok(le.current().frame().vectors().iter().map(|b| o.value_on(b)).collect())
}

/// Per-sample values: the eigenvalue of `o` on the sample's label vector.
pub fn assign_value(le: &LabeledEnsemble, o: &Observable) -> Result<Vec<f64>> {
    let table = label_values(le, o)?;
    (0..le.len()).map(|s| Ok(table[label_of(le, s)?])).collect()
}

/// Per-sample values by pulling the point back through every context change and
/// reading tube membership for the pulled-back observable in the base context.
pub fn assign_value_pullback(le: &LabeledEnsemble, o: &Observable) -> Result<Vec<f64>> {
    ensure_stable(o, le.current())?;
    let chart = le.chart();
    let changes = le.history.changes()?;
    let pulled = changes
        .iter()
        .rev()
        .fold(o.clone(), |acc, ch| acc.pulled_back(&ch.unitary));
    let classifier = TubeClassifier::new(&pulled, le.config.base(), &chart, le.config.epsilon)?;
    let balls = TargetBalls::new(le, &chart)?;
    // `T^{-1}` of each change, latest first.
    let inverse_maps: Vec<RMatrix> = changes.iter().rev().map(|ch| chart.realified(&ch.unitary).transpose()).collect();
    let mut values = Vec::with_capacity(le.len());
    for s in 0..le.len() {
        let label = label_of(le, s)?;
        let mut p = balls.position(le, s, label)?;
        for m in &inverse_maps {
            p = PhasePoint(m.apply(p.coords()));
        }
        match classifier.classify(&p)? {
            TubeValue::Value(v) => values.push(v),
            TubeValue::Undefined => return Err(Error::UndefinedValue { sample: s }),
        }
    }
    Ok(values)
}

/// `Σ_j mass(j)·o_j` over the current split.
pub fn expectation_exact(le: &LabeledEnsemble, o: &Observable) -> Result<f64> {
    let table = label_values(le, o)?;
    Ok(le.split.segments.iter().map(|s| s.len() * table[s.label]).sum())
}

/// Sample mean of the assigned values and its standard error.
pub fn expectation_mc(le: &LabeledEnsemble, o: &Observable) -> Result<(f64, f64)> {
    let values = assign_value(le, o)?;
    Ok(mean_and_stderr(&values))
}

pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GFuncReport {
    pub samples: usize,
    pub identities: usize,
}

/// Checks `v(f(B)) = f(v(B))`, `v(f(B)+B) = v(f(B))+v(B)` and
/// `v(f(B)·B) = v(f(B))·v(B)` on every sample.
pub fn check_gfunc(le: &LabeledEnsemble, b: &Observable, f: &dyn SpectralFn) -> Result<GFuncReport> {
    let a = b.map(f)?;
    let vb = assign_value(le, b)?;
    let va = assign_value(le, &a)?;
    let vsum = assign_value(le, &a.sum(b)?)?;
    let vprod = assign_value(le, &a.product(b)?)?;
    for s in 0..le.len() {
        let fb = f.eval(vb[s])?;
        let detail = if va[s] != fb {
            Some(format!("v(f(B)) = {} but f(v(B)) = {}", va[s], fb))
        } else if vsum[s] != va[s] + vb[s] {
            Some(format!("v(A+B) = {} but v(A)+v(B) = {}", vsum[s], va[s] + vb[s]))
        } else if vprod[s] != va[s] * vb[s] {
            Some(format!("v(AB) = {} but v(A)v(B) = {}", vprod[s], va[s] * vb[s]))
        } else {
            None
        };
        if let Some(detail) = detail {
            return Err(Error::GFuncViolation { sample: s, detail });
        }
    }
    Ok(GFuncReport {
        samples: le.len(),
        identities: 3 * le.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NTrnsReport {
    pub samples: usize,
}

/// Checks that `o`, stable in the last two contexts of `after`, keeps its value on
/// every sample across the final context change.
pub fn check_ntrns(before: &LabeledEnsemble, after: &LabeledEnsemble, o: &Observable) -> Result<NTrnsReport> {
    let hb = before.history.contexts();
    let ha = after.history.contexts();
    if ha.len() != hb.len() + 1 || ha[..hb.len()] != *hb {
        return Err(Error::InvalidConfig("ensemble is not a one-step extension".into()));
    }
    if before.samples != after.samples {
        return Err(Error::InvalidConfig("ensembles do not share samples".into()));
    }
    let v0 = assign_value(before, o)?;
    let v1 = assign_value(after, o)?;
    for (s, (a, b)) in v0.iter().zip(&v1).enumerate() {
        if a != b {
            return Err(Error::NTrnsViolation {
                sample: s,
                detail: format!("{} before, {} after", a, b),
            });
        }
    }
    Ok(NTrnsReport { samples: v0.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpConfig {
    pub state: Vec<C64>,
    pub epsilon: f64,
    pub seed: u64,
    pub n_samples: usize,
    pub base: String,
}

/// Serializable snapshot of a labeled ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDump {
    pub config: DumpConfig,
    pub history: Vec<String>,
    pub segments: Vec<(f64, f64, usize)>,
    pub samples: Vec<HiddenSample>,
}

impl EnsembleDump {
    pub fn of(le: &LabeledEnsemble) -> Self {
        EnsembleDump {
            config: DumpConfig {
                state: le.config.state.entries().to_vec(),
                epsilon: le.config.epsilon,
                seed: le.config.seed,
                n_samples: le.config.n_samples,
                base: le.config.base.id().to_string(),
            },
            history: le.history.contexts().iter().map(|c| c.id().to_string()).collect(),
            segments: le.split.segments.iter().map(|s| (s.lo, s.hi, s.label)).collect(),
            samples: le.samples.to_vec(),
        }
    }
}
