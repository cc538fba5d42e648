//! Randomized property suites over random states, frames and histories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::context::Context;
use crate::ensemble::{check_gfunc, check_ntrns, extend_history, LabeledEnsemble, ModelConfig};
use crate::error::{Error, Result};
use crate::phase_space::symplectic_volume_check;
use crate::random::{
    random_frame, random_history, random_shared_observable, random_stable_observable, random_state, random_unitary,
    random_value_table, related_frame,
};

/// Tolerance for the symplectic and volume residuals.
pub const SYMPLECTIC_TOL: f64 = 1e-9;
const SAMPLES_PER_TRIAL: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    GFunc,
    NTrns,
    Symplectic,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::GFunc => "gfunc",
            Suite::NTrns => "ntrns",
            Suite::Symplectic => "symplectic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub samples_checked: usize,
    pub violations: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// A random ensemble: dimension 2..=4, history length 1..=`max_depth`.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, n_samples: usize) -> Result<LabeledEnsemble> {
    let n = rng.random_range(2..=4);
    let base = Context::new(random_frame(n, rng));
    let state = random_state(n, rng);
    let depth = rng.random_range(1..=max_depth);
    let contexts = random_history(&base, depth, rng);
    let config = ModelConfig::new(state, 0.3, base, rng.random(), n_samples)?;
    LabeledEnsemble::along(&config, &contexts)
}

fn gfunc_trial(rng: &mut ChaCha8Rng) -> Result<usize> {
    let le = random_ensemble(rng, 4, SAMPLES_PER_TRIAL)?;
    let b = random_stable_observable(le.current(), rng)?;
    let f = random_value_table(b.spectrum(), rng);
    Ok(check_gfunc(&le, &b, &f)?.samples)
}

fn ntrns_trial(rng: &mut ChaCha8Rng) -> Result<usize> {
    let before = random_ensemble(rng, 4, SAMPLES_PER_TRIAL)?;
    let next = Context::new(related_frame(before.current().frame(), rng));
    let o = random_shared_observable(before.current(), &next, rng)?;
    let after = extend_history(&before, next)?;
    Ok(check_ntrns(&before, &after, &o)?.samples)
}

fn symplectic_trial(rng: &mut ChaCha8Rng) -> Result<usize> {
    let n = rng.random_range(1..=8);
    let report = symplectic_volume_check(&random_unitary(n, rng))?;
    if report.passes(SYMPLECTIC_TOL) {
        Ok(1)
    } else {
        Err(Error::AssertionFailure {
            check: "symplectic".into(),
            detail: format!(
                "n = {n}: residual {:e}, det {}",
                report.symplectic_residual, report.det
            ),
        })
    }
}

/// Runs `trials` independent trials; violations are collected, input errors abort.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples_checked = 0;
    let mut failures = Vec::new();
    for t in 0..trials {
        let outcome = match suite {
            Suite::GFunc => gfunc_trial(&mut rng),
            Suite::NTrns => ntrns_trial(&mut rng),
            Suite::Symplectic => symplectic_trial(&mut rng),
        };
        match outcome {
            Ok(k) => samples_checked += k,
            Err(e) if e.is_violation() => failures.push(format!("trial {t}: {e}")),
            Err(e) => return Err(e),
        }
    }
    Ok(SuiteReport {
        suite: suite.name().into(),
        trials,
        seed,
        samples_checked,
        violations: failures.len(),
        passed: failures.is_empty(),
        failures,
    })
}
