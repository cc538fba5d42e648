//! Two spin-1/2 particles in the singlet state and the six contexts of the
//! Peres argument against noncontextual value assignment.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use serde::Serialize;

use crate::context::{is_stable, Context, Frame};
use crate::ensemble::{assign_value, assign_value_pullback, check_ntrns, extend_history, prepare, LabeledEnsemble, ModelConfig};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::observable::Observable;

use super::ScenarioConfig;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("square")
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).expect("square")
}

pub fn pauli_z() -> CMatrix {
    CMatrix::diag_real(&[1.0, -1.0])
}

/// Spin eigenvectors `|x±>`, `|y±>`, `|z±>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    ZPlus,
    ZMinus,
}

impl Spin {
    pub fn ket(self) -> CVector {
        let h = FRAC_1_SQRT_2;
        let entries = match self {
            Spin::XPlus => [c(h, 0.0), c(h, 0.0)],
            Spin::XMinus => [c(h, 0.0), c(-h, 0.0)],
            Spin::YPlus => [c(h, 0.0), c(0.0, h)],
            Spin::YMinus => [c(h, 0.0), c(0.0, -h)],
            Spin::ZPlus => [c(1.0, 0.0), c(0.0, 0.0)],
            Spin::ZMinus => [c(0.0, 0.0), c(1.0, 0.0)],
        };
        CVector::new(entries.to_vec())
    }
}

fn product_frame(pairs: [(Spin, Spin); 4]) -> Frame {
    Frame::new(pairs.iter().map(|(a, b)| a.ket().kron(&b.ket())).collect()).expect("product kets are orthonormal")
}

/// The six contexts and the singlet state.
#[derive(Clone, Debug)]
pub struct PeresContexts {
    pub alpha: Context,
    pub beta: Context,
    pub gamma: Context,
    pub delta: Context,
    pub epsilon: Context,
    pub xi: Context,
    pub singlet: CVector,
}

impl PeresContexts {
    pub fn all(&self) -> [&Context; 6] {
        [&self.alpha, &self.beta, &self.gamma, &self.delta, &self.epsilon, &self.xi]
    }
}

pub fn peres_contexts() -> PeresContexts {
    use Spin::*;
    let pairs = |p: Spin, m: Spin, q: Spin, n: Spin| [(p, q), (m, n), (p, n), (m, q)];
    let zz = |a: Spin, b: Spin| a.ket().kron(&b.ket());
    let h = c(FRAC_1_SQRT_2, 0.0);
    let i = c(0.0, 1.0);
    let xi_vec = |a: CVector, b: CVector, sign: f64| a.add(&b.scale(i * sign)).scale(h);
    let xi = Frame::new(vec![
        xi_vec(zz(ZPlus, ZPlus), zz(ZMinus, ZMinus), 1.0),
        xi_vec(zz(ZPlus, ZPlus), zz(ZMinus, ZMinus), -1.0),
        xi_vec(zz(ZPlus, ZMinus), zz(ZMinus, ZPlus), 1.0),
        xi_vec(zz(ZPlus, ZMinus), zz(ZMinus, ZPlus), -1.0),
    ])
    .expect("orthonormal");
    let singlet = zz(ZPlus, ZMinus).sub(&zz(ZMinus, ZPlus)).scale(h);
    PeresContexts {
        alpha: Context::named(product_frame(pairs(XPlus, XMinus, XPlus, XMinus)), "α"),
        beta: Context::named(product_frame(pairs(YPlus, YMinus, YPlus, YMinus)), "β"),
        gamma: Context::named(product_frame(pairs(ZPlus, ZMinus, ZPlus, ZMinus)), "γ"),
        delta: Context::named(product_frame(pairs(XPlus, XMinus, YPlus, YMinus)), "δ"),
        epsilon: Context::named(product_frame(pairs(YPlus, YMinus, XPlus, XMinus)), "ε"),
        xi: Context::named(xi, "ξ"),
        singlet,
    }
}

/// Two-qubit observables built from Pauli matrices, with exact spectrum `{-1, 1}`.
#[derive(Clone, Debug)]
pub struct PeresObservables {
    pub x1: Observable,
    pub x2: Observable,
    pub xx: Observable,
    pub y1: Observable,
    pub y2: Observable,
    pub yy: Observable,
    pub z1: Observable,
    pub z2: Observable,
    pub zz: Observable,
    pub xy: Observable,
    pub yx: Observable,
    /// `(σx⊗σy)·(σy⊗σx)`
    pub xy_yx: Observable,
}

impl PeresObservables {
    pub fn named(&self) -> Vec<(&'static str, &Observable)> {
        vec![
            ("σx⊗I", &self.x1),
            ("I⊗σx", &self.x2),
            ("σx⊗σx", &self.xx),
            ("σy⊗I", &self.y1),
            ("I⊗σy", &self.y2),
            ("σy⊗σy", &self.yy),
            ("σz⊗I", &self.z1),
            ("I⊗σz", &self.z2),
            ("σz⊗σz", &self.zz),
            ("σx⊗σy", &self.xy),
            ("σy⊗σx", &self.yx),
        ]
    }
}

pub fn peres_observables() -> Result<PeresObservables> {
    let id = CMatrix::identity(2);
    let pm = [-1.0, 1.0];
    let obs = |a: &CMatrix, b: &CMatrix| Observable::with_spectrum(a.kron(b), &pm);
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let xy = obs(&x, &y)?;
    let yx = obs(&y, &x)?;
    let xy_yx = xy.product(&yx)?;
    Ok(PeresObservables {
        x1: obs(&x, &id)?,
        x2: obs(&id, &x)?,
        xx: obs(&x, &x)?,
        y1: obs(&y, &id)?,
        y2: obs(&id, &y)?,
        yy: obs(&y, &y)?,
        z1: obs(&z, &id)?,
        z2: obs(&id, &z)?,
        zz: obs(&z, &z)?,
        xy,
        yx,
        xy_yx,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    pub observable: String,
    pub contexts: Vec<String>,
}

/// For each named observable, the contexts among the six in which it is stable.
pub fn stability_table(ctx: &PeresContexts, obs: &PeresObservables) -> Result<Vec<StabilityRow>> {
    obs.named()
        .into_iter()
        .map(|(name, o)| {
            let contexts = ctx
                .all()
                .into_iter()
                .filter_map(|c| match is_stable(o.matrix(), c) {
                    Ok(true) => Some(Ok(c.label())),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(StabilityRow {
                observable: name.to_string(),
                contexts,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistoryValues {
    pub history: String,
    pub observable: String,
    pub plus: usize,
    pub minus: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub check: String,
    pub history: String,
    pub detail: String,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hysteresis {
    /// Samples where `σx⊗I` differs between `ξ→δ→α` and `ξ→ε→α`.
    pub sigma_x_flips: usize,
    /// Samples where `σy⊗I` differs between `ξ→δ→β` and `ξ→ε→β`.
    pub sigma_y_flips: usize,
    /// Samples where the number of flipped pairs is not exactly one.
    pub exactly_one_violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flags: Option<Vec<&'static str>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeresReport {
    pub epsilon: f64,
    pub seed: u64,
    pub n_samples: usize,
    /// Common value of `v_ξ((σx⊗σy)·(σy⊗σx))` when all samples agree.
    pub product_value: Option<f64>,
    pub product_violations: usize,
    /// Samples where the four history factors multiply to something other than -1.
    pub four_factor_violations: usize,
    /// The four factors under any noncontextual assignment multiply to this value.
    pub noncontextual_product: f64,
    pub contradiction_verified: bool,
    pub per_history_values: Vec<HistoryValues>,
    pub hysteresis: Hysteresis,
    pub checks: Vec<PairCheck>,
    pub stability_table: Vec<StabilityRow>,
    pub passed: bool,
}

impl PeresReport {
    /// Turns the first failing item into an error.
    pub fn ensure(&self) -> Result<()> {
        let fail = |check: &str, detail: String| {
            Err(Error::AssertionFailure {
                check: check.to_string(),
                detail,
            })
        };
        if self.product_value != Some(-1.0) || self.product_violations > 0 {
            return fail("product", format!("{} samples differ from -1", self.product_violations));
        }
        if self.four_factor_violations > 0 {
            return fail("four-factor product", format!("{} samples", self.four_factor_violations));
        }
        if self.hysteresis.exactly_one_violations > 0 {
            return fail("hysteresis", format!("{} samples", self.hysteresis.exactly_one_violations));
        }
        if let Some(c) = self.checks.iter().find(|c| c.violations > 0) {
            return fail(&c.check, format!("{} on {}: {} samples", c.detail, c.history, c.violations));
        }
        if !self.contradiction_verified {
            return fail("noncontextual contradiction", "not established".into());
        }
        Ok(())
    }

    /// Fixed-width plain text summary.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "peres  epsilon={}  seed={}  samples={}", self.epsilon, self.seed, self.n_samples);
        let _ = writeln!(s, "{:<28} {}", "product value", fmt_opt(self.product_value));
        let _ = writeln!(s, "{:<28} {}", "noncontextual product", self.noncontextual_product);
        let _ = writeln!(s, "{:<28} {}", "contradiction verified", self.contradiction_verified);
        let _ = writeln!(s, "{:<28} {}", "four-factor violations", self.four_factor_violations);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<12} {:<16} {:>8} {:>8}", "history", "value", "+1", "-1");
        for h in &self.per_history_values {
            let _ = writeln!(s, "{:<12} {:<16} {:>8} {:>8}", h.history, h.observable, h.plus, h.minus);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<28} {}", "σx⊗I flips", self.hysteresis.sigma_x_flips);
        let _ = writeln!(s, "{:<28} {}", "σy⊗I flips", self.hysteresis.sigma_y_flips);
        let _ = writeln!(s, "{:<28} {}", "exactly-one violations", self.hysteresis.exactly_one_violations);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<10} {:<12} {:<34} {:>10}", "check", "history", "detail", "violations");
        for c in &self.checks {
            let _ = writeln!(s, "{:<10} {:<12} {:<34} {:>10}", c.check, c.history, c.detail, c.violations);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<10} stable in", "observable");
        for row in &self.stability_table {
            let _ = writeln!(s, "{:<10} {}", row.observable, row.contexts.join(" "));
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "mixed".to_string(), |x| x.to_string())
}

fn count_sign(values: &[f64]) -> (usize, usize) {
    let plus = values.iter().filter(|&&v| v == 1.0).count();
    let minus = values.iter().filter(|&&v| v == -1.0).count();
    (plus, minus)
}

/// Runs all six histories from the singlet and evaluates every check.
pub fn run_peres(cfg: &ScenarioConfig) -> Result<PeresReport> {
    let ctx = peres_contexts();
    let obs = peres_observables()?;
    let config = ModelConfig::new(ctx.singlet.clone(), cfg.epsilon, ctx.xi.clone(), cfg.seed, cfg.n_samples)?;

    let xi = prepare(&config)?;
    let xi_gamma = extend_history(&xi, ctx.gamma.clone())?;
    let xi_delta = extend_history(&xi, ctx.delta.clone())?;
    let xi_epsilon = extend_history(&xi, ctx.epsilon.clone())?;
    let xda = extend_history(&xi_delta, ctx.alpha.clone())?;
    let xdb = extend_history(&xi_delta, ctx.beta.clone())?;
    let xeb = extend_history(&xi_epsilon, ctx.beta.clone())?;
    let xea = extend_history(&xi_epsilon, ctx.alpha.clone())?;

    let product = assign_value(&xi, &obs.xy_yx)?;
    let product_violations = product.iter().filter(|&&v| v != -1.0).count();
    let product_value = product.first().copied().filter(|&p| product.iter().all(|&v| v == p));

    let a = assign_value(&xda, &obs.x1)?;
    let b = assign_value(&xdb, &obs.y1)?;
    let cc = assign_value(&xeb, &obs.y1)?;
    let d = assign_value(&xea, &obs.x1)?;

    let mut four_factor_violations = 0;
    let mut sigma_x_flips = 0;
    let mut sigma_y_flips = 0;
    let mut exactly_one_violations = 0;
    let mut flags = Vec::with_capacity(config.n_samples());
    for s in 0..config.n_samples() {
        let prod = a[s] * b[s] * cc[s] * d[s];
        if prod != -1.0 || prod != product[s] {
            four_factor_violations += 1;
        }
        let fx = a[s] != d[s];
        let fy = b[s] != cc[s];
        sigma_x_flips += usize::from(fx);
        sigma_y_flips += usize::from(fy);
        if fx == fy {
            exactly_one_violations += 1;
        }
        flags.push(match (fx, fy) {
            (true, false) => "σx⊗I",
            (false, true) => "σy⊗I",
            (true, true) => "both",
            (false, false) => "none",
        });
    }

    // Under a noncontextual assignment the δ- and ε-routes agree, so each factor
    // appears squared: v(σx⊗I)² v(σy⊗I)² over every choice of ±1.
    let noncontextual: Vec<f64> = [-1.0, 1.0]
        .iter()
        .flat_map(|&x: &f64| [-1.0, 1.0].map(move |y: f64| x * y * y * x))
        .collect();
    let noncontextual_product = noncontextual[0];
    let noncontextual_consistent = noncontextual.iter().all(|&p| p == noncontextual_product);
    let contradiction_verified =
        noncontextual_consistent && noncontextual_product == 1.0 && product_value == Some(-1.0) && four_factor_violations == 0;

    let mut checks = Vec::new();
    // a-CRL in the α-, β- and γ-ending histories.
    let anti = |le: &LabeledEnsemble, p: &Observable, q: &Observable, detail: &str| -> Result<PairCheck> {
        let vp = assign_value(le, p)?;
        let vq = assign_value(le, q)?;
        Ok(PairCheck {
            check: "a-CRL".into(),
            history: le.history().label(),
            detail: detail.into(),
            violations: vp.iter().zip(&vq).filter(|(x, y)| **x != -**y).count(),
        })
    };
    checks.push(anti(&xda, &obs.x1, &obs.x2, "σx⊗I = -I⊗σx")?);
    checks.push(anti(&xea, &obs.x1, &obs.x2, "σx⊗I = -I⊗σx")?);
    checks.push(anti(&xdb, &obs.y1, &obs.y2, "σy⊗I = -I⊗σy")?);
    checks.push(anti(&xeb, &obs.y1, &obs.y2, "σy⊗I = -I⊗σy")?);
    checks.push(anti(&xi_gamma, &obs.z1, &obs.z2, "σz⊗I = -I⊗σz")?);

    let ntrns = |before: &LabeledEnsemble, after: &LabeledEnsemble, o: &Observable, name: &str| -> Result<PairCheck> {
        let violations = match check_ntrns(before, after, o) {
            Ok(_) => 0,
            Err(Error::NTrnsViolation { .. }) => {
                let v0 = assign_value(before, o)?;
                let v1 = assign_value(after, o)?;
                v0.iter().zip(&v1).filter(|(x, y)| x != y).count()
            }
            Err(e) => return Err(e),
        };
        Ok(PairCheck {
            check: "n-TRNS".into(),
            history: after.history().label(),
            detail: name.into(),
            violations,
        })
    };
    checks.push(ntrns(&xi, &xi_gamma, &obs.zz, "σz⊗σz")?);
    checks.push(ntrns(&xi, &xi_delta, &obs.xy, "σx⊗σy")?);
    checks.push(ntrns(&xi, &xi_epsilon, &obs.yx, "σy⊗σx")?);
    checks.push(ntrns(&xi_delta, &xda, &obs.x1, "σx⊗I")?);
    checks.push(ntrns(&xi_delta, &xdb, &obs.y2, "I⊗σy")?);
    checks.push(ntrns(&xi_epsilon, &xeb, &obs.y1, "σy⊗I")?);
    checks.push(ntrns(&xi_epsilon, &xea, &obs.x2, "I⊗σx")?);

    let homomorphism = |le: &LabeledEnsemble, p: &Observable, q: &Observable, pq: &Observable, detail: &str| -> Result<PairCheck> {
        let vp = assign_value(le, p)?;
        let vq = assign_value(le, q)?;
        let vpq = assign_value(le, pq)?;
        Ok(PairCheck {
            check: "gFUNC".into(),
            history: le.history().label(),
            detail: detail.into(),
            violations: (0..vp.len()).filter(|&s| vpq[s] != vp[s] * vq[s]).count(),
        })
    };
    checks.push(homomorphism(&xi, &obs.xy, &obs.yx, &obs.xy_yx, "v(AB) = v(A)v(B), σx⊗σy·σy⊗σx")?);
    checks.push(homomorphism(&xi_gamma, &obs.z1, &obs.z2, &obs.zz, "v(AB) = v(A)v(B), σz⊗I·I⊗σz")?);
    checks.push(homomorphism(&xi_delta, &obs.x1, &obs.y2, &obs.xy, "v(AB) = v(A)v(B), σx⊗I·I⊗σy")?);
    checks.push(homomorphism(&xi_epsilon, &obs.y1, &obs.x2, &obs.yx, "v(AB) = v(A)v(B), σy⊗I·I⊗σx")?);

    let ensembles = [&xi, &xi_gamma, &xda, &xdb, &xeb, &xea];
    for le in ensembles {
        for (name, o) in obs.named() {
            if !is_stable(o.matrix(), le.current())? {
                continue;
            }
            let direct = assign_value(le, o)?;
            let pulled = assign_value_pullback(le, o)?;
            checks.push(PairCheck {
                check: "dual-path".into(),
                history: le.history().label(),
                detail: name.into(),
                violations: direct.iter().zip(&pulled).filter(|(x, y)| x != y).count(),
            });
        }
    }

    let keep = |v: Vec<f64>| cfg.per_sample.then_some(v);
    let summary = |le: &LabeledEnsemble, name: &str, values: Vec<f64>| {
        let (plus, minus) = count_sign(&values);
        HistoryValues {
            history: le.history().label(),
            observable: name.into(),
            plus,
            minus,
            values: keep(values),
        }
    };
    let zz_gamma = assign_value(&xi_gamma, &obs.zz)?;
    let per_history_values = vec![
        summary(&xi, "(σx⊗σy)(σy⊗σx)", product),
        summary(&xi_gamma, "σz⊗σz", zz_gamma),
        summary(&xda, "σx⊗I", a),
        summary(&xdb, "σy⊗I", b),
        summary(&xeb, "σy⊗I", cc),
        summary(&xea, "σx⊗I", d),
    ];

    let mut report = PeresReport {
        epsilon: cfg.epsilon,
        seed: cfg.seed,
        n_samples: cfg.n_samples,
        product_value,
        product_violations,
        four_factor_violations,
        noncontextual_product,
        contradiction_verified,
        per_history_values,
        hysteresis: Hysteresis {
            sigma_x_flips,
            sigma_y_flips,
            exactly_one_violations,
            flags: cfg.per_sample.then_some(flags),
        },
        checks,
        stability_table: stability_table(&ctx, &obs)?,
        passed: false,
    };
    report.passed = report.ensure().is_ok();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contexts_are_orthonormal_and_distinct() {
        let ctx = peres_contexts();
        let all = ctx.all();
        for (i, a) in all.iter().enumerate() {
            assert!(a.frame().orthonormality_residual() < 1e-15);
            for b in &all[i + 1..] {
                assert!(!a.is_equivalent(b).unwrap());
            }
        }
        assert!((ctx.singlet.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_of_xy_and_yx_is_zz() {
        let obs = peres_observables().unwrap();
        assert!(obs.xy_yx.matrix().max_abs_diff(obs.zz.matrix()) < 1e-15);
        assert_eq!(obs.xy_yx.spectrum(), &[-1.0, 1.0]);
    }

    #[test]
    fn small_run_passes() {
        let cfg = ScenarioConfig {
            epsilon: 0.3,
            seed: 1,
            n_samples: 500,
            per_sample: true,
        };
        let report = run_peres(&cfg).unwrap();
        report.ensure().unwrap();
        assert_eq!(report.hysteresis.flags.as_ref().unwrap().len(), 500);
    }
}
