//! Adaptive Simpson quadrature against the censored-exponential law.
//!
//! Integrals have the form `∫_0^L f(y) nu e^{-nu y} dy + f(L) e^{-nu L}`:
//! a smooth density part plus the write-off atom. Integrands with a kink at
//! the deductible are split there before refinement.

use crate::error::{Error, Result};
use crate::severity::SeverityModel;

/// Relative tolerance the moment oracle refines to.
const REL_TOL: f64 = 1e-10;
/// Maximum refinement depth per segment before giving up.
const MAX_DEPTH: usize = 48;

/// The seven severity functionals with closed forms under the censored
/// exponential law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentIntegrand {
    /// `Y`
    Severity,
    /// `Y^2`
    SeveritySquared,
    /// `(Y - d)_+`
    Excess,
    /// `(Y - d)_+^2`
    ExcessSquared,
    /// `Y (Y - d)_+`
    MixedExcess,
    /// `min(Y, d)`
    Retained,
    /// `min(Y, d)^2`
    RetainedSquared,
}

impl MomentIntegrand {
    fn eval(self, y: f64, d: f64) -> f64 {
        match self {
            MomentIntegrand::Severity => y,
            MomentIntegrand::SeveritySquared => y * y,
            MomentIntegrand::Excess => (y - d).max(0.0),
            MomentIntegrand::ExcessSquared => {
                let e = (y - d).max(0.0);
                e * e
            }
            MomentIntegrand::MixedExcess => y * (y - d).max(0.0),
            MomentIntegrand::Retained => y.min(d),
            MomentIntegrand::RetainedSquared => {
                let r = y.min(d);
                r * r
            }
        }
    }

    fn uses_layer(self) -> bool {
        !matches!(
            self,
            MomentIntegrand::Severity | MomentIntegrand::SeveritySquared
        )
    }
}

/// Quadrature value of `E[g(Y)]` for the chosen integrand, refined to
/// relative tolerance 1e-10. The deductible is validated only for layered
/// integrands and marks an interior split point for the refinement.
pub fn quadrature_moment(
    model: &SeverityModel,
    integrand: MomentIntegrand,
    deductible: f64,
) -> Result<f64> {
    let mut breakpoints: &[f64] = &[];
    let holder;
    if integrand.uses_layer() {
        if !deductible.is_finite() || !(0.0..=model.cap()).contains(&deductible) {
            return Err(Error::OutOfRange {
                name: "deductible",
                value: deductible,
                lo: 0.0,
                hi: model.cap(),
            });
        }
        holder = [deductible];
        breakpoints = &holder;
    }
    integrate_against_severity(model, |y| integrand.eval(y, deductible), breakpoints)
}

/// `∫_0^L f(y) nu e^{-nu y} dy + f(L) e^{-nu L}` by adaptive Simpson
/// refinement, split at the given interior breakpoints.
pub fn integrate_against_severity<F>(
    model: &SeverityModel,
    f: F,
    breakpoints: &[f64],
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let nu = model.nu();
    let g = |y: f64| f(y) * nu * (-nu * y).exp();
    let atom_term = f(model.cap()) * model.atom_mass();

    let mut edges = vec![0.0];
    for &b in breakpoints {
        if b > 0.0 && b < model.cap() {
            edges.push(b);
        }
    }
    edges.push(model.cap());
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));

    // one coarse pass to scale the absolute tolerance
    let mut rough = atom_term;
    for pair in edges.windows(2) {
        rough += simpson(&g, pair[0], pair[1]);
    }
    let abs_tol = (REL_TOL * rough.abs()).max(f64::MIN_POSITIVE);
    let per_segment = abs_tol / (edges.len() - 1) as f64;

    let mut total = atom_term;
    for pair in edges.windows(2) {
        total += adaptive_segment(&g, pair[0], pair[1], per_segment)?;
    }
    Ok(total)
}

fn simpson<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b))
}

fn adaptive_segment<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (ga, gm, gb) = (g(a), g(m), g(b));
    let whole = (b - a) / 6.0 * (ga + 4.0 * gm + gb);
    refine(g, a, b, ga, gm, gb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    g: &F,
    a: f64,
    b: f64,
    ga: f64,
    gm: f64,
    gb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (glm, grm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (ga + 4.0 * glm + gm);
    let right = (b - m) / 6.0 * (gm + 4.0 * grm + gb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergent {
            rel_tol: REL_TOL,
            max_depth: MAX_DEPTH,
        });
    }
    Ok(refine(g, a, m, ga, glm, gm, left, 0.5 * tol, depth - 1)?
        + refine(g, m, b, gm, grm, gb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baseline() -> SeverityModel {
        SeverityModel::new(1.0 / 350_000.0, 500_000.0).unwrap()
    }

    #[test]
    fn density_plus_atom_integrates_to_one() {
        for (nu, cap) in [
            (1.0 / 350_000.0, 500_000.0),
            (1e-6, 50_000.0),
            (3e-5, 900_000.0),
            (1e-12, 500_000.0),
        ] {
            let m = SeverityModel::new(nu, cap).unwrap();
            let total = integrate_against_severity(&m, |_| 1.0, &[]).unwrap();
            // the integrator refines to 1e-10 relative
            assert_relative_eq!(total, 1.0, max_relative = 5e-10);
        }
    }

    #[test]
    fn baseline_mean_to_the_dollar() {
        let m = baseline();
        let mean = quadrature_moment(&m, MomentIntegrand::Severity, 0.0).unwrap();
        assert_eq!(mean.round(), 266_122.0);
    }

    #[test]
    fn excess_at_full_deductible_is_zero() {
        let m = baseline();
        let v = quadrature_moment(&m, MomentIntegrand::Excess, m.cap()).unwrap();
        assert_relative_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn retained_square_matches_closed_form() {
        let m = baseline();
        let q = quadrature_moment(&m, MomentIntegrand::RetainedSquared, 22_500.0).unwrap();
        assert_relative_eq!(
            q,
            m.retained_second_moment(22_500.0).unwrap(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn baseline_moments_match_quadrature_tightly() {
        let m = baseline();
        let d = 22_500.0;
        let pairs = [
            (MomentIntegrand::Severity, m.mean()),
            (MomentIntegrand::SeveritySquared, m.second_moment()),
            (MomentIntegrand::Excess, m.excess_mean(d).unwrap()),
            (
                MomentIntegrand::ExcessSquared,
                m.excess_second_moment(d).unwrap(),
            ),
            (
                MomentIntegrand::MixedExcess,
                m.mixed_excess_moment(d).unwrap(),
            ),
            (MomentIntegrand::Retained, m.retained_mean(d).unwrap()),
            (
                MomentIntegrand::RetainedSquared,
                m.retained_second_moment(d).unwrap(),
            ),
        ];
        for (integrand, closed) in pairs {
            let quad = quadrature_moment(&m, integrand, d).unwrap();
            assert_relative_eq!(closed, quad, max_relative = 1e-9);
        }
        // the mixed moment degenerates at a full deductible
        let at_cap = quadrature_moment(&m, MomentIntegrand::MixedExcess, m.cap()).unwrap();
        assert_relative_eq!(at_cap, 0.0, epsilon = 1e-9);
        assert_eq!(m.mixed_excess_moment(m.cap()).unwrap(), 0.0);
    }

    #[test]
    fn layered_integrands_reject_bad_deductible() {
        let m = baseline();
        assert!(quadrature_moment(&m, MomentIntegrand::Excess, -1.0).is_err());
        assert!(quadrature_moment(&m, MomentIntegrand::Retained, m.cap() + 1.0).is_err());
        // unlayered integrands ignore d entirely
        assert!(quadrature_moment(&m, MomentIntegrand::Severity, -1.0).is_ok());
    }

    #[test]
    fn agrees_with_fixed_step_simpson() {
        // coarse independent check of the machinery itself: 20k uniform panels
        let m = baseline();
        let nu = m.nu();
        let g = |y: f64| y * y * nu * (-nu * y).exp();
        let n = 20_000;
        let h = m.cap() / n as f64;
        let mut fixed = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            fixed += h / 6.0 * (g(a) + 4.0 * g(a + 0.5 * h) + g(a + h));
        }
        fixed += m.cap() * m.cap() * m.atom_mass();
        let adaptive = quadrature_moment(&m, MomentIntegrand::SeveritySquared, 0.0).unwrap();
        assert_relative_eq!(adaptive, fixed, max_relative = 1e-9);
    }
}
