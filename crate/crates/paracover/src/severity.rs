//! Censored exponential severity and its closed-form moments.
//!
//! A single loss `Y` is an exponential with rate `nu`, censored at the sum
//! insured `L`: the law has density `nu e^{-nu y}` on `[0, L)` and an atom of
//! mass `e^{-nu L}` at `L` (a complete write-off). All layer moments used by
//! the contract analysis — excess `(Y - d)_+` and retained `min(Y, d)` — have
//! elementary closed forms collected here.

use serde::Serialize;

use crate::error::{validate_positive, Error, Result};

/// Exponential severity with rate `nu`, censored at `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeverityModel {
    nu: f64,
    cap: f64,
}

impl SeverityModel {
    /// `nu` is the exponential rate per currency unit, `cap` the sum insured.
    ///
    /// Rejects non-positive or non-finite inputs, and the degenerate extremes
    /// where the write-off atom `e^{-nu cap}` rounds to 0 or 1 in double
    /// precision.
    pub fn new(nu: f64, cap: f64) -> Result<Self> {
        validate_positive(nu, "nu")?;
        validate_positive(cap, "cap")?;
        let atom = (-nu * cap).exp();
        if atom <= 0.0 || atom >= 1.0 {
            return Err(Error::InvalidParameter {
                name: "nu * cap",
                value: nu * cap,
                requirement: "such that the write-off probability exp(-nu*cap) lies in (0, 1)",
            });
        }
        Ok(Self { nu, cap })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Probability of a complete write-off, `Pr[Y = cap] = e^{-nu cap}`.
    pub fn atom_mass(&self) -> f64 {
        (-self.nu * self.cap).exp()
    }

    /// `E[Y] = (1 - e^{-nu L}) / nu`.
    pub fn mean(&self) -> f64 {
        -f64::exp_m1(-self.nu * self.cap) / self.nu
    }

    /// `E[Y^2] = 2/nu^2 - 2 e^{-nu L}/nu^2 - 2 L e^{-nu L}/nu`.
    pub fn second_moment(&self) -> f64 {
        (2.0 / (self.nu * self.nu)) * second_moment_kernel(self.nu * self.cap)
    }

    /// `Var(Y) = E[Y^2] - E[Y]^2`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.second_moment() - mean * mean
    }

    /// Expected excess loss `E[(Y - d)_+] = (e^{-nu d} - e^{-nu L}) / nu`.
    pub fn excess_mean(&self, deductible: f64) -> Result<f64> {
        self.check_layer(deductible)?;
        // e^{-nu d} (1 - e^{-nu (L-d)}) / nu, exact at d = L and stable for
        // small exponents.
        let tail = -f64::exp_m1(-self.nu * (self.cap - deductible));
        Ok((-self.nu * deductible).exp() * tail / self.nu)
    }

    /// `E[(Y - d)_+^2] = 2 e^{-nu d}/nu^2 - 2 e^{-nu L}/nu^2 + 2 (d - L) e^{-nu L}/nu`.
    pub fn excess_second_moment(&self, deductible: f64) -> Result<f64> {
        self.check_layer(deductible)?;
        // Regrouped as e^{-nu d} * (2/nu^2) * [1 - e^{-x}(1 + x)] with
        // x = nu (L - d); equal to the expanded form but free of the large
        // cancellation between the 2/nu^2 terms.
        let x = self.nu * (self.cap - deductible);
        Ok((-self.nu * deductible).exp() * (2.0 / (self.nu * self.nu)) * second_moment_kernel(x))
    }

    /// Mixed moment `E[Y (Y - d)_+]
    /// = d (e^{-nu d} + e^{-nu L})/nu + 2 e^{-nu d}/nu^2 - 2 e^{-nu L}/nu^2 - 2 L e^{-nu L}/nu`.
    pub fn mixed_excess_moment(&self, deductible: f64) -> Result<f64> {
        // Y (Y - d)_+ = (Y - d)_+^2 + d (Y - d)_+ pointwise, so the moment is
        // the same combination; this reproduces the expanded formula exactly.
        Ok(self.excess_second_moment(deductible)? + deductible * self.excess_mean(deductible)?)
    }

    /// Retained second moment `G(d) = E[min(Y, d)^2] = (2/nu^2) [1 - e^{-nu d}(1 + nu d)]`.
    pub fn retained_second_moment(&self, deductible: f64) -> Result<f64> {
        self.check_layer(deductible)?;
        Ok((2.0 / (self.nu * self.nu)) * second_moment_kernel(self.nu * deductible))
    }

    /// Retained mean `E[min(Y, d)] = (1 - e^{-nu d}) / nu`.
    pub fn retained_mean(&self, deductible: f64) -> Result<f64> {
        self.check_layer(deductible)?;
        Ok(-f64::exp_m1(-self.nu * deductible) / self.nu)
    }

    fn check_layer(&self, deductible: f64) -> Result<()> {
        if deductible.is_finite() && (0.0..=self.cap).contains(&deductible) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                name: "deductible",
                value: deductible,
                lo: 0.0,
                hi: self.cap,
            })
        }
    }
}

/// `1 - e^{-x}(1 + x)`, the kernel of the retained second moment.
///
/// Direct evaluation cancels catastrophically for small `x` (the result is
/// `x^2/2 + O(x^3)` but both terms are near 1), so below the cutoff the
/// alternating series `sum_{k>=2} (-1)^k (k-1) x^k / k!` is used instead.
fn second_moment_kernel(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 0.01 {
        let mut term = 0.5 * x * x;
        let mut sum = term;
        for k in 2..30u32 {
            let k = f64::from(k);
            // t_{k+1} / t_k = -x * k / ((k - 1)(k + 1))
            term *= -x * k / ((k - 1.0) * (k + 1.0));
            sum += term;
            if term.abs() <= f64::EPSILON * sum.abs() {
                break;
            }
        }
        sum
    } else {
        1.0 - (-x).exp() * (1.0 + x)
    }
}
