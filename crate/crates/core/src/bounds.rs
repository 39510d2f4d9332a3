//! Explicit counting bounds used by the kernels.
//!
//! Every formula is generic over a [`CountScalar`]; primitive integers report
//! overflow as `None`, while [`Count`](crate::Count) (a `BigUint`) never
//! overflows. The un-suffixed helpers evaluate in `Count` and validate their
//! arguments.

use std::fmt::Debug;

use num_traits::{CheckedAdd, CheckedMul, One, ToPrimitive, Zero};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Count;

/// An unsigned counting type the bound formulas can be evaluated in.
pub trait CountScalar: Clone + Ord + Debug + Zero + One + CheckedAdd + CheckedMul + From<u32> {}

impl<T> CountScalar for T where T: Clone + Ord + Debug + Zero + One + CheckedAdd + CheckedMul + From<u32> {}

fn lift<T: CountScalar>(x: u64) -> Option<T> {
    let hi = u32::try_from(x >> 32).ok()?;
    let lo = (x & 0xffff_ffff) as u32;
    let shift = T::from(1u32 << 16).checked_mul(&T::from(1u32 << 16))?;
    T::from(hi).checked_mul(&shift)?.checked_add(&T::from(lo))
}

fn checked_pow<T: CountScalar>(base: &T, exp: u64) -> Option<T> {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// `sum_{j=0}^{top} base^j`.
fn geometric_sum<T: CountScalar>(base: &T, top: u64) -> Option<T> {
    let mut sum = T::zero();
    let mut term = T::one();
    for j in 0..=top {
        sum = sum.checked_add(&term)?;
        if j < top {
            term = term.checked_mul(base)?;
        }
    }
    Some(sum)
}

/// Number of candidate linkage instances for a region with boundary size `ell`
/// and guard size `h`: `(k+1) * (1 + sum_{r=0}^{2h} (h(ell+1))^r)`.
pub fn p_bound_in<T: CountScalar>(k: u64, ell: u64, h: u64) -> Option<T> {
    let base = lift::<T>(h)?.checked_mul(&lift::<T>(ell + 1)?)?;
    let inner = T::one().checked_add(&geometric_sum(&base, 2 * h)?)?;
    lift::<T>(k + 1)?.checked_mul(&inner)
}

/// The closed-form upper estimate `(k+1) * (h(ell+1))^(2h+1)`.
pub fn p_closed_form_in<T: CountScalar>(k: u64, ell: u64, h: u64) -> Option<T> {
    let base = lift::<T>(h)?.checked_mul(&lift::<T>(ell + 1)?)?;
    lift::<T>(k + 1)?.checked_mul(&checked_pow(&base, 2 * h + 1)?)
}

/// `(2h)^(4h+3)`.
pub fn h_hat_in<T: CountScalar>(h: u64) -> Option<T> {
    checked_pow(&lift::<T>(2 * h)?, 4 * h + 3)
}

/// `1 + sum_{j=0}^{4 eta + 4} ((2 eta + 2)(ell + 2 eta + 2))^j`.
pub fn rho_in<T: CountScalar>(eta: u64, ell: u64) -> Option<T> {
    let base = lift::<T>(2 * eta + 2)?.checked_mul(&lift::<T>(ell + 2 * eta + 2)?)?;
    T::one().checked_add(&geometric_sum(&base, 4 * eta + 4)?)
}

/// Component size threshold of the modulator kernel:
/// `(k+1) * k * rho(eta, ell) + (2 eta + 2) + 1`.
pub fn m_threshold_in<T: CountScalar>(k: u64, eta: u64, ell: u64) -> Option<T> {
    let marks = lift::<T>(k + 1)?
        .checked_mul(&lift::<T>(k)?)?
        .checked_mul(&rho_in::<T>(eta, ell)?)?;
    marks.checked_add(&lift::<T>(2 * eta + 3)?)
}

fn non_negative(name: &str, v: i64) -> Result<u64> {
    u64::try_from(v).or_else(|_| invalid(format!("{name} must be non-negative, got {v}")))
}

/// [`p_bound_in`] in arbitrary precision, rejecting `k < 1` and negative arguments.
pub fn p_bound(k: i64, ell: i64, h: i64) -> Result<Count> {
    if k < 1 {
        return invalid(format!("k must be at least 1, got {k}"));
    }
    let (k, ell, h) = (non_negative("k", k)?, non_negative("ell", ell)?, non_negative("h", h)?);
    Ok(p_bound_in(k, ell, h).expect("BigUint does not overflow"))
}

pub fn rho(eta: i64, ell: i64) -> Result<Count> {
    let (eta, ell) = (non_negative("eta", eta)?, non_negative("ell", ell)?);
    Ok(rho_in(eta, ell).expect("BigUint does not overflow"))
}

pub fn h_hat(h: u64) -> Count {
    h_hat_in(h).expect("BigUint does not overflow")
}

pub fn m_threshold(k: u64, eta: u64, ell: u64) -> Count {
    m_threshold_in(k, eta, ell).expect("BigUint does not overflow")
}

/// Ceiling on `|A_1|`: `(k+1) * k * ell^2`.
pub fn a1_bound(k: u64, ell: u64) -> Count {
    Count::from(k + 1) * Count::from(k) * Count::from(ell) * Count::from(ell)
}

/// Ceiling on `|B_2|`: `2k(k+1) ell^2 + 1`.
pub fn b2_bound(k: u64, ell: u64) -> Count {
    Count::from(2u32) * a1_bound(k, ell) + Count::one()
}

/// Ceiling on the number of edge components: `4k(k+1) ell^2 + 1`.
pub fn component_count_bound(k: u64, ell: u64) -> Count {
    Count::from(4u32) * a1_bound(k, ell) + Count::one()
}

/// Size of a graph on which the modulator kernel can no longer reduce:
/// `(4k(k+1) ell^2 + 1) * m + |A_2| + ell`.
pub fn final_size_bound(k: u64, ell: u64, m: &Count, a2: usize) -> Count {
    component_count_bound(k, ell) * m + Count::from(a2) + Count::from(ell)
}

/// Saturating conversion used when comparing huge bounds against vertex counts.
pub fn saturating_usize(c: &Count) -> usize {
    c.to_usize().unwrap_or(usize::MAX)
}

/// One audited inequality: `measured` against `claimed`, both rendered as decimals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub claimed: String,
    pub measured: String,
    pub pass: bool,
}

impl BoundCheck {
    /// `measured <= claimed`, or `<` when `strict`.
    pub fn at_most(name: impl Into<String>, measured: &Count, claimed: &Count, strict: bool) -> Self {
        let pass = if strict { measured < claimed } else { measured <= claimed };
        Self { name: name.into(), claimed: claimed.to_string(), measured: measured.to_string(), pass }
    }

    pub fn at_most_usize(name: impl Into<String>, measured: usize, claimed: &Count) -> Self {
        Self::at_most(name, &Count::from(measured), claimed, false)
    }
}

/// Serialize a [`Count`] as its decimal string so huge values survive JSON.
pub fn serialize_count<S: serde::Serializer>(c: &Count, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_p(k: u64, ell: u64, h: u64) -> u128 {
        let base = (h * (ell + 1)) as u128;
        let mut s = 1u128;
        for r in 0..=2 * h {
            s += base.pow(r as u32);
        }
        (k as u128 + 1) * s
    }

    #[test]
    fn p_bound_values() {
        assert_eq!(p_bound(1, 1, 1).unwrap(), Count::from(16u32));
        assert_eq!(p_bound(1, 2, 1).unwrap(), Count::from(28u32));
        for k in 1..6 {
            assert_eq!(p_bound(k, 3, 0).unwrap(), Count::from(2 * (k as u64 + 1)));
        }
        for k in 1..=5u64 {
            for ell in 0..=4u64 {
                for h in 0..=3u64 {
                    assert_eq!(p_bound_in::<u128>(k, ell, h), Some(direct_p(k, ell, h)));
                }
            }
        }
    }

    #[test]
    fn closed_form_dominates_sum_for_nontrivial_guard() {
        for k in 1..5u64 {
            for h in 1..4u64 {
                for ell in h..6u64 {
                    let sum: Count = p_bound_in(k, ell, h).unwrap();
                    let closed: Count = p_closed_form_in(k, ell, h).unwrap();
                    assert!(sum <= closed, "k={k} ell={ell} h={h}");
                }
            }
        }
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(0, 0).unwrap(), Count::from(342u32));
        assert_eq!(rho(0, 1).unwrap(), Count::from(1556u32));
        for eta in 0..3 {
            for ell in 0..6 {
                assert!(rho(eta, ell).unwrap() < rho(eta, ell + 1).unwrap());
                assert!(rho(eta, ell).unwrap() < rho(eta + 1, ell).unwrap());
            }
        }
    }

    #[test]
    fn negative_inputs_rejected() {
        assert!(p_bound(1, -1, 0).is_err());
        assert!(p_bound(0, 1, 1).is_err());
        assert!(rho(-1, 0).is_err());
    }

    #[test]
    fn primitive_overflow_is_reported() {
        assert_eq!(rho_in::<u64>(2, 4), None);
        assert!(rho_in::<Count>(2, 4).is_some());
        assert_eq!(h_hat_in::<u64>(1), Some(128));
    }
}
