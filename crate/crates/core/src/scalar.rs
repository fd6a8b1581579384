//! Coefficient types for cyclotomic arithmetic.
//!
//! Every engine in this crate is generic over the rational-like scalar used
//! for polynomial coefficients. [`BigRational`] gives exact results; `f64`
//! and `f32` give fast approximations that share the same code paths.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

/// A field of characteristic zero usable as the coefficient ring of Q(ζ).
pub trait Coefficient:
    Clone
    + Debug
    + Display
    + FromStr
    + PartialEq
    + Num
    + std::ops::Neg<Output = Self>
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact, so equality of results is meaningful.
    const EXACT: bool;

    /// Zero test used by polynomial division. Exact types test for zero,
    /// floating types use a small absolute threshold.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_f64(&self) -> f64;

    /// Product of two polynomials of degree `< modulus.len() - 1`, reduced
    /// modulo the monic integer polynomial `modulus` (lowest degree first).
    fn mul_reduce(a: &[Self], b: &[Self], modulus: &[i64]) -> Vec<Self> {
        let deg = modulus.len() - 1;
        let mut prod = vec![Self::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let t = x.clone() * y.clone();
                prod[i + j] = std::mem::replace(&mut prod[i + j], Self::zero()) + t;
            }
        }
        for top in (deg..prod.len()).rev() {
            let lead = std::mem::replace(&mut prod[top], Self::zero());
            if lead.is_zero() {
                continue;
            }
            for (k, &m) in modulus[..deg].iter().enumerate() {
                if m != 0 {
                    let idx = top - deg + k;
                    let t = lead.clone() * Self::from_i64(m).expect("small integer");
                    prod[idx] = std::mem::replace(&mut prod[idx], Self::zero()) - t;
                }
            }
        }
        prod.truncate(deg);
        prod.resize(deg, Self::zero());
        prod
    }
}

impl Coefficient for BigRational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Ratio::to_f64 gives up on huge operands; fall back to a scaled quotient.
            let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(900);
            let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    /// Clears denominators first so the convolution runs over integers and
    /// each output coefficient is normalised once.
    fn mul_reduce(a: &[Self], b: &[Self], modulus: &[i64]) -> Vec<Self> {
        let deg = modulus.len() - 1;
        let (an, ad) = clear_denominators(a);
        let (bn, bd) = clear_denominators(b);
        let mut prod = vec![BigInt::zero(); a.len() + b.len()];
        for (i, x) in an.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in bn.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for top in (deg..prod.len()).rev() {
            let lead = std::mem::take(&mut prod[top]);
            if lead.is_zero() {
                continue;
            }
            for (k, &m) in modulus[..deg].iter().enumerate() {
                if m != 0 {
                    prod[top - deg + k] -= &lead * m;
                }
            }
        }
        prod.truncate(deg);
        prod.resize(deg, BigInt::zero());
        let denom = ad * bd;
        prod.into_iter()
            .map(|c| {
                if c.is_zero() {
                    BigRational::zero()
                } else {
                    BigRational::new(c, denom.clone())
                }
            })
            .collect()
    }
}

fn clear_denominators(p: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for c in p {
        if !c.is_zero() && !c.denom().is_one() {
            lcm = lcm.lcm(c.denom());
        }
    }
    let nums = p
        .iter()
        .map(|c| {
            if c.is_zero() {
                BigInt::zero()
            } else if c.denom().is_one() {
                c.numer() * &lcm
            } else {
                c.numer() * (&lcm / c.denom())
            }
        })
        .collect();
    (nums, lcm)
}

impl Coefficient for f64 {
    const EXACT: bool = false;

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-10
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coefficient for f32 {
    const EXACT: bool = false;

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-5
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}
