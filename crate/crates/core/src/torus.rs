//! Values in the `p`-power torsion subgroup of the torus `R/Z`.
//!
//! A [`TorusValue`] is `numerator / p^{depth+1} mod 1`, stored canonically:
//! the numerator is reduced mod `p^{depth+1}` and the depth is minimal
//! (either `p` does not divide the numerator, or the depth is zero). With
//! that normalization equality of values is equality of the struct, so the
//! type derives `Eq`/`Ord`/`Hash` and can key maps directly.

use crate::error::Error;
use crate::ff::{is_prime, pow_u64};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusValue {
    p: u64,
    depth: u32,
    numerator: u64,
}

impl TorusValue {
    /// `numerator / p^{depth+1} mod 1`, normalized.
    pub fn new(p: u64, numerator: u64, depth: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let modulus = pow_u64(p, depth + 1);
        let mut v = Self {
            p,
            depth,
            numerator: numerator % modulus,
        };
        v.normalize();
        Ok(v)
    }

    pub fn zero(p: u64) -> Result<Self> {
        Self::new(p, 0, 0)
    }

    fn normalize(&mut self) {
        while self.depth > 0 && self.numerator.is_multiple_of(self.p) {
            self.numerator /= self.p;
            self.depth -= 1;
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// The minimal level `k` with this value in `(1/p^{k+1})Z/Z`.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    /// `p^{depth+1}`.
    pub fn denominator(&self) -> u64 {
        pow_u64(self.p, self.depth + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// The numerator after raising to the given depth (no normalization).
    pub fn numerator_at_depth(&self, depth: u32) -> u64 {
        assert!(depth >= self.depth, "cannot lower depth");
        self.numerator * pow_u64(self.p, depth - self.depth)
    }

    /// Integer multiple `c · t`.
    pub fn mul_int(&self, c: u64) -> TorusValue {
        let modulus = self.denominator();
        let mut v = Self {
            p: self.p,
            depth: self.depth,
            numerator: (c % modulus) * self.numerator % modulus,
        };
        v.normalize();
        v
    }
}

impl Add for TorusValue {
    type Output = TorusValue;
    fn add(self, rhs: TorusValue) -> TorusValue {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        let depth = self.depth.max(rhs.depth);
        let modulus = pow_u64(self.p, depth + 1);
        let mut v = TorusValue {
            p: self.p,
            depth,
            numerator: (self.numerator_at_depth(depth) + rhs.numerator_at_depth(depth)) % modulus,
        };
        v.normalize();
        v
    }
}

impl Neg for TorusValue {
    type Output = TorusValue;
    fn neg(self) -> TorusValue {
        let modulus = self.denominator();
        let mut v = TorusValue {
            p: self.p,
            depth: self.depth,
            numerator: (modulus - self.numerator) % modulus,
        };
        v.normalize();
        v
    }
}

impl Sub for TorusValue {
    type Output = TorusValue;
    fn sub(self, rhs: TorusValue) -> TorusValue {
        self + (-rhs)
    }
}

impl fmt::Display for TorusValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

/// Fallible addition for callers that cannot guarantee matching moduli.
pub fn torus_add(s: TorusValue, t: TorusValue) -> Result<TorusValue> {
    if s.modulus() != t.modulus() {
        return Err(Error::ModulusMismatch(s.modulus(), t.modulus()));
    }
    Ok(s + t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_drops_depth() {
        // 1/4 + 1/4 = 1/2
        let q = TorusValue::new(2, 1, 1).unwrap();
        let half = q + q;
        assert_eq!(half, TorusValue::new(2, 1, 0).unwrap());
        assert_eq!(half.depth(), 0);
        // 3/4 + 1/2 = 1/4
        let s = TorusValue::new(2, 3, 1).unwrap() + TorusValue::new(2, 1, 0).unwrap();
        assert_eq!(s, TorusValue::new(2, 1, 1).unwrap());
        // 1/9 + 8/9 = 0
        let z = TorusValue::new(3, 1, 1).unwrap() + TorusValue::new(3, 8, 1).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.depth(), 0);
    }

    #[test]
    fn mixed_moduli_rejected() {
        let a = TorusValue::new(2, 1, 0).unwrap();
        let b = TorusValue::new(3, 1, 0).unwrap();
        assert!(matches!(torus_add(a, b), Err(Error::ModulusMismatch(2, 3))));
    }

    #[test]
    fn group_axioms_exhaustive_depth_two() {
        // Additive group structure, exhaustive over depth <= 2 for p in {2, 3}.
        for p in [2u64, 3] {
            let modulus = pow_u64(p, 3);
            let all: Vec<TorusValue> = (0..modulus)
                .map(|k| TorusValue::new(p, k, 2).unwrap())
                .collect();
            let zero = TorusValue::zero(p).unwrap();
            for &a in &all {
                assert_eq!(a + zero, a);
                assert!((a + (-a)).is_zero());
                // Normalization is idempotent: re-normalizing the canonical
                // form changes nothing.
                let re = TorusValue::new(p, a.numerator(), a.depth()).unwrap();
                assert_eq!(re, a);
                for &b in &all {
                    assert_eq!(a + b, b + a);
                    for &c in &all {
                        assert_eq!((a + b) + c, a + (b + c));
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_form_unique() {
        // 2/4 and 1/2 are the same canonical value.
        assert_eq!(
            TorusValue::new(2, 2, 1).unwrap(),
            TorusValue::new(2, 1, 0).unwrap()
        );
        // 3/9 = 1/3.
        assert_eq!(
            TorusValue::new(3, 3, 1).unwrap(),
            TorusValue::new(3, 1, 0).unwrap()
        );
    }

    #[test]
    fn int_multiples() {
        let t = TorusValue::new(2, 1, 2).unwrap(); // 1/8
        assert_eq!(t.mul_int(4), TorusValue::new(2, 1, 0).unwrap()); // 4/8 = 1/2
        assert_eq!(t.mul_int(8), TorusValue::zero(2).unwrap());
        assert_eq!(t.mul_int(3), TorusValue::new(2, 3, 2).unwrap());
    }
}
