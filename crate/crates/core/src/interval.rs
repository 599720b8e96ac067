//! Certified interval arithmetic over exact rationals.
//!
//! Magnitude comparisons in this crate are decided by evaluating exact
//! cyclotomic values inside rational-endpoint intervals: the roots of unity
//! `ζ_m^e` are enclosed by Taylor series with rigorous remainder bounds
//! (no floating point anywhere), and all interval operations round
//! endpoints outward to dyadic rationals so numbers stay small. A sign
//! decision either certifies strictly, detects exact zero, or asks for the
//! precision to be doubled; after a capped number of doublings the caller
//! receives an explicit indeterminate answer rather than a guess.

use crate::cyclo::CycloNumber;
use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Default precision for certified comparisons, in significant bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;
/// Precision doublings attempted before reporting indeterminate.
pub const MAX_PRECISION_DOUBLINGS: u32 = 6;

/// A closed interval with rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "inverted interval");
        Self { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        Self {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let candidates = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_negative() {
            Self {
                lo: &self.hi * q,
                hi: &self.lo * q,
            }
        } else {
            Self {
                lo: &self.lo * q,
                hi: &self.hi * q,
            }
        }
    }

    /// Widen by `±eps`.
    pub fn widen(&self, eps: &BigRational) -> Self {
        Self {
            lo: &self.lo - eps,
            hi: &self.hi + eps,
        }
    }

    /// Round endpoints outward to denominator `2^bits`; keeps coefficient
    /// sizes bounded without losing soundness.
    pub fn outward_round(&self, bits: u32) -> Self {
        Self {
            lo: dyadic_floor(&self.lo, bits),
            hi: dyadic_ceil(&self.hi, bits),
        }
    }

    /// Sound double conversion: `lo` rounded down, `hi` rounded up.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64_down(&self.lo), rat_to_f64_up(&self.hi))
    }
}

fn dyadic_floor(q: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.floor().to_integer(), scale)
}

fn dyadic_ceil(q: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.ceil().to_integer(), scale)
}

fn rat_to_f64_down(q: &BigRational) -> f64 {
    let approx = q.to_f64().unwrap_or(f64::NEG_INFINITY);
    if approx.is_finite() && BigRational::from_float(approx).is_some_and(|r| r <= *q) {
        approx
    } else {
        next_down(approx)
    }
}

fn rat_to_f64_up(q: &BigRational) -> f64 {
    let approx = q.to_f64().unwrap_or(f64::INFINITY);
    if approx.is_finite() && BigRational::from_float(approx).is_some_and(|r| r >= *q) {
        approx
    } else {
        next_up(approx)
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    let bits = if x == 0.0 {
        1
    } else if x > 0.0 {
        x.to_bits() + 1
    } else {
        x.to_bits() - 1
    };
    f64::from_bits(bits)
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Enclosure of π by the Machin formula `π = 16·arctan(1/5) − 4·arctan(1/239)`
/// with the alternating-series remainder bound.
fn pi_interval(bits: u32) -> RatInterval {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (bits + 4));
    let a = arctan_inv_interval(5, &eps);
    let b = arctan_inv_interval(239, &eps);
    a.scale(&BigRational::from_integer(BigInt::from(16)))
        .sub(&b.scale(&BigRational::from_integer(BigInt::from(4))))
        .outward_round(bits + 8)
}

/// `arctan(1/k)` with error below `eps` (alternating Taylor series).
fn arctan_inv_interval(k: u64, eps: &BigRational) -> RatInterval {
    let x = BigRational::new(BigInt::one(), BigInt::from(k));
    let x2 = &x * &x;
    let mut term = x.clone();
    let mut sum = BigRational::zero();
    let mut n = 0u32;
    loop {
        let contrib = &term / BigRational::from_integer(BigInt::from(2 * n + 1));
        if contrib < *eps {
            // alternating series: truncation error bounded by first omitted term
            return RatInterval::new(&sum - &contrib, &sum + &contrib);
        }
        if n.is_multiple_of(2) {
            sum += &contrib;
        } else {
            sum -= &contrib;
        }
        term *= &x2;
        n += 1;
    }
}

/// `(cos t, sin t)` for a rational `t` with `|t| <= 7`, each with error
/// below `eps` (Taylor with a dominated-tail remainder bound).
fn cos_sin_taylor(t: &BigRational, eps: &BigRational) -> (RatInterval, RatInterval) {
    assert!(t.abs() <= BigRational::from_integer(BigInt::from(7)));
    let t2 = t * t;
    // cos: Σ (-1)^k t^{2k} / (2k)!   sin: Σ (-1)^k t^{2k+1} / (2k+1)!
    let mut cos_sum = BigRational::zero();
    let mut sin_sum = BigRational::zero();
    let mut power = BigRational::one(); // t^{2k}
    let mut fact = BigRational::one(); // (2k)!
    let mut k = 0u32;
    loop {
        let cos_term = &power / &fact;
        let sin_term = &cos_term * t / BigRational::from_integer(BigInt::from(2 * k + 1));
        // For 2k >= 14 > |t| the terms decay by a factor < 1/2 each step, so
        // the tail is bounded by twice the next term.
        if k >= 8 && cos_term.abs() * BigRational::from_integer(BigInt::from(4)) < *eps {
            let rem = cos_term.abs() * BigRational::from_integer(BigInt::from(2));
            return (
                RatInterval::new(&cos_sum - &rem, &cos_sum + &rem),
                RatInterval::new(&sin_sum - &rem, &sin_sum + &rem),
            );
        }
        if k.is_multiple_of(2) {
            cos_sum += &cos_term;
            sin_sum += &sin_term;
        } else {
            cos_sum -= &cos_term;
            sin_sum -= &sin_term;
        }
        power *= &t2;
        fact *= BigRational::from_integer(BigInt::from((2 * k + 1) * (2 * k + 2)));
        k += 1;
    }
}

/// Certified enclosures of `cos(2πe/m)` and `sin(2πe/m)` for `e = 0, …, m−1`.
#[derive(Debug, Clone)]
pub struct ZetaIntervals {
    m: u64,
    bits: u32,
    cos: Vec<RatInterval>,
    sin: Vec<RatInterval>,
}

impl ZetaIntervals {
    fn build(m: u64, bits: u32) -> Self {
        let guard = bits + 16 + 2 * (64 - m.leading_zeros());
        let eps = BigRational::new(BigInt::one(), BigInt::one() << guard);
        let pi = pi_interval(guard);
        // θ = 2π/m as an interval; evaluate cos/sin at the rational midpoint
        // and absorb the midpoint error into the remainder.
        let theta = pi.scale(&BigRational::new(BigInt::from(2), BigInt::from(m)));
        let mid = (theta.lo() + theta.hi()) / BigRational::from_integer(BigInt::from(2));
        let radius = (theta.hi() - theta.lo()) / BigRational::from_integer(BigInt::from(2));
        let (c1, s1) = cos_sin_taylor(&mid, &eps);
        // |d/dt cos| <= 1 and |d/dt sin| <= 1, so widening by the angle
        // radius gives a sound enclosure at the true angle.
        let c1 = c1.widen(&radius).outward_round(guard);
        let s1 = s1.widen(&radius).outward_round(guard);
        let mut cos = Vec::with_capacity(m as usize);
        let mut sin = Vec::with_capacity(m as usize);
        cos.push(RatInterval::point(BigRational::one()));
        sin.push(RatInterval::point(BigRational::zero()));
        for e in 1..m as usize {
            // angle addition from the enclosure at e-1
            let c = cos[e - 1]
                .mul(&c1)
                .sub(&sin[e - 1].mul(&s1))
                .outward_round(guard);
            let s = sin[e - 1]
                .mul(&c1)
                .add(&cos[e - 1].mul(&s1))
                .outward_round(guard);
            cos.push(c);
            sin.push(s);
        }
        Self { m, bits, cos, sin }
    }

    /// Shared, cached table per `(m, bits)`.
    pub fn get(m: u64, bits: u32) -> Arc<ZetaIntervals> {
        type Cache = Mutex<HashMap<(u64, u32), Arc<ZetaIntervals>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = cache.lock().unwrap().get(&(m, bits)) {
            return Arc::clone(hit);
        }
        let built = Arc::new(ZetaIntervals::build(m, bits));
        cache.lock().unwrap().insert((m, bits), Arc::clone(&built));
        built
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Enclosures of the real and imaginary parts of an exact cyclotomic value.
    pub fn evaluate(&self, z: &CycloNumber) -> (RatInterval, RatInterval) {
        assert_eq!(z.order(), self.m, "root order mismatch");
        let mut re = RatInterval::zero();
        let mut im = RatInterval::zero();
        for (e, c) in z.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            re = re.add(&self.cos[e].scale(c));
            im = im.add(&self.sin[e].scale(c));
        }
        (
            re.outward_round(self.bits + 8),
            im.outward_round(self.bits + 8),
        )
    }
}

/// Certified sign of an exact real cyclotomic value (an element fixed by
/// conjugation). Exact zeros are recognized symbolically; otherwise the
/// precision is doubled until the enclosure separates from zero.
pub fn real_sign(z: &CycloNumber, start_bits: u32) -> Result<Ordering> {
    if z.is_zero() {
        return Ok(Ordering::Equal);
    }
    debug_assert_eq!(z.conj(), *z, "real_sign requires a conjugation-fixed value");
    let mut bits = start_bits.max(16);
    for _ in 0..=MAX_PRECISION_DOUBLINGS {
        let table = ZetaIntervals::get(z.order(), bits);
        let (re, im) = table.evaluate(z);
        debug_assert!(
            im.contains_zero(),
            "real value with nonzero imaginary enclosure"
        );
        if re.is_strictly_positive() {
            return Ok(Ordering::Greater);
        }
        if re.is_strictly_negative() {
            return Ok(Ordering::Less);
        }
        bits *= 2;
    }
    Err(Error::Indeterminate(format!(
        "sign of {} after {} doublings from {} bits",
        z.to_text(),
        MAX_PRECISION_DOUBLINGS,
        start_bits
    )))
}

/// Certified comparison of two exact real cyclotomic values.
pub fn real_cmp(a: &CycloNumber, b: &CycloNumber, bits: u32) -> Result<Ordering> {
    real_sign(&a.sub(b), bits)
}

/// Certified comparison of a real cyclotomic value against a rational.
pub fn cmp_rational(z: &CycloNumber, q: &BigRational, bits: u32) -> Result<Ordering> {
    real_sign(
        &z.sub(&CycloNumber::from_rational(z.order(), q.clone())),
        bits,
    )
}
