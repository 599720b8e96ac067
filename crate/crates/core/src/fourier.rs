//! Exact Fourier analysis over `F_p^n`: transforms, inner products,
//! correlation magnitudes, and the exhaustive quadratic-correlation scans.
//!
//! Conventions follow the primal/dual asymmetry that makes Parseval hold
//! with no extra factors: the transform and the primal inner product carry
//! the expectation normalization `p^{−n}`, the dual inner product is a
//! plain sum, and the transform kernel uses `ω_p^{+⟨α,x⟩}` (so a character
//! `x ↦ ω_p^{⟨β,x⟩}` has its single Fourier coefficient at `−β`).

use crate::cyclo::{phase, CycloNumber};
use crate::error::Error;
use crate::ff::{nat_lift, pow_u64, FpVector};
use crate::interval::{real_cmp, RatInterval, ZetaIntervals, DEFAULT_PRECISION_BITS};
use crate::poly::{enumerate_polys_up_to_degree, FunctionTable, NonclassicalPoly};
use crate::torus::TorusValue;
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

/// Upper bound on the number of candidate polynomials a scan will enumerate.
pub const SCAN_BUDGET: u64 = 1 << 16;

/// The canonical root order per characteristic: large enough for every
/// stabilizer phase and the magic phase (`8` for `p = 2`, `9` for `p = 3`,
/// `p` otherwise).
pub fn root_order(p: u64) -> u64 {
    match p {
        2 => 8,
        3 => 9,
        _ => p,
    }
}

/// A table of exact complex values on `F_p^n`, one `CycloNumber` in
/// `Q(ζ_m)` per point (lexicographic point order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseTable {
    p: u64,
    n: usize,
    m: u64,
    values: Vec<CycloNumber>,
}

impl PhaseTable {
    pub fn new(p: u64, n: usize, m: u64, values: Vec<CycloNumber>) -> Result<Self> {
        let expected = pow_u64(p, n as u32) as usize;
        if values.len() != expected {
            return Err(Error::DimensionMismatch(values.len(), expected));
        }
        for v in &values {
            if v.order() != m {
                return Err(Error::OrderMismatch(v.order(), m));
            }
        }
        Ok(Self { p, n, m, values })
    }

    /// `e(P)` as a table of roots of unity.
    pub fn from_poly(poly: &NonclassicalPoly, m: u64) -> Result<Self> {
        Self::from_table(&poly.evaluate_table(), m)
    }

    pub fn from_table(table: &FunctionTable, m: u64) -> Result<Self> {
        let values: Result<Vec<CycloNumber>> = table.values().iter().map(|t| phase(t, m)).collect();
        Self::new(table.modulus(), table.num_vars(), m, values?)
    }

    pub fn constant_one(p: u64, n: usize, m: u64) -> Result<Self> {
        let count = pow_u64(p, n as u32) as usize;
        Self::new(p, n, m, vec![CycloNumber::one(m); count])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn root_order(&self) -> u64 {
        self.m
    }

    pub fn values(&self) -> &[CycloNumber] {
        &self.values
    }

    pub fn value_at(&self, x: &FpVector) -> &CycloNumber {
        &self.values[x.to_index()]
    }

    /// Multiplicative derivative `x ↦ f(x+h)·conj(f(x))`.
    pub fn mult_derivative(&self, h: &FpVector) -> Result<PhaseTable> {
        if h.modulus() != self.p {
            return Err(Error::ModulusMismatch(h.modulus(), self.p));
        }
        if h.dim() != self.n {
            return Err(Error::DimensionMismatch(h.dim(), self.n));
        }
        let values: Vec<CycloNumber> = FpVector::iter_all(self.p, self.n)
            .map(|x| self.values[(&x + h).to_index()].mul(&self.values[x.to_index()].conj()))
            .collect();
        PhaseTable::new(self.p, self.n, self.m, values)
    }

    fn omega_power(&self, e: u64) -> CycloNumber {
        CycloNumber::root_of_unity(self.m, e * (self.m / self.p) % self.m)
    }

    /// `f̂(α) = p^{−n} Σ_x f(x) ω_p^{⟨α,x⟩}`.
    pub fn fourier_transform(&self) -> Result<PhaseTable> {
        if !self.m.is_multiple_of(self.p) {
            return Err(Error::OrderMismatch(self.p, self.m));
        }
        let points: Vec<FpVector> = FpVector::iter_all(self.p, self.n).collect();
        let norm = BigRational::new(
            BigInt::from(1),
            BigInt::from(pow_u64(self.p, self.n as u32)),
        );
        let values: Vec<CycloNumber> = points
            .par_iter()
            .map(|alpha| {
                let mut acc = CycloNumber::zero(self.m);
                for x in &points {
                    let w = self.omega_power(alpha.dot(x));
                    acc = acc.add(&self.values[x.to_index()].mul(&w));
                }
                acc.scale(&norm)
            })
            .collect();
        PhaseTable::new(self.p, self.n, self.m, values)
    }

    /// Inversion with the conjugate kernel: `f(x) = Σ_α f̂(α) ω_p^{−⟨α,x⟩}`.
    pub fn inverse_transform(&self) -> Result<PhaseTable> {
        if !self.m.is_multiple_of(self.p) {
            return Err(Error::OrderMismatch(self.p, self.m));
        }
        let points: Vec<FpVector> = FpVector::iter_all(self.p, self.n).collect();
        let values: Vec<CycloNumber> = points
            .par_iter()
            .map(|x| {
                let mut acc = CycloNumber::zero(self.m);
                for alpha in &points {
                    let w = self.omega_power(alpha.dot(x)).conj();
                    acc = acc.add(&self.values[alpha.to_index()].mul(&w));
                }
                acc
            })
            .collect();
        PhaseTable::new(self.p, self.n, self.m, values)
    }
}

fn check_shapes(f: &PhaseTable, g: &PhaseTable) -> Result<()> {
    if f.p != g.p {
        return Err(Error::ModulusMismatch(f.p, g.p));
    }
    if f.n != g.n {
        return Err(Error::DimensionMismatch(f.n, g.n));
    }
    if f.m != g.m {
        return Err(Error::OrderMismatch(f.m, g.m));
    }
    Ok(())
}

/// `⟨f,g⟩ = p^{−n} Σ_x f(x)·conj(g(x))`.
pub fn inner_product(f: &PhaseTable, g: &PhaseTable) -> Result<CycloNumber> {
    check_shapes(f, g)?;
    let mut acc = CycloNumber::zero(f.m);
    for (a, b) in f.values.iter().zip(&g.values) {
        acc = acc.add(&a.mul(&b.conj()));
    }
    let norm = BigRational::new(BigInt::from(1), BigInt::from(pow_u64(f.p, f.n as u32)));
    Ok(acc.scale(&norm))
}

/// `⟨f̂,ĝ⟩ = Σ_α f̂(α)·conj(ĝ(α))` (plain sum on the dual side).
pub fn dual_inner_product(fh: &PhaseTable, gh: &PhaseTable) -> Result<CycloNumber> {
    check_shapes(fh, gh)?;
    let mut acc = CycloNumber::zero(fh.m);
    for (a, b) in fh.values.iter().zip(&gh.values) {
        acc = acc.add(&a.mul(&b.conj()));
    }
    Ok(acc)
}

/// The exact squared correlation `|⟨f,g⟩|²` with a certified enclosure.
#[derive(Debug, Clone)]
pub struct CorrelationSq {
    pub exact: CycloNumber,
    pub interval: RatInterval,
}

pub fn correlation_sq(f: &PhaseTable, g: &PhaseTable, bits: u32) -> Result<CorrelationSq> {
    let z = inner_product(f, g)?;
    let exact = z.norm_sq();
    let table = ZetaIntervals::get(f.m, bits);
    let (re, im) = table.evaluate(&exact);
    debug_assert!(im.contains_zero());
    Ok(CorrelationSq {
        exact,
        interval: re,
    })
}

/// Report of the derivative-correlation inequality
/// `|⟨e(f),e(g)⟩|⁴ ≤ E_h |⟨e(Δ_h f), e(Δ_h g)⟩|²` for torus-valued tables.
#[derive(Debug, Clone, Serialize)]
pub struct LovettReport {
    pub lhs: CycloNumber,
    pub rhs: CycloNumber,
    pub holds: bool,
}

pub fn lovett_check(
    f: &FunctionTable,
    g: &FunctionTable,
    m: u64,
    bits: u32,
) -> Result<LovettReport> {
    let p = f.modulus();
    let n = f.num_vars();
    if g.modulus() != p {
        return Err(Error::ModulusMismatch(g.modulus(), p));
    }
    if g.num_vars() != n {
        return Err(Error::DimensionMismatch(g.num_vars(), n));
    }
    let ef = PhaseTable::from_table(f, m)?;
    let eg = PhaseTable::from_table(g, m)?;
    let corr = inner_product(&ef, &eg)?.norm_sq();
    let lhs = corr.mul(&corr);
    let mut sum = CycloNumber::zero(m);
    for h in FpVector::iter_all(p, n) {
        let df = PhaseTable::from_table(&f.additive_derivative(&h)?, m)?;
        let dg = PhaseTable::from_table(&g.additive_derivative(&h)?, m)?;
        sum = sum.add(&inner_product(&df, &dg)?.norm_sq());
    }
    let rhs = sum.scale(&BigRational::new(
        BigInt::from(1),
        BigInt::from(pow_u64(p, n as u32)),
    ));
    let holds = real_cmp(&lhs, &rhs, bits)? != Ordering::Greater;
    Ok(LovettReport { lhs, rhs, holds })
}

/// Result of an exhaustive correlation scan against all phase functions of
/// bounded degree (additive constants omitted; they do not change the
/// magnitude).
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub p: u64,
    pub n: usize,
    /// Degree bound of the scanned dictionary.
    pub degree: usize,
    /// Number of candidate polynomials enumerated.
    pub budget: u64,
    /// `max_Q |⟨f, e(Q)⟩|²`, exact.
    pub max_corr_sq: CycloNumber,
    pub max_corr_sq_interval: [f64; 2],
    /// Canonical text of the first maximizer in enumeration order.
    pub argmax_poly: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

/// Exhaustively scan `max_Q |⟨f, e(Q)⟩|` over canonical polynomials `Q` of
/// degree at most `degree` (zero shift). Ties keep the earliest candidate
/// in the deterministic enumeration order.
pub fn scan_table(f: &PhaseTable, degree: usize, bits: u32) -> Result<ScanReport> {
    let p = f.modulus();
    let n = f.num_vars();
    let candidates = enumerate_polys_up_to_degree(p, n, degree)?;
    if candidates.len() as u64 > SCAN_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "scan over {} candidates exceeds {SCAN_BUDGET}",
            candidates.len()
        )));
    }
    let values: Result<Vec<CycloNumber>> = candidates
        .par_iter()
        .map(|q| {
            let eq = PhaseTable::from_poly(q, f.root_order())?;
            Ok(inner_product(f, &eq)?.norm_sq())
        })
        .collect();
    let values = values?;
    let mut best = 0usize;
    for idx in 1..values.len() {
        if real_cmp(&values[idx], &values[best], bits)? == Ordering::Greater {
            best = idx;
        }
    }
    let table = ZetaIntervals::get(f.root_order(), bits);
    let (re, _) = table.evaluate(&values[best]);
    let (lo, hi) = re.to_f64_pair();
    Ok(ScanReport {
        p,
        n,
        degree,
        budget: candidates.len() as u64,
        max_corr_sq: values[best].clone(),
        max_corr_sq_interval: [lo, hi],
        argmax_poly: candidates[best].to_text(),
        bound_rhs: None,
        holds: None,
    })
}

/// Exhaustive scan of `P` against every degree-≤2 phase function.
pub fn quadratic_scan(poly: &NonclassicalPoly, bits: u32) -> Result<ScanReport> {
    let m = root_order(poly.modulus());
    let f = PhaseTable::from_poly(poly, m)?;
    scan_table(&f, 2, bits)
}

/// Per-size outcome of [`magic_correlation_bound`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub p: u64,
    pub n: usize,
    /// `p = 2`: fourth-power bound against the exact rational `(3/4)^k`;
    /// otherwise strict decay of the scan maximum in the size.
    pub kind: String,
    pub scans: Vec<ScanReport>,
    pub holds: bool,
}

/// Verify the quadratic-correlation behaviour of the magic phase function
/// up to size `n`: for `p = 2` the exact bound
/// `max|⟨e(P),e(Q)⟩|⁴ ≤ (3/4)^k` at every size `k ≤ n`; for odd `p` strict
/// decay of the exhaustive maximum in the size.
pub fn magic_correlation_bound(p: u64, n: usize, bits: u32) -> Result<BoundReport> {
    let mut scans = Vec::new();
    let mut holds = true;
    for k in 1..=n {
        let poly = NonclassicalPoly::magic_phase(p, k, None)?;
        let mut scan = quadratic_scan(&poly, bits)?;
        if p == 2 {
            let rhs = BigRational::new(
                BigInt::from(3u64.pow(k as u32)),
                BigInt::from(4u64.pow(k as u32)),
            );
            let fourth = scan.max_corr_sq.mul(&scan.max_corr_sq);
            let ok = real_cmp(&fourth, &CycloNumber::from_rational(8, rhs.clone()), bits)?
                != Ordering::Greater;
            scan.bound_rhs = Some(rhs.to_string());
            scan.holds = Some(ok);
            holds &= ok;
        }
        scans.push(scan);
    }
    if p != 2 {
        for k in 1..scans.len() {
            let prev = &scans[k - 1].max_corr_sq;
            let cur = &scans[k].max_corr_sq;
            let ok = real_cmp(cur, prev, bits)? == Ordering::Less;
            scans[k].holds = Some(ok);
            holds &= ok;
        }
    }
    Ok(BoundReport {
        p,
        n,
        kind: if p == 2 {
            "fourth-power-bound".into()
        } else {
            "strict-decay".into()
        },
        scans,
        holds,
    })
}

/// Fourier-support structure of the multiplicative-derivative factor
/// `f(x) = e(|x∘h|/4)` over `F_2^n`: the nonzero coefficients of `f̂` sit
/// exactly on `{α : h_i = 0 ⇒ α_i = 0}`, each of squared modulus `2^{−|h|}`.
#[derive(Debug, Clone, Serialize)]
pub struct SupportReport {
    pub n: usize,
    pub h: Vec<u64>,
    pub weight: u64,
    pub support_size: usize,
    pub verified: bool,
}

pub fn derivative_fourier_support(n: usize, h: &FpVector) -> Result<SupportReport> {
    if h.modulus() != 2 {
        return Err(Error::WrongCharacteristic {
            expected: 2,
            got: h.modulus(),
        });
    }
    if h.dim() != n {
        return Err(Error::DimensionMismatch(h.dim(), n));
    }
    // P(x) = |x∘h|/4 = Σ_{t: h_t=1} |x_t|/4
    let mut terms = std::collections::BTreeMap::new();
    for t in 0..n {
        if h.entry(t) == 1 {
            let mut exps = vec![0u8; n];
            exps[t] = 1;
            terms.insert((1u32, exps), 1u64);
        }
    }
    let poly = NonclassicalPoly::new(2, n, TorusValue::zero(2)?, terms)?;
    let fhat = PhaseTable::from_poly(&poly, 8)?.fourier_transform()?;
    let weight = nat_lift(h);
    let expected_sq = CycloNumber::from_rational(
        8,
        BigRational::new(BigInt::from(1), BigInt::from(pow_u64(2, weight as u32))),
    );
    let mut support_size = 0usize;
    let mut verified = true;
    for alpha in FpVector::iter_all(2, n) {
        let inside = (0..n).all(|i| h.entry(i) == 1 || alpha.entry(i) == 0);
        let coeff = fhat.value_at(&alpha);
        if inside {
            support_size += 1;
            if coeff.norm_sq() != expected_sq {
                verified = false;
            }
        } else if !coeff.is_zero() {
            verified = false;
        }
    }
    Ok(SupportReport {
        n,
        h: h.entries().to_vec(),
        weight,
        support_size,
        verified,
    })
}

impl NonclassicalPoly {
    /// The phase polynomial of the magic state: `|x|/8` for `p = 2`,
    /// `|x|/9` for `p = 3`, and `Σ_t P(x_t)` with a single-variable cubic
    /// `P` for `p > 3` (default `P(x) = x³`; a supplied `(a, b, c)` means
    /// `a·x³ + b·x² + c·x` and must have `a ≠ 0 mod p`).
    pub fn magic_phase(p: u64, n: usize, cubic: Option<(u64, u64, u64)>) -> Result<Self> {
        match p {
            2 => {
                if cubic.is_some() {
                    return Err(Error::Precondition(
                        "cubic coefficients only apply for p > 3".into(),
                    ));
                }
                Self::lift_sum(2, n, 3)
            }
            3 => {
                if cubic.is_some() {
                    return Err(Error::Precondition(
                        "cubic coefficients only apply for p > 3".into(),
                    ));
                }
                Self::lift_sum(3, n, 2)
            }
            _ => {
                let (a, b, c) = cubic.unwrap_or((1, 0, 0));
                if a % p == 0 {
                    return Err(Error::Precondition(format!(
                        "degree-three coefficient must be nonzero mod {p} (a degree-two phase is not magic)"
                    )));
                }
                let mut terms = std::collections::BTreeMap::new();
                for t in 0..n {
                    for (e, coeff) in [(3u8, a % p), (2, b % p), (1, c % p)] {
                        if coeff != 0 {
                            let mut exps = vec![0u8; n];
                            exps[t] = e;
                            terms.insert((0u32, exps), coeff);
                        }
                    }
                }
                Self::new(p, n, TorusValue::zero(p)?, terms)
            }
        }
    }
}

/// Convenience: scan precision default.
pub fn default_bits() -> u32 {
    DEFAULT_PRECISION_BITS
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64, v: &[u64]) -> FpVector {
        FpVector::new(p, v.to_vec()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn random_phase_table(rng: &mut ChaCha8Rng, p: u64, n: usize, m: u64) -> PhaseTable {
        let count = pow_u64(p, n as u32) as usize;
        let values = (0..count)
            .map(|_| CycloNumber::root_of_unity(m, rng.random_range(0..m)))
            .collect();
        PhaseTable::new(p, n, m, values).unwrap()
    }

    #[test]
    fn transform_of_constant() {
        let one = PhaseTable::constant_one(2, 2, 8).unwrap();
        let hat = one.fourier_transform().unwrap();
        assert!(hat.value_at(&fp(2, &[0, 0])).is_one());
        for alpha in FpVector::iter_all(2, 2).skip(1) {
            assert!(hat.value_at(&alpha).is_zero());
        }
    }

    #[test]
    fn transform_of_characters() {
        // f(x) = ω_p^{<β,x>} has its single coefficient at −β (plus-sign kernel).
        // Oracle: direct summation at n = 1 and n = 2.
        for (p, m) in [(2u64, 8u64), (3, 9)] {
            for n in 1..=2usize {
                for beta in FpVector::iter_all(p, n) {
                    let f = PhaseTable::new(
                        p,
                        n,
                        m,
                        FpVector::iter_all(p, n)
                            .map(|x| CycloNumber::root_of_unity(m, beta.dot(&x) * (m / p) % m))
                            .collect(),
                    )
                    .unwrap();
                    let hat = f.fourier_transform().unwrap();
                    // independent direct summation oracle
                    for alpha in FpVector::iter_all(p, n) {
                        let mut acc = CycloNumber::zero(m);
                        for x in FpVector::iter_all(p, n) {
                            let e = (beta.dot(&x) + alpha.dot(&x)) * (m / p) % m;
                            acc = acc.add(&CycloNumber::root_of_unity(m, e));
                        }
                        let acc = acc.scale(&rat(1, pow_u64(p, n as u32) as i64));
                        assert_eq!(hat.value_at(&alpha), &acc);
                        let minus_beta = &FpVector::zeros(p, n).unwrap() - &beta;
                        if alpha == minus_beta {
                            assert!(acc.is_one(), "coefficient sits at -β");
                        } else {
                            assert!(acc.is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transform_of_quartic_lift() {
        // p=2, n=1, f = e(|x|/4) = (1, i): f̂(0) = (1+i)/2, f̂(1) = (1−i)/2.
        let q = NonclassicalPoly::lift_sum(2, 1, 2).unwrap();
        let f = PhaseTable::from_poly(&q, 8).unwrap();
        let i = CycloNumber::root_of_unity(8, 2);
        assert_eq!(f.values()[0], CycloNumber::one(8));
        assert_eq!(f.values()[1], i);
        let hat = f.fourier_transform().unwrap();
        let half = rat(1, 2);
        let expected0 = CycloNumber::one(8).add(&i).scale(&half);
        let expected1 = CycloNumber::one(8).sub(&i).scale(&half);
        assert_eq!(hat.values()[0], expected0);
        assert_eq!(hat.values()[1], expected1);
        // both of squared modulus 1/2
        let target = CycloNumber::from_rational(8, rat(1, 2));
        assert_eq!(hat.values()[0].norm_sq(), target);
        assert_eq!(hat.values()[1].norm_sq(), target);
    }

    #[test]
    fn mult_derivative_examples() {
        // constant 1: every multiplicative derivative is all-ones
        let one = PhaseTable::constant_one(2, 2, 8).unwrap();
        for h in FpVector::iter_all(2, 2) {
            assert_eq!(one.mult_derivative(&h).unwrap(), one);
        }
        // f = e(|x|/4) on F_2^1, h = 1: (e(1/4), e(3/4)) — cross-checked
        // against the phase of the additive derivative
        let q = NonclassicalPoly::lift_sum(2, 1, 2).unwrap();
        let f = PhaseTable::from_poly(&q, 8).unwrap();
        let h = fp(2, &[1]);
        let md = f.mult_derivative(&h).unwrap();
        assert_eq!(md.values()[0], CycloNumber::root_of_unity(8, 2));
        assert_eq!(md.values()[1], CycloNumber::root_of_unity(8, 6));
        let ad = PhaseTable::from_table(&q.additive_derivative(&h).unwrap(), 8).unwrap();
        assert_eq!(md, ad);
        // f = e(linear): the multiplicative derivative is the constant e(ℓ(h))
        let linear = NonclassicalPoly::monomial(2, 2, vec![1, 0], 0, 1).unwrap();
        let el = PhaseTable::from_poly(&linear, 8).unwrap();
        for h in FpVector::iter_all(2, 2) {
            let md = el.mult_derivative(&h).unwrap();
            let expected = el.value_at(&h).clone();
            assert!(md.values().iter().all(|v| *v == expected));
        }
    }

    #[test]
    fn inversion_recovers_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (p, m) in [(2u64, 8u64), (3, 9)] {
            for n in 1..=2usize {
                for _ in 0..20 {
                    let f = random_phase_table(&mut rng, p, n, m);
                    let back = f.fourier_transform().unwrap().inverse_transform().unwrap();
                    assert_eq!(back, f);
                }
            }
        }
    }

    #[test]
    fn parseval_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for (p, m) in [(2u64, 8u64), (3, 9)] {
            for n in 1..=3usize {
                for _ in 0..50 {
                    let f = random_phase_table(&mut rng, p, n, m);
                    let g = random_phase_table(&mut rng, p, n, m);
                    let primal = inner_product(&f, &g).unwrap();
                    let dual = dual_inner_product(
                        &f.fourier_transform().unwrap(),
                        &g.fourier_transform().unwrap(),
                    )
                    .unwrap();
                    assert_eq!(primal, dual, "Parseval must be exact");
                }
            }
        }
    }

    #[test]
    fn inner_product_norms_and_orthogonality() {
        // <f,f> = 1 for unit phase tables
        let q = NonclassicalPoly::lift_sum(2, 2, 2).unwrap();
        let f = PhaseTable::from_poly(&q, 8).unwrap();
        assert!(inner_product(&f, &f).unwrap().is_one());
        // distinct characters are orthogonal
        let l1 = NonclassicalPoly::monomial(2, 2, vec![1, 0], 0, 1).unwrap();
        let e1 = PhaseTable::from_poly(&l1, 8).unwrap();
        let one = PhaseTable::constant_one(2, 2, 8).unwrap();
        assert!(inner_product(&e1, &one).unwrap().is_zero());
    }

    #[test]
    fn correlation_sq_magic_example() {
        // p=2, n=1, P=|x|/8, Q=0: |(1+ζ_8)/2|² = (2+√2)/4 ≈ 0.8536
        let p = NonclassicalPoly::magic_phase(2, 1, None).unwrap();
        let f = PhaseTable::from_poly(&p, 8).unwrap();
        let one = PhaseTable::constant_one(2, 1, 8).unwrap();
        let corr = correlation_sq(&f, &one, 64).unwrap();
        let expected = CycloNumber::from_integer(8, 2)
            .add(&CycloNumber::root_of_unity(8, 1))
            .add(&CycloNumber::root_of_unity(8, 7))
            .scale(&rat(1, 4));
        assert_eq!(corr.exact, expected);
        assert!(*corr.interval.lo() > rat(8535, 10000));
        assert!(*corr.interval.hi() < rat(8537, 10000));
        // identical tables -> 1; orthogonal characters -> 0
        assert!(correlation_sq(&f, &f, 64).unwrap().exact.is_one());
        let l1 = NonclassicalPoly::monomial(2, 1, vec![1], 0, 1).unwrap();
        let e1 = PhaseTable::from_poly(&l1, 8).unwrap();
        assert!(correlation_sq(&e1, &one, 64).unwrap().exact.is_zero());
    }

    #[test]
    fn lovett_basics() {
        // f = g: 1 <= 1 with exact equality
        let q = NonclassicalPoly::lift_sum(2, 2, 2).unwrap();
        let t = q.evaluate_table();
        let rep = lovett_check(&t, &t, 8, 64).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.lhs, rep.rhs);
        // f character, g constant: 0 <= rhs
        let l1 = NonclassicalPoly::monomial(2, 2, vec![1, 0], 0, 1).unwrap();
        let zero = NonclassicalPoly::zero(2, 2).unwrap();
        let rep2 = lovett_check(&l1.evaluate_table(), &zero.evaluate_table(), 8, 64).unwrap();
        assert!(rep2.holds);
        assert!(rep2.lhs.is_zero());
    }

    #[test]
    fn lovett_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for n in 1..=2usize {
            for _ in 0..25 {
                let count = pow_u64(2, n as u32) as usize;
                let mk = |rng: &mut ChaCha8Rng| {
                    FunctionTable::new(
                        2,
                        n,
                        (0..count)
                            .map(|_| TorusValue::new(2, rng.random_range(0..8), 2).unwrap())
                            .collect(),
                    )
                    .unwrap()
                };
                let f = mk(&mut rng);
                let g = mk(&mut rng);
                let rep = lovett_check(&f, &g, 8, 64).unwrap();
                assert!(rep.holds, "inequality is a theorem; violation is a bug");
            }
        }
    }

    #[test]
    fn quadratic_scan_magic_one_var() {
        let p = NonclassicalPoly::magic_phase(2, 1, None).unwrap();
        let scan = quadratic_scan(&p, 64).unwrap();
        assert_eq!(scan.budget, 4);
        // maximum squared correlation is (2+√2)/4, attained at Q = 0 and at
        // the depth-1 linear Q = |x|/4 (tie kept at the first in order)
        let expected = CycloNumber::from_integer(8, 2)
            .add(&CycloNumber::root_of_unity(8, 1))
            .add(&CycloNumber::root_of_unity(8, 7))
            .scale(&rat(1, 4));
        assert_eq!(scan.max_corr_sq, expected);
        // P itself quadratic: self-correlation 1 at Q = P
        let q = NonclassicalPoly::lift_sum(2, 2, 2).unwrap();
        let scan2 = quadratic_scan(&q, 64).unwrap();
        assert!(scan2.max_corr_sq.is_one());
        assert_eq!(scan2.argmax_poly, q.to_text());
    }

    #[test]
    fn magic_bound_small() {
        let rep = magic_correlation_bound(2, 2, 64).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.scans.len(), 2);
        for scan in &rep.scans {
            assert_eq!(scan.holds, Some(true));
        }
        // p = 3 decay at n <= 2
        let rep3 = magic_correlation_bound(3, 2, 64).unwrap();
        assert!(rep3.holds);
        assert_eq!(rep3.kind, "strict-decay");
    }

    #[test]
    fn support_structure_exhaustive_small() {
        for n in 1..=2usize {
            for h in FpVector::iter_all(2, n) {
                let rep = derivative_fourier_support(n, &h).unwrap();
                assert!(rep.verified, "support claim at n={n}, h={h}");
                assert_eq!(rep.support_size, pow_u64(2, rep.weight as u32) as usize);
            }
        }
    }

    #[test]
    fn magic_phase_large_p() {
        // p = 5 default cubic: amplitudes ω_5^{x³}
        let p = NonclassicalPoly::magic_phase(5, 1, None).unwrap();
        for x in 0..5u64 {
            let v = p.evaluate(&fp(5, &[x])).unwrap();
            assert_eq!(v, TorusValue::new(5, x * x * x % 5, 0).unwrap());
        }
        // degree-two phase refused
        assert!(NonclassicalPoly::magic_phase(5, 1, Some((0, 1, 0))).is_err());
        // general cubic accepted
        let p2 = NonclassicalPoly::magic_phase(5, 2, Some((2, 1, 3))).unwrap();
        assert_eq!(p2.degree(), 3);
    }
}
