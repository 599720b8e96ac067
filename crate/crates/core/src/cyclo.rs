//! Exact arithmetic in the cyclotomic field `Q(ζ_m)`.
//!
//! Elements are residues mod the `m`-th cyclotomic polynomial `Φ_m`, stored
//! as dense coefficient vectors of length `φ(m)` with arbitrary-precision
//! rational coefficients. Because `Φ_m` is monic and irreducible over `Q`,
//! the residue representation is canonical: equality of values is equality
//! of coefficient vectors, and every nonzero element is invertible.
//!
//! The root orders used by the experiments are small (`m ∈ {8, 9, p}`), so
//! the dense representation with full reduction on every product is both
//! simple and fast enough.

use crate::error::Error;

use crate::torus::TorusValue;
use crate::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

/// Euler's totient.
pub fn totient(m: u64) -> u64 {
    let mut result = m;
    let mut n = m;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            result = result / d * (d - 1);
        }
        d += 1;
    }
    if n > 1 {
        result = result / n * (n - 1);
    }
    result
}

fn cyclo_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_m` (index `i` is the coefficient of `x^i`), computed
/// by exact division of `x^m − 1` by the lower-order cyclotomic polynomials.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    assert!(m >= 1);
    if let Some(hit) = cyclo_cache().lock().unwrap().get(&m) {
        return Arc::clone(hit);
    }
    let poly = if m == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        // x^m - 1
        let mut num = vec![BigInt::zero(); m as usize + 1];
        num[0] = BigInt::from(-1);
        num[m as usize] = BigInt::one();
        for d in 1..m {
            if m.is_multiple_of(d) {
                num = int_poly_exact_div(&num, &cyclotomic_polynomial(d));
            }
        }
        num
    };
    let arc = Arc::new(poly);
    cyclo_cache().lock().unwrap().insert(m, Arc::clone(&arc));
    arc
}

/// Exact division of integer polynomials; the divisor must divide evenly
/// and be monic (cyclotomic polynomials are).
fn int_poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    assert!(den[dn].is_one(), "divisor must be monic");
    let mut rem = num.to_vec();
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn].clone();
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
    }
    assert!(rem.iter().all(Zero::is_zero), "non-exact division");
    quot
}

/// An element of `Q(ζ_m)` as a residue mod `Φ_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycloNumber {
    m: u64,
    coeffs: Vec<BigRational>,
}

impl CycloNumber {
    pub fn zero(m: u64) -> Self {
        Self {
            m,
            coeffs: vec![BigRational::zero(); totient(m) as usize],
        }
    }

    pub fn one(m: u64) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    pub fn from_rational(m: u64, q: BigRational) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[0] = q;
        z
    }

    pub fn from_integer(m: u64, k: i64) -> Self {
        Self::from_rational(m, BigRational::from_integer(BigInt::from(k)))
    }

    /// `ζ_m^e`, reduced mod `Φ_m`.
    pub fn root_of_unity(m: u64, e: u64) -> Self {
        let e = (e % m) as usize;
        let mut raw = vec![BigRational::zero(); e + 1];
        raw[e] = BigRational::one();
        Self::reduce(m, raw)
    }

    fn reduce(m: u64, mut raw: Vec<BigRational>) -> Self {
        let phi = totient(m) as usize;
        let modpoly = cyclotomic_polynomial(m);
        while raw.len() > phi {
            let deg = raw.len() - 1;
            let lead = raw.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            // subtract lead * x^(deg - phi) * Φ_m (Φ_m is monic of degree phi)
            for i in 0..phi {
                let adj = &lead * BigRational::from_integer(modpoly[i].clone());
                raw[deg - phi + i] -= adj;
            }
        }
        raw.resize(phi, BigRational::zero());
        Self { m, coeffs: raw }
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.m, rhs.m, "mixed root orders");
        Self {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.m, rhs.m, "mixed root orders");
        Self {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.m, rhs.m, "mixed root orders");
        let mut conv = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] += a * b;
            }
        }
        Self::reduce(self.m, conv)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|a| a * q).collect(),
        }
    }

    /// Complex conjugation `ζ_m ↦ ζ_m^{−1}`.
    pub fn conj(&self) -> Self {
        let mut acc = Self::zero(self.m);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let basis = Self::root_of_unity(self.m, (self.m - i as u64) % self.m);
            acc = acc.add(&basis.scale(a));
        }
        acc
    }

    /// `z · conj(z)`, an element of the real subfield.
    pub fn norm_sq(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Field inverse via the extended Euclidean algorithm over `Q[x]`.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let modpoly: Vec<BigRational> = cyclotomic_polynomial(self.m)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (g, u) = poly_half_ext_gcd(&trim(&self.coeffs), &trim(&modpoly));
        // Φ_m is irreducible over Q, so the gcd is a nonzero constant.
        assert_eq!(g.len(), 1, "cyclotomic modulus not coprime to element");
        let scale = g[0].recip();
        Some(Self::reduce(self.m, u.iter().map(|c| c * &scale).collect()))
    }

    /// `Some((negated, e))` when the element equals `±ζ_m^e` (the complete
    /// set of roots of unity inside `Q(ζ_m)` up to the parity of `m`).
    pub fn as_root_of_unity(&self) -> Option<(bool, u64)> {
        for e in 0..self.m {
            let z = Self::root_of_unity(self.m, e);
            if *self == z {
                return Some((false, e));
            }
            if *self == z.neg() {
                return Some((true, e));
            }
        }
        None
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("{}:{}", self.m, parts.join(","))
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let (m_part, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in cyclotomic literal '{s}'")))?;
        let m: u64 = m_part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad root order '{m_part}'")))?;
        let phi = totient(m) as usize;
        let mut coeffs = Vec::with_capacity(phi);
        for piece in rest.split(',') {
            let q = BigRational::from_str(piece.trim())
                .map_err(|_| Error::Parse(format!("bad rational '{piece}'")))?;
            coeffs.push(q);
        }
        if coeffs.len() != phi {
            return Err(Error::Parse(format!(
                "expected {phi} coefficients for order {m}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { m, coeffs })
    }
}

fn trim(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut v = coeffs.to_vec();
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
    v
}

fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let dn = den.len() - 1;
    let lead = den[dn].clone();
    assert!(!lead.is_zero());
    let mut rem = num.to_vec();
    if rem.len() <= dn {
        return (vec![BigRational::zero()], trim(&rem));
    }
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigRational::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = &rem[k + dn] / &lead;
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            let adj = &c * d;
            rem[k + i] -= adj;
        }
    }
    (trim(&quot), trim(&rem))
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&out)
}

fn poly_is_zero(a: &[BigRational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Returns `(g, u)` with `g = gcd(a, b)` and `u·a ≡ g (mod b)`.
fn poly_half_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut u0 = vec![BigRational::one()];
    let mut u1 = vec![BigRational::zero()];
    while !poly_is_zero(&r1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let new_u = poly_sub(&u0, &poly_mul(&q, &u1));
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = new_u;
    }
    (r0, u0)
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Serialize for CycloNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CycloNumber::from_text(&s).map_err(serde::de::Error::custom)
    }
}

/// The exponential `e(t) = ζ_m^{m·t}` of a torus value; requires the
/// denominator `p^{k+1}` to divide the root order.
pub fn phase(t: &TorusValue, m: u64) -> Result<CycloNumber> {
    let den = t.denominator();
    if !m.is_multiple_of(den) {
        return Err(Error::OrderMismatch(den, m));
    }
    Ok(CycloNumber::root_of_unity(m, t.numerator() * (m / den)))
}

/// Solve `Σ_i c_i · columns[i] = target` over `Q(ζ_m)` by Gaussian
/// elimination; returns one exact solution or `None` when inconsistent.
#[allow(clippy::needless_range_loop)] // rows are indexed in pairs
pub fn solve_linear(
    columns: &[Vec<CycloNumber>],
    target: &[CycloNumber],
) -> Option<Vec<CycloNumber>> {
    let rows = target.len();
    let cols = columns.len();
    for col in columns {
        assert_eq!(col.len(), rows, "column length mismatch");
    }
    if cols == 0 {
        return if target.iter().all(CycloNumber::is_zero) {
            Some(vec![])
        } else {
            None
        };
    }
    let m = target
        .first()
        .map(CycloNumber::order)
        .unwrap_or_else(|| columns[0][0].order());
    // augmented matrix, row major
    let mut a: Vec<Vec<CycloNumber>> = (0..rows)
        .map(|r| {
            let mut row: Vec<CycloNumber> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(pr) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let inv = a[row][col].inverse().expect("nonzero pivot");
        for c in col..=cols {
            a[row][c] = a[row][c].mul(&inv);
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..=cols {
                    let adj = factor.mul(&a[row][c]);
                    a[r][c] = a[r][c].sub(&adj);
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    // inconsistent iff a zero row has nonzero rhs
    for r in row..rows {
        if !a[r][cols].is_zero() {
            return None;
        }
    }
    let mut solution = vec![CycloNumber::zero(m); cols];
    for (r, &pc) in pivot_cols.iter().enumerate() {
        solution[pc] = a[r][cols].clone();
    }
    Some(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::pow_u64;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        // Φ_8 = x^4 + 1
        let p8 = cyclotomic_polynomial(8);
        assert_eq!(p8.as_slice(), &[1, 0, 0, 0, 1].map(BigInt::from));
        // Φ_9 = x^6 + x^3 + 1
        let p9 = cyclotomic_polynomial(9);
        assert_eq!(p9.as_slice(), &[1, 0, 0, 1, 0, 0, 1].map(BigInt::from));
        // Φ_5 = x^4 + x^3 + x^2 + x + 1
        let p5 = cyclotomic_polynomial(5);
        assert_eq!(p5.as_slice(), &[1, 1, 1, 1, 1].map(BigInt::from));
    }

    #[test]
    fn root_powers_wrap() {
        for m in [5u64, 8, 9, 12] {
            let z = CycloNumber::root_of_unity(m, 1);
            let mut acc = CycloNumber::one(m);
            for _ in 0..m {
                acc = acc.mul(&z);
            }
            assert!(acc.is_one(), "ζ_{m}^{m} != 1");
        }
        // ζ_8^4 = -1
        let z4 = CycloNumber::root_of_unity(8, 4);
        assert_eq!(z4, CycloNumber::from_integer(8, -1));
    }

    #[test]
    fn conjugation_and_norm() {
        let z = CycloNumber::root_of_unity(8, 1);
        assert_eq!(z.conj(), CycloNumber::root_of_unity(8, 7));
        assert!(z.norm_sq().is_one());
        // norm of 1 + ζ_8: (1+ζ)(1+ζ^7) = 2 + ζ + ζ^7
        let w = CycloNumber::one(8).add(&z);
        let expected = CycloNumber::from_integer(8, 2)
            .add(&CycloNumber::root_of_unity(8, 1))
            .add(&CycloNumber::root_of_unity(8, 7));
        assert_eq!(w.norm_sq(), expected);
        // the norm is fixed by conjugation
        assert_eq!(w.norm_sq().conj(), w.norm_sq());
    }

    #[test]
    fn inverses() {
        for m in [5u64, 8, 9] {
            for e in 0..m {
                let z = CycloNumber::root_of_unity(m, e);
                let inv = z.inverse().unwrap();
                assert!(z.mul(&inv).is_one());
                assert_eq!(inv, z.conj(), "root of unity inverse is its conjugate");
            }
        }
        let w = CycloNumber::one(8).add(
            &CycloNumber::root_of_unity(8, 1)
                .scale(&BigRational::new(BigInt::from(3), BigInt::from(7))),
        );
        assert!(w.mul(&w.inverse().unwrap()).is_one());
        assert!(CycloNumber::zero(8).inverse().is_none());
    }

    #[test]
    fn phase_examples() {
        let t0 = TorusValue::zero(2).unwrap();
        assert!(phase(&t0, 8).unwrap().is_one());
        // 1/8 -> ζ_8
        let eighth = TorusValue::new(2, 1, 2).unwrap();
        assert_eq!(phase(&eighth, 8).unwrap(), CycloNumber::root_of_unity(8, 1));
        // 1/2 -> ζ_8^4 = -1
        let half = TorusValue::new(2, 1, 0).unwrap();
        assert_eq!(phase(&half, 8).unwrap(), CycloNumber::from_integer(8, -1));
        // order mismatch: 1/8 cannot be mapped into Q(ζ_9)
        assert!(matches!(phase(&eighth, 9), Err(Error::OrderMismatch(8, 9))));
    }

    #[test]
    fn phase_is_homomorphism() {
        // exhaustive over depth <= 2 for p in {2, 3}
        for (p, m) in [(2u64, 8u64), (3, 9)] {
            let modulus = pow_u64(p, 3);
            let values: Vec<TorusValue> = (0..modulus)
                .map(|k| TorusValue::new(p, k, 2).unwrap())
                .collect();
            for &s in &values {
                for &t in &values {
                    if s.denominator() > m || t.denominator() > m {
                        continue;
                    }
                    let lhs = phase(&(s + t), m).unwrap();
                    let rhs = phase(&s, m).unwrap().mul(&phase(&t, m).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let z = CycloNumber::root_of_unity(8, 3)
            .scale(&BigRational::new(BigInt::from(-5), BigInt::from(12)));
        let back = CycloNumber::from_text(&z.to_text()).unwrap();
        assert_eq!(z, back);
        assert!(CycloNumber::from_text("8:1,2").is_err());
        assert!(CycloNumber::from_text("nonsense").is_err());
    }

    #[test]
    fn linear_solver() {
        let m = 8;
        let z = |e| CycloNumber::root_of_unity(m, e);
        // c0 * (1, 0) + c1 * (ζ, ζ^2) = (ζ^3, ζ^2)  =>  c1 = 1, c0 = ζ^3 - ζ
        let cols = vec![
            vec![CycloNumber::one(m), CycloNumber::zero(m)],
            vec![z(1), z(2)],
        ];
        let target = vec![z(3), z(2)];
        let sol = solve_linear(&cols, &target).unwrap();
        assert_eq!(sol[1], CycloNumber::one(m));
        assert_eq!(sol[0], z(3).sub(&z(1)));
        // inconsistent
        let cols2 = vec![vec![CycloNumber::one(m), CycloNumber::one(m)]];
        let target2 = vec![CycloNumber::one(m), CycloNumber::zero(m)];
        assert!(solve_linear(&cols2, &target2).is_none());
    }

    fn arb_cyclo(m: u64) -> impl Strategy<Value = CycloNumber> {
        let phi = totient(m) as usize;
        proptest::collection::vec((-6i64..=6, 1u64..=4), phi).prop_map(move |parts| {
            let coeffs = parts
                .into_iter()
                .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect();
            CycloNumber { m, coeffs }
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_cyclo(8), b in arb_cyclo(8), c in arb_cyclo(8)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
            // z * conj(z) is conjugation-fixed (real)
            prop_assert_eq!(a.norm_sq().conj(), a.norm_sq());
        }

        #[test]
        fn ring_axioms_nine(a in arb_cyclo(9), b in arb_cyclo(9)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.norm_sq().conj(), a.norm_sq());
        }
    }
}
