//! Nonclassical polynomials `F_p^n → T` in their unique global coefficient
//! representation, together with the dense value-table form used for
//! derivatives and restrictions.
//!
//! A polynomial is stored as a shift `α` plus a map from `(level j,
//! exponent vector i)` to a coefficient in `{1, …, p−1}`; the term
//! `(i, j) ↦ c` contributes `c·|x_1|^{i_1}⋯|x_n|^{i_n} / p^{j+1}`.
//! Exponents satisfy `0 < i_1 + ⋯ + i_n` and each `i_t ≤ p−1`; terms with
//! coefficient zero are never stored, and the map is ordered
//! lexicographically in `(j, i)` so serialization is deterministic.
//!
//! Derivatives and restrictions are computed pointwise into
//! [`FunctionTable`]s; [`FunctionTable::interpolate`] recovers the unique
//! canonical representation by peeling the `p`-adic levels from the finest
//! one upward, each level being an ordinary multivariate interpolation
//! over `F_p`.

use crate::error::Error;
use crate::ff::{is_prime, pow_u64, FpVector};
use crate::subspace::AffineMap;
use crate::torus::TorusValue;
use crate::Result;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Evaluation budget for the exhaustive derivative-direction scan in
/// [`FunctionTable::degree`]: `p^{n(d+2)}` may not exceed this.
pub const DEGREE_SCAN_BUDGET: u64 = 1 << 24;

/// Term key: `(level, exponents)`, ordered lexicographically in `(j, i)`.
pub type TermKey = (u32, Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonclassicalPoly {
    p: u64,
    n: usize,
    shift: TorusValue,
    terms: BTreeMap<TermKey, u64>,
}

impl NonclassicalPoly {
    pub fn new(p: u64, n: usize, shift: TorusValue, terms: BTreeMap<TermKey, u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if shift.modulus() != p {
            return Err(Error::ModulusMismatch(shift.modulus(), p));
        }
        for ((_, exps), &coeff) in &terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch(exps.len(), n));
            }
            if exps.iter().all(|&e| e == 0) {
                return Err(Error::Precondition(
                    "term with all-zero exponent vector (belongs to the shift)".into(),
                ));
            }
            if exps.iter().any(|&e| e as u64 > p - 1) {
                return Err(Error::Precondition(format!(
                    "exponent out of range for p = {p}"
                )));
            }
            if coeff == 0 || coeff > p - 1 {
                return Err(Error::Precondition(format!(
                    "coefficient {coeff} not in 1..={}",
                    p - 1
                )));
            }
        }
        Ok(Self { p, n, shift, terms })
    }

    pub fn zero(p: u64, n: usize) -> Result<Self> {
        Self::new(p, n, TorusValue::zero(p)?, BTreeMap::new())
    }

    pub fn constant(p: u64, n: usize, shift: TorusValue) -> Result<Self> {
        Self::new(p, n, shift, BTreeMap::new())
    }

    /// The polynomial `x ↦ (|x_1| + ⋯ + |x_n|) / p^k` for `k ≥ 1`: one
    /// level-`(k−1)` term per coordinate.
    pub fn lift_sum(p: u64, n: usize, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("lift_sum requires k >= 1".into()));
        }
        let mut terms = BTreeMap::new();
        for t in 0..n {
            let mut exps = vec![0u8; n];
            exps[t] = 1;
            terms.insert((k - 1, exps), 1);
        }
        Self::new(p, n, TorusValue::zero(p)?, terms)
    }

    /// A single monomial term `c·Π|x_t|^{i_t} / p^{j+1}`.
    pub fn monomial(p: u64, n: usize, exps: Vec<u8>, level: u32, coeff: u64) -> Result<Self> {
        let mut terms = BTreeMap::new();
        terms.insert((level, exps), coeff);
        Self::new(p, n, TorusValue::zero(p)?, terms)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> TorusValue {
        self.shift
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, u64> {
        &self.terms
    }

    pub fn with_shift(&self, shift: TorusValue) -> Result<Self> {
        Self::new(self.p, self.n, shift, self.terms.clone())
    }

    /// Degree read off the representation:
    /// `max over terms of (i_1 + ⋯ + i_n) + j(p−1)`, and `0` for constants.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|((j, exps), _)| {
                exps.iter().map(|&e| e as usize).sum::<usize>()
                    + *j as usize * (self.p as usize - 1)
            })
            .max()
            .unwrap_or(0)
    }

    /// The largest stored level `j` (0 for constants).
    pub fn depth(&self) -> u32 {
        self.terms.keys().map(|(j, _)| *j).max().unwrap_or(0)
    }

    /// True iff the polynomial is classical up to its shift, i.e. depth 0.
    pub fn is_classical(&self) -> bool {
        self.depth() == 0
    }

    pub fn evaluate(&self, x: &FpVector) -> Result<TorusValue> {
        if x.modulus() != self.p {
            return Err(Error::ModulusMismatch(x.modulus(), self.p));
        }
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch(x.dim(), self.n));
        }
        let mut acc = self.shift;
        for ((j, exps), &coeff) in &self.terms {
            let modulus = pow_u64(self.p, j + 1);
            let mut num = coeff % modulus;
            for (t, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    num = num * (x.entry(t) % modulus) % modulus;
                }
            }
            acc = acc + TorusValue::new(self.p, num, *j)?;
        }
        Ok(acc)
    }

    pub fn evaluate_table(&self) -> FunctionTable {
        let values = FpVector::iter_all(self.p, self.n)
            .map(|x| self.evaluate(&x).expect("dimensions match by construction"))
            .collect();
        FunctionTable {
            p: self.p,
            n: self.n,
            values,
        }
    }

    /// Pointwise difference table `x ↦ P(x+h) − P(x)`.
    pub fn additive_derivative(&self, h: &FpVector) -> Result<FunctionTable> {
        self.evaluate_table().additive_derivative(h)
    }

    /// Degree via the exhaustive derivative scan, cross-checked against the
    /// representation degree.
    pub fn degree_checked(&self) -> Result<usize> {
        let scanned = self.evaluate_table().degree()?;
        let repr = self.degree();
        if scanned != repr {
            return Err(Error::SelfCheck(format!(
                "degree mismatch: scan {scanned} vs representation {repr} for {self}"
            )));
        }
        Ok(scanned)
    }

    /// `P(A(y))` as a table over the domain of `A`.
    pub fn restrict(&self, map: &AffineMap) -> Result<FunctionTable> {
        if map.modulus() != self.p {
            return Err(Error::ModulusMismatch(map.modulus(), self.p));
        }
        if map.codomain_dim() != self.n {
            return Err(Error::DimensionMismatch(map.codomain_dim(), self.n));
        }
        let values: Result<Vec<TorusValue>> = FpVector::iter_all(self.p, map.domain_dim())
            .map(|y| self.evaluate(&map.apply(&y)))
            .collect();
        Ok(FunctionTable {
            p: self.p,
            n: map.domain_dim(),
            values: values?,
        })
    }

    /// Deterministic text record `p n shift_num shift_depth ; (i_1..i_n | j | c)*`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {}",
            self.p,
            self.n,
            self.shift.numerator(),
            self.shift.depth()
        );
        for ((j, exps), coeff) in &self.terms {
            let ex: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!(" ; {} | {} | {}", ex.join(" "), j, coeff));
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let mut fields = s.split(';');
        let header: Vec<u64> = fields
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad header token '{t}'")))
            })
            .collect::<Result<_>>()?;
        if header.len() != 4 {
            return Err(Error::Parse(
                "polynomial header must be 'p n shift_num shift_depth'".into(),
            ));
        }
        let (p, n) = (header[0], header[1] as usize);
        let shift = TorusValue::new(p, header[2], header[3] as u32)?;
        let mut terms = BTreeMap::new();
        for field in fields {
            let parts: Vec<&str> = field.split('|').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!(
                    "term must be 'i.. | j | c': '{field}'"
                )));
            }
            let exps: Vec<u8> = parts[0]
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad exponent '{t}'")))
                })
                .collect::<Result<_>>()?;
            let j: u32 = parts[1]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad level '{}'", parts[1])))?;
            let c: u64 = parts[2]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient '{}'", parts[2])))?;
            if terms.insert((j, exps), c).is_some() {
                return Err(Error::Parse("duplicate term".into()));
            }
        }
        Self::new(p, n, shift, terms)
    }
}

impl fmt::Display for NonclassicalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl FromStr for NonclassicalPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

/// Dense table of torus values over all of `F_p^n` (lexicographic point order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    p: u64,
    n: usize,
    values: Vec<TorusValue>,
}

impl FunctionTable {
    pub fn new(p: u64, n: usize, values: Vec<TorusValue>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let expected = pow_u64(p, n as u32) as usize;
        if values.len() != expected {
            return Err(Error::DimensionMismatch(values.len(), expected));
        }
        for v in &values {
            if v.modulus() != p {
                return Err(Error::ModulusMismatch(v.modulus(), p));
            }
        }
        Ok(Self { p, n, values })
    }

    pub fn from_fn(p: u64, n: usize, mut f: impl FnMut(&FpVector) -> TorusValue) -> Result<Self> {
        let values: Vec<TorusValue> = FpVector::iter_all(p, n).map(|x| f(&x)).collect();
        Self::new(p, n, values)
    }

    pub fn zero(p: u64, n: usize) -> Result<Self> {
        let count = pow_u64(p, n as u32) as usize;
        Self::new(p, n, vec![TorusValue::zero(p)?; count])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[TorusValue] {
        &self.values
    }

    pub fn value_at(&self, x: &FpVector) -> TorusValue {
        self.values[x.to_index()]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(TorusValue::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Pointwise `Δ_h: x ↦ f(x+h) − f(x)`.
    pub fn additive_derivative(&self, h: &FpVector) -> Result<FunctionTable> {
        if h.modulus() != self.p {
            return Err(Error::ModulusMismatch(h.modulus(), self.p));
        }
        if h.dim() != self.n {
            return Err(Error::DimensionMismatch(h.dim(), self.n));
        }
        let values: Vec<TorusValue> = FpVector::iter_all(self.p, self.n)
            .map(|x| self.values[(&x + h).to_index()] - self.values[x.to_index()])
            .collect();
        FunctionTable::new(self.p, self.n, values)
    }

    /// Smallest `d` such that every `(d+1)`-fold additive derivative
    /// vanishes identically, by exhaustive direction scan. Refuses when the
    /// scan would exceed [`DEGREE_SCAN_BUDGET`] evaluations.
    pub fn degree(&self) -> Result<usize> {
        let points = pow_u64(self.p, self.n as u32);
        let max_degree = (self.p as usize - 1)
            * (self.n + self.values.iter().map(|v| v.depth()).max().unwrap_or(0) as usize);
        for d in 0..=max_degree {
            // cost of this level: p^{n(d+1)} direction tuples x p^n points
            let cost = points
                .checked_pow(d as u32 + 2)
                .filter(|&c| c <= DEGREE_SCAN_BUDGET);
            if cost.is_none() {
                return Err(Error::BudgetExceeded(format!(
                    "degree scan at level {d} needs more than {DEGREE_SCAN_BUDGET} evaluations"
                )));
            }
            if self.derivatives_vanish(d + 1)? {
                return Ok(d);
            }
        }
        Err(Error::SelfCheck(
            "table exceeded its maximal possible polynomial degree".into(),
        ))
    }

    fn derivatives_vanish(&self, order: usize) -> Result<bool> {
        if order == 0 {
            return Ok(self.is_zero());
        }
        for h in FpVector::iter_all(self.p, self.n) {
            if !self
                .additive_derivative(&h)?
                .derivatives_vanish(order - 1)?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Recover the unique global coefficient representation. Always
    /// succeeds structurally (every table is a polynomial of some degree);
    /// errors when that degree exceeds `degree_budget`.
    pub fn interpolate(&self, degree_budget: usize) -> Result<NonclassicalPoly> {
        let p = self.p;
        let shift = self.values[0];
        let residual: Vec<TorusValue> = self.values.iter().map(|&v| v - shift).collect();
        let max_depth = residual.iter().map(TorusValue::depth).max().unwrap_or(0);
        // numerators at the common denominator p^{max_depth+1}
        let mut nums: Vec<u64> = residual
            .iter()
            .map(|v| v.numerator_at_depth(max_depth))
            .collect();
        let mut terms = BTreeMap::new();
        for level in (0..=max_depth).rev() {
            let modulus = pow_u64(p, level + 1);
            let residues: Vec<u64> = nums.iter().map(|&a| a % p).collect();
            let coeffs = interp_fp(p, self.n, &residues);
            for (exps, c) in &coeffs {
                if exps.iter().all(|&e| e == 0) {
                    // the residual vanishes at 0, so no constant can appear
                    debug_assert_eq!(*c, 0, "unexpected constant in level fit");
                    continue;
                }
                if *c != 0 {
                    terms.insert((level, exps.clone()), *c);
                }
            }
            // subtract the integer values of this level's fit and descend
            for (idx, num) in nums.iter_mut().enumerate() {
                let x = FpVector::from_index(p, self.n, idx)?;
                let mut fitted: u64 = 0;
                for (exps, c) in &coeffs {
                    if *c == 0 {
                        continue;
                    }
                    let mut term = *c;
                    for (t, &e) in exps.iter().enumerate() {
                        for _ in 0..e {
                            term *= x.entry(t);
                        }
                    }
                    fitted += term;
                }
                // (num - fitted) mod modulus, kept nonnegative
                let reduced = (*num % modulus + modulus - fitted % modulus) % modulus;
                debug_assert_eq!(reduced % p, 0, "level fit must clear the residue mod p");
                *num = reduced / p;
            }
        }
        debug_assert!(nums.iter().all(|&a| a == 0));
        let poly = NonclassicalPoly::new(p, self.n, shift, terms)?;
        let found = poly.degree();
        if found > degree_budget {
            return Err(Error::NotPolynomialWithinBudget {
                budget: degree_budget,
                found,
            });
        }
        Ok(poly)
    }
}

/// Multivariate interpolation over `F_p`: coefficients (exponents in
/// `{0, …, p−1}^n`) of the unique polynomial with the given value table.
fn interp_fp(p: u64, n: usize, values: &[u64]) -> Vec<(Vec<u8>, u64)> {
    // Apply the 1D inverse Vandermonde along each axis of the value tensor.
    let vinv = vandermonde_inverse(p);
    let pn = values.len();
    let mut tensor: Vec<u64> = values.to_vec();
    let pu = p as usize;
    for axis in 0..n {
        // stride of the axis in the lexicographic layout
        let stride = pu.pow((n - 1 - axis) as u32);
        let mut next = vec![0u64; pn];
        for (idx, slot) in next.iter_mut().enumerate() {
            let pos = idx / stride % pu; // index along this axis
            let base = idx - pos * stride;
            let mut acc = 0u64;
            for x in 0..pu {
                acc = (acc + vinv[pos][x] * tensor[base + x * stride]) % p;
            }
            *slot = acc;
        }
        tensor = next;
    }
    (0..pn)
        .map(|idx| {
            let mut exps = vec![0u8; n];
            let mut rem = idx;
            for t in (0..n).rev() {
                exps[t] = (rem % pu) as u8;
                rem /= pu;
            }
            (exps, tensor[idx])
        })
        .collect()
}

/// Inverse of the `p×p` Vandermonde matrix `V[x][i] = x^i` over `F_p`.
#[allow(clippy::needless_range_loop)] // augmented rows are indexed in pairs
fn vandermonde_inverse(p: u64) -> Vec<Vec<u64>> {
    let pu = p as usize;
    let mut aug = vec![vec![0u64; 2 * pu]; pu];
    for x in 0..pu {
        let mut pw = 1u64;
        for i in 0..pu {
            aug[x][i] = pw;
            pw = pw * x as u64 % p;
        }
        aug[x][pu + x] = 1;
    }
    for col in 0..pu {
        let pivot = (col..pu).find(|&r| aug[r][col] != 0).expect("invertible");
        aug.swap(col, pivot);
        let inv = crate::ff::FpScalar::new(p, aug[col][col])
            .expect("prime")
            .inverse()
            .expect("nonzero")
            .lift();
        for c in 0..2 * pu {
            aug[col][c] = aug[col][c] * inv % p;
        }
        for r in 0..pu {
            if r != col && aug[r][col] != 0 {
                let f = aug[r][col];
                for c in 0..2 * pu {
                    aug[r][c] = (aug[r][c] + (p - f) * aug[col][c]) % p;
                }
            }
        }
    }
    (0..pu).map(|r| aug[r][pu..].to_vec()).collect()
}

/// All canonical polynomials of degree at most `d` with zero shift, as
/// coefficient assignments over the admissible `(i, j)` slots. Enumeration
/// order is lexicographic in the coefficient vector with the first slot
/// (smallest `(j, i)`) most significant; the all-zero polynomial comes first.
pub fn enumerate_polys_up_to_degree(p: u64, n: usize, d: usize) -> Result<Vec<NonclassicalPoly>> {
    let slots = degree_slots(p, n, d);
    let total = (p as u128)
        .checked_pow(slots.len() as u32)
        .ok_or_else(|| Error::BudgetExceeded(format!("{} coefficient slots", slots.len())))?;
    if total > 1 << 26 {
        return Err(Error::BudgetExceeded(format!(
            "enumeration of {total} polynomials"
        )));
    }
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total as u64 {
        let mut terms = BTreeMap::new();
        let mut c = code;
        for slot in slots.iter().rev() {
            let coeff = c % p;
            c /= p;
            if coeff != 0 {
                terms.insert(slot.clone(), coeff);
            }
        }
        out.push(NonclassicalPoly::new(p, n, TorusValue::zero(p)?, terms)?);
    }
    Ok(out)
}

/// The admissible term slots `(j, i)` with `0 < Σi ≤ d − j(p−1)`, in the
/// canonical `(j, i)` order.
pub fn degree_slots(p: u64, n: usize, d: usize) -> Vec<TermKey> {
    let mut slots = Vec::new();
    let mut level = 0u32;
    loop {
        let headroom = d as i64 - level as i64 * (p as i64 - 1);
        if headroom < 1 {
            break;
        }
        for exps in exponent_vectors(p, n) {
            let total: i64 = exps.iter().map(|&e| e as i64).sum();
            if total >= 1 && total <= headroom {
                slots.push((level, exps));
            }
        }
        level += 1;
    }
    slots.sort();
    slots
}

fn exponent_vectors(p: u64, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for e in 0..p as u8 {
                let mut v = prefix.clone();
                v.push(e);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
