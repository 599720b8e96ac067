//! Prime-field scalars and vectors, the natural lift `|·|`, and exact
//! linear algebra over `F_p`.
//!
//! All residues are stored reduced to `{0, …, p−1}`. Vectors over `F_p^n`
//! are enumerated in lexicographic order with the first coordinate most
//! significant; `FpVector::to_index` / `FpVector::from_index` fix that
//! bijection once and for all, and every "lexicographically first" tie
//! break in this crate refers to it.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Deterministic primality test; `p` is small everywhere in this crate.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `p^k` with overflow checks; table sizes in this crate stay far below `u64::MAX`.
pub fn pow_u64(p: u64, k: u32) -> u64 {
    p.checked_pow(k).expect("power overflow")
}

/// An element of `F_p`, stored as its representative in `{0, …, p−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpScalar {
    p: u64,
    value: u64,
}

impl FpScalar {
    pub fn new(p: u64, value: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self {
            p,
            value: value % p,
        })
    }

    pub fn zero(p: u64) -> Result<Self> {
        Self::new(p, 0)
    }

    pub fn one(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// The natural lift: the representative in `{0, …, p−1}` as an integer.
    pub fn lift(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        Some(Self {
            p: self.p,
            value: mod_inverse(self.value, self.p),
        })
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpScalar {
            p: self.p,
            value: (self.value + rhs.value) % self.p,
        }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpScalar {
            p: self.p,
            value: (self.p + self.value - rhs.value) % self.p,
        }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpScalar {
            p: self.p,
            value: self.value * rhs.value % self.p,
        }
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar {
            p: self.p,
            value: (self.p - self.value) % self.p,
        }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector in `F_p^n`, entries reduced to `{0, …, p−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVector {
    p: u64,
    entries: Vec<u64>,
}

impl FpVector {
    pub fn new(p: u64, entries: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        Ok(Self {
            p,
            entries: entries.into_iter().map(|e| e % p).collect(),
        })
    }

    pub fn zeros(p: u64, n: usize) -> Result<Self> {
        Self::new(p, vec![0; n])
    }

    /// Standard basis vector `e_i`.
    pub fn unit(p: u64, n: usize, i: usize) -> Result<Self> {
        let mut entries = vec![0; n];
        entries[i] = 1;
        Self::new(p, entries)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn set_entry(&mut self, i: usize, v: u64) {
        self.entries[i] = v % self.p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn scale(&self, c: u64) -> FpVector {
        FpVector {
            p: self.p,
            entries: self
                .entries
                .iter()
                .map(|&e| e * (c % self.p) % self.p)
                .collect(),
        }
    }

    pub fn dot(&self, other: &FpVector) -> u64 {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!(self.dim(), other.dim(), "mixed dimensions");
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0u64, |acc, (&a, &b)| (acc + a * b) % self.p)
    }

    /// Entry-wise product `x ∘ y`.
    pub fn hadamard(&self, other: &FpVector) -> FpVector {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!(self.dim(), other.dim(), "mixed dimensions");
        FpVector {
            p: self.p,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a * b % self.p)
                .collect(),
        }
    }

    /// Index of this vector in the lexicographic enumeration of `F_p^n`
    /// (first coordinate most significant).
    pub fn to_index(&self) -> usize {
        self.entries
            .iter()
            .fold(0usize, |acc, &e| acc * self.p as usize + e as usize)
    }

    pub fn from_index(p: u64, n: usize, mut index: usize) -> Result<Self> {
        check_prime(p)?;
        let mut entries = vec![0u64; n];
        for i in (0..n).rev() {
            entries[i] = (index % p as usize) as u64;
            index /= p as usize;
        }
        Ok(Self { p, entries })
    }

    /// All of `F_p^n` in lexicographic order.
    pub fn iter_all(p: u64, n: usize) -> impl Iterator<Item = FpVector> {
        let count = pow_u64(p, n as u32) as usize;
        (0..count).map(move |i| FpVector::from_index(p, n, i).expect("prime checked"))
    }
}

impl Add for &FpVector {
    type Output = FpVector;
    fn add(self, rhs: &FpVector) -> FpVector {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        assert_eq!(self.dim(), rhs.dim(), "mixed dimensions");
        FpVector {
            p: self.p,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| (a + b) % self.p)
                .collect(),
        }
    }
}

impl Sub for &FpVector {
    type Output = FpVector;
    fn sub(self, rhs: &FpVector) -> FpVector {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        assert_eq!(self.dim(), rhs.dim(), "mixed dimensions");
        FpVector {
            p: self.p,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| (self.p + a - b) % self.p)
                .collect(),
        }
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The natural lift of a vector: `|x_1| + ⋯ + |x_n|`.
pub fn nat_lift(x: &FpVector) -> u64 {
    x.entries.iter().sum()
}

/// Both sides of the `p = 2` lift identity `|a+b| = |a| + |b| − 2|ab|`.
pub fn lift_identity_f2(a: FpScalar, b: FpScalar) -> Result<(i64, i64)> {
    if a.modulus() != 2 || b.modulus() != 2 {
        return Err(Error::WrongCharacteristic {
            expected: 2,
            got: a.modulus().max(b.modulus()),
        });
    }
    let lhs = (a + b).lift() as i64;
    let rhs = a.lift() as i64 + b.lift() as i64 - 2 * (a * b).lift() as i64;
    Ok((lhs, rhs))
}

/// Both sides of the `p = 3` lift identity
/// `|a+b| = |a| + |b| + 3(|a²b| + |ab²|) − 6|ab|  (mod 9)`, reduced mod 9.
pub fn lift_identity_f3(a: FpScalar, b: FpScalar) -> Result<(u64, u64)> {
    if a.modulus() != 3 || b.modulus() != 3 {
        return Err(Error::WrongCharacteristic {
            expected: 3,
            got: a.modulus().max(b.modulus()),
        });
    }
    let lhs = (a + b).lift() % 9;
    let aab = (a * a * b).lift() as i64;
    let abb = (a * b * b).lift() as i64;
    let ab = (a * b).lift() as i64;
    let rhs = a.lift() as i64 + b.lift() as i64 + 3 * (aab + abb) - 6 * ab;
    Ok((lhs, rhs.rem_euclid(9) as u64))
}

/// A dense matrix over `F_p`, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self> {
        check_prime(p)?;
        Ok(Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    pub fn from_rows(p: u64, rows: &[FpVector]) -> Result<Self> {
        check_prime(p)?;
        let cols = rows.first().map_or(0, FpVector::dim);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.dim() != cols {
                return Err(Error::DimensionMismatch(r.dim(), cols));
            }
            data.extend_from_slice(r.entries());
        }
        Ok(Self {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> FpVector {
        FpVector {
            p: self.p,
            entries: self.data[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduce to row-reduced echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.at(r, col) != 0) else {
                continue;
            };
            self.swap_rows(row, pr);
            let inv = mod_inverse(self.at(row, col), p);
            for c in 0..self.cols {
                let v = self.at(row, c) * inv % p;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && self.at(r, col) != 0 {
                    let factor = self.at(r, col);
                    for c in 0..self.cols {
                        let v = (self.at(r, c) + (p - factor) * self.at(row, c)) % p;
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of the right kernel `{x : Ax = 0}`.
    pub fn kernel(&self) -> Vec<FpVector> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                // x_pc = -A[r][free]
                v[pc] = (self.p - m.at(r, free)) % self.p;
            }
            basis.push(FpVector {
                p: self.p,
                entries: v,
            });
        }
        basis
    }

    /// Solve `Ax = b`; returns a particular solution and a kernel basis,
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, b: &FpVector) -> Option<(FpVector, Vec<FpVector>)> {
        assert_eq!(b.dim(), self.rows, "rhs dimension");
        let mut aug = FpMatrix::zeros(self.p, self.rows, self.cols + 1).expect("prime checked");
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c));
            }
            aug.set(r, self.cols, b.entry(r));
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols);
        }
        Some((
            FpVector {
                p: self.p,
                entries: x,
            },
            self.kernel(),
        ))
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(5));
        assert!(is_prime(7));
        assert!(!is_prime(1));
        assert!(!is_prime(4));
        assert!(!is_prime(9));
        assert!(FpScalar::new(6, 1).is_err());
    }

    #[test]
    fn nat_lift_examples() {
        let x = FpVector::new(2, vec![1, 0, 1]).unwrap();
        assert_eq!(nat_lift(&x), 2);
        assert_eq!(FpScalar::new(3, 2).unwrap().lift(), 2);
        let y = FpVector::new(3, vec![2, 2, 1]).unwrap();
        assert_eq!(nat_lift(&y), 5);
    }

    #[test]
    fn lift_identity_f2_exhaustive() {
        for a in 0..2 {
            for b in 0..2 {
                let (lhs, rhs) =
                    lift_identity_f2(FpScalar::new(2, a).unwrap(), FpScalar::new(2, b).unwrap())
                        .unwrap();
                assert_eq!(lhs, rhs, "a={a} b={b}");
            }
        }
        let (lhs, rhs) =
            lift_identity_f2(FpScalar::new(2, 1).unwrap(), FpScalar::new(2, 1).unwrap()).unwrap();
        assert_eq!((lhs, rhs), (0, 0));
        assert!(
            lift_identity_f2(FpScalar::new(3, 1).unwrap(), FpScalar::new(3, 1).unwrap()).is_err()
        );
    }

    #[test]
    fn lift_identity_f3_exhaustive() {
        // Independent oracle: both sides by direct integer arithmetic.
        for a in 0u64..3 {
            for b in 0u64..3 {
                let lhs_direct = (a + b) % 3 % 9;
                let rhs_direct = (a as i64
                    + b as i64
                    + 3 * ((a * a % 3 * b % 3) as i64 + (a % 3 * (b * b % 3) % 3) as i64)
                    - 6 * (a * b % 3) as i64)
                    .rem_euclid(9) as u64;
                let (lhs, rhs) =
                    lift_identity_f3(FpScalar::new(3, a).unwrap(), FpScalar::new(3, b).unwrap())
                        .unwrap();
                assert_eq!(lhs, lhs_direct);
                assert_eq!(rhs, rhs_direct);
                assert_eq!(lhs, rhs, "a={a} b={b}");
            }
        }
        let (lhs, rhs) =
            lift_identity_f3(FpScalar::new(3, 2).unwrap(), FpScalar::new(3, 2).unwrap()).unwrap();
        assert_eq!((lhs, rhs), (1, 1));
    }

    #[test]
    fn index_round_trip() {
        for p in [2u64, 3, 5] {
            for n in 0..4usize {
                for (i, v) in FpVector::iter_all(p, n).enumerate() {
                    assert_eq!(v.to_index(), i);
                    assert_eq!(FpVector::from_index(p, n, i).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn rref_and_solve() {
        // x + y = 1, y + z = 1 over F_2: solutions (1,0,1)+t(1,1,1).
        let a = FpMatrix::from_rows(
            2,
            &[
                FpVector::new(2, vec![1, 1, 0]).unwrap(),
                FpVector::new(2, vec![0, 1, 1]).unwrap(),
            ],
        )
        .unwrap();
        let b = FpVector::new(2, vec![1, 1]).unwrap();
        let (part, kernel) = a.solve(&b).unwrap();
        assert_eq!(kernel.len(), 1);
        for t in 0..2u64 {
            let x = &part + &kernel[0].scale(t);
            assert_eq!((x.entry(0) + x.entry(1)) % 2, 1);
            assert_eq!((x.entry(1) + x.entry(2)) % 2, 1);
        }
        // Inconsistent system.
        let a2 = FpMatrix::from_rows(
            2,
            &[
                FpVector::new(2, vec![1, 0]).unwrap(),
                FpVector::new(2, vec![1, 0]).unwrap(),
            ],
        )
        .unwrap();
        assert!(a2.solve(&FpVector::new(2, vec![0, 1]).unwrap()).is_none());
    }

    #[test]
    fn kernel_dimension() {
        let a = FpMatrix::from_rows(3, &[FpVector::new(3, vec![1, 2, 0, 1]).unwrap()]).unwrap();
        let k = a.kernel();
        assert_eq!(k.len(), 3);
        for v in &k {
            assert_eq!(
                v.dot(&FpVector::new(3, vec![1, 2, 0, 1]).unwrap()),
                0,
                "kernel vector not annihilated"
            );
        }
    }
}
