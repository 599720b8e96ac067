//! Affine subspaces of `F_p^n` in canonical form, their lattice operations,
//! and the constant-membership-pattern subspace construction used by the
//! stabilizer-rank pipeline.
//!
//! Canonical form: the basis of the linear part is in row-reduced echelon
//! form and the offset is reduced to have zeros in all pivot coordinates.
//! With that normalization two subspaces are equal as point sets iff their
//! canonical data agree, and the offset is the lexicographically smallest
//! member point.

use crate::error::Error;
use crate::ff::{pow_u64, FpMatrix, FpVector};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A nonempty affine subspace `H = v + span(basis)` of `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineSubspace {
    p: u64,
    n: usize,
    basis: Vec<FpVector>,
    offset: FpVector,
    pivots: Vec<usize>,
}

impl AffineSubspace {
    /// Canonicalize `offset + span(spans)`.
    pub fn from_span(offset: FpVector, spans: &[FpVector]) -> Result<Self> {
        let p = offset.modulus();
        let n = offset.dim();
        for s in spans {
            if s.modulus() != p {
                return Err(Error::ModulusMismatch(s.modulus(), p));
            }
            if s.dim() != n {
                return Err(Error::DimensionMismatch(s.dim(), n));
            }
        }
        let (basis, pivots) = if spans.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let mut m = FpMatrix::from_rows(p, spans)?;
            let pivots = m.rref();
            let basis: Vec<FpVector> = (0..pivots.len()).map(|r| m.row(r)).collect();
            (basis, pivots)
        };
        // Zero the pivot coordinates of the offset against the basis.
        let mut v = offset;
        for (row, &pc) in pivots.iter().enumerate() {
            let c = v.entry(pc);
            if c != 0 {
                v = &v - &basis[row].scale(c);
            }
        }
        Ok(Self {
            p,
            n,
            basis,
            offset: v,
            pivots,
        })
    }

    /// The affine hull of a nonempty list of points.
    pub fn affine_hull(points: &[FpVector]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Precondition("affine hull of no points".into()))?;
        let diffs: Vec<FpVector> = points[1..].iter().map(|x| x - first).collect();
        Self::from_span(first.clone(), &diffs)
    }

    pub fn full_space(p: u64, n: usize) -> Result<Self> {
        let basis: Result<Vec<FpVector>> = (0..n).map(|i| FpVector::unit(p, n, i)).collect();
        Self::from_span(FpVector::zeros(p, n)?, &basis?)
    }

    pub fn single_point(v: FpVector) -> Result<Self> {
        Self::from_span(v, &[])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.n - self.basis.len()
    }

    pub fn basis(&self) -> &[FpVector] {
        &self.basis
    }

    /// The canonical coset representative; also the lexicographically
    /// smallest point of the subspace.
    pub fn offset(&self) -> &FpVector {
        &self.offset
    }

    pub fn point_count(&self) -> u64 {
        pow_u64(self.p, self.dim() as u32)
    }

    pub fn contains(&self, x: &FpVector) -> bool {
        if x.modulus() != self.p || x.dim() != self.n {
            return false;
        }
        self.local_coordinates(x).is_some()
    }

    /// Coordinates of `x` w.r.t. the canonical parametrization, or `None`
    /// when `x` lies outside the subspace. With an RREF basis these are
    /// just the pivot coordinates of `x − offset`.
    pub fn local_coordinates(&self, x: &FpVector) -> Option<FpVector> {
        let mut rem = x - &self.offset;
        let mut coords = Vec::with_capacity(self.basis.len());
        for (row, &pc) in self.pivots.iter().enumerate() {
            let c = rem.entry(pc);
            coords.push(c);
            if c != 0 {
                rem = &rem - &self.basis[row].scale(c);
            }
        }
        if rem.is_zero() {
            Some(FpVector::new(self.p, coords).expect("prime checked"))
        } else {
            None
        }
    }

    /// All points, in the order induced by lexicographic local coordinates.
    pub fn points(&self) -> impl Iterator<Item = FpVector> + '_ {
        let map = self.parametrize();
        FpVector::iter_all(self.p, self.dim()).map(move |y| map.apply(&y))
    }

    /// An injective affine map from `F_p^dim` onto this subspace, sending
    /// `0` to the canonical offset.
    pub fn parametrize(&self) -> AffineMap {
        let rows: Vec<FpVector> = (0..self.n)
            .map(|i| {
                FpVector::new(self.p, self.basis.iter().map(|b| b.entry(i)).collect())
                    .expect("prime checked")
            })
            .collect();
        AffineMap {
            p: self.p,
            domain_dim: self.dim(),
            codomain_dim: self.n,
            matrix: rows,
            translation: self.offset.clone(),
        }
    }

    /// A linear system `C x = d` whose solution set is this subspace.
    pub fn linear_equations(&self) -> (FpMatrix, FpVector) {
        let eq_rows = if self.basis.is_empty() {
            (0..self.n)
                .map(|i| FpVector::unit(self.p, self.n, i).expect("prime checked"))
                .collect::<Vec<_>>()
        } else {
            FpMatrix::from_rows(self.p, &self.basis)
                .expect("prime checked")
                .kernel()
        };
        let d = FpVector::new(
            self.p,
            eq_rows.iter().map(|row| row.dot(&self.offset)).collect(),
        )
        .expect("prime checked");
        let c = FpMatrix::from_rows(self.p, &eq_rows).expect("prime checked");
        (c, d)
    }

    /// Intersection as a canonical subspace; `None` when empty.
    pub fn intersect(&self, other: &AffineSubspace) -> Option<AffineSubspace> {
        assert_eq!(self.p, other.p, "mixed moduli");
        assert_eq!(self.n, other.n, "mixed ambient dimensions");
        let (c1, d1) = self.linear_equations();
        let (c2, d2) = other.linear_equations();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for r in 0..c1.rows() {
            rows.push(c1.row(r));
            rhs.push(d1.entry(r));
        }
        for r in 0..c2.rows() {
            rows.push(c2.row(r));
            rhs.push(d2.entry(r));
        }
        if rows.is_empty() {
            return Some(AffineSubspace::full_space(self.p, self.n).expect("prime checked"));
        }
        let system = FpMatrix::from_rows(self.p, &rows).expect("prime checked");
        let b = FpVector::new(self.p, rhs).expect("prime checked");
        let (particular, kernel) = system.solve(&b)?;
        Some(AffineSubspace::from_span(particular, &kernel).expect("prime checked"))
    }

    /// An affine functional vanishing identically on this subspace with
    /// `h(x0) = 1`; the coefficient vector is the lexicographically first
    /// that works. Errors when `x0` lies in the subspace.
    pub fn separating_functional(&self, x0: &FpVector) -> Result<AffineFunctional> {
        if self.contains(x0) {
            return Err(Error::Precondition(
                "separating functional requested for a member point".into(),
            ));
        }
        let diff = x0 - &self.offset;
        for a in FpVector::iter_all(self.p, self.n).skip(1) {
            if self.basis.iter().any(|b| a.dot(b) != 0) {
                continue;
            }
            let at_x0 = a.dot(&diff);
            if at_x0 == 0 {
                continue;
            }
            // rescale so h(x0) = 1
            let inv = crate::ff::FpScalar::new(self.p, at_x0)?
                .inverse()
                .expect("nonzero scalar");
            let coeffs = a.scale(inv.lift());
            let constant = (self.p - coeffs.dot(&self.offset)) % self.p;
            return Ok(AffineFunctional { coeffs, constant });
        }
        unreachable!("a separating functional always exists for a non-member point")
    }

    /// Text form `p n dim ; basis rows ; offset` with comma-separated rows.
    pub fn to_text(&self) -> String {
        let rows: Vec<String> = self.basis.iter().map(|b| b.to_string()).collect();
        format!(
            "{} {} {} ; {} ; {}",
            self.p,
            self.n,
            self.dim(),
            rows.join(" , "),
            self.offset
        )
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected 3 ';'-fields in '{s}'")));
        }
        let header: Vec<u64> = parts[0]
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad header token '{t}'")))
            })
            .collect::<Result<_>>()?;
        if header.len() != 3 {
            return Err(Error::Parse("header must be 'p n dim'".into()));
        }
        let (p, n, dim) = (header[0], header[1] as usize, header[2] as usize);
        let parse_vec = |text: &str| -> Result<FpVector> {
            let entries: Vec<u64> = text
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad vector entry '{t}'")))
                })
                .collect::<Result<_>>()?;
            if entries.len() != n {
                return Err(Error::DimensionMismatch(entries.len(), n));
            }
            FpVector::new(p, entries)
        };
        let mut basis = Vec::new();
        let body = parts[1].trim();
        if !body.is_empty() {
            for row in body.split(',') {
                basis.push(parse_vec(row)?);
            }
        }
        let offset = parse_vec(parts[2])?;
        let sub = AffineSubspace::from_span(offset, &basis)?;
        if sub.dim() != dim {
            return Err(Error::Parse(format!(
                "declared dim {dim} but canonical dim is {}",
                sub.dim()
            )));
        }
        Ok(sub)
    }
}

impl fmt::Display for AffineSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl FromStr for AffineSubspace {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

/// An affine map `y ↦ M y + t : F_p^m → F_p^n` (rows of `M` stored).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    p: u64,
    domain_dim: usize,
    codomain_dim: usize,
    matrix: Vec<FpVector>,
    translation: FpVector,
}

impl AffineMap {
    pub fn new(matrix: Vec<FpVector>, translation: FpVector) -> Result<Self> {
        let p = translation.modulus();
        let codomain_dim = translation.dim();
        if matrix.len() != codomain_dim {
            return Err(Error::DimensionMismatch(matrix.len(), codomain_dim));
        }
        let domain_dim = matrix.first().map_or(0, FpVector::dim);
        for row in &matrix {
            if row.dim() != domain_dim {
                return Err(Error::DimensionMismatch(row.dim(), domain_dim));
            }
            if row.modulus() != p {
                return Err(Error::ModulusMismatch(row.modulus(), p));
            }
        }
        Ok(Self {
            p,
            domain_dim,
            codomain_dim,
            matrix,
            translation,
        })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self> {
        let rows: Result<Vec<FpVector>> = (0..n).map(|i| FpVector::unit(p, n, i)).collect();
        Self::new(rows?, FpVector::zeros(p, n)?)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn apply(&self, y: &FpVector) -> FpVector {
        assert_eq!(y.dim(), self.domain_dim, "domain dimension");
        let entries: Vec<u64> = self
            .matrix
            .iter()
            .zip(self.translation.entries())
            .map(|(row, &t)| (row.dot(y) + t) % self.p)
            .collect();
        FpVector::new(self.p, entries).expect("prime checked")
    }

    /// The image as a canonical affine subspace.
    pub fn image(&self) -> AffineSubspace {
        let cols: Vec<FpVector> = (0..self.domain_dim)
            .map(|j| {
                FpVector::new(self.p, self.matrix.iter().map(|r| r.entry(j)).collect())
                    .expect("prime checked")
            })
            .collect();
        AffineSubspace::from_span(self.translation.clone(), &cols).expect("prime checked")
    }
}

/// An affine functional `h(x) = ⟨coeffs, x⟩ + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineFunctional {
    coeffs: FpVector,
    constant: u64,
}

impl AffineFunctional {
    pub fn new(coeffs: FpVector, constant: u64) -> Self {
        let constant = constant % coeffs.modulus();
        Self { coeffs, constant }
    }

    pub fn coeffs(&self) -> &FpVector {
        &self.coeffs
    }

    pub fn constant(&self) -> u64 {
        self.constant
    }

    pub fn eval(&self, x: &FpVector) -> u64 {
        (self.coeffs.dot(x) + self.constant) % self.coeffs.modulus()
    }
}

/// Result of the constant-pattern subspace construction.
#[derive(Debug, Clone)]
pub struct PatternSubspace {
    /// The subspace on which every input membership indicator is constant.
    pub subspace: AffineSubspace,
    /// Indices (0-based) of the inputs containing the subspace.
    pub members: Vec<usize>,
    /// The lexicographically first point realizing the winning pattern.
    pub base_point: FpVector,
    /// Number of ambient points realizing the winning pattern.
    pub pattern_count: usize,
    /// The functionals cutting out the subspace, one per non-member input.
    pub functionals: Vec<(usize, AffineFunctional)>,
}

/// Find an affine subspace on which the membership pattern of the given
/// subspaces is constant: pick the most frequent indicator pattern `α`
/// (ties broken lexicographically), intersect the members, and cut by one
/// separating functional per non-member. The construction is fully
/// enumerative and the returned pattern claim is verified exhaustively.
///
/// This does not require `r ≤ n/2`; use [`pigeonhole_subspace`] when the
/// dimension guarantee `dim ≥ n − 2r` of that regime is wanted.
pub fn pattern_subspace(subspaces: &[AffineSubspace]) -> Result<PatternSubspace> {
    let first = subspaces
        .first()
        .ok_or_else(|| Error::Precondition("no subspaces given".into()))?;
    let p = first.modulus();
    let n = first.ambient_dim();
    for h in subspaces {
        if h.modulus() != p {
            return Err(Error::ModulusMismatch(h.modulus(), p));
        }
        if h.ambient_dim() != n {
            return Err(Error::DimensionMismatch(h.ambient_dim(), n));
        }
    }
    let total = pow_u64(p, n as u32);
    if total > 1 << 20 {
        return Err(Error::BudgetExceeded(format!(
            "pattern enumeration over {total} points"
        )));
    }
    let r = subspaces.len();
    // Count points per indicator pattern, tracking the first witness.
    let mut counts: std::collections::BTreeMap<Vec<bool>, (usize, usize)> =
        std::collections::BTreeMap::new();
    for (idx, x) in FpVector::iter_all(p, n).enumerate() {
        let pattern: Vec<bool> = subspaces.iter().map(|h| h.contains(&x)).collect();
        let entry = counts.entry(pattern).or_insert((0, usize::MAX));
        entry.0 += 1;
        entry.1 = entry.1.min(idx);
    }
    // Maximal count; ties prefer the lexicographically largest pattern, so
    // a lone subspace resolves to membership rather than its complement.
    let (alpha, &(pattern_count, first_idx)) = counts
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(a.0.cmp(b.0)))
        .expect("at least one pattern");
    let alpha = alpha.clone();
    let base_point = FpVector::from_index(p, n, first_idx)?;
    let members: Vec<usize> = (0..r).filter(|&i| alpha[i]).collect();
    // V = intersection of the member subspaces (full space when none).
    let mut v = AffineSubspace::full_space(p, n)?;
    for &i in &members {
        v = v
            .intersect(&subspaces[i])
            .expect("base point witnesses a nonempty intersection");
    }
    // Cut by h_i(x) = 1 for every non-member.
    let mut functionals = Vec::new();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    {
        let (c, d) = v.linear_equations();
        for rr in 0..c.rows() {
            rows.push(c.row(rr));
            rhs.push(d.entry(rr));
        }
    }
    for (i, in_pattern) in alpha.iter().enumerate() {
        if *in_pattern {
            continue;
        }
        let h = subspaces[i].separating_functional(&base_point)?;
        rows.push(h.coeffs().clone());
        rhs.push((p + 1 - h.constant() % p) % p);
        functionals.push((i, h));
    }
    let subspace = if rows.is_empty() {
        AffineSubspace::full_space(p, n)?
    } else {
        let system = FpMatrix::from_rows(p, &rows)?;
        let b = FpVector::new(p, rhs)?;
        let (particular, kernel) = system
            .solve(&b)
            .expect("base point satisfies all cut equations");
        AffineSubspace::from_span(particular, &kernel)?
    };
    // Exhaustive verification of the pattern claim on the whole subspace.
    for x in subspace.points() {
        for (i, h) in subspaces.iter().enumerate() {
            if h.contains(&x) != alpha[i] {
                return Err(Error::SelfCheck(format!(
                    "pattern violated at {x} for subspace {i}"
                )));
            }
        }
    }
    if !subspace.contains(&base_point) {
        return Err(Error::SelfCheck(
            "base point fell outside the output".into(),
        ));
    }
    Ok(PatternSubspace {
        subspace,
        members,
        base_point,
        pattern_count,
        functionals,
    })
}

/// The pigeonhole construction with its dimension guarantee: requires
/// `r ≤ n/2` and checks `dim(U) ≥ n − 2r` on the result.
pub fn pigeonhole_subspace(subspaces: &[AffineSubspace]) -> Result<PatternSubspace> {
    let first = subspaces
        .first()
        .ok_or_else(|| Error::Precondition("no subspaces given".into()))?;
    let n = first.ambient_dim();
    let r = subspaces.len();
    if 2 * r > n {
        return Err(Error::Precondition(format!(
            "pigeonhole requires r <= n/2 (r = {r}, n = {n})"
        )));
    }
    let out = pattern_subspace(subspaces)?;
    if out.subspace.dim() + 2 * r < n {
        return Err(Error::SelfCheck(format!(
            "dimension bound violated: dim = {}, n - 2r = {}",
            out.subspace.dim(),
            n as i64 - 2 * r as i64
        )));
    }
    Ok(out)
}

/// All linear subspaces of `F_p^n`, enumerated as row-reduced echelon bases
/// (each subspace appears exactly once). Returns `(basis, pivot columns)`.
pub fn enumerate_linear_subspaces(p: u64, n: usize) -> Vec<(Vec<FpVector>, Vec<usize>)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for k in 1..=n {
        for pivots in pivot_combinations(n, k) {
            // free positions: (row i, col c) with c > pivots[i], c not a pivot
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| {
                    let pivots = pivots.clone();
                    (pivots[i] + 1..n)
                        .filter(move |c| !pivots.contains(c))
                        .map(move |c| (i, c))
                })
                .collect();
            let combos = pow_u64(p, free.len() as u32);
            for code in 0..combos {
                let mut rows = vec![vec![0u64; n]; k];
                for (i, &pc) in pivots.iter().enumerate() {
                    rows[i][pc] = 1;
                }
                let mut c = code;
                for &(i, col) in &free {
                    rows[i][col] = c % p;
                    c /= p;
                }
                let basis: Vec<FpVector> = rows
                    .into_iter()
                    .map(|r| FpVector::new(p, r).expect("prime checked"))
                    .collect();
                out.push((basis, pivots.clone()));
            }
        }
    }
    out
}

fn pivot_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // advance to the next k-combination of {0, …, n−1}
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - (k - i) {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All affine subspaces of `F_p^n` in canonical form.
pub fn enumerate_affine_subspaces(p: u64, n: usize) -> Vec<AffineSubspace> {
    let mut out = Vec::new();
    for (basis, pivots) in enumerate_linear_subspaces(p, n) {
        // offsets with zeros in all pivot coordinates are exactly the
        // canonical coset representatives
        let free_cols: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let combos = pow_u64(p, free_cols.len() as u32);
        for code in 0..combos {
            let mut v = vec![0u64; n];
            let mut c = code;
            for &col in &free_cols {
                v[col] = c % p;
                c /= p;
            }
            let offset = FpVector::new(p, v).expect("prime checked");
            out.push(
                AffineSubspace::from_span(offset, &basis).expect("canonical data stays canonical"),
            );
        }
    }
    out
}
