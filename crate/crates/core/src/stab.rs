//! Stabilizer states in `(H, Q)` normal form, exhaustive small-`n`
//! catalogs, and magic states.
//!
//! A stabilizer state is a uniform-magnitude state supported on an affine
//! subspace `H ⊆ F_p^n` with phases given by a quadratic form `Q` in the
//! canonical local coordinates of `H`: for `p = 2` a nonclassical
//! polynomial of degree ≤ 2 and depth ≤ 1 (values in `(1/4)Z/Z`), for odd
//! `p` a classical quadratic. Catalog entries are canonicalized up to
//! global phase by fixing the amplitude at the lexicographically first
//! support point to `1`, which pins the shift of `Q` to zero.

use crate::cyclo::{phase, CycloNumber};
use crate::error::Error;
use crate::ff::{pow_u64, FpVector};
use crate::fourier::root_order;
use crate::poly::{enumerate_polys_up_to_degree, NonclassicalPoly};
use crate::subspace::{enumerate_affine_subspaces, AffineSubspace};
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Catalog file format version; bumping it invalidates caches.
pub const CATALOG_FORMAT_VERSION: u32 = 1;

/// A stabilizer state as `(H, Q)`: support subspace plus quadratic form in
/// the local coordinates of [`AffineSubspace::parametrize`]. The shift of
/// `Q` carries the state's phase convention; catalog states use shift 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabilizerState {
    subspace: AffineSubspace,
    form: NonclassicalPoly,
}

impl StabilizerState {
    pub fn new(subspace: AffineSubspace, form: NonclassicalPoly) -> Result<Self> {
        let p = subspace.modulus();
        if form.modulus() != p {
            return Err(Error::ModulusMismatch(form.modulus(), p));
        }
        if form.num_vars() != subspace.dim() {
            return Err(Error::DimensionMismatch(form.num_vars(), subspace.dim()));
        }
        if form.degree() > 2 {
            return Err(Error::Precondition(format!(
                "quadratic form required, got degree {}",
                form.degree()
            )));
        }
        if p == 2 && form.depth() > 1 {
            return Err(Error::Precondition(
                "p = 2 forms take values in (1/4)Z/Z (depth <= 1)".into(),
            ));
        }
        if p != 2 && !form.is_classical() {
            return Err(Error::Precondition(
                "odd-prime forms are classical quadratics".into(),
            ));
        }
        Ok(Self { subspace, form })
    }

    pub fn subspace(&self) -> &AffineSubspace {
        &self.subspace
    }

    pub fn form(&self) -> &NonclassicalPoly {
        &self.form
    }

    pub fn modulus(&self) -> u64 {
        self.subspace.modulus()
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// Materialize the amplitude table: `e(Q(y))` on the support, zero off
    /// it; the `p^{−dim/2}` normalization stays symbolic in `norm_dim`.
    pub fn amplitudes(&self) -> Result<StateVector> {
        let p = self.modulus();
        let n = self.ambient_dim();
        let m = root_order(p);
        let count = pow_u64(p, n as u32) as usize;
        let mut amps = vec![CycloNumber::zero(m); count];
        let map = self.subspace.parametrize();
        for y in FpVector::iter_all(p, self.subspace.dim()) {
            let x = map.apply(&y);
            amps[x.to_index()] = phase(&self.form.evaluate(&y)?, m)?;
        }
        StateVector::new(p, n, m, self.subspace.dim(), amps)
    }

    /// Root-of-unity exponents per point (`None` off the support); the
    /// cheap canonical key used for deduplication and rank columns.
    pub fn phase_exponents(&self) -> Result<Vec<Option<u64>>> {
        let p = self.modulus();
        let n = self.ambient_dim();
        let m = root_order(p);
        let count = pow_u64(p, n as u32) as usize;
        let mut out = vec![None; count];
        let map = self.subspace.parametrize();
        for y in FpVector::iter_all(p, self.subspace.dim()) {
            let x = map.apply(&y);
            let t = self.form.evaluate(&y)?;
            if !m.is_multiple_of(t.denominator()) {
                return Err(Error::OrderMismatch(t.denominator(), m));
            }
            out[x.to_index()] = Some(t.numerator() * (m / t.denominator()) % m);
        }
        Ok(out)
    }
}

/// An exact state vector: `p^{−norm_dim/2} Σ_x amps[x] |x⟩` with
/// cyclotomic amplitudes and the irrational normalization kept symbolic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateVector {
    p: u64,
    n: usize,
    m: u64,
    norm_dim: usize,
    amps: Vec<CycloNumber>,
}

impl StateVector {
    pub fn new(p: u64, n: usize, m: u64, norm_dim: usize, amps: Vec<CycloNumber>) -> Result<Self> {
        let expected = pow_u64(p, n as u32) as usize;
        if amps.len() != expected {
            return Err(Error::DimensionMismatch(amps.len(), expected));
        }
        for a in &amps {
            if a.order() != m {
                return Err(Error::OrderMismatch(a.order(), m));
            }
        }
        Ok(Self {
            p,
            n,
            m,
            norm_dim,
            amps,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn root_order(&self) -> u64 {
        self.m
    }

    pub fn norm_dim(&self) -> usize {
        self.norm_dim
    }

    pub fn amplitudes(&self) -> &[CycloNumber] {
        &self.amps
    }

    pub fn support_indices(&self) -> Vec<usize> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// The uniform superposition `|+⟩^{⊗n}`.
    pub fn plus_state(p: u64, n: usize) -> Result<Self> {
        let m = root_order(p);
        let count = pow_u64(p, n as u32) as usize;
        Self::new(p, n, m, n, vec![CycloNumber::one(m); count])
    }
}

/// The `n`-qudit magic state: amplitudes `e(P(x))` for the magic phase
/// polynomial, full support, normalization `p^{−n/2}`.
pub fn magic_state(p: u64, n: usize, cubic: Option<(u64, u64, u64)>) -> Result<StateVector> {
    let poly = NonclassicalPoly::magic_phase(p, n, cubic)?;
    let m = root_order(p);
    let amps: Result<Vec<CycloNumber>> = FpVector::iter_all(p, n)
        .map(|x| phase(&poly.evaluate(&x)?, m))
        .collect();
    StateVector::new(p, n, m, n, amps?)
}

/// The closed-form stabilizer-state count `p^n · Π_{k=1}^{n} (p^k + 1)`.
pub fn expected_count(p: u64, n: usize) -> u64 {
    let mut count = pow_u64(p, n as u32);
    for k in 1..=n as u32 {
        count *= pow_u64(p, k) + 1;
    }
    count
}

/// One catalog entry: the normal form plus its amplitude key.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub state: StabilizerState,
    /// `ζ_m` exponent per point, `None` off the support.
    pub exponents: Vec<Option<u64>>,
}

/// The complete catalog of stabilizer states for one `(p, n)`.
#[derive(Debug, Clone)]
pub struct Catalog {
    p: u64,
    n: usize,
    m: u64,
    entries: Vec<CatalogEntry>,
}

fn enumeration_budget(p: u64, n: usize) -> Result<()> {
    let max_n = match p {
        2 => 3,
        3 => 2,
        _ => 1,
    };
    if n > max_n {
        return Err(Error::BudgetExceeded(format!(
            "stabilizer enumeration supports n <= {max_n} for p = {p}, got n = {n}"
        )));
    }
    Ok(())
}

/// Enumerate every stabilizer state of `F_p^n` by running over all affine
/// subspaces and all zero-shift quadratic forms in their local coordinates.
/// The result is checked against the closed-form count after amplitude-level
/// deduplication; a mismatch is a bug certificate, not a recoverable error.
pub fn enumerate_stabilizers(p: u64, n: usize) -> Result<Catalog> {
    enumeration_budget(p, n)?;
    let m = root_order(p);
    let subspaces = enumerate_affine_subspaces(p, n);
    let per_subspace: Result<Vec<Vec<CatalogEntry>>> = subspaces
        .into_par_iter()
        .map(|subspace| {
            let forms = enumerate_polys_up_to_degree(p, subspace.dim(), 2)?;
            forms
                .into_iter()
                .map(|form| {
                    let state = StabilizerState::new(subspace.clone(), form)?;
                    let exponents = state.phase_exponents()?;
                    Ok(CatalogEntry { state, exponents })
                })
                .collect()
        })
        .collect();
    let entries: Vec<CatalogEntry> = per_subspace?.into_iter().flatten().collect();
    // Amplitude-level deduplication: distinct (H, Q) must give distinct
    // states once the global phase is canonicalized.
    let mut seen: HashSet<&[Option<u64>]> = HashSet::with_capacity(entries.len());
    for entry in &entries {
        if !seen.insert(&entry.exponents) {
            return Err(Error::SelfCheck(format!(
                "duplicate state in catalog: {}",
                entry.state.subspace().to_text()
            )));
        }
    }
    let expected = expected_count(p, n);
    if entries.len() as u64 != expected {
        return Err(Error::SelfCheck(format!(
            "catalog count {} does not match the formula value {expected}",
            entries.len()
        )));
    }
    Ok(Catalog { p, n, m, entries })
}

impl Catalog {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn root_order(&self) -> u64 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Materialize one entry's state vector.
    pub fn state_vector(&self, index: usize) -> Result<StateVector> {
        self.entries[index].state.amplitudes()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = CatalogFile {
            format_version: CATALOG_FORMAT_VERSION,
            p: self.p,
            n: self.n,
            count: self.entries.len() as u64,
            states: self
                .entries
                .iter()
                .map(|e| CatalogFileState {
                    subspace: e.state.subspace().to_text(),
                    q_terms: e.state.form().to_text(),
                })
                .collect(),
        };
        write_atomically(path, &serde_json::to_vec_pretty(&file)?)
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        let data = std::fs::read(path)?;
        let file: CatalogFile = serde_json::from_slice(&data)?;
        if file.format_version != CATALOG_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "catalog format version {} (supported: {CATALOG_FORMAT_VERSION})",
                file.format_version
            )));
        }
        let entries: Result<Vec<CatalogEntry>> = file
            .states
            .iter()
            .map(|s| {
                let state = StabilizerState::new(
                    AffineSubspace::from_text(&s.subspace)?,
                    NonclassicalPoly::from_text(&s.q_terms)?,
                )?;
                let exponents = state.phase_exponents()?;
                Ok(CatalogEntry { state, exponents })
            })
            .collect();
        let catalog = Catalog {
            p: file.p,
            n: file.n,
            m: root_order(file.p),
            entries: entries?,
        };
        // never trust a cache file without re-verifying the count formula
        let expected = expected_count(catalog.p, catalog.n);
        if catalog.entries.len() as u64 != expected || file.count != expected {
            return Err(Error::SelfCheck(format!(
                "cached catalog count {} does not match the formula value {expected}",
                catalog.entries.len()
            )));
        }
        Ok(catalog)
    }

    /// Load a cached catalog when available and valid, else enumerate (and
    /// cache when a directory is given).
    pub fn load_or_build(p: u64, n: usize, cache_dir: Option<&Path>) -> Result<Catalog> {
        if let Some(dir) = cache_dir {
            let path = catalog_cache_path(dir, p, n);
            if path.exists() {
                if let Ok(catalog) = Catalog::load(&path) {
                    if catalog.p == p && catalog.n == n {
                        return Ok(catalog);
                    }
                }
            }
            let catalog = enumerate_stabilizers(p, n)?;
            std::fs::create_dir_all(dir)?;
            catalog.save(&path)?;
            Ok(catalog)
        } else {
            enumerate_stabilizers(p, n)
        }
    }
}

pub fn catalog_cache_path(dir: &Path, p: u64, n: usize) -> PathBuf {
    dir.join(format!("catalog-v{CATALOG_FORMAT_VERSION}-p{p}-n{n}.json"))
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    format_version: u32,
    p: u64,
    n: usize,
    count: u64,
    states: Vec<CatalogFileState>,
}

#[derive(Serialize, Deserialize)]
struct CatalogFileState {
    subspace: String,
    q_terms: String,
}

fn write_atomically(path: &Path, data: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .and_then(|s| s.to_str())
            .unwrap_or("catalog"),
        std::process::id()
    ));
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(data)?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Does `v` equal some catalog state up to a global phase? The supports
/// must coincide, the pointwise amplitude quotient must be constant, and
/// that quotient must be a root of unity (scaled by `p^{Δ/2}` when the
/// symbolic normalizations differ by `Δ`, which can only match for even Δ
/// since amplitudes live in `Q(ζ_m)`).
pub fn is_stabilizer(v: &StateVector, catalog: &Catalog) -> Result<bool> {
    if v.modulus() != catalog.p {
        return Err(Error::ModulusMismatch(v.modulus(), catalog.p));
    }
    if v.num_qudits() != catalog.n {
        return Err(Error::DimensionMismatch(v.num_qudits(), catalog.n));
    }
    if v.root_order() != catalog.m {
        return Err(Error::OrderMismatch(v.root_order(), catalog.m));
    }
    let support = v.support_indices();
    'entries: for entry in &catalog.entries {
        let entry_support: Vec<usize> = entry
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some())
            .map(|(i, _)| i)
            .collect();
        if support != entry_support {
            continue;
        }
        let Some(&first) = support.first() else {
            continue;
        };
        let lambda = v.amps[first]
            .mul(&CycloNumber::root_of_unity(catalog.m, entry.exponents[first].unwrap()).conj());
        for &idx in &support[1..] {
            let expected = lambda.mul(&CycloNumber::root_of_unity(
                catalog.m,
                entry.exponents[idx].unwrap(),
            ));
            if v.amps[idx] != expected {
                continue 'entries;
            }
        }
        let entry_dim = entry.state.subspace().dim();
        if v.norm_dim() == entry_dim {
            if lambda.as_root_of_unity().is_some() {
                return Ok(true);
            }
        } else {
            let delta = v.norm_dim() as i64 - entry_dim as i64;
            let scale = if delta >= 0 {
                CycloNumber::from_integer(catalog.m, pow_u64(catalog.p, delta as u32) as i64)
            } else {
                CycloNumber::from_rational(
                    catalog.m,
                    num_rational::BigRational::new(
                        1.into(),
                        pow_u64(catalog.p, (-delta) as u32).into(),
                    ),
                )
            };
            if lambda.norm_sq() == scale {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
