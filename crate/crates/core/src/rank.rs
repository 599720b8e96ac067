//! Rank computations with re-verifiable certificates: exact 2-rank of
//! quadratics, correlation-based rank lower bounds, exact Fourier rank over
//! finite phase dictionaries, exact stabilizer rank, the restriction
//! behaviour of rank, the magic-state lower-bound pipeline, and the
//! Chevalley–Warning root-counting machinery.
//!
//! Every certificate carries enough data for an independent one-pass
//! re-verification ([`verify_certificate`]); the exhaustive searches refuse
//! (with an explicit budget error) rather than sample when a scale is out
//! of reach. There are no tolerances anywhere: linear algebra runs over
//! `Q(ζ_m)` exactly and inequality checks use certified intervals on exact
//! values.

use crate::cyclo::{phase, solve_linear, CycloNumber};
use crate::error::Error;
use crate::ff::{pow_u64, FpVector};
use crate::fourier::{root_order, scan_table, PhaseTable, ScanReport};
use crate::interval::real_cmp;
use crate::poly::{enumerate_polys_up_to_degree, FunctionTable, NonclassicalPoly};
use crate::stab::{magic_state, Catalog, StabilizerState, StateVector};
use crate::subspace::{pattern_subspace, AffineSubspace};
use crate::torus::TorusValue;
use crate::Result;
use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Subset-search attempt cap shared by the exact rank searches.
const SUBSET_BUDGET: u128 = 1 << 21;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `1 + ⌈(d−1)/(p−1)⌉`, the exponent in the rank→correlation threshold
/// `p^{−(1+⌈(d−1)/(p−1)⌉)·r}`.
pub fn correlation_exponent(p: u64, d: usize) -> u32 {
    1 + ((d as u64 - 1 + p - 2) / (p - 1)) as u32
}

/// A self-contained, re-verifiable witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RankCertificate {
    /// `P` is constant on the joint level sets of `rank` linear
    /// functionals; `lookup` materializes the combining function.
    #[serde(rename = "exact-rank2")]
    ExactRank2 {
        p: u64,
        n: usize,
        poly: String,
        rank: usize,
        /// Coefficient vectors of the chosen projective functionals.
        functionals: Vec<Vec<u64>>,
        /// Level-set key (functional values) to `(numerator, depth)`.
        lookup: Vec<(Vec<u64>, (u64, u32))>,
    },
    /// A certified strict inequality `max_Q |⟨e(P),e(Q)⟩|² < threshold²`,
    /// proving `rank_d(P) > r`.
    #[serde(rename = "correlation-lower-bound")]
    CorrelationBound {
        p: u64,
        n: usize,
        d: usize,
        r: usize,
        poly: String,
        /// `p^{−(1+⌈(d−1)/(p−1)⌉)·r}`, squared, as an exact rational.
        threshold_sq: String,
        scan_max_sq: CycloNumber,
        certified: bool,
    },
    /// An exact decomposition `f = Σ c_i e(Q_i)` over a degree-`(d−1)`
    /// dictionary.
    #[serde(rename = "frank")]
    Frank {
        p: u64,
        n: usize,
        m: u64,
        d: usize,
        rank: usize,
        target_values: Vec<CycloNumber>,
        components: Vec<FrankComponent>,
    },
    /// An exact decomposition of a state into stabilizer states.
    #[serde(rename = "stab-rank")]
    StabRank {
        p: u64,
        n: usize,
        m: u64,
        rank: usize,
        target_amplitudes: Vec<CycloNumber>,
        terms: Vec<DecompositionTerm>,
        /// Exhaustive impossibility record: subsets checked per rank below.
        refuted: Vec<RefutedLevel>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrankComponent {
    pub poly: String,
    pub coeff: CycloNumber,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub subspace: String,
    pub q_terms: String,
    pub coeff: CycloNumber,
}

impl DecompositionTerm {
    pub fn state(&self) -> Result<StabilizerState> {
        StabilizerState::new(
            AffineSubspace::from_text(&self.subspace)?,
            NonclassicalPoly::from_text(&self.q_terms)?,
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RefutedLevel {
    pub rank: usize,
    pub subsets_checked: u64,
}

/// Projective representatives of the nonzero linear functionals on
/// `F_p^n`: first nonzero coordinate normalized to 1, lexicographic order.
pub fn projective_functionals(p: u64, n: usize) -> Vec<FpVector> {
    FpVector::iter_all(p, n)
        .filter(|a| !a.is_zero() && a.entries().iter().find(|&&e| e != 0) == Some(&1))
        .collect()
}

/// Exact 2-rank of a polynomial of degree ≤ 2: the minimal number of
/// linear functionals whose joint level sets keep `P` constant, by subset
/// search in increasing cardinality. Shifted classical linear forms are
/// the entire degree-≤1 dictionary, and neither shifts nor scalings change
/// level sets, so projective representatives suffice.
pub fn exact_rank2(poly: &NonclassicalPoly) -> Result<(usize, RankCertificate)> {
    if poly.degree() > 2 {
        return Err(Error::Precondition(format!(
            "exact_rank2 requires degree <= 2, got {}",
            poly.degree()
        )));
    }
    let p = poly.modulus();
    let n = poly.num_vars();
    let functionals = projective_functionals(p, n);
    if functionals.len() > 15 {
        return Err(Error::BudgetExceeded(format!(
            "{} projective functionals (cap 15)",
            functionals.len()
        )));
    }
    let table = poly.evaluate_table();
    let points: Vec<FpVector> = FpVector::iter_all(p, n).collect();
    for r in 0..=functionals.len() {
        for subset in (0..functionals.len()).combinations(r) {
            let mut lookup: BTreeMap<Vec<u64>, TorusValue> = BTreeMap::new();
            let mut consistent = true;
            for x in &points {
                let key: Vec<u64> = subset.iter().map(|&i| functionals[i].dot(x)).collect();
                let value = table.value_at(x);
                match lookup.get(&key) {
                    Some(&seen) if seen != value => {
                        consistent = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        lookup.insert(key, value);
                    }
                }
            }
            if consistent {
                let cert = RankCertificate::ExactRank2 {
                    p,
                    n,
                    poly: poly.to_text(),
                    rank: r,
                    functionals: subset
                        .iter()
                        .map(|&i| functionals[i].entries().to_vec())
                        .collect(),
                    lookup: lookup
                        .into_iter()
                        .map(|(k, v)| (k, (v.numerator(), v.depth())))
                        .collect(),
                };
                return Ok((r, cert));
            }
        }
    }
    unreachable!("the full functional set always separates points")
}

/// Report of a correlation-based rank lower bound: `certified` means the
/// exhaustive scan maximum is strictly below the threshold, proving
/// `rank_d(P) > r`.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationLbReport {
    pub d: usize,
    pub r: usize,
    pub exponent: u32,
    pub threshold_sq: String,
    pub scan: ScanReport,
    pub certified: bool,
    pub certificate: RankCertificate,
}

pub fn rank_lb_by_correlation(
    poly: &NonclassicalPoly,
    d: usize,
    r: usize,
    bits: u32,
) -> Result<CorrelationLbReport> {
    if d < 2 {
        return Err(Error::Precondition("rank lower bound needs d >= 2".into()));
    }
    let p = poly.modulus();
    let m = root_order(p);
    let f = PhaseTable::from_poly(poly, m)?;
    let scan = scan_table(&f, d - 1, bits)?;
    let exponent = correlation_exponent(p, d);
    let threshold_sq = BigRational::new(
        BigInt::from(1),
        BigInt::from(p).pow(2 * exponent * r as u32),
    );
    let certified = real_cmp(
        &scan.max_corr_sq,
        &CycloNumber::from_rational(m, threshold_sq.clone()),
        bits,
    )? == Ordering::Less;
    let certificate = RankCertificate::CorrelationBound {
        p,
        n: poly.num_vars(),
        d,
        r,
        poly: poly.to_text(),
        threshold_sq: threshold_sq.to_string(),
        scan_max_sq: scan.max_corr_sq.clone(),
        certified,
    };
    Ok(CorrelationLbReport {
        d,
        r,
        exponent,
        threshold_sq: threshold_sq.to_string(),
        scan,
        certified,
        certificate,
    })
}

/// Outcome of an exact minimal-decomposition search.
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found {
        rank: usize,
        certificate: RankCertificate,
    },
    Exhausted {
        r_max: usize,
        subsets_checked: u64,
    },
}

impl SearchOutcome {
    pub fn rank(&self) -> Option<usize> {
        match self {
            SearchOutcome::Found { rank, .. } => Some(*rank),
            SearchOutcome::Exhausted { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&RankCertificate> {
        match self {
            SearchOutcome::Found { certificate, .. } => Some(certificate),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// Exact degree-`d` Fourier rank of a phase table: the minimal `r ≤ r_max`
/// such that `f` lies in the span of `r` dictionary functions `e(Q_i)`
/// with `deg Q_i ≤ d−1`, by subset search with exact solvability tests.
/// Requesting more than the budget allows is an error; exhausting `r_max`
/// is an explicit outcome, not a failure.
pub fn frank_exact(f: &PhaseTable, d: usize, r_max: usize) -> Result<SearchOutcome> {
    if d < 2 {
        return Err(Error::Precondition("frank needs d >= 2".into()));
    }
    let dictionary = enumerate_polys_up_to_degree(f.modulus(), f.num_vars(), d - 1)?;
    frank_exact_over(f, &dictionary, d, r_max)
}

/// The subset-search engine behind [`frank_exact`], over an explicit
/// dictionary of phase polynomials (each of degree ≤ `d−1`, checked).
pub fn frank_exact_over(
    f: &PhaseTable,
    dictionary: &[NonclassicalPoly],
    d: usize,
    r_max: usize,
) -> Result<SearchOutcome> {
    let p = f.modulus();
    let n = f.num_vars();
    let m = f.root_order();
    for q in dictionary {
        if q.degree() > d - 1 {
            return Err(Error::Precondition(format!(
                "dictionary entry of degree {} exceeds {}",
                q.degree(),
                d - 1
            )));
        }
    }
    if dictionary.len() > 64 || pow_u64(p, n as u32) > 32 {
        return Err(Error::BudgetExceeded(format!(
            "frank dictionary of {} functions over {} points",
            dictionary.len(),
            pow_u64(p, n as u32)
        )));
    }
    let columns: Result<Vec<Vec<CycloNumber>>> = dictionary
        .iter()
        .map(|q| Ok(PhaseTable::from_poly(q, m)?.values().to_vec()))
        .collect();
    let columns = columns?;
    let target = f.values().to_vec();
    let mut checked: u64 = 0;
    for r in 0..=r_max.min(dictionary.len()) {
        if binomial(dictionary.len() as u128, r as u128) + checked as u128 > SUBSET_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "frank subset search at r = {r} exceeds {SUBSET_BUDGET} attempts"
            )));
        }
        for subset in (0..dictionary.len()).combinations(r) {
            checked += 1;
            let cols: Vec<Vec<CycloNumber>> = subset.iter().map(|&i| columns[i].clone()).collect();
            if let Some(coeffs) = solve_linear(&cols, &target) {
                let certificate = RankCertificate::Frank {
                    p,
                    n,
                    m,
                    d,
                    rank: r,
                    target_values: target.clone(),
                    components: subset
                        .iter()
                        .zip(coeffs)
                        .map(|(&i, coeff)| FrankComponent {
                            poly: dictionary[i].to_text(),
                            coeff,
                        })
                        .collect(),
                };
                return Ok(SearchOutcome::Found {
                    rank: r,
                    certificate,
                });
            }
        }
    }
    Ok(SearchOutcome::Exhausted {
        r_max,
        subsets_checked: checked,
    })
}

/// Number of nonzero Fourier coefficients of `f`; equals the degree-2
/// Fourier rank.
pub fn fourier_sparsity(f: &PhaseTable) -> Result<usize> {
    let hat = f.fourier_transform()?;
    Ok(hat.values().iter().filter(|v| !v.is_zero()).count())
}

/// Exact stabilizer rank: the minimal `r ≤ r_max` such that the target is
/// a linear combination of `r` catalog states, by subset search in
/// increasing `r` with lexicographic index order. The `p^{−dim/2}`
/// normalizations are dropped on both sides (they fold into the
/// coefficients), so the solve runs on the unnormalized phase columns.
/// Candidate sets whose supports cannot cover the target are skipped.
pub fn stab_rank_exact(v: &StateVector, catalog: &Catalog, r_max: usize) -> Result<SearchOutcome> {
    if v.modulus() != catalog.modulus() {
        return Err(Error::ModulusMismatch(v.modulus(), catalog.modulus()));
    }
    if v.num_qudits() != catalog.num_qudits() {
        return Err(Error::DimensionMismatch(
            v.num_qudits(),
            catalog.num_qudits(),
        ));
    }
    if v.root_order() != catalog.root_order() {
        return Err(Error::OrderMismatch(v.root_order(), catalog.root_order()));
    }
    let point_count = pow_u64(v.modulus(), v.num_qudits() as u32);
    if point_count > 64 {
        return Err(Error::BudgetExceeded(format!(
            "stabilizer-rank search over {point_count} basis states"
        )));
    }
    let m = catalog.root_order();
    let target = v.amplitudes().to_vec();
    let target_mask: u64 = target
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .fold(0u64, |mask, (i, _)| mask | 1 << i);
    let columns: Vec<(u64, Vec<CycloNumber>)> = catalog
        .entries()
        .iter()
        .map(|entry| {
            let mask = entry
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, e)| e.is_some())
                .fold(0u64, |m2, (i, _)| m2 | 1 << i);
            let col: Vec<CycloNumber> = entry
                .exponents
                .iter()
                .map(|e| match e {
                    Some(exp) => CycloNumber::root_of_unity(m, *exp),
                    None => CycloNumber::zero(m),
                })
                .collect();
            (mask, col)
        })
        .collect();
    let mut refuted = Vec::new();
    let mut total_checked: u128 = 0;
    for r in 0..=r_max {
        let level_size = binomial(catalog.len() as u128, r as u128);
        if total_checked + level_size > SUBSET_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "stabilizer-rank search at r = {r} needs {level_size} subsets"
            )));
        }
        let mut level_checked: u64 = 0;
        for subset in (0..catalog.len()).combinations(r) {
            level_checked += 1;
            let union = subset.iter().fold(0u64, |acc, &i| acc | columns[i].0);
            if union & target_mask != target_mask {
                continue; // supports cannot cover the target
            }
            let cols: Vec<Vec<CycloNumber>> =
                subset.iter().map(|&i| columns[i].1.clone()).collect();
            if let Some(coeffs) = solve_linear(&cols, &target) {
                let certificate = RankCertificate::StabRank {
                    p: v.modulus(),
                    n: v.num_qudits(),
                    m,
                    rank: r,
                    target_amplitudes: target,
                    terms: subset
                        .iter()
                        .zip(coeffs)
                        .map(|(&i, coeff)| {
                            let state = &catalog.entries()[i].state;
                            DecompositionTerm {
                                subspace: state.subspace().to_text(),
                                q_terms: state.form().to_text(),
                                coeff,
                            }
                        })
                        .collect(),
                    refuted,
                };
                return Ok(SearchOutcome::Found {
                    rank: r,
                    certificate,
                });
            }
        }
        total_checked += level_checked as u128;
        refuted.push(RefutedLevel {
            rank: r,
            subsets_checked: level_checked,
        });
    }
    Ok(SearchOutcome::Exhausted {
        r_max,
        subsets_checked: total_checked as u64,
    })
}

/// Behaviour of the 2-rank under restriction to an affine subspace: when
/// `rank(P) > p·k + 1` (with `k` the codimension), the restriction must
/// keep the degree and lose at most `p·k` of the rank.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictionReport {
    pub rank: usize,
    pub codim: usize,
    pub restricted_rank: usize,
    pub degree: usize,
    pub restricted_degree: usize,
    pub hypothesis_met: bool,
    /// `Some(true/false)` only when the hypothesis holds.
    pub conclusion_holds: Option<bool>,
}

pub fn restriction_rank_check(
    poly: &NonclassicalPoly,
    subspace: &AffineSubspace,
) -> Result<RestrictionReport> {
    if subspace.modulus() != poly.modulus() {
        return Err(Error::ModulusMismatch(subspace.modulus(), poly.modulus()));
    }
    if subspace.ambient_dim() != poly.num_vars() {
        return Err(Error::DimensionMismatch(
            subspace.ambient_dim(),
            poly.num_vars(),
        ));
    }
    let p = poly.modulus();
    let (rank, _) = exact_rank2(poly)?;
    let codim = subspace.codim();
    let restricted = poly
        .restrict(&subspace.parametrize())?
        .interpolate(poly.degree())?;
    let (restricted_rank, _) = exact_rank2(&restricted)?;
    let degree = poly.degree();
    let restricted_degree = restricted.degree();
    let hypothesis_met = rank > p as usize * codim + 1;
    let conclusion_holds = hypothesis_met
        .then(|| restricted_degree == degree && restricted_rank + p as usize * codim >= rank);
    Ok(RestrictionReport {
        rank,
        codim,
        restricted_rank,
        degree,
        restricted_degree,
        hypothesis_met,
        conclusion_holds,
    })
}

/// A stabilizer decomposition in the unnormalized phase convention:
/// `target_amps(x) = Σ_i coeff_i · e(Q_i(x)) · 1_{H_i}(x)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub p: u64,
    pub n: usize,
    pub m: u64,
    pub terms: Vec<DecompositionTerm>,
}

impl Decomposition {
    pub fn from_certificate(cert: &RankCertificate) -> Result<Self> {
        match cert {
            RankCertificate::StabRank { p, n, m, terms, .. } => Ok(Self {
                p: *p,
                n: *n,
                m: *m,
                terms: terms.clone(),
            }),
            _ => Err(Error::Precondition(
                "only stabilizer-rank certificates describe decompositions".into(),
            )),
        }
    }
}

/// Full report of the magic-state rank pipeline: validation of the input
/// decomposition, the constant-pattern subspace, the exact restricted
/// identity, the quadratic scan of the restricted phase polynomial, and
/// the resulting lower-bound chain.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub p: u64,
    pub n: usize,
    /// Number of terms in the decomposition.
    pub r: usize,
    pub subspaces: Vec<String>,
    /// Indices of the terms surviving on the subspace.
    pub surviving: Vec<usize>,
    pub subspace_u: String,
    pub dim_u: usize,
    pub n_minus_2r: i64,
    /// Whether `r ≤ n/2`, the regime with the dimension guarantee.
    pub claim_precondition_met: bool,
    /// `dim(U) ≥ n − 2r`; asserted only in the guaranteed regime.
    pub dim_bound_holds: Option<bool>,
    pub restricted_identity_ok: bool,
    pub scan: ScanReport,
    pub correlation_exponent: u32,
    /// Largest `R` with the scan maximum strictly below `p^{−exp·R}` plus
    /// one; a certified lower bound for the 3-rank of the restriction.
    pub rank_lower_bound: usize,
    pub s_size: usize,
    /// `|S| ≥ rank lower bound` — the chain that drives the main theorem.
    pub chain_consistent: bool,
}

/// Run the rank pipeline on a decomposition of the `(p, n)` magic state.
///
/// Steps: verify the decomposition reproduces the magic amplitudes
/// pointwise; build the constant-membership-pattern subspace `U` for the
/// supports; restrict the identity to `U` (only surviving terms remain)
/// and re-verify it pointwise exactly; scan the restricted phase
/// polynomial against all quadratics; translate the scan maximum into a
/// rank lower bound and check `|S|` against it.
pub fn magic_rank_pipeline(decomp: &Decomposition, bits: u32) -> Result<PipelineReport> {
    let (p, n, m) = (decomp.p, decomp.n, decomp.m);
    if m != root_order(p) {
        return Err(Error::OrderMismatch(m, root_order(p)));
    }
    let target = magic_state(p, n, None)?;
    let states: Result<Vec<StabilizerState>> =
        decomp.terms.iter().map(DecompositionTerm::state).collect();
    let states = states?;
    let vectors: Result<Vec<StateVector>> =
        states.iter().map(StabilizerState::amplitudes).collect();
    let vectors = vectors?;
    // Validate the decomposition: Σ c_i e(Q_i(x)) 1_{H_i}(x) = e(P(x)).
    for x in FpVector::iter_all(p, n) {
        let idx = x.to_index();
        let mut acc = CycloNumber::zero(m);
        for (term, vec) in decomp.terms.iter().zip(&vectors) {
            acc = acc.add(&term.coeff.mul(&vec.amplitudes()[idx]));
        }
        if acc != target.amplitudes()[idx] {
            return Err(Error::InvalidDecomposition(format!(
                "amplitude mismatch at basis point {x}"
            )));
        }
    }
    let r = decomp.terms.len();
    let supports: Vec<AffineSubspace> = states.iter().map(|s| s.subspace().clone()).collect();
    let pattern = pattern_subspace(&supports)?;
    let u = &pattern.subspace;
    let claim_precondition_met = 2 * r <= n;
    let dim_bound_holds = claim_precondition_met.then(|| u.dim() as i64 >= n as i64 - 2 * r as i64);
    // Restrict everything to U through its canonical parametrization.
    let phase_poly = NonclassicalPoly::magic_phase(p, n, None)?;
    let map = u.parametrize();
    let restricted = PhaseTable::from_table(&phase_poly.restrict(&map)?, m)?;
    let mut restricted_identity_ok = true;
    for y in FpVector::iter_all(p, u.dim()) {
        let x = map.apply(&y);
        let mut acc = CycloNumber::zero(m);
        for &i in &pattern.members {
            let z = states[i]
                .subspace()
                .local_coordinates(&x)
                .ok_or_else(|| Error::SelfCheck("pattern member misses a point of U".into()))?;
            let q_val = states[i].form().evaluate(&z)?;
            acc = acc.add(&decomp.terms[i].coeff.mul(&phase(&q_val, m)?));
        }
        if acc != *restricted.value_at(&y) {
            restricted_identity_ok = false;
        }
    }
    if !restricted_identity_ok {
        return Err(Error::SelfCheck(
            "restricted identity failed pointwise (bug certificate)".into(),
        ));
    }
    let scan = scan_table(&restricted, 2, bits)?;
    let exponent = correlation_exponent(p, 3);
    let mut rank_lower_bound = 0usize;
    loop {
        let threshold = BigRational::new(
            BigInt::from(1),
            BigInt::from(p).pow(2 * exponent * rank_lower_bound as u32),
        );
        if real_cmp(
            &scan.max_corr_sq,
            &CycloNumber::from_rational(m, threshold),
            bits,
        )? == Ordering::Less
        {
            rank_lower_bound += 1;
        } else {
            break;
        }
        if rank_lower_bound > 64 {
            return Err(Error::SelfCheck("runaway rank lower bound".into()));
        }
    }
    let s_size = pattern.members.len();
    let chain_consistent = s_size >= rank_lower_bound;
    Ok(PipelineReport {
        p,
        n,
        r,
        subspaces: supports.iter().map(AffineSubspace::to_text).collect(),
        surviving: pattern.members.clone(),
        subspace_u: u.to_text(),
        dim_u: u.dim(),
        n_minus_2r: n as i64 - 2 * r as i64,
        claim_precondition_met,
        dim_bound_holds,
        restricted_identity_ok,
        scan,
        correlation_exponent: exponent,
        rank_lower_bound,
        s_size,
        chain_consistent,
    })
}

/// `NOR(x) = |（1+x_1)⋯(1+x_n)|/2`: the classical polynomial over `F_2`
/// taking the value 1/2 exactly at the all-zeros point. Expanding the
/// product gives shift 1/2 plus every nonempty square-free monomial.
pub fn nor_poly(n: usize) -> Result<NonclassicalPoly> {
    let mut terms = BTreeMap::new();
    for mask in 1u64..(1 << n) {
        let exps: Vec<u8> = (0..n).map(|t| ((mask >> (n - 1 - t)) & 1) as u8).collect();
        terms.insert((0u32, exps), 1u64);
    }
    NonclassicalPoly::new(2, n, TorusValue::new(2, 1, 0)?, terms)
}

/// `AND(x) = |x_1⋯x_n|/2`: value 1/2 exactly at the all-ones point.
pub fn and_poly(n: usize) -> Result<NonclassicalPoly> {
    NonclassicalPoly::monomial(2, n, vec![1; n], 0, 1)
}

/// Exact common-root count of classical polynomials, the Chevalley–Warning
/// divisibility flag (asserted only when `Σ deg < n`), and a nonzero
/// common root when one is guaranteed.
#[derive(Debug, Clone, Serialize)]
pub struct CwReport {
    pub root_count: u64,
    pub degree_sum: usize,
    pub degree_condition: bool,
    /// `Some(root_count % p == 0)` when `Σ deg < n`, else `None`.
    pub divisibility: Option<bool>,
    /// Lexicographically first nonzero common root, when all polynomials
    /// vanish at 0 and the degree condition holds.
    pub second_root: Option<Vec<u64>>,
}

pub fn chevalley_warning_check(polys: &[NonclassicalPoly]) -> Result<CwReport> {
    let first = polys
        .first()
        .ok_or_else(|| Error::Precondition("no polynomials given".into()))?;
    let p = first.modulus();
    let n = first.num_vars();
    for q in polys {
        if q.modulus() != p {
            return Err(Error::ModulusMismatch(q.modulus(), p));
        }
        if q.num_vars() != n {
            return Err(Error::DimensionMismatch(q.num_vars(), n));
        }
        if !q.is_classical() || q.shift().depth() != 0 {
            return Err(Error::Precondition(
                "Chevalley–Warning applies to classical polynomials".into(),
            ));
        }
    }
    let tables: Vec<FunctionTable> = polys.iter().map(NonclassicalPoly::evaluate_table).collect();
    let mut root_count = 0u64;
    let mut second_root = None;
    let mut zero_is_root = true;
    for x in FpVector::iter_all(p, n) {
        let is_root = tables.iter().all(|t| t.value_at(&x).is_zero());
        if x.is_zero() {
            zero_is_root = is_root;
        }
        if is_root {
            root_count += 1;
            if !x.is_zero() && second_root.is_none() {
                second_root = Some(x.entries().to_vec());
            }
        }
    }
    let degree_sum: usize = polys.iter().map(NonclassicalPoly::degree).sum();
    let degree_condition = degree_sum < n;
    let divisibility = degree_condition.then(|| root_count.is_multiple_of(p));
    let second_root = (degree_condition && zero_is_root)
        .then_some(second_root)
        .flatten();
    Ok(CwReport {
        root_count,
        degree_sum,
        degree_condition,
        divisibility,
        second_root,
    })
}

/// Report of the NOR lower-bound mechanism at parameters `(n, d, r)`: for
/// every (or a seeded sample of) tuple of `r` classical degree-`(d−1)`
/// polynomials vanishing at 0, a second common root exists — so no such
/// tuple can compute NOR through any combining function, NOR being the
/// unique separator of 0. The report certifies exactly this property.
#[derive(Debug, Clone, Serialize)]
pub struct NorReport {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub mode: String,
    pub tuples_checked: u64,
    pub all_have_second_root: bool,
    pub rank_bound_implied: String,
}

pub fn nor_rank_theorem_check(
    n: usize,
    d: usize,
    r: usize,
    sample: Option<(u64, u64)>,
) -> Result<NorReport> {
    if d < 2 {
        return Err(Error::Precondition("nor check needs d >= 2".into()));
    }
    if r * (d - 1) >= n {
        return Err(Error::Precondition(format!(
            "mechanism applies when r(d−1) < n, got r = {r}, d = {d}, n = {n}"
        )));
    }
    let slots = classical_slots(2, n, d - 1);
    let mut tuples_checked = 0u64;
    let mut all_have_second_root = true;
    let mut check_tuple = |polys: &[NonclassicalPoly]| -> Result<()> {
        let report = chevalley_warning_check(polys)?;
        tuples_checked += 1;
        if report.second_root.is_none() {
            all_have_second_root = false;
        }
        Ok(())
    };
    let mode = match sample {
        None => {
            let dict_size = 1u128 << slots.len().min(120);
            let total = binomial(dict_size, r as u128);
            if slots.len() > 20 || total > SUBSET_BUDGET {
                return Err(Error::BudgetExceeded(format!(
                    "{total} tuples at r = {r}; pass a sample budget"
                )));
            }
            let dictionary: Vec<NonclassicalPoly> = (0..dict_size as u64)
                .map(|code| classical_poly_from_code(2, n, &slots, code))
                .collect::<Result<_>>()?;
            for tuple in (0..dictionary.len()).combinations(r) {
                let polys: Vec<NonclassicalPoly> =
                    tuple.iter().map(|&i| dictionary[i].clone()).collect();
                check_tuple(&polys)?;
            }
            "exhaustive".to_string()
        }
        Some((count, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let polys: Vec<NonclassicalPoly> = (0..r)
                    .map(|_| random_classical_poly(&mut rng, 2, n, d - 1, true))
                    .collect::<Result<_>>()?;
                check_tuple(&polys)?;
            }
            format!("sampled (seed {seed})")
        }
    };
    Ok(NorReport {
        n,
        d,
        r,
        mode,
        tuples_checked,
        all_have_second_root,
        rank_bound_implied: format!("no {r}-tuple of degree-{} polynomials computes NOR", d - 1),
    })
}

/// The level-0 (classical) term slots of degree at most `d`.
fn classical_slots(p: u64, n: usize, d: usize) -> Vec<crate::poly::TermKey> {
    crate::poly::degree_slots(p, n, d)
        .into_iter()
        .filter(|(j, _)| *j == 0)
        .collect()
}

fn classical_poly_from_code(
    p: u64,
    n: usize,
    slots: &[crate::poly::TermKey],
    code: u64,
) -> Result<NonclassicalPoly> {
    let mut terms = BTreeMap::new();
    let mut c = code;
    for slot in slots.iter().rev() {
        let coeff = c % p;
        c /= p;
        if coeff != 0 {
            terms.insert(slot.clone(), coeff);
        }
    }
    NonclassicalPoly::new(p, n, TorusValue::zero(p)?, terms)
}

/// A uniformly random classical polynomial of degree ≤ `d` (zero shift when
/// `vanish_at_zero`, otherwise a random depth-0 shift).
pub fn random_classical_poly(
    rng: &mut ChaCha8Rng,
    p: u64,
    n: usize,
    d: usize,
    vanish_at_zero: bool,
) -> Result<NonclassicalPoly> {
    let slots = classical_slots(p, n, d);
    let mut terms = BTreeMap::new();
    for slot in slots {
        let coeff = rng.random_range(0..p);
        if coeff != 0 {
            terms.insert(slot, coeff);
        }
    }
    let shift = if vanish_at_zero {
        TorusValue::zero(p)?
    } else {
        TorusValue::new(p, rng.random_range(0..p), 0)?
    };
    NonclassicalPoly::new(p, n, shift, terms)
}

/// One-pass re-verification of a certificate from its own data.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub kind: String,
    pub ok: bool,
    pub detail: String,
}

pub fn verify_certificate(cert: &RankCertificate, bits: u32) -> Result<VerifyOutcome> {
    match cert {
        RankCertificate::ExactRank2 {
            p,
            n,
            poly,
            rank,
            functionals,
            lookup,
        } => {
            let poly = NonclassicalPoly::from_text(poly)?;
            if functionals.len() != *rank {
                return Ok(VerifyOutcome {
                    kind: "exact-rank2".into(),
                    ok: false,
                    detail: "functional count differs from the claimed rank".into(),
                });
            }
            let fns: Result<Vec<FpVector>> = functionals
                .iter()
                .map(|c| FpVector::new(*p, c.clone()))
                .collect();
            let fns = fns?;
            let table: BTreeMap<Vec<u64>, (u64, u32)> = lookup.iter().cloned().collect();
            for x in FpVector::iter_all(*p, *n) {
                let key: Vec<u64> = fns.iter().map(|f| f.dot(&x)).collect();
                let Some(&(num, depth)) = table.get(&key) else {
                    return Ok(VerifyOutcome {
                        kind: "exact-rank2".into(),
                        ok: false,
                        detail: format!("missing lookup entry at {x}"),
                    });
                };
                if TorusValue::new(*p, num, depth)? != poly.evaluate(&x)? {
                    return Ok(VerifyOutcome {
                        kind: "exact-rank2".into(),
                        ok: false,
                        detail: format!("lookup disagrees with the polynomial at {x}"),
                    });
                }
            }
            Ok(VerifyOutcome {
                kind: "exact-rank2".into(),
                ok: true,
                detail: format!("factors through {rank} functionals pointwise"),
            })
        }
        RankCertificate::CorrelationBound {
            d,
            r,
            poly,
            certified,
            ..
        } => {
            let poly = NonclassicalPoly::from_text(poly)?;
            let fresh = rank_lb_by_correlation(&poly, *d, *r, bits)?;
            let ok = fresh.certified == *certified
                && fresh.scan.max_corr_sq
                    == match cert {
                        RankCertificate::CorrelationBound { scan_max_sq, .. } => {
                            scan_max_sq.clone()
                        }
                        _ => unreachable!(),
                    };
            Ok(VerifyOutcome {
                kind: "correlation-lower-bound".into(),
                ok,
                detail: format!("re-scan agrees: certified = {}", fresh.certified),
            })
        }
        RankCertificate::Frank {
            p,
            n,
            m,
            d,
            rank,
            target_values,
            components,
        } => {
            if components.len() != *rank {
                return Ok(VerifyOutcome {
                    kind: "frank".into(),
                    ok: false,
                    detail: "component count differs from the claimed rank".into(),
                });
            }
            let mut ok = true;
            let mut detail = String::new();
            let mut tables = Vec::new();
            for comp in components {
                let q = NonclassicalPoly::from_text(&comp.poly)?;
                if q.degree() > d - 1 {
                    ok = false;
                    detail = format!("component degree {} exceeds {}", q.degree(), d - 1);
                }
                tables.push(PhaseTable::from_poly(&q, *m)?);
            }
            if ok {
                for x in FpVector::iter_all(*p, *n) {
                    let idx = x.to_index();
                    let mut acc = CycloNumber::zero(*m);
                    for (comp, table) in components.iter().zip(&tables) {
                        acc = acc.add(&comp.coeff.mul(&table.values()[idx]));
                    }
                    if acc != target_values[idx] {
                        ok = false;
                        detail = format!("decomposition differs from the target at {x}");
                        break;
                    }
                }
            }
            if ok {
                detail = format!("exact {rank}-term decomposition re-verified");
            }
            Ok(VerifyOutcome {
                kind: "frank".into(),
                ok,
                detail,
            })
        }
        RankCertificate::StabRank {
            p,
            n,
            m,
            rank,
            target_amplitudes,
            terms,
            ..
        } => {
            if terms.len() != *rank {
                return Ok(VerifyOutcome {
                    kind: "stab-rank".into(),
                    ok: false,
                    detail: "term count differs from the claimed rank".into(),
                });
            }
            let mut vectors = Vec::new();
            for term in terms {
                vectors.push(term.state()?.amplitudes()?);
            }
            for x in FpVector::iter_all(*p, *n) {
                let idx = x.to_index();
                let mut acc = CycloNumber::zero(*m);
                for (term, vec) in terms.iter().zip(&vectors) {
                    acc = acc.add(&term.coeff.mul(&vec.amplitudes()[idx]));
                }
                if acc != target_amplitudes[idx] {
                    return Ok(VerifyOutcome {
                        kind: "stab-rank".into(),
                        ok: false,
                        detail: format!("decomposition differs from the target at {x}"),
                    });
                }
            }
            Ok(VerifyOutcome {
                kind: "stab-rank".into(),
                ok: true,
                detail: format!("exact {rank}-term stabilizer decomposition re-verified"),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::nat_lift;
    use crate::stab::enumerate_stabilizers;

    #[test]
    fn exact_rank2_examples() {
        // x1 x2 / 2 on F_2^2 has rank 2: no single functional's level sets
        // keep it constant (exhaustive over the 3 nonzero functionals).
        let m = NonclassicalPoly::monomial(2, 2, vec![1, 1], 0, 1).unwrap();
        let (r, cert) = exact_rank2(&m).unwrap();
        assert_eq!(r, 2);
        assert!(verify_certificate(&cert, 64).unwrap().ok);
        // constants have rank 0
        let c = NonclassicalPoly::constant(2, 2, TorusValue::new(2, 1, 1).unwrap()).unwrap();
        assert_eq!(exact_rank2(&c).unwrap().0, 0);
        // |x|/4 on F_2^2 has rank 2
        let q = NonclassicalPoly::lift_sum(2, 2, 2).unwrap();
        assert_eq!(exact_rank2(&q).unwrap().0, 2);
        // a single linear functional has rank 1
        let l = NonclassicalPoly::monomial(2, 2, vec![1, 0], 0, 1).unwrap();
        assert_eq!(exact_rank2(&l).unwrap().0, 1);
        // degree precondition
        let cubic = NonclassicalPoly::lift_sum(2, 2, 3).unwrap();
        assert!(exact_rank2(&cubic).is_err());
    }

    #[test]
    fn exact_rank2_brute_force_oracle() {
        // independent oracle: for every quadratic on F_2^2, try all subsets
        // of all 2^2 linear maps directly on raw value tables
        let functionals: Vec<FpVector> = FpVector::iter_all(2, 2).collect();
        for poly in enumerate_polys_up_to_degree(2, 2, 2).unwrap() {
            let table = poly.evaluate_table();
            let mut oracle = usize::MAX;
            'outer: for r in 0..=functionals.len() {
                for subset in (0..functionals.len()).combinations(r) {
                    let mut classes: BTreeMap<Vec<u64>, TorusValue> = BTreeMap::new();
                    let mut ok = true;
                    for x in FpVector::iter_all(2, 2) {
                        let key: Vec<u64> =
                            subset.iter().map(|&i| functionals[i].dot(&x)).collect();
                        let v = table.value_at(&x);
                        match classes.get(&key) {
                            Some(&seen) if seen != v => {
                                ok = false;
                                break;
                            }
                            Some(_) => {}
                            None => {
                                classes.insert(key, v);
                            }
                        }
                    }
                    if ok {
                        oracle = r;
                        break 'outer;
                    }
                }
            }
            assert_eq!(exact_rank2(&poly).unwrap().0, oracle, "poly {poly}");
        }
    }

    #[test]
    fn correlation_lower_bound_magic() {
        let p = NonclassicalPoly::magic_phase(2, 3, None).unwrap();
        // r = 0: threshold 1; the magic phase is not a quadratic phase, so
        // the scan max is strictly below 1 and rank >= 1 is certified
        let rep = rank_lb_by_correlation(&p, 3, 0, 64).unwrap();
        assert!(rep.certified);
        assert!(verify_certificate(&rep.certificate, 64).unwrap().ok);
        // consistency with the forward direction: for a quadratic P with
        // r = exact_rank2(P), the bound at that r must NOT certify
        let q = NonclassicalPoly::lift_sum(2, 2, 2).unwrap();
        let (r, _) = exact_rank2(&q).unwrap();
        let rep2 = rank_lb_by_correlation(&q, 2, r, 64).unwrap();
        assert!(!rep2.certified);
    }

    #[test]
    fn frank_examples() {
        // e(linear) has frank 1 at d = 2
        let l = NonclassicalPoly::monomial(2, 1, vec![1], 0, 1).unwrap();
        let f = PhaseTable::from_poly(&l, 8).unwrap();
        match frank_exact(&f, 2, 4).unwrap() {
            SearchOutcome::Found { rank, certificate } => {
                assert_eq!(rank, 1);
                assert!(verify_certificate(&certificate, 64).unwrap().ok);
            }
            SearchOutcome::Exhausted { .. } => panic!("character must decompose"),
        }
        // e(|x|/4) on F_2^1 has frank 2 at d = 2 (Fourier sparsity of (1, i))
        let q = NonclassicalPoly::lift_sum(2, 1, 2).unwrap();
        let fq = PhaseTable::from_poly(&q, 8).unwrap();
        assert_eq!(frank_exact(&fq, 2, 4).unwrap().rank(), Some(2));
        assert_eq!(fourier_sparsity(&fq).unwrap(), 2);
        // any f of degree <= d-1 has frank 1
        let fq3 = PhaseTable::from_poly(&q, 8).unwrap();
        assert_eq!(frank_exact(&fq3, 3, 4).unwrap().rank(), Some(1));
        // r_max exhaustion is an outcome, not an error
        let magic =
            PhaseTable::from_poly(&NonclassicalPoly::magic_phase(2, 1, None).unwrap(), 8).unwrap();
        match frank_exact(&magic, 2, 0).unwrap() {
            SearchOutcome::Exhausted { r_max, .. } => assert_eq!(r_max, 0),
            SearchOutcome::Found { .. } => panic!("nonzero function needs at least one term"),
        }
    }

    #[test]
    fn sparsity_matches_frank2() {
        // cross-check on every quadratic phase function over F_2^2
        for poly in enumerate_polys_up_to_degree(2, 2, 2).unwrap() {
            let f = PhaseTable::from_poly(&poly, 8).unwrap();
            let sparsity = fourier_sparsity(&f).unwrap();
            assert_eq!(
                frank_exact(&f, 2, 16).unwrap().rank(),
                Some(sparsity),
                "poly {poly}"
            );
        }
    }

    #[test]
    fn stab_rank_plus_and_magic_p2() {
        let catalog = enumerate_stabilizers(2, 1).unwrap();
        // |+> is a stabilizer state: rank 1
        let plus = StateVector::plus_state(2, 1).unwrap();
        assert_eq!(stab_rank_exact(&plus, &catalog, 3).unwrap().rank(), Some(1));
        // the magic state needs exactly 2, with the r <= 1 levels refuted
        let t = magic_state(2, 1, None).unwrap();
        match stab_rank_exact(&t, &catalog, 3).unwrap() {
            SearchOutcome::Found { rank, certificate } => {
                assert_eq!(rank, 2);
                match &certificate {
                    RankCertificate::StabRank { refuted, .. } => {
                        assert_eq!(refuted.len(), 2);
                        assert_eq!(refuted[1].rank, 1);
                        assert_eq!(refuted[1].subsets_checked, 6, "all 6 single states");
                    }
                    _ => panic!("wrong certificate kind"),
                }
                assert!(verify_certificate(&certificate, 64).unwrap().ok);
            }
            SearchOutcome::Exhausted { .. } => panic!("rank must be 2"),
        }
    }

    #[test]
    fn rank_one_is_exactly_catalog_membership() {
        // cross-module consistency: a state has stabilizer rank 1 iff it
        // matches a catalog entry up to global phase
        let catalog = enumerate_stabilizers(2, 1).unwrap();
        for i in 0..catalog.len() {
            let v = catalog.state_vector(i).unwrap();
            assert_eq!(stab_rank_exact(&v, &catalog, 2).unwrap().rank(), Some(1));
            assert!(crate::stab::is_stabilizer(&v, &catalog).unwrap());
        }
        let t = magic_state(2, 1, None).unwrap();
        assert!(!crate::stab::is_stabilizer(&t, &catalog).unwrap());
        assert_ne!(stab_rank_exact(&t, &catalog, 2).unwrap().rank(), Some(1));
    }

    #[test]
    fn stab_rank_magic_p3() {
        // The qutrit magic state needs 3 stabilizer states. Stabilizer
        // amplitudes for p = 3 are powers of ζ_9³ = ζ_3 on supports of size
        // 1 or 3, and reduction mod Φ_9 = x⁶+x³+1 keeps ζ_9-exponent classes
        // mod 3 separate, so no 2-term combination can produce the class-2
        // component ζ_9² of (1, ζ_9, ζ_9²). The exhaustive search agrees:
        // all 66 pairs are refuted and a 3-term witness exists.
        let catalog = enumerate_stabilizers(3, 1).unwrap();
        let u = magic_state(3, 1, None).unwrap();
        match stab_rank_exact(&u, &catalog, 4).unwrap() {
            SearchOutcome::Found { rank, certificate } => {
                assert_eq!(rank, 3);
                match &certificate {
                    RankCertificate::StabRank { refuted, .. } => {
                        assert_eq!(refuted[1].subsets_checked, 12);
                        assert_eq!(refuted[2].subsets_checked, 66);
                    }
                    _ => panic!("wrong certificate kind"),
                }
                assert!(verify_certificate(&certificate, 64).unwrap().ok);
            }
            SearchOutcome::Exhausted { .. } => panic!("rank must be 3"),
        }
    }

    #[test]
    fn restriction_check_cases() {
        // full-space restriction: ranks equal (k = 0, hypothesis needs r > 1)
        let q = NonclassicalPoly::lift_sum(2, 3, 2).unwrap();
        let full = AffineSubspace::full_space(2, 3).unwrap();
        let rep = restriction_rank_check(&q, &full).unwrap();
        assert_eq!(rep.rank, rep.restricted_rank);
        assert_eq!(rep.codim, 0);
        if rep.hypothesis_met {
            assert_eq!(rep.conclusion_holds, Some(true));
        }
        // a rank-4 quadratic on F_2^4 restricted to a hyperplane
        let mut terms = BTreeMap::new();
        terms.insert((0u32, vec![1u8, 1, 0, 0]), 1u64);
        terms.insert((0u32, vec![0u8, 0, 1, 1]), 1u64);
        let p4 = NonclassicalPoly::new(2, 4, TorusValue::zero(2).unwrap(), terms).unwrap();
        let hyper =
            AffineSubspace::from_text("2 4 3 ; 0 1 0 0 , 0 0 1 0 , 0 0 0 1 ; 0 0 0 0").unwrap();
        let rep2 = restriction_rank_check(&p4, &hyper).unwrap();
        assert_eq!(rep2.rank, 4);
        assert!(rep2.hypothesis_met, "4 > 2·1 + 1");
        assert_eq!(rep2.conclusion_holds, Some(true));
        // low-rank instance: hypothesis not met, nothing asserted
        let l = NonclassicalPoly::monomial(2, 4, vec![1, 0, 0, 0], 0, 1).unwrap();
        let rep3 = restriction_rank_check(&l, &hyper).unwrap();
        assert!(!rep3.hypothesis_met);
        assert_eq!(rep3.conclusion_holds, None);
    }

    #[test]
    fn restriction_check_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut hypotheses_hit = 0;
        for _ in 0..60 {
            let poly = {
                let slots = crate::poly::degree_slots(2, 4, 2);
                let mut terms = BTreeMap::new();
                for slot in slots {
                    if rng.random_bool(0.5) {
                        terms.insert(slot, 1);
                    }
                }
                NonclassicalPoly::new(2, 4, TorusValue::zero(2).unwrap(), terms).unwrap()
            };
            // random hyperplane through a random offset
            let normal = loop {
                let v = FpVector::new(2, (0..4).map(|_| rng.random_range(0..2)).collect()).unwrap();
                if !v.is_zero() {
                    break v;
                }
            };
            let kernel = crate::ff::FpMatrix::from_rows(2, std::slice::from_ref(&normal))
                .unwrap()
                .kernel();
            let offset =
                FpVector::new(2, (0..4).map(|_| rng.random_range(0..2)).collect()).unwrap();
            let hyper = AffineSubspace::from_span(offset, &kernel).unwrap();
            let report = restriction_rank_check(&poly, &hyper).unwrap();
            if report.hypothesis_met {
                hypotheses_hit += 1;
                assert_eq!(report.conclusion_holds, Some(true), "poly {poly}");
            }
        }
        assert!(hypotheses_hit > 0, "the sample must include real instances");
    }

    #[test]
    fn pipeline_single_qubit() {
        let catalog = enumerate_stabilizers(2, 1).unwrap();
        let t = magic_state(2, 1, None).unwrap();
        let outcome = stab_rank_exact(&t, &catalog, 3).unwrap();
        let cert = outcome.certificate().unwrap();
        let decomp = Decomposition::from_certificate(cert).unwrap();
        let report = magic_rank_pipeline(&decomp, 64).unwrap();
        assert!(report.restricted_identity_ok);
        assert!(report.s_size >= 1);
        assert!(report.chain_consistent);
        assert!(!report.claim_precondition_met, "r = 2 > n/2 at n = 1");
    }

    #[test]
    fn pipeline_single_term_stabilizer() {
        // a stabilizer state decomposed by itself is trivially consistent
        let catalog = enumerate_stabilizers(2, 2).unwrap();
        let plus = StateVector::plus_state(2, 2).unwrap();
        let outcome = stab_rank_exact(&plus, &catalog, 2).unwrap();
        let cert = outcome.certificate().unwrap();
        // |+>^2 is not the magic state, so the magic pipeline rejects it
        let decomp = Decomposition::from_certificate(cert).unwrap();
        assert!(matches!(
            magic_rank_pipeline(&decomp, 64),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn nor_and_polys() {
        let nor = nor_poly(3).unwrap();
        for x in FpVector::iter_all(2, 3) {
            let v = nor.evaluate(&x).unwrap();
            if x.is_zero() {
                assert_eq!(v, TorusValue::new(2, 1, 0).unwrap());
            } else {
                assert!(v.is_zero(), "NOR vanishes off 0, x = {x}");
            }
        }
        let and = and_poly(3).unwrap();
        for x in FpVector::iter_all(2, 3) {
            let v = and.evaluate(&x).unwrap();
            if nat_lift(&x) == 3 {
                assert_eq!(v, TorusValue::new(2, 1, 0).unwrap());
            } else {
                assert!(v.is_zero());
            }
        }
        assert_eq!(nor.degree(), 3);
    }

    #[test]
    fn chevalley_warning_basics() {
        // single Q = x1 over F_2^2: roots {(0,0), (0,1)}, count 2 ≡ 0 mod 2
        let q = NonclassicalPoly::monomial(2, 2, vec![1, 0], 0, 1).unwrap();
        let rep = chevalley_warning_check(std::slice::from_ref(&q)).unwrap();
        assert_eq!(rep.root_count, 2);
        assert_eq!(rep.divisibility, Some(true));
        assert_eq!(rep.second_root, Some(vec![0, 1]));
        // degree condition violated: flag not asserted
        let quad = NonclassicalPoly::monomial(2, 2, vec![1, 1], 0, 1).unwrap();
        let rep2 = chevalley_warning_check(std::slice::from_ref(&quad)).unwrap();
        assert!(!rep2.degree_condition);
        assert_eq!(rep2.divisibility, None);
        // nonclassical inputs rejected
        let noncl = NonclassicalPoly::lift_sum(2, 2, 2).unwrap();
        assert!(chevalley_warning_check(std::slice::from_ref(&noncl)).is_err());
    }

    #[test]
    fn every_f2_quadratic_on_four_vars_has_second_root() {
        // exhaustive: 2^10 quadratics vanishing at 0 over F_2^4
        let rep = nor_rank_theorem_check(4, 3, 1, None).unwrap();
        assert_eq!(rep.tuples_checked, 1024);
        assert!(rep.all_have_second_root);
        // kernels: every linear functional on F_2^3 vanishes on >= 2 points
        let rep2 = nor_rank_theorem_check(3, 2, 1, None).unwrap();
        assert!(rep2.all_have_second_root);
        // sampled mode at r = 2
        let rep3 = nor_rank_theorem_check(6, 3, 2, Some((200, 7))).unwrap();
        assert_eq!(rep3.tuples_checked, 200);
        assert!(rep3.all_have_second_root);
        // parameter guard
        assert!(nor_rank_theorem_check(4, 3, 2, None).is_err());
    }

    #[test]
    fn certificate_json_round_trip() {
        let q = NonclassicalPoly::lift_sum(2, 2, 2).unwrap();
        let (_, cert) = exact_rank2(&q).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: RankCertificate = serde_json::from_str(&json).unwrap();
        assert!(verify_certificate(&back, 64).unwrap().ok);
        let catalog = enumerate_stabilizers(2, 1).unwrap();
        let t = magic_state(2, 1, None).unwrap();
        let outcome = stab_rank_exact(&t, &catalog, 2).unwrap();
        let json2 = serde_json::to_string(outcome.certificate().unwrap()).unwrap();
        let back2: RankCertificate = serde_json::from_str(&json2).unwrap();
        assert!(verify_certificate(&back2, 64).unwrap().ok);
        // a corrupted coefficient is caught
        let mut val: serde_json::Value = serde_json::from_str(&json2).unwrap();
        val["terms"][0]["coeff"] = serde_json::json!("8:2,0,0,0");
        let corrupt: RankCertificate = serde_json::from_value(val).unwrap();
        assert!(!verify_certificate(&corrupt, 64).unwrap().ok);
    }
}
