//! Construction, verification, and length minimization of fast-varying
//! phase code matrices.
//!
//! A code is a (K+1)×P matrix over T_R whose first row is all-ones and
//! whose rows are mutually orthogonal. Orthogonality is checked exactly
//! (see [`crate::cyclotomic`]), so a verified code carries a proof, not a
//! tolerance. Constructions cover DFT matrices, real Hadamard matrices
//! (Sylvester and Paley types over prime-power fields), conference-matrix
//! quaternary Hadamards, Kronecker composition, and a re-verified embedded
//! catalog; orders outside that coverage produce an error naming the gap
//! rather than a silently longer code.

mod catalog;
mod construct;
pub mod gf;
mod io;
mod search;

pub use catalog::{builtin_catalog, format_catalog, parse_catalog};
pub use construct::{
    build_bh, can_build, conference_bh4, dft_code, dft_entry, kronecker_compose, lift_entry,
    paley, sylvester,
};
pub use io::{matrix_from_json, matrix_from_text, matrix_to_json, matrix_to_text};
pub use search::exhaustive_feasibility;

use crate::cyclotomic::{CyclotomicError, RootSum, UnitRoot};
use thiserror::Error;

/// Load a catalog from a byte stream, re-verifying every entry.
pub fn catalog_load(source: &[u8]) -> Result<Vec<BhCatalogEntry>, CodesError> {
    let text = std::str::from_utf8(source)
        .map_err(|e| CodesError::CatalogParse { line: 0, message: format!("not UTF-8: {e}") })?;
    parse_catalog(text)
}

#[derive(Debug, Error)]
pub enum CodesError {
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resolution {r} cannot represent {p}-th roots exactly ({p} does not divide {r})")]
    ResolutionInfeasible { p: u32, r: u32 },
    #[error("no known construction for a BH({order}, {complexity}) matrix (smallest missing order: {order})")]
    ConstructionUnsupported { order: u32, complexity: u32 },
    #[error("search space of {space:.3e} assignments exceeds the {limit:.0e} limit")]
    SearchSpaceTooLarge { space: f64, limit: f64 },
    #[error("catalog parse error at line {line}: {message}")]
    CatalogParse { line: usize, message: String },
    #[error("catalog entry '{entry}' failed verification: rows {row_a} and {row_b} are not orthogonal")]
    CatalogVerification { entry: String, row_a: usize, row_b: usize },
    #[error("constructed matrix failed verification: {0}")]
    InternalVerification(String),
}

/// The (K+1)×P matrix B of fast-varying codes, stored as exponents mod R.
/// Row 0 is the code of the uncontrolled path; for a code that passes
/// [`verify_code`] it is all-ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCodeMatrix {
    rows: Vec<Vec<u32>>,
    modulus: u32,
}

impl PhaseCodeMatrix {
    pub fn from_rows(rows: Vec<Vec<u32>>, modulus: u32) -> Result<Self, CodesError> {
        if modulus < 2 {
            return Err(CodesError::InvalidInput(format!(
                "resolution must be at least 2, got {modulus}"
            )));
        }
        if rows.is_empty() || rows[0].is_empty() {
            return Err(CodesError::InvalidInput("matrix must be non-empty".into()));
        }
        let p = rows[0].len();
        for (k, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(CodesError::InvalidInput(format!(
                    "row {k} has {} entries, expected {p}",
                    row.len()
                )));
            }
            if let Some(&e) = row.iter().find(|&&e| e >= modulus) {
                return Err(CodesError::InvalidInput(format!(
                    "exponent {e} in row {k} out of range for modulus {modulus}"
                )));
            }
        }
        Ok(Self { rows, modulus })
    }

    /// Number of RISs served: rows − 1.
    pub fn ris_count(&self) -> usize {
        self.rows.len() - 1
    }

    /// Code length P.
    pub fn code_len(&self) -> usize {
        self.rows[0].len()
    }

    /// Phase resolution R.
    pub fn resolution(&self) -> u32 {
        self.modulus
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &[u32] {
        &self.rows[k]
    }

    pub fn root(&self, k: usize, p: usize) -> UnitRoot {
        UnitRoot::new(self.rows[k][p], self.modulus).expect("exponents validated on construction")
    }

    /// The first `n_rows` rows as a new matrix.
    pub fn truncated(&self, n_rows: usize) -> Self {
        assert!(n_rows >= 1 && n_rows <= self.rows.len());
        Self { rows: self.rows[..n_rows].to_vec(), modulus: self.modulus }
    }
}

/// A square Butson-type Hadamard matrix of the given order over
/// T_complexity, with provenance. Construction and load paths verify every
/// entry before handing it out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BhCatalogEntry {
    pub order: u32,
    pub complexity: u32,
    pub rows: Vec<Vec<u32>>,
    pub source: String,
}

/// Outcome of a code design: the verified matrix plus provenance and the
/// theoretical minimum length it was measured against.
#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub code: PhaseCodeMatrix,
    pub construction_case: ConstructionCase,
    pub theoretical_min_p: MinimalP,
    pub achieved_p: u32,
    pub optimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionCase {
    /// DFT rows at unconstrained resolution (R = P).
    DftInf,
    /// Rows of F_{p1} where p1 is the smallest prime factor of R.
    DftPrime,
    /// Real Hadamard matrix, R = 2.
    HadamardR2,
    /// Quaternary Hadamard embedded into T_{2^r}.
    Bh4Pow2,
    /// A BH(K+1, R) matrix: the shortest possible code.
    CatalogKp1,
    /// Kronecker product of DFT matrices over the prime factors of R.
    KroneckerGeneral,
}

impl std::fmt::Display for ConstructionCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConstructionCase::DftInf => "dft-unconstrained",
            ConstructionCase::DftPrime => "dft-smallest-prime",
            ConstructionCase::HadamardR2 => "hadamard-r2",
            ConstructionCase::Bh4Pow2 => "bh4-power-of-two",
            ConstructionCase::CatalogKp1 => "bh-kplus1",
            ConstructionCase::KroneckerGeneral => "kronecker-general",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    LowerBound,
}

/// The minimum feasible code length, either proven exact or a lower bound
/// (every code needs at least K+1 columns for its rows to be independent).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimalP {
    pub value: u32,
    pub exactness: Exactness,
}

impl std::fmt::Display for MinimalP {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.exactness {
            Exactness::Exact => write!(f, "{} (exact)", self.value),
            Exactness::LowerBound => write!(f, ">= {} (lower bound)", self.value),
        }
    }
}

/// Verification report for a phase code matrix: the all-ones condition on
/// row 0, the zero-sum condition on every other row, and exact
/// orthogonality of every row pair.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub first_row_all_ones: bool,
    /// (k, row sum is exactly zero) for k = 1..=K.
    pub row_sum_zero: Vec<(usize, bool)>,
    /// (k, k', correlation is exactly zero) for every pair k < k'.
    pub cross_orthogonal: Vec<(usize, usize, bool)>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.first_row_all_ones
            && self.row_sum_zero.iter().all(|&(_, z)| z)
            && self.cross_orthogonal.iter().all(|&(_, _, z)| z)
    }

    pub fn failing_pairs(&self) -> Vec<(usize, usize)> {
        self.cross_orthogonal
            .iter()
            .filter(|&&(_, _, z)| !z)
            .map(|&(a, b, _)| (a, b))
            .collect()
    }
}

/// Exact cross-correlation Σ_p ζ^{a_p − b_p} of two exponent rows.
fn correlation_sum(a: &[u32], b: &[u32], modulus: u32) -> RootSum {
    let mut s = RootSum::new(modulus).expect("modulus >= 2");
    for (&ea, &eb) in a.iter().zip(b) {
        s.add_exponent((ea + modulus - eb) % modulus, 1);
    }
    s
}

/// Checks pairwise row orthogonality only (the BH condition, without the
/// all-ones first row). Returns the first failing pair.
pub fn verify_rows_orthogonal(rows: &[Vec<u32>], modulus: u32) -> Result<(), (usize, usize)> {
    for a in 0..rows.len() {
        for b in (a + 1)..rows.len() {
            if !correlation_sum(&rows[a], &rows[b], modulus).is_zero() {
                return Err((a, b));
            }
        }
    }
    Ok(())
}

/// Full exact verification of a code matrix.
pub fn verify_code(code: &PhaseCodeMatrix) -> VerifyReport {
    let r = code.resolution();
    let first_row_all_ones = code.row(0).iter().all(|&e| e == 0);
    let mut row_sum_zero = Vec::new();
    for k in 1..code.rows.len() {
        let mut s = RootSum::new(r).expect("modulus >= 2");
        for &e in code.row(k) {
            s.add_exponent(e, 1);
        }
        row_sum_zero.push((k, s.is_zero()));
    }
    let mut cross_orthogonal = Vec::new();
    for a in 0..code.rows.len() {
        for b in (a + 1)..code.rows.len() {
            let z = correlation_sum(code.row(a), code.row(b), r).is_zero();
            cross_orthogonal.push((a, b, z));
        }
    }
    VerifyReport { first_row_all_ones, row_sum_zero, cross_orthogonal }
}

/// Column-scales a matrix by the conjugate of its first row, so the first
/// row becomes all-ones while pairwise orthogonality is preserved. The
/// input must already satisfy the orthogonality condition.
pub fn dephase(g: &PhaseCodeMatrix) -> Result<PhaseCodeMatrix, CodesError> {
    if let Err((a, b)) = verify_rows_orthogonal(g.rows(), g.resolution()) {
        return Err(CodesError::InvalidInput(format!(
            "dephase input rows {a} and {b} are not orthogonal"
        )));
    }
    Ok(dephase_unchecked(g))
}

fn dephase_unchecked(g: &PhaseCodeMatrix) -> PhaseCodeMatrix {
    let r = g.resolution();
    let first = g.row(0).to_vec();
    let rows = g
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&first)
                .map(|(&e, &f)| (e + r - f) % r)
                .collect()
        })
        .collect();
    PhaseCodeMatrix { rows, modulus: r }
}

fn smallest_prime_factor(r: u32) -> u32 {
    crate::cyclotomic::distinct_prime_factors(r)[0]
}

/// The minimum code length P* for K RISs at resolution R, with a flag for
/// whether the value is proven exact or only the K+1 dimension bound.
pub fn minimal_p(k: u32, r: u32) -> MinimalP {
    assert!(k >= 1 && r >= 2);
    let kp1 = k + 1;
    let catalog = builtin_catalog();
    if can_build(kp1, r, catalog) {
        return MinimalP { value: kp1, exactness: Exactness::Exact };
    }
    let p1 = smallest_prime_factor(r);
    if p1 >= kp1 {
        return MinimalP { value: p1, exactness: Exactness::Exact };
    }
    if r == 2 && (2..664).contains(&k) {
        return MinimalP { value: 4 * kp1.div_ceil(4), exactness: Exactness::Exact };
    }
    if r.is_power_of_two() && r >= 4 && k < 64 {
        return MinimalP { value: 2 * kp1.div_ceil(2), exactness: Exactness::Exact };
    }
    MinimalP { value: kp1, exactness: Exactness::LowerBound }
}

/// Designs a verified code for K RISs at resolution R, trying the
/// shortest-length constructions first. When an exact minimum is known but
/// the required order has no construction here, this fails loudly instead
/// of returning a longer code.
pub fn design_code(k: u32, r: u32) -> Result<DesignOutcome, CodesError> {
    if k < 1 {
        return Err(CodesError::InvalidInput("K must be at least 1".into()));
    }
    if r < 2 {
        return Err(CodesError::InvalidInput("R must be at least 2".into()));
    }
    let kp1 = k + 1;
    let catalog = builtin_catalog();
    let theoretical = minimal_p(k, r);

    // BH(K+1, R) exists in the engine: the K+1 lower bound is achieved.
    if can_build(kp1, r, catalog) {
        let entry = build_bh(kp1, r, catalog)?;
        return finish(entry, kp1, r, ConstructionCase::CatalogKp1, theoretical);
    }

    // Smallest prime factor of R at least K+1: rows of F_{p1}.
    let p1 = smallest_prime_factor(r);
    if p1 >= kp1 {
        let code = dft_code(p1, r)?.truncated(kp1 as usize);
        return finish_code(code, ConstructionCase::DftPrime, theoretical);
    }

    // One-bit resolution: rows of a real Hadamard matrix.
    if r == 2 {
        let order = 4 * kp1.div_ceil(4);
        match build_bh(order, 2, catalog) {
            Ok(entry) => return finish(entry, kp1, r, ConstructionCase::HadamardR2, theoretical),
            Err(_) if k < 664 => {
                return Err(CodesError::ConstructionUnsupported { order, complexity: 2 })
            }
            Err(_) => {} // exactness unknown out of range; fall through
        }
    }

    // Power-of-two resolution: quaternary Hadamard of the smallest even
    // order, exponent-scaled into T_R.
    if r.is_power_of_two() && r >= 4 {
        let order = 2 * kp1.div_ceil(2);
        match build_bh(order, r, catalog) {
            Ok(entry) => return finish(entry, kp1, r, ConstructionCase::Bh4Pow2, theoretical),
            Err(_) if k < 64 => {
                return Err(CodesError::ConstructionUnsupported { order, complexity: r })
            }
            Err(_) => {}
        }
    }

    // General construction: Kronecker product of DFT matrices over the
    // prime factors of R, at the smallest such order >= K+1.
    let entry = construct::general_kronecker(kp1, r)?;
    finish(entry, kp1, r, ConstructionCase::KroneckerGeneral, theoretical)
}

/// Designs a code at an explicitly requested length P >= K+1.
pub fn design_code_with_p(k: u32, r: u32, p: u32) -> Result<DesignOutcome, CodesError> {
    if p < k + 1 {
        return Err(CodesError::InvalidInput(format!(
            "P = {p} is below the dimension bound K+1 = {}",
            k + 1
        )));
    }
    let catalog = builtin_catalog();
    let theoretical = minimal_p(k, r);
    let entry = build_bh(p, r, catalog)?;
    let case = if p == k + 1 {
        ConstructionCase::CatalogKp1
    } else if r == 2 {
        ConstructionCase::HadamardR2
    } else if r.is_power_of_two() {
        ConstructionCase::Bh4Pow2
    } else {
        ConstructionCase::KroneckerGeneral
    };
    finish(entry, k + 1, r, case, theoretical)
}

/// Unconstrained-resolution design: rows of F_{K+1}, represented with
/// modulus R = K+1.
pub fn design_code_inf(k: u32) -> Result<DesignOutcome, CodesError> {
    if k < 1 {
        return Err(CodesError::InvalidInput("K must be at least 1".into()));
    }
    let code = dft_code(k + 1, k + 1)?;
    finish_code(
        code,
        ConstructionCase::DftInf,
        MinimalP { value: k + 1, exactness: Exactness::Exact },
    )
}

fn finish(
    entry: BhCatalogEntry,
    kp1: u32,
    r: u32,
    case: ConstructionCase,
    theoretical: MinimalP,
) -> Result<DesignOutcome, CodesError> {
    let lifted = lift_entry(&entry, r)?;
    let full = PhaseCodeMatrix::from_rows(lifted.rows, r)?;
    let code = dephase_unchecked(&full).truncated(kp1 as usize);
    finish_code(code, case, theoretical)
}

fn finish_code(
    code: PhaseCodeMatrix,
    case: ConstructionCase,
    theoretical: MinimalP,
) -> Result<DesignOutcome, CodesError> {
    let report = verify_code(&code);
    if !report.pass() {
        return Err(CodesError::InternalVerification(format!(
            "case {case}, failing pairs {:?}",
            report.failing_pairs()
        )));
    }
    let achieved_p = code.code_len() as u32;
    let optimal = theoretical.exactness == Exactness::Exact && achieved_p == theoretical.value;
    Ok(DesignOutcome { code, construction_case: case, theoretical_min_p: theoretical, achieved_p, optimal })
}
