//! Butson-Hadamard constructions and the planner that composes them.
//!
//! Primitive builders: DFT matrices F_n, Sylvester doubling, Paley I/II
//! real Hadamard matrices over GF(q), and conference-matrix quaternary
//! Hadamards. [`build_bh`] searches for a composition (including Kronecker
//! products and catalog entries) that realizes a requested order within a
//! requested resolution, and verifies whatever it builds.

use super::gf::{prime_power, SmallField};
use super::{verify_rows_orthogonal, BhCatalogEntry, CodesError, PhaseCodeMatrix};

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

fn verified(entry: BhCatalogEntry) -> Result<BhCatalogEntry, CodesError> {
    let modulus = entry.complexity.max(2);
    match verify_rows_orthogonal(&entry.rows, modulus) {
        Ok(()) => Ok(entry),
        Err((a, b)) => Err(CodesError::InternalVerification(format!(
            "{}: rows {a} and {b} not orthogonal",
            entry.source
        ))),
    }
}

/// The n×n DFT matrix F_n as a catalog entry with complexity n. Entries
/// follow e^{-j2πkd/n}, i.e. exponent (-k·d) mod n.
pub fn dft_entry(n: u32) -> BhCatalogEntry {
    assert!(n >= 1);
    let rows = (0..n)
        .map(|k| (0..n).map(|d| (n - (k * d) % n) % n).collect())
        .collect();
    BhCatalogEntry {
        order: n,
        complexity: if n == 1 { 1 } else { n },
        rows,
        source: format!("F_{n}"),
    }
}

/// F_P embedded at resolution R: exponent (-k·d·R/P) mod R. P must divide
/// R; unconstrained resolution is expressed by passing R = P.
pub fn dft_code(p: u32, r: u32) -> Result<PhaseCodeMatrix, CodesError> {
    if p == 0 || r < 2 {
        return Err(CodesError::InvalidInput(format!("invalid dft size P={p}, R={r}")));
    }
    if r % p != 0 {
        return Err(CodesError::ResolutionInfeasible { p, r });
    }
    let scale = r / p;
    let rows = (0..p)
        .map(|k| (0..p).map(|d| (p - (k * d) % p) % p * scale).collect())
        .collect();
    PhaseCodeMatrix::from_rows(rows, r)
}

/// BH(2^n, 2) by repeated Kronecker doubling of F_2.
pub fn sylvester(n: u32) -> BhCatalogEntry {
    let mut entry = BhCatalogEntry {
        order: 1,
        complexity: 1,
        rows: vec![vec![0]],
        source: "F_2^0".into(),
    };
    for _ in 0..n {
        entry = kronecker_compose(&dft_entry(2), &entry);
    }
    entry.source = format!("Sylvester 2^{n}");
    entry
}

/// The bordered quadratic-residue core: S[0][0]=0, ones on the first row,
/// `corner` in the first column, and the Jacobsthal matrix χ(a−b) inside.
/// Satisfies S·Sᵀ = q·I for both character signs.
fn paley_core(field: &SmallField, corner: i8) -> Vec<Vec<i8>> {
    let q = field.order() as usize;
    let n = q + 1;
    let mut s = vec![vec![0i8; n]; n];
    for j in 1..n {
        s[0][j] = 1;
        s[j][0] = corner;
    }
    for a in 0..q {
        for b in 0..q {
            s[a + 1][b + 1] = field.chi(field.sub(a as u32, b as u32));
        }
    }
    s
}

fn sign_rows_to_exponents(rows: &[Vec<i8>]) -> Vec<Vec<u32>> {
    rows.iter()
        .map(|row| row.iter().map(|&v| if v > 0 { 0 } else { 1 }).collect())
        .collect()
}

/// Real Hadamard matrix from quadratic residues of GF(q) for an odd prime
/// power q: order q+1 when q ≡ 3 (mod 4), order 2(q+1) when q ≡ 1 (mod 4).
pub fn paley(q: u32) -> Result<BhCatalogEntry, CodesError> {
    if q % 2 == 0 || prime_power(q).is_none() {
        return Err(CodesError::InvalidInput(format!(
            "Paley construction needs an odd prime power, got {q}"
        )));
    }
    let field = SmallField::new(q)?;
    let n = (q + 1) as usize;
    let entry = if q % 4 == 3 {
        // H = I + S with a skew core.
        let s = paley_core(&field, -1);
        let mut h = s;
        for (i, row) in h.iter_mut().enumerate() {
            row[i] += 1;
        }
        BhCatalogEntry {
            order: q + 1,
            complexity: 2,
            rows: sign_rows_to_exponents(&h),
            source: format!("Paley I q={q}"),
        }
    } else {
        // H = [[S+I, S-I], [S-I, -S-I]] with a symmetric core.
        let s = paley_core(&field, 1);
        let mut h = vec![vec![0i8; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let d = i8::from(i == j);
                h[i][j] = s[i][j] + d;
                h[i][j + n] = s[i][j] - d;
                h[i + n][j] = s[i][j] - d;
                h[i + n][j + n] = -s[i][j] - d;
            }
        }
        BhCatalogEntry {
            order: 2 * (q + 1),
            complexity: 2,
            rows: sign_rows_to_exponents(&h),
            source: format!("Paley II q={q}"),
        }
    };
    verified(entry)
}

/// BH(q+1, 4) from a symmetric conference matrix: C + i·I where C is the
/// Paley core for q ≡ 1 (mod 4).
pub fn conference_bh4(q: u32) -> Result<BhCatalogEntry, CodesError> {
    if q % 4 != 1 || prime_power(q).is_none() {
        return Err(CodesError::InvalidInput(format!(
            "conference construction needs a prime power q ≡ 1 (mod 4), got {q}"
        )));
    }
    let field = SmallField::new(q)?;
    let s = paley_core(&field, 1);
    let n = (q + 1) as usize;
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        1 // the imaginary unit
                    } else if s[i][j] > 0 {
                        0
                    } else {
                        2
                    }
                })
                .collect()
        })
        .collect();
    verified(BhCatalogEntry {
        order: q + 1,
        complexity: 4,
        rows,
        source: format!("conference q={q}"),
    })
}

/// Kronecker product of two entries; complexities are lifted to their lcm.
pub fn kronecker_compose(a: &BhCatalogEntry, b: &BhCatalogEntry) -> BhCatalogEntry {
    let l = lcm(a.complexity.max(1), b.complexity.max(1));
    let sa = l / a.complexity.max(1);
    let sb = l / b.complexity.max(1);
    let order = a.order * b.order;
    let mut rows = Vec::with_capacity(order as usize);
    for ra in &a.rows {
        for rb in &b.rows {
            let mut row = Vec::with_capacity(order as usize);
            for &ea in ra {
                for &eb in rb {
                    row.push((ea * sa + eb * sb) % l);
                }
            }
            rows.push(row);
        }
    }
    let source = if a.order == 1 {
        b.source.clone()
    } else if b.order == 1 {
        a.source.clone()
    } else {
        format!("{} x {}", a.source, b.source)
    };
    BhCatalogEntry { order, complexity: l, rows, source }
}

/// Re-encodes an entry at a resolution its complexity divides, scaling
/// exponents by the ratio.
pub fn lift_entry(entry: &BhCatalogEntry, r: u32) -> Result<BhCatalogEntry, CodesError> {
    let c = entry.complexity.max(1);
    if r % c != 0 {
        return Err(CodesError::ResolutionInfeasible { p: c, r });
    }
    let scale = r / c;
    Ok(BhCatalogEntry {
        order: entry.order,
        complexity: r,
        rows: entry
            .rows
            .iter()
            .map(|row| row.iter().map(|&e| e * scale).collect())
            .collect(),
        source: entry.source.clone(),
    })
}

#[derive(Debug, Clone)]
enum BuildPlan {
    Scalar,
    Dft(u32),
    Sylvester(u32),
    PaleyI(u32),
    PaleyII(u32),
    Conference(u32),
    Catalog(usize),
    Kron(Box<BuildPlan>, Box<BuildPlan>),
}

fn odd_prime_power(q: u32) -> bool {
    q % 2 == 1 && prime_power(q).is_some()
}

/// Deterministic construction search for a BH(order, c) with c dividing r.
/// Priority: DFT, Sylvester, Paley I, Paley II, conference, catalog, then
/// Kronecker factorizations with the smallest factor first.
fn plan_bh(order: u32, r: u32, catalog: &[BhCatalogEntry]) -> Option<BuildPlan> {
    if order == 1 {
        return Some(BuildPlan::Scalar);
    }
    if r % order == 0 {
        return Some(BuildPlan::Dft(order));
    }
    if r % 2 == 0 && order % 4 == 0 {
        if order.is_power_of_two() {
            return Some(BuildPlan::Sylvester(order.trailing_zeros()));
        }
        let q = order - 1;
        if q % 4 == 3 && odd_prime_power(q) {
            return Some(BuildPlan::PaleyI(q));
        }
        if order % 2 == 0 {
            let q = order / 2 - 1;
            if q % 4 == 1 && odd_prime_power(q) {
                return Some(BuildPlan::PaleyII(q));
            }
        }
    }
    if r % 4 == 0 && order % 2 == 0 && order >= 6 {
        let q = order - 1;
        if q % 4 == 1 && odd_prime_power(q) {
            return Some(BuildPlan::Conference(q));
        }
    }
    if let Some(idx) = catalog
        .iter()
        .position(|e| e.order == order && r % e.complexity.max(1) == 0)
    {
        return Some(BuildPlan::Catalog(idx));
    }
    let mut a = 2;
    while a * a <= order {
        if order % a == 0 {
            if let (Some(pa), Some(pb)) = (plan_bh(a, r, catalog), plan_bh(order / a, r, catalog))
            {
                return Some(BuildPlan::Kron(Box::new(pa), Box::new(pb)));
            }
        }
        a += 1;
    }
    None
}

/// Whether the engine can produce a BH matrix of this order embeddable at
/// resolution r.
pub fn can_build(order: u32, r: u32, catalog: &[BhCatalogEntry]) -> bool {
    plan_bh(order, r, catalog).is_some()
}

/// Builds a verified BH matrix of the requested order whose complexity
/// divides r, or reports the order as unsupported.
pub fn build_bh(order: u32, r: u32, catalog: &[BhCatalogEntry]) -> Result<BhCatalogEntry, CodesError> {
    let plan = plan_bh(order, r, catalog)
        .ok_or(CodesError::ConstructionUnsupported { order, complexity: r })?;
    execute(&plan, catalog)
}

fn execute(plan: &BuildPlan, catalog: &[BhCatalogEntry]) -> Result<BhCatalogEntry, CodesError> {
    match plan {
        BuildPlan::Scalar => Ok(BhCatalogEntry {
            order: 1,
            complexity: 1,
            rows: vec![vec![0]],
            source: "scalar".into(),
        }),
        BuildPlan::Dft(n) => verified(dft_entry(*n)),
        BuildPlan::Sylvester(n) => verified(sylvester(*n)),
        BuildPlan::PaleyI(q) | BuildPlan::PaleyII(q) => paley(*q),
        BuildPlan::Conference(q) => conference_bh4(*q),
        BuildPlan::Catalog(idx) => Ok(catalog[*idx].clone()),
        BuildPlan::Kron(a, b) => {
            let ea = execute(a, catalog)?;
            let eb = execute(b, catalog)?;
            verified(kronecker_compose(&ea, &eb))
        }
    }
}

/// Smallest product of the prime factors of r (with repetition) that
/// reaches at least `target`.
fn min_prime_product(target: u32, primes: &[u32]) -> u64 {
    use std::collections::{BinaryHeap, HashSet};
    let mut heap: BinaryHeap<std::cmp::Reverse<u64>> = BinaryHeap::new();
    let mut seen: HashSet<u64> = HashSet::new();
    heap.push(std::cmp::Reverse(1));
    seen.insert(1);
    while let Some(std::cmp::Reverse(v)) = heap.pop() {
        if v >= target as u64 {
            return v;
        }
        for &p in primes {
            let next = v * p as u64;
            if seen.insert(next) {
                heap.push(std::cmp::Reverse(next));
            }
        }
    }
    unreachable!("products of primes are unbounded")
}

/// The general fallback: S = F_{p1}^{⊗m1} ⊗ ... ⊗ F_{pL}^{⊗mL} at the
/// smallest order ∏ p_i^{m_i} that reaches K+1.
pub(super) fn general_kronecker(kp1: u32, r: u32) -> Result<BhCatalogEntry, CodesError> {
    let primes = crate::cyclotomic::distinct_prime_factors(r);
    let vtilde = min_prime_product(kp1, &primes) as u32;
    let mut entry = BhCatalogEntry {
        order: 1,
        complexity: 1,
        rows: vec![vec![0]],
        source: "scalar".into(),
    };
    let mut rem = vtilde;
    for &p in &primes {
        while rem % p == 0 {
            entry = kronecker_compose(&entry, &dft_entry(p));
            rem /= p;
        }
    }
    debug_assert_eq!(rem, 1);
    verified(entry)
}
