//! Exhaustive feasibility search over T_R^{(K+1)×P}.
//!
//! Row 0 is fixed to all-ones and the first entry of every other row is
//! fixed to exponent 0: scaling a row by a unit root preserves all the
//! constraints, so every solution can be normalized this way. The search
//! is therefore over R^{K(P-1)} assignments, bounded at 1e8.

use super::CodesError;
use crate::cyclotomic::RootSum;

const SEARCH_LIMIT: f64 = 1e8;

/// True iff some code matrix with K RIS rows of length P over T_R
/// satisfies the all-ones and orthogonality conditions, by exhaustive
/// enumeration with exact verification.
pub fn exhaustive_feasibility(k: u32, p: u32, r: u32) -> Result<bool, CodesError> {
    if k < 1 || p < 1 || r < 2 {
        return Err(CodesError::InvalidInput(format!(
            "need K >= 1, P >= 1, R >= 2; got K={k}, P={p}, R={r}"
        )));
    }
    let space = (r as f64).powi((k * (p - 1)) as i32);
    if space > SEARCH_LIMIT {
        return Err(CodesError::SearchSpaceTooLarge { space, limit: SEARCH_LIMIT });
    }
    if (k + 1) > p {
        // More rows than dimensions cannot be mutually orthogonal.
        return Ok(false);
    }

    if k == 1 {
        // Single free row: stream candidates without storing them.
        let mut found = false;
        for_each_zero_sum_row(p, r, &mut |_| {
            found = true;
            false
        });
        return Ok(found);
    }

    // Candidates orthogonal to the all-ones row are shared by every level.
    let mut candidates: Vec<Vec<u32>> = Vec::new();
    for_each_zero_sum_row(p, r, &mut |row| {
        candidates.push(row.to_vec());
        true
    });
    let mut chosen: Vec<usize> = Vec::new();
    Ok(extend(&candidates, &mut chosen, k as usize, r))
}

/// Enumerates rows [0, e_1, ..., e_{P-1}] whose entries sum to zero
/// exactly, in lexicographic order. The visitor returns false to stop.
fn for_each_zero_sum_row(p: u32, r: u32, visit: &mut dyn FnMut(&[u32]) -> bool) {
    let mut row = vec![0u32; p as usize];
    loop {
        let mut s = RootSum::new(r).expect("r >= 2");
        for &e in &row {
            s.add_exponent(e, 1);
        }
        if s.is_zero() && !visit(&row) {
            return;
        }
        // Increment positions 1..P like an odometer.
        let mut i = row.len() - 1;
        loop {
            if i == 0 {
                return;
            }
            row[i] += 1;
            if row[i] < r {
                break;
            }
            row[i] = 0;
            i -= 1;
        }
    }
}

fn rows_orthogonal(a: &[u32], b: &[u32], r: u32) -> bool {
    let mut s = RootSum::new(r).expect("r >= 2");
    for (&ea, &eb) in a.iter().zip(b) {
        s.add_exponent((ea + r - eb) % r, 1);
    }
    s.is_zero()
}

fn extend(candidates: &[Vec<u32>], chosen: &mut Vec<usize>, k: usize, r: u32) -> bool {
    if chosen.len() == k {
        return true;
    }
    // Candidates are in lexicographic order; requiring an increasing index
    // sequence drops row permutations of the same solution set.
    let start = chosen.last().map_or(0, |&i| i + 1);
    for idx in start..candidates.len() {
        if chosen
            .iter()
            .all(|&j| rows_orthogonal(&candidates[idx], &candidates[j], r))
        {
            chosen.push(idx);
            if extend(candidates, chosen, k, r) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sylvester_order_4_is_found() {
        assert!(exhaustive_feasibility(2, 4, 2).unwrap());
        assert!(exhaustive_feasibility(3, 4, 2).unwrap());
    }

    #[test]
    fn no_binary_solution_between_4_and_8() {
        for p in [5, 6, 7] {
            assert!(!exhaustive_feasibility(2, p, 2).unwrap(), "P={p}");
        }
    }

    #[test]
    fn odd_lengths_impossible_for_quaternary() {
        assert!(!exhaustive_feasibility(1, 3, 4).unwrap());
        assert!(!exhaustive_feasibility(2, 5, 4).unwrap());
    }

    #[test]
    fn f3_found_at_p3() {
        assert!(exhaustive_feasibility(1, 3, 3).unwrap());
        assert!(exhaustive_feasibility(2, 3, 3).unwrap());
    }

    #[test]
    fn dimension_bound_short_circuits() {
        assert!(!exhaustive_feasibility(3, 3, 2).unwrap());
    }

    #[test]
    fn oversized_space_is_rejected() {
        match exhaustive_feasibility(4, 12, 4) {
            Err(CodesError::SearchSpaceTooLarge { space, .. }) => {
                assert!(space > 1e8);
            }
            other => panic!("expected size error, got {other:?}"),
        }
    }
}
