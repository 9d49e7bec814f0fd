//! RIS position recovery from range sums.
//!
//! Each receiver constrains the unknown position x to an ellipsoid
//! |BS→x| + |x→RX_i| = d_i, where d_i comes from the TOA difference
//! between the RIS path and the direct path. Gauss-Newton with step
//! halving minimizes the squared residuals, starting from the centroid of
//! the receivers.

use super::{dist, LocexpError};

#[derive(Debug, Clone, Copy)]
pub struct LocalizeResult {
    pub position: [f64; 3],
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 100;
const STEP_TOLERANCE_M: f64 = 1e-10;

/// Solves for a position from per-receiver range sums
/// d_i = |BS→x| + |x→RX_i|. Needs at least three receivers. A
/// non-converged fit is flagged, not an error.
///
/// With three receivers the ellipsoid intersection can contain two exact
/// points; `init` selects the basin (a scenario-level side prior). When
/// absent, iteration starts from the centroid of the receivers.
pub fn localize_ris(
    bs: [f64; 3],
    rx: &[[f64; 3]],
    range_sums: &[f64],
    init: Option<[f64; 3]>,
) -> Result<LocalizeResult, LocexpError> {
    if rx.len() < 3 {
        return Err(LocexpError::Config(format!(
            "need at least 3 receivers, got {}",
            rx.len()
        )));
    }
    if rx.len() != range_sums.len() {
        return Err(LocexpError::Config(format!(
            "{} receivers but {} range sums",
            rx.len(),
            range_sums.len()
        )));
    }

    let mut x = init.unwrap_or_else(|| {
        let mut c = [0.0; 3];
        for r in rx {
            for (ci, ri) in c.iter_mut().zip(r) {
                *ci += ri / rx.len() as f64;
            }
        }
        c
    });

    let residuals = |x: &[f64; 3]| -> Vec<f64> {
        rx.iter()
            .zip(range_sums)
            .map(|(&r, &d)| dist(*x, bs) + dist(*x, r) - d)
            .collect()
    };
    let norm_sq = |v: &[f64]| v.iter().map(|r| r * r).sum::<f64>();

    let mut res = residuals(&x);
    let mut cost = norm_sq(&res);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..MAX_ITERATIONS {
        iterations = iter + 1;
        // J_i = (x-bs)/|x-bs| + (x-rx_i)/|x-rx_i|
        let jac: Vec<[f64; 3]> = rx
            .iter()
            .map(|&r| {
                let db = dist(x, bs).max(1e-12);
                let dr = dist(x, r).max(1e-12);
                [
                    (x[0] - bs[0]) / db + (x[0] - r[0]) / dr,
                    (x[1] - bs[1]) / db + (x[1] - r[1]) / dr,
                    (x[2] - bs[2]) / db + (x[2] - r[2]) / dr,
                ]
            })
            .collect();

        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for (row, &ri) in jac.iter().zip(&res) {
            for a in 0..3 {
                jtr[a] += row[a] * ri;
                for b in 0..3 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let Some(mut step) = solve_3x3(&jtj, &[-jtr[0], -jtr[1], -jtr[2]]) else {
            break; // degenerate geometry at this iterate
        };

        // Step halving until the cost decreases.
        let mut accepted = false;
        for _ in 0..30 {
            let candidate = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
            let cres = residuals(&candidate);
            let ccost = norm_sq(&cres);
            if ccost < cost {
                let step_norm =
                    (step[0] * step[0] + step[1] * step[1] + step[2] * step[2]).sqrt();
                x = candidate;
                res = cres;
                cost = ccost;
                accepted = true;
                if step_norm < STEP_TOLERANCE_M {
                    converged = true;
                }
                break;
            }
            for s in &mut step {
                *s *= 0.5;
            }
        }
        if !accepted {
            // No descent direction left; treat the current point as final.
            converged = cost < 1e-12;
            break;
        }
        if converged {
            break;
        }
    }

    Ok(LocalizeResult {
        position: x,
        converged,
        residual: (cost / rx.len() as f64).sqrt(),
        iterations,
    })
}

fn solve_3x3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locexp::Geometry;

    fn exact_range_sums(bs: [f64; 3], rx: &[[f64; 3]], target: [f64; 3]) -> Vec<f64> {
        rx.iter().map(|&r| dist(bs, target) + dist(target, r)).collect()
    }

    #[test]
    fn exact_range_sums_recover_the_position() {
        let g = Geometry::reference_layout(8);
        for &target in &g.ris {
            let sums = exact_range_sums(g.bs, &g.rx, target);
            let fit = localize_ris(g.bs, &g.rx, &sums, Some([0.0, 0.0, -3.5])).unwrap();
            assert!(fit.converged, "target {target:?}");
            assert!(
                dist(fit.position, target) < 1e-6,
                "target {target:?}, got {:?} (err {:.3e})",
                fit.position,
                dist(fit.position, target)
            );
        }
    }

    #[test]
    fn small_toa_noise_moves_the_fit_slightly() {
        let g = Geometry::reference_layout(4);
        let target = g.ris[1];
        let mut sums = exact_range_sums(g.bs, &g.rx, target);
        for (i, s) in sums.iter_mut().enumerate() {
            *s += if i % 2 == 0 { 1e-4 } else { -1e-4 };
        }
        let fit = localize_ris(g.bs, &g.rx, &sums, Some([0.0, 0.0, -3.5])).unwrap();
        let err = dist(fit.position, target);
        assert!(err > 1e-7 && err < 0.1, "err {err:e}");
    }

    #[test]
    fn too_few_receivers_is_an_error() {
        let g = Geometry::reference_layout(2);
        assert!(localize_ris(g.bs, &g.rx[..2], &[10.0, 11.0], None).is_err());
        assert!(localize_ris(g.bs, &g.rx, &[10.0, 11.0], None).is_err());
    }
}
