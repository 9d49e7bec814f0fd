//! Link-level simulation of pilot transmission through multiple RISs.
//!
//! A frame of T = P·Q pilot symbols is received through the uncontrolled
//! channel plus K RIS paths, each modulated by a fast-varying code scalar
//! and a slow-varying beamforming profile. Despreading correlates the
//! frame against the conjugated code rows to separate the paths. Code
//! verification is exact (see [`crate::codes`]); everything here is plain
//! double-precision simulation.

pub mod rng;

use crate::codes::PhaseCodeMatrix;
use crate::cyclotomic::{CyclotomicError, RootSum, UnitRoot};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AirlinkError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("quantization input has magnitude {magnitude:.3e}, expected a unit complex number")]
    NonUnitInput { magnitude: f64 },
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
}

/// One RIS path, decomposed into the RIS→RX and TX→RIS factors.
#[derive(Debug, Clone)]
pub struct RisPath {
    pub h_sr: Array2<Complex64>,
    pub h_ts: Array2<Complex64>,
}

/// The uncontrolled channel and per-RIS factor pairs for one scenario
/// instance, with optional per-path delays for wideband use.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    pub h0: Array2<Complex64>,
    pub paths: Vec<RisPath>,
    pub delays: Option<Vec<f64>>,
}

impl ChannelSet {
    pub fn new(
        h0: Array2<Complex64>,
        paths: Vec<RisPath>,
        delays: Option<Vec<f64>>,
    ) -> Result<Self, AirlinkError> {
        let (n_rx, n_tx) = h0.dim();
        for (k, path) in paths.iter().enumerate() {
            let (rx, n_ris) = path.h_sr.dim();
            let (ris2, tx) = path.h_ts.dim();
            if rx != n_rx || tx != n_tx || n_ris != ris2 {
                return Err(AirlinkError::DimensionMismatch(format!(
                    "path {}: h_sr is {}x{}, h_ts is {}x{}, direct channel is {}x{}",
                    k + 1,
                    rx,
                    n_ris,
                    ris2,
                    tx,
                    n_rx,
                    n_tx
                )));
            }
        }
        if let Some(d) = &delays {
            if d.len() != paths.len() + 1 {
                return Err(AirlinkError::DimensionMismatch(format!(
                    "{} delays for {} paths",
                    d.len(),
                    paths.len() + 1
                )));
            }
        }
        Ok(Self { h0, paths, delays })
    }

    /// Unstructured i.i.d. CN(0,1) channel draw.
    pub fn random_iid<R: Rng>(
        k: usize,
        n_rx: usize,
        n_tx: usize,
        n_ris: usize,
        rng: &mut R,
    ) -> Self {
        let mut draw = |rows: usize, cols: usize| {
            Array2::from_shape_fn((rows, cols), |_| rng::complex_gaussian(rng, 1.0))
        };
        let h0 = draw(n_rx, n_tx);
        let paths = (0..k)
            .map(|_| RisPath { h_sr: draw(n_rx, n_ris), h_ts: draw(n_ris, n_tx) })
            .collect();
        Self { h0, paths, delays: None }
    }

    pub fn ris_count(&self) -> usize {
        self.paths.len()
    }

    pub fn n_rx(&self) -> usize {
        self.h0.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.h0.ncols()
    }

    pub fn n_ris(&self) -> usize {
        self.paths.first().map_or(0, |p| p.h_sr.ncols())
    }
}

/// Frame timing and power: T = P·Q symbols at pilot energy Es with noise
/// spectral density N0, all randomness derived from `seed`.
#[derive(Debug, Clone, Copy)]
pub struct FrameConfig {
    pub p: usize,
    pub q: usize,
    pub es: f64,
    pub n0: f64,
    pub seed: u64,
}

impl FrameConfig {
    pub fn new(p: usize, q: usize, es: f64, n0: f64, seed: u64) -> Result<Self, AirlinkError> {
        if p == 0 || q == 0 {
            return Err(AirlinkError::DimensionMismatch("P and Q must be positive".into()));
        }
        if es <= 0.0 || n0 < 0.0 || !es.is_finite() || !n0.is_finite() {
            return Err(AirlinkError::DimensionMismatch(format!(
                "need Es > 0 and N0 >= 0, got Es={es}, N0={n0}"
            )));
        }
        Ok(Self { p, q, es, n0, seed })
    }

    pub fn total_symbols(&self) -> usize {
        self.p * self.q
    }
}

/// The slow-varying beamforming profiles ζ_{k,q}, one exponent vector of
/// length N_ris per (RIS k = 1..=K, slot q).
#[derive(Debug, Clone)]
pub struct SlowProfileSet {
    profiles: Vec<Vec<Vec<u32>>>,
    modulus: u32,
}

impl SlowProfileSet {
    pub fn from_exponents(profiles: Vec<Vec<Vec<u32>>>, modulus: u32) -> Result<Self, AirlinkError> {
        if modulus < 2 {
            return Err(AirlinkError::DimensionMismatch(format!(
                "resolution must be at least 2, got {modulus}"
            )));
        }
        for (k, slots) in profiles.iter().enumerate() {
            for (q, zeta) in slots.iter().enumerate() {
                if let Some(&e) = zeta.iter().find(|&&e| e >= modulus) {
                    return Err(AirlinkError::DimensionMismatch(format!(
                        "profile (k={}, q={q}) exponent {e} out of range",
                        k + 1
                    )));
                }
            }
        }
        Ok(Self { profiles, modulus })
    }

    pub fn random<R: Rng>(k: usize, q: usize, n_ris: usize, modulus: u32, rng: &mut R) -> Self {
        let profiles = (0..k)
            .map(|_| {
                (0..q)
                    .map(|_| (0..n_ris).map(|_| rng.gen_range(0..modulus)).collect())
                    .collect()
            })
            .collect();
        Self { profiles, modulus }
    }

    pub fn ris_count(&self) -> usize {
        self.profiles.len()
    }

    pub fn slot_count(&self) -> usize {
        self.profiles.first().map_or(0, Vec::len)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// ζ_{k,q} for k in 1..=K.
    pub fn profile(&self, k: usize, q: usize) -> Result<&[u32], AirlinkError> {
        self.profiles
            .get(k.wrapping_sub(1))
            .and_then(|slots| slots.get(q))
            .map(Vec::as_slice)
            .ok_or_else(|| AirlinkError::IndexOutOfRange(format!("profile (k={k}, q={q})")))
    }
}

/// Despread per-path observations z_{k,q} with their effective noise
/// variance P·N0.
#[derive(Debug, Clone)]
pub struct DespreadBlock {
    z: Vec<Vec<Array1<Complex64>>>,
    pub effective_noise_var: f64,
}

impl DespreadBlock {
    pub fn z(&self, k: usize, q: usize) -> &Array1<Complex64> {
        &self.z[k][q]
    }

    pub fn path_count(&self) -> usize {
        self.z.len()
    }

    pub fn slot_count(&self) -> usize {
        self.z.first().map_or(0, Vec::len)
    }
}

fn root_table(modulus: u32) -> Vec<Complex64> {
    (0..modulus)
        .map(|e| UnitRoot::new(e, modulus).expect("e < modulus").value())
        .collect()
}

/// The composed profile γ_{k,t} = β_{k,p}·ζ_{k,q} with p = t mod P and
/// q = (t − p)/P; closure keeps it inside T_R.
pub fn compose_profile(
    code: &PhaseCodeMatrix,
    zeta: &SlowProfileSet,
    k: usize,
    t: usize,
) -> Result<Vec<UnitRoot>, AirlinkError> {
    if code.resolution() != zeta.modulus() {
        return Err(AirlinkError::DimensionMismatch(format!(
            "code resolution {} vs profile resolution {}",
            code.resolution(),
            zeta.modulus()
        )));
    }
    if k == 0 || k > code.ris_count() {
        return Err(AirlinkError::IndexOutOfRange(format!("RIS index k={k}")));
    }
    let p_len = code.code_len();
    let p = t % p_len;
    let q = t / p_len;
    let profile = zeta.profile(k, q)?;
    let beta = code.row(k)[p];
    let r = code.resolution();
    Ok(profile
        .iter()
        .map(|&e| UnitRoot::new((e + beta) % r, r).expect("reduced exponent"))
        .collect())
}

/// Simulates one frame: y_t = (H0 + Σ_k H_k(γ_{k,t}))·√Es·1 + ν_t with
/// ν_t i.i.d. CN(0, N0·I) from the seeded stream. Deterministic given the
/// seed in `cfg`.
pub fn simulate_frame(
    ch: &ChannelSet,
    code: &PhaseCodeMatrix,
    zeta: &SlowProfileSet,
    cfg: &FrameConfig,
) -> Result<Vec<Array1<Complex64>>, AirlinkError> {
    if code.ris_count() != ch.ris_count() || zeta.ris_count() != ch.ris_count() {
        return Err(AirlinkError::DimensionMismatch(format!(
            "code serves {} RISs, profiles {}, channel has {}",
            code.ris_count(),
            zeta.ris_count(),
            ch.ris_count()
        )));
    }
    if cfg.p != code.code_len() {
        return Err(AirlinkError::DimensionMismatch(format!(
            "config P={} vs code length {}",
            cfg.p,
            code.code_len()
        )));
    }
    if ch.ris_count() > 0 {
        if zeta.slot_count() != cfg.q {
            return Err(AirlinkError::DimensionMismatch(format!(
                "config Q={} vs {} profile slots",
                cfg.q,
                zeta.slot_count()
            )));
        }
        if zeta.modulus() != code.resolution() {
            return Err(AirlinkError::DimensionMismatch(format!(
                "code resolution {} vs profile resolution {}",
                code.resolution(),
                zeta.modulus()
            )));
        }
    }

    let sqrt_es = cfg.es.sqrt();
    let ones_tx = Array1::from_elem(ch.n_tx(), Complex64::new(1.0, 0.0));
    let h0_ones = ch.h0.dot(&ones_tx);
    // TX-side factors do not depend on t.
    let ts_ones: Vec<Array1<Complex64>> =
        ch.paths.iter().map(|p| p.h_ts.dot(&ones_tx)).collect();
    let roots = root_table(code.resolution());
    let r = code.resolution();

    let mut noise_rng = rng::seeded_rng(cfg.seed, "frame-noise", 0);
    let mut frame = Vec::with_capacity(cfg.total_symbols());
    for t in 0..cfg.total_symbols() {
        let p = t % cfg.p;
        let q = t / cfg.p;
        let mut y = h0_ones.clone();
        for (k, path) in ch.paths.iter().enumerate() {
            let beta = code.row(k + 1)[p];
            let profile = zeta.profile(k + 1, q)?;
            if profile.len() != ts_ones[k].len() {
                return Err(AirlinkError::DimensionMismatch(format!(
                    "profile length {} vs {} RIS elements",
                    profile.len(),
                    ts_ones[k].len()
                )));
            }
            let modulated = Array1::from_iter(
                profile
                    .iter()
                    .zip(ts_ones[k].iter())
                    .map(|(&e, v)| v * roots[((e + beta) % r) as usize]),
            );
            y = y + path.h_sr.dot(&modulated);
        }
        y.mapv_inplace(|v| v * sqrt_es);
        if cfg.n0 > 0.0 {
            for v in y.iter_mut() {
                *v += rng::complex_gaussian(&mut noise_rng, cfg.n0);
            }
        }
        frame.push(y);
    }
    Ok(frame)
}

/// Despreads a frame: z_{k,q} = Σ_p conj(β_{k,p})·y_{qP+p}.
pub fn despread(
    frame: &[Array1<Complex64>],
    code: &PhaseCodeMatrix,
    cfg: &FrameConfig,
) -> Result<DespreadBlock, AirlinkError> {
    if frame.len() != cfg.total_symbols() {
        return Err(AirlinkError::DimensionMismatch(format!(
            "frame has {} symbols, config says {}",
            frame.len(),
            cfg.total_symbols()
        )));
    }
    if cfg.p != code.code_len() {
        return Err(AirlinkError::DimensionMismatch(format!(
            "config P={} vs code length {}",
            cfg.p,
            code.code_len()
        )));
    }
    let roots = root_table(code.resolution());
    let r = code.resolution();
    let n_rx = frame.first().map_or(0, Array1::len);
    let z = (0..=code.ris_count())
        .map(|k| {
            (0..cfg.q)
                .map(|q| {
                    let mut acc = Array1::from_elem(n_rx, Complex64::new(0.0, 0.0));
                    for p in 0..cfg.p {
                        let conj = roots[((r - code.row(k)[p]) % r) as usize];
                        acc.zip_mut_with(&frame[q * cfg.p + p], |a, y| *a += conj * y);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(DespreadBlock { z, effective_noise_var: cfg.p as f64 * cfg.n0 })
}

/// Direct evaluation of one path's response to its slow profile:
/// H_0·1 for k = 0, H_sr·diag(ζ_{k,q})·H_ts·1 for k >= 1. This is the
/// oracle a noiseless despread output must match after normalizing by
/// P·√Es.
pub fn path_response(
    ch: &ChannelSet,
    zeta: &SlowProfileSet,
    k: usize,
    q: usize,
) -> Result<Array1<Complex64>, AirlinkError> {
    let ones_tx = Array1::from_elem(ch.n_tx(), Complex64::new(1.0, 0.0));
    if k == 0 {
        return Ok(ch.h0.dot(&ones_tx));
    }
    let path = ch
        .paths
        .get(k - 1)
        .ok_or_else(|| AirlinkError::IndexOutOfRange(format!("path {k}")))?;
    let profile = zeta.profile(k, q)?;
    let roots = root_table(zeta.modulus());
    let ts = path.h_ts.dot(&ones_tx);
    let modulated = Array1::from_iter(
        profile.iter().zip(ts.iter()).map(|(&e, v)| v * roots[e as usize]),
    );
    Ok(path.h_sr.dot(&modulated))
}

/// Maps a unit-magnitude complex value to the closest element of T_R,
/// breaking exact ties toward the smaller exponent. Closest in chord
/// distance is closest in angle, so this works on the angle index
/// directly.
pub fn quantize_to_roots(value: Complex64, r: u32) -> Result<UnitRoot, AirlinkError> {
    use std::f64::consts::TAU;
    let magnitude = value.norm();
    if (magnitude - 1.0).abs() > 1e-9 {
        return Err(AirlinkError::NonUnitInput { magnitude });
    }
    let mut theta = value.arg();
    if theta < 0.0 {
        theta += TAU;
    }
    let x = (theta / TAU * r as f64).min(r as f64);
    let lo = (x.floor() as u32).min(r - 1);
    let hi = (lo + 1) % r;
    let frac = x - lo as f64;
    let best = if frac < 0.5 {
        lo
    } else if frac > 0.5 {
        hi
    } else {
        lo.min(hi)
    };
    Ok(UnitRoot::new(best, r).expect("best < r"))
}

/// The first `rows` rows of F_p, each entry mapped to the closest point of
/// T_R. This is the benchmark code that ignores the RIS phase resolution
/// at design time.
pub fn quantized_dft_code(rows: usize, p: u32, r: u32) -> Result<PhaseCodeMatrix, AirlinkError> {
    use std::f64::consts::TAU;
    if rows == 0 || rows > p as usize {
        return Err(AirlinkError::IndexOutOfRange(format!("{rows} rows of F_{p}")));
    }
    let mut out = Vec::with_capacity(rows);
    for k in 0..rows as u32 {
        let mut row = Vec::with_capacity(p as usize);
        for d in 0..p {
            let theta = -TAU * (k as f64) * (d as f64) / p as f64;
            let value = Complex64::new(theta.cos(), theta.sin());
            row.push(quantize_to_roots(value, r)?.exponent());
        }
        out.push(row);
    }
    PhaseCodeMatrix::from_rows(out, r)
        .map_err(|e| AirlinkError::DimensionMismatch(e.to_string()))
}

/// Normalized cross-correlation magnitudes |Σ_p β_{k,p} β*_{k',p}|/P.
/// Pairs that cancel exactly (by the algebraic test) are reported as an
/// exact 0.0; everything else is evaluated numerically.
pub fn leakage_matrix(code: &PhaseCodeMatrix) -> Vec<Vec<f64>> {
    let n = code.ris_count() + 1;
    let p = code.code_len() as f64;
    let r = code.resolution();
    let mut out = vec![vec![0.0; n]; n];
    for a in 0..n {
        out[a][a] = 1.0;
        for b in (a + 1)..n {
            let mut s = RootSum::new(r).expect("r >= 2");
            for (&ea, &eb) in code.row(a).iter().zip(code.row(b)) {
                s.add_exponent((ea + r - eb) % r, 1);
            }
            let leak = if s.is_zero() { 0.0 } else { s.value().norm() / p };
            out[a][b] = leak;
            out[b][a] = leak;
        }
    }
    out
}

/// Mean squared error per path between the normalized despread outputs
/// z_{k,q}/(P√Es) and the direct per-path responses, averaged over slots
/// and receive antennas.
pub fn channel_mse(
    est: &DespreadBlock,
    truth: &ChannelSet,
    zeta: &SlowProfileSet,
    cfg: &FrameConfig,
) -> Result<Vec<f64>, AirlinkError> {
    let scale = 1.0 / (cfg.p as f64 * cfg.es.sqrt());
    let mut out = Vec::with_capacity(est.path_count());
    for k in 0..est.path_count() {
        let mut acc = 0.0;
        let mut count = 0usize;
        for q in 0..est.slot_count() {
            let resp = path_response(truth, zeta, k, q)?;
            let z = est.z(k, q);
            for (zi, ri) in z.iter().zip(resp.iter()) {
                acc += (zi * scale - ri).norm_sqr();
                count += 1;
            }
        }
        out.push(acc / count.max(1) as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{design_code, dft_code};
    use approx::assert_relative_eq;

    fn ones_code(p: usize, r: u32) -> PhaseCodeMatrix {
        PhaseCodeMatrix::from_rows(vec![vec![0; p]], r).unwrap()
    }

    #[test]
    fn compose_identity_beta_returns_zeta() {
        let code = dft_code(2, 2).unwrap();
        let mut rng = rng::seeded_rng(5, "zeta", 0);
        let zeta = SlowProfileSet::random(1, 2, 4, 2, &mut rng);
        // t = 0 selects p = 0 where every row is the identity root.
        let gamma = compose_profile(&code, &zeta, 1, 0).unwrap();
        let expected: Vec<u32> = zeta.profile(1, 0).unwrap().to_vec();
        let got: Vec<u32> = gamma.iter().map(UnitRoot::exponent).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn compose_negation_flips_all_ones() {
        let code = dft_code(2, 2).unwrap();
        let zeta = SlowProfileSet::from_exponents(vec![vec![vec![0, 0, 0]]], 2).unwrap();
        // t = 1: p = 1, β_{1,1} = -1.
        let gamma = compose_profile(&code, &zeta, 1, 1).unwrap();
        assert!(gamma.iter().all(|g| g.exponent() == 1));
    }

    #[test]
    fn slot_indexing_follows_t_mod_p() {
        let code = dft_code(4, 4).unwrap();
        let zeta = SlowProfileSet::from_exponents(
            vec![vec![vec![0, 0], vec![1, 1]]], // q = 0 and q = 1 differ
            4,
        )
        .unwrap();
        // t = 7, P = 4 → p = 3, q = 1: β_{1,3} = exponent (-3 mod 4) = 1,
        // composed with ζ exponent 1 gives 2.
        let gamma = compose_profile(&code, &zeta, 1, 7).unwrap();
        assert_eq!(gamma[0].exponent(), 2);
    }

    #[test]
    fn noiseless_direct_only_frame_is_constant() {
        let mut rng = rng::seeded_rng(1, "ch", 0);
        let ch = ChannelSet::random_iid(0, 3, 2, 4, &mut rng);
        let code = ones_code(4, 2);
        let zeta = SlowProfileSet::from_exponents(vec![], 2).unwrap();
        let cfg = FrameConfig::new(4, 2, 4.0, 0.0, 9).unwrap();
        let frame = simulate_frame(&ch, &code, &zeta, &cfg).unwrap();
        let ones = Array1::from_elem(2, Complex64::new(1.0, 0.0));
        let expected = ch.h0.dot(&ones).mapv(|v| v * 2.0);
        for y in frame {
            for (a, b) in y.iter().zip(expected.iter()) {
                assert_relative_eq!(a.re, b.re, max_relative = 1e-14);
                assert_relative_eq!(a.im, b.im, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn scaling_profile_scales_path_contribution() {
        let mut rng = rng::seeded_rng(2, "ch", 0);
        let ch = ChannelSet::random_iid(1, 2, 2, 6, &mut rng);
        let r = 4;
        let base = SlowProfileSet::from_exponents(vec![vec![vec![0, 1, 2, 3, 0, 1]]], r).unwrap();
        let h = 3u32; // multiply every element by e^{j2π·3/4}
        let scaled = SlowProfileSet::from_exponents(
            vec![vec![base.profile(1, 0).unwrap().iter().map(|&e| (e + h) % r).collect()]],
            r,
        )
        .unwrap();
        let resp = path_response(&ch, &base, 1, 0).unwrap();
        let resp_scaled = path_response(&ch, &scaled, 1, 0).unwrap();
        let h_val = UnitRoot::new(h, r).unwrap().value();
        for (a, b) in resp_scaled.iter().zip(resp.iter()) {
            assert!((a - h_val * b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn f2_despreading_isolates_the_direct_path() {
        // Single RIS with the F_2 code: y_0 + y_1 cancels the RIS path.
        let mut rng = rng::seeded_rng(3, "ch", 0);
        let ch = ChannelSet::random_iid(1, 2, 1, 3, &mut rng);
        let code = dft_code(2, 2).unwrap();
        let zeta = SlowProfileSet::random(1, 1, 3, 2, &mut rng);
        let cfg = FrameConfig::new(2, 1, 1.0, 0.0, 4).unwrap();
        let frame = simulate_frame(&ch, &code, &zeta, &cfg).unwrap();
        let sum = &frame[0] + &frame[1];
        let ones = Array1::from_elem(1, Complex64::new(1.0, 0.0));
        let expected = ch.h0.dot(&ones).mapv(|v| v * 2.0);
        for (a, b) in sum.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        }
        // And the despreader computes exactly that sum for path 0.
        let block = despread(&frame, &code, &cfg).unwrap();
        for (a, b) in block.z(0, 0).iter().zip(sum.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn noiseless_despreading_recovers_each_path() {
        let mut rng = rng::seeded_rng(7, "ch", 0);
        for k in 1..=4usize {
            let outcome = design_code(k as u32, 4).unwrap();
            let p = outcome.code.code_len();
            let ch = ChannelSet::random_iid(k, 2, 3, 5, &mut rng);
            let zeta = SlowProfileSet::random(k, 2, 5, 4, &mut rng);
            let cfg = FrameConfig::new(p, 2, 2.0, 0.0, 11).unwrap();
            let frame = simulate_frame(&ch, &outcome.code, &zeta, &cfg).unwrap();
            let block = despread(&frame, &outcome.code, &cfg).unwrap();
            let scale = 1.0 / (p as f64 * cfg.es.sqrt());
            for path in 0..=k {
                for q in 0..2 {
                    let truth = path_response(&ch, &zeta, path, q).unwrap();
                    let err: f64 = block
                        .z(path, q)
                        .iter()
                        .zip(truth.iter())
                        .map(|(z, t)| (z * scale - t).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    let norm: f64 =
                        truth.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
                    assert!(err <= 1e-12 * norm, "k={k} path={path} err={err:e}");
                }
            }
        }
    }

    #[test]
    fn identical_seeds_reproduce_frames_bitwise() {
        let mut rng = rng::seeded_rng(8, "ch", 0);
        let ch = ChannelSet::random_iid(2, 2, 2, 4, &mut rng);
        let outcome = design_code(2, 4).unwrap();
        let zeta = SlowProfileSet::random(2, 1, 4, 4, &mut rng);
        let cfg = FrameConfig::new(outcome.code.code_len(), 1, 1.0, 0.1, 77).unwrap();
        let f1 = simulate_frame(&ch, &outcome.code, &zeta, &cfg).unwrap();
        let f2 = simulate_frame(&ch, &outcome.code, &zeta, &cfg).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn quantize_examples() {
        let e = |theta: f64| Complex64::new(theta.cos(), theta.sin());
        let tau = std::f64::consts::TAU;
        // 30 degrees is closer to +1 than to -1.
        assert_eq!(quantize_to_roots(e(tau / 12.0), 2).unwrap().exponent(), 0);
        // An exact grid point maps to itself.
        assert_eq!(quantize_to_roots(e(std::f64::consts::PI), 2).unwrap().exponent(), 1);
        // 0.26 turns rounds to the quarter turn.
        assert_eq!(quantize_to_roots(e(tau * 0.26), 4).unwrap().exponent(), 1);
        // Exact tie at the imaginary unit breaks toward the smaller exponent.
        assert_eq!(quantize_to_roots(Complex64::new(0.0, 1.0), 2).unwrap().exponent(), 0);
        assert!(matches!(
            quantize_to_roots(Complex64::new(0.5, 0.0), 4),
            Err(AirlinkError::NonUnitInput { .. })
        ));
    }

    #[test]
    fn leakage_of_verified_code_is_identity() {
        let outcome = design_code(3, 2).unwrap();
        let leak = leakage_matrix(&outcome.code);
        for (a, row) in leak.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if a == b {
                    assert_eq!(v, 1.0);
                } else {
                    assert_eq!(v, 0.0, "leakage ({a},{b}) must be exactly zero");
                }
            }
        }
    }

    #[test]
    fn quantized_dft_leaks_and_fails_verification() {
        let quant = quantized_dft_code(9, 12, 2).unwrap();
        assert!(!crate::codes::verify_code(&quant).pass());
        let leak = leakage_matrix(&quant);
        let max_off = (0..9)
            .flat_map(|a| (0..9).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| leak[a][b])
            .fold(0.0f64, f64::max);
        assert!(max_off > 0.0);
    }

    #[test]
    fn quantization_leakage_shrinks_with_resolution() {
        let mean_off = |r: u32| {
            let quant = quantized_dft_code(12, 12, r).unwrap();
            let leak = leakage_matrix(&quant);
            let mut acc = 0.0;
            let mut n = 0;
            for a in 0..12 {
                for b in 0..12 {
                    if a != b {
                        acc += leak[a][b];
                        n += 1;
                    }
                }
            }
            acc / n as f64
        };
        assert!(mean_off(2) > mean_off(64));
    }
}
