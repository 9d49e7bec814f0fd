//! Desk-scale wideband localization experiment.
//!
//! OFDM pilots travel from a base station to receivers directly and via K
//! RISs. After despreading separates the paths, each path's time of
//! arrival is extracted from its frequency-domain ramp, and every RIS
//! position is recovered by least squares on range-sum (ellipse)
//! constraints. Methods compared: the proposed exactly-orthogonal binary
//! code, quantized-DFT benchmarks at several resolutions, and a genie that
//! observes each path with no others present.

pub mod experiment;
pub mod localize;
pub mod stats;
pub mod toa;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentResult, MethodSpec};
pub use localize::{localize_ris, LocalizeResult};
pub use toa::{ToaEstimate, ToaEstimator};

use crate::airlink::AirlinkError;
use crate::codes::CodesError;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error)]
pub enum LocexpError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Airlink(#[from] AirlinkError),
    #[error(transparent)]
    Codes(#[from] CodesError),
}

/// Node positions in meters. The base station transmits, the RISs reflect,
/// the receivers listen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Geometry {
    pub bs: [f64; 3],
    pub ris: Vec<[f64; 3]>,
    pub rx: Vec<[f64; 3]>,
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

impl Geometry {
    /// The reference layout: BS at the origin, K RISs on a radius-10 m
    /// circle in the z = −3 m plane starting at (10, 0, −3), and three
    /// receivers on the same circle in the z = +1 m plane at 30°, 150°,
    /// and 270°.
    pub fn reference_layout(k: usize) -> Self {
        let ris = (0..k)
            .map(|i| {
                let angle = TAU * i as f64 / k as f64;
                [10.0 * angle.cos(), 10.0 * angle.sin(), -3.0]
            })
            .collect();
        let rx = [30.0f64, 150.0, 270.0]
            .iter()
            .map(|deg| {
                let angle = deg.to_radians();
                [10.0 * angle.cos(), 10.0 * angle.sin(), 1.0]
            })
            .collect();
        Self { bs: [0.0, 0.0, 0.0], ris, rx }
    }

    pub fn validate(&self) -> Result<(), LocexpError> {
        let mut nodes = vec![self.bs];
        nodes.extend_from_slice(&self.ris);
        nodes.extend_from_slice(&self.rx);
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if dist(nodes[i], nodes[j]) < 1e-9 {
                    return Err(LocexpError::Geometry(format!(
                        "nodes {i} and {j} are coincident"
                    )));
                }
            }
        }
        if self.rx.len() < 3 {
            return Err(LocexpError::Geometry(format!(
                "need at least 3 receivers, got {}",
                self.rx.len()
            )));
        }
        Ok(())
    }
}

/// OFDM numerology and per-subcarrier power. Path delays must stay below
/// 1/Δf to be unambiguous.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OfdmConfig {
    pub n_sc: usize,
    pub delta_f_hz: f64,
    pub carrier_hz: f64,
    pub es: f64,
    pub n0: f64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self { n_sc: 3000, delta_f_hz: 120e3, carrier_hz: 28e9, es: 1.0, n0: 1e-15 }
    }
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<(), LocexpError> {
        if self.n_sc < 2 {
            return Err(LocexpError::Config(format!("need n_sc >= 2, got {}", self.n_sc)));
        }
        if self.delta_f_hz <= 0.0 || self.carrier_hz <= 0.0 || self.es <= 0.0 || self.n0 < 0.0 {
            return Err(LocexpError::Config(
                "delta_f, carrier, and Es must be positive; N0 nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }
}

/// One propagation path: geometric delay, complex gain at the carrier, and
/// (for RIS paths) per-element carrier-phase factors combining the TX-side
/// and RX-side segments. Element apertures are small against the delay
/// resolution, so per-element delays collapse onto the center delay while
/// carrier phases keep the exact per-element path lengths.
#[derive(Debug, Clone)]
pub struct PathWave {
    pub delay_s: f64,
    pub gain: Complex64,
    pub element_factors: Option<Vec<Complex64>>,
}

/// Frequency-structured channel between the BS and one receiver.
#[derive(Debug, Clone)]
pub struct WidebandChannel {
    pub paths: Vec<PathWave>, // index 0 is the uncontrolled path
    pub delta_f_hz: f64,
}

fn friis_amplitude(wavelength: f64, distance: f64) -> f64 {
    wavelength / (4.0 * std::f64::consts::PI * distance)
}

fn carrier_phase(carrier_hz: f64, length_m: f64) -> Complex64 {
    let theta = -TAU * carrier_hz * length_m / SPEED_OF_LIGHT;
    Complex64::new(theta.cos(), theta.sin())
}

/// Positions of a square half-wavelength-spaced RIS panel centered at
/// `center`, oriented broadside toward the base station.
fn element_positions(
    center: [f64; 3],
    toward: [f64; 3],
    n_ris: usize,
    spacing: f64,
) -> Result<Vec<[f64; 3]>, LocexpError> {
    let side = (n_ris as f64).sqrt().round() as usize;
    if side * side != n_ris {
        return Err(LocexpError::Config(format!(
            "n_ris must be a perfect square for the panel layout, got {n_ris}"
        )));
    }
    let mut w = [toward[0] - center[0], toward[1] - center[1], toward[2] - center[2]];
    let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    if norm < 1e-9 {
        return Err(LocexpError::Geometry("RIS coincides with the BS".into()));
    }
    for v in &mut w {
        *v /= norm;
    }
    // In-plane basis: u ⊥ w in the horizontal plane when possible.
    let mut u = [w[1], -w[0], 0.0];
    let un = (u[0] * u[0] + u[1] * u[1]).sqrt();
    if un < 1e-9 {
        u = [1.0, 0.0, 0.0];
    } else {
        u[0] /= un;
        u[1] /= un;
    }
    let v = [
        w[1] * u[2] - w[2] * u[1],
        w[2] * u[0] - w[0] * u[2],
        w[0] * u[1] - w[1] * u[0],
    ];
    let half = (side as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(n_ris);
    for i in 0..side {
        for j in 0..side {
            let a = (i as f64 - half) * spacing;
            let b = (j as f64 - half) * spacing;
            out.push([
                center[0] + a * u[0] + b * v[0],
                center[1] + a * u[1] + b * v[1],
                center[2] + a * u[2] + b * v[2],
            ]);
        }
    }
    Ok(out)
}

/// Builds the wideband channel for one receiver: geometric delays, Friis
/// gains at the carrier, and per-element phase factors.
/// `los_attenuation_db` additionally attenuates the uncontrolled path
/// (obstructed line of sight).
pub fn synth_wideband_channel(
    geom: &Geometry,
    ofdm: &OfdmConfig,
    rx_index: usize,
    n_ris: usize,
    los_attenuation_db: f64,
) -> Result<WidebandChannel, LocexpError> {
    ofdm.validate()?;
    let rx = *geom
        .rx
        .get(rx_index)
        .ok_or_else(|| LocexpError::Geometry(format!("no receiver {rx_index}")))?;
    let lambda = ofdm.wavelength();
    let spacing = lambda / 2.0;

    let d0 = dist(geom.bs, rx);
    let los_scale = 10f64.powf(-los_attenuation_db / 20.0);
    let mut paths = vec![PathWave {
        delay_s: d0 / SPEED_OF_LIGHT,
        gain: carrier_phase(ofdm.carrier_hz, d0) * friis_amplitude(lambda, d0) * los_scale,
        element_factors: None,
    }];

    for &ris in &geom.ris {
        let elements = element_positions(ris, geom.bs, n_ris, spacing)?;
        let d1 = dist(geom.bs, ris);
        let d2 = dist(ris, rx);
        let delay_s = (d1 + d2) / SPEED_OF_LIGHT;
        let gain = Complex64::new(friis_amplitude(lambda, d1) * friis_amplitude(lambda, d2), 0.0);
        let factors = elements
            .iter()
            .map(|&e| carrier_phase(ofdm.carrier_hz, dist(geom.bs, e) + dist(e, rx)))
            .collect();
        paths.push(PathWave { delay_s, gain, element_factors: Some(factors) });
    }

    let max_delay = paths.iter().map(|p| p.delay_s).fold(0.0, f64::max);
    if max_delay >= 1.0 / ofdm.delta_f_hz {
        return Err(LocexpError::Config(format!(
            "max path delay {max_delay:.3e} s is ambiguous at Δf = {} Hz",
            ofdm.delta_f_hz
        )));
    }
    Ok(WidebandChannel { paths, delta_f_hz: ofdm.delta_f_hz })
}

impl WidebandChannel {
    /// Complex amplitude of every path once the slow profiles are applied:
    /// the uncontrolled gain, then gain_k · Σ_e ζ_k[e] · factor_k[e].
    pub fn path_amplitudes(&self, zeta: &[Vec<u32>], modulus: u32) -> Vec<Complex64> {
        let roots: Vec<Complex64> = (0..modulus)
            .map(|e| {
                let theta = TAU * e as f64 / modulus as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        self.paths
            .iter()
            .enumerate()
            .map(|(k, path)| match &path.element_factors {
                None => path.gain,
                Some(factors) => {
                    let sum: Complex64 = factors
                        .iter()
                        .zip(&zeta[k - 1])
                        .map(|(f, &e)| f * roots[e as usize])
                        .sum();
                    path.gain * sum
                }
            })
            .collect()
    }

    /// Per-subcarrier delay ramps e^{−j2πnΔfτ_k}, one vector per path.
    pub fn ramps(&self, n_sc: usize) -> Vec<Vec<Complex64>> {
        self.paths
            .iter()
            .map(|path| {
                let step = -TAU * self.delta_f_hz * path.delay_s;
                (0..n_sc)
                    .map(|n| {
                        let theta = step * n as f64;
                        Complex64::new(theta.cos(), theta.sin())
                    })
                    .collect()
            })
            .collect()
    }

    /// Materializes the subcarrier-n channel as a single-antenna
    /// [`crate::airlink::ChannelSet`]: the whole per-path product sits in
    /// the RIS→RX factor and the TX→RIS factor is all-ones.
    pub fn channel_set_at(&self, n: usize) -> Result<crate::airlink::ChannelSet, LocexpError> {
        let ramp = |delay: f64| {
            let theta = -TAU * self.delta_f_hz * delay * n as f64;
            Complex64::new(theta.cos(), theta.sin())
        };
        let h0 = Array2::from_elem((1, 1), self.paths[0].gain * ramp(self.paths[0].delay_s));
        let paths = self.paths[1..]
            .iter()
            .map(|p| {
                let factors = p.element_factors.as_ref().expect("RIS paths carry factors");
                let row: Vec<Complex64> =
                    factors.iter().map(|f| p.gain * f * ramp(p.delay_s)).collect();
                let n_ris = row.len();
                crate::airlink::RisPath {
                    h_sr: Array2::from_shape_vec((1, n_ris), row).expect("row shape"),
                    h_ts: Array2::from_elem((n_ris, 1), Complex64::new(1.0, 0.0)),
                }
            })
            .collect();
        let delays = self.paths.iter().map(|p| p.delay_s).collect();
        crate::airlink::ChannelSet::new(h0, paths, Some(delays)).map_err(LocexpError::from)
    }
}

/// Frequency response of path k at subcarrier n for the given profile
/// amplitudes; exposed for tests that cross-check the factored fast path
/// against the materialized per-subcarrier channel.
pub fn path_response_at(
    ch: &WidebandChannel,
    amplitudes: &[Complex64],
    k: usize,
    n: usize,
) -> Complex64 {
    let theta = -TAU * ch.delta_f_hz * ch.paths[k].delay_s * n as f64;
    amplitudes[k] * Complex64::new(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_layout_matches_description() {
        let g = Geometry::reference_layout(8);
        assert_eq!(g.ris.len(), 8);
        assert_eq!(g.rx.len(), 3);
        assert_relative_eq!(g.ris[0][0], 10.0);
        assert_relative_eq!(g.ris[0][2], -3.0);
        for r in &g.ris {
            assert_relative_eq!((r[0] * r[0] + r[1] * r[1]).sqrt(), 10.0, epsilon = 1e-12);
        }
        for r in &g.rx {
            assert_relative_eq!(r[2], 1.0);
        }
        g.validate().unwrap();
    }

    #[test]
    fn direct_delay_is_distance_over_c() {
        let geom = Geometry {
            bs: [0.0, 0.0, 0.0],
            ris: vec![[5.0, 0.0, 0.0]],
            rx: vec![[3.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 3.0]],
        };
        let ofdm = OfdmConfig::default();
        let ch = synth_wideband_channel(&geom, &ofdm, 0, 16, 0.0).unwrap();
        // 3 m of free space: almost exactly 10 ns.
        assert_relative_eq!(ch.paths[0].delay_s, 3.0 / SPEED_OF_LIGHT);
        assert!((ch.paths[0].delay_s - 10e-9).abs() < 0.05e-9);
    }

    #[test]
    fn path_delays_follow_geometric_lengths() {
        let geom = Geometry::reference_layout(4);
        let ofdm = OfdmConfig::default();
        let ch = synth_wideband_channel(&geom, &ofdm, 0, 16, 30.0).unwrap();
        for (i, &ris) in geom.ris.iter().enumerate() {
            let len = dist(geom.bs, ris) + dist(ris, geom.rx[0]);
            assert_relative_eq!(ch.paths[i + 1].delay_s, len / SPEED_OF_LIGHT);
            assert!(ch.paths[i + 1].delay_s > ch.paths[0].delay_s);
        }
    }

    #[test]
    fn first_subcarrier_has_no_delay_phase() {
        let geom = Geometry::reference_layout(2);
        let ofdm = OfdmConfig::default();
        let ch = synth_wideband_channel(&geom, &ofdm, 1, 16, 30.0).unwrap();
        let ramps = ch.ramps(4);
        for path_ramp in &ramps {
            assert_relative_eq!(path_ramp[0].re, 1.0);
            assert_relative_eq!(path_ramp[0].im, 0.0);
        }
    }

    #[test]
    fn factored_response_matches_materialized_channel() {
        use crate::airlink::{despread, simulate_frame, FrameConfig, SlowProfileSet};
        use crate::codes::design_code;

        let geom = Geometry::reference_layout(2);
        let ofdm = OfdmConfig { n_sc: 8, ..OfdmConfig::default() };
        let ch = synth_wideband_channel(&geom, &ofdm, 0, 16, 20.0).unwrap();
        let code = design_code(2, 2).unwrap().code;
        let p = code.code_len();

        let zeta_exps: Vec<Vec<u32>> = vec![vec![0; 16], vec![1; 16]];
        let amps = ch.path_amplitudes(&zeta_exps, 2);
        let zeta =
            SlowProfileSet::from_exponents(vec![vec![zeta_exps[0].clone()], vec![zeta_exps[1].clone()]], 2)
                .unwrap();

        for n in [0usize, 3, 7] {
            let cs = ch.channel_set_at(n).unwrap();
            let cfg = FrameConfig::new(p, 1, 1.0, 0.0, 1).unwrap();
            let frame = simulate_frame(&cs, &code, &zeta, &cfg).unwrap();
            let block = despread(&frame, &code, &cfg).unwrap();
            for k in 0..=2usize {
                let expected = path_response_at(&ch, &amps, k, n) * p as f64;
                let got = block.z(k, 0)[0];
                assert!(
                    (got - expected).norm() <= 1e-10 * expected.norm().max(1e-30),
                    "n={n} k={k}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn non_square_panel_is_rejected() {
        let geom = Geometry::reference_layout(1);
        let ofdm = OfdmConfig::default();
        assert!(synth_wideband_channel(&geom, &ofdm, 0, 12, 0.0).is_err());
    }
}
