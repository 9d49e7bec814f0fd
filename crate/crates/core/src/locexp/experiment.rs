//! The localization experiment: repeated random slow profiles, per-method
//! pilot simulation and despreading, TOA extraction, and multilateration
//! of every RIS.
//!
//! All methods within a realization share the same slow-profile source
//! randomness and the same noise draws (common random numbers), so CDF
//! comparisons are variance-reduced.

use super::localize::localize_ris;
use super::toa::ToaEstimator;
use super::{dist, synth_wideband_channel, Geometry, LocexpError, OfdmConfig, SPEED_OF_LIGHT};
use crate::airlink::rng::{complex_gaussian, seeded_rng};
use crate::airlink::quantized_dft_code;
use crate::codes::{design_code, PhaseCodeMatrix};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A method under comparison. The proposed method designs an exactly
/// orthogonal binary code; the benchmark quantizes DFT rows to T_R; the
/// genie observes each path with every other path switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    Proposed,
    QuantizedDft { r: u32 },
    Genie,
}

impl MethodSpec {
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Proposed => "proposed-r2".into(),
            MethodSpec::QuantizedDft { r } => format!("quant-r{r}"),
            MethodSpec::Genie => "genie".into(),
        }
    }

    /// RIS phase resolution the method operates at.
    pub fn resolution(&self) -> u32 {
        match self {
            MethodSpec::Proposed | MethodSpec::Genie => 2,
            MethodSpec::QuantizedDft { r } => *r,
        }
    }
}

impl std::str::FromStr for MethodSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "proposed-r2" || s == "proposed" {
            return Ok(MethodSpec::Proposed);
        }
        if s == "genie" {
            return Ok(MethodSpec::Genie);
        }
        if let Some(r) = s.strip_prefix("quant-r") {
            let r: u32 = r.parse().map_err(|_| format!("bad method '{s}'"))?;
            if r < 2 {
                return Err(format!("bad method '{s}': resolution must be >= 2"));
            }
            return Ok(MethodSpec::QuantizedDft { r });
        }
        Err(format!("unknown method '{s}' (expected proposed-r2, quant-r<R>, or genie)"))
    }
}

impl Serialize for MethodSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for MethodSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Geometry selection: the built-in reference layout or explicit
/// positions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeometrySpec {
    Named(String),
    Explicit(Geometry),
}

impl GeometrySpec {
    fn resolve(&self, k: usize) -> Result<Geometry, LocexpError> {
        match self {
            GeometrySpec::Named(name) if name == "reference" => {
                Ok(Geometry::reference_layout(k))
            }
            GeometrySpec::Named(name) => {
                Err(LocexpError::Config(format!("unknown geometry '{name}'")))
            }
            GeometrySpec::Explicit(g) => {
                if g.ris.len() != k {
                    return Err(LocexpError::Config(format!(
                        "geometry has {} RIS positions but K = {k}",
                        g.ris.len()
                    )));
                }
                Ok(g.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub k: u32,
    pub n_ris: usize,
    pub realizations: usize,
    pub seed: u64,
    /// Extra attenuation (dB) on the uncontrolled path: an obstructed
    /// line of sight.
    pub los_attenuation_db: f64,
    pub oversample: usize,
    pub ofdm: OfdmConfig,
    pub geometry: GeometrySpec,
    pub methods: Vec<MethodSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 8,
            n_ris: 64,
            realizations: 100,
            seed: 1,
            los_attenuation_db: 35.0,
            oversample: 4,
            ofdm: OfdmConfig::default(),
            geometry: GeometrySpec::Named("reference".into()),
            methods: vec![
                MethodSpec::Proposed,
                MethodSpec::QuantizedDft { r: 2 },
                MethodSpec::QuantizedDft { r: 4 },
                MethodSpec::QuantizedDft { r: 8 },
                MethodSpec::QuantizedDft { r: 16 },
                MethodSpec::QuantizedDft { r: 32 },
                MethodSpec::QuantizedDft { r: 64 },
                MethodSpec::Genie,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorRecord {
    pub realization: usize,
    /// 1-based RIS index.
    pub ris_index: usize,
    pub error_m: f64,
}

#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub spec: MethodSpec,
    pub label: String,
    pub records: Vec<ErrorRecord>,
}

impl MethodOutcome {
    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.error_m).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub methods: Vec<MethodOutcome>,
    /// Code length shared by all methods.
    pub code_len: usize,
}

struct CodeValues {
    beta: Vec<Vec<Complex64>>,
    conj: Vec<Vec<Complex64>>,
}

impl CodeValues {
    fn from_code(code: &PhaseCodeMatrix) -> Self {
        let beta: Vec<Vec<Complex64>> = code
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&e| {
                        crate::cyclotomic::UnitRoot::new(e, code.resolution())
                            .expect("validated exponent")
                            .value()
                    })
                    .collect()
            })
            .collect();
        let conj = beta
            .iter()
            .map(|row| row.iter().map(Complex64::conj).collect())
            .collect();
        Self { beta, conj }
    }
}

/// Runs the full experiment and returns per-method error records in
/// method order. Deterministic given the config (including the seed).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, LocexpError> {
    if cfg.k < 1 {
        return Err(LocexpError::Config("need at least one RIS".into()));
    }
    if cfg.realizations == 0 {
        return Err(LocexpError::Config("need at least one realization".into()));
    }
    if cfg.methods.is_empty() {
        return Err(LocexpError::Config("need at least one method".into()));
    }
    cfg.ofdm.validate()?;
    let geom = cfg.geometry.resolve(cfg.k as usize)?;
    geom.validate()?;
    let k = cfg.k as usize;
    let n_rx = geom.rx.len();
    let n_sc = cfg.ofdm.n_sc;

    let proposed = design_code(cfg.k, 2)?;
    let p = proposed.code.code_len();

    let codes: Vec<(PhaseCodeMatrix, u32)> = cfg
        .methods
        .iter()
        .map(|m| -> Result<_, LocexpError> {
            let code = match m {
                MethodSpec::Proposed | MethodSpec::Genie => proposed.code.clone(),
                MethodSpec::QuantizedDft { r } => quantized_dft_code(k + 1, p as u32, *r)?,
            };
            Ok((code, m.resolution()))
        })
        .collect::<Result<_, _>>()?;
    let code_values: Vec<CodeValues> =
        codes.iter().map(|(c, _)| CodeValues::from_code(c)).collect();

    let channels: Vec<_> = (0..n_rx)
        .map(|i| synth_wideband_channel(&geom, &cfg.ofdm, i, cfg.n_ris, cfg.los_attenuation_db))
        .collect::<Result<_, _>>()?;
    let ramps: Vec<Vec<Vec<Complex64>>> = channels.iter().map(|ch| ch.ramps(n_sc)).collect();

    let toa = ToaEstimator::new(&cfg.ofdm, cfg.oversample)?;
    let sqrt_es = cfg.ofdm.es.sqrt();
    let bs_rx_dist: Vec<f64> = geom.rx.iter().map(|&r| dist(geom.bs, r)).collect();
    // Range sums admit a second solution mirrored toward the receiver
    // side; the RISs are known to sit on the opposite side of the BS
    // plane, so iteration starts there.
    let side_prior = {
        let mut c = [0.0f64; 3];
        for r in &geom.rx {
            for (ci, ri) in c.iter_mut().zip(r) {
                *ci += ri / geom.rx.len() as f64;
            }
        }
        let span = geom.rx.iter().map(|&r| dist(r, c)).fold(0.0, f64::max);
        [c[0], c[1], 2.0 * geom.bs[2] - c[2] - 0.25 * span]
    };

    let mut outcomes: Vec<MethodOutcome> = cfg
        .methods
        .iter()
        .map(|&spec| MethodOutcome { spec, label: spec.label(), records: Vec::new() })
        .collect();

    for realization in 0..cfg.realizations {
        // Slow-profile source randomness, shared by every method and
        // quantized to each method's resolution.
        let mut zrng = seeded_rng(cfg.seed, "slow-profile", realization as u64);
        let uniforms: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..cfg.n_ris).map(|_| zrng.gen::<f64>()).collect())
            .collect();
        // Noise, shared across methods.
        let noise: Vec<Vec<Vec<Complex64>>> = (0..n_rx)
            .map(|i| {
                let mut nrng =
                    seeded_rng(cfg.seed, "noise", (realization * n_rx + i) as u64);
                (0..p)
                    .map(|_| (0..n_sc).map(|_| complex_gaussian(&mut nrng, cfg.ofdm.n0)).collect())
                    .collect()
            })
            .collect();

        for (mi, spec) in cfg.methods.iter().enumerate() {
            let r = codes[mi].1;
            let zeta: Vec<Vec<u32>> = uniforms
                .iter()
                .map(|row| {
                    row.iter().map(|&u| ((u * r as f64) as u32).min(r - 1)).collect()
                })
                .collect();

            // τ̂[rx][path]
            let mut tau = vec![vec![0.0f64; k + 1]; n_rx];
            for rx in 0..n_rx {
                let amps = channels[rx].path_amplitudes(&zeta, r);
                let z = despread_grid(
                    &code_values[mi],
                    &amps,
                    &ramps[rx],
                    &noise[rx],
                    sqrt_es,
                    matches!(spec, MethodSpec::Genie),
                );
                for (path, z_path) in z.iter().enumerate() {
                    tau[rx][path] = toa.estimate(z_path).delay_s;
                }
            }

            for ris in 0..k {
                let sums: Vec<f64> = (0..n_rx)
                    .map(|rx| {
                        SPEED_OF_LIGHT * (tau[rx][ris + 1] - tau[rx][0]) + bs_rx_dist[rx]
                    })
                    .collect();
                let fit = localize_ris(geom.bs, &geom.rx, &sums, Some(side_prior))?;
                outcomes[mi].records.push(ErrorRecord {
                    realization,
                    ris_index: ris + 1,
                    error_m: dist(fit.position, geom.ris[ris]),
                });
            }
        }
    }

    Ok(ExperimentResult { methods: outcomes, code_len: p })
}

/// Simulates one frame across all subcarriers and despreads it:
/// z[path][n] = Σ_p conj(β_path,p)·y_p[n]. In genie mode each path is
/// received alone (same noise), so its observation carries no
/// interference by construction.
fn despread_grid(
    code: &CodeValues,
    amps: &[Complex64],
    ramps: &[Vec<Complex64>],
    noise: &[Vec<Complex64>],
    sqrt_es: f64,
    genie: bool,
) -> Vec<Vec<Complex64>> {
    let paths = amps.len();
    let p = code.beta[0].len();
    let n_sc = ramps[0].len();
    let mut z = vec![vec![Complex64::new(0.0, 0.0); n_sc]; paths];

    if genie {
        for path in 0..paths {
            let zp = &mut z[path];
            // Signal part: Σ_p conjβ·β = P exactly for the path itself.
            let gain = amps[path] * sqrt_es * p as f64;
            for (n, out) in zp.iter_mut().enumerate() {
                *out = gain * ramps[path][n];
            }
            for (t, noise_t) in noise.iter().enumerate() {
                let c = code.conj[path][t];
                for (out, nv) in zp.iter_mut().zip(noise_t) {
                    *out += c * nv;
                }
            }
        }
        return z;
    }

    let mut y = vec![vec![Complex64::new(0.0, 0.0); n_sc]; p];
    for (t, y_t) in y.iter_mut().enumerate() {
        y_t.copy_from_slice(&noise[t]);
        for path in 0..paths {
            let c = amps[path] * code.beta[path][t] * sqrt_es;
            for (out, ramp) in y_t.iter_mut().zip(&ramps[path]) {
                *out += c * ramp;
            }
        }
    }
    for (path, zp) in z.iter_mut().enumerate() {
        for (t, y_t) in y.iter().enumerate() {
            let c = code.conj[path][t];
            for (out, yv) in zp.iter_mut().zip(y_t) {
                *out += c * yv;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locexp::stats;

    fn tiny_config() -> ExperimentConfig {
        // Small but with enough bandwidth to resolve the ~23 ns spacing
        // between the direct and RIS paths, and enough elements and SNR
        // that the comparison is interference-limited.
        ExperimentConfig {
            k: 4,
            n_ris: 64,
            realizations: 4,
            seed: 9,
            ofdm: OfdmConfig { n_sc: 1024, n0: 1e-16, ..OfdmConfig::default() },
            methods: vec![
                MethodSpec::Proposed,
                MethodSpec::QuantizedDft { r: 2 },
                MethodSpec::Genie,
            ],
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn method_labels_round_trip() {
        for m in [MethodSpec::Proposed, MethodSpec::QuantizedDft { r: 16 }, MethodSpec::Genie] {
            let s = m.label();
            assert_eq!(s.parse::<MethodSpec>().unwrap(), m);
        }
        assert!("quant-r1".parse::<MethodSpec>().is_err());
        assert!("nonsense".parse::<MethodSpec>().is_err());
    }

    #[test]
    fn experiment_is_deterministic_and_ordered() {
        let cfg = tiny_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.code_len, 8); // K=4 at R=2 needs a length-8 Hadamard
        for (ma, mb) in a.methods.iter().zip(&b.methods) {
            assert_eq!(ma.label, mb.label);
            let ea = ma.errors();
            let eb = mb.errors();
            assert_eq!(ea, eb, "same config must reproduce identical errors");
            assert_eq!(ea.len(), cfg.realizations * cfg.k as usize);
        }
    }

    #[test]
    fn proposed_beats_coarse_quantized_benchmark() {
        let cfg = tiny_config();
        let result = run_experiment(&cfg).unwrap();
        let proposed = stats::median(&result.methods[0].errors());
        let quant = stats::median(&result.methods[1].errors());
        let genie = stats::median(&result.methods[2].errors());
        assert!(
            proposed < quant,
            "proposed median {proposed:e} should beat quantized {quant:e}"
        );
        // The proposed method sees no interference, so it sits at the
        // genie's noise floor.
        assert!((proposed - genie).abs() <= 1e-6 * genie.max(1e-30));
    }
}
