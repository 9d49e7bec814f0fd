use crate::config::SimulateConfig;
use crate::manifest::RunManifest;
use crate::CliError;
use riscode_core::airlink::rng::{derive_seed, seeded_rng};
use riscode_core::airlink::{
    channel_mse, despread, leakage_matrix, quantized_dft_code, simulate_frame, ChannelSet,
    FrameConfig, SlowProfileSet,
};
use riscode_core::codes::{design_code, design_code_with_p, PhaseCodeMatrix};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub fn run(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config_path)?;
    let cfg: SimulateConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("bad config: {e}")))?;
    if cfg.channel_model != "iid" {
        return Err(CliError::invalid(format!(
            "unknown channel model '{}'; `simulate` supports 'iid' (geometric channels live in `locexp`)",
            cfg.channel_model
        )));
    }
    if cfg.trials == 0 || cfg.q == 0 || cfg.n_tx == 0 || cfg.n_rx == 0 || cfg.n_ris == 0 {
        return Err(CliError::invalid("trials, Q, and antenna/element counts must be positive"));
    }

    let outcome = match cfg.p {
        Some(p) => design_code_with_p(cfg.k, cfg.r, p)?,
        None => design_code(cfg.k, cfg.r)?,
    };
    let p = outcome.code.code_len() as u32;
    let quantized = quantized_dft_code(cfg.k as usize + 1, p, cfg.r)?;
    let methods: [(&str, &PhaseCodeMatrix); 2] =
        [("proposed", &outcome.code), ("quantized-dft", &quantized)];

    let mut csv = String::from("method,r,trial,path,leakage,mse\n");
    for (name, code) in methods {
        let leak = leakage_matrix(code);
        let row_leak: Vec<f64> = (0..=cfg.k as usize)
            .map(|a| {
                (0..=cfg.k as usize)
                    .filter(|&b| b != a)
                    .map(|b| leak[a][b])
                    .fold(0.0, f64::max)
            })
            .collect();
        for trial in 0..cfg.trials {
            // Common random numbers: channel, profiles, and noise seeds
            // depend on the trial only, not on the method.
            let mut ch_rng = seeded_rng(cfg.seed, "trial-channel", trial as u64);
            let ch = ChannelSet::random_iid(cfg.k as usize, cfg.n_rx, cfg.n_tx, cfg.n_ris, &mut ch_rng);
            let mut zeta_rng = seeded_rng(cfg.seed, "trial-profile", trial as u64);
            let zeta =
                SlowProfileSet::random(cfg.k as usize, cfg.q, cfg.n_ris, cfg.r, &mut zeta_rng);
            let frame_cfg = FrameConfig::new(
                p as usize,
                cfg.q,
                cfg.es,
                cfg.n0,
                derive_seed(cfg.seed, "trial-noise", trial as u64),
            )?;
            let frame = simulate_frame(&ch, code, &zeta, &frame_cfg)?;
            let block = despread(&frame, code, &frame_cfg)?;
            let mse = channel_mse(&block, &ch, &zeta, &frame_cfg)?;
            for path in 0..=cfg.k as usize {
                writeln!(
                    csv,
                    "{name},{},{trial},{path},{:e},{:e}",
                    cfg.r, row_leak[path], mse[path]
                )
                .expect("string write");
            }
        }
    }

    let mut manifest = RunManifest::new(
        "simulate",
        cfg.seed,
        serde_json::to_value(&cfg).expect("config serializes"),
    );
    manifest.write_output(out_dir, "results.csv", &csv)?;
    manifest.write(out_dir)?;
    println!(
        "simulated {} trials for K={} R={} P={}; results in {}",
        cfg.trials,
        cfg.k,
        cfg.r,
        p,
        out_dir.display()
    );
    Ok(())
}
