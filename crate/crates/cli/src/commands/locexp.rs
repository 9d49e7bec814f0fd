use crate::manifest::RunManifest;
use crate::CliError;
use riscode_core::locexp::stats::quantile;
use riscode_core::locexp::{run_experiment, ExperimentConfig};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub fn run(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config_path)?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("bad config: {e}")))?;
    let result = run_experiment(&cfg)?;

    let mut manifest = RunManifest::new(
        "locexp",
        cfg.seed,
        serde_json::to_value(&cfg).expect("config serializes"),
    );

    let mut summary = String::from("method,quantile,error_m\n");
    for method in &result.methods {
        let mut csv = String::from("realization,ris_index,error_m\n");
        for rec in &method.records {
            writeln!(csv, "{},{},{:e}", rec.realization, rec.ris_index, rec.error_m)
                .expect("string write");
        }
        manifest.write_output(out_dir, &format!("locexp_{}.csv", method.label), &csv)?;

        let errors = method.errors();
        for step in 0..=20 {
            let q = step as f64 / 20.0;
            writeln!(summary, "{},{:.2},{:e}", method.label, q, quantile(&errors, q))
                .expect("string write");
        }
    }
    manifest.write_output(out_dir, "locexp_summary.csv", &summary)?;
    manifest.write(out_dir)?;
    println!(
        "ran {} realizations x {} methods (P = {}); results in {}",
        cfg.realizations,
        result.methods.len(),
        result.code_len,
        out_dir.display()
    );
    Ok(())
}
