use crate::{CliError, Format};
use riscode_core::codes::{
    design_code, design_code_with_p, matrix_to_json, matrix_to_text, DesignOutcome,
};
use std::fs;
use std::path::PathBuf;

pub fn run(
    k: u32,
    r: u32,
    p: Option<u32>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    if k < 1 {
        return Err(CliError::invalid("--k must be at least 1"));
    }
    if r < 2 {
        return Err(CliError::invalid("--r must be at least 2"));
    }
    let outcome = match p {
        Some(p) => design_code_with_p(k, r, p)?,
        None => design_code(k, r)?,
    };
    print_summary(&outcome, k, r);
    if let Some(path) = out {
        let label = format!("riscode design K={k} R={r}");
        let body = match format {
            Format::Text => matrix_to_text(&outcome.code, &label),
            Format::Json => matrix_to_json(&outcome.code) + "\n",
        };
        fs::write(&path, body)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_summary(outcome: &DesignOutcome, k: u32, r: u32) {
    println!(
        "designed {}x{} code over T_{r} for K={k}",
        outcome.code.ris_count() + 1,
        outcome.code.code_len()
    );
    println!("case: {}", outcome.construction_case);
    println!("P*: {}", outcome.theoretical_min_p);
    println!("achieved P: {}", outcome.achieved_p);
    println!("optimal: {}", outcome.optimal);
}
