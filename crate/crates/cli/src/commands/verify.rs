use crate::CliError;
use riscode_core::codes::{matrix_from_json, matrix_from_text, verify_code};
use std::fs;
use std::path::Path;

pub fn run(input: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(input)?;
    let matrix = if text.trim_start().starts_with('{') {
        matrix_from_json(&text)?
    } else {
        matrix_from_text(&text)?
    };
    let report = verify_code(&matrix);

    println!(
        "matrix: {} rows x {} columns over T_{}",
        matrix.ris_count() + 1,
        matrix.code_len(),
        matrix.resolution()
    );
    println!(
        "first row all-ones: {}",
        if report.first_row_all_ones { "pass" } else { "FAIL" }
    );
    for &(k, zero) in &report.row_sum_zero {
        println!("row {k} sum: {}", if zero { "zero" } else { "NONZERO" });
    }
    for &(a, b, zero) in &report.cross_orthogonal {
        println!(
            "rows ({a},{b}) correlation: {}",
            if zero { "zero" } else { "NONZERO" }
        );
    }
    if report.pass() {
        println!("overall: PASS");
        Ok(())
    } else {
        println!("overall: FAIL");
        Err(CliError::verify_failed("matrix failed exact verification"))
    }
}
