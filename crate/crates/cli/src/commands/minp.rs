use crate::CliError;
use riscode_core::codes::minimal_p;

pub fn run(k: u32, r: u32) -> Result<(), CliError> {
    if k < 1 {
        return Err(CliError::invalid("--k must be at least 1"));
    }
    if r < 2 {
        return Err(CliError::invalid("--r must be at least 2"));
    }
    println!("P* = {}", minimal_p(k, r));
    Ok(())
}
