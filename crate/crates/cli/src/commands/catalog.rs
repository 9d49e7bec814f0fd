use crate::CliError;
use riscode_core::codes::{builtin_catalog, catalog_load, BhCatalogEntry};
use std::fs;
use std::path::Path;

fn print_entries(entries: &[BhCatalogEntry], origin: &str) {
    for e in entries {
        println!("BH({}, {})  {}  [{origin}, verified]", e.order, e.complexity, e.source);
    }
}

pub fn list(file: Option<&Path>) -> Result<(), CliError> {
    print_entries(builtin_catalog(), "embedded");
    if let Some(path) = file {
        let bytes = fs::read(path)?;
        let entries = catalog_load(&bytes)?;
        print_entries(&entries, &path.display().to_string());
    }
    Ok(())
}

pub fn check(file: &Path) -> Result<(), CliError> {
    let bytes = fs::read(file)?;
    let entries = catalog_load(&bytes)?;
    println!("{}: {} entries, all verified", file.display(), entries.len());
    Ok(())
}
