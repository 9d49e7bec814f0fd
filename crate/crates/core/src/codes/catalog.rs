//! The line-oriented catalog file format and the embedded catalog.
//!
//! Format: a header `BH <P> <R> <source-label>` followed by P lines of P
//! space-separated exponents in [0, R); entries are separated by blank
//! lines and `#` starts a comment. Every entry is re-verified before it is
//! accepted.

use super::{verify_rows_orthogonal, BhCatalogEntry, CodesError};
use std::sync::OnceLock;

/// Entries shipped with the library; loaded and verified once.
pub fn builtin_catalog() -> &'static [BhCatalogEntry] {
    static CATALOG: OnceLock<Vec<BhCatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        parse_catalog(include_str!("../../catalog/builtin.txt"))
            .expect("embedded catalog must parse and verify")
    })
}

/// Parses and verifies a catalog. Entries come back sorted by order, then
/// complexity, then lexicographic exponent rows, so lookups are
/// deterministic when several entries share an order.
pub fn parse_catalog(text: &str) -> Result<Vec<BhCatalogEntry>, CodesError> {
    let mut entries = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(idx, line)) = lines.peek() {
        let trimmed = strip_comment(line).trim();
        if trimmed.is_empty() {
            lines.next();
            continue;
        }
        let lineno = idx + 1;
        let mut tokens = trimmed.split_whitespace();
        if tokens.next() != Some("BH") {
            return Err(CodesError::CatalogParse {
                line: lineno,
                message: format!("expected 'BH <P> <R> <label>', got '{trimmed}'"),
            });
        }
        let order: u32 = parse_field(tokens.next(), lineno, "order P")?;
        let complexity: u32 = parse_field(tokens.next(), lineno, "complexity R")?;
        if order == 0 || complexity < 2 {
            return Err(CodesError::CatalogParse {
                line: lineno,
                message: format!("invalid dimensions P={order}, R={complexity}"),
            });
        }
        let label: String = tokens.collect::<Vec<_>>().join(" ");
        let source = if label.is_empty() { "file".to_string() } else { label };
        lines.next();
        let mut rows = Vec::with_capacity(order as usize);
        for _ in 0..order {
            let (idx, line) = lines.next().ok_or(CodesError::CatalogParse {
                line: lineno,
                message: format!("entry '{source}' truncated: expected {order} rows"),
            })?;
            let row = parse_row(strip_comment(line), order, complexity, idx + 1)?;
            rows.push(row);
        }
        let entry = BhCatalogEntry { order, complexity, rows, source };
        if let Err((a, b)) = verify_rows_orthogonal(&entry.rows, entry.complexity) {
            return Err(CodesError::CatalogVerification {
                entry: entry.source,
                row_a: a,
                row_b: b,
            });
        }
        entries.push(entry);
    }
    entries.sort_by(|a, b| {
        (a.order, a.complexity, &a.rows).cmp(&(b.order, b.complexity, &b.rows))
    });
    Ok(entries)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_field<T: std::str::FromStr>(
    token: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, CodesError> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| CodesError::CatalogParse {
            line,
            message: format!("missing or malformed {what}"),
        })
}

fn parse_row(line: &str, order: u32, complexity: u32, lineno: usize) -> Result<Vec<u32>, CodesError> {
    let row: Result<Vec<u32>, _> = line.split_whitespace().map(str::parse).collect();
    let row = row.map_err(|e| CodesError::CatalogParse {
        line: lineno,
        message: format!("bad exponent: {e}"),
    })?;
    if row.len() != order as usize {
        return Err(CodesError::CatalogParse {
            line: lineno,
            message: format!("expected {order} exponents, found {}", row.len()),
        });
    }
    if let Some(&e) = row.iter().find(|&&e| e >= complexity) {
        return Err(CodesError::CatalogParse {
            line: lineno,
            message: format!("exponent {e} out of range [0, {complexity})"),
        });
    }
    Ok(row)
}

/// Renders entries in the catalog file format.
pub fn format_catalog(entries: &[BhCatalogEntry]) -> String {
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("BH {} {} {}\n", e.order, e.complexity, e.source));
        for row in &e.rows {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_format_round_trip() {
        let entries = vec![
            crate::codes::sylvester(2),
            crate::codes::conference_bh4(5).unwrap(),
        ];
        let text = format_catalog(&entries);
        let parsed = parse_catalog(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].order, 4);
        assert_eq!(parsed[1].order, 6);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a comment\n\nBH 2 2 tiny\n0 0\n0 1\n\n# trailing\n";
        let parsed = parse_catalog(text).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].source, "tiny");
    }

    #[test]
    fn parse_error_carries_line_number() {
        let text = "BH 2 2 tiny\n0 0\n0 x\n";
        match parse_catalog(text) {
            Err(CodesError::CatalogParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn verification_failure_names_the_entry() {
        // Rows 0 and 1 are identical, so their correlation is P, not 0.
        let text = "BH 2 2 broken\n0 0\n0 0\n";
        match parse_catalog(text) {
            Err(CodesError::CatalogVerification { entry, row_a, row_b }) => {
                assert_eq!(entry, "broken");
                assert_eq!((row_a, row_b), (0, 1));
            }
            other => panic!("expected verification failure, got {other:?}"),
        }
    }

    #[test]
    fn builtin_catalog_loads_and_verifies() {
        let entries = builtin_catalog();
        assert!(!entries.is_empty());
        for e in entries {
            assert!(verify_rows_orthogonal(&e.rows, e.complexity).is_ok(), "{}", e.source);
        }
    }
}
