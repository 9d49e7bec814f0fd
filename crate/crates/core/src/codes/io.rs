//! Text and JSON serialization for code matrices.
//!
//! Square matrices with an all-ones first row use the catalog's `BH` block;
//! rectangular codes use an analogous `PBH <rows> <P> <R> <label>` block.
//! The JSON form is `{"K":, "P":, "R":, "rows": [[...]]}`.

use super::{CodesError, PhaseCodeMatrix};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    #[serde(rename = "K")]
    k: u32,
    #[serde(rename = "P")]
    p: u32,
    #[serde(rename = "R")]
    r: u32,
    rows: Vec<Vec<u32>>,
}

pub fn matrix_to_json(m: &PhaseCodeMatrix) -> String {
    let doc = MatrixJson {
        k: m.ris_count() as u32,
        p: m.code_len() as u32,
        r: m.resolution(),
        rows: m.rows().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("matrix serialization cannot fail")
}

pub fn matrix_from_json(text: &str) -> Result<PhaseCodeMatrix, CodesError> {
    let doc: MatrixJson = serde_json::from_str(text)
        .map_err(|e| CodesError::InvalidInput(format!("bad matrix JSON: {e}")))?;
    if doc.rows.len() != doc.k as usize + 1 {
        return Err(CodesError::InvalidInput(format!(
            "K = {} but {} rows present",
            doc.k,
            doc.rows.len()
        )));
    }
    let m = PhaseCodeMatrix::from_rows(doc.rows, doc.r)?;
    if m.code_len() != doc.p as usize {
        return Err(CodesError::InvalidInput(format!(
            "P = {} but rows have {} entries",
            doc.p,
            m.code_len()
        )));
    }
    Ok(m)
}

pub fn matrix_to_text(m: &PhaseCodeMatrix, label: &str) -> String {
    let rows = m.rows().len();
    let p = m.code_len();
    let mut out = if rows == p {
        format!("BH {} {} {}\n", p, m.resolution(), label)
    } else {
        format!("PBH {} {} {} {}\n", rows, p, m.resolution(), label)
    };
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn matrix_from_text(text: &str) -> Result<PhaseCodeMatrix, CodesError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| CodesError::InvalidInput("empty matrix file".into()))?;
    let mut tokens = header.split_whitespace();
    let (rows, p, r) = match tokens.next() {
        Some("BH") => {
            let p: u32 = parse(tokens.next(), lineno)?;
            (p, p, parse(tokens.next(), lineno)?)
        }
        Some("PBH") => {
            let rows: u32 = parse(tokens.next(), lineno)?;
            (rows, parse(tokens.next(), lineno)?, parse(tokens.next(), lineno)?)
        }
        other => {
            return Err(CodesError::InvalidInput(format!(
                "line {lineno}: expected BH or PBH header, got {other:?}"
            )))
        }
    };
    let mut out = Vec::with_capacity(rows as usize);
    for _ in 0..rows {
        let (lineno, line) = lines.next().ok_or_else(|| {
            CodesError::InvalidInput(format!("matrix truncated: expected {rows} rows"))
        })?;
        let row: Result<Vec<u32>, _> = line.split_whitespace().map(str::parse).collect();
        let row =
            row.map_err(|e| CodesError::InvalidInput(format!("line {lineno}: bad exponent: {e}")))?;
        if row.len() != p as usize {
            return Err(CodesError::InvalidInput(format!(
                "line {lineno}: expected {p} exponents, found {}",
                row.len()
            )));
        }
        out.push(row);
    }
    PhaseCodeMatrix::from_rows(out, r)
}

fn parse(token: Option<&str>, lineno: usize) -> Result<u32, CodesError> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| CodesError::InvalidInput(format!("line {lineno}: malformed header")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::design_code;

    #[test]
    fn text_round_trip_rectangular() {
        let outcome = design_code(2, 3).unwrap();
        let text = matrix_to_text(&outcome.code, "test");
        assert!(text.starts_with("BH 3 3 test"));
        let back = matrix_from_text(&text).unwrap();
        assert_eq!(back, outcome.code);

        let truncated = outcome.code.truncated(2);
        let text = matrix_to_text(&truncated, "test");
        assert!(text.starts_with("PBH 2 3 3 test"));
        assert_eq!(matrix_from_text(&text).unwrap(), truncated);
    }

    #[test]
    fn json_round_trip() {
        let outcome = design_code(3, 2).unwrap();
        let json = matrix_to_json(&outcome.code);
        let back = matrix_from_json(&json).unwrap();
        assert_eq!(back, outcome.code);
    }

    #[test]
    fn json_rejects_inconsistent_shape() {
        let bad = r#"{"K": 2, "P": 2, "R": 2, "rows": [[0,0],[0,1]]}"#;
        assert!(matrix_from_json(bad).is_err());
    }
}
