use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fusion::Embedding;
use crate::io::{content_lines, parse_real};

/// Parses `utt_id v1 ... vD` lines. All rows must share one dimension.
pub fn parse_embeddings(text: &str) -> Result<Vec<(String, Embedding)>> {
    let mut seen = HashSet::new();
    let mut dim = None;
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let mut fields = content.split_whitespace();
        let id = fields.next().unwrap_or_default();
        let values = fields.map(|t| parse_real(t, line, "embedding value")).collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::parse(line, "embedding has no values"));
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::parse(line, format!("dimension {} differs from {d}", values.len())))
            }
            _ => {}
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::Duplicate { line, id: id.to_string() });
        }
        let emb = Embedding::new(values).map_err(|e| Error::parse(line, e.to_string()))?;
        out.push((id.to_string(), emb));
    }
    Ok(out)
}

pub fn write_embeddings(rows: &[(String, Embedding)]) -> String {
    let mut out = String::new();
    for (id, e) in rows {
        out.push_str(id);
        for v in e.as_slice() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows() {
        let rows = parse_embeddings("a 1 0\nb 0 1\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].1.as_slice(), &[0.0, 1.0]);
        assert_eq!(parse_embeddings(&write_embeddings(&rows)).unwrap(), rows);
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(matches!(parse_embeddings("a 1 0\nb 1\n").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(matches!(parse_embeddings("a\n").unwrap_err(), Error::Parse { line: 1, .. }));
    }
}
