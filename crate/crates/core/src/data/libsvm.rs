use std::fmt::Write as _;

use super::{Dataset, Features};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_label(tok: &str, line: usize) -> Result<u8> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("unparseable label '{tok}'")))?;
    if v == 1.0 {
        Ok(1)
    } else if v == -1.0 || v == 0.0 {
        Ok(0)
    } else {
        Err(parse_err(line, format!("label '{tok}' is not in {{-1,+1}} or {{0,1}}")))
    }
}

/// Parses libsvm sparse text (`<label> <index>:<value> ...`, 1-based
/// ascending indices). The dimension is the largest index seen.
pub fn parse_libsvm(text: &str) -> Result<Dataset> {
    parse_libsvm_with_dim(text, None)
}

pub fn parse_libsvm_with_dim(text: &str, dim: Option<usize>) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let label = parse_label(toks.next().unwrap_or_default(), line_no)?;
        let mut row: Vec<(u32, f64)> = Vec::new();
        for tok in toks {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, format!("token '{tok}' is not index:value")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad index in '{tok}'")))?;
            if idx == 0 {
                return Err(parse_err(line_no, "indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad value in '{tok}'")))?;
            if !val.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value in '{tok}'")));
            }
            let j = (idx - 1) as u32;
            if let Some(&(prev, _)) = row.last() {
                if j == prev {
                    return Err(parse_err(line_no, format!("duplicate index {idx}")));
                }
                if j < prev {
                    return Err(parse_err(line_no, format!("index {idx} is not ascending")));
                }
            }
            max_index = max_index.max(idx);
            row.push((j, val));
        }
        rows.push(row);
        labels.push(label);
    }
    let dim = match dim {
        Some(d) if d < max_index => {
            return Err(Error::Data(format!(
                "declared dimension {d} is smaller than max index {max_index}"
            )))
        }
        Some(d) => d,
        None => max_index,
    };
    Dataset::sparse(rows, dim, labels)
}

/// Serializes to libsvm text. Dense rows write only non-zero entries; values
/// use the shortest representation that parses back to the same `f64`.
pub fn write_libsvm(data: &Dataset) -> String {
    let mut out = String::new();
    for i in 0..data.len() {
        out.push_str(if data.label(i) == 1 { "+1" } else { "-1" });
        match data.features() {
            Features::Sparse { rows, .. } => {
                for &(j, v) in &rows[i] {
                    let _ = write!(out, " {}:{}", j + 1, v);
                }
            }
            Features::Dense { .. } => data.for_each_in_row(i, |j, v| {
                if v != 0.0 {
                    let _ = write!(out, " {}:{}", j + 1, v);
                }
            }),
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_reference_lines() {
        let d = parse_libsvm("+1 1:0.5 3:2\n-1\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim(), 3);
        assert_eq!(d.labels(), &[1, 0]);
        assert_eq!(d.dense_row(0), vec![0.5, 0.0, 2.0]);
        assert_eq!(d.dense_row(1), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn accepts_zero_one_labels_and_comments() {
        let d = parse_libsvm("0 2:1 # comment\n\n1 1:-3e-2\n").unwrap();
        assert_eq!(d.labels(), &[0, 1]);
        assert_eq!(d.dense_row(1), vec![-0.03, 0.0]);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("+1 1:1\n+1 3:1 2:1\n", 2),
            ("+1 1:1 1:2\n", 1),
            ("+1 1:1\n-1 x:1\n", 2),
            ("+1 1:1\n+1 1:1\n2 1:1\n", 3),
            ("+1 0:1\n", 1),
            ("+1 1\n", 1),
        ];
        for (text, line) in cases {
            match parse_libsvm(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn declared_dimension() {
        let d = parse_libsvm_with_dim("+1 2:1\n", Some(10)).unwrap();
        assert_eq!(d.dim(), 10);
        assert!(parse_libsvm_with_dim("+1 12:1\n", Some(10)).is_err());
    }

    fn arb_row() -> impl Strategy<Value = (bool, Vec<(u32, f64)>)> {
        (
            any::<bool>(),
            proptest::collection::btree_map(0u32..50, any::<f64>().prop_filter("finite", |v| v.is_finite()), 0..12),
        )
            .prop_map(|(y, m)| (y, m.into_iter().collect()))
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(rows in proptest::collection::vec(arb_row(), 1..30)) {
            let labels = rows.iter().map(|(y, _)| *y as u8).collect();
            let feats: Vec<_> = rows.into_iter().map(|(_, r)| r).collect();
            let dim = feats.iter().flat_map(|r| r.last()).map(|&(j, _)| j as usize + 1).max().unwrap_or(0);
            let original = Dataset::sparse(feats, dim, labels).unwrap();
            let text = write_libsvm(&original);
            let parsed = parse_libsvm(&text).unwrap();
            prop_assert_eq!(&parsed, &original);
            let again = parse_libsvm(&write_libsvm(&parsed)).unwrap();
            prop_assert_eq!(again, parsed);
        }
    }
}
