use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::CscMatrix;

/// Parsed LIBSVM file with samples as the columns of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    /// `d x n`, `d` being the largest feature index seen.
    pub x: CscMatrix,
    /// Labels mapped to `±1`; `None` when no line carries a label.
    pub labels: Option<Vec<f64>>,
    pub source_path: String,
}

impl RawDataset {
    pub fn n(&self) -> usize {
        self.x.ncols()
    }

    pub fn d(&self) -> usize {
        self.x.nrows()
    }
}

pub fn read_libsvm(path: impl AsRef<Path>) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_libsvm(BufReader::new(file), &path.display().to_string())
}

pub fn parse_libsvm_str(text: &str) -> Result<RawDataset> {
    parse_libsvm(text.as_bytes(), "<memory>")
}

/// Streams `<label> <idx>:<val> ...` lines. Indices are 1-based and strictly
/// increasing within a line; `#` starts a comment. Lines whose first token
/// is a feature make up an unlabeled file.
pub fn parse_libsvm<R: BufRead>(mut reader: R, source: &str) -> Result<RawDataset> {
    let mut colptr = vec![0usize];
    let mut rowidx = Vec::new();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut labeled: Option<bool> = None;
    let mut nrows = 0usize;
    let mut buf = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        let read = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::Io { path: PathBuf::from(source), source: e })?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let text = std::str::from_utf8(&buf).map_err(|_| err("line is not valid UTF-8".into()))?;
        let content = text.split('#').next().unwrap_or("");
        let mut tokens = content.split_ascii_whitespace().peekable();
        let Some(&first) = tokens.peek() else { continue };

        let has_label = !first.contains(':');
        match labeled {
            None => labeled = Some(has_label),
            Some(prev) if prev != has_label => {
                return Err(err("mixes labeled and unlabeled lines".into()));
            }
            _ => {}
        }
        if has_label {
            tokens.next();
            let label: f64 = first.parse().map_err(|_| err(format!("invalid label '{first}'")))?;
            if !label.is_finite() {
                return Err(err(format!("non-finite label '{first}'")));
            }
            labels.push((label + 0.0, line_no));
        }

        let mut last = 0usize;
        for token in tokens {
            let (idx, val) = token
                .split_once(':')
                .ok_or_else(|| err(format!("expected <index>:<value>, found '{token}'")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("invalid feature index '{idx}'")))?;
            if idx == 0 {
                return Err(err("feature indices are 1-based".into()));
            }
            if idx <= last {
                return Err(err(format!("feature index {idx} does not increase")));
            }
            last = idx;
            let val: f64 = val.parse().map_err(|_| err(format!("invalid value '{val}'")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite value for feature {idx}")));
            }
            if val != 0.0 {
                rowidx.push(idx - 1);
                values.push(val);
            }
        }
        nrows = nrows.max(last);
        colptr.push(rowidx.len());
    }

    let ncols = colptr.len() - 1;
    if ncols == 0 {
        return Err(Error::InvalidData(format!("{source}: no samples")));
    }
    let x = CscMatrix::from_parts_unchecked(nrows, ncols, colptr, rowidx, values);
    let labels = match labeled {
        Some(true) => Some(map_labels(&labels)?),
        _ => None,
    };
    Ok(RawDataset { x, labels, source_path: source.to_string() })
}

/// Labels within `{−1, +1}` are kept. Two other values map smaller to `−1`
/// and larger to `+1`; a single other value maps by its sign.
fn map_labels(raw: &[(f64, usize)]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = Vec::new();
    for &(label, line) in raw {
        if !distinct.contains(&label) {
            if distinct.len() == 2 {
                return Err(Error::Parse { line, message: format!("third distinct label {label}") });
            }
            distinct.push(label);
        }
    }
    if distinct.iter().all(|&l| l == 1.0 || l == -1.0) {
        return Ok(raw.iter().map(|&(l, _)| l).collect());
    }
    let map = |l: f64| -> f64 {
        if distinct.len() == 2 {
            if l == distinct[0].min(distinct[1]) {
                -1.0
            } else {
                1.0
            }
        } else if l > 0.0 {
            1.0
        } else {
            -1.0
        }
    };
    Ok(raw.iter().map(|&(l, _)| map(l)).collect())
}
