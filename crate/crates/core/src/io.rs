//! CSV formats.
//!
//! * data matrix: one node per row, one signal sample per column, no header
//!   unless requested;
//! * edge list: `i,j,weight` with 0-based node ids and `i < j`, one row per
//!   strictly positive weight, preceded by a header row.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::graph_model::{EdgeIndexMap, WeightVector};
use crate::trace::{ConvergenceTrace, TraceRecord};
use crate::{Error, Result};

pub const EDGE_LIST_HEADER: &str = "i,j,weight";

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        msg: msg.into(),
    }
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

fn record_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        kind => parse_err(path, line, format!("{kind:?}")),
    }
}

/// Reads a `p × n` data matrix.
pub fn read_data_matrix(path: &Path, skip_header: bool) -> Result<DMatrix<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_data_matrix_from(file, path, skip_header)
}

pub fn read_data_matrix_from<R: Read>(input: R, path: &Path, skip_header: bool) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut skipped = !skip_header;
    for rec in csv_reader(input).into_records() {
        let rec = rec.map_err(|e| record_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if !skipped {
            skipped = true;
            continue;
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(col, field)| {
                let v: f64 = field
                    .parse()
                    .map_err(|_| parse_err(path, line, format!("column {}: not a number: {field:?}", col + 1)))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(path, line, format!("column {}: non-finite value", col + 1)))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    path,
                    line,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(parse_err(path, 0, format!("need at least 2 node rows, found {}", rows.len())));
    }
    let n = rows[0].len();
    Ok(DMatrix::from_row_iterator(rows.len(), n, rows.into_iter().flatten()))
}

pub fn write_data_matrix<W: Write>(x: &DMatrix<f64>, mut out: W) -> std::io::Result<()> {
    for row in x.row_iter() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_edge_list<W: Write>(w: &WeightVector, p: usize, mut out: W) -> Result<()> {
    let map = EdgeIndexMap::new(p)?;
    if w.len() != map.len() {
        return Err(Error::InvalidArgument(format!(
            "weight vector has length {}, expected {}",
            w.len(),
            map.len()
        )));
    }
    let io = |e| Error::io("<edge list>", e);
    writeln!(out, "{EDGE_LIST_HEADER}").map_err(io)?;
    for ((i, j), &wk) in map.edges().zip(w.values()) {
        if wk > 0.0 {
            writeln!(out, "{i},{j},{wk:?}").map_err(io)?;
        }
    }
    Ok(())
}

pub fn save_edge_list(w: &WeightVector, p: usize, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_edge_list(w, p, &mut out)?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads an edge list into a weight vector. Without `nodes`, the node count
/// is one more than the largest id present. A header row `i,j,weight` is
/// accepted. Pairs may be given in either orientation; duplicates are an
/// error.
pub fn read_edge_list(path: &Path, nodes: Option<usize>) -> Result<(usize, WeightVector)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_edge_list_from(file, path, nodes)
}

pub fn read_edge_list_from<R: Read>(input: R, path: &Path, nodes: Option<usize>) -> Result<(usize, WeightVector)> {
    let mut entries: Vec<(usize, usize, f64, u64)> = Vec::new();
    for (k, rec) in csv_reader(input).into_records().enumerate() {
        let rec = rec.map_err(|e| record_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if k == 0 && rec.get(0).is_some_and(|f| f == "i") {
            continue;
        }
        if rec.len() != 3 {
            return Err(parse_err(path, line, format!("expected 3 fields i,j,weight, found {}", rec.len())));
        }
        let id = |f: &str| f.parse::<usize>().map_err(|_| parse_err(path, line, format!("bad node id {f:?}")));
        let (a, b) = (id(&rec[0])?, id(&rec[1])?);
        let wt: f64 = rec[2]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad weight {:?}", &rec[2])))?;
        if !(wt.is_finite() && wt >= 0.0) {
            return Err(parse_err(path, line, format!("weight must be finite and nonnegative, got {wt}")));
        }
        if a == b {
            return Err(parse_err(path, line, format!("self-loop on node {a}")));
        }
        entries.push((a.min(b), a.max(b), wt, line));
    }
    let max_id = entries.iter().map(|e| e.1).max();
    let p = match (nodes, max_id) {
        (Some(p), Some(max)) if max >= p => {
            return Err(parse_err(path, 0, format!("node id {max} out of range for {p} nodes")));
        }
        (Some(p), _) => p,
        (None, Some(max)) => max + 1,
        (None, None) => return Err(parse_err(path, 0, "empty edge list and no node count given")),
    };
    let map = EdgeIndexMap::new(p).map_err(|e| parse_err(path, 0, e.to_string()))?;
    let mut w = vec![0.0; map.len()];
    let mut seen = vec![false; map.len()];
    for (i, j, wt, line) in entries {
        let k = map.index(i, j)?;
        if seen[k] {
            return Err(parse_err(path, line, format!("duplicate edge ({i}, {j})")));
        }
        seen[k] = true;
        w[k] = wt;
    }
    Ok((p, WeightVector::new(w)?))
}

/// Reads a trace written by [`ConvergenceTrace::write_csv`]. Wall times are
/// not stored and come back as zero.
pub fn read_trace(path: &Path) -> Result<ConvergenceTrace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace_from(file, path)
}

pub fn read_trace_from<R: Read>(input: R, path: &Path) -> Result<ConvergenceTrace> {
    let mut trace = ConvergenceTrace::new();
    let mut last: Option<usize> = None;
    for (k, rec) in csv_reader(input).into_records().enumerate() {
        let rec = rec.map_err(|e| record_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if k == 0 && rec.get(0) == Some("iter") {
            continue;
        }
        if rec.len() != 3 {
            return Err(parse_err(path, line, format!("expected iter,f,active_count, found {} fields", rec.len())));
        }
        let bad = |what: &str| parse_err(path, line, format!("bad {what}"));
        let iter: usize = rec[0].parse().map_err(|_| bad("iteration"))?;
        let f: f64 = rec[1].parse().map_err(|_| bad("objective value"))?;
        let active_count: usize = rec[2].parse().map_err(|_| bad("active count"))?;
        if last.is_some_and(|l| iter <= l) {
            return Err(parse_err(path, line, "iterations must be strictly increasing"));
        }
        last = Some(iter);
        trace.push(TraceRecord { iter, f, active_count, wall_time: std::time::Duration::ZERO });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_matrix_with_header() {
        let text = "a,b\n1,2\n3,4\n5,6\n";
        let x = read_data_matrix_from(text.as_bytes(), Path::new("x.csv"), true).unwrap();
        assert_eq!(x, DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
    }

    #[test]
    fn data_matrix_errors_carry_line_numbers() {
        let err = read_data_matrix_from("1,2\n3,x\n".as_bytes(), Path::new("x.csv"), false).unwrap_err();
        assert_eq!(err.to_string(), "x.csv:2: column 2: not a number: \"x\"");
        let err = read_data_matrix_from("1,2\n3\n".as_bytes(), Path::new("x.csv"), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_data_matrix_from("1,2\n3,inf\n".as_bytes(), Path::new("x.csv"), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn edge_list_round_trip() {
        let w = WeightVector::new(vec![1.0, 0.0, 0.25, 0.0, 0.0, 3.5]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&w, 4, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "i,j,weight\n0,1,1.0\n0,3,0.25\n2,3,3.5\n");
        let (p, back) = read_edge_list_from(text.as_bytes(), Path::new("e.csv"), None).unwrap();
        assert_eq!(p, 4);
        assert_eq!(back, w);
    }

    #[test]
    fn trace_round_trip() {
        let text = "iter,f,active_count\n0,3.5,6\n1,-0.25,4\n";
        let t = read_trace_from(text.as_bytes(), Path::new("t.csv")).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
        assert!(read_trace_from("1,2,3\n1,2,3\n".as_bytes(), Path::new("t.csv")).is_err());
    }

    #[test]
    fn edge_list_validation() {
        let path = Path::new("e.csv");
        assert!(read_edge_list_from("0,0,1\n".as_bytes(), path, None).is_err());
        assert!(read_edge_list_from("0,1,1\n1,0,2\n".as_bytes(), path, None).is_err());
        assert!(read_edge_list_from("0,5,1\n".as_bytes(), path, Some(3)).is_err());
        assert!(read_edge_list_from("0,1,-1\n".as_bytes(), path, None).is_err());
        let (p, w) = read_edge_list_from("i,j,weight\n".as_bytes(), path, Some(3)).unwrap();
        assert_eq!((p, w.values()), (3, &[0.0; 3][..]));
        let (p, w) = read_edge_list_from("2,0,0.5\n".as_bytes(), path, None).unwrap();
        assert_eq!((p, w.values()), (3, &[0.0, 0.5, 0.0][..]));
    }
}
