use std::io::Write;
use std::time::Duration;

use crate::graph_model::WeightVector;

/// One row of a convergence trace. Record 0 is the starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub f: f64,
    pub active_count: usize,
    /// Solver time elapsed when the record was taken.
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.iter < record.iter));
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn objective_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.f)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_time(&self) -> Duration {
        self.records.last().map_or(Duration::ZERO, |r| r.wall_time)
    }

    /// Largest `f[k+1] − f[k]` over the trace; `≤ 0` for a descending run.
    pub fn max_increase(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| w[1].f - w[0].f)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `iter,f,active_count` with a header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iter,f,active_count")?;
        for r in &self.records {
            writeln!(out, "{},{:?},{}", r.iter, r.f, r.active_count)?;
        }
        Ok(())
    }
}

/// Output of any solver in this crate.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub w_star: WeightVector,
    pub f_star: f64,
    pub trace: ConvergenceTrace,
    pub converged: bool,
    /// Number of updates performed.
    pub iters: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = ConvergenceTrace::new();
        for (k, f) in [3.0, 2.5, 2.5].into_iter().enumerate() {
            t.push(TraceRecord {
                iter: k,
                f,
                active_count: 3 - k,
                wall_time: Duration::from_millis(k as u64),
            });
        }
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iter,f,active_count\n0,3.0,3\n1,2.5,2\n2,2.5,1\n"
        );
        assert_eq!(t.max_increase(), 0.0);
        assert_eq!(t.total_time(), Duration::from_millis(2));
    }
}
