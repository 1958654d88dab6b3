//! Comma-delimited result tables (UTF-8, LF, header row, 6 decimals).

use std::io::Write;
use std::path::Path;

use crate::analysis::SweepResult;
use crate::model::{DispatchProblem, DispatchSolution, ParetoPoint};

/// Fixed 6-decimal rendering with negative zero folded to zero.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    fn dispatch_header(problem: &DispatchProblem, param: Option<&str>) -> Vec<String> {
        let mut header: Vec<String> = param.map(str::to_owned).into_iter().collect();
        header.extend(
            problem
                .customers()
                .iter()
                .map(|c| format!("{}_kwh", c.id())),
        );
        header.extend(["total_energy_kwh", "total_cost", "coupling_multiplier"].map(String::from));
        header
    }

    fn dispatch_row(param: Option<f64>, s: &DispatchSolution) -> Vec<String> {
        let mut row: Vec<String> = param.map(fmt_num).into_iter().collect();
        row.extend(s.energies.iter().copied().map(fmt_num));
        row.push(fmt_num(s.total_energy));
        row.push(fmt_num(s.total_cost));
        row.push(fmt_num(s.coupling_multiplier));
        row
    }

    pub fn from_solution(problem: &DispatchProblem, s: &DispatchSolution) -> Self {
        ResultTable {
            header: Self::dispatch_header(problem, None),
            rows: vec![Self::dispatch_row(None, s)],
        }
    }

    pub fn from_sweep(problem: &DispatchProblem, sweep: &SweepResult) -> Self {
        ResultTable {
            header: Self::dispatch_header(problem, Some(sweep.parameter.column_name())),
            rows: sweep
                .rows
                .iter()
                .map(|r| Self::dispatch_row(Some(r.value), &r.solution))
                .collect(),
        }
    }

    pub fn from_frontier(points: &[ParetoPoint]) -> Self {
        ResultTable {
            header: ["lambda", "lambda_end", "total_cost", "total_energy_kwh"]
                .map(String::from)
                .to_vec(),
            rows: points
                .iter()
                .map(|p| {
                    [p.lambda, p.lambda_end, p.total_cost, p.total_energy]
                        .map(fmt_num)
                        .to_vec()
                })
                .collect(),
        }
    }

    pub fn write_to<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("table cells are UTF-8")
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
