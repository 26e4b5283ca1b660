//! Report, solution and sample-grid files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use crate::analysis::{ConvergenceReport, ErrorRecord};
use crate::geometry::MultiPatchDomain;
use crate::spline::TensorSplineSpace;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "s,h_max,dofs,dg_error,dg_rate,l2_error,l2_rate,predicted_rate";

/// One report row; rates are absent on the first level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub s: usize,
    #[serde(serialize_with = "float17")]
    pub h_max: f64,
    pub dofs: usize,
    #[serde(serialize_with = "float17")]
    pub dg_error: f64,
    #[serde(serialize_with = "opt_float17")]
    pub dg_rate: Option<f64>,
    #[serde(serialize_with = "float17")]
    pub l2_error: f64,
    #[serde(serialize_with = "opt_float17")]
    pub l2_rate: Option<f64>,
    #[serde(serialize_with = "opt_float17")]
    pub predicted_rate: Option<f64>,
}

/// JSON number with the same 17 significant digits as the CSV cells.
fn float17<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    serde_json::value::RawValue::from_string(format_float(*x))
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

fn opt_float17<S: serde::Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => float17(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub complete: bool,
    pub rows: Vec<ReportRow>,
}

pub fn report_rows(report: &ConvergenceReport) -> Vec<ReportRow> {
    report
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| ReportRow {
            s: r.level,
            h_max: r.h_max,
            dofs: r.dofs,
            dg_error: r.dg_error,
            dg_rate: i.checked_sub(1).and_then(|j| report.dg_rates.get(j).copied()),
            l2_error: r.l2_error,
            l2_rate: i.checked_sub(1).and_then(|j| report.l2_rates.get(j).copied()),
            predicted_rate: report.predicted_rate,
        })
        .collect()
}

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn report_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in report_rows(report) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.s,
            format_float(r.h_max),
            r.dofs,
            format_float(r.dg_error),
            cell(r.dg_rate),
            format_float(r.l2_error),
            cell(r.l2_rate),
            cell(r.predicted_rate),
        ));
    }
    out
}

pub fn report_json(report: &ConvergenceReport) -> Result<String> {
    let file = ReportFile {
        complete: report.complete,
        rows: report_rows(report),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Inverse of [`report_json`].
pub fn parse_report_json(text: &str) -> Result<ConvergenceReport> {
    let file: ReportFile = serde_json::from_str(text)?;
    let records = file
        .rows
        .iter()
        .map(|r| ErrorRecord {
            level: r.s,
            h_max: r.h_max,
            dofs: r.dofs,
            dg_error: r.dg_error,
            l2_error: r.l2_error,
        })
        .collect();
    Ok(ConvergenceReport {
        records,
        dg_rates: file.rows.iter().filter_map(|r| r.dg_rate).collect(),
        l2_rates: file.rows.iter().filter_map(|r| r.l2_rate).collect(),
        predicted_rate: file.rows.first().and_then(|r| r.predicted_rate),
        complete: file.complete,
    })
}

pub fn emit_report(report: &ConvergenceReport, path: &Path, format: OutputFormat) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => report_csv(report),
        OutputFormat::Json => report_json(report)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Discrete solution with the spaces it lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub spaces: Vec<TensorSplineSpace>,
    pub values: Vec<f64>,
}

impl SolutionFile {
    pub fn new(domain: &MultiPatchDomain, values: Vec<f64>) -> Self {
        Self {
            spaces: domain.solution_spaces().to_vec(),
            values,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// `domain` with the stored spaces; fails when they do not fit.
    pub fn attach(&self, domain: &MultiPatchDomain) -> Result<MultiPatchDomain> {
        let domain = domain.with_solution_spaces(self.spaces.clone())?;
        let expected: usize = self.spaces.iter().map(TensorSplineSpace::num_basis).sum();
        if self.values.len() != expected {
            return Err(Error::CoefficientLength {
                expected,
                got: self.values.len(),
            });
        }
        Ok(domain)
    }
}

/// `u_h` at the points of an `n^d` grid spanning the bounding box of the
/// domain; points outside every patch are left out.
pub fn sample_solution(domain: &MultiPatchDomain, values: &[f64], n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    if n < 2 {
        return Err(Error::domain(n as f64, "grid size >= 2"));
    }
    let d = domain.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in domain.patches() {
        let (a, b) = p.bounding_box();
        for k in 0..d {
            lo[k] = lo[k].min(a[k]);
            hi[k] = hi[k].max(b[k]);
        }
    }
    let tol = 1e-12 * domain.diameter();
    let mut offsets = vec![0];
    for s in domain.solution_spaces() {
        offsets.push(offsets.last().unwrap() + s.num_basis());
    }
    let mut out = Vec::new();
    for flat in 0..n.pow(d as u32) {
        let idx = crate::spline::unflatten(flat, &vec![n; d]);
        let x: Vec<f64> = (0..d)
            .map(|k| lo[k] + (hi[k] - lo[k]) * idx[k] as f64 / (n - 1) as f64)
            .collect();
        for (i, patch) in domain.patches().iter().enumerate() {
            let Some(xhat) = patch.locate(&x, tol) else {
                continue;
            };
            let b = domain.solution_space(i).eval(&xhat, 0)?;
            let u = b.indices.iter().zip(&b.values).map(|(&j, &v)| values[offsets[i] + j] * v).sum();
            out.push((x, u));
            break;
        }
    }
    Ok(out)
}

pub fn write_samples(samples: &[(Vec<f64>, f64)], dim: usize, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let names = ["x", "y", "z"];
    writeln!(w, "{},value", names[..dim].join(","))?;
    for (x, u) in samples {
        let cells: Vec<String> = x.iter().chain(std::iter::once(u)).map(|&v| format_float(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> ConvergenceReport {
        let records = vec![
            ErrorRecord {
                level: 0,
                h_max: 0.25,
                dofs: 64,
                dg_error: 0.1,
                l2_error: 0.01,
            },
            ErrorRecord {
                level: 1,
                h_max: 0.125,
                dofs: 144,
                dg_error: 0.025,
                l2_error: 0.00125,
            },
        ];
        ConvergenceReport::from_records(records, Some(2.0), true).unwrap()
    }

    #[test]
    fn csv_layout() {
        let csv = report_csv(&two_level());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 8);
        assert_eq!(first[4], "");
        assert_eq!(first[6], "");
        let second: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(second[4].parse::<f64>().unwrap(), 2.0);
        assert_eq!(second[6].parse::<f64>().unwrap(), 3.0);
        assert_eq!(second[1], "1.2500000000000000e-1");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-9, 123456.789] {
            let s = format_float(x);
            let mantissa = s.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_round_trip() {
        let r = two_level();
        let text = report_json(&r).unwrap();
        assert!(text.contains("\"h_max\": 1.2500000000000000e-1"));
        assert!(text.contains("\"dg_rate\": null"));
        assert_eq!(parse_report_json(&text).unwrap(), r);
    }
}
