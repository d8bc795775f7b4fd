//! Table, report CSV and trajectory CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use super::catalog::label;
use super::runner::RunReport;
use super::{ModelTag, ScenarioError};
use crate::fbsm::AdjointTrajectory;
use crate::model::{State, Trajectory};

pub const TRAJECTORY_HEADER: &str = "t,u,v,w,h,lambda_u,lambda_v,lambda_w";

fn cell(report: Option<&RunReport>) -> String {
    match report {
        Some(r) => format!("{:.4} ({}%)", r.j_optimal, r.percent_increase),
        None => "-".to_string(),
    }
}

/// Plain-text comparison table: one row per scenario, in first-seen order.
pub fn emit_table(reports: &[RunReport]) -> String {
    let mut order: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(&str, ModelTag), &RunReport> = BTreeMap::new();
    for r in reports {
        if !order.contains(&r.scenario.as_str()) {
            order.push(&r.scenario);
        }
        cells.insert((r.scenario.as_str(), r.model), r);
    }

    let header = ["Parameter values", "No Aug", "Model A", "Model B"];
    let rows: Vec<[String; 4]> = order
        .iter()
        .map(|&name| {
            let a = cells.get(&(name, ModelTag::A)).copied();
            let b = cells.get(&(name, ModelTag::B)).copied();
            let j0 = a
                .or(b)
                .map_or_else(|| "-".to_string(), |r| format!("{:.4}", r.j_no_control));
            [label(name).to_string(), j0, cell(a), cell(b)]
        })
        .collect();

    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cols: [&str; 4]| {
        let _ = writeln!(
            out,
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
            cols[0],
            cols[1],
            cols[2],
            cols[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        );
    };
    line(&mut out, header);
    let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 6));
    for row in &rows {
        line(&mut out, [&row[0], &row[1], &row[2], &row[3]]);
    }
    out
}

/// `scenario,model,j0,jopt,percent,h0,...` with full-precision values.
pub fn emit_report_csv(reports: &[RunReport]) -> String {
    let width = reports.iter().map(|r| r.controls.len()).max().unwrap_or(0);
    let mut out = String::from("scenario,model,j0,jopt,percent");
    for t in 0..width {
        let _ = write!(out, ",h{t}");
    }
    out.push('\n');
    for r in reports {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            r.scenario,
            r.model.label(),
            r.j_no_control,
            r.j_optimal,
            r.percent_increase
        );
        for t in 0..width {
            match r.controls.0.get(t) {
                Some(h) => {
                    let _ = write!(out, ",{h}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Writes one row per state. `h` is empty on the last row; adjoint fields are empty
/// when `adjoints` is `None`.
pub fn emit_csv(
    traj: &Trajectory<f64>,
    adjoints: Option<&AdjointTrajectory<f64>>,
    mut out: impl Write,
) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (t, x) in traj.states.iter().enumerate() {
        write!(out, "{t},{},{},{},", x.prey, x.predator, x.reserve)?;
        if let Some(h) = traj.controls.as_ref().and_then(|c| c.0.get(t)) {
            write!(out, "{h}")?;
        }
        match adjoints {
            Some(a) => writeln!(out, ",{},{},{}", a.lambda_u[t], a.lambda_v[t], a.lambda_w[t])?,
            None => writeln!(out, ",,,")?,
        }
    }
    Ok(())
}

/// Contents of a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrajectory {
    pub states: Vec<State<f64>>,
    pub controls: Vec<f64>,
    pub adjoints: Option<AdjointTrajectory<f64>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        message: message.into(),
    }
}

fn number(field: &str, line: usize) -> Result<f64, ScenarioError> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("expected a number, got `{field}`")))
}

pub fn parse_trajectory_csv(text: &str) -> Result<ParsedTrajectory, ScenarioError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TRAJECTORY_HEADER => {}
        _ => return Err(parse_err(1, format!("expected header `{TRAJECTORY_HEADER}`"))),
    }
    let mut states = Vec::new();
    let mut controls = Vec::new();
    let mut lambdas: Vec<[f64; 3]> = Vec::new();
    let mut any_missing_lambda = false;
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 8 {
            return Err(parse_err(line, format!("expected 8 fields, got {}", fields.len())));
        }
        states.push(State::new(
            number(fields[1], line)?,
            number(fields[2], line)?,
            number(fields[3], line)?,
        ));
        if !fields[4].trim().is_empty() {
            controls.push(number(fields[4], line)?);
        }
        if fields[5..].iter().all(|f| f.trim().is_empty()) {
            any_missing_lambda = true;
        } else {
            lambdas.push([
                number(fields[5], line)?,
                number(fields[6], line)?,
                number(fields[7], line)?,
            ]);
        }
    }
    let adjoints = (!any_missing_lambda && !lambdas.is_empty()).then(|| AdjointTrajectory {
        lambda_u: lambdas.iter().map(|l| l[0]).collect(),
        lambda_v: lambdas.iter().map(|l| l[1]).collect(),
        lambda_w: lambdas.iter().map(|l| l[2]).collect(),
    });
    Ok(ParsedTrajectory {
        states,
        controls,
        adjoints,
    })
}

/// Reads a control schedule: either a trajectory CSV (its `h` column) or bare
/// numbers separated by commas or newlines, optionally under an `h` header.
pub fn parse_controls(text: &str) -> Result<Vec<f64>, ScenarioError> {
    if text.lines().next().map(str::trim) == Some(TRAJECTORY_HEADER) {
        return Ok(parse_trajectory_csv(text)?.controls);
    }
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (idx == 0 && line == "h") {
            continue;
        }
        for field in line.split(',').filter(|f| !f.trim().is_empty()) {
            out.push(number(field, idx + 1)?);
        }
    }
    Ok(out)
}
