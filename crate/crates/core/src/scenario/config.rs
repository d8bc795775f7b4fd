//! Flat `key = value` scenario documents.
//!
//! One assignment per line, `#` starts a comment. Keys: `name`, `s`, `k_u`, `m`,
//! `delta1`, `delta2`, `gamma`, `q`, `k_w`, `n`, `M1`, `M2`, `N`, `A`, `T`, `u0`,
//! `v0`, `w0`. Missing keys keep their baseline value.

use std::fmt::Write;

use super::catalog::builtin_scenario;
use super::{ScenarioError, ScenarioSpec, BASELINE};

pub fn load_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let mut spec = builtin_scenario(BASELINE).expect("baseline is built in");
    spec.name = "custom".to_string();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| ScenarioError::Parse { line: line_no, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "name" {
            if value.is_empty() {
                return Err(parse_err("empty scenario name".into()));
            }
            spec.name = value.to_string();
            continue;
        }
        if key == "T" {
            spec.objective.horizon = value
                .parse()
                .map_err(|_| parse_err(format!("`T` must be a non-negative integer, got `{value}`")))?;
            continue;
        }
        let x: f64 = value
            .parse()
            .map_err(|_| parse_err(format!("`{key}` must be a number, got `{value}`")))?;
        let (p, o, s) = (&mut spec.params, &mut spec.objective, &mut spec.initial);
        let slot = match key {
            "s" => &mut p.prey_growth_rate,
            "k_u" => &mut p.prey_capacity,
            "m" => &mut p.prey_allee,
            "delta1" => &mut p.predation_rate,
            "delta2" => &mut p.conversion_rate,
            "gamma" => &mut p.predator_decay,
            "q" => &mut p.reserve_growth_rate,
            "k_w" => &mut p.reserve_capacity,
            "n" => &mut p.reserve_allee,
            "M1" => &mut o.quadratic_cost,
            "M2" => &mut o.linear_cost,
            "N" => &mut o.reserve_weight,
            "A" => &mut o.max_effort,
            "u0" => &mut s.prey,
            "v0" => &mut s.predator,
            "w0" => &mut s.reserve,
            _ => return Err(parse_err(format!("unknown key `{key}`"))),
        };
        *slot = x;
    }

    spec.validate()?;
    Ok(spec)
}

/// Writes every key; `load_scenario` of the output reproduces `spec` exactly.
pub fn serialize_scenario(spec: &ScenarioSpec) -> String {
    let (p, o, s) = (&spec.params, &spec.objective, &spec.initial);
    let mut out = String::new();
    let _ = writeln!(out, "name = {}", spec.name);
    let _ = writeln!(out, "T = {}", o.horizon);
    for (key, value) in [
        ("s", p.prey_growth_rate),
        ("k_u", p.prey_capacity),
        ("m", p.prey_allee),
        ("delta1", p.predation_rate),
        ("delta2", p.conversion_rate),
        ("gamma", p.predator_decay),
        ("q", p.reserve_growth_rate),
        ("k_w", p.reserve_capacity),
        ("n", p.reserve_allee),
        ("M1", o.quadratic_cost),
        ("M2", o.linear_cost),
        ("N", o.reserve_weight),
        ("A", o.max_effort),
        ("u0", s.prey),
        ("v0", s.predator),
        ("w0", s.reserve),
    ] {
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}
