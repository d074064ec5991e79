//! File formats shared by the library and the command-line front end.
//!
//! - sequence CSV: header `t,value`, one row per period, `t` ascending
//!   from 0 with no gaps or duplicates;
//! - profile CSV: header `t,member_1,...,member_m`;
//! - economy JSON: `{"horizon": T, "agents": [{"delta": d, "wealth": w}]}`;
//! - equilibrium JSON plus price/allocation CSVs;
//! - decomposition document: line-oriented attribute-value text.
//!
//! All floats are written with 17 significant digits so that files are
//! byte-stable across runs and parse back to the same bits.

use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::aggregate::{NormalizedFactor, Profile};
use crate::decompose::{BetaDeltaComponent, Decomposition};
use crate::market::{Allocation, Economy, EquilibriumResult, ExponentialAgent};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("expected header {expected:?}, found {found:?}")]
    BadHeader { expected: String, found: String },
    #[error(
        "row {line}: expected t={expected}, found t={found} (gaps and duplicates are rejected)"
    )]
    BadIndex {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("document is missing the {0} field")]
    MissingField(&'static str),
    #[error("invalid economy: {0}")]
    BadEconomy(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Formats a float with 17 significant digits.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

fn parse_float(text: &str, line: usize) -> Result<f64, FormatError> {
    text.trim().parse().map_err(|_| FormatError::Malformed {
        line,
        detail: format!("cannot parse {text:?} as a number"),
    })
}

fn parse_index(text: &str, line: usize) -> Result<usize, FormatError> {
    text.trim().parse().map_err(|_| FormatError::Malformed {
        line,
        detail: format!("cannot parse {text:?} as a period index"),
    })
}

/// Writes a sequence as `t,value` CSV.
pub fn write_sequence_csv(values: &[f64]) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{t},{}", format_float(*v));
    }
    out
}

/// Reads a `t,value` CSV, enforcing a dense ascending period index.
pub fn read_sequence_csv(text: &str) -> Result<Vec<f64>, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::BadHeader {
        expected: "t,value".into(),
        found: "<empty file>".into(),
    })?;
    let normalized: String = header
        .split(',')
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(",");
    if normalized != "t,value" {
        return Err(FormatError::BadHeader {
            expected: "t,value".into(),
            found: header.into(),
        });
    }
    let mut values = Vec::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let mut fields = row.split(',');
        let t_field = fields.next().ok_or(FormatError::Malformed {
            line,
            detail: "missing period column".into(),
        })?;
        let v_field = fields.next().ok_or(FormatError::Malformed {
            line,
            detail: "missing value column".into(),
        })?;
        if fields.next().is_some() {
            return Err(FormatError::Malformed {
                line,
                detail: "too many columns".into(),
            });
        }
        let t = parse_index(t_field, line)?;
        if t != values.len() {
            return Err(FormatError::BadIndex {
                line,
                expected: values.len(),
                found: t,
            });
        }
        values.push(parse_float(v_field, line)?);
    }
    Ok(values)
}

/// Writes a profile as `t,member_1,...,member_m` CSV.
pub fn write_profile_csv(profile: &Profile) -> String {
    let mut out = String::from("t");
    for i in 1..=profile.len() {
        let _ = write!(out, ",member_{i}");
    }
    out.push('\n');
    for t in 0..=profile.horizon() {
        let _ = write!(out, "{t}");
        for member in profile.members() {
            let _ = write!(out, ",{}", format_float(member.value(t)));
        }
        out.push('\n');
    }
    out
}

/// Reads a profile CSV into per-member value columns.
pub fn read_profile_csv(text: &str) -> Result<Profile, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::BadHeader {
        expected: "t,member_1,...".into(),
        found: "<empty file>".into(),
    })?;
    let head_fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if head_fields.first() != Some(&"t") || head_fields.len() < 2 {
        return Err(FormatError::BadHeader {
            expected: "t,member_1,...".into(),
            found: header.into(),
        });
    }
    let members = head_fields.len() - 1;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); members];
    let mut rows = 0usize;
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != members + 1 {
            return Err(FormatError::Malformed {
                line,
                detail: format!("expected {} columns, found {}", members + 1, fields.len()),
            });
        }
        let t = parse_index(fields[0], line)?;
        if t != rows {
            return Err(FormatError::BadIndex {
                line,
                expected: rows,
                found: t,
            });
        }
        for (column, field) in columns.iter_mut().zip(&fields[1..]) {
            column.push(parse_float(field, line)?);
        }
        rows += 1;
    }
    let factors = columns
        .into_iter()
        .enumerate()
        .map(|(i, values)| {
            NormalizedFactor::new(values).map_err(|e| FormatError::Malformed {
                line: 0,
                detail: format!("member_{}: {e}", i + 1),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Profile::new(factors).map_err(|e| FormatError::Malformed {
        line: 0,
        detail: e.to_string(),
    })
}

#[derive(Deserialize)]
struct EconomyDoc {
    horizon: usize,
    agents: Vec<AgentDoc>,
}

#[derive(Deserialize)]
struct AgentDoc {
    delta: f64,
    wealth: f64,
}

/// Reads an economy from its JSON document.
pub fn read_economy_json(text: &str) -> Result<Economy, FormatError> {
    let doc: EconomyDoc = serde_json::from_str(text)?;
    let agents = doc
        .agents
        .into_iter()
        .map(|a| ExponentialAgent {
            delta: a.delta,
            wealth: a.wealth,
        })
        .collect();
    Economy::new(agents, doc.horizon).map_err(|e| FormatError::BadEconomy(e.to_string()))
}

/// Writes an economy as JSON with 17-significant-digit floats.
pub fn write_economy_json(economy: &Economy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"horizon\": {},", economy.horizon());
    let _ = writeln!(out, "  \"agents\": [");
    let count = economy.agents().len();
    for (i, agent) in economy.agents().iter().enumerate() {
        let comma = if i + 1 < count { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"delta\": {}, \"wealth\": {}}}{comma}",
            format_float(agent.delta),
            format_float(agent.wealth)
        );
    }
    let _ = writeln!(out, "  ]");
    let _ = write!(out, "}}");
    out.push('\n');
    out
}

/// Writes an equilibrium result as JSON.
pub fn write_equilibrium_json(result: &EquilibriumResult) -> String {
    let float_list = |values: &[f64]| -> String {
        values
            .iter()
            .map(|v| format_float(*v))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"prices\": [{}],", float_list(&result.prices));
    let _ = writeln!(
        out,
        "  \"join_weights\": [{}],",
        float_list(&result.join_weights)
    );
    let rows: Vec<String> = result
        .allocation
        .shares()
        .iter()
        .map(|row| format!("[{}]", float_list(row)))
        .collect();
    let _ = writeln!(out, "  \"allocation\": [{}],", rows.join(", "));
    let supports: Vec<String> = result
        .supports
        .iter()
        .map(|s| {
            format!(
                "[{}]",
                s.iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
        .collect();
    let _ = writeln!(out, "  \"supports\": [{}],", supports.join(", "));
    let _ = writeln!(out, "  \"iterations\": {},", result.iterations);
    let _ = writeln!(out, "  \"residual\": {}", format_float(result.residual));
    let _ = write!(out, "}}");
    out.push('\n');
    out
}

/// Writes an allocation matrix as `t,agent_1,...,agent_n` CSV.
pub fn write_allocation_csv(allocation: &Allocation) -> String {
    let mut out = String::from("t");
    for i in 1..=allocation.agents() {
        let _ = write!(out, ",agent_{i}");
    }
    out.push('\n');
    for t in 0..allocation.periods() {
        let _ = write!(out, "{t}");
        for agent in 0..allocation.agents() {
            let _ = write!(out, ",{}", format_float(allocation.share(agent, t)));
        }
        out.push('\n');
    }
    out
}

/// Reads an allocation matrix CSV.
pub fn read_allocation_csv(text: &str) -> Result<Allocation, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::BadHeader {
        expected: "t,agent_1,...".into(),
        found: "<empty file>".into(),
    })?;
    let head_fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if head_fields.first() != Some(&"t") || head_fields.len() < 2 {
        return Err(FormatError::BadHeader {
            expected: "t,agent_1,...".into(),
            found: header.into(),
        });
    }
    let agents = head_fields.len() - 1;
    let mut rows_by_agent: Vec<Vec<f64>> = vec![Vec::new(); agents];
    let mut rows = 0usize;
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != agents + 1 {
            return Err(FormatError::Malformed {
                line,
                detail: format!("expected {} columns, found {}", agents + 1, fields.len()),
            });
        }
        let t = parse_index(fields[0], line)?;
        if t != rows {
            return Err(FormatError::BadIndex {
                line,
                expected: rows,
                found: t,
            });
        }
        for (column, field) in rows_by_agent.iter_mut().zip(&fields[1..]) {
            column.push(parse_float(field, line)?);
        }
        rows += 1;
    }
    Allocation::new(rows_by_agent).map_err(|e| FormatError::Malformed {
        line: 0,
        detail: e.to_string(),
    })
}

/// Writes a decomposition as an attribute-value document.
pub fn write_decomposition_doc(d: &Decomposition, horizon: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "horizon = {horizon}");
    let _ = writeln!(out, "scale = {}", format_float(d.scale));
    let _ = writeln!(out, "gamma = {}", format_float(d.gamma));
    for c in &d.components {
        let _ = writeln!(
            out,
            "component = beta={} delta={} switch={} eta={}",
            format_float(c.beta),
            format_float(c.delta),
            c.switch,
            format_float(c.eta)
        );
    }
    out
}

/// A decomposition document read back from text: enough to reconstruct
/// the factor it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionDoc {
    pub horizon: usize,
    pub scale: f64,
    pub gamma: f64,
    pub components: Vec<BetaDeltaComponent>,
}

/// Parses a decomposition document.
pub fn read_decomposition_doc(text: &str) -> Result<DecompositionDoc, FormatError> {
    let mut horizon = None;
    let mut scale = None;
    let mut gamma = None;
    let mut components = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let (key, value) = row.split_once('=').ok_or(FormatError::Malformed {
            line,
            detail: "expected `key = value`".into(),
        })?;
        let value = value.trim();
        match key.trim() {
            "horizon" => horizon = Some(parse_index(value, line)?),
            "scale" => scale = Some(parse_float(value, line)?),
            "gamma" => gamma = Some(parse_float(value, line)?),
            "component" => {
                let mut beta = None;
                let mut delta = None;
                let mut switch = None;
                let mut eta = None;
                for pair in value.split_whitespace() {
                    let (k, v) = pair.split_once('=').ok_or(FormatError::Malformed {
                        line,
                        detail: format!("bad component field {pair:?}"),
                    })?;
                    match k {
                        "beta" => beta = Some(parse_float(v, line)?),
                        "delta" => delta = Some(parse_float(v, line)?),
                        "switch" => switch = Some(parse_index(v, line)?),
                        "eta" => eta = Some(parse_float(v, line)?),
                        other => {
                            return Err(FormatError::Malformed {
                                line,
                                detail: format!("unknown component field {other:?}"),
                            })
                        }
                    }
                }
                components.push(BetaDeltaComponent {
                    beta: beta.ok_or(FormatError::MissingField("component beta"))?,
                    delta: delta.ok_or(FormatError::MissingField("component delta"))?,
                    switch: switch.ok_or(FormatError::MissingField("component switch"))?,
                    eta: eta.ok_or(FormatError::MissingField("component eta"))?,
                });
            }
            other => {
                return Err(FormatError::Malformed {
                    line,
                    detail: format!("unknown attribute {other:?}"),
                })
            }
        }
    }
    Ok(DecompositionDoc {
        horizon: horizon.ok_or(FormatError::MissingField("horizon"))?,
        scale: scale.ok_or(FormatError::MissingField("scale"))?,
        gamma: gamma.ok_or(FormatError::MissingField("gamma"))?,
        components,
    })
}
