//! Text format for channel specifications.
//!
//! A specification is a JSON value of one of these shapes:
//!
//! ```text
//! "sqrt_x"                                     named preset
//! "amplitude_damping(0.001)"                   preset with a rate
//! { "preset": "depolarizing(0.01)" }           same, object form
//! { "dim": 2, "unitary": [[e, e], [e, e]] }    single unitary
//! { "dim": 2, "kraus": [[[e, e], [e, e]], ..], "relaxed": false }
//! { "sequence": [spec, spec, ..] }             one step runs each in order
//! ```
//!
//! A matrix entry `e` is either a real number or a `[re, im]` pair. Kraus
//! operators use the Heisenberg convention `M -> sum K M K^dag` and must
//! satisfy `sum K K^dag = 1` unless `"relaxed": true`.
//!
//! Presets: `identity(d)`, `sqrt_x`, `rx(theta)`, `amplitude_damping(g)`,
//! `phase_damping(l)`, `depolarizing(q)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::kraus::KrausChannel;
use super::presets::{
    make_amplitude_damping, make_depolarizing, make_phase_damping, make_unitary_channel, rx,
    sqrt_x_channel,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Parsed, not yet built, channel description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Preset(String),
    Object(Value),
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec::Preset("sqrt_x".into())
    }
}

impl ChannelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<KrausChannel> {
        match self {
            ChannelSpec::Preset(name) => build_preset(name),
            ChannelSpec::Object(v) => build_value(v),
        }
    }
}

/// Parses and builds in one step.
pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    ChannelSpec::parse(text)?.build()
}

fn build_preset(name: &str) -> Result<KrausChannel> {
    let name = name.trim();
    let (head, arg) = match name.find('(') {
        Some(open) => {
            let close = name
                .rfind(')')
                .filter(|&c| c > open)
                .ok_or_else(|| Error::invalid(format!("unbalanced parentheses in preset '{name}'")))?;
            let arg: f64 = name[open + 1..close]
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad numeric argument in preset '{name}'")))?;
            (name[..open].trim(), Some(arg))
        }
        None => (name, None),
    };
    let need = |what: &str| arg.ok_or_else(|| Error::invalid(format!("preset '{head}' needs a {what} argument")));
    match head {
        "sqrt_x" => Ok(sqrt_x_channel()),
        "identity" => {
            let d = need("dimension")?;
            if d < 1.0 || d.fract() != 0.0 {
                return Err(Error::invalid(format!("identity dimension {d} is not a positive integer")));
            }
            Ok(KrausChannel::identity(d as usize))
        }
        "rx" => make_unitary_channel(&rx(need("angle")?)),
        "amplitude_damping" => make_amplitude_damping(need("rate")?),
        "phase_damping" => make_phase_damping(need("rate")?),
        "depolarizing" => make_depolarizing(need("rate")?),
        other => Err(Error::invalid(format!("unknown channel preset '{other}'"))),
    }
}

fn entry(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(Error::invalid(format!("matrix entry {v} is not [re, im]"))),
            }
        }
        _ => Err(Error::invalid(format!("matrix entry {v} is neither a number nor [re, im]"))),
    }
}

fn matrix(v: &Value, dim: usize) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::invalid("matrix must be an array of rows"))?;
    if rows.len() != dim {
        return Err(Error::dim(format!("matrix has {} rows, expected {dim}", rows.len())));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::invalid(format!("row {i} is not an array")))?;
        if row.len() != dim {
            return Err(Error::dim(format!("row {i} has {} entries, expected {dim}", row.len())));
        }
        for e in row {
            data.push(entry(e)?);
        }
    }
    ComplexMatrix::new(dim, dim, data)
}

fn build_value(v: &Value) -> Result<KrausChannel> {
    let obj = match v {
        Value::String(s) => return build_preset(s),
        Value::Object(o) => o,
        _ => return Err(Error::invalid("channel spec must be a string or an object")),
    };
    if let Some(p) = obj.get("preset") {
        let name = p.as_str().ok_or_else(|| Error::invalid("'preset' must be a string"))?;
        return build_preset(name);
    }
    if let Some(seq) = obj.get("sequence") {
        let parts = seq.as_array().ok_or_else(|| Error::invalid("'sequence' must be an array"))?;
        let mut iter = parts.iter();
        let first = iter.next().ok_or_else(|| Error::invalid("'sequence' is empty"))?;
        let mut ch = build_value(first)?;
        for part in iter {
            ch = ch.then(&build_value(part)?)?;
        }
        return Ok(ch);
    }
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::invalid("channel spec needs a positive integer 'dim'"))? as usize;
    if dim == 0 {
        return Err(Error::invalid("'dim' must be positive"));
    }
    let relaxed = obj.get("relaxed").and_then(Value::as_bool).unwrap_or(false);
    match (obj.get("unitary"), obj.get("kraus")) {
        (Some(u), None) => make_unitary_channel(&matrix(u, dim)?),
        (None, Some(k)) => {
            let list = k.as_array().ok_or_else(|| Error::invalid("'kraus' must be an array of matrices"))?;
            let ops = list.iter().map(|m| matrix(m, dim)).collect::<Result<Vec<_>>>()?;
            if relaxed {
                KrausChannel::new_relaxed(ops)
            } else {
                KrausChannel::new(ops)
            }
        }
        (Some(_), Some(_)) => Err(Error::invalid("give either 'unitary' or 'kraus', not both")),
        (None, None) => Err(Error::invalid("channel spec needs 'unitary', 'kraus', 'preset' or 'sequence'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        assert_eq!(parse_channel("\"sqrt_x\"").unwrap(), sqrt_x_channel());
        assert_eq!(parse_channel("\"identity(3)\"").unwrap().dim(), 3);
        assert_eq!(parse_channel(r#"{"preset": "amplitude_damping(0.1)"}"#).unwrap().kraus_ops().len(), 2);
        assert!(parse_channel("\"depolarizing(1.5)\"").is_err());
        assert!(parse_channel("\"warp_drive\"").is_err());
        assert!(parse_channel("\"phase_damping\"").is_err());
    }

    #[test]
    fn explicit_unitary_and_kraus() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(r#"{{"dim": 2, "unitary": [[{s}, [0, {m}]], [[0, {m}], {s}]]}}"#, m = -s);
        let parsed = parse_channel(&text).unwrap();
        assert!(parsed.kraus_ops()[0].max_abs_diff(&sqrt_x_channel().kraus_ops()[0]) < 1e-15);
        let kraus = r#"{"dim": 2, "kraus": [[[1, 0], [0, 1]]]}"#;
        assert_eq!(parse_channel(kraus).unwrap(), KrausChannel::identity(2));
    }

    #[test]
    fn non_normalized_needs_relaxed_flag() {
        let strict = r#"{"dim": 1, "kraus": [[[0.9]]]}"#;
        assert!(parse_channel(strict).is_err());
        let relaxed = r#"{"dim": 1, "kraus": [[[0.9]]], "relaxed": true}"#;
        assert!(parse_channel(relaxed).unwrap().is_relaxed());
    }

    #[test]
    fn sequence_composes() {
        let ch = parse_channel(r#"{"sequence": ["sqrt_x", "amplitude_damping(0.01)"]}"#).unwrap();
        assert_eq!(ch.kraus_ops().len(), 2);
        assert!(ch.normalization_error() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        assert!(parse_channel(r#"{"dim": 2, "unitary": [[1, 0]]}"#).is_err());
        assert!(parse_channel(r#"{"dim": 2, "kraus": [[[1, 0], [0, "x"]]]}"#).is_err());
        assert!(parse_channel(r#"{"kraus": []}"#).is_err());
    }
}
