//! Text and JSON serialization of vector fields.
//!
//! One term per line: `re im | k… | i… | j:e,… | j:e,… | comp` where empty
//! exponent lists are written as `-` and `comp` is one of `x{j}`, `y{j}`,
//! `z{j}`, `zb{j}`.

use serde::{Deserialize, Serialize};

use super::field::VectorField;
use super::monomial::{Component, MonomialKey, SparseExp};
use super::sites::{SiteSet, Truncation};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

pub const FORMAT_TAG: &str = "dnlw-vf/1";

fn fmt_sparse(s: &SparseExp) -> String {
    if s.is_empty() {
        return "-".into();
    }
    s.iter()
        .map(|(j, e)| format!("{j}:{e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn fmt_list<V: ToString>(v: &[V]) -> String {
    if v.is_empty() {
        return "-".into();
    }
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn term_to_line<T: Real>(key: &MonomialKey, c: &Cplx<T>) -> String {
    format!(
        "{:e} {:e} | {} | {} | {} | {} | {}",
        c.re,
        c.im,
        fmt_list(&key.k),
        fmt_list(&key.i),
        fmt_sparse(&key.alpha),
        fmt_sparse(&key.beta),
        key.component
    )
}

/// Line-oriented text, one term per line in canonical order.
pub fn to_text<T: Real>(x: &VectorField<T>) -> String {
    let mut out = String::new();
    for (k, c) in x.terms() {
        out.push_str(&term_to_line(k, c));
        out.push('\n');
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_list<V: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<V>> {
    let s = s.trim();
    if s == "-" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(line, format!("bad integer `{t}`"))))
        .collect()
}

fn parse_sparse(s: &str, line: usize) -> Result<Vec<(i32, u32)>> {
    let s = s.trim();
    if s == "-" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let (j, e) = t
                .trim()
                .split_once(':')
                .ok_or_else(|| perr(line, format!("expected j:e, got `{t}`")))?;
            let j = j.trim().parse().map_err(|_| perr(line, format!("bad site `{j}`")))?;
            let e = e.trim().parse().map_err(|_| perr(line, format!("bad exponent `{e}`")))?;
            Ok((j, e))
        })
        .collect()
}

fn parse_component(s: &str, line: usize) -> Result<Component> {
    let s = s.trim();
    let (ctor, rest): (fn(i32) -> Component, &str) = if let Some(r) = s.strip_prefix("zb") {
        (Component::Zbar, r)
    } else if let Some(r) = s.strip_prefix('z') {
        (Component::Z, r)
    } else if let Some(r) = s.strip_prefix('x') {
        (Component::X, r)
    } else if let Some(r) = s.strip_prefix('y') {
        (Component::Y, r)
    } else {
        return Err(perr(line, format!("unknown component `{s}`")));
    };
    let j = rest
        .parse()
        .map_err(|_| perr(line, format!("bad component site `{rest}`")))?;
    Ok(ctor(j))
}

pub fn parse_line<T: Real>(text: &str, line: usize) -> Result<(MonomialKey, Cplx<T>)> {
    let parts: Vec<&str> = text.split('|').collect();
    if parts.len() != 6 {
        return Err(perr(line, format!("expected 6 fields, found {}", parts.len())));
    }
    let cs: Vec<&str> = parts[0].split_whitespace().collect();
    if cs.len() != 2 {
        return Err(perr(line, "coefficient needs `re im`"));
    }
    let num = |t: &str| -> Result<T> {
        let v: f64 = t.parse().map_err(|_| perr(line, format!("bad number `{t}`")))?;
        Ok(T::lit(v))
    };
    let c = Cplx::new(num(cs[0])?, num(cs[1])?);
    let key = MonomialKey::new(
        parse_component(parts[5], line)?,
        parse_list(parts[1], line)?,
        parse_list(parts[2], line)?,
        parse_sparse(parts[3], line)?,
        parse_sparse(parts[4], line)?,
    );
    Ok((key, c))
}

/// Parses the text format; blank lines and `#` comments are skipped.
pub fn from_text<T: Real>(text: &str, sites: SiteSet, trunc: Truncation) -> Result<VectorField<T>> {
    let mut f = VectorField::new(sites, trunc);
    for (idx, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (key, c) = parse_line(l, idx + 1)?;
        f.add_term(key, c).map_err(|e| perr(idx + 1, e.to_string()))?;
    }
    Ok(f)
}

#[derive(Serialize, Deserialize)]
struct FieldDoc {
    format: String,
    sites: SiteSet,
    truncation: Truncation,
    terms: Vec<String>,
}

pub fn to_json<T: Real>(x: &VectorField<T>) -> Result<String> {
    let doc = FieldDoc {
        format: FORMAT_TAG.into(),
        sites: x.sites().clone(),
        truncation: *x.truncation(),
        terms: x.terms().map(|(k, c)| term_to_line(k, c)).collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json<T: Real>(s: &str) -> Result<VectorField<T>> {
    let doc: FieldDoc = serde_json::from_str(s)?;
    if doc.format != FORMAT_TAG {
        return Err(Error::Config(format!("unknown vector field format `{}`", doc.format)));
    }
    let mut f = VectorField::new(doc.sites, doc.truncation);
    for (idx, l) in doc.terms.iter().enumerate() {
        let (key, c) = parse_line(l, idx + 1)?;
        f.add_term(key, c).map_err(|e| perr(idx + 1, e.to_string()))?;
    }
    Ok(f)
}
