//! Text format for generators.
//!
//! ```toml
//! dim = 2
//! hamiltonian = ["0.5,0", "0,0",
//!                "0,0",  "-0.5,0"]   # row-major "re,im" entries
//!
//! [[jump]]
//! matrix = ["0,0", "1,0",
//!           "0,0", "0,0"]
//! rate = 1.0
//! ```
//!
//! `jump` blocks may be repeated or omitted. Every error message starts
//! with `line:col` of the offending value.

use std::ops::Range;
use std::path::Path;

use num_complex::Complex;
use serde::Deserialize;
use toml::Spanned;

use super::{GkslGenerator, JumpTerm};
use crate::error::{Error, Result};
use crate::linalg::hermiticity_deviation;
use crate::scalar::{ComplexMatrix, Real};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    dim: Spanned<i64>,
    hamiltonian: Spanned<Vec<Spanned<String>>>,
    #[serde(default)]
    jump: Vec<RawJump>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJump {
    matrix: Spanned<Vec<Spanned<String>>>,
    rate: Spanned<f64>,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

fn at(src: &str, span: Range<usize>, msg: impl std::fmt::Display) -> Error {
    let (line, col) = position(src, span.start);
    Error::Parse(format!("{line}:{col}: {msg}"))
}

fn parse_entry<T: Real>(src: &str, raw: &Spanned<String>) -> Result<Complex<T>> {
    let text = raw.get_ref();
    let mut parts = text.split(',');
    let (re, im) = match (parts.next(), parts.next(), parts.next()) {
        (Some(re), Some(im), None) => (re.trim(), im.trim()),
        _ => return Err(at(src, raw.span(), format!("expected \"re,im\", got {text:?}"))),
    };
    let parse = |s: &str| -> Result<f64> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(at(src, raw.span(), format!("invalid number {s:?} in entry {text:?}"))),
        }
    };
    Ok(Complex::new(T::of(parse(re)?), T::of(parse(im)?)))
}

fn parse_matrix<T: Real>(
    src: &str,
    raw: &Spanned<Vec<Spanned<String>>>,
    dim: usize,
    name: &str,
) -> Result<ComplexMatrix<T>> {
    let entries = raw.get_ref();
    if entries.len() != dim * dim {
        return Err(at(src, raw.span(), format!("{name} needs {} entries for dim {dim}, got {}", dim * dim, entries.len())));
    }
    let mut m = ComplexMatrix::<T>::zeros(dim, dim);
    for (idx, e) in entries.iter().enumerate() {
        m[(idx / dim, idx % dim)] = parse_entry(src, e)?;
    }
    Ok(m)
}

/// Parses a generator document.
pub fn parse_generator<T: Real>(src: &str) -> Result<GkslGenerator<T>> {
    let raw: RawGenerator = toml::from_str(src).map_err(|e| match e.span() {
        Some(span) => at(src, span, e.message()),
        None => Error::Parse(e.message().to_string()),
    })?;
    let dim = *raw.dim.get_ref();
    if dim < 1 {
        return Err(at(src, raw.dim.span(), format!("dim must be positive, got {dim}")));
    }
    let dim = dim as usize;
    let h = parse_matrix::<T>(src, &raw.hamiltonian, dim, "hamiltonian")?;
    let dev = hermiticity_deviation(&h);
    if dev > T::tol(crate::Tolerances::DEFAULT.hamiltonian) {
        return Err(at(src, raw.hamiltonian.span(), format!("hamiltonian is not Hermitian (max |H - H^dagger| = {dev:e})")));
    }
    let mut terms = Vec::with_capacity(raw.jump.len());
    for (i, j) in raw.jump.iter().enumerate() {
        let rate = *j.rate.get_ref();
        if !rate.is_finite() || rate < 0.0 {
            return Err(at(src, j.rate.span(), format!("rate of jump {} must be >= 0, got {rate}", i + 1)));
        }
        let matrix = parse_matrix::<T>(src, &j.matrix, dim, "jump matrix")?;
        terms.push(JumpTerm { jump_op: matrix, rate: T::of(rate) });
    }
    GkslGenerator::new(h, terms)
}

/// Reads and parses a generator file.
pub fn read_generator<T: Real>(path: &Path) -> Result<GkslGenerator<T>> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_generator(&src).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}:{msg}", path.display())),
        other => other,
    })
}
