//! JSON mixture files.
//!
//! ```json
//! {"weights": [0.5, 0.5], "means": [[-2.0], [2.0]], "covariances": [[[1.0]], [[1.0]]]}
//! ```
//!
//! `"shared_covariance": [[...]]` may replace `"covariances"`. Weights are
//! normalized on load. The writer prints every number with 17 significant
//! digits so files round-trip bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mixture::Mixture;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureDoc {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    #[serde(default)]
    covariances: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    shared_covariance: Option<Vec<Vec<f64>>>,
}

fn matrix_from_rows(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Format(format!(
            "{field}: row {i} has {} entries, expected {n} (matrix must be square)",
            r.len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Parses a mixture document.
pub fn parse_mixture(text: &str) -> Result<Mixture> {
    let doc: MixtureDoc = serde_json::from_str(text)?;
    if doc.weights.len() != doc.means.len() {
        return Err(Error::Format(format!(
            "weights has {} entries but means has {}",
            doc.weights.len(),
            doc.means.len()
        )));
    }
    let means: Vec<DVector<f64>> = doc.means.iter().map(|m| DVector::from_vec(m.clone())).collect();
    let covariances = match (doc.covariances, doc.shared_covariance) {
        (Some(_), Some(_)) => {
            return Err(Error::Format(
                "give either covariances or shared_covariance, not both".into(),
            ))
        }
        (None, None) => return Err(Error::Format("missing covariances or shared_covariance".into())),
        (Some(covs), None) => {
            if covs.len() != means.len() {
                return Err(Error::Format(format!(
                    "covariances has {} entries but means has {}",
                    covs.len(),
                    means.len()
                )));
            }
            covs.iter()
                .enumerate()
                .map(|(i, c)| matrix_from_rows(c, &format!("covariances[{i}]")))
                .collect::<Result<Vec<_>>>()?
        }
        (None, Some(shared)) => vec![matrix_from_rows(&shared, "shared_covariance")?; means.len()],
    };
    Mixture::new(doc.weights, means, covariances)
}

pub fn read_mixture(path: &Path) -> Result<Mixture> {
    let text = std::fs::read_to_string(path)?;
    parse_mixture(&text)
}

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_vec(out: &mut String, v: impl Iterator<Item = f64>) {
    out.push('[');
    for (i, x) in v.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format_f64(x));
    }
    out.push(']');
}

fn push_matrix(out: &mut String, m: &DMatrix<f64>) {
    out.push('[');
    for i in 0..m.nrows() {
        if i > 0 {
            out.push_str(", ");
        }
        push_vec(out, m.row(i).iter().copied());
    }
    out.push(']');
}

/// Serializes a mixture; homoscedastic mixtures use `shared_covariance`.
pub fn mixture_to_json(m: &Mixture) -> String {
    let mut out = String::from("{\n  \"weights\": ");
    push_vec(&mut out, m.weights().into_iter());
    out.push_str(",\n  \"means\": [");
    for (i, mu) in m.means().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        push_vec(&mut out, mu.iter().copied());
    }
    out.push(']');
    if m.len() > 1 && m.is_homoscedastic_with(0.0) {
        out.push_str(",\n  \"shared_covariance\": ");
        push_matrix(&mut out, m.components()[0].covariance());
    } else {
        out.push_str(",\n  \"covariances\": [");
        for (i, c) in m.covariances().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            push_matrix(&mut out, c);
        }
        out.push(']');
    }
    let _ = write!(out, "\n}}\n");
    out
}

pub fn write_mixture(path: &Path, m: &Mixture) -> Result<()> {
    std::fs::write(path, mixture_to_json(m))?;
    Ok(())
}
