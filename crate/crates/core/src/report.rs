//! Deterministic tabular emission: CSV helpers and parameter-hashed file
//! names. Floats print in shortest round-trip form, so identical inputs
//! give byte-identical files.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::cheeger::CutResult;
use crate::error::Result;
use crate::solver::Spectrum;

/// Twelve hex characters of the SHA-256 of the canonical parameter JSON.
pub fn params_hash(params: &serde_json::Value) -> String {
    let text = params.to_string();
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// index,eigenvalue rows.
pub fn spectrum_values_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in spectrum.eigenvalues.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

/// boundary_vertex_id plus one column per eigenindex.
pub fn spectrum_vectors_csv(spectrum: &Spectrum) -> String {
    let k = spectrum.boundary_vectors.len();
    let mut out = String::from("boundary_vertex_id");
    for i in 0..k {
        out.push_str(&format!(",e{i}"));
    }
    out.push('\n');
    for (row, &v) in spectrum.boundary_ids.iter().enumerate() {
        out.push_str(&v.to_string());
        for vec in &spectrum.boundary_vectors {
            out.push_str(&format!(",{}", vec[row]));
        }
        out.push('\n');
    }
    out
}

/// subset;h_ratio;hprime_ratio rows (subset as space-separated ids).
pub fn cut_table_csv(cuts: &[CutResult]) -> String {
    let mut out = String::from("subset,h_ratio,hprime_ratio,variant,exact\n");
    for c in cuts {
        let ids: Vec<String> = c.subset.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            ids.join(" "),
            c.h_ratio,
            c.hprime_ratio,
            c.variant.name(),
            c.exact
        ));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    std::fs::write(path, text)?;
    Ok(path.to_path_buf())
}
