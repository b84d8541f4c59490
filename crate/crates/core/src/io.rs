//! JSON exchange format for channels and subsystems.
//!
//! Complex numbers are `[re, im]` pairs. A channel is
//! `{"dim": d, "kraus": [K_1, ...]}` with each `K_i` a row-major list of rows; a
//! subsystem is `{"dim": d, "dA": .., "dB": .., "W": [...]}` with `W` given as its list
//! of columns.

use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::subsystem::SubsystemDecomposition;

pub type Entry = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim: usize,
    pub kraus: Vec<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemJson {
    pub dim: usize,
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    #[serde(rename = "W")]
    pub w: Vec<Vec<Entry>>,
}

/// Row-major `[re, im]` nesting.
pub fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Entry>> {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_columns(m: &ComplexMatrix) -> Vec<Vec<Entry>> {
    m.column_iter()
        .map(|col| col.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn from_nested(outer: &[Vec<Entry>], inner_len: usize, what: &str) -> Result<Vec<Entry>> {
    let mut flat = Vec::with_capacity(outer.len() * inner_len);
    for (i, list) in outer.iter().enumerate() {
        if list.len() != inner_len {
            return Err(Error::Parse(format!(
                "{what} {i} has {} entries, expected {inner_len}",
                list.len()
            )));
        }
        flat.extend_from_slice(list);
    }
    if flat.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse(format!("{what} contains a non-finite entry")));
    }
    Ok(flat)
}

pub fn matrix_from_rows(rows: &[Vec<Entry>], nrows: usize, ncols: usize) -> Result<ComplexMatrix> {
    if rows.len() != nrows {
        return Err(Error::Parse(format!("expected {nrows} rows, got {}", rows.len())));
    }
    let flat = from_nested(rows, ncols, "row")?;
    Ok(ComplexMatrix::from_row_iterator(
        nrows,
        ncols,
        flat.iter().map(|&[re, im]| c(re, im)),
    ))
}

pub fn matrix_from_columns(cols: &[Vec<Entry>], nrows: usize) -> Result<ComplexMatrix> {
    let flat = from_nested(cols, nrows, "column")?;
    Ok(ComplexMatrix::from_iterator(
        nrows,
        cols.len(),
        flat.iter().map(|&[re, im]| c(re, im)),
    ))
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        ChannelJson {
            dim: ch.dim(),
            kraus: ch.kraus().iter().map(matrix_rows).collect(),
        }
    }

    /// Builds the channel, checking trace preservation when `tol` is given.
    pub fn to_channel(&self, tol: Option<f64>) -> Result<KrausChannel> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| matrix_from_rows(k, self.dim, self.dim))
            .collect::<Result<Vec<_>>>()?;
        match tol {
            Some(t) => KrausChannel::new(kraus, t),
            None => KrausChannel::new_unchecked(kraus),
        }
    }
}

impl SubsystemJson {
    pub fn from_decomposition(dec: &SubsystemDecomposition) -> Self {
        SubsystemJson {
            dim: dec.dim(),
            d_a: dec.d_a(),
            d_b: dec.d_b(),
            w: matrix_columns(dec.isometry()),
        }
    }

    pub fn to_decomposition(&self, tol: f64) -> Result<SubsystemDecomposition> {
        if self.w.len() != self.d_a * self.d_b {
            return Err(Error::Parse(format!(
                "W has {} columns, expected dA*dB = {}",
                self.w.len(),
                self.d_a * self.d_b
            )));
        }
        let w = matrix_from_columns(&self.w, self.dim)?;
        SubsystemDecomposition::new(w, self.d_a, self.d_b, tol)
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    serde_json::to_string(&ChannelJson::from_channel(ch)).expect("finite floats serialize")
}

pub fn parse_channel(text: &str, tol: Option<f64>) -> Result<KrausChannel> {
    serde_json::from_str::<ChannelJson>(text)
        .map_err(parse_err)?
        .to_channel(tol)
}

pub fn subsystem_to_json(dec: &SubsystemDecomposition) -> String {
    serde_json::to_string(&SubsystemJson::from_decomposition(dec)).expect("finite floats serialize")
}

pub fn parse_subsystem(text: &str, tol: f64) -> Result<SubsystemDecomposition> {
    serde_json::from_str::<SubsystemJson>(text)
        .map_err(parse_err)?
        .to_decomposition(tol)
}
