//! JSON interchange formats.
//!
//! Matrices: `{"rows": n, "cols": m, "data": [[re, im], ...]}`, row-major;
//! vectors use `cols = 1`. Channels: `{"d": n, "tag": "general|ru|rp",
//! "terms": [{"weight": w, "op": <matrix>}]}`.

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelTag, KrausChannel, KrausTerm};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn from_vector(v: &CVector) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Dimension("matrix must have at least one entry".into()));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix needs {} entries, found {}",
                self.rows,
                self.cols,
                self.rows * self.cols,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|[re, im]| c(*re, *im)),
        ))
    }

    pub fn is_vector(&self) -> bool {
        self.cols == 1
    }

    pub fn to_vector(&self) -> Result<CVector> {
        if !self.is_vector() {
            return Err(Error::Dimension(format!("expected a column vector, found {} columns", self.cols)));
        }
        let m = self.to_matrix()?;
        Ok(m.column(0).into_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub weight: f64,
    pub op: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub d: usize,
    pub tag: ChannelTag,
    pub terms: Vec<TermJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            d: ch.d(),
            tag: ch.tag(),
            terms: ch
                .terms()
                .iter()
                .map(|t| TermJson {
                    weight: t.weight,
                    op: MatrixJson::from_matrix(&t.op),
                })
                .collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(KrausTerm {
                    weight: t.weight,
                    op: t.op.to_matrix()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(self.d, terms, self.tag)
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Invalid(format!("malformed JSON: {e}"))
}

pub fn parse_matrix(text: &str) -> Result<MatrixJson> {
    serde_json::from_str(text).map_err(parse_err)
}

pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    serde_json::from_str::<ChannelJson>(text).map_err(parse_err)?.to_channel()
}

pub fn matrix_to_string(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(m)).expect("plain data serializes")
}

pub fn channel_to_string(ch: &KrausChannel) -> String {
    serde_json::to_string(&ChannelJson::from_channel(ch)).expect("plain data serializes")
}
