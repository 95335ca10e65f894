//! JSON formats for channels and codes.
//!
//! Channel: `{"dim_in": d, "dim_out": d', "kraus": [K₀, K₁, …]}` where each
//! `Kᵢ` is a list of `dim_out` rows of `[re, im]` pairs. A flat row-major
//! list of `dim_out·dim_in` pairs is accepted as well.
//!
//! Code: `{"physical_dim": d, "words": [[[re, im], …], …]}`.

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::qec::Code;
use crate::scalar::{cx, Cx, Real};

type Pair = [f64; 2];

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixJson {
    Rows(Vec<Vec<Pair>>),
    Flat(Vec<Pair>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<MatrixJson>,
}

#[derive(Serialize)]
struct ChannelOut {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Vec<Vec<Pair>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeJson {
    physical_dim: usize,
    words: Vec<Vec<Pair>>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn to_cx<T: Real>(p: &Pair) -> Cx<T> {
    cx(T::lit(p[0]), T::lit(p[1]))
}

fn to_pair<T: Real>(z: &Cx<T>) -> Pair {
    [z.re.as_f64(), z.im.as_f64()]
}

fn matrix_from_json<T: Real>(m: &MatrixJson, rows: usize, cols: usize, index: usize) -> Result<Matrix<T>> {
    let shape_err = || Error::ShapeMismatch(format!("Kraus operator {index} is not {rows}x{cols}"));
    let data: Vec<Cx<T>> = match m {
        MatrixJson::Rows(r) => {
            if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                return Err(shape_err());
            }
            r.iter().flatten().map(to_cx).collect()
        }
        MatrixJson::Flat(f) => {
            if f.len() != rows * cols {
                return Err(shape_err());
            }
            f.iter().map(to_cx).collect()
        }
    };
    Matrix::from_vec(rows, cols, data)
}

/// Parse a channel, checking shapes but not completeness.
pub fn parse_channel_unchecked<T: Real>(text: &str) -> Result<Channel<T>> {
    let raw: ChannelJson = serde_json::from_str(text).map_err(parse_err)?;
    if raw.dim_in == 0 || raw.dim_out == 0 {
        return Err(Error::ShapeMismatch("dimensions must be positive".into()));
    }
    let kraus = raw
        .kraus
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, raw.dim_out, raw.dim_in, i))
        .collect::<Result<Vec<_>>>()?;
    Channel::from_kraus(kraus)
}

/// Parse a channel and require `Σ A†A = I`.
pub fn parse_channel<T: Real>(text: &str) -> Result<Channel<T>> {
    let c = parse_channel_unchecked::<T>(text)?;
    Channel::with_dims(c.dim_in(), c.dim_out(), c.into_kraus())
}

pub fn channel_to_json<T: Real>(c: &Channel<T>) -> String {
    let kraus = c
        .kraus()
        .iter()
        .map(|k| {
            (0..k.rows())
                .map(|r| (0..k.cols()).map(|j| to_pair(&k[(r, j)])).collect())
                .collect()
        })
        .collect();
    let out = ChannelOut {
        dim_in: c.dim_in(),
        dim_out: c.dim_out(),
        kraus,
    };
    serde_json::to_string_pretty(&out).expect("plain data serializes")
}

pub fn parse_code<T: Real>(text: &str) -> Result<Code<T>> {
    let raw: CodeJson = serde_json::from_str(text).map_err(parse_err)?;
    let words = raw
        .words
        .iter()
        .map(|w| w.iter().map(to_cx).collect())
        .collect();
    Code::new(raw.physical_dim, words)
}

pub fn code_to_json<T: Real>(code: &Code<T>) -> String {
    let out = CodeJson {
        physical_dim: code.physical_dim(),
        words: code.words().iter().map(|w| w.iter().map(to_pair).collect()).collect(),
    };
    serde_json::to_string_pretty(&out).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::amplitude_damping;
    use crate::qec::cly_code;

    #[test]
    fn channel_round_trip() {
        let ad = amplitude_damping(0.3f64).unwrap();
        let back: Channel<f64> = parse_channel(&channel_to_json(&ad)).unwrap();
        assert_eq!(back, ad);
    }

    #[test]
    fn flat_layout() {
        let text = r#"{"dim_in": 2, "dim_out": 2, "kraus": [[[1,0],[0,0],[0,0],[1,0]]]}"#;
        let c: Channel<f64> = parse_channel(text).unwrap();
        assert!(c.equals(&Channel::identity(2)).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let truncated = r#"{"dim_in": 2, "dim_out": 2, "kraus": [[[[1,0],[0,0]]"#;
        match parse_channel::<f64>(truncated) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 1 column")),
            other => panic!("{other:?}"),
        }
        let wrong_shape = r#"{"dim_in": 2, "dim_out": 2, "kraus": [[[[1,0],[0,0]]]]}"#;
        assert!(matches!(parse_channel::<f64>(wrong_shape), Err(Error::ShapeMismatch(_))));
        let incomplete = r#"{"dim_in": 1, "dim_out": 1, "kraus": [[[[0.9,0]]]]}"#;
        assert!(matches!(parse_channel::<f64>(incomplete), Err(Error::InvalidChannel { .. })));
        assert!(parse_channel_unchecked::<f64>(incomplete).is_ok());
    }

    #[test]
    fn code_round_trip() {
        let code = cly_code::<f64>(4).unwrap();
        let back: Code<f64> = parse_code(&code_to_json(&code)).unwrap();
        assert_eq!(back, code);
        let bad = r#"{"physical_dim": 2, "words": [[[1,0],[0,0]],[[1,0],[0,0]]]}"#;
        assert!(matches!(parse_code::<f64>(bad), Err(Error::NonOrthonormalWords { .. })));
    }
}
