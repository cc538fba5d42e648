//! JSON documents for frames, states, histories and observables.
//!
//! Complex numbers are written as `[re, im]`. Floats are printed with the shortest
//! representation that parses back to the same binary64, so a frame survives a
//! write/read cycle bit for bit.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::context::{Context, Frame, History};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::observable::Observable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub vectors: Vec<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl FrameDoc {
    pub fn of(c: &Context) -> Self {
        FrameDoc {
            vectors: c.frame().vectors().iter().map(|v| v.entries().to_vec()).collect(),
            name: c.name().map(str::to_owned),
        }
    }

    pub fn to_context(&self) -> Result<Context> {
        let frame = Frame::new(self.vectors.iter().cloned().map(CVector::new).collect())?;
        Ok(match &self.name {
            Some(name) => Context::named(frame, name.clone()),
            None => Context::new(frame),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub state: Vec<C64>,
}

impl StateDoc {
    pub fn to_state(&self) -> Result<CVector> {
        let v = CVector::new(self.state.clone());
        if !v.is_finite() {
            return Err(Error::InvalidConfig("state has non-finite entries".into()));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryDoc {
    pub contexts: Vec<FrameDoc>,
}

impl HistoryDoc {
    pub fn of(h: &History) -> Self {
        HistoryDoc {
            contexts: h.contexts().iter().map(FrameDoc::of).collect(),
        }
    }

    pub fn to_history(&self) -> Result<History> {
        History::new(self.contexts.iter().map(FrameDoc::to_context).collect::<Result<_>>()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableDoc {
    pub matrix: Vec<Vec<C64>>,
    /// Exact eigenvalues; numerical ones are snapped to these when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
}

impl ObservableDoc {
    pub fn of(o: &Observable) -> Self {
        ObservableDoc {
            matrix: o.matrix().rows(),
            eigenvalues: Some(o.spectrum().to_vec()),
        }
    }

    pub fn to_observable(&self) -> Result<Observable> {
        let m = CMatrix::from_rows(self.matrix.clone())?;
        if m.dim() == 0 {
            return Err(Error::InvalidConfig("observable matrix is empty".into()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidConfig("observable has non-finite entries".into()));
        }
        m.ensure_hermitian()?;
        match &self.eigenvalues {
            Some(values) => Observable::with_spectrum(m, values),
            None => Observable::new(m),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn frame_to_json(c: &Context) -> Result<String> {
    to_json_pretty(&FrameDoc::of(c))
}

pub fn frame_from_json(text: &str) -> Result<Context> {
    serde_json::from_str::<FrameDoc>(text)?.to_context()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_frame;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=6 {
            let c = Context::named(random_frame(n, &mut rng), "rand");
            let back = frame_from_json(&frame_to_json(&c).unwrap()).unwrap();
            for (a, b) in c.frame().vectors().iter().zip(back.frame().vectors()) {
                for (x, y) in a.entries().iter().zip(b.entries()) {
                    assert_eq!(x.re.to_bits(), y.re.to_bits());
                    assert_eq!(x.im.to_bits(), y.im.to_bits());
                }
            }
            assert_eq!(back.id(), c.id());
            assert_eq!(back.name(), Some("rand"));
        }
    }

    #[test]
    fn complex_is_written_as_pair() {
        let doc = StateDoc {
            state: vec![C64::new(0.5, -0.25)],
        };
        assert_eq!(serde_json::to_string(&doc).unwrap(), r#"{"state":[[0.5,-0.25]]}"#);
    }

    #[test]
    fn non_orthonormal_frame_rejected() {
        let text = r#"{"vectors": [[[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]}"#;
        assert!(matches!(frame_from_json(text), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn observable_doc_snaps_spectrum() {
        let text = r#"{"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]], "eigenvalues": [-1, 1]}"#;
        let o = serde_json::from_str::<ObservableDoc>(text).unwrap().to_observable().unwrap();
        assert_eq!(o.spectrum(), &[-1.0, 1.0]);
    }
}
