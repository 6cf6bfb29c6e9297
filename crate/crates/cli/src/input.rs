//! Loading of JSON inputs, with a digest of every byte that was read.

use std::collections::BTreeMap;
use std::path::Path;

use multalg::kernels::EuclideanPointSet;
use multalg::C64;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::failure::{Failure, Outcome};

/// Inputs consumed by a run, keyed by role.
#[derive(Default)]
pub struct Inputs {
    seen: BTreeMap<String, Value>,
}

impl Inputs {
    pub fn file<T: DeserializeOwned>(&mut self, role: &str, path: &Path) -> Outcome<T> {
        let (shown, value) = self.raw(role, path)?;
        typed(&shown, value)
    }

    /// A sample is either a point-set object or a bare list of planar
    /// points `[[re, im], ...]`.
    pub fn sample(&mut self, path: &Path) -> Outcome<EuclideanPointSet<f64>> {
        let (shown, value) = self.raw("sample", path)?;
        if value.is_array() {
            let points: Vec<C64> = typed(&shown, value)?;
            Ok(EuclideanPointSet::planar(points)?)
        } else {
            typed(&shown, value)
        }
    }

    fn raw(&mut self, role: &str, path: &Path) -> Outcome<(String, Value)> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        self.seen
            .insert(role.into(), json!({ "path": shown, "sha256": digest(text.as_bytes()) }));
        Ok((shown.clone(), syntax(&shown, &text)?))
    }

    /// An argument given inline on the command line.
    pub fn inline<T: DeserializeOwned>(&mut self, role: &str, text: &str) -> Outcome<T> {
        self.seen.insert(
            role.into(),
            json!({ "inline": text, "sha256": digest(text.as_bytes()) }),
        );
        let shown = format!("--{role}");
        typed(&shown, syntax(&shown, text)?)
    }

    pub fn into_json(self) -> Value {
        Value::Object(self.seen.into_iter().collect())
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn syntax(path: &str, text: &str) -> Outcome<Value> {
    serde_json::from_str(text).map_err(|e| Failure::Malformed {
        path: path.into(),
        line: e.line(),
        column: e.column(),
        message: strip_location(&e.to_string()),
    })
}

fn typed<T: DeserializeOwned>(path: &str, value: Value) -> Outcome<T> {
    serde_json::from_value(value).map_err(|e| Failure::Schema {
        path: path.into(),
        message: e.to_string(),
    })
}

fn strip_location(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Complex scalar written as a number or as `[re, im]`.
#[derive(serde::Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex(C64),
}

impl From<Scalar> for C64 {
    fn from(s: Scalar) -> C64 {
        match s {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex(z) => z,
        }
    }
}

pub fn complex_list(v: Vec<Scalar>) -> Vec<C64> {
    v.into_iter().map(C64::from).collect()
}

/// Dense complex matrix `{"re": [[..]], "im": [[..]]}`; `im` defaults to zero.
#[derive(serde::Deserialize)]
pub struct MatrixInput {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixInput {
    pub fn into_matrix(self) -> Outcome<multalg::Matrix> {
        let im = self
            .im
            .unwrap_or_else(|| self.re.iter().map(|r| vec![0.0; r.len()]).collect());
        Ok(multalg::linalg::CMatrix::from_parts(&self.re, &im)?)
    }
}
