use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use witness_core::{CVector, DensityMatrix, Hermitian, ProductVector};

use crate::io::{InputRecord, OperatorFile};

/// Machine-readable output of one command. Everything except
/// `generated_at` is a deterministic function of inputs, flags and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub generated_at: u64,
    pub inputs: Vec<InputRecord>,
    pub parameters: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, inputs: Vec<InputRecord>) -> Self {
        let generated_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at,
            inputs,
            parameters: Map::new(),
            tolerances: Map::new(),
            result: Value::Null,
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.into(), json!(value));
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.into(), json!(value));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub fn operator(h: &Hermitian) -> Value {
    json!(OperatorFile::from_operator(h))
}

pub fn state(rho: &DensityMatrix) -> Value {
    operator(rho.op())
}

pub fn vector(v: &CVector) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

pub fn product(p: &ProductVector) -> Value {
    json!({ "e": vector(p.e()), "f": vector(p.f()) })
}

pub fn weighted_products(terms: &[(f64, ProductVector)]) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|(w, p)| json!({ "weight": w, "product": product(p) }))
            .collect(),
    )
}
