//! Native on-disk instance format and instance-set manifests.
//!
//! Instances are stored as schema-versioned, self-describing JSON
//! documents. Reals round-trip exactly (`decode(encode(x)) == x`), every
//! field is mandatory, and unknown fields are rejected. An instance set is
//! one file per instance plus a manifest naming the split, the generation
//! spec and the seed list.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CodecError;
use crate::generate::{GenerationSpec, InstanceSet};
use crate::instance::{InstanceData, InstanceParts, Problem, SoftParams, SquareMatrix};

/// Bumped on any incompatible change to the document layout.
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    schema: u64,
    name: String,
    problem: Problem,
    seed: u64,
    coords: Vec<[f64; 2]>,
    is_depot: Vec<bool>,
    demand: Vec<f64>,
    profit: Vec<f64>,
    service_time: Vec<f64>,
    tw_open: Vec<f64>,
    tw_close: Vec<f64>,
    capacity: f64,
    agent_home_depot: Vec<usize>,
    pickup_of: Vec<Option<usize>>,
    soft: Option<SoftParams>,
    /// Present only when the travel matrix was supplied explicitly;
    /// otherwise it is re-derived from the coordinates on decode.
    travel: Option<Vec<Vec<f64>>>,
}

/// Serializes an instance to the native document format.
pub fn encode_instance(inst: &InstanceData) -> Result<String, CodecError> {
    if !inst.all_finite() {
        return Err(CodecError::NonFinite);
    }
    let doc = InstanceDoc {
        schema: SCHEMA_VERSION,
        name: inst.name.clone(),
        problem: inst.problem,
        seed: inst.seed,
        coords: inst.coords.clone(),
        is_depot: inst.is_depot.clone(),
        demand: inst.demand.clone(),
        profit: inst.profit.clone(),
        service_time: inst.service_time.clone(),
        tw_open: inst.tw_open.clone(),
        tw_close: inst.tw_close.clone(),
        capacity: inst.capacity,
        agent_home_depot: inst.agent_home_depot.clone(),
        pickup_of: inst.pickup_of.clone(),
        soft: inst.soft,
        travel: inst.explicit_travel().map(SquareMatrix::to_rows),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| CodecError::Decode(e.to_string()))
}

fn schema_of(value: &Value) -> Result<u64, CodecError> {
    value
        .get("schema")
        .and_then(Value::as_u64)
        .ok_or_else(|| CodecError::Decode("missing schema field".into()))
}

/// Decodes a native instance document.
pub fn decode_instance(bytes: &[u8]) -> Result<InstanceData, CodecError> {
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| CodecError::Decode(e.to_string()))?;
    let found = schema_of(&value)?;
    if found != SCHEMA_VERSION {
        return Err(CodecError::SchemaVersion {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    let doc: InstanceDoc =
        serde_json::from_value(value).map_err(|e| CodecError::Decode(e.to_string()))?;
    let explicit_travel = doc
        .travel
        .map(SquareMatrix::from_rows)
        .transpose()
        .map_err(CodecError::Instance)?;
    InstanceData::new(InstanceParts {
        name: doc.name,
        problem: doc.problem,
        seed: doc.seed,
        coords: doc.coords,
        is_depot: doc.is_depot,
        demand: doc.demand,
        profit: doc.profit,
        service_time: doc.service_time,
        tw_open: doc.tw_open,
        tw_close: doc.tw_close,
        capacity: doc.capacity,
        agent_home_depot: doc.agent_home_depot,
        pickup_of: doc.pickup_of,
        soft: doc.soft,
        explicit_travel,
    })
    .map_err(CodecError::Instance)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    schema: u64,
    set: InstanceSet,
}

/// Serializes an instance-set manifest.
pub fn encode_manifest(set: &InstanceSet) -> Result<String, CodecError> {
    let doc = ManifestDoc {
        schema: SCHEMA_VERSION,
        set: set.clone(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| CodecError::Decode(e.to_string()))
}

/// Decodes an instance-set manifest.
pub fn decode_manifest(bytes: &[u8]) -> Result<InstanceSet, CodecError> {
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| CodecError::Decode(e.to_string()))?;
    let found = schema_of(&value)?;
    if found != SCHEMA_VERSION {
        return Err(CodecError::SchemaVersion {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    let doc: ManifestDoc =
        serde_json::from_value(value).map_err(|e| CodecError::Decode(e.to_string()))?;
    Ok(doc.set)
}

/// Canonical file name for a generated instance.
pub fn instance_filename(spec: &GenerationSpec, seed: u64) -> String {
    format!("{}_n{}_s{}.json", spec.problem, spec.num_services, seed)
}

/// Canonical manifest file name.
pub const MANIFEST_FILENAME: &str = "manifest.json";
