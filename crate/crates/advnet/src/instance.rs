//! The JSON instance format consumed by the command line: a raw network
//! description plus the alphabet size and adversary budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::{validate, EdgeId, Network, NetworkSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub alphabet: usize,
    #[serde(flatten)]
    pub network: NetworkSpec,
    #[serde(default)]
    pub t: usize,
}

/// A parsed and validated instance. `edge_map[original id] = id` after the
/// validator's topological reorder, so file-relative edge ids stay usable.
#[derive(Debug, Clone)]
pub struct Instance {
    pub alphabet: usize,
    pub budget: usize,
    pub network: Network,
    pub edge_map: Vec<EdgeId>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.alphabet < 2 {
        return Err(Error::ParameterOutOfRange("alphabet must have at least 2 symbols".into()));
    }
    let validated = validate(&file.network)?;
    Ok(Instance {
        alphabet: file.alphabet,
        budget: file.t,
        network: validated.network,
        edge_map: validated.edge_map,
    })
}

pub fn load_instance(path: &std::path::Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    parse_instance(&text)
}

pub fn instance_json(network: &Network, alphabet: usize, budget: usize) -> serde_json::Value {
    let spec: NetworkSpec = network.clone().into();
    let mut value = serde_json::to_value(&spec).expect("specs serialize");
    let obj = value.as_object_mut().unwrap();
    obj.insert("alphabet".into(), alphabet.into());
    obj.insert("t".into(), budget.into());
    value
}
