use serde::{Deserialize, Serialize};

/// One derivation event. Serialized as one JSON object per line with the
/// fields `rule`, `inputs`, `output` and `sentence`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub rule: String,
    pub inputs: Vec<u32>,
    pub output: u32,
    pub sentence: String,
}

pub fn to_json_lines(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
        out.push('\n');
    }
    out
}
