//! JSON renderings of results and traces.

use serde_json::{json, Value};

use crate::graph::{Graph, Label};
use crate::narrowing::Trace;
use crate::query::{QueryResult, SolutionTable};

fn label(l: &Label) -> Value {
    Value::String(l.to_string())
}

pub fn table_json(t: &SolutionTable) -> Value {
    json!({
        "columns": t.columns.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "rows": t.rows.iter().map(|r| r.iter().map(label).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn graph_json(g: &Graph) -> Value {
    json!({
        "nodes": g.nodes().iter().map(label).collect::<Vec<_>>(),
        "triples": g
            .triples()
            .iter()
            .map(|t| t.labels().map(label).to_vec())
            .collect::<Vec<_>>(),
    })
}

pub fn result_json(r: &QueryResult) -> Value {
    match r {
        QueryResult::Graph(g) => graph_json(g),
        QueryResult::Table(t) => table_json(t),
        QueryResult::Pair(g, t) => json!({ "graph": graph_json(g), "table": table_json(t) }),
    }
}

pub fn trace_json(t: &Trace) -> Value {
    json!({
        "steps": t
            .steps()
            .iter()
            .map(|s| json!({ "rule": s.rule.to_string(), "position": s.position.to_string() }))
            .collect::<Vec<_>>(),
    })
}
