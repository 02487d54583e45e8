//! `nibble`: the schedule on a graph file.

use std::path::Path;

use nibblepack_core::analysis::{greedy_mis, GreedyOrder};
use nibblepack_core::graph::max_codegree;
use nibblepack_core::nibble::verify_independent;
use nibblepack_core::seeded_rng;
use serde_json::json;

use super::geometric::graph_json;
use super::{nibble_graph, schedule_json, stop_json, write_trace, Outcome};
use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::formats::{self, ResultFile, VERSION};

pub fn run(graph: &Path, s: &Settings, out: &Path) -> Result<Outcome> {
    let g = formats::read_graph(graph)?;
    let seed = s.seed();
    let mut rng = seeded_rng(seed);
    let (schedule, result) = nibble_graph(&g, s, &mut rng)?;
    if !verify_independent(&g, &result.independent_set) {
        return Err(CliError::Verification("returned set is not independent".into()));
    }
    let baseline = greedy_mis(&g, GreedyOrder::ByIndex).len();
    let k = result.independent_set.len();
    let params = json!({
        "command": "nibble",
        "graph": graph.display().to_string(),
        "schedule": schedule_json(&schedule, s.max_retries),
        "blow_up": s.blow_up,
    });
    let mut graph_report = graph_json(&g);
    graph_report["max_codegree"] = json!(max_codegree(&g));
    let report = json!({
        "graph": graph_report,
        "stop": stop_json(&result),
        "baseline_size": baseline,
        "blow_up": result.blow_up.as_ref().map(|b| json!({
            "copies": b.copies,
            "total_size": b.total_size,
            "per_copy_density": b.per_copy_density,
        })),
    });
    let summary = format!(
        "nibble: independent set of {k} on {} vertices (greedy by index {baseline})",
        g.n()
    );
    let mut files = Vec::new();
    let result_path = out.join("result.json");
    let file = ResultFile {
        independent_set: result.independent_set.clone(),
        size: k,
        verified: true,
        seed,
        params,
        version: VERSION.to_string(),
        report,
    };
    formats::write_json_pretty(&result_path, &file)?;
    files.push(result_path);
    write_trace(out, &result, &mut files)?;
    Ok(Outcome { summary, files })
}
