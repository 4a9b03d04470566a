//! Graph generators and a sweep runner that tabulates pipeline runs.

mod generators;

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::graph::Graph;
use crate::pipeline::{partition_graph, RunConfig};

pub use generators::{generate, GeneratorSpec, Stencil};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub graph: String,
    pub config: String,
    pub vertices: usize,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub cutsize: Option<f64>,
    pub imbalance: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

const COLUMNS: [&str; 9] = [
    "graph",
    "config",
    "vertices",
    "iterations",
    "converged",
    "cutsize",
    "imbalance",
    "seconds",
    "error",
];

impl SweepTable {
    pub fn row(&self, graph: &str, config: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.graph == graph && r.config == config)
    }

    /// Writes the table with `sep` between fields. Timing is omitted when
    /// `with_time` is false so that output is reproducible.
    pub fn write_delimited<W: Write>(&self, mut out: W, sep: char, with_time: bool) -> std::io::Result<()> {
        let cols: Vec<&str> = COLUMNS.iter().copied().filter(|c| with_time || *c != "seconds").collect();
        writeln!(out, "{}", cols.join(&sep.to_string()))?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            let mut fields = vec![
                r.graph.clone(),
                r.config.clone(),
                r.vertices.to_string(),
                opt(r.iterations.map(|v| v.to_string())),
                opt(r.converged.map(|v| v.to_string())),
                opt(r.cutsize.map(|v| v.to_string())),
                opt(r.imbalance.map(|v| format!("{v:.6}"))),
            ];
            if with_time {
                fields.push(format!("{:.6}", r.seconds));
            }
            fields.push(opt(r.error.as_ref().map(|e| e.replace(sep, " "))));
            writeln!(out, "{}", fields.join(&sep.to_string()))?;
        }
        Ok(())
    }

    pub fn to_delimited(&self, sep: char, with_time: bool) -> String {
        let mut buf = Vec::new();
        self.write_delimited(&mut buf, sep, with_time).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table is valid UTF-8")
    }
}

/// Runs every configuration on every graph. Failures are recorded in the
/// row's `error` column rather than aborting the sweep.
pub fn run_sweep(graphs: &[(String, Graph)], configs: &[(String, RunConfig)]) -> SweepTable {
    let mut rows = Vec::with_capacity(graphs.len() * configs.len());
    for (gname, g) in graphs {
        for (cname, cfg) in configs {
            let t = Instant::now();
            let res = partition_graph(g, cfg);
            let seconds = t.elapsed().as_secs_f64();
            let row = match res {
                Ok((_, rep)) => SweepRow {
                    graph: gname.clone(),
                    config: cname.clone(),
                    vertices: g.num_vertices(),
                    iterations: Some(rep.iterations),
                    converged: Some(rep.converged.iter().all(|&c| c)),
                    cutsize: Some(rep.cutsize),
                    imbalance: Some(rep.imbalance),
                    seconds,
                    error: None,
                },
                Err(e) => SweepRow {
                    graph: gname.clone(),
                    config: cname.clone(),
                    vertices: g.num_vertices(),
                    iterations: None,
                    converged: None,
                    cutsize: None,
                    imbalance: None,
                    seconds,
                    error: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
    }
    SweepTable { rows }
}
