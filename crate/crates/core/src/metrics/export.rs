//! CSV, JSON and Graphviz DOT output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::store::{EdgeId, GraphStore, NodeId, NodeLabel};
use crate::time::Timestamp;

use super::centrality::CentralityTable;
use super::connectivity::TripReport;
use super::paths::PathResult;

pub const STOP_COLOR: &str = "#d62728";
pub const MOVE_COLOR: &str = "#2ca02c";
pub const STREET_COLOR: &str = "#f7b6d2";
pub const BUS_STOP_COLOR: &str = "#7f7f7f";
pub const ORIGIN_COLOR: &str = "#1f77b4";
pub const DESTINATION_COLOR: &str = "#9467bd";
pub const TIME_INSTANT_COLOR: &str = "#ff7f0e";
/// Every label without its own color.
pub const OTHER_COLOR: &str = "#ffffff";

pub fn label_color(label: NodeLabel) -> &'static str {
    match label {
        NodeLabel::Stop => STOP_COLOR,
        NodeLabel::Move => MOVE_COLOR,
        NodeLabel::StreetSegment => STREET_COLOR,
        NodeLabel::BusStop => BUS_STOP_COLOR,
        NodeLabel::TripOrigin => ORIGIN_COLOR,
        NodeLabel::TripDestination => DESTINATION_COLOR,
        _ => OTHER_COLOR,
    }
}

/// `rank,id,name,score` with a header row.
pub fn write_table_csv<W: Write>(table: &CentralityTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "id", "name", "score"])?;
    for r in &table.rows {
        w.write_record([
            r.rank.to_string(),
            r.id.clone(),
            r.name.clone(),
            r.score.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn table_csv(table: &CentralityTable) -> String {
    let mut buf = Vec::new();
    write_table_csv(table, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Pretty JSON followed by a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("metric output serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut out: W) -> io::Result<()> {
    out.write_all(to_json(value).as_bytes())
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

fn node_line(dot: &mut String, store: &GraphStore, id: NodeId) {
    let Some(n) = store.node(id) else { return };
    let mut label = n.label.to_string();
    let name = n.display_name();
    if name != label {
        let _ = write!(label, "\n{name}");
    }
    if let Some(ts) = n.timestamp {
        let _ = write!(label, "\n{ts}");
    }
    let _ = writeln!(
        dot,
        "  n{} [label={}, fillcolor={}];",
        id,
        quote(&label),
        quote(label_color(n.label))
    );
}

fn edge_line(dot: &mut String, store: &GraphStore, id: EdgeId) {
    let Some(e) = store.edge(id) else { return };
    let mut label = e.label.name().to_owned();
    if let Some(ws) = e.w_s {
        let _ = write!(label, " {ws:.1}m");
    }
    if let Some(wt) = e.w_t {
        let _ = write!(label, " {wt}s");
    }
    let _ = writeln!(
        dot,
        "  n{} -> n{} [label={}];",
        e.source,
        e.target,
        quote(&label)
    );
}

fn header(name: &str) -> String {
    let mut dot = String::new();
    let _ = writeln!(dot, "digraph {} {{", quote(name));
    dot.push_str("  rankdir=LR;\n  node [shape=box, style=filled];\n");
    dot
}

/// Nodes and edges of a path, in order.
pub fn path_dot(store: &GraphStore, path: &PathResult) -> String {
    let mut dot = header("path");
    for &n in &path.nodes {
        node_line(&mut dot, store, n);
    }
    for &e in &path.edges {
        edge_line(&mut dot, store, e);
    }
    dot.push_str("}\n");
    dot
}

fn instant_line(dot: &mut String, key: &str, ts: Timestamp) {
    let _ = writeln!(
        dot,
        "  {key} [label={}, shape=ellipse, fillcolor={}];",
        quote(&ts.to_string()),
        quote(TIME_INSTANT_COLOR)
    );
}

/// The trip, its Origin and Destination, every episode with its anchors and
/// the edges among them, plus the trip's start and end instants.
pub fn trip_dot(store: &GraphStore, report: &TripReport) -> String {
    let mut nodes: BTreeSet<NodeId> = BTreeSet::new();
    nodes.insert(report.trip);
    nodes.extend(report.origin);
    nodes.extend(report.destination);
    nodes.extend(report.episodes.iter().copied());
    let mut edges: BTreeSet<EdgeId> = BTreeSet::new();
    for &n in std::iter::once(&report.trip).chain(&report.episodes) {
        for &e in store.out_edges(n) {
            let edge = store.edge(e).expect("out edge");
            let target = store.node(edge.target).expect("endpoint").label;
            if matches!(target, NodeLabel::Line | NodeLabel::Calendar) {
                continue;
            }
            nodes.insert(edge.target);
            edges.insert(e);
        }
    }

    let mut dot = header(&report.trip_id);
    for &n in &nodes {
        node_line(&mut dot, store, n);
    }
    for &e in &edges {
        edge_line(&mut dot, store, e);
    }
    instant_line(&mut dot, "t_start", report.start);
    let _ = writeln!(
        dot,
        "  n{} -> t_start [style=dashed, label=\"HAPPENS_AT\"];",
        report.trip
    );
    if let Some(end) = report.end {
        instant_line(&mut dot, "t_end", end);
        if let Some(d) = report.destination {
            let _ = writeln!(dot, "  n{d} -> t_end [style=dashed, label=\"HAPPENS_AT\"];");
        }
    }
    dot.push_str("}\n");
    dot
}
