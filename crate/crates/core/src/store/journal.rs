//! JSON-lines persistence: one object per node or edge insertion.
//!
//! ```text
//! {"op":"node","id":0,"label":"BusStop","kind":"Spatial","position":{"lon":-64.78,"lat":46.09},"timestamp":null,"properties":{"name":"Plaza Blvd (Walmart)"}}
//! {"op":"edge","id":0,"label":"NEXT","class":"SpatioTemporal","source":3,"target":4,"t_source":"2016-06-09T08:00:05Z","t_target":"2016-06-09T08:00:10Z","w_s":62.0,"w_t":5}
//! ```
//!
//! Replay re-runs every insertion through the validating API and checks that
//! ids, edge classes and derived durations come out identical.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EdgeClass, GraphStore, Insertion, StoreError, TvgEdge, TvgNode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum JournalRecord {
    Node(TvgNode),
    Edge(TvgEdge),
}

#[derive(Debug, thiserror::Error)]
pub enum JournalError {
    #[error("journal I/O: {0}")]
    Io(#[from] io::Error),
    #[error("journal line {line}: {source}")]
    Syntax {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("journal line {line}: {source}")]
    Rejected {
        line: usize,
        #[source]
        source: StoreError,
    },
    #[error("journal line {line}: recorded id {recorded} but replay assigned {assigned}")]
    IdMismatch {
        line: usize,
        recorded: u64,
        assigned: u64,
    },
    #[error("journal line {line}: recorded class {recorded} but fields derive {derived}")]
    ClassMismatch {
        line: usize,
        recorded: EdgeClass,
        derived: EdgeClass,
    },
    #[error("journal line {line}: recorded w_t {recorded:?} but timestamps give {derived:?}")]
    DurationMismatch {
        line: usize,
        recorded: Option<i64>,
        derived: Option<i64>,
    },
}

impl GraphStore {
    /// Serializes insertion `i` as a journal record.
    pub fn record(&self, i: usize) -> JournalRecord {
        match self.insertion(i) {
            Insertion::Node(id) => JournalRecord::Node(self.nodes[id.index()].clone()),
            Insertion::Edge(id) => JournalRecord::Edge(self.edges[id.index()].clone()),
        }
    }

    /// Writes the full journal.
    pub fn write_journal<W: Write>(&self, out: W) -> io::Result<()> {
        self.write_journal_from(out, 0)
    }

    /// Writes insertions `from..` so a journal can be extended in place.
    pub fn write_journal_from<W: Write>(&self, mut out: W, from: usize) -> io::Result<()> {
        for i in from..self.insertions() {
            serde_json::to_writer(&mut out, &self.record(i))?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    /// Rebuilds a store from a journal stream.
    pub fn replay<R: BufRead>(input: R) -> Result<GraphStore, JournalError> {
        let mut store = GraphStore::new();
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: JournalRecord =
                serde_json::from_str(&line).map_err(|source| JournalError::Syntax {
                    line: line_no,
                    source,
                })?;
            store.apply(record, line_no)?;
        }
        Ok(store)
    }

    /// Applies a single record, as replay does.
    pub fn apply(&mut self, record: JournalRecord, line: usize) -> Result<(), JournalError> {
        let rejected = |source| JournalError::Rejected { line, source };
        match record {
            JournalRecord::Node(n) => {
                let id = self
                    .add_node(n.label, n.kind, n.position, n.timestamp, n.properties)
                    .map_err(rejected)?;
                check_id(line, n.id.0, id.0)?;
            }
            JournalRecord::Edge(e) => {
                let derived = e.derived_class();
                let id = self
                    .add_edge(e.label, e.source, e.target, e.fields())
                    .map_err(rejected)?;
                check_id(line, e.id.0, id.0)?;
                let stored = &self.edges[id.index()];
                if let Some(derived) = derived {
                    if derived != e.class {
                        return Err(JournalError::ClassMismatch {
                            line,
                            recorded: e.class,
                            derived,
                        });
                    }
                }
                if stored.w_t != e.w_t {
                    return Err(JournalError::DurationMismatch {
                        line,
                        recorded: e.w_t,
                        derived: stored.w_t,
                    });
                }
            }
        }
        Ok(())
    }
}

fn check_id(line: usize, recorded: u64, assigned: u64) -> Result<(), JournalError> {
    if recorded == assigned {
        Ok(())
    } else {
        Err(JournalError::IdMismatch {
            line,
            recorded,
            assigned,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;
    use crate::store::{EdgeFields, EdgeLabel, NodeId, NodeKind, NodeLabel, Properties, Scalar};
    use crate::time::Timestamp;

    fn ts(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    fn sample() -> GraphStore {
        let mut store = GraphStore::new();
        let mut props = Properties::new();
        props.insert("name".into(), Scalar::from("Plaza Blvd (Walmart)"));
        props.insert("rank".into(), Scalar::Int(3));
        props.insert("ratio".into(), Scalar::Float(1.0));
        store
            .add_node(
                NodeLabel::BusStop,
                NodeKind::Spatial,
                Some(GeoPoint::new(-64.78, 46.09)),
                None,
                props,
            )
            .unwrap();
        let a = store
            .add_node(
                NodeLabel::Move,
                NodeKind::SpatioTemporal,
                Some(GeoPoint::new(-64.781, 46.0901)),
                Some(ts("2016-06-09T08:00:05Z")),
                Properties::new(),
            )
            .unwrap();
        let b = store
            .add_node(
                NodeLabel::Stop,
                NodeKind::SpatioTemporal,
                Some(GeoPoint::new(-64.7811, 46.0902)),
                Some(ts("2016-06-09T08:00:10Z")),
                Properties::new(),
            )
            .unwrap();
        store
            .add_edge(
                EdgeLabel::Next,
                a,
                b,
                EdgeFields::spatio_temporal(
                    ts("2016-06-09T08:00:05Z"),
                    ts("2016-06-09T08:00:10Z"),
                    0.1 + 0.2,
                ),
            )
            .unwrap();
        store
            .add_edge(EdgeLabel::StoppedAt, b, NodeId(0), EdgeFields::spatial(4.2))
            .unwrap();
        store
    }

    #[test]
    fn replay_reproduces_store() {
        let store = sample();
        let mut buf = Vec::new();
        store.write_journal(&mut buf).unwrap();
        let replayed = GraphStore::replay(buf.as_slice()).unwrap();
        assert_eq!(replayed.nodes(), store.nodes());
        assert_eq!(replayed.edges(), store.edges());
        let mut again = Vec::new();
        replayed.write_journal(&mut again).unwrap();
        assert_eq!(buf, again);
        assert_eq!(replayed.edges()[0].w_s, Some(0.1 + 0.2));
    }

    #[test]
    fn tampered_class_is_detected() {
        let store = sample();
        let mut buf = Vec::new();
        store.write_journal(&mut buf).unwrap();
        let text = String::from_utf8(buf)
            .unwrap()
            .replace("\"class\":\"SpatioTemporal\"", "\"class\":\"Temporal\"");
        let err = GraphStore::replay(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, JournalError::ClassMismatch { line: 4, .. }),
            "{err}"
        );
    }

    #[test]
    fn bad_lines_report_line_numbers() {
        let err = GraphStore::replay("\n{not json}\n".as_bytes()).unwrap_err();
        assert!(matches!(err, JournalError::Syntax { line: 2, .. }));
        let edge = r#"{"op":"edge","id":0,"label":"NEXT","class":"Spatial","source":0,"target":1,"t_source":null,"t_target":null,"w_s":1.0,"w_t":null}"#;
        let err = GraphStore::replay(edge.as_bytes()).unwrap_err();
        assert!(matches!(err, JournalError::Rejected { line: 1, .. }));
    }

    #[test]
    fn appended_segments_concatenate() {
        let store = sample();
        let mut head = Vec::new();
        let mut all = Vec::new();
        store.write_journal(&mut all).unwrap();
        store.write_journal_from(&mut head, 0).unwrap();
        assert_eq!(head, all);
        let mut tail = Vec::new();
        store
            .write_journal_from(&mut tail, store.insertions())
            .unwrap();
        assert!(tail.is_empty());
    }
}
