//! Label vocabulary and the validation matrix of the transit graph model.
//!
//! Node and edge rules are plain tables; changing the logical model means
//! editing a row here, not the store.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Spatial,
    Temporal,
    SpatioTemporal,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl NodeKind {
    pub fn has_position(self) -> bool {
        matches!(self, NodeKind::Spatial | NodeKind::SpatioTemporal)
    }

    pub fn has_timestamp(self) -> bool {
        matches!(self, NodeKind::Temporal | NodeKind::SpatioTemporal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeLabel {
    Line,
    Calendar,
    Trip,
    TripOrigin,
    TripDestination,
    Move,
    Stop,
    BusStop,
    StreetSegment,
    StreetIntersection,
}

impl NodeLabel {
    pub const ALL: [NodeLabel; 10] = [
        NodeLabel::Line,
        NodeLabel::Calendar,
        NodeLabel::Trip,
        NodeLabel::TripOrigin,
        NodeLabel::TripDestination,
        NodeLabel::Move,
        NodeLabel::Stop,
        NodeLabel::BusStop,
        NodeLabel::StreetSegment,
        NodeLabel::StreetIntersection,
    ];

    /// The kind every node with this label must have.
    pub fn kind(self) -> NodeKind {
        NODE_RULES
            .iter()
            .find(|(label, _)| *label == self)
            .map(|(_, kind)| *kind)
            .expect("every label has a node rule")
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for NodeLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeLabel::ALL
            .iter()
            .copied()
            .find(|l| l.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown node label {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeLabel {
    Has,
    ScheduledAt,
    StartsAt,
    EndsAt,
    Next,
    HappensAt,
    Contains,
    LocatedOn,
    StoppedAt,
    DidNotStopAt,
    ArrivesAt,
    DepartsAt,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 12] = [
        EdgeLabel::Has,
        EdgeLabel::ScheduledAt,
        EdgeLabel::StartsAt,
        EdgeLabel::EndsAt,
        EdgeLabel::Next,
        EdgeLabel::HappensAt,
        EdgeLabel::Contains,
        EdgeLabel::LocatedOn,
        EdgeLabel::StoppedAt,
        EdgeLabel::DidNotStopAt,
        EdgeLabel::ArrivesAt,
        EdgeLabel::DepartsAt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeLabel::Has => "HAS",
            EdgeLabel::ScheduledAt => "SCHEDULED_AT",
            EdgeLabel::StartsAt => "STARTS_AT",
            EdgeLabel::EndsAt => "ENDS_AT",
            EdgeLabel::Next => "NEXT",
            EdgeLabel::HappensAt => "HAPPENS_AT",
            EdgeLabel::Contains => "CONTAINS",
            EdgeLabel::LocatedOn => "LOCATED_ON",
            EdgeLabel::StoppedAt => "STOPPED_AT",
            EdgeLabel::DidNotStopAt => "DID_NOT_STOP_AT",
            EdgeLabel::ArrivesAt => "ARRIVES_AT",
            EdgeLabel::DepartsAt => "DEPARTS_AT",
        }
    }

    pub fn rule(self) -> &'static EdgeRule {
        EDGE_RULES
            .iter()
            .find(|r| r.label == self)
            .expect("every edge label has a rule")
    }

    /// Labels the user may insert (everything except the time-tree structure).
    pub fn insertable() -> impl Iterator<Item = EdgeLabel> {
        EdgeLabel::ALL
            .into_iter()
            .filter(|l| l.rule().class.is_some())
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdgeLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeLabel::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown edge label {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    /// `(u, v, w_s)`
    Spatial,
    /// `(u, t_a, v, t_b, w_t)`
    Temporal,
    /// `(u, t_a, v, t_b, w_s, w_t)`
    SpatioTemporal,
}

impl EdgeClass {
    /// Classifies a field set; `None` when it matches no class.
    pub fn derive(has_t_source: bool, has_t_target: bool, has_w_s: bool) -> Option<EdgeClass> {
        match (has_t_source, has_t_target, has_w_s) {
            (false, false, true) => Some(EdgeClass::Spatial),
            (true, true, false) => Some(EdgeClass::Temporal),
            (true, true, true) => Some(EdgeClass::SpatioTemporal),
            _ => None,
        }
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which class an edge label carries and which node labels it may join.
#[derive(Debug)]
pub struct EdgeRule {
    pub label: EdgeLabel,
    /// `None` marks structural labels owned by the store and time-tree.
    pub class: Option<EdgeClass>,
    pub sources: &'static [NodeLabel],
    pub targets: &'static [NodeLabel],
}

impl EdgeRule {
    pub fn allows(&self, source: NodeLabel, target: NodeLabel) -> bool {
        self.sources.contains(&source) && self.targets.contains(&target)
    }
}

use NodeLabel as N;

pub const NODE_RULES: &[(NodeLabel, NodeKind)] = &[
    (N::Line, NodeKind::Spatial),
    (N::Calendar, NodeKind::Temporal),
    (N::Trip, NodeKind::Temporal),
    (N::TripOrigin, NodeKind::SpatioTemporal),
    (N::TripDestination, NodeKind::SpatioTemporal),
    (N::Move, NodeKind::SpatioTemporal),
    (N::Stop, NodeKind::SpatioTemporal),
    (N::BusStop, NodeKind::Spatial),
    (N::StreetSegment, NodeKind::Spatial),
    (N::StreetIntersection, NodeKind::Spatial),
];

const EPISODES: &[NodeLabel] = &[N::Move, N::Stop];
const STREETS: &[NodeLabel] = &[N::StreetSegment, N::StreetIntersection];

pub const EDGE_RULES: &[EdgeRule] = &[
    EdgeRule {
        label: EdgeLabel::Has,
        class: Some(EdgeClass::Spatial),
        sources: &[N::Line],
        targets: &[N::Trip],
    },
    EdgeRule {
        label: EdgeLabel::ScheduledAt,
        class: Some(EdgeClass::Temporal),
        sources: &[N::Trip],
        targets: &[N::Calendar],
    },
    EdgeRule {
        label: EdgeLabel::StartsAt,
        class: Some(EdgeClass::Temporal),
        sources: &[N::Trip],
        targets: &[N::TripOrigin],
    },
    EdgeRule {
        label: EdgeLabel::EndsAt,
        class: Some(EdgeClass::Temporal),
        sources: &[N::Trip],
        targets: &[N::TripDestination],
    },
    EdgeRule {
        label: EdgeLabel::Next,
        class: Some(EdgeClass::SpatioTemporal),
        sources: EPISODES,
        targets: EPISODES,
    },
    EdgeRule {
        label: EdgeLabel::HappensAt,
        class: None,
        sources: &[],
        targets: &[],
    },
    EdgeRule {
        label: EdgeLabel::Contains,
        class: None,
        sources: &[],
        targets: &[],
    },
    EdgeRule {
        label: EdgeLabel::LocatedOn,
        class: Some(EdgeClass::Spatial),
        sources: &[N::Move, N::Stop, N::StreetIntersection],
        targets: STREETS,
    },
    EdgeRule {
        label: EdgeLabel::StoppedAt,
        class: Some(EdgeClass::Spatial),
        sources: &[N::Stop],
        targets: &[N::BusStop],
    },
    EdgeRule {
        label: EdgeLabel::DidNotStopAt,
        class: Some(EdgeClass::Spatial),
        sources: &[N::Move],
        targets: &[N::BusStop],
    },
    EdgeRule {
        label: EdgeLabel::ArrivesAt,
        class: Some(EdgeClass::Temporal),
        sources: &[N::Trip],
        targets: &[N::BusStop],
    },
    EdgeRule {
        label: EdgeLabel::DepartsAt,
        class: Some(EdgeClass::Temporal),
        sources: &[N::Trip],
        targets: &[N::BusStop],
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_label_has_exactly_one_rule() {
        for label in NodeLabel::ALL {
            assert_eq!(NODE_RULES.iter().filter(|(l, _)| *l == label).count(), 1);
        }
        for label in EdgeLabel::ALL {
            assert_eq!(EDGE_RULES.iter().filter(|r| r.label == label).count(), 1);
        }
    }

    #[test]
    fn structural_labels_are_reserved() {
        assert!(EdgeLabel::HappensAt.rule().class.is_none());
        assert!(EdgeLabel::Contains.rule().class.is_none());
        assert_eq!(EdgeLabel::insertable().count(), 10);
    }

    #[test]
    fn class_derivation() {
        assert_eq!(
            EdgeClass::derive(false, false, true),
            Some(EdgeClass::Spatial)
        );
        assert_eq!(
            EdgeClass::derive(true, true, false),
            Some(EdgeClass::Temporal)
        );
        assert_eq!(
            EdgeClass::derive(true, true, true),
            Some(EdgeClass::SpatioTemporal)
        );
        assert_eq!(EdgeClass::derive(true, false, true), None);
        assert_eq!(EdgeClass::derive(false, false, false), None);
    }

    #[test]
    fn labels_parse_from_display() {
        for l in EdgeLabel::ALL {
            assert_eq!(l.to_string().parse::<EdgeLabel>().unwrap(), l);
        }
        for l in NodeLabel::ALL {
            assert_eq!(l.to_string().parse::<NodeLabel>().unwrap(), l);
        }
    }
}
