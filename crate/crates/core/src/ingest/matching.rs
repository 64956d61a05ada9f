//! Nearest-feature anchoring of episodes.

use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;

use super::network::{FeatureClass, NetworkContext};
use super::segment::{Episode, EpisodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchRadii {
    pub bus_stop: f64,
    pub street: f64,
}

impl Default for MatchRadii {
    fn default() -> Self {
        MatchRadii {
            bus_stop: 20.0,
            street: 30.0,
        }
    }
}

impl MatchRadii {
    pub fn max(&self) -> f64 {
        self.bus_stop.max(self.street)
    }
}

/// Index into the matching [`NetworkContext`] table and the distance to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub index: usize,
    pub distance: f64,
}

impl From<(usize, f64)> for Hit {
    fn from((index, distance): (usize, f64)) -> Self {
        Hit { index, distance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Anchor {
    BusStop(Hit),
    StreetSegment(Hit),
    StreetIntersection(Hit),
    Unmatched,
}

impl Anchor {
    pub fn hit(&self) -> Option<Hit> {
        match self {
            Anchor::BusStop(h) | Anchor::StreetSegment(h) | Anchor::StreetIntersection(h) => {
                Some(*h)
            }
            Anchor::Unmatched => None,
        }
    }
}

/// Stops try bus stop, then intersection, then street segment; Moves only
/// look for a street segment.
pub fn match_episode(e: &Episode, ctx: &NetworkContext, radii: &MatchRadii) -> Anchor {
    match e.kind {
        EpisodeKind::Stop => match_stop(e.position, ctx, radii),
        EpisodeKind::Move => match_move(e.position, ctx, radii),
    }
}

pub fn match_stop(p: GeoPoint, ctx: &NetworkContext, radii: &MatchRadii) -> Anchor {
    if let Some(h) = ctx.nearest(FeatureClass::BusStop, p, radii.bus_stop) {
        return Anchor::BusStop(h.into());
    }
    if let Some(h) = ctx.nearest(FeatureClass::Intersection, p, radii.street) {
        return Anchor::StreetIntersection(h.into());
    }
    match_move(p, ctx, radii)
}

pub fn match_move(p: GeoPoint, ctx: &NetworkContext, radii: &MatchRadii) -> Anchor {
    ctx.nearest(FeatureClass::Street, p, radii.street)
        .map_or(Anchor::Unmatched, |h| Anchor::StreetSegment(h.into()))
}

/// Bus stop a moving vehicle passes within `radii.bus_stop`.
pub fn passing_bus_stop(e: &Episode, ctx: &NetworkContext, radii: &MatchRadii) -> Option<Hit> {
    if e.kind != EpisodeKind::Move {
        return None;
    }
    ctx.nearest(FeatureClass::BusStop, e.position, radii.bus_stop)
        .map(Hit::from)
}
