//! WGS84 points, great-circle distance and a local planar projection.

use serde::{Deserialize, Serialize};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Self {
        GeoPoint { lon, lat }
    }

    pub fn is_valid(&self) -> bool {
        self.lon.is_finite()
            && self.lat.is_finite()
            && self.lat.abs() <= 90.0
            && self.lon.abs() <= 180.0
    }

    /// Arithmetic mean of `points`; `None` for an empty slice.
    pub fn centroid(points: &[GeoPoint]) -> Option<GeoPoint> {
        if points.is_empty() {
            return None;
        }
        let n = points.len() as f64;
        let (lon, lat) = points
            .iter()
            .fold((0.0, 0.0), |(x, y), p| (x + p.lon, y + p.lat));
        Some(GeoPoint::new(lon / n, lat / n))
    }
}

/// Great-circle distance in meters.
pub fn haversine(p: GeoPoint, q: GeoPoint) -> f64 {
    let (phi1, phi2) = (p.lat.to_radians(), q.lat.to_radians());
    let dphi = (q.lat - p.lat).to_radians();
    let dlambda = (q.lon - p.lon).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

/// Equirectangular projection centred on `origin`, in meters.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    origin: GeoPoint,
    meters_per_deg_lon: f64,
    meters_per_deg_lat: f64,
}

impl LocalFrame {
    pub fn new(origin: GeoPoint) -> Self {
        let meters_per_deg_lat = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        LocalFrame {
            origin,
            meters_per_deg_lon: meters_per_deg_lat * origin.lat.to_radians().cos(),
            meters_per_deg_lat,
        }
    }

    pub fn origin(&self) -> GeoPoint {
        self.origin
    }

    pub fn project(&self, p: GeoPoint) -> (f64, f64) {
        (
            (p.lon - self.origin.lon) * self.meters_per_deg_lon,
            (p.lat - self.origin.lat) * self.meters_per_deg_lat,
        )
    }

    pub fn unproject(&self, x: f64, y: f64) -> GeoPoint {
        GeoPoint::new(
            self.origin.lon + x / self.meters_per_deg_lon,
            self.origin.lat + y / self.meters_per_deg_lat,
        )
    }
}

/// Distance from `p` to the polyline through `vertices`, measured in a frame
/// centred on `p`. A single vertex degenerates to point distance.
pub fn point_to_polyline(p: GeoPoint, vertices: &[GeoPoint]) -> f64 {
    let frame = LocalFrame::new(p);
    let pts: Vec<(f64, f64)> = vertices.iter().map(|v| frame.project(*v)).collect();
    match pts.as_slice() {
        [] => f64::INFINITY,
        [(x, y)] => x.hypot(*y),
        _ => pts
            .windows(2)
            .map(|w| point_to_segment((0.0, 0.0), w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

fn point_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    (p.0 - cx).hypot(p.1 - cy)
}
