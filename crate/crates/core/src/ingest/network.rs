//! Static network context: bus stops, streets, intersections, routes and
//! service calendar, plus a uniform grid for nearest-feature lookups.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::Weekday;
use serde::{Deserialize, Serialize};

use crate::geo::{point_to_polyline, GeoPoint, LocalFrame};

use super::wkt::parse_linestring;
use super::{column_indices, IngestError, LineIssue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusStop {
    pub id: String,
    pub name: String,
    pub position: GeoPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Street {
    pub id: String,
    pub name: String,
    pub polyline: Vec<GeoPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub id: String,
    pub position: GeoPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalendarEntry {
    pub service_id: String,
    pub days: BTreeSet<u8>,
}

impl CalendarEntry {
    pub fn runs_on(&self, day: Weekday) -> bool {
        self.days.contains(&(day.num_days_from_monday() as u8))
    }
}

/// An intersection lying on a street polyline closer than this is incident to it.
pub const INCIDENCE_TOLERANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Default)]
pub struct NetworkContext {
    pub bus_stops: Vec<BusStop>,
    pub streets: Vec<Street>,
    pub intersections: Vec<Intersection>,
    pub routes: Vec<Route>,
    pub calendar: Vec<CalendarEntry>,
    /// `(intersection index, street index)` pairs, sorted.
    pub incidence: Vec<(usize, usize)>,
    pub rejected: Vec<LineIssue>,
    index: Option<GridIndex>,
}

impl NetworkContext {
    /// Builds a context from in-memory tables, checking id uniqueness.
    pub fn new(
        bus_stops: Vec<BusStop>,
        streets: Vec<Street>,
        intersections: Vec<Intersection>,
        routes: Vec<Route>,
        calendar: Vec<CalendarEntry>,
    ) -> Result<Self, IngestError> {
        check_unique("bus_stops", bus_stops.iter().map(|s| s.id.as_str()))?;
        check_unique("streets", streets.iter().map(|s| s.id.as_str()))?;
        check_unique("intersections", intersections.iter().map(|s| s.id.as_str()))?;
        check_unique("routes", routes.iter().map(|s| s.id.as_str()))?;
        check_unique("calendar", calendar.iter().map(|s| s.service_id.as_str()))?;
        let mut ctx = NetworkContext {
            bus_stops,
            streets,
            intersections,
            routes,
            calendar,
            ..Default::default()
        };
        ctx.incidence = ctx.compute_incidence();
        Ok(ctx)
    }

    pub fn is_empty(&self) -> bool {
        self.bus_stops.is_empty() && self.streets.is_empty() && self.intersections.is_empty()
    }

    /// Prepares the grid so lookups with radius up to `max_radius` are exact.
    pub fn build_index(&mut self, max_radius: f64) {
        self.index = GridIndex::build(self, max_radius);
    }

    pub fn index_cell_size(&self) -> Option<f64> {
        self.index.as_ref().map(|g| g.cell)
    }

    pub fn route(&self, id: &str) -> Option<&Route> {
        self.routes.iter().find(|r| r.id == id)
    }

    /// Smallest service id running on `day`.
    pub fn service_for(&self, day: Weekday) -> Option<&CalendarEntry> {
        self.calendar
            .iter()
            .filter(|c| c.runs_on(day))
            .min_by(|a, b| a.service_id.cmp(&b.service_id))
    }

    /// Mean of the bus stop positions, else of every other vertex. Places
    /// nodes that have no geometry of their own.
    pub fn centroid(&self) -> Option<GeoPoint> {
        let mut pts: Vec<GeoPoint> = self.bus_stops.iter().map(|s| s.position).collect();
        if pts.is_empty() {
            pts.extend(self.intersections.iter().map(|i| i.position));
            pts.extend(self.streets.iter().flat_map(|s| s.polyline.iter().copied()));
        }
        GeoPoint::centroid(&pts)
    }

    pub fn streets_at_intersection(&self, intersection: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.incidence.partition_point(|&(i, _)| i < intersection);
        self.incidence[start..]
            .iter()
            .take_while(move |&&(i, _)| i == intersection)
            .map(|&(_, s)| s)
    }

    /// Nearest feature of `class` within `radius` meters; ties go to the
    /// smaller id.
    pub fn nearest(&self, class: FeatureClass, p: GeoPoint, radius: f64) -> Option<(usize, f64)> {
        let candidates: Vec<usize> = match &self.index {
            Some(grid) if radius <= grid.cell => grid.candidates(class, p, radius),
            _ => None,
        }
        .unwrap_or_else(|| (0..self.len(class)).collect());
        let mut best: Option<(usize, f64)> = None;
        for i in candidates {
            let d = self.distance(class, i, p);
            if d > radius {
                continue;
            }
            let better = match best {
                None => true,
                Some((j, bd)) => d < bd || (d == bd && self.id(class, i) < self.id(class, j)),
            };
            if better {
                best = Some((i, d));
            }
        }
        best
    }

    /// [`Self::nearest`] without the grid.
    pub fn nearest_brute_force(
        &self,
        class: FeatureClass,
        p: GeoPoint,
        radius: f64,
    ) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.len(class) {
            let d = self.distance(class, i, p);
            if d <= radius
                && best.is_none_or(|(j, bd)| {
                    d < bd || (d == bd && self.id(class, i) < self.id(class, j))
                })
            {
                best = Some((i, d));
            }
        }
        best
    }

    pub fn len(&self, class: FeatureClass) -> usize {
        match class {
            FeatureClass::BusStop => self.bus_stops.len(),
            FeatureClass::Street => self.streets.len(),
            FeatureClass::Intersection => self.intersections.len(),
        }
    }

    pub fn id(&self, class: FeatureClass, i: usize) -> &str {
        match class {
            FeatureClass::BusStop => &self.bus_stops[i].id,
            FeatureClass::Street => &self.streets[i].id,
            FeatureClass::Intersection => &self.intersections[i].id,
        }
    }

    fn distance(&self, class: FeatureClass, i: usize, p: GeoPoint) -> f64 {
        match class {
            FeatureClass::BusStop => crate::geo::haversine(p, self.bus_stops[i].position),
            FeatureClass::Street => point_to_polyline(p, &self.streets[i].polyline),
            FeatureClass::Intersection => crate::geo::haversine(p, self.intersections[i].position),
        }
    }

    fn compute_incidence(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, x) in self.intersections.iter().enumerate() {
            for (s, street) in self.streets.iter().enumerate() {
                if point_to_polyline(x.position, &street.polyline) <= INCIDENCE_TOLERANCE_M {
                    out.push((i, s));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureClass {
    BusStop,
    Street,
    Intersection,
}

/// Networks wider than this are searched by brute force; the planar frame
/// stops being trustworthy for cell bounds.
const MAX_INDEXED_EXTENT_M: f64 = 100_000.0;
/// Slack on the search box for projection error.
const SEARCH_SLACK: f64 = 1.1;

#[derive(Debug, Clone)]
struct GridIndex {
    frame: LocalFrame,
    cell: f64,
    cells: HashMap<(FeatureClass, i64, i64), Vec<usize>>,
}

impl GridIndex {
    fn build(ctx: &NetworkContext, max_radius: f64) -> Option<GridIndex> {
        let origin = ctx.centroid()?;
        if !(max_radius.is_finite() && max_radius > 0.0) {
            return None;
        }
        let frame = LocalFrame::new(origin);
        let mut grid = GridIndex {
            frame,
            cell: max_radius,
            cells: HashMap::new(),
        };
        let too_far = |p: GeoPoint| {
            let (x, y) = frame.project(p);
            x.abs().max(y.abs()) > MAX_INDEXED_EXTENT_M
        };
        for (i, s) in ctx.bus_stops.iter().enumerate() {
            if too_far(s.position) {
                return None;
            }
            grid.insert_box(FeatureClass::BusStop, i, &[s.position]);
        }
        for (i, s) in ctx.intersections.iter().enumerate() {
            if too_far(s.position) {
                return None;
            }
            grid.insert_box(FeatureClass::Intersection, i, &[s.position]);
        }
        for (i, s) in ctx.streets.iter().enumerate() {
            if s.polyline.iter().any(|p| too_far(*p)) {
                return None;
            }
            for w in s.polyline.windows(2) {
                grid.insert_box(FeatureClass::Street, i, w);
            }
        }
        for v in grid.cells.values_mut() {
            v.dedup();
        }
        Some(grid)
    }

    fn cell_of(&self, x: f64) -> i64 {
        (x / self.cell).floor() as i64
    }

    fn insert_box(&mut self, class: FeatureClass, i: usize, pts: &[GeoPoint]) {
        let xy: Vec<(f64, f64)> = pts.iter().map(|p| self.frame.project(*p)).collect();
        let (x0, x1) = min_max(xy.iter().map(|p| p.0));
        let (y0, y1) = min_max(xy.iter().map(|p| p.1));
        // A segment crossing many cells is inserted into its whole bounding box.
        for cx in self.cell_of(x0)..=self.cell_of(x1) {
            for cy in self.cell_of(y0)..=self.cell_of(y1) {
                let bucket = self.cells.entry((class, cx, cy)).or_default();
                if bucket.last() != Some(&i) {
                    bucket.push(i);
                }
            }
        }
    }

    /// `None` when `p` lies outside the indexed extent.
    fn candidates(&self, class: FeatureClass, p: GeoPoint, radius: f64) -> Option<Vec<usize>> {
        let (x, y) = self.frame.project(p);
        if x.abs().max(y.abs()) > MAX_INDEXED_EXTENT_M {
            return None;
        }
        let r = radius * SEARCH_SLACK;
        let mut out = Vec::new();
        for cx in self.cell_of(x - r)..=self.cell_of(x + r) {
            for cy in self.cell_of(y - r)..=self.cell_of(y + r) {
                if let Some(bucket) = self.cells.get(&(class, cx, cy)) {
                    out.extend_from_slice(bucket);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Some(out)
    }
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn check_unique<'a>(
    table: &'static str,
    ids: impl Iterator<Item = &'a str>,
) -> Result<(), IngestError> {
    let mut seen = HashSet::new();
    for (i, id) in ids.enumerate() {
        if !seen.insert(id) {
            return Err(IngestError::DuplicateId {
                table,
                id: id.to_owned(),
                line: i as u64 + 2,
            });
        }
    }
    Ok(())
}

/// A parsed table: rows of required columns with their line numbers.
struct Table {
    rows: Vec<(u64, Vec<String>)>,
    rejected: Vec<LineIssue>,
}

fn read_table<R: Read>(
    table: &'static str,
    input: R,
    columns: &[&str],
) -> Result<Table, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(|e| IngestError::Header {
        table,
        reason: e.to_string(),
    })?;
    let idx = column_indices(table, header, columns)?;
    let mut out = Table {
        rows: Vec::new(),
        rejected: Vec::new(),
    };
    for row in reader.records() {
        match row {
            Ok(rec) => {
                let line = rec.position().map(|p| p.line()).unwrap_or(0);
                let fields: Option<Vec<String>> =
                    idx.iter().map(|&i| rec.get(i).map(str::to_owned)).collect();
                match fields {
                    Some(f) => out.rows.push((line, f)),
                    None => out
                        .rejected
                        .push(LineIssue::new(table, line, "missing fields")),
                }
            }
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.rejected
                    .push(LineIssue::new(table, line, e.to_string()));
            }
        }
    }
    Ok(out)
}

fn unique_id(
    table: &'static str,
    seen: &mut HashSet<String>,
    id: &str,
    line: u64,
) -> Result<(), IngestError> {
    if seen.insert(id.to_owned()) {
        Ok(())
    } else {
        Err(IngestError::DuplicateId {
            table,
            id: id.to_owned(),
            line,
        })
    }
}

fn parse_point(lat: &str, lon: &str) -> Result<GeoPoint, String> {
    let lat: f64 = lat.parse().map_err(|_| format!("bad lat {lat:?}"))?;
    let lon: f64 = lon.parse().map_err(|_| format!("bad lon {lon:?}"))?;
    let p = GeoPoint::new(lon, lat);
    if p.is_valid() {
        Ok(p)
    } else {
        Err(format!("coordinate lat={lat} lon={lon} out of range"))
    }
}

pub fn parse_weekday_list(days: &str) -> Result<BTreeSet<u8>, String> {
    days.split('|')
        .map(str::trim)
        .filter(|d| !d.is_empty())
        .map(|d| {
            d.parse::<Weekday>()
                .map(|w| w.num_days_from_monday() as u8)
                .map_err(|_| format!("unknown weekday {d:?}"))
        })
        .collect()
}

pub fn read_bus_stops<R: Read>(input: R) -> Result<(Vec<BusStop>, Vec<LineIssue>), IngestError> {
    const T: &str = "bus_stops";
    let table = read_table(T, input, &["stop_id", "name", "lat", "lon"])?;
    let mut rejected = table.rejected;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, f) in table.rows {
        if f[0].is_empty() {
            rejected.push(LineIssue::new(T, line, "empty stop_id"));
            continue;
        }
        match parse_point(&f[2], &f[3]) {
            Ok(position) => {
                unique_id(T, &mut seen, &f[0], line)?;
                out.push(BusStop {
                    id: f[0].clone(),
                    name: f[1].clone(),
                    position,
                });
            }
            Err(e) => rejected.push(LineIssue::new(T, line, e)),
        }
    }
    Ok((out, rejected))
}

pub fn read_streets<R: Read>(input: R) -> Result<(Vec<Street>, Vec<LineIssue>), IngestError> {
    const T: &str = "streets";
    let table = read_table(T, input, &["street_id", "name", "wkt"])?;
    let mut rejected = table.rejected;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, f) in table.rows {
        if f[0].is_empty() {
            rejected.push(LineIssue::new(T, line, "empty street_id"));
            continue;
        }
        match parse_linestring(&f[2]) {
            Ok(polyline) => {
                unique_id(T, &mut seen, &f[0], line)?;
                out.push(Street {
                    id: f[0].clone(),
                    name: f[1].clone(),
                    polyline,
                });
            }
            Err(e) => rejected.push(LineIssue::new(T, line, e.to_string())),
        }
    }
    Ok((out, rejected))
}

pub fn read_intersections<R: Read>(
    input: R,
) -> Result<(Vec<Intersection>, Vec<LineIssue>), IngestError> {
    const T: &str = "intersections";
    let table = read_table(T, input, &["node_id", "lat", "lon"])?;
    let mut rejected = table.rejected;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, f) in table.rows {
        if f[0].is_empty() {
            rejected.push(LineIssue::new(T, line, "empty node_id"));
            continue;
        }
        match parse_point(&f[1], &f[2]) {
            Ok(position) => {
                unique_id(T, &mut seen, &f[0], line)?;
                out.push(Intersection {
                    id: f[0].clone(),
                    position,
                });
            }
            Err(e) => rejected.push(LineIssue::new(T, line, e)),
        }
    }
    Ok((out, rejected))
}

pub fn read_routes<R: Read>(input: R) -> Result<(Vec<Route>, Vec<LineIssue>), IngestError> {
    const T: &str = "routes";
    let table = read_table(T, input, &["route_id", "name"])?;
    let mut rejected = table.rejected;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, f) in table.rows {
        if f[0].is_empty() {
            rejected.push(LineIssue::new(T, line, "empty route_id"));
            continue;
        }
        unique_id(T, &mut seen, &f[0], line)?;
        out.push(Route {
            id: f[0].clone(),
            name: f[1].clone(),
        });
    }
    Ok((out, rejected))
}

pub fn read_calendar<R: Read>(
    input: R,
) -> Result<(Vec<CalendarEntry>, Vec<LineIssue>), IngestError> {
    const T: &str = "calendar";
    let table = read_table(T, input, &["service_id", "days"])?;
    let mut rejected = table.rejected;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, f) in table.rows {
        if f[0].is_empty() {
            rejected.push(LineIssue::new(T, line, "empty service_id"));
            continue;
        }
        match parse_weekday_list(&f[1]) {
            Ok(days) => {
                unique_id(T, &mut seen, &f[0], line)?;
                out.push(CalendarEntry {
                    service_id: f[0].clone(),
                    days,
                });
            }
            Err(e) => rejected.push(LineIssue::new(T, line, e)),
        }
    }
    Ok((out, rejected))
}

pub const NETWORK_FILES: [&str; 5] = [
    "bus_stops.csv",
    "streets.csv",
    "intersections.csv",
    "routes.csv",
    "calendar.csv",
];

fn open_optional(dir: &Path, name: &str) -> Result<Option<File>, IngestError> {
    let path = dir.join(name);
    match File::open(&path) {
        Ok(f) => Ok(Some(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(IngestError::Io {
            path: path.display().to_string(),
            source,
        }),
    }
}

/// Loads the five network tables from `dir`. Absent files count as empty
/// tables; the grid is built for lookups up to `max_radius` meters.
pub fn load_network(dir: &Path, max_radius: f64) -> Result<NetworkContext, IngestError> {
    if !dir.is_dir() {
        return Err(IngestError::Io {
            path: dir.display().to_string(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "network directory not found",
            ),
        });
    }
    let mut rejected = Vec::new();
    macro_rules! table {
        ($name:expr, $reader:path) => {
            match open_optional(dir, $name)? {
                Some(f) => {
                    let (rows, bad) = $reader(std::io::BufReader::new(f))?;
                    rejected.extend(bad);
                    rows
                }
                None => Vec::new(),
            }
        };
    }
    let bus_stops = table!("bus_stops.csv", read_bus_stops);
    let streets = table!("streets.csv", read_streets);
    let intersections = table!("intersections.csv", read_intersections);
    let routes = table!("routes.csv", read_routes);
    let calendar = table!("calendar.csv", read_calendar);
    let mut ctx = NetworkContext::new(bus_stops, streets, intersections, routes, calendar)?;
    ctx.rejected = rejected;
    ctx.build_index(max_radius);
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_stop_is_fatal_and_named() {
        let csv = "stop_id,name,lat,lon\nS1,a,46,-64\nS1,b,46.1,-64\n";
        let err = read_bus_stops(csv.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("\"S1\""), "{err}");
        assert!(matches!(err, IngestError::DuplicateId { line: 3, .. }));
    }

    #[test]
    fn bad_wkt_line_is_reported() {
        let csv =
            "street_id,name,wkt\nA,Main,\"LINESTRING(-64 46, -64.01 46)\"\nB,Broken,POINT(1 2)\n";
        let (streets, rejected) = read_streets(csv.as_bytes()).unwrap();
        assert_eq!(streets.len(), 1);
        assert_eq!(rejected.len(), 1);
        assert_eq!(rejected[0].line, 3);
    }

    #[test]
    fn weekday_lists() {
        assert_eq!(
            parse_weekday_list("Mon|Tue|Sun").unwrap(),
            BTreeSet::from([0, 1, 6])
        );
        assert!(parse_weekday_list("Mon|Funday").is_err());
    }

    #[test]
    fn incidence_uses_polyline_distance() {
        let a = GeoPoint::new(-64.80, 46.09);
        let b = GeoPoint::new(-64.79, 46.09);
        let ctx = NetworkContext::new(
            vec![],
            vec![Street {
                id: "S".into(),
                name: "Main".into(),
                polyline: vec![a, b],
            }],
            vec![
                Intersection {
                    id: "X".into(),
                    position: a,
                },
                Intersection {
                    id: "Y".into(),
                    position: GeoPoint::new(-64.795, 46.0905),
                },
            ],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(ctx.incidence, vec![(0, 0)]);
        assert_eq!(ctx.streets_at_intersection(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(ctx.streets_at_intersection(1).count(), 0);
    }
}
