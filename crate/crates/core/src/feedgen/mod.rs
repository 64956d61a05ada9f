//! Deterministic synthetic network and GPS feed with ground truth.
//!
//! The network is a square street grid. Each line runs the full length of
//! one grid row or column; one vehicle per line shuttles between the line's
//! first and last bus stop, alternating direction, and reports a ping every
//! `ping_period_s`. A vehicle moving at cruise speed covers one step of
//! `cruise_speed * ping_period_s` meters per ping, and every ping falls at a
//! half-step position along the line, so ping positions, bus stops and the
//! planted anomalies sit on a shared lattice and the expected episodes are
//! known exactly.
//!
//! Planted anomalies: skip-stops (the bus passes a stop it serves at full
//! speed), congestion stops mid-street, stops next to an intersection, and
//! trip gaps (a ping outage during a dwell that splits one run into two
//! trips).

mod scenario;
mod truth;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geo::{GeoPoint, LocalFrame};
use crate::ingest::{format_linestring, EpisodeKind, Ping};
use crate::metrics::AnchorKind;
use crate::time::Timestamp;

pub use scenario::{Anomalies, Scenario};
pub use truth::{
    ExpectedTables, GroundTruth, HourTable, PlantedAnomaly, TruthAnchor, TruthEpisode, TruthTrip,
};

/// Lateral distance from the street centreline to a bus stop.
pub const STOP_LATERAL_M: f64 = 12.0;
/// Dwell of congestion and intersection stops.
pub const ANOMALY_DWELL_S: i64 = 20;
/// Ping outage planted inside a dwell to split a trip.
pub const TRIP_GAP_OUTAGE_S: i64 = 705;
/// Minimum silence between consecutive trips of one vehicle.
pub const MIN_LAYOVER_S: i64 = 660;
/// Departures are jittered by up to this many seconds after the hour.
pub const MAX_JITTER_S: i64 = 1800;
/// Each half of a split dwell lasts at least this long.
const MIN_HALF_DWELL_S: i64 = 10;

#[derive(Debug, thiserror::Error)]
pub enum FeedgenError {
    #[error("infeasible scenario: {0}")]
    Infeasible(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn infeasible<T>(msg: impl Into<String>) -> Result<T, FeedgenError> {
    Err(FeedgenError::Infeasible(msg.into()))
}

/// Everything a scenario produces. File contents are final bytes.
#[derive(Debug, Clone)]
pub struct Generated {
    pub files: BTreeMap<&'static str, String>,
    pub pings: Vec<Ping>,
    pub truth: GroundTruth,
}

impl Generated {
    pub const GROUND_TRUTH: &'static str = "ground_truth.json";
    pub const PINGS: &'static str = "pings.csv";

    /// Writes every file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<(), FeedgenError> {
        let io = |path: &Path, source| FeedgenError::Io {
            path: path.display().to_string(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for (name, body) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Row,
    Column,
}

/// A line's street: grid row or column `index`.
#[derive(Debug, Clone)]
struct LineGeom {
    axis: Axis,
    index: usize,
    route_id: String,
    vehicle_id: String,
    /// Lattice positions of the line's bus stops, ascending, with stop table index.
    stops: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Planted {
    Skip,
    Congestion,
    Intersection,
    Gap,
}

struct Grid<'a> {
    sc: &'a Scenario,
    frame: LocalFrame,
    step: f64,
    /// Lattice positions per block.
    cells: usize,
    /// Planar coordinate of grid line 0.
    offset: f64,
}

impl Grid<'_> {
    fn blocks(&self) -> usize {
        self.sc.grid_size - 1
    }

    fn positions(&self) -> usize {
        self.blocks() * self.cells
    }

    fn vertex(&self, r: usize, c: usize) -> (f64, f64) {
        (
            self.offset + c as f64 * self.sc.block_m,
            self.offset + r as f64 * self.sc.block_m,
        )
    }

    fn point(&self, xy: (f64, f64)) -> GeoPoint {
        let p = self.frame.unproject(xy.0, xy.1);
        // Rounded once here so the CSV text and the in-memory pings agree.
        GeoPoint::new(round7(p.lon), round7(p.lat))
    }

    /// Planar position of lattice slot `q` on `line`, shifted `lateral` meters off it.
    fn slot(&self, line: &LineGeom, q: usize, lateral: f64) -> (f64, f64) {
        let along = self.offset + (q as f64 + 0.5) * self.step;
        let across = self.offset + line.index as f64 * self.sc.block_m + lateral;
        match line.axis {
            Axis::Row => (along, across),
            Axis::Column => (across, along),
        }
    }

    fn is_mid_slot(&self, q: usize) -> bool {
        let j = q % self.cells;
        j >= 1 && j + 1 < self.cells
    }

    fn street_id(&self, line: &LineGeom, q: usize) -> String {
        street_id(line.axis, line.index, q / self.cells)
    }

    /// Intersection next to an end-of-block slot.
    fn intersection_id(&self, line: &LineGeom, q: usize) -> String {
        let block = q / self.cells;
        let k = if q.is_multiple_of(self.cells) {
            block
        } else {
            block + 1
        };
        match line.axis {
            Axis::Row => intersection_id(line.index, k),
            Axis::Column => intersection_id(k, line.index),
        }
    }
}

fn round7(x: f64) -> f64 {
    (x * 1e7).round() / 1e7
}

fn street_id(axis: Axis, index: usize, block: usize) -> String {
    match axis {
        Axis::Row => format!("H{index}-{block}"),
        Axis::Column => format!("V{index}-{block}"),
    }
}

fn street_name(axis: Axis, index: usize) -> String {
    match axis {
        Axis::Row => format!("Row {index} Street"),
        Axis::Column => format!("Column {index} Avenue"),
    }
}

fn intersection_id(r: usize, c: usize) -> String {
    format!("X{r}-{c}")
}

/// Streets meeting at intersection `(r, c)` of an `n`-by-`n` grid.
fn incident_streets(n: usize, r: usize, c: usize) -> Vec<String> {
    let mut out = Vec::new();
    if c > 0 {
        out.push(street_id(Axis::Row, r, c - 1));
    }
    if c + 1 < n {
        out.push(street_id(Axis::Row, r, c));
    }
    if r > 0 {
        out.push(street_id(Axis::Column, c, r - 1));
    }
    if r + 1 < n {
        out.push(street_id(Axis::Column, c, r));
    }
    out
}

fn line_axes(lines: usize, n: usize) -> Vec<(Axis, usize)> {
    // Odd indices first keeps lines off the grid boundary.
    let order: Vec<usize> = (1..n).step_by(2).chain((0..n).step_by(2)).collect();
    (0..lines)
        .map(|i| {
            let axis = if i % 2 == 0 { Axis::Row } else { Axis::Column };
            (axis, order[i / 2])
        })
        .collect()
}

fn csv_row(out: &mut String, fields: &[&str]) {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(fields).expect("in-memory csv");
    out.push_str(std::str::from_utf8(&w.into_inner().expect("flush")).expect("utf-8"));
}

struct Stop {
    id: String,
    name: String,
    line: usize,
    q: usize,
}

/// One episode while simulating, before trips are numbered.
struct SimEpisode {
    kind: EpisodeKind,
    start: i64,
    end: i64,
    pings: usize,
    anchor: TruthAnchor,
}

struct SimTrip {
    line: usize,
    episodes: Vec<SimEpisode>,
    skipped: Vec<(String, i64)>,
    /// Planted anomalies in this run: kind, anchor id, start, end.
    planted: Vec<(Planted, String, i64, i64)>,
}

/// Runs the scenario.
pub fn generate(sc: &Scenario) -> Result<Generated, FeedgenError> {
    sc.validate()?;
    let step = sc.cruise_speed * sc.ping_period_s as f64;
    let grid = Grid {
        sc,
        frame: LocalFrame::new(sc.origin),
        step,
        cells: (sc.block_m / step).round() as usize,
        offset: -(sc.grid_size as f64 - 1.0) * sc.block_m / 2.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);

    // Lines and their stops.
    let mut lines: Vec<LineGeom> = line_axes(sc.lines, sc.grid_size)
        .into_iter()
        .enumerate()
        .map(|(i, (axis, index))| LineGeom {
            axis,
            index,
            route_id: (50 + i).to_string(),
            vehicle_id: format!("bus-{}", 50 + i),
            stops: Vec::new(),
        })
        .collect();
    let mid_slots: Vec<usize> = (0..grid.positions())
        .filter(|&q| grid.is_mid_slot(q))
        .collect();
    let mut stops: Vec<Stop> = Vec::new();
    for (li, line) in lines.iter_mut().enumerate() {
        let k = sc.stops / sc.lines + usize::from(li < sc.stops % sc.lines);
        let mut qs: Vec<usize> = mid_slots.choose_multiple(&mut rng, k).copied().collect();
        qs.sort_unstable();
        for q in qs {
            let id = format!("B{:02}", stops.len() + 1);
            let name = format!(
                "{} stop {}",
                street_name(line.axis, line.index),
                line.stops.len() + 1
            );
            line.stops.push((q, stops.len()));
            stops.push(Stop {
                id,
                name,
                line: li,
                q,
            });
        }
    }

    let planted = plant_anomalies(sc, &grid, &lines, &mut rng)?;

    // Simulate.
    let day0 = sc
        .date
        .and_hms_opt(0, 0, 0)
        .expect("midnight")
        .and_utc()
        .timestamp();
    let mut runs: Vec<SimTrip> = Vec::new();
    let mut pings: Vec<Ping> = Vec::new();
    let p = sc.ping_period_s;
    for (li, line) in lines.iter().enumerate() {
        let stop_at: BTreeMap<usize, usize> = line.stops.iter().copied().collect();
        let (first, last) = (line.stops[0].0, line.stops[line.stops.len() - 1].0);
        let mut prev_end: Option<i64> = None;
        for k in 0..sc.trips_per_line {
            let jitter = rng.random_range(0..=MAX_JITTER_S / p) * p;
            let mut t = day0 + (sc.first_departure_hour as i64 + k as i64) * 3600 + jitter;
            if let Some(e) = prev_end {
                let min = e + MIN_LAYOVER_S;
                if t < min {
                    t = min + (p - (min - day0) % p) % p;
                }
            }
            let route: Vec<usize> = if k % 2 == 0 {
                (first..=last).collect()
            } else {
                (first..=last).rev().collect()
            };
            let marks = planted.get(&(li, k));
            let mut run = SimTrip {
                line: li,
                episodes: Vec::new(),
                skipped: Vec::new(),
                planted: Vec::new(),
            };
            let emit = |ts: i64, xy: (f64, f64), pings: &mut Vec<Ping>, rng: &mut ChaCha8Rng| {
                let xy = if sc.noise_m > 0.0 {
                    (
                        xy.0 + rng.random_range(-sc.noise_m..=sc.noise_m),
                        xy.1 + rng.random_range(-sc.noise_m..=sc.noise_m),
                    )
                } else {
                    xy
                };
                pings.push(Ping {
                    vehicle_id: line.vehicle_id.clone(),
                    route_id: line.route_id.clone(),
                    ts: Timestamp::from_unix(ts).expect("scenario dates are in range"),
                    position: grid.point(xy),
                });
            };
            let dwell = |run: &mut SimTrip,
                         t: i64,
                         d: i64,
                         xy,
                         anchor: TruthAnchor,
                         pings: &mut Vec<Ping>,
                         rng: &mut ChaCha8Rng| {
                let n = d / p + 1;
                for i in 0..n {
                    emit(t + i * p, xy, pings, rng);
                }
                run.episodes.push(SimEpisode {
                    kind: EpisodeKind::Stop,
                    start: t,
                    end: t + d,
                    pings: n as usize,
                    anchor,
                });
            };
            for &q in &route {
                let on_street = grid.slot(line, q, 0.0);
                let mark = marks.and_then(|m| m.get(&q)).copied();
                match (stop_at.get(&q), mark) {
                    (Some(&s), None) => {
                        let a = TruthAnchor::new(AnchorKind::BusStop, &stops[s].id);
                        dwell(&mut run, t, sc.dwell_s, on_street, a, &mut pings, &mut rng);
                        t += sc.dwell_s + p;
                    }
                    (Some(&s), Some(Planted::Gap)) => {
                        let h1 = ((sc.dwell_s / 2) / p * p).max(round_up(MIN_HALF_DWELL_S, p));
                        let h2 = (sc.dwell_s - h1).max(round_up(MIN_HALF_DWELL_S, p));
                        let a = TruthAnchor::new(AnchorKind::BusStop, &stops[s].id);
                        dwell(&mut run, t, h1, on_street, a.clone(), &mut pings, &mut rng);
                        run.planted
                            .push((Planted::Gap, stops[s].id.clone(), t, t + h1));
                        let resume = t + h1 + TRIP_GAP_OUTAGE_S;
                        runs.push(std::mem::replace(
                            &mut run,
                            SimTrip {
                                line: li,
                                episodes: Vec::new(),
                                skipped: Vec::new(),
                                planted: Vec::new(),
                            },
                        ));
                        dwell(&mut run, resume, h2, on_street, a, &mut pings, &mut rng);
                        t = resume + h2 + p;
                    }
                    (Some(&s), Some(Planted::Skip)) => {
                        emit(t, on_street, &mut pings, &mut rng);
                        run.episodes.push(move_episode(t, grid.street_id(line, q)));
                        run.skipped.push((stops[s].id.clone(), t));
                        run.planted.push((Planted::Skip, stops[s].id.clone(), t, t));
                        t += p;
                    }
                    (None, Some(kind @ (Planted::Congestion | Planted::Intersection))) => {
                        let a = if kind == Planted::Congestion {
                            TruthAnchor::new(AnchorKind::StreetSegment, &grid.street_id(line, q))
                        } else {
                            TruthAnchor::new(
                                AnchorKind::StreetIntersection,
                                &grid.intersection_id(line, q),
                            )
                        };
                        run.planted
                            .push((kind, a.id.clone(), t, t + ANOMALY_DWELL_S));
                        dwell(
                            &mut run,
                            t,
                            ANOMALY_DWELL_S,
                            on_street,
                            a,
                            &mut pings,
                            &mut rng,
                        );
                        t += ANOMALY_DWELL_S + p;
                    }
                    (None, None) => {
                        emit(t, on_street, &mut pings, &mut rng);
                        run.episodes.push(move_episode(t, grid.street_id(line, q)));
                        t += p;
                    }
                    (s, m) => unreachable!("planted {m:?} at stop {s:?}"),
                }
            }
            // The last dwell ended at t - p.
            prev_end = Some(t - p);
            runs.push(run);
        }
    }
    let last_ping = pings.iter().map(|p| p.ts.unix()).max().unwrap_or(day0);
    if last_ping >= day0 + 86_400 {
        return infeasible(format!(
            "trips run past midnight ({} trips from {:02}:00)",
            sc.trips_per_line, sc.first_departure_hour
        ));
    }

    let mut through = BTreeMap::new();
    for r in 0..sc.grid_size {
        for c in 0..sc.grid_size {
            through.insert(intersection_id(r, c), incident_streets(sc.grid_size, r, c));
        }
    }
    let truth = truth::build(sc, &lines_meta(&lines), &through, runs);
    let mut files = network_files(&grid, &lines, &stops);
    files.insert(Generated::PINGS, pings_csv(&pings));
    files.insert(Generated::GROUND_TRUTH, truth.to_json());
    Ok(Generated {
        files,
        pings,
        truth,
    })
}

fn round_up(x: i64, p: i64) -> i64 {
    (x + p - 1) / p * p
}

fn move_episode(t: i64, street: String) -> SimEpisode {
    SimEpisode {
        kind: EpisodeKind::Move,
        start: t,
        end: t,
        pings: 1,
        anchor: TruthAnchor {
            kind: AnchorKind::StreetSegment,
            id: street,
        },
    }
}

/// (line, trip) -> lattice slot -> anomaly.
type Plan = BTreeMap<(usize, usize), BTreeMap<usize, Planted>>;

/// Picks (line, trip, lattice slot) for every planted anomaly.
fn plant_anomalies(
    sc: &Scenario,
    grid: &Grid<'_>,
    lines: &[LineGeom],
    rng: &mut ChaCha8Rng,
) -> Result<Plan, FeedgenError> {
    let mut planted = Plan::new();
    let a = &sc.anomalies;
    let wanted = [
        (Planted::Skip, a.skip_stops),
        (Planted::Congestion, a.congestion_stops),
        (Planted::Intersection, a.intersection_stops),
        (Planted::Gap, a.trip_gaps),
    ];
    for (kind, count) in wanted {
        for _ in 0..count {
            let mut placed = false;
            for _attempt in 0..1000 {
                let li = rng.random_range(0..lines.len());
                let k = rng.random_range(0..sc.trips_per_line);
                let line = &lines[li];
                let served: BTreeSet<usize> = line.stops.iter().map(|s| s.0).collect();
                let (first, last) = (line.stops[0].0, line.stops[line.stops.len() - 1].0);
                let marks = planted.entry((li, k)).or_default();
                if kind == Planted::Gap && marks.values().any(|m| *m == Planted::Gap) {
                    continue;
                }
                let candidates: Vec<usize> = (first + 1..last)
                    .filter(|q| !marks.contains_key(q))
                    .filter(|q| match kind {
                        Planted::Skip | Planted::Gap => served.contains(q),
                        Planted::Congestion => grid.is_mid_slot(*q) && !served.contains(q),
                        Planted::Intersection => !grid.is_mid_slot(*q),
                    })
                    .collect();
                if let Some(&q) = candidates.choose(rng) {
                    marks.insert(q, kind);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return infeasible(format!("no room to plant {kind:?} anomalies"));
            }
        }
    }
    planted.retain(|_, m| !m.is_empty());
    Ok(planted)
}

fn lines_meta(lines: &[LineGeom]) -> Vec<truth::LineMeta> {
    lines
        .iter()
        .map(|l| truth::LineMeta {
            route_id: l.route_id.clone(),
            vehicle_id: l.vehicle_id.clone(),
        })
        .collect()
}

fn network_files(
    grid: &Grid<'_>,
    lines: &[LineGeom],
    stops: &[Stop],
) -> BTreeMap<&'static str, String> {
    let n = grid.sc.grid_size;
    let coord = |p: GeoPoint| (format!("{:.7}", p.lat), format!("{:.7}", p.lon));
    let mut files = BTreeMap::new();

    let mut s = String::new();
    csv_row(&mut s, &["stop_id", "name", "lat", "lon"]);
    for stop in stops {
        let p = grid.point(grid.slot(&lines[stop.line], stop.q, STOP_LATERAL_M));
        let (lat, lon) = coord(p);
        csv_row(&mut s, &[&stop.id, &stop.name, &lat, &lon]);
    }
    files.insert("bus_stops.csv", s);

    let mut s = String::new();
    csv_row(&mut s, &["node_id", "lat", "lon"]);
    for r in 0..n {
        for c in 0..n {
            let (lat, lon) = coord(grid.point(grid.vertex(r, c)));
            csv_row(&mut s, &[&intersection_id(r, c), &lat, &lon]);
        }
    }
    files.insert("intersections.csv", s);

    let mut s = String::new();
    csv_row(&mut s, &["street_id", "name", "wkt"]);
    for (axis, i) in [Axis::Row, Axis::Column]
        .into_iter()
        .flat_map(|a| (0..n).map(move |i| (a, i)))
    {
        for b in 0..n - 1 {
            let (a, z) = match axis {
                Axis::Row => (grid.vertex(i, b), grid.vertex(i, b + 1)),
                Axis::Column => (grid.vertex(b, i), grid.vertex(b + 1, i)),
            };
            let wkt = format_linestring(&[grid.point(a), grid.point(z)]);
            csv_row(
                &mut s,
                &[&street_id(axis, i, b), &street_name(axis, i), &wkt],
            );
        }
    }
    files.insert("streets.csv", s);

    let mut s = String::new();
    csv_row(&mut s, &["route_id", "name"]);
    for l in lines {
        csv_row(
            &mut s,
            &[
                &l.route_id,
                &format!("{} line", street_name(l.axis, l.index)),
            ],
        );
    }
    files.insert("routes.csv", s);

    let mut s = String::new();
    csv_row(&mut s, &["service_id", "days"]);
    csv_row(&mut s, &["WE", "Sat|Sun"]);
    csv_row(&mut s, &["WK", "Mon|Tue|Wed|Thu|Fri"]);
    files.insert("calendar.csv", s);
    files
}

fn pings_csv(pings: &[Ping]) -> String {
    let mut s = String::with_capacity(pings.len() * 64);
    s.push_str("vehicle_id,route_id,timestamp,lat,lon\n");
    for p in pings {
        let _ = writeln!(
            s,
            "{},{},{},{:.7},{:.7}",
            p.vehicle_id, p.route_id, p.ts, p.position.lat, p.position.lon
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let g = generate(&Scenario::default()).unwrap();
        assert_eq!(g.files["streets.csv"].lines().count(), 41);
        assert_eq!(g.files["intersections.csv"].lines().count(), 26);
        assert_eq!(g.files["bus_stops.csv"].lines().count(), 21);
        assert_eq!(g.files["routes.csv"].lines().count(), 4);
    }

    #[test]
    fn incidence_of_corner_and_centre() {
        assert_eq!(incident_streets(5, 0, 0), vec!["H0-0", "V0-0"]);
        assert_eq!(incident_streets(5, 2, 2).len(), 4);
    }

    #[test]
    fn lines_alternate_axes() {
        let axes = line_axes(4, 5);
        assert_eq!(
            axes,
            vec![
                (Axis::Row, 1),
                (Axis::Column, 1),
                (Axis::Row, 3),
                (Axis::Column, 3)
            ]
        );
    }

    #[test]
    fn zero_stops_is_fatal() {
        let sc = Scenario {
            stops: 0,
            ..Scenario::default()
        };
        assert!(matches!(generate(&sc), Err(FeedgenError::Infeasible(_))));
    }
}
