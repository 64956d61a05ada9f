use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;

use super::{infeasible, FeedgenError, ANOMALY_DWELL_S, MIN_HALF_DWELL_S, STOP_LATERAL_M};
use crate::ingest::{MatchRadii, SegmentParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Anomalies {
    pub skip_stops: usize,
    pub congestion_stops: usize,
    pub intersection_stops: usize,
    pub trip_gaps: usize,
}

impl Default for Anomalies {
    fn default() -> Self {
        Anomalies {
            skip_stops: 3,
            congestion_stops: 4,
            intersection_stops: 3,
            trip_gaps: 1,
        }
    }
}

impl Anomalies {
    pub fn none() -> Self {
        Anomalies {
            skip_stops: 0,
            congestion_stops: 0,
            intersection_stops: 0,
            trip_gaps: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    /// Intersections per side of the square grid.
    pub grid_size: usize,
    /// Street segment length in meters.
    pub block_m: f64,
    pub lines: usize,
    /// Bus stops over all lines, spread as evenly as possible.
    pub stops: usize,
    pub trips_per_line: usize,
    pub dwell_s: i64,
    pub cruise_speed: f64,
    pub ping_period_s: i64,
    pub date: NaiveDate,
    /// Hour of the first departure; trip k leaves k hours later plus jitter.
    pub first_departure_hour: u32,
    pub anomalies: Anomalies,
    /// Uniform position noise per axis, meters. Zero keeps the feed exact.
    pub noise_m: f64,
    /// Grid centre.
    pub origin: GeoPoint,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            seed: 42,
            grid_size: 5,
            block_m: 250.0,
            lines: 3,
            stops: 20,
            trips_per_line: 18,
            dwell_s: 30,
            cruise_speed: 10.0,
            ping_period_s: 5,
            date: NaiveDate::from_ymd_opt(2016, 6, 9).expect("valid date"),
            first_departure_hour: 6,
            anomalies: Anomalies::default(),
            noise_m: 0.0,
            origin: GeoPoint::new(-64.78, 46.09),
        }
    }
}

impl Scenario {
    /// Lattice step in meters: distance covered between two pings.
    pub fn step_m(&self) -> f64 {
        self.cruise_speed * self.ping_period_s as f64
    }

    /// Checks that the ingest defaults will recover the planted structure.
    pub fn validate(&self) -> Result<(), FeedgenError> {
        let seg = SegmentParams::default();
        let radii = MatchRadii::default();
        if self.stops == 0 {
            return infeasible("0 stops");
        }
        if self.lines == 0 {
            return infeasible("0 lines");
        }
        if self.grid_size < 2 || self.grid_size > 10 {
            return infeasible(format!("grid size {} not in 2..=10", self.grid_size));
        }
        if self.lines > self.grid_size {
            return infeasible(format!("{} lines need at least a {0}x{0} grid", self.lines));
        }
        if self.ping_period_s <= 0
            || self.cruise_speed.is_nan()
            || self.cruise_speed <= seg.stop_speed
        {
            return infeasible(
                "ping period must be positive and cruise speed above the stop speed",
            );
        }
        let step = self.step_m();
        let cells = self.block_m / step;
        if (cells - cells.round()).abs() > 1e-9 || cells.round() < 4.0 {
            return infeasible(format!(
                "block {} m must be a whole multiple (at least 4) of the {} m ping step",
                self.block_m, step
            ));
        }
        // Moves next to a stop must be outside the bus-stop radius, stops one
        // half-step from an intersection inside the street radius, and
        // mid-block stops outside it.
        if step.hypot(STOP_LATERAL_M) <= radii.bus_stop
            || step / 2.0 > radii.street
            || 1.5 * step <= radii.street
        {
            return infeasible(format!(
                "ping step {step} m is outside the range the matcher can resolve"
            ));
        }
        let mid_slots = (self.grid_size - 1) * (cells.round() as usize - 2);
        let per_line = self.stops.div_ceil(self.lines);
        if self.stops < 2 * self.lines || per_line > mid_slots {
            return infeasible(format!(
                "{} stops over {} lines: each line needs 2..={mid_slots}",
                self.stops, self.lines
            ));
        }
        if self.dwell_s % self.ping_period_s != 0 || self.dwell_s < seg.min_stop_duration {
            return infeasible(format!(
                "dwell {} s must be a multiple of the ping period and at least {} s",
                self.dwell_s, seg.min_stop_duration
            ));
        }
        if ANOMALY_DWELL_S % self.ping_period_s != 0 {
            return infeasible("ping period must divide the anomaly dwell");
        }
        if self.anomalies.trip_gaps > 0 && self.dwell_s < 2 * MIN_HALF_DWELL_S {
            return infeasible("trip gaps need a dwell of at least 20 s");
        }
        if self.trips_per_line == 0 || self.first_departure_hour as usize + self.trips_per_line > 24
        {
            return infeasible(format!(
                "{} trips from {:02}:00 do not fit in one day",
                self.trips_per_line, self.first_departure_hour
            ));
        }
        if self.noise_m.is_nan() || self.noise_m < 0.0 || !self.origin.is_valid() {
            return infeasible("noise must be >= 0 and the origin a valid coordinate");
        }
        Ok(())
    }
}
