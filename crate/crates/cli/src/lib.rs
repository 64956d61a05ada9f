//! The `tvg` command line: generate scenarios, ingest feeds into a journal,
//! and query windowed metrics, paths, sweeps and trips from it.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
//! stderr, data to stdout or `--out`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tvg_core::feedgen::{self, Anomalies, Scenario};
use tvg_core::ingest::{ingest_paths, IngestOptions, MatchRadii, SegmentParams};
use tvg_core::metrics::export::{path_dot, table_csv, to_json, trip_dot};
use tvg_core::metrics::{
    evaluate, hourly_sweep, longest_shortest_path, mean_sweep, parse_hours, shortest_path,
    trip_connectivity, EntityClass, MetricKind, MetricOutput, MetricRequest, MetricsError,
    PageRankParams, SweepRow, ViewSpec, Weight,
};
use tvg_core::{EdgeLabel, GraphStore, NodeId, NodeLabel, TimeWindow, Timestamp};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tvg",
    version,
    about = "Time-varying graph toolkit for bus-transit feeds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic network, ping feed and ground truth.
    Gen(GenArgs),
    /// Build a journal from network CSVs and a ping feed.
    Ingest(IngestArgs),
    /// Centrality table over a window.
    Metric(MetricArgs),
    /// Shortest path between two nodes, or the longest shortest path.
    Path(PathArgs),
    /// Longest shortest path length over a window.
    Diameter(ScalarArgs),
    /// |E| / (|N| (|N| - 1)) over a window.
    Density(ScalarArgs),
    /// One metric per hour of a day.
    Sweep(SweepArgs),
    /// Trip inspection.
    Trip {
        #[command(subcommand)]
        command: TripCommand,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Intersections per grid side.
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long)]
    lines: Option<usize>,
    #[arg(long)]
    stops: Option<usize>,
    #[arg(long)]
    trips_per_line: Option<usize>,
    /// Seconds at each served stop.
    #[arg(long)]
    dwell: Option<i64>,
    /// Meters per second.
    #[arg(long)]
    speed: Option<f64>,
    /// Seconds between pings.
    #[arg(long)]
    ping_period: Option<i64>,
    /// Service day, YYYY-MM-DD.
    #[arg(long)]
    date: Option<chrono::NaiveDate>,
    #[arg(long)]
    first_hour: Option<u32>,
    #[arg(long)]
    skip_stops: Option<usize>,
    #[arg(long)]
    congestion_stops: Option<usize>,
    #[arg(long)]
    intersection_stops: Option<usize>,
    #[arg(long)]
    trip_gaps: Option<usize>,
    /// Plant no anomalies (overridden by explicit counts).
    #[arg(long)]
    no_anomalies: bool,
    /// Uniform position noise in meters.
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Debug, Args)]
struct JournalArg {
    /// Journal file; defaults to $TVG_JOURNAL.
    #[arg(long, env = "TVG_JOURNAL")]
    journal: PathBuf,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Directory holding bus_stops.csv, streets.csv, intersections.csv, routes.csv, calendar.csv.
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    pings: PathBuf,
    #[command(flatten)]
    journal: JournalArg,
    /// m/s below which a step is stationary.
    #[arg(long)]
    stop_speed: Option<f64>,
    /// Minimum Stop duration, seconds.
    #[arg(long)]
    min_stop: Option<i64>,
    /// Silence that ends a trip, seconds.
    #[arg(long)]
    gap: Option<i64>,
    #[arg(long)]
    bus_stop_radius: Option<f64>,
    #[arg(long)]
    street_radius: Option<f64>,
    /// Only emit DID_NOT_STOP_AT towards stops the route served in this feed.
    #[arg(long)]
    served_stops_only: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightArg {
    Ws,
    Wt,
    Hops,
}

impl From<WeightArg> for Weight {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::Ws => Weight::Ws,
            WeightArg::Wt => Weight::Wt,
            WeightArg::Hops => Weight::Hops,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableMetric {
    Degree,
    Pagerank,
    Betweenness,
    Congestion,
}

impl From<TableMetric> for MetricKind {
    fn from(m: TableMetric) -> Self {
        match m {
            TableMetric::Degree => MetricKind::Degree,
            TableMetric::Pagerank => MetricKind::PageRank,
            TableMetric::Betweenness => MetricKind::Betweenness,
            TableMetric::Congestion => MetricKind::Congestion,
        }
    }
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Window start, ISO-8601 UTC, inclusive.
    #[arg(long)]
    from: Option<Timestamp>,
    /// Window end, ISO-8601 UTC, inclusive.
    #[arg(long)]
    to: Option<Timestamp>,
}

impl WindowArgs {
    fn window(&self) -> Result<TimeWindow, Failure> {
        let all = TimeWindow::all();
        TimeWindow::new(
            self.from.unwrap_or(all.start()),
            self.to.unwrap_or(all.end()),
        )
        .map_err(|e| Failure::Usage(format!("--from/--to: {e}")))
    }
}

#[derive(Debug, Args)]
struct ViewArgs {
    /// Node labels of the view, comma separated (default Move,Stop).
    #[arg(long, value_delimiter = ',')]
    nodes: Vec<NodeLabel>,
    /// Edge labels of the view, comma separated (default NEXT).
    #[arg(long, value_delimiter = ',')]
    edges: Vec<EdgeLabel>,
}

impl ViewArgs {
    fn spec(&self) -> ViewSpec {
        let d = ViewSpec::default();
        ViewSpec {
            nodes: if self.nodes.is_empty() {
                d.nodes
            } else {
                self.nodes.clone()
            },
            edges: if self.edges.is_empty() {
                d.edges
            } else {
                self.edges.clone()
            },
        }
    }
}

#[derive(Debug, Args)]
struct MetricArgs {
    #[arg(value_enum)]
    metric: TableMetric,
    /// Entity class; without it the metric runs on the raw view.
    #[arg(long)]
    class: Option<EntityClass>,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    journal: JournalArg,
    #[arg(long)]
    top: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    /// Divide betweenness by (n-1)(n-2).
    #[arg(long)]
    normalized: bool,
    /// Path weight for raw-view betweenness.
    #[arg(long, value_enum, default_value_t = WeightArg::Ws)]
    weight: WeightArg,
    #[command(flatten)]
    view: ViewArgs,
    #[command(flatten)]
    pagerank: PageRankArgs,
}

#[derive(Debug, Args)]
struct PageRankArgs {
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

impl PageRankArgs {
    fn params(&self) -> PageRankParams {
        PageRankParams {
            damping: self.damping,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathKind {
    Shortest,
    Longest,
}

#[derive(Debug, Args)]
struct PathArgs {
    #[arg(value_enum)]
    kind: PathKind,
    /// Node id or external id.
    #[arg(long)]
    from_node: Option<String>,
    #[arg(long)]
    to_node: Option<String>,
    #[arg(long, value_enum, default_value_t = WeightArg::Ws)]
    weight: WeightArg,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    journal: JournalArg,
    #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
    format: GraphFormat,
    #[command(flatten)]
    view: ViewArgs,
}

#[derive(Debug, Args)]
struct ScalarArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    journal: JournalArg,
    #[arg(long, value_enum, default_value_t = WeightArg::Ws)]
    weight: WeightArg,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    #[command(flatten)]
    view: ViewArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    metric: MetricKind,
    /// YYYY-MM-DD
    #[arg(long)]
    day: chrono::NaiveDate,
    /// Last day of a multi-day sweep; each hour is averaged over the days.
    /// Diameter and density only.
    #[arg(long)]
    until: Option<chrono::NaiveDate>,
    /// Inclusive hour range such as 6:23.
    #[arg(long, default_value = "6:23")]
    hours: String,
    #[arg(long)]
    class: Option<EntityClass>,
    #[command(flatten)]
    journal: JournalArg,
    #[arg(long)]
    top: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    normalized: bool,
    #[arg(long, value_enum, default_value_t = WeightArg::Ws)]
    weight: WeightArg,
    #[command(flatten)]
    view: ViewArgs,
    #[command(flatten)]
    pagerank: PageRankArgs,
}

#[derive(Debug, Subcommand)]
enum TripCommand {
    /// Connectivity report for one trip.
    Show {
        #[arg(long)]
        id: String,
        #[command(flatten)]
        journal: JournalArg,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn data(e: impl std::fmt::Display) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI, writing data to `out` and diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = dispatch(cli.command, out, err).and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DATA
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Gen(a) => gen(a, err),
        Command::Ingest(a) => ingest(a, out, err),
        Command::Metric(a) => metric(a, out, err),
        Command::Path(a) => path(a, out),
        Command::Diameter(a) => scalar(MetricKind::Diameter, a, out),
        Command::Density(a) => scalar(MetricKind::Density, a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Trip {
            command:
                TripCommand::Show {
                    id,
                    journal,
                    format,
                },
        } => trip_show(&id, &journal.journal, format, out),
    }
}

fn load(journal: &Path) -> Result<GraphStore, Failure> {
    let f =
        File::open(journal).map_err(|e| Failure::Data(format!("{}: {e}", journal.display())))?;
    GraphStore::replay(BufReader::new(f))
        .map_err(|e| Failure::Data(format!("{}: {e}", journal.display())))
}

fn gen(a: GenArgs, err: &mut dyn Write) -> Result<(), Failure> {
    let d = Scenario::default();
    let base = if a.no_anomalies {
        Anomalies::none()
    } else {
        d.anomalies
    };
    let sc = Scenario {
        seed: a.seed,
        grid_size: a.grid_size.unwrap_or(d.grid_size),
        lines: a.lines.unwrap_or(d.lines),
        stops: a.stops.unwrap_or(d.stops),
        trips_per_line: a.trips_per_line.unwrap_or(d.trips_per_line),
        dwell_s: a.dwell.unwrap_or(d.dwell_s),
        cruise_speed: a.speed.unwrap_or(d.cruise_speed),
        ping_period_s: a.ping_period.unwrap_or(d.ping_period_s),
        date: a.date.unwrap_or(d.date),
        first_departure_hour: a.first_hour.unwrap_or(d.first_departure_hour),
        anomalies: Anomalies {
            skip_stops: a.skip_stops.unwrap_or(base.skip_stops),
            congestion_stops: a.congestion_stops.unwrap_or(base.congestion_stops),
            intersection_stops: a.intersection_stops.unwrap_or(base.intersection_stops),
            trip_gaps: a.trip_gaps.unwrap_or(base.trip_gaps),
        },
        noise_m: a.noise.unwrap_or(d.noise_m),
        ..d
    };
    let g = feedgen::generate(&sc).map_err(Failure::data)?;
    g.write_to(&a.out).map_err(Failure::data)?;
    writeln!(
        err,
        "wrote {} files to {}: {} pings, {} trips",
        g.files.len(),
        a.out.display(),
        g.pings.len(),
        g.truth.expected.trips
    )?;
    Ok(())
}

fn ingest(a: IngestArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let seg = SegmentParams::default();
    let radii = MatchRadii::default();
    let opts = IngestOptions {
        segment: SegmentParams {
            stop_speed: a.stop_speed.unwrap_or(seg.stop_speed),
            min_stop_duration: a.min_stop.unwrap_or(seg.min_stop_duration),
            gap_split: a.gap.unwrap_or(seg.gap_split),
        },
        radii: MatchRadii {
            bus_stop: a.bus_stop_radius.unwrap_or(radii.bus_stop),
            street: a.street_radius.unwrap_or(radii.street),
        },
        served_stops_only: a.served_stops_only,
    };
    if !(opts.radii.bus_stop > 0.0 && opts.radii.street > 0.0) {
        return Err(Failure::Usage("matching radii must be positive".into()));
    }
    let (store, report) = ingest_paths(&a.network, &a.pings, &opts).map_err(Failure::data)?;
    let path = &a.journal.journal;
    let f = File::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    store.write_journal(&mut w)?;
    w.flush()?;

    for issue in &report.rejected_lines {
        writeln!(
            err,
            "warning: {}.csv line {}: {}",
            issue.table, issue.line, issue.reason
        )?;
    }
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    for t in &report.rejected_trips {
        writeln!(
            err,
            "warning: trip of {} on route {} dropped: {}",
            t.vehicle_id, t.route_id, t.reason
        )?;
    }
    match a.format {
        ReportFormat::Json => out.write_all(to_json(&report).as_bytes())?,
        ReportFormat::Text => {
            writeln!(out, "pings: {}", report.pings)?;
            writeln!(out, "trips: {}", report.trips.len())?;
            writeln!(out, "rejected trips: {}", report.rejected_trips.len())?;
            writeln!(out, "rejected lines: {}", report.rejected_lines.len())?;
            writeln!(out, "nodes: {}", store.node_count())?;
            writeln!(out, "edges: {}", store.edges().len())?;
            writeln!(out, "journal: {}", path.display())?;
        }
    }
    Ok(())
}

fn write_output(
    output: &MetricOutput,
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match (output, format) {
        (MetricOutput::Table(t), TableFormat::Csv) => out.write_all(table_csv(t).as_bytes())?,
        (MetricOutput::Diameter { value, .. }, TableFormat::Csv) => {
            writeln!(out, "diameter\n{value}")?
        }
        (MetricOutput::Density { density, .. }, TableFormat::Csv) => writeln!(
            out,
            "nodes,edges,numerator,denominator,density\n{},{},{},{},{}",
            density.nodes,
            density.edges,
            density.numerator,
            density.denominator,
            density.value()
        )?,
        (o, TableFormat::Json) => out.write_all(to_json(o).as_bytes())?,
    }
    Ok(())
}

fn metric(a: MetricArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let w = a.window.window()?;
    let store = load(&a.journal.journal)?;
    let req = MetricRequest {
        metric: a.metric.into(),
        class: a.class,
        view: a.view.spec(),
        weight: a.weight.into(),
        normalized: a.normalized,
        top: a.top,
        pagerank: a.pagerank.params(),
    };
    let output = evaluate(&store, &req, &w).map_err(|e| match e {
        tvg_core::metrics::MetricsError::UnsupportedClass { .. } => Failure::Usage(e.to_string()),
        e => Failure::data(e),
    })?;
    if let Some(t) = output.table() {
        if t.converged == Some(false) {
            writeln!(
                err,
                "warning: pagerank stopped at --max-iter before converging"
            )?;
        }
    }
    write_output(&output, a.format, out)
}

/// Numeric node id, else the first node (by id) with that external id.
fn resolve_node(store: &GraphStore, s: &str) -> Result<NodeId, Failure> {
    if let Ok(n) = s.parse::<u64>() {
        if store.node(NodeId(n)).is_some() {
            return Ok(NodeId(n));
        }
    }
    store
        .nodes()
        .iter()
        .find(|n| n.text("ext_id") == Some(s))
        .map(|n| n.id)
        .ok_or_else(|| Failure::Data(format!("no node {s:?}")))
}

fn path(a: PathArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let w = a.window.window()?;
    let store = load(&a.journal.journal)?;
    let view = a.view.spec().view(&store, &w);
    let weight: Weight = a.weight.into();
    let result = match a.kind {
        PathKind::Shortest => {
            let (Some(from), Some(to)) = (&a.from_node, &a.to_node) else {
                return Err(Failure::Usage(
                    "path shortest needs --from-node and --to-node".into(),
                ));
            };
            let (s, t) = (resolve_node(&store, from)?, resolve_node(&store, to)?);
            shortest_path(&view, s, t, weight).map_err(Failure::data)?
        }
        PathKind::Longest => longest_shortest_path(&view, weight).map_err(Failure::data)?,
    };
    match (a.format, &result) {
        (GraphFormat::Json, r) => out.write_all(to_json(r).as_bytes())?,
        (GraphFormat::Dot, Some(p)) => out.write_all(path_dot(&store, p).as_bytes())?,
        (GraphFormat::Dot, None) => return Err(Failure::Data("no path".into())),
    }
    Ok(())
}

fn scalar(kind: MetricKind, a: ScalarArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let w = a.window.window()?;
    let store = load(&a.journal.journal)?;
    let req = MetricRequest {
        view: a.view.spec(),
        weight: a.weight.into(),
        ..MetricRequest::new(kind)
    };
    let output = evaluate(&store, &req, &w).map_err(Failure::data)?;
    match a.format {
        ReportFormat::Json => out.write_all(to_json(&output).as_bytes())?,
        ReportFormat::Text => match &output {
            MetricOutput::Diameter { value, .. } => writeln!(out, "{value}")?,
            MetricOutput::Density { density, .. } => {
                writeln!(out, "{} ({})", density.value(), density.ratio())?
            }
            MetricOutput::Table(_) => unreachable!("scalar metrics"),
        },
    }
    Ok(())
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (from, to) = parse_hours(&a.hours).map_err(|e| Failure::Usage(e.to_string()))?;
    let store = load(&a.journal.journal)?;
    let req = MetricRequest {
        metric: a.metric,
        class: a.class,
        view: a.view.spec(),
        weight: a.weight.into(),
        normalized: a.normalized,
        top: a.top,
        pagerank: a.pagerank.params(),
    };
    let failure = |e: MetricsError| match e {
        MetricsError::UnsupportedClass { .. }
        | MetricsError::NotScalar(_)
        | MetricsError::InvertedDays { .. } => Failure::Usage(e.to_string()),
        e => Failure::data(e),
    };
    if let Some(until) = a.until {
        let rows = mean_sweep(&store, &req, a.day, until, from, to).map_err(failure)?;
        match a.format {
            TableFormat::Json => out.write_all(to_json(&rows).as_bytes())?,
            TableFormat::Csv => {
                writeln!(out, "hour,days,mean")?;
                for r in &rows {
                    writeln!(out, "{},{},{}", r.hour, r.values.len(), r.mean)?;
                }
            }
        }
        return Ok(());
    }
    let rows = hourly_sweep(&store, &req, a.day, from, to).map_err(failure)?;
    match a.format {
        TableFormat::Json => out.write_all(to_json(&rows).as_bytes())?,
        TableFormat::Csv => out.write_all(sweep_csv(&rows).as_bytes())?,
    }
    Ok(())
}

/// One line per hour for scalar metrics; one line per (hour, row) for tables.
fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let scalar = rows.first().is_none_or(|r| r.result.table().is_none());
    if scalar {
        s.push_str("hour,value\n");
    } else {
        s.push_str("hour,rank,id,name,score\n");
    }
    for r in rows {
        match &r.result {
            MetricOutput::Table(t) => {
                let body = table_csv(t);
                for line in body.lines().skip(1) {
                    s.push_str(&format!("{},{line}\n", r.hour));
                }
            }
            MetricOutput::Diameter { value, .. } => s.push_str(&format!("{},{value}\n", r.hour)),
            MetricOutput::Density { value, .. } => s.push_str(&format!("{},{value}\n", r.hour)),
        }
    }
    s
}

fn trip_show(
    id: &str,
    journal: &Path,
    format: GraphFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let store = load(journal)?;
    let report = trip_connectivity(&store, id).map_err(Failure::data)?;
    match format {
        GraphFormat::Json => out.write_all(to_json(&report).as_bytes())?,
        GraphFormat::Dot => out.write_all(trip_dot(&store, &report).as_bytes())?,
    }
    Ok(())
}
