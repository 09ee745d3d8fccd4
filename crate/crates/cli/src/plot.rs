//! `nevlab plot`: CSV series with an optional SVG chart.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use nevlab::complex::ComplexPoint;
use nevlab::difference::{quotient_proximity, StepSpec};
use nevlab::nevanlinna::{characteristic, counting, proximity, Target, DEFAULT_TOL};
use nevlab::thresholds::alpha1;

use crate::args::{parse_range, range_radii, resolve_function};
use crate::svg::LineChart;
use crate::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Columns `r, T, N, m` over a geometric radius range.
    Characteristic,
    /// Columns `k, eta, forward, reverse, sum` for `eta = alpha1(r)/2^k`.
    EtaSweep,
}

#[derive(Args)]
pub struct PlotArgs {
    pub kind: PlotKind,
    /// Reference function id or a corpus file with one entry.
    #[arg(long)]
    pub function: String,
    /// `lo:hi:geometric:count` for characteristic, a single radius for eta-sweep.
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    /// Number of halvings for eta-sweep.
    #[arg(long, default_value_t = 12)]
    pub k: u32,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write an SVG line chart here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
    chart_x: usize,
    chart_y: usize,
    log_x: bool,
}

fn characteristic_table(args: &PlotArgs) -> Result<Table, Failure> {
    let (_, f) = resolve_function(&args.function)?;
    let grid = parse_range(&args.r)?;
    let hi: f64 = args.r.split(':').nth(1).and_then(|s| s.parse().ok()).unwrap_or(grid.largest());
    let mut rows = Vec::new();
    for r in range_radii(&grid, hi) {
        let t = characteristic(&f, r, args.tol)?.value;
        let n = counting(&f, r, Target::Poles)?.value;
        let m = proximity(&f, r, args.tol)?.value;
        rows.push(vec![r, t, n, m]);
    }
    Ok(Table {
        header: vec!["r", "T", "N", "m"],
        rows,
        chart_x: 0,
        chart_y: 1,
        log_x: true,
    })
}

fn sweep_table(args: &PlotArgs) -> Result<Table, Failure> {
    let (_, f) = resolve_function(&args.function)?;
    let r: f64 = args
        .r
        .parse()
        .map_err(|_| Failure::Usage(format!("eta-sweep needs a single radius, got '{}'", args.r)))?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Failure::Usage(format!("radius must be positive, got {r}")));
    }
    let a1 = alpha1(&f, r)?.value;
    let mut rows = Vec::new();
    for k in 0..=args.k {
        let eta = a1 / 2f64.powi(k as i32);
        let q = quotient_proximity(&f, &StepSpec::fixed(ComplexPoint::new(eta, 0.0))?, r, args.tol)?;
        rows.push(vec![k as f64, eta, q.forward.value, q.reverse.value, q.sum()]);
    }
    Ok(Table {
        header: vec!["k", "eta", "forward", "reverse", "sum"],
        rows,
        chart_x: 0,
        chart_y: 4,
        log_x: false,
    })
}

fn to_csv(table: &Table) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.header).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn write(path: &PathBuf, bytes: &[u8]) -> Outcome {
    std::fs::write(path, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn run(args: PlotArgs) -> Outcome {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be a positive real, got {}", args.tol)));
    }
    let table = match args.kind {
        PlotKind::Characteristic => characteristic_table(&args)?,
        PlotKind::EtaSweep => sweep_table(&args)?,
    };
    let csv = to_csv(&table);
    match &args.output {
        Some(path) => write(path, &csv)?,
        None => print!("{}", String::from_utf8(csv).expect("CSV is UTF-8")),
    }
    if let Some(path) = &args.svg {
        let (title, x_label, y_label, series) = match args.kind {
            PlotKind::Characteristic => (format!("characteristic of {}", args.function), "r", "T(r)", "T"),
            PlotKind::EtaSweep => (
                format!("quotient proximity of {} at r = {}", args.function, args.r),
                "k (eta = alpha1 / 2^k)",
                "forward + reverse",
                "m sum",
            ),
        };
        let chart = LineChart {
            title: &title,
            x_label,
            y_label,
            series_label: series,
            points: table.rows.iter().map(|row| (row[table.chart_x], row[table.chart_y])).collect(),
            log_x: table.log_x,
        };
        write(path, chart.render().as_bytes())?;
    }
    Ok(())
}
