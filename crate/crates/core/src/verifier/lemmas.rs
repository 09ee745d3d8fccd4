//! Randomized checks of the auxiliary inequalities: power sums, Jensen,
//! the circle integral of `|z - w|^-alpha`, the logarithmic derivative
//! bound, `log(1+x) <= C_alpha x^alpha`, the log-ratio inequality and the
//! reciprocal-distance sum bound.
//!
//! Scalar fuzzers keep only the worst sample and up to
//! [`MAX_STORED_VIOLATIONS`] violating samples; counts go to `parameters`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use super::report::CheckReport;
use super::support::{apply_policy, run};
use super::{task_rng, RunConfig};
use crate::complex::ComplexPoint;
use crate::corpus::Corpus;
use crate::error::Result;
use crate::model::FunctionModel;
use crate::nevanlinna::{characteristic, RadiusGrid};
use crate::quadrature::{circle_mean, integrate_adaptive};
use crate::thresholds::c_alpha;

pub const LEMMA_SLACK: f64 = 1e-9;
pub const MAX_STORED_VIOLATIONS: usize = 100;
/// Exponents `k / ALPHA_GRID` for `k = 1..=ALPHA_GRID` with tabulated `C_alpha`.
pub const ALPHA_GRID: usize = 100;
/// Random positive functions for the Jensen check.
pub const JENSEN_SAMPLES: usize = 1000;
/// The exponent `alpha > 1` of the reciprocal-distance sum bound.
pub const DISTANCE_SUM_ALPHA: f64 = 2.0;

const CHECK_ID: &str = "check_lemmas";

struct Fuzz {
    report: CheckReport,
    count: usize,
    violations: usize,
    worst: Option<(Json, f64, f64)>,
    worst_margin: f64,
}

impl Fuzz {
    fn new(lemma: &str, anchor: &str, function_id: &str) -> Fuzz {
        let mut report = CheckReport::new(CHECK_ID, anchor, function_id, LEMMA_SLACK);
        report.param("lemma", lemma);
        Fuzz {
            report,
            count: 0,
            violations: 0,
            worst: None,
            worst_margin: f64::INFINITY,
        }
    }

    fn add(&mut self, inputs: Json, lhs: f64, rhs: f64) {
        self.count += 1;
        let margin = rhs + LEMMA_SLACK - lhs;
        let holds = margin >= 0.0;
        if !holds {
            self.violations += 1;
            if self.violations <= MAX_STORED_VIOLATIONS {
                self.report.push(inputs.clone(), lhs, rhs);
            }
        }
        // violations are stored above; track the tightest passing sample
        if holds && margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst = Some((inputs, lhs, rhs));
        }
    }

    fn finish(mut self) -> CheckReport {
        if let Some((inputs, lhs, rhs)) = self.worst.take() {
            self.report.push(inputs, lhs, rhs);
        }
        self.report.param("sample_count", self.count);
        self.report.param("violations", self.violations);
        self.report.finish()
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ComplexPoint {
    ComplexPoint::from_polar(log_uniform(rng, lo, hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `(sum x)^alpha <= sum x^alpha` for nonnegative tuples, `0 < alpha < 1`.
fn power_sum(rng: &mut ChaCha8Rng, samples: usize) -> CheckReport {
    let mut fuzz = Fuzz::new("power-sum subadditivity", "(sum x_k)^alpha <= sum x_k^alpha for 0 < alpha < 1", "synthetic");
    fuzz.add(json!({"x": [1.0, 1.0], "alpha": 0.5}), 2f64.sqrt(), 2.0);
    for _ in 1..samples {
        let alpha = rng.gen_range(1e-3..1.0);
        let n = rng.gen_range(1..=10);
        let xs: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..10.0) })
            .collect();
        let lhs = xs.iter().sum::<f64>().powf(alpha);
        let rhs: f64 = xs.iter().map(|x| x.powf(alpha)).sum();
        fuzz.add(json!({"x": xs, "alpha": alpha}), lhs, rhs);
    }
    fuzz.finish()
}

/// Mean of `log phi` is at most `log` of the mean of `phi`, for random
/// positive piecewise-smooth `phi`.
fn jensen(rng: &mut ChaCha8Rng, samples: usize) -> CheckReport {
    let mut fuzz = Fuzz::new(
        "Jensen for the logarithm",
        "mean of log phi is at most log of the mean of phi",
        "synthetic",
    );
    let params: Vec<[f64; 9]> = (0..samples)
        .map(|_| {
            let a = rng.gen_range(-5.0..5.0);
            let b = a + rng.gen_range(0.1..10.0);
            [
                a,
                b,
                rng.gen_range(1e-3..1.0),  // floor
                rng.gen_range(0.0..5.0),   // kink weight
                rng.gen_range(0.5..3.0),   // kink power
                rng.gen_range(a..b),       // kink location
                rng.gen_range(-3.0..3.0),  // oscillation amplitude
                rng.gen_range(0.5..10.0),  // frequency
                rng.gen_range(0.0..std::f64::consts::TAU),
            ]
        })
        .collect();
    let results: Vec<Result<(f64, f64)>> = params
        .par_iter()
        .map(|p| {
            let phi = |x: f64| p[2] + p[3] * (x - p[5]).abs().powf(p[4]) + (p[6] * (p[7] * x + p[8]).sin()).exp();
            let len = p[1] - p[0];
            let tol = 1e-10 * len;
            let log_mean = integrate_adaptive(|x| phi(x).ln(), p[0], p[1], &[p[5]], tol, 400_000)?.value / len;
            let mean = integrate_adaptive(phi, p[0], p[1], &[p[5]], tol, 400_000)?.value / len;
            Ok((log_mean, mean.ln()))
        })
        .collect();
    for (p, res) in params.iter().zip(results) {
        match res {
            Ok((lhs, rhs)) => fuzz.add(json!({"phi": p}), lhs, rhs),
            Err(e) => fuzz.add(json!({"phi": p, "error": e.to_string()}), f64::NAN, 0.0),
        }
    }
    fuzz.finish()
}

/// `(1/2pi) int |r e^{it} - w|^-alpha dt <= 1/((1-alpha) r^alpha)`.
fn circle_power_integral(rng: &mut ChaCha8Rng, samples: usize) -> CheckReport {
    let mut fuzz = Fuzz::new(
        "circle integral of an inverse power distance",
        "mean of |r e^{it} - w|^-alpha over the circle is at most 1/((1-alpha) r^alpha)",
        "synthetic",
    );
    let params: Vec<(f64, f64, ComplexPoint)> = (0..samples)
        .map(|k| {
            let r = log_uniform(rng, 0.1, 10.0);
            let alpha = rng.gen_range(0.01..0.95);
            // every tenth sample is centred, where the mean equals r^-alpha
            let w = if k % 10 == 0 {
                ComplexPoint::new(0.0, 0.0)
            } else {
                ComplexPoint::from_polar(r * rng.gen_range(0.0..3.0), rng.gen_range(0.0..std::f64::consts::TAU))
            };
            (r, alpha, w)
        })
        .collect();
    let results: Vec<Result<f64>> = params
        .par_iter()
        .map(|&(r, alpha, w)| {
            let bound = 1.0 / ((1.0 - alpha) * r.powf(alpha));
            let cut = [w.arg().rem_euclid(std::f64::consts::TAU)];
            circle_mean(
                |t| (ComplexPoint::from_polar(r, t) - w).norm().powf(-alpha),
                if w.norm() > 0.0 { &cut } else { &[] },
                1e-10 * bound,
                400_000,
            )
            .map(|q| q.value)
        })
        .collect();
    for (&(r, alpha, w), res) in params.iter().zip(results) {
        let rhs = 1.0 / ((1.0 - alpha) * r.powf(alpha));
        let inputs = json!({"r": r, "alpha": alpha, "w": [w.re, w.im]});
        match res {
            Ok(lhs) => fuzz.add(inputs, lhs, rhs),
            Err(e) => {
                let mut inputs = inputs;
                inputs["error"] = json!(e.to_string());
                fuzz.add(inputs, f64::NAN, rhs);
            }
        }
    }
    fuzz.finish()
}

fn alpha_table() -> Result<Vec<(f64, f64)>> {
    (1..=ALPHA_GRID)
        .map(|k| {
            let a = k as f64 / ALPHA_GRID as f64;
            c_alpha(a).map(|c| (a, c))
        })
        .collect()
}

/// `log(1+x) <= C_alpha x^alpha` on a grid of exponents, with `C_1 = 1`.
fn log_power(rng: &mut ChaCha8Rng, samples: usize, table: &[(f64, f64)]) -> CheckReport {
    let mut fuzz = Fuzz::new(
        "logarithm below a power",
        "log(1+x) <= C_alpha x^alpha with C_1 = 1",
        "synthetic",
    );
    let unit = c_alpha(1.0).unwrap_or(f64::NAN);
    fuzz.add(json!({"kind": "unit-constant"}), (unit - 1.0).abs(), 0.0);
    let per_alpha = samples.div_ceil(table.len()).max(1);
    for &(alpha, c) in table {
        for _ in 0..per_alpha {
            let x = log_uniform(rng, 1e-8, 1e8);
            // ratio form keeps the comparison scale-free
            fuzz.add(json!({"x": x, "alpha": alpha, "c_alpha": c}), x.ln_1p() / x.powf(alpha), c);
        }
    }
    fuzz.report.param("alpha_table", table);
    fuzz.finish()
}

/// `|log|z1/z2|| <= C_alpha (|(z1-z2)/z2|^alpha + |(z2-z1)/z1|^alpha)`.
fn log_ratio(rng: &mut ChaCha8Rng, samples: usize, table: &[(f64, f64)]) -> CheckReport {
    let mut fuzz = Fuzz::new(
        "log-ratio estimate",
        "|log|z1/z2|| <= C_alpha (|(z1-z2)/z2|^alpha + |(z2-z1)/z1|^alpha) for points not both zero",
        "synthetic",
    );
    let z = ComplexPoint::new(1.5, -0.5);
    fuzz.add(json!({"kind": "identical", "z1": [z.re, z.im], "z2": [z.re, z.im], "alpha": 0.5}), 0.0, 0.0);
    for k in 1..samples {
        let (alpha, c) = table[rng.gen_range(0..table.len())];
        let z1 = random_point(rng, 1e-3, 1e3);
        let z2 = match k % 10 {
            0 => z1,
            1 => z1 * (ComplexPoint::new(1.0, 0.0) + random_point(rng, 1e-9, 1e-1)),
            _ => random_point(rng, 1e-3, 1e3),
        };
        let lhs = (z1.norm() / z2.norm()).ln().abs();
        let rhs = c * (((z1 - z2) / z2).norm().powf(alpha) + ((z2 - z1) / z1).norm().powf(alpha));
        fuzz.add(json!({"z1": [z1.re, z1.im], "z2": [z2.re, z2.im], "alpha": alpha}), lhs, rhs);
    }
    fuzz.finish()
}

/// Pointwise logarithmic derivative bound at random points of random
/// circles, for a rational model.
fn log_derivative(
    function_id: &str,
    f: &FunctionModel,
    rng: &mut ChaCha8Rng,
    points: usize,
    tol: f64,
) -> CheckReport {
    let mut fuzz = Fuzz::new(
        "logarithmic derivative bound",
        "|f'/f| <= 8R/(R-r)^2 (T(R,f) + T(R,1/f)) + sum 2/|z-a| + sum 2/|z-b| over zeros and poles in |z| < R",
        function_id,
    );
    let Some((_, zeros, poles)) = f.rational_parts() else {
        return fuzz.finish();
    };
    let mut inner = || -> Result<()> {
        let recip = f.reciprocal()?;
        let per_circle = 20;
        let circles = points.div_ceil(per_circle);
        for _ in 0..circles {
            let r = log_uniform(rng, 0.5, 20.0);
            let big_r = r * rng.gen_range(1.1..4.0);
            let t_sum = characteristic(f, big_r, tol)?.value + characteristic(&recip, big_r, tol)?.value;
            let lead = 8.0 * big_r / (big_r - r).powi(2) * t_sum;
            for _ in 0..per_circle {
                let z = ComplexPoint::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
                let dist = |p: &(ComplexPoint, u32)| (z - p.0).norm();
                if zeros.iter().chain(&poles).any(|p| dist(p) < 1e-9) {
                    continue;
                }
                let logder: ComplexPoint = zeros.iter().map(|&(a, m)| m as f64 / (z - a)).sum::<ComplexPoint>()
                    - poles.iter().map(|&(b, m)| m as f64 / (z - b)).sum::<ComplexPoint>();
                let near: f64 = zeros
                    .iter()
                    .chain(&poles)
                    .filter(|p| p.0.norm() < big_r)
                    .map(|p| 2.0 * p.1 as f64 / dist(p))
                    .sum();
                fuzz.add(json!({"z": [z.re, z.im], "R": big_r, "t_sum": t_sum}), logder.norm(), lead + near);
            }
        }
        Ok(())
    };
    match inner() {
        Ok(()) => {
            fuzz.report.param("multiplicity", "zeros and poles counted with multiplicity");
            fuzz.finish()
        }
        Err(e) => fuzz.finish().absorb(e),
    }
}

/// Reciprocal-distance sums against
/// `alpha^2 n(alpha^2 r)/r log^alpha r log n(alpha^2 r)` on a radius grid,
/// reporting the log measure of violating radii.
fn distance_sum(
    family: &str,
    points: &[ComplexPoint],
    grid: &RadiusGrid,
    angles: usize,
    config: &RunConfig,
) -> CheckReport {
    let report = CheckReport::new(
        CHECK_ID,
        "sum of 1/|z - z_k| over |z_k| <= alpha r is bounded outside a set of finite logarithmic measure",
        family,
        0.0,
    );
    run(report, |report| {
        let alpha = DISTANCE_SUM_ALPHA;
        report.param("lemma", "reciprocal distance sum");
        report.param("alpha", alpha);
        report.param("angles", angles);
        let mut sorted: Vec<(f64, ComplexPoint)> = points.iter().map(|p| (p.norm(), *p)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n_within = |t: f64| sorted.partition_point(|p| p.0 <= t);
        let radii = grid.radii();
        let rows: Vec<(f64, f64)> = radii
            .par_iter()
            .map(|&r| {
                let near = &sorted[..n_within(alpha * r)];
                // the sup over the circle is sampled; real-axis families peak at angle 0
                let lhs = (0..angles)
                    .map(|j| {
                        let z = ComplexPoint::from_polar(r, std::f64::consts::TAU * j as f64 / angles as f64);
                        near.iter().map(|p| 1.0 / (z - p.1).norm()).sum::<f64>()
                    })
                    .fold(0.0, f64::max);
                let n = n_within(alpha * alpha * r) as f64;
                let rhs = alpha * alpha * n / r * r.ln().powf(alpha) * n.ln();
                (lhs, rhs)
            })
            .collect();
        let mut indices = Vec::new();
        for (&r, &(lhs, rhs)) in radii.iter().zip(&rows) {
            report.push(json!({"r": r}), lhs, rhs);
            indices.push(report.samples.len() - 1);
        }
        apply_policy(report, "violations", &indices, grid, &config.policy);
        Ok(())
    })
}

fn integer_points(limit: usize) -> Vec<ComplexPoint> {
    (1..=limit).map(|k| ComplexPoint::new(k as f64, 0.0)).collect()
}

fn lattice_points(radius: f64) -> Vec<ComplexPoint> {
    let m = radius.floor() as i64;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            let z = ComplexPoint::new(a as f64, b as f64);
            if (a, b) != (0, 0) && z.norm() <= radius {
                out.push(z);
            }
        }
    }
    out
}

/// Runs every lemma check. The logarithmic derivative bound runs on each
/// rational corpus member; the others are corpus-independent.
pub fn check_lemmas(corpus: &Corpus, config: &RunConfig) -> Vec<CheckReport> {
    let n = config.lemma_samples.max(1);
    let mut out = Vec::new();
    out.push(power_sum(&mut task_rng(config.seed, CHECK_ID, "power-sum"), n));
    out.push(jensen(&mut task_rng(config.seed, CHECK_ID, "jensen"), JENSEN_SAMPLES.min(n)));
    out.push(circle_power_integral(&mut task_rng(config.seed, CHECK_ID, "circle-power"), n));
    match alpha_table() {
        Ok(table) => {
            out.push(log_power(&mut task_rng(config.seed, CHECK_ID, "log-power"), n, &table));
            out.push(log_ratio(&mut task_rng(config.seed, CHECK_ID, "log-ratio"), n, &table));
        }
        Err(e) => out.push(CheckReport::new(CHECK_ID, "C_alpha table", "synthetic", 0.0).absorb(e)),
    }
    for m in corpus.members().iter().filter(|m| m.model.is_rational()) {
        let mut rng = task_rng(config.seed, CHECK_ID, m.id());
        out.push(log_derivative(m.id(), &m.model, &mut rng, config.lemma_circle_points, config.tol));
    }
    let e = std::f64::consts::E;
    let alpha2 = DISTANCE_SUM_ALPHA * DISTANCE_SUM_ALPHA;
    let int_grid = RadiusGrid::spanning(e, 100.0, 200).expect("valid grid");
    out.push(distance_sum("integer-points", &integer_points((alpha2 * 100.0) as usize + 1), &int_grid, 1, config));
    let lat_grid = RadiusGrid::spanning(e, 20.0, 60).expect("valid grid");
    out.push(distance_sum("gaussian-lattice", &lattice_points(alpha2 * 20.0 + 1.0), &lat_grid, 360, config));
    out
}
