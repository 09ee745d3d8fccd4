//! All-roots polynomial solver: Aberth simultaneous iteration, a Newton
//! correction per root, then clustering of numerically repeated roots.

use std::f64::consts::TAU;

use crate::complex::ComplexPoint;
use crate::error::{NevError, Result};
use crate::poly::PolynomialCoeffs;

pub const MAX_ITERATIONS: usize = 800;

/// Roots closer than `CLUSTER_REL_TOL * max(1, |z|)` are reported as one root
/// with multiplicity. Double roots come out of the iteration accurate to about
/// `sqrt(eps)`, so this must sit well above that.
pub const CLUSTER_REL_TOL: f64 = 1e-6;

pub fn cluster_tolerance(z: ComplexPoint) -> f64 {
    CLUSTER_REL_TOL * z.norm().max(1.0)
}

/// Roots of `p` with multiplicities, sorted by modulus.
pub fn find_roots(p: &PolynomialCoeffs) -> Result<Vec<(ComplexPoint, u32)>> {
    let Some(_) = p.degree() else {
        return Err(NevError::InvalidInput(
            "the zero polynomial has no isolated roots".into(),
        ));
    };
    let coeffs = p.coeffs();
    let zero_mult = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = PolynomialCoeffs::new(coeffs[zero_mult..].to_vec())?;
    let mut roots: Vec<ComplexPoint> = match reduced.degree().unwrap_or(0) {
        0 => Vec::new(),
        1 => vec![-reduced.coeffs()[0] / reduced.coeffs()[1]],
        _ => aberth(&reduced)?,
    };
    roots.extend(std::iter::repeat(ComplexPoint::new(0.0, 0.0)).take(zero_mult));
    Ok(cluster(roots))
}

fn initial_guesses(p: &PolynomialCoeffs) -> Vec<ComplexPoint> {
    let c = p.coeffs();
    let n = c.len() - 1;
    let lead = c[n].norm();
    // geometric mean of the roots' moduli, capped by the Cauchy bound
    let mean_radius = (c[0].norm() / lead).powf(1.0 / n as f64);
    let cauchy = 1.0 + c[..n].iter().map(|x| x.norm() / lead).fold(0.0, f64::max);
    let radius = if mean_radius.is_finite() && mean_radius > 0.0 {
        mean_radius.min(cauchy)
    } else {
        1.0
    };
    (0..n)
        .map(|k| ComplexPoint::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
        .collect()
}

fn aberth(p: &PolynomialCoeffs) -> Result<Vec<ComplexPoint>> {
    let n = p.degree().unwrap();
    let mut z = initial_guesses(p);
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: ComplexPoint = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        ComplexPoint::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (ComplexPoint::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                // derivative vanished; nudge off the critical point
                let bump = z[i].norm().max(1.0) * 1e-8;
                z[i] += ComplexPoint::new(bump, bump);
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    // one Newton correction per root, kept only if the residual improves
    for zi in z.iter_mut() {
        let (v, dv) = p.eval_with_derivative(*zi);
        if dv.norm() > 0.0 {
            let candidate = *zi - v / dv;
            if p.eval(candidate).norm() < v.norm() {
                *zi = candidate;
            }
        }
    }
    for zi in &z {
        let residual = p.eval(*zi).norm();
        let scale = p.abs_eval(*zi);
        if !(zi.re.is_finite() && zi.im.is_finite()) || residual > 1e-6 * scale.max(f64::MIN_POSITIVE) {
            return Err(NevError::NumericFailure(format!(
                "root iteration did not converge (residual {residual:e} at {zi})"
            )));
        }
    }
    Ok(z)
}

/// Groups nearby roots; each cluster is replaced by its centroid.
fn cluster(mut roots: Vec<ComplexPoint>) -> Vec<(ComplexPoint, u32)> {
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut groups: Vec<Vec<ComplexPoint>> = Vec::new();
    for z in roots {
        let found = groups.iter_mut().find(|g| {
            let centre = centroid(g);
            (centre - z).norm() <= cluster_tolerance(centre)
        });
        match found {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    let mut out: Vec<(ComplexPoint, u32)> = groups
        .iter()
        .map(|g| (centroid(g), g.len() as u32))
        .collect();
    out.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    out
}

fn centroid(points: &[ComplexPoint]) -> ComplexPoint {
    points.iter().sum::<ComplexPoint>() / points.len() as f64
}
