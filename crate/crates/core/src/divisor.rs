//! Finite zero/pole divisors with a completeness radius.

use serde::{Deserialize, Serialize};

use crate::complex::{ensure_finite, ComplexPoint};
use crate::error::{invalid, Result};

/// Relative merge tolerance: entries closer than `1e-9 * max(1, |z|)` are the
/// same point.
pub const MERGE_REL_TOL: f64 = 1e-9;

/// Looser tolerance for matching roots produced by separate numeric solves.
pub const MATCH_REL_TOL: f64 = 1e-6;

pub fn merge_tolerance(z: ComplexPoint) -> f64 {
    MERGE_REL_TOL * z.norm().max(1.0)
}

pub fn match_tolerance(z: ComplexPoint) -> f64 {
    MATCH_REL_TOL * z.norm().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorEntry {
    pub location: ComplexPoint,
    pub multiplicity: u32,
}

/// Zeros or poles of a model, listed completely inside `|z| <= extent`.
///
/// Entries are sorted by nondecreasing modulus and no two entries lie within
/// the merge tolerance of each other.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    entries: Vec<DivisorEntry>,
    extent: f64,
}

impl Divisor {
    pub fn empty(extent: f64) -> Divisor {
        Divisor {
            entries: Vec::new(),
            extent,
        }
    }

    /// Strict constructor: every entry must lie inside the extent.
    pub fn new(entries: impl IntoIterator<Item = (ComplexPoint, u32)>, extent: f64) -> Result<Divisor> {
        let entries: Vec<(ComplexPoint, u32)> = entries.into_iter().collect();
        if let Some((z, _)) = entries.iter().find(|(z, _)| z.norm() > extent) {
            return invalid(format!("divisor entry {z} lies beyond extent {extent}"));
        }
        Divisor::truncated(entries, extent)
    }

    /// Keeps only entries inside the extent, then sorts and merges.
    pub fn truncated(entries: impl IntoIterator<Item = (ComplexPoint, u32)>, extent: f64) -> Result<Divisor> {
        if extent.is_nan() || extent <= 0.0 {
            return invalid(format!("divisor extent must be positive, got {extent}"));
        }
        let mut raw = Vec::new();
        for (z, m) in entries {
            ensure_finite(z, "divisor location")?;
            if m == 0 {
                return invalid("divisor multiplicities must be positive");
            }
            if z.norm() <= extent {
                raw.push(DivisorEntry {
                    location: z,
                    multiplicity: m,
                });
            }
        }
        Ok(Divisor {
            entries: merge_sorted(raw),
            extent,
        })
    }

    pub fn entries(&self) -> &[DivisorEntry] {
        &self.entries
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    pub fn pairs(&self) -> Vec<(ComplexPoint, u32)> {
        self.entries.iter().map(|e| (e.location, e.multiplicity)).collect()
    }

    /// Multiplicity at the origin.
    pub fn at_origin(&self) -> u32 {
        self.entries
            .iter()
            .take_while(|e| e.location.norm() <= merge_tolerance(e.location))
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Points `z - c` for every entry; the extent shrinks by `|c|`.
    pub fn translated(&self, c: ComplexPoint) -> Result<Divisor> {
        let extent = self.extent - c.norm();
        if extent <= 0.0 {
            return invalid(format!(
                "shift by {c} exhausts divisor extent {}",
                self.extent
            ));
        }
        Divisor::truncated(
            self.entries.iter().map(|e| (e.location - c, e.multiplicity)),
            extent,
        )
    }

    /// Sum of two divisors; extent is the smaller one.
    pub fn union(&self, other: &Divisor) -> Divisor {
        let extent = self.extent.min(other.extent);
        let all = self
            .entries
            .iter()
            .chain(other.entries.iter())
            .filter(|e| e.location.norm() <= extent)
            .copied()
            .collect();
        Divisor {
            entries: merge_sorted(all),
            extent,
        }
    }

    pub fn with_extent(&self, extent: f64) -> Divisor {
        let extent = extent.min(self.extent);
        Divisor {
            entries: self
                .entries
                .iter()
                .filter(|e| e.location.norm() <= extent)
                .copied()
                .collect(),
            extent,
        }
    }

    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.location.norm())
    }
}

fn merge_sorted(mut raw: Vec<DivisorEntry>) -> Vec<DivisorEntry> {
    raw.sort_by(|a, b| {
        a.location
            .norm()
            .total_cmp(&b.location.norm())
            .then(a.location.re.total_cmp(&b.location.re))
            .then(a.location.im.total_cmp(&b.location.im))
    });
    let mut out: Vec<DivisorEntry> = Vec::with_capacity(raw.len());
    for e in raw {
        let r = e.location.norm();
        let tol = merge_tolerance(e.location);
        // candidates for merging have modulus within tol of r
        let hit = out
            .iter_mut()
            .rev()
            .take_while(|o| r - o.location.norm() <= tol)
            .find(|o| (o.location - e.location).norm() <= tol);
        match hit {
            Some(o) => o.multiplicity += e.multiplicity,
            None => out.push(e),
        }
    }
    out
}

/// Removes the common part of two point lists at minimum multiplicity. Points
/// match within `rel * max(1, |z|)`. Returns the reduced lists.
pub fn cancel_common(
    zeros: &[(ComplexPoint, u32)],
    poles: &[(ComplexPoint, u32)],
    rel: f64,
) -> (Vec<(ComplexPoint, u32)>, Vec<(ComplexPoint, u32)>) {
    let mut z: Vec<(ComplexPoint, u32)> = zeros.to_vec();
    let mut p: Vec<(ComplexPoint, u32)> = poles.to_vec();
    for zi in z.iter_mut() {
        for pj in p.iter_mut() {
            if zi.1 == 0 {
                break;
            }
            if pj.1 > 0 && (zi.0 - pj.0).norm() <= rel * zi.0.norm().max(1.0) {
                let k = zi.1.min(pj.1);
                zi.1 -= k;
                pj.1 -= k;
            }
        }
    }
    z.retain(|e| e.1 > 0);
    p.retain(|e| e.1 > 0);
    (z, p)
}

/// Points shared by two divisors with the minimum of their multiplicities.
/// Each entry of `b` is consumed at most once (nearest match wins).
pub fn common_points(a: &Divisor, b: &Divisor) -> Divisor {
    let mut remaining: Vec<DivisorEntry> = b.entries.clone();
    let mut out = Vec::new();
    for e in &a.entries {
        let tol = match_tolerance(e.location);
        let best = remaining
            .iter()
            .enumerate()
            .filter(|(_, o)| o.multiplicity > 0 && (o.location - e.location).norm() <= tol)
            .min_by(|x, y| {
                (x.1.location - e.location)
                    .norm()
                    .total_cmp(&(y.1.location - e.location).norm())
            })
            .map(|(i, _)| i);
        if let Some(i) = best {
            let m = e.multiplicity.min(remaining[i].multiplicity);
            remaining[i].multiplicity = 0;
            out.push(DivisorEntry {
                location: e.location,
                multiplicity: m,
            });
        }
    }
    Divisor {
        entries: merge_sorted(out),
        extent: a.extent.min(b.extent),
    }
}
