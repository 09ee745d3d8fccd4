mod oracles;

use nevlab::complex::ComplexPoint;
use nevlab::corpus::Corpus;
use nevlab::difference::{
    integrated_common_counting, quotient_proximity, shifted_counting, smt_remainder, tilde_counting, StepSpec,
    ValueTarget,
};
use nevlab::model::{FunctionModel, ModelKind};
use nevlab::nevanlinna::{counting, Target, DEFAULT_TOL};
use oracles::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TARGETS: [Option<(f64, f64)>; 4] = [None, Some((0.0, 0.0)), Some((1.0, 0.0)), Some((0.0, 1.0))];

fn value_target(a: Option<(f64, f64)>) -> ValueTarget {
    match a {
        None => ValueTarget::Infinity,
        Some((x, y)) => ValueTarget::Finite(ComplexPoint::new(x, y)),
    }
}

/// Rational members whose difference does not vanish identically.
fn rational_members() -> Vec<(String, Rational, FunctionModel)> {
    Corpus::reference()
        .members()
        .iter()
        .filter(|m| m.entry.kind == ModelKind::Rational && m.id() != "const-2")
        .map(|m| (m.id().to_string(), Rational::from_params(&m.entry.params), m.model.clone()))
        .collect()
}

fn random_steps(rng: &mut impl Rng, count: usize) -> Vec<ComplexPoint> {
    (0..count)
        .map(|_| {
            let modulus = 10f64.powf(rng.gen_range(-5.0..-0.5));
            ComplexPoint::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

#[test]
fn remainder_matches_rational_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (id, oracle, f) in rational_members() {
        for eta in random_steps(&mut rng, 8) {
            let step = StepSpec::vanishing(eta).unwrap();
            for r in [4.0, 6.0] {
                let got = smt_remainder(&f, &step, r).unwrap().value;
                let want = oracle.smt_remainder(eta, r);
                assert!((got - want).abs() < 1e-6, "{id} eta={eta} r={r}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn tilde_counting_matches_rational_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (id, oracle, f) in rational_members() {
        for eta in random_steps(&mut rng, 5) {
            let step = StepSpec::vanishing(eta).unwrap();
            for r in [4.0, 6.0] {
                for a in TARGETS {
                    let got = tilde_counting(&f, &step, r, &value_target(a)).unwrap();
                    let want = oracle.tilde_counting(eta, r, a.map(|(x, y)| oracles::c(x, y)));
                    assert!((got.raw - want).abs() < 1e-6, "{id} a={a:?} eta={eta} r={r}: {} vs {want}", got.raw);
                }
            }
        }
    }
}

#[test]
fn common_counting_is_bounded_and_splits_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (id, _, f) in rational_members() {
        for eta in random_steps(&mut rng, 4) {
            let step = StepSpec::vanishing(eta).unwrap();
            let diff = f.difference(eta).unwrap();
            for r in [0.5, 4.0, 9.0] {
                for a in TARGETS {
                    let target = value_target(a);
                    let t = tilde_counting(&f, &step, r, &target).unwrap();
                    let common = integrated_common_counting(&f, &step, r, &target).unwrap().value;
                    assert!((t.raw + t.common - t.full).abs() < 1e-12);
                    assert!((t.common - common).abs() < 1e-12);
                    if r >= 1.0 {
                        assert!(common >= 0.0, "{id}");
                        let value_points = match a {
                            None => counting(&f, r, Target::Poles).unwrap().value,
                            Some(_) => t.full,
                        };
                        let diff_term = match a {
                            None => counting(&f.reciprocal().unwrap().difference(eta).unwrap(), r, Target::Zeros)
                                .unwrap()
                                .value,
                            Some(_) => counting(&diff, r, Target::Zeros).unwrap().value,
                        };
                        assert!(common <= value_points.min(diff_term) + 1e-12, "{id} a={a:?} r={r}");
                    }
                }
            }
        }
    }
}

#[test]
fn common_zeros_take_minimum_multiplicity() {
    // f = z^2 (z - 1) and f(z+1) - f(z) = z (3z + 1): the double zero at 0
    // meets a simple zero of the difference
    let f = FunctionModel::build_rational(
        &nevlab::poly::PolynomialCoeffs::from_real(&[0.0, 0.0, -1.0, 1.0]),
        &nevlab::poly::PolynomialCoeffs::from_real(&[1.0]),
        f64::INFINITY,
    )
    .unwrap();
    let step = StepSpec::fixed(ComplexPoint::new(1.0, 0.0)).unwrap();
    let target = ValueTarget::Finite(ComplexPoint::new(0.0, 0.0));
    let r = 2.0f64;
    let common = integrated_common_counting(&f, &step, r, &target).unwrap().value;
    // one shared point at the origin: N = log r
    assert!((common - r.ln()).abs() < 1e-12, "{common}");
}

#[test]
fn forward_and_reverse_swap_under_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for m in Corpus::reference().members() {
        for eta in random_steps(&mut rng, 2) {
            let step = StepSpec::vanishing(eta).unwrap();
            let back = StepSpec::vanishing(-eta).unwrap();
            let shifted = m.model.shift(eta).unwrap();
            for r in [2.0, 5.0] {
                let q = quotient_proximity(&m.model, &step, r, DEFAULT_TOL).unwrap();
                let p = quotient_proximity(&shifted, &back, r, DEFAULT_TOL).unwrap();
                assert!(
                    (q.forward.value - p.reverse.value).abs() <= 2.0 * DEFAULT_TOL,
                    "{} eta={eta} r={r}: {} vs {}",
                    m.id(),
                    q.forward.value,
                    p.reverse.value
                );
            }
        }
    }
}

#[test]
fn shifted_counting_converges_to_counting() {
    for m in Corpus::reference().members() {
        let Some(poles) = m.model.poles() else { continue };
        // a pole at the origin moves to -eta and contributes log(1/|eta|)
        if poles.at_origin() > 0 {
            continue;
        }
        for r in [2.5, 7.5] {
            // each pole of multiplicity k at distance ~1 moves N by about k |eta|
            let weight = poles.pairs().iter().filter(|p| p.0.norm() <= r + 1.0).map(|p| p.1).sum::<u32>().max(1);
            let mut previous = f64::INFINITY;
            for k in [10, 15, 20] {
                let step = StepSpec::vanishing(ComplexPoint::new(2f64.powi(-k), 0.0)).unwrap();
                let shifted = shifted_counting(&m.model, &step, r).unwrap().value;
                let base = counting(&m.model, r, Target::Poles).unwrap().value;
                let gap = (shifted - base).abs();
                assert!(gap <= previous + 1e-12, "{} r={r} k={k}", m.id());
                previous = gap;
            }
            assert!(previous < 1e-6 * weight as f64, "{} r={r}: {previous}", m.id());
        }
    }
}

#[test]
fn quotient_proximity_vanishes_along_halvings() {
    for m in Corpus::reference().members() {
        let r = 5.0;
        let first = quotient_proximity(&m.model, &StepSpec::vanishing(ComplexPoint::new(0.05, 0.0)).unwrap(), r, DEFAULT_TOL)
            .unwrap()
            .sum();
        let last = quotient_proximity(&m.model, &StepSpec::vanishing(ComplexPoint::new(0.05 / 4096.0, 0.0)).unwrap(), r, DEFAULT_TOL)
            .unwrap()
            .sum();
        assert!(last <= first + 1e-9 && last < 0.02, "{}: {first} -> {last}", m.id());
    }
}
