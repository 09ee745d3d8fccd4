//! `nevlab compute`.

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use nevlab::complex::{format_complex, parse_complex};
use nevlab::difference::{quotient_proximity, shifted_counting, smt_remainder, tilde_counting, StepSpec, ValueTarget};
use nevlab::model::FunctionModel;
use nevlab::nevanlinna::{characteristic, count_points, counting, proximity, NevanlinnaValue, Target, DEFAULT_TOL};
use nevlab::thresholds::{alpha1, alpha2, beta, ThresholdValue};

use crate::args::resolve_function;
use crate::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Functional {
    /// Proximity `m(r, g)`.
    #[value(name = "m")]
    Proximity,
    /// Integrated counting function `N(r, g)` of poles.
    #[value(name = "N")]
    Counting,
    /// Characteristic `T(r, g)`.
    #[value(name = "T")]
    Characteristic,
    /// Pole count `n(r, g)` with multiplicity.
    #[value(name = "n")]
    Count,
    /// `min{log^{-1/2} r, 1/n(r+1)^2}`
    #[value(name = "alpha1")]
    Alpha1,
    /// `min{r, log^{-1/2} r, h/2, 1/sum 1/|b|}`
    #[value(name = "alpha2")]
    Alpha2,
    /// `min{alpha1, alpha2}`
    #[value(name = "beta")]
    Beta,
    /// Forward plus reverse quotient proximity; needs `--eta`.
    #[value(name = "S")]
    QuotientProximity,
    /// `N(r, f(z+eta))`; needs `--eta`.
    #[value(name = "N-shift")]
    ShiftedCounting,
    /// Non-shared counting of `a`-points; needs `--eta`.
    #[value(name = "N-tilde")]
    TildeCounting,
    /// `2N(r,f) - N(r,Δf) + N(r,1/Δf)`; needs `--eta`.
    #[value(name = "remainder")]
    Remainder,
}

#[derive(Args)]
pub struct ComputeArgs {
    /// Functional to evaluate.
    pub functional: Functional,
    /// Reference function id or a corpus file with one entry.
    #[arg(long)]
    pub function: String,
    /// Radius.
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    /// Step as `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Value `a+bi` or `inf`. For m, N, T and n the functional is taken of
    /// `1/(f-a)`; for N-tilde it names the counted value.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

struct Computed {
    value: f64,
    error_estimate: f64,
    extra: Vec<(&'static str, Value)>,
}

impl From<NevanlinnaValue> for Computed {
    fn from(v: NevanlinnaValue) -> Self {
        Computed {
            value: v.value,
            error_estimate: v.abs_error_estimate,
            extra: vec![("radius_used", json!(v.radius))],
        }
    }
}

impl From<ThresholdValue> for Computed {
    fn from(v: ThresholdValue) -> Self {
        Computed {
            value: v.value,
            error_estimate: 0.0,
            extra: vec![("binding_term", json!(v.binding_term))],
        }
    }
}

fn target_model(f: &FunctionModel, a: &ValueTarget) -> Result<FunctionModel, Failure> {
    match a {
        ValueTarget::Infinity => Ok(f.clone()),
        ValueTarget::Finite(a) => {
            let g = f.subtract_constant(*a)?;
            if g.is_identically_zero() {
                return Err(Failure::Usage(format!("f - {} vanishes identically", format_complex(*a))));
            }
            Ok(g.reciprocal()?)
        }
    }
}

fn evaluate(args: &ComputeArgs, f: &FunctionModel, a: &ValueTarget, step: Option<StepSpec>) -> Result<Computed, Failure> {
    let (r, tol) = (args.r, args.tol);
    let need_step = || step.ok_or_else(|| Failure::Usage(format!("{:?} needs --eta", args.functional)));
    Ok(match args.functional {
        Functional::Proximity => proximity(&target_model(f, a)?, r, tol)?.into(),
        Functional::Counting => counting(&target_model(f, a)?, r, Target::Poles)?.into(),
        Functional::Characteristic => characteristic(&target_model(f, a)?, r, tol)?.into(),
        Functional::Count => {
            let g = target_model(f, a)?;
            NevanlinnaValue::exact(count_points(g.require_poles()?, r, true)? as f64, r).into()
        }
        Functional::Alpha1 => alpha1(f, r)?.into(),
        Functional::Alpha2 => alpha2(f, r, None)?.into(),
        Functional::Beta => beta(f, r, None)?.into(),
        Functional::QuotientProximity => {
            let q = quotient_proximity(f, &need_step()?, r, tol)?;
            Computed {
                value: q.sum(),
                error_estimate: q.abs_error(),
                extra: vec![("forward", json!(q.forward.value)), ("reverse", json!(q.reverse.value))],
            }
        }
        Functional::ShiftedCounting => shifted_counting(f, &need_step()?, r)?.into(),
        Functional::TildeCounting => {
            let t = tilde_counting(f, &need_step()?, r, a)?;
            Computed {
                value: t.value,
                error_estimate: 0.0,
                extra: vec![
                    ("full", json!(t.full)),
                    ("common", json!(t.common)),
                    ("radius_used", json!(t.radius)),
                ],
            }
        }
        Functional::Remainder => smt_remainder(f, &need_step()?, r)?.into(),
    })
}

pub fn run(args: ComputeArgs) -> Outcome {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be a positive real, got {}", args.tol)));
    }
    if !(args.r > 0.0 && args.r.is_finite()) {
        return Err(Failure::Usage(format!("--r must be a positive real, got {}", args.r)));
    }
    let (id, f) = resolve_function(&args.function)?;
    let a = match &args.a {
        Some(text) => ValueTarget::parse(text)?,
        None => ValueTarget::Infinity,
    };
    let step = match &args.eta {
        Some(text) => Some(StepSpec::fixed(parse_complex(text)?)?),
        None => None,
    };
    let out = evaluate(&args, &f, &a, step)?;
    let mut inputs = serde_json::Map::new();
    inputs.insert("function".into(), json!(id));
    inputs.insert("r".into(), json!(args.r));
    inputs.insert("eta".into(), json!(step.map(|s| format_complex(s.value()))));
    inputs.insert("a".into(), json!(a.to_string()));
    inputs.insert("tol".into(), json!(args.tol));
    for (k, v) in out.extra {
        inputs.insert(k.into(), v);
    }
    let functional = args.functional.to_possible_value().map(|v| v.get_name().to_string());
    let doc = json!({
        "functional": functional,
        "inputs": inputs,
        "value": out.value,
        "error_estimate": out.error_estimate,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
    Ok(())
}
