//! Method selection and dispatch shared by the CLI and the C API.

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::{Instance, Profile};
use crate::kary::KarySignature;
use crate::ptas::{PtasParams, PtasReport};
use crate::rat::{rat_frac, Rat};
use crate::welfare::PExponent;

#[derive(Debug, Clone)]
pub struct SolverOutput {
    pub allocation: Allocation,
    /// True when the solver established that the optimum welfare is zero.
    pub zero_optimum: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Ptas,
    PMean,
    Kary,
    TwoValuable,
    Fptas,
    Oracle,
}

impl Method {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "auto" => Ok(Method::Auto),
            "ptas" => Ok(Method::Ptas),
            "pmean" => Ok(Method::PMean),
            "kary" => Ok(Method::Kary),
            "two-valuable" | "two_valuable" => Ok(Method::TwoValuable),
            "fptas" => Ok(Method::Fptas),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected auto, ptas, pmean, kary, two-valuable, fptas or oracle)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Ptas => "ptas",
            Method::PMean => "pmean",
            Method::Kary => "kary",
            Method::TwoValuable => "two-valuable",
            Method::Fptas => "fptas",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: Method,
    pub epsilon: Rat,
    /// Overrides the ε-derived λ when set.
    pub lambda: Option<u64>,
    /// p-mean exponent (pmean method only).
    pub p: PExponent,
    pub budget: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: Method::Auto,
            epsilon: rat_frac(1, 2),
            lambda: None,
            p: PExponent::Zero,
            budget: crate::oracle::DEFAULT_ORACLE_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub output: SolverOutput,
    /// Present for the rounding-scheme methods.
    pub ptas: Option<PtasReport>,
    /// Human-readable statement of the bound this run actually guarantees.
    pub guarantee: String,
    pub lambda: Option<u64>,
}

/// Picks a concrete method for `Auto`: two-valuable profiles use the
/// matching solver; identical profiles use the exact count-vector DP when
/// (m+1)^k fits the budget, the rounding scheme otherwise; small additive
/// instances use the trimmed enumerator.
pub fn resolve_method(instance: &Instance, options: &SolveOptions) -> Result<Method> {
    if options.method != Method::Auto {
        return Ok(options.method);
    }
    match instance.profile() {
        Profile::TwoValuable { .. } => Ok(Method::TwoValuable),
        Profile::Identical(_) => {
            let sig = KarySignature::of(instance)?;
            if sig.state_count() <= options.budget {
                Ok(Method::Kary)
            } else {
                Ok(Method::Ptas)
            }
        }
        Profile::Additive(_) => {
            if instance.agent_count() <= 4 {
                Ok(Method::Fptas)
            } else {
                Err(Error::Unsupported(
                    "no method for additive profiles with more than 4 agents; \
                     use --method {oracle|fptas} explicitly or reshape the instance"
                        .to_string(),
                ))
            }
        }
    }
}

pub fn solve(instance: &Instance, options: &SolveOptions) -> Result<SolveReport> {
    let method = resolve_method(instance, options)?;
    match method {
        Method::Auto => unreachable!("resolved above"),
        Method::Kary => {
            let sig = KarySignature::of(instance)?;
            if sig.state_count() > options.budget {
                return Err(Error::Budget {
                    required: sig.state_count(),
                    cap: options.budget,
                });
            }
            let output = crate::kary::kary_solve(instance)?;
            Ok(SolveReport {
                method,
                output,
                ptas: None,
                guarantee: "exact".to_string(),
                lambda: None,
            })
        }
        Method::TwoValuable => {
            let output = crate::two_valuable::solve_two_valuable(instance)?;
            Ok(SolveReport {
                method,
                output,
                ptas: None,
                guarantee: "exact".to_string(),
                lambda: None,
            })
        }
        Method::Oracle => {
            let res = crate::oracle::brute_force_optimum(
                instance,
                &crate::oracle::Objective::Nash,
                Some(options.budget),
            )?;
            Ok(SolveReport {
                method,
                output: SolverOutput {
                    zero_optimum: res.best_welfare.is_zero(),
                    allocation: res.best_allocation,
                },
                ptas: None,
                guarantee: "exact".to_string(),
                lambda: None,
            })
        }
        Method::Fptas => {
            let output = crate::fptas::fptas_solve(instance, &options.epsilon, Some(options.budget))?;
            Ok(SolveReport {
                method,
                output,
                ptas: None,
                guarantee: format!("(1-eps) with eps={}", crate::rat::format_rational(&options.epsilon)),
                lambda: None,
            })
        }
        Method::Ptas | Method::PMean => {
            let params = match options.lambda {
                Some(l) => PtasParams::new(l)?,
                None => PtasParams::from_epsilon(&options.epsilon)?,
            };
            let required = PtasParams::from_epsilon(&options.epsilon)?.lambda();
            let guarantee = if params.guarantee_applies() && params.lambda() >= required {
                format!(
                    "(1-eps) with eps={}",
                    crate::rat::format_rational(&options.epsilon)
                )
            } else if !params.guarantee_applies() {
                format!("none: lambda {} below 12", params.lambda())
            } else {
                format!(
                    "none: lambda {} below the {} required for eps={}",
                    params.lambda(),
                    required,
                    crate::rat::format_rational(&options.epsilon)
                )
            };
            let (output, ptas) = if method == Method::Ptas {
                crate::ptas::ptas_solve_with_params(instance, &params)?
            } else {
                (
                    crate::ptas::pmean_ptas_solve_with_params(instance, &params, &options.p)?,
                    None,
                )
            };
            Ok(SolveReport {
                method,
                output,
                ptas,
                guarantee,
                lambda: Some(params.lambda()),
            })
        }
    }
}
