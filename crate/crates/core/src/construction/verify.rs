//! Layered checks that an assembled weight set satisfies `D_A(F_p) ≤ k_total`.
//!
//! * `exact`: run the Davenport solver (small p only).
//! * `condition-exact`: check `F_p^* ⊆ (A₀ + Σα_iA₀) / (A₀ + Σβ_iA₀)` for every
//!   tuple pair, with `A₀ = A ∪ {0}` and nonzero denominators.
//! * `goodness-full` / `goodness-sampled`: for each `α` find a cover index
//!   `i` with `α` good for `x_i`, extract the symmetric core `Y` of
//!   `I + Σ α_r X_{x_r}` and require the cores to be large enough that
//!   `(Y − Y)/(Y' − Y')` is all of `F_p`.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bad_set::{universe_size, TupleVec};
use super::goodness::{core_for, is_good};
use super::params::ConstructionParams;
use crate::davenport::{find_zero_sum_free, WeightSet};
use crate::error::{Error, Result};
use crate::zmod::ResidueSet;

pub const EXACT_MAX_P: u64 = 60;
pub const GOODNESS_FULL_MAX: u128 = 10_000_000;
pub const CONDITION_MAX_PAIRS: u128 = 1_000_000;
pub const DEFAULT_SAMPLE: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Exact,
    GoodnessFull,
    GoodnessSampled,
    ConditionExact,
}

impl Tier {
    pub fn name(&self) -> &'static str {
        match self {
            Tier::Exact => "exact",
            Tier::GoodnessFull => "goodness-full",
            Tier::GoodnessSampled => "goodness-sampled",
            Tier::ConditionExact => "condition-exact",
        }
    }
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tier> {
        match s {
            "exact" => Ok(Tier::Exact),
            "goodness-full" => Ok(Tier::GoodnessFull),
            "goodness-sampled" => Ok(Tier::GoodnessSampled),
            "condition-exact" => Ok(Tier::ConditionExact),
            other => Err(Error::Parse(format!("unknown tier {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FailureWitness {
    /// No cover index makes `alpha` good.
    NoGoodIndex { alpha: TupleVec },
    /// Even case: the best core for `alpha` has `|Y|² ≤ p`.
    SmallCore { alpha: TupleVec, core_size: u64 },
    /// Odd case: `min |Y_num| · min |Y_den| ≤ p`.
    CoreProduct { numerator: u64, denominator: u64 },
    /// A zero-sum-free sequence of length `k_total`.
    Sequence { elements: Vec<u64> },
    /// `missing ∉ Num(alpha) / Den(beta)`.
    Quotient {
        alpha: TupleVec,
        beta: TupleVec,
        missing: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub tier: Tier,
    pub verdict: Verdict,
    pub checked_count: u64,
    pub total_count: u64,
    /// `checked_count / total_count`, fixed 12 decimals.
    pub coverage: String,
    /// Smallest core found per stage (goodness tiers only).
    pub min_core_sizes: Vec<u64>,
    pub failure_witness: Option<FailureWitness>,
}

fn coverage(checked: u64, total: u64) -> String {
    format!("{:.12}", checked as f64 / total.max(1) as f64)
}

/// Errors when `tier` is too expensive for these parameters.
pub fn check_admissible(tier: Tier, params: &ConstructionParams) -> Result<()> {
    let p = params.p();
    let reject = |reason: String| {
        Err(Error::InadmissibleTier {
            tier: tier.name().into(),
            reason,
        })
    };
    match tier {
        Tier::Exact if p > EXACT_MAX_P => reject(format!("requires p ≤ {EXACT_MAX_P}, got {p}")),
        Tier::ConditionExact => {
            if p > EXACT_MAX_P {
                return reject(format!("requires p ≤ {EXACT_MAX_P}, got {p}"));
            }
            let (dn, dd) = params.quotient_dimensions();
            let pairs = universe_size(p, dn + dd);
            if pairs > CONDITION_MAX_PAIRS {
                return reject(format!("{pairs} tuple pairs exceed {CONDITION_MAX_PAIRS}"));
            }
            Ok(())
        }
        Tier::GoodnessFull => {
            for d in params.stage_dimensions() {
                let size = universe_size(p, d);
                if size > GOODNESS_FULL_MAX {
                    return reject(format!(
                        "(p−1)^{d} = {size} exceeds {GOODNESS_FULL_MAX}"
                    ));
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Strongest admissible tier: exact, then goodness-full, then goodness-sampled.
pub fn strongest_tier(params: &ConstructionParams) -> Tier {
    [Tier::Exact, Tier::GoodnessFull, Tier::GoodnessSampled]
        .into_iter()
        .find(|&t| check_admissible(t, params).is_ok())
        .expect("sampled tier is always admissible")
}

/// Cover data for one stage: the dimension and the steps `x_i = y_i⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageCover {
    pub d: usize,
    pub xs: Vec<TupleVec>,
}

pub fn verify_weight_set(
    weights: &WeightSet,
    params: &ConstructionParams,
    stages: &[StageCover],
    tier: Tier,
) -> Result<VerificationReport> {
    check_admissible(tier, params)?;
    match tier {
        Tier::Exact => Ok(verify_exact(weights, params)),
        Tier::ConditionExact => verify_condition(weights, params),
        Tier::GoodnessFull => verify_goodness(params, stages, None),
        Tier::GoodnessSampled => verify_goodness(params, stages, Some(DEFAULT_SAMPLE)),
    }
}

fn verify_exact(weights: &WeightSet, params: &ConstructionParams) -> VerificationReport {
    let witness = find_zero_sum_free(weights, params.k_total as usize);
    VerificationReport {
        tier: Tier::Exact,
        verdict: if witness.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        checked_count: 1,
        total_count: 1,
        coverage: coverage(1, 1),
        min_core_sizes: Vec::new(),
        failure_witness: witness.map(|s| FailureWitness::Sequence {
            elements: s.elements().to_vec(),
        }),
    }
}

/// `A₀ + t_1·A₀ + ⋯ + t_d·A₀`.
fn dilated_sum(base: &ResidueSet, t: &TupleVec) -> ResidueSet {
    t.components().iter().fold(base.clone(), |acc, &c| {
        acc.sumset(&base.dilate(c)).expect("same modulus")
    })
}

fn all_tuples(p: u64, d: usize) -> impl Iterator<Item = TupleVec> {
    (0..universe_size(p, d) as u64).map(move |i| TupleVec::from_index(i, d, p))
}

fn verify_condition(weights: &WeightSet, params: &ConstructionParams) -> Result<VerificationReport> {
    let m = params.modulus();
    let p = m.n();
    let base = weights.as_set().with_zero();
    let (dn, dd) = params.quotient_dimensions();
    let nums: Vec<(TupleVec, ResidueSet)> = all_tuples(p, dn)
        .map(|a| {
            let s = dilated_sum(&base, &a);
            (a, s)
        })
        .collect();
    let dens: Vec<(TupleVec, ResidueSet)> = all_tuples(p, dd)
        .map(|b| {
            let s = dilated_sum(&base, &b).remove_zero();
            (b, s)
        })
        .collect();
    let total = (nums.len() * dens.len()) as u64;
    let failure = nums
        .par_iter()
        .find_map_first(|(alpha, num)| {
            dens.iter().find_map(|(beta, den)| {
                if den.is_empty() {
                    return Some((alpha.clone(), beta.clone(), 1));
                }
                if num.covers_nonzero() {
                    return None;
                }
                let q = ResidueSet::quotient_set(num, den).expect("prime modulus");
                (1..p)
                    .find(|&v| !q.contains(v))
                    .map(|missing| (alpha.clone(), beta.clone(), missing))
            })
        });
    Ok(VerificationReport {
        tier: Tier::ConditionExact,
        verdict: if failure.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        checked_count: total,
        total_count: total,
        coverage: coverage(total, total),
        min_core_sizes: Vec::new(),
        failure_witness: failure.map(|(alpha, beta, missing)| FailureWitness::Quotient {
            alpha,
            beta,
            missing,
        }),
    })
}

/// `|Y|^k_total > p^(d+1)`: the core is large enough for its stage.
fn core_meets_target(core: u64, p: u64, d: usize, k_total: u32) -> bool {
    let lhs = (core as u128).checked_pow(k_total);
    let rhs = (p as u128).checked_pow(d as u32 + 1);
    match (lhs, rhs) {
        (Some(l), Some(r)) => l > r,
        _ => k_total as f64 * (core as f64).ln() > (d as f64 + 1.0) * (p as f64).ln(),
    }
}

#[derive(Clone, Copy, Debug)]
enum AlphaOutcome {
    NoGood,
    Core(u64),
}

/// Scans cover indices in order: the first good index whose core meets the
/// stage target wins; otherwise the largest core over good indices is kept.
fn alpha_outcome(alpha: &TupleVec, xs: &[TupleVec], params: &ConstructionParams) -> AlphaOutcome {
    let mut best: Option<u64> = None;
    for x in xs {
        if !is_good(alpha, x, params).expect("valid tuples") {
            continue;
        }
        let size = core_for(alpha, x, params).expect("valid tuples").core.len() as u64;
        if core_meets_target(size, params.p(), alpha.dim(), params.k_total) {
            return AlphaOutcome::Core(size);
        }
        best = Some(best.map_or(size, |b| b.max(size)));
    }
    best.map_or(AlphaOutcome::NoGood, AlphaOutcome::Core)
}

struct StageSummary {
    checked: u64,
    total: u64,
    min_core: Option<(u64, TupleVec)>,
    no_good: Option<TupleVec>,
}

fn summarize_stage(params: &ConstructionParams, stage: &StageCover, sample: Option<(u64, u64)>) -> StageSummary {
    let p = params.p();
    let total = universe_size(p, stage.d) as u64;
    // With an empty cover the unit interval alone has to do: x = (1, …, 1).
    let ones = [TupleVec::ones(stage.d)];
    let xs: &[TupleVec] = if stage.xs.is_empty() { &ones } else { &stage.xs };
    let alphas: Vec<TupleVec> = match sample {
        None => all_tuples(p, stage.d).collect(),
        Some((count, stream)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(stream);
            (0..count)
                .map(|_| TupleVec::random(&mut rng, stage.d, p))
                .collect()
        }
    };
    let outcomes: Vec<AlphaOutcome> = alphas
        .par_iter()
        .map(|a| alpha_outcome(a, xs, params))
        .collect();
    let mut summary = StageSummary {
        checked: alphas.len() as u64,
        total,
        min_core: None,
        no_good: None,
    };
    for (alpha, outcome) in alphas.into_iter().zip(outcomes) {
        match outcome {
            AlphaOutcome::NoGood => {
                if summary.no_good.is_none() {
                    summary.no_good = Some(alpha);
                }
            }
            AlphaOutcome::Core(size) => {
                if summary.min_core.as_ref().is_none_or(|(s, _)| size < *s) {
                    summary.min_core = Some((size, alpha));
                }
            }
        }
    }
    summary
}

fn verify_goodness(
    params: &ConstructionParams,
    stages: &[StageCover],
    sample: Option<u64>,
) -> Result<VerificationReport> {
    let dims = params.stage_dimensions();
    if stages.len() != dims.len() || stages.iter().zip(&dims).any(|(s, &d)| s.d != d) {
        return Err(Error::InvalidParams(format!(
            "expected stages of dimensions {dims:?}"
        )));
    }
    let summaries: Vec<StageSummary> = stages
        .iter()
        .enumerate()
        .map(|(i, st)| summarize_stage(params, st, sample.map(|c| (c, 100 + i as u64))))
        .collect();
    let checked: u64 = summaries.iter().map(|s| s.checked).sum();
    let total: u64 = summaries.iter().map(|s| s.total).sum();
    let min_core_sizes: Vec<u64> = summaries
        .iter()
        .map(|s| s.min_core.as_ref().map_or(0, |(c, _)| *c))
        .collect();
    let p = params.p();

    let mut failure = summaries
        .iter()
        .find_map(|s| s.no_good.clone())
        .map(|alpha| FailureWitness::NoGoodIndex { alpha });
    if failure.is_none() {
        failure = match summaries.as_slice() {
            [single] => single.min_core.as_ref().and_then(|(size, alpha)| {
                ((*size as u128).pow(2) <= p as u128).then(|| FailureWitness::SmallCore {
                    alpha: alpha.clone(),
                    core_size: *size,
                })
            }),
            [den, num] => {
                let d = den.min_core.as_ref().map_or(0, |(c, _)| *c);
                let n = num.min_core.as_ref().map_or(0, |(c, _)| *c);
                ((d as u128) * (n as u128) <= p as u128).then_some(FailureWitness::CoreProduct {
                    numerator: n,
                    denominator: d,
                })
            }
            _ => unreachable!("one or two stages"),
        };
    }
    Ok(VerificationReport {
        tier: if sample.is_some() {
            Tier::GoodnessSampled
        } else {
            Tier::GoodnessFull
        },
        verdict: if failure.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        checked_count: checked,
        total_count: total,
        coverage: coverage(checked, total),
        min_core_sizes,
        failure_witness: failure,
    })
}
