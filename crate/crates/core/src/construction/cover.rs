//! Tuples `y_1, …, y_N` with `∩ y_i·S = ∅`.
//!
//! Greedy mode keeps the running intersection `R` explicitly and accepts a
//! fresh random `y` once it at least halves `R`, falling back to the best of
//! `max_rounds` draws. Averaged over `y`, `|S ∩ yS|` is exactly
//! `|S|² / (p−1)^d`, so draws that shrink `R` by the density of S are typical.
//!
//! Paper-faithful mode (d = 1 only) follows the counting argument step by
//! step: it computes `N(y) = |S ∩ yS|` for every `y`, restricts to the
//! "normal" `y` whose count is below the Markov threshold, and then picks
//! normal `y`s one leading element at a time.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bad_set::{BadSet, TupleVec};
use super::params::ConstructionParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMode {
    Greedy,
    PaperFaithful,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverConfig {
    pub mode: CoverMode,
    /// Draws per greedy step before settling for the best one seen.
    pub max_rounds: u32,
    /// Upper bound on the number of cover tuples.
    pub max_steps: u32,
    /// Sample size standing in for S when S is only a membership oracle.
    pub sample_size: usize,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            mode: CoverMode::Greedy,
            max_rounds: 64,
            max_steps: 512,
            sample_size: 4096,
        }
    }
}

/// How `∩ y_i·S = ∅` was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum IntersectionCheck {
    Exact,
    Sampled { samples: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub ys: Vec<TupleVec>,
    /// Draws rejected because a tuple had repeated components.
    pub redraws: u64,
    pub check: IntersectionCheck,
    /// Number of normal `y` (paper-faithful mode only).
    pub normal_count: Option<u64>,
}

/// Draws a uniform tuple with pairwise distinct components.
fn draw_distinct<R: Rng + ?Sized>(rng: &mut R, d: usize, p: u64, redraws: &mut u64) -> TupleVec {
    loop {
        let y = TupleVec::random(rng, d, p);
        if y.has_distinct_components() {
            return y;
        }
        *redraws += 1;
    }
}

/// `|S ∩ yS|`-style filter: members `r` of `running` with `y⁻¹·r ∈ S`.
fn survivors(running: &[TupleVec], y: &TupleVec, bad: &BadSet) -> Vec<TupleVec> {
    let m = bad.modulus();
    let y_inv = y.inverse(m);
    running
        .iter()
        .filter(|r| bad.contains(&r.mul(&y_inv, m)))
        .cloned()
        .collect()
}

pub fn find_cover<R: Rng + ?Sized>(
    params: &ConstructionParams,
    bad: &BadSet,
    config: &CoverConfig,
    rng: &mut R,
) -> Result<Cover> {
    match config.mode {
        CoverMode::Greedy => greedy(params, bad, config, rng),
        CoverMode::PaperFaithful => paper_faithful(params, bad, config, rng),
    }
}

fn greedy<R: Rng + ?Sized>(
    params: &ConstructionParams,
    bad: &BadSet,
    config: &CoverConfig,
    rng: &mut R,
) -> Result<Cover> {
    let m = params.modulus();
    let p = m.n();
    let d = bad.dim();
    let mut redraws = 0u64;

    let (members, check): (Vec<TupleVec>, IntersectionCheck) = match bad.iter() {
        Some(it) => (it.collect(), IntersectionCheck::Exact),
        None => {
            let mut sample = Vec::new();
            let attempts = config.sample_size as u64 * 64;
            for _ in 0..attempts {
                if sample.len() >= config.sample_size {
                    break;
                }
                let t = TupleVec::random(rng, d, p);
                if bad.contains(&t) {
                    sample.push(t);
                }
            }
            let n = sample.len() as u64;
            (sample, IntersectionCheck::Sampled { samples: n })
        }
    };
    if members.is_empty() {
        return Ok(Cover {
            ys: Vec::new(),
            redraws,
            check,
            normal_count: None,
        });
    }

    let first = draw_distinct(rng, d, p, &mut redraws);
    let mut running: Vec<TupleVec> = members.iter().map(|s| first.mul(s, m)).collect();
    let mut ys = vec![first];
    let mut steps = 0u32;
    while !running.is_empty() {
        steps += 1;
        if ys.len() as u32 >= config.max_steps {
            return Err(Error::CoverFailure {
                steps,
                residual: running.len() as u64,
            });
        }
        let mut best: Option<(TupleVec, Vec<TupleVec>)> = None;
        for _ in 0..config.max_rounds.max(1) {
            let y = draw_distinct(rng, d, p, &mut redraws);
            let left = survivors(&running, &y, bad);
            let halves = left.len() * 2 <= running.len();
            if best.as_ref().is_none_or(|(_, b)| left.len() < b.len()) {
                best = Some((y, left));
            }
            if halves {
                break;
            }
        }
        let (y, left) = best.expect("at least one draw");
        if left.len() == running.len() {
            return Err(Error::CoverFailure {
                steps,
                residual: running.len() as u64,
            });
        }
        ys.push(y);
        running = left;
    }
    Ok(Cover {
        ys,
        redraws,
        check,
        normal_count: None,
    })
}

/// `2·(3kC^k)^(2k−2)` with `k = d + 1`.
pub fn normal_threshold(params: &ConstructionParams, d: usize) -> f64 {
    let k = d as i32 + 1;
    2.0 * (3.0 * k as f64 * params.c.powi(k)).powi(2 * k - 2)
}

/// `N(y) = |S ∩ yS|` for every `y ∈ F_p^*` (index `y − 1`), by counting the
/// pairs `(a_0, a_1) ∈ S²` with `a_0 = y·a_1`.
pub fn binding_counts(bad: &BadSet) -> Result<Vec<u64>> {
    if bad.dim() != 1 {
        return Err(Error::InvalidParams(
            "binding counts are only enumerated for d = 1".into(),
        ));
    }
    let m = bad.modulus();
    let members: Vec<u64> = bad
        .iter()
        .ok_or_else(|| Error::InvalidParams("bad set must be explicit".into()))?
        .map(|t| t.0[0])
        .collect();
    let mut counts = vec![0u64; m.n() as usize - 1];
    for &a1 in &members {
        let inv = m.inv(a1).expect("nonzero");
        for &a0 in &members {
            counts[m.mul(a0, inv) as usize - 1] += 1;
        }
    }
    Ok(counts)
}

fn paper_faithful<R: Rng + ?Sized>(
    params: &ConstructionParams,
    bad: &BadSet,
    config: &CoverConfig,
    rng: &mut R,
) -> Result<Cover> {
    let m = params.modulus();
    let counts = binding_counts(bad)?;
    let threshold = normal_threshold(params, 1);
    let normal: Vec<u64> = (1..m.n())
        .filter(|&y| (counts[y as usize - 1] as f64) <= threshold)
        .collect();
    let in_s = |v: u64| bad.contains(&TupleVec(vec![v]));
    if bad.size() == Some(0) {
        return Ok(Cover {
            ys: Vec::new(),
            redraws: 0,
            check: IntersectionCheck::Exact,
            normal_count: Some(normal.len() as u64),
        });
    }
    let y1 = *normal.choose(rng).ok_or(Error::CoverFailure {
        steps: 0,
        residual: bad.size().unwrap_or(0),
    })?;
    // Leading elements of the binding pairs of y1: S ∩ y1·S.
    let y1_inv = m.inv(y1).expect("nonzero");
    let leading: Vec<u64> = (1..m.n())
        .filter(|&a| in_s(a) && in_s(m.mul(a, y1_inv)))
        .collect();
    let mut running: Vec<u64> = leading.clone();
    let mut ys = vec![TupleVec(vec![1]), TupleVec(vec![y1])];
    let mut steps = 0u32;
    for lead in leading {
        if !running.contains(&lead) {
            continue;
        }
        steps += 1;
        // A normal y whose binding pairs do not lead with `lead`, i.e. y⁻¹·lead ∉ S.
        let avoids = |y: u64| !in_s(m.mul(lead, m.inv(y).expect("nonzero")));
        let mut pick = None;
        for _ in 0..config.max_rounds {
            let y = *normal.choose(rng).expect("nonempty");
            if avoids(y) {
                pick = Some(y);
                break;
            }
        }
        let y = match pick.or_else(|| normal.iter().copied().find(|&y| avoids(y))) {
            Some(y) => y,
            None => {
                return Err(Error::CoverFailure {
                    steps,
                    residual: running.len() as u64,
                })
            }
        };
        let y_inv = m.inv(y).expect("nonzero");
        running.retain(|&r| in_s(m.mul(r, y_inv)));
        ys.push(TupleVec(vec![y]));
    }
    debug_assert!(running.is_empty());
    Ok(Cover {
        ys,
        redraws: 0,
        check: IntersectionCheck::Exact,
        normal_count: Some(normal.len() as u64),
    })
}

/// Recomputes `∩ y_i·S` from scratch for an explicit S and returns its size.
pub fn intersection_size(bad: &BadSet, ys: &[TupleVec]) -> Option<u64> {
    let m = bad.modulus();
    let (first, rest) = match ys.split_first() {
        Some(x) => x,
        None => return bad.size(),
    };
    let inverses: Vec<TupleVec> = rest.iter().map(|y| y.inverse(m)).collect();
    Some(
        bad.iter()?
            .map(|s| first.mul(&s, m))
            .filter(|r| inverses.iter().all(|yi| bad.contains(&r.mul(yi, m))))
            .count() as u64,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::bad_set::build_bad_set;
    use crate::construction::params::{make_params, params_with_radius};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn greedy_empties_intersection_d1() {
        let params = make_params(10007, 4, 9.0, 42).unwrap();
        let bad = build_bad_set(&params, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cover = find_cover(&params, &bad, &CoverConfig::default(), &mut rng).unwrap();
        assert_eq!(intersection_size(&bad, &cover.ys), Some(0));
        assert_eq!(cover.check, IntersectionCheck::Exact);
        // N ≤ 2k(3kC^k)^(2k−2) at k = 2.
        let bound = 2.0 * 4.0 * (3.0 * 2.0 * 81.0f64).powi(2);
        assert!((cover.ys.len() as f64) <= bound);
    }

    #[test]
    fn greedy_d2() {
        let params = params_with_radius(499, 6, 4, 3).unwrap();
        let bad = build_bad_set(&params, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cover = find_cover(&params, &bad, &CoverConfig::default(), &mut rng).unwrap();
        assert_eq!(intersection_size(&bad, &cover.ys), Some(0));
        assert!(cover.ys.iter().all(|y| y.has_distinct_components()));
    }

    #[test]
    fn empty_bad_set_needs_no_cover() {
        let params = params_with_radius(101, 4, 1, 0).unwrap();
        let bad = build_bad_set(&params, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cover = find_cover(&params, &bad, &CoverConfig::default(), &mut rng).unwrap();
        assert!(cover.ys.is_empty());
    }

    #[test]
    fn saturated_bad_set_fails() {
        let params = crate::construction::params::make_params_relaxed(43, 4, 9.0, 0).unwrap();
        let bad = build_bad_set(&params, 1);
        assert_eq!(bad.size(), Some(42));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            find_cover(&params, &bad, &CoverConfig::default(), &mut rng),
            Err(Error::CoverFailure { .. })
        ));
    }

    #[test]
    fn paper_faithful_d1() {
        let params = make_params(10007, 4, 9.0, 5).unwrap();
        let bad = build_bad_set(&params, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let config = CoverConfig {
            mode: CoverMode::PaperFaithful,
            ..CoverConfig::default()
        };
        let cover = find_cover(&params, &bad, &config, &mut rng).unwrap();
        assert_eq!(cover.ys[0], TupleVec(vec![1]));
        assert_eq!(intersection_size(&bad, &cover.ys), Some(0));
        // The threshold 2(6C²)² exceeds p here, so every y is normal.
        assert_eq!(cover.normal_count, Some(10006));
    }

    #[test]
    fn expectation_identity_small() {
        let params = params_with_radius(211, 4, 9, 0).unwrap();
        let bad = build_bad_set(&params, 1);
        let counts = binding_counts(&bad).unwrap();
        let s = bad.size().unwrap();
        assert_eq!(counts.iter().sum::<u64>(), s * s);
        for (i, &c) in counts.iter().enumerate() {
            let y = TupleVec(vec![i as u64 + 1]);
            assert_eq!(intersection_size(&bad, &[TupleVec(vec![1]), y]), Some(c));
        }
    }
}
