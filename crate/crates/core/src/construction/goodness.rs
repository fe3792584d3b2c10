use super::bad_set::TupleVec;
use super::params::ConstructionParams;
use crate::error::Result;
use crate::zmod::{extract_symmetric_core, IntervalSpec, ResidueSet, SymmetricCore};

/// `ceil(L^(d+1) / 4^(d+1))`.
pub fn goodness_threshold(radius: u64, d: usize) -> u64 {
    let k = d as u32 + 1;
    let num = (radius as u128).pow(k);
    let den = 4u128.pow(k);
    num.div_ceil(den) as u64
}

fn progression_specs(alpha: &TupleVec, t: &TupleVec, params: &ConstructionParams) -> Vec<IntervalSpec> {
    let m = params.modulus();
    alpha
        .components()
        .iter()
        .zip(t.components())
        .map(|(&a, &ti)| IntervalSpec::full(m.mul(a, ti), params.radius))
        .collect()
}

/// `I + α_1 X_{t_1} + ⋯ + α_d X_{t_d}`.
pub fn goodness_sumset(alpha: &TupleVec, t: &TupleVec, params: &ConstructionParams) -> Result<ResidueSet> {
    let m = params.modulus();
    let mut acc = ResidueSet::interval(m, -(params.radius as i64), params.radius as i64);
    for spec in progression_specs(alpha, t, params) {
        let part = crate::zmod::materialize_interval(spec, m)?.set;
        acc = acc.sumset(&part)?;
    }
    Ok(acc)
}

/// `α` is good for `t` when `|(I + Σ α_i X_{t_i})_*| ≥ L^(d+1) / 4^(d+1)`.
pub fn is_good(alpha: &TupleVec, t: &TupleVec, params: &ConstructionParams) -> Result<bool> {
    let set = goodness_sumset(alpha, t, params)?;
    Ok(set.remove_zero().len() as u64 >= goodness_threshold(params.radius, alpha.dim()))
}

/// Symmetric core of `I + Σ α_i X_{t_i}`.
pub fn core_for(alpha: &TupleVec, t: &TupleVec, params: &ConstructionParams) -> Result<SymmetricCore> {
    extract_symmetric_core(&progression_specs(alpha, t, params), true, params.modulus())
}
