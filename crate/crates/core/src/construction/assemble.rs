use super::bad_set::TupleVec;
use super::params::ConstructionParams;
use crate::davenport::WeightSet;
use crate::error::Result;
use crate::zmod::{materialize_interval, IntervalSpec, ResidueSet};

/// `(I ∪ ⋃_{i,r} X_{x_r^{(i)}})_*` for one stage, with `x = y⁻¹` componentwise.
pub fn stage_weights(params: &ConstructionParams, ys: &[TupleVec]) -> Result<ResidueSet> {
    let m = params.modulus();
    let radius = params.radius as i64;
    let mut acc = ResidueSet::interval(m, -radius, radius);
    for y in ys {
        for &x in y.inverse(m).components() {
            let part = materialize_interval(IntervalSpec::full(x, params.radius), m)?.set;
            acc = acc.union(&part)?;
        }
    }
    Ok(acc.remove_zero())
}

/// Union of the stage weight sets (a single stage when `k_total` is even).
pub fn assemble_weight_set(params: &ConstructionParams, stages: &[Vec<TupleVec>]) -> Result<WeightSet> {
    let m = params.modulus();
    let mut acc = ResidueSet::empty(m);
    for ys in stages {
        acc = acc.union(&stage_weights(params, ys)?)?;
    }
    if stages.is_empty() {
        acc = stage_weights(params, &[])?;
    }
    WeightSet::from_set(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::params::make_params;

    #[test]
    fn empty_cover_gives_punctured_unit_interval() {
        let params = make_params(10007, 4, 9.0, 0).unwrap();
        let a = assemble_weight_set(&params, &[vec![]]).unwrap();
        assert_eq!(a.len(), 2 * 91);
        assert!(a.contains(1) && a.contains(91) && a.contains(10007 - 91));
        assert!(!a.contains(92));
    }

    #[test]
    fn size_accounting() {
        let params = make_params(10007, 4, 9.0, 0).unwrap();
        let ys: Vec<TupleVec> = [17u64, 400, 9001].iter().map(|&y| TupleVec(vec![y])).collect();
        let a = assemble_weight_set(&params, &[ys.clone()]).unwrap();
        let n = ys.len() as u64;
        assert!(a.len() as u64 <= 2 * 2 * n * 91 + 2 * 91);
        assert!(a.iter().all(|w| (1..10007).contains(&w)));
        // Each X_x lies inside A ∪ {0}.
        let m = params.modulus();
        for y in &ys {
            let x = m.inv(y.0[0]).unwrap();
            for j in 1..=91u64 {
                assert!(a.contains(m.mul(x, j)));
                assert!(a.contains(m.neg(m.mul(x, j))));
            }
        }
    }
}
