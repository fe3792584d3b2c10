//! Construction pipeline and the `davenport-cert/1` certificate document.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::assemble::assemble_weight_set;
use super::bad_set::{build_bad_set, BadSet, TupleVec};
use super::cover::{find_cover, intersection_size, CoverConfig, CoverMode, IntersectionCheck};
use super::params::{make_params, params_from_record, ConstructionParams, Parity};
use super::verify::{strongest_tier, verify_weight_set, StageCover, Tier, VerificationReport};
use crate::davenport::WeightSet;
use crate::error::{Error, Result};

pub const SCHEMA: &str = "davenport-cert/1";

/// Stream offset for the verifier's fresh sample of S in oracle stages.
const RECHECK_STREAM: u64 = 200;
/// Largest sample size a certificate may request for an oracle stage.
pub const MAX_SAMPLES: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsRecord {
    pub p: u64,
    pub k_total: u32,
    pub m: u32,
    pub parity: Parity,
    /// Fixed 12 decimals.
    pub c: String,
    pub radius: u64,
    pub seed: u64,
    pub relaxed: bool,
}

impl ParamsRecord {
    fn from_params(params: &ConstructionParams) -> Self {
        ParamsRecord {
            p: params.p(),
            k_total: params.k_total,
            m: params.m(),
            parity: params.parity(),
            c: format!("{:.12}", params.c),
            radius: params.radius,
            seed: params.seed,
            relaxed: params.relaxed,
        }
    }

    pub fn to_params(&self) -> Result<ConstructionParams> {
        let c: f64 = self
            .c
            .parse()
            .map_err(|_| Error::Parse(format!("bad constant {:?}", self.c)))?;
        let params = params_from_record(self.p, self.k_total, c, self.radius, self.seed, self.relaxed)?;
        if params.m() != self.m || params.parity() != self.parity {
            return Err(Error::Certificate("parity fields disagree with k_total".into()));
        }
        Ok(params)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageRecord {
    pub d: usize,
    pub n: u64,
    pub ys: Vec<TupleVec>,
    pub xs: Vec<TupleVec>,
    pub redraws: u64,
    pub cover_mode: CoverMode,
    pub intersection_check: IntersectionCheck,
    /// `None` when S is a membership oracle.
    pub bad_set_size: Option<u64>,
    /// `3k·L^k·(p−1)^(k−2)`, decimal string.
    pub bad_set_bound: String,
    pub normal_count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeAccounting {
    pub weight_count: u64,
    /// `2·m·N·L + 2L`.
    pub intersect_bound: u64,
    /// `4^(k²)·p^(1/k)`, scientific notation.
    pub general_bound: String,
    /// `27^((k/2)²)·p^(1/k)`, even `k_total` only.
    pub even_bound: Option<String>,
    pub within_bounds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverCertificate {
    pub schema: String,
    pub params: ParamsRecord,
    pub stages: Vec<StageRecord>,
    pub n_total: u64,
    /// The assembled weight set, ascending.
    pub weights: Vec<u64>,
    pub sizes: SizeAccounting,
    pub verification: VerificationReport,
    pub digest: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstructOptions {
    pub cover: CoverConfig,
    /// `None` picks the strongest admissible tier.
    pub tier: Option<Tier>,
}

fn canonical_value<T: Serialize>(value: &T) -> serde_json::Value {
    // serde_json's map is ordered, so keys come out sorted.
    serde_json::to_value(value).expect("certificate types serialize")
}

/// SHA-256 over the compact canonical JSON of the document without `digest`.
pub fn compute_digest(cert: &CoverCertificate) -> String {
    let mut value = canonical_value(cert);
    value
        .as_object_mut()
        .expect("object")
        .remove("digest");
    let bytes = serde_json::to_vec(&value).expect("serializable");
    hex::encode(Sha256::digest(&bytes))
}

impl CoverCertificate {
    /// Pretty canonical JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&canonical_value(self)).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(SCHEMA) => {}
            Some(other) => return Err(Error::Parse(format!("unsupported schema {other:?}"))),
            None => return Err(Error::Parse("missing schema".into())),
        }
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn passed(&self) -> bool {
        self.verification.verdict == super::verify::Verdict::Pass
    }
}

fn accounting(params: &ConstructionParams, weights: &WeightSet, n_total: u64) -> SizeAccounting {
    let k = params.k_total as f64;
    let p = params.p() as f64;
    let root = p.powf(1.0 / k);
    let general = 4f64.powf(k * k) * root;
    let even = (params.parity() == Parity::Even).then(|| {
        let half = (params.k_total / 2) as f64;
        27f64.powf(half * half) * root
    });
    let intersect_bound = 2 * params.m() as u64 * n_total * params.radius + 2 * params.radius;
    let count = weights.len() as u64;
    let within_bounds = count <= intersect_bound
        && (count as f64) <= general
        && even.is_none_or(|e| (count as f64) <= e);
    SizeAccounting {
        weight_count: count,
        intersect_bound,
        general_bound: format!("{general:.12e}"),
        even_bound: even.map(|e| format!("{e:.12e}")),
        within_bounds,
    }
}

fn stage_rng(params: &ConstructionParams, stage: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(stage as u64 + 1);
    rng
}

/// Full pipeline with default options and the parameter checks enforced.
pub fn construct_weight_set(p: u64, k_total: u32, c: f64, seed: u64) -> Result<CoverCertificate> {
    construct_with(&make_params(p, k_total, c, seed)?, &ConstructOptions::default())
}

pub fn construct_with(params: &ConstructionParams, options: &ConstructOptions) -> Result<CoverCertificate> {
    let tier = options.tier.unwrap_or_else(|| strongest_tier(params));
    super::verify::check_admissible(tier, params)?;
    let m = params.modulus();
    let mut stages = Vec::new();
    for (i, d) in params.stage_dimensions().into_iter().enumerate() {
        let bad = build_bad_set(params, d);
        let mut rng = stage_rng(params, i);
        let cover = find_cover(params, &bad, &options.cover, &mut rng)?;
        stages.push(StageRecord {
            d,
            n: cover.ys.len() as u64,
            xs: cover.ys.iter().map(|y| y.inverse(m)).collect(),
            ys: cover.ys,
            redraws: cover.redraws,
            cover_mode: options.cover.mode,
            intersection_check: cover.check,
            bad_set_size: bad.size(),
            bad_set_bound: bad.size_bound().to_string(),
            normal_count: cover.normal_count,
        });
    }
    let ys: Vec<Vec<TupleVec>> = stages.iter().map(|s| s.ys.clone()).collect();
    let weights = assemble_weight_set(params, &ys)?;
    let covers: Vec<StageCover> = stages
        .iter()
        .map(|s| StageCover {
            d: s.d,
            xs: s.xs.clone(),
        })
        .collect();
    let verification = verify_weight_set(&weights, params, &covers, tier)?;
    let n_total = stages.iter().map(|s| s.n).sum();
    let mut cert = CoverCertificate {
        schema: SCHEMA.into(),
        params: ParamsRecord::from_params(params),
        sizes: accounting(params, &weights, n_total),
        stages,
        n_total,
        weights: weights.to_vec(),
        verification,
        digest: String::new(),
    };
    cert.digest = compute_digest(&cert);
    Ok(cert)
}

/// Fresh sample of S; returns how many sampled members survive `∩ y_i·S`.
fn sampled_residual(bad: &BadSet, ys: &[TupleVec], params: &ConstructionParams, stage: usize, samples: u64) -> u64 {
    let m = params.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(RECHECK_STREAM + stage as u64);
    let (first, rest) = match ys.split_first() {
        Some(x) => x,
        None => return 0,
    };
    let inverses: Vec<TupleVec> = rest.iter().map(|y| y.inverse(m)).collect();
    let mut found = 0;
    let mut residual = 0;
    for _ in 0..samples.saturating_mul(64) {
        if found >= samples {
            break;
        }
        let s = TupleVec::random(&mut rng, bad.dim(), m.n());
        if !bad.contains(&s) {
            continue;
        }
        found += 1;
        let r = first.mul(&s, m);
        if inverses.iter().all(|yi| bad.contains(&r.mul(yi, m))) {
            residual += 1;
        }
    }
    residual
}

/// Re-checks a certificate without rerunning the cover search.
///
/// Integrity problems (digest, assembled weights, cover) are
/// `Error::Certificate`; malformed documents are `Error::Parse`.
pub fn verify_document(cert: &CoverCertificate, tier: Option<Tier>) -> Result<VerificationReport> {
    if cert.schema != SCHEMA {
        return Err(Error::Parse(format!("unsupported schema {:?}", cert.schema)));
    }
    if compute_digest(cert) != cert.digest {
        return Err(Error::Certificate("digest mismatch".into()));
    }
    let params = cert.params.to_params()?;
    let tier = tier.unwrap_or(cert.verification.tier);
    super::verify::check_admissible(tier, &params)?;
    let m = params.modulus();
    let dims = params.stage_dimensions();
    if cert.stages.len() != dims.len() {
        return Err(Error::Certificate(format!(
            "expected {} stages, found {}",
            dims.len(),
            cert.stages.len()
        )));
    }
    for (i, (stage, &d)) in cert.stages.iter().zip(&dims).enumerate() {
        if stage.d != d || stage.n != stage.ys.len() as u64 || stage.xs.len() != stage.ys.len() {
            return Err(Error::Certificate(format!("stage {i} has inconsistent sizes")));
        }
        for (y, x) in stage.ys.iter().zip(&stage.xs) {
            y.validate(d, m).map_err(|e| Error::Certificate(e.to_string()))?;
            if y.inverse(m) != *x {
                return Err(Error::Certificate(format!("stage {i}: x is not y⁻¹")));
            }
        }
        let bad = build_bad_set(&params, d);
        let residual = match stage.intersection_check {
            IntersectionCheck::Exact => intersection_size(&bad, &stage.ys)
                .ok_or_else(|| Error::Certificate("exact check on an oracle bad set".into()))?,
            IntersectionCheck::Sampled { samples } if samples <= MAX_SAMPLES => {
                sampled_residual(&bad, &stage.ys, &params, i, samples)
            }
            IntersectionCheck::Sampled { samples } => {
                return Err(Error::Certificate(format!("sample size {samples} too large")))
            }
        };
        if residual != 0 {
            return Err(Error::Certificate(format!(
                "stage {i}: {residual} elements survive the cover"
            )));
        }
    }
    let ys: Vec<Vec<TupleVec>> = cert.stages.iter().map(|s| s.ys.clone()).collect();
    let weights = assemble_weight_set(&params, &ys)?;
    if weights.to_vec() != cert.weights {
        return Err(Error::Certificate("weights differ from the assembled set".into()));
    }
    if cert.n_total != cert.stages.iter().map(|s| s.n).sum::<u64>()
        || cert.sizes != accounting(&params, &weights, cert.n_total)
    {
        return Err(Error::Certificate("size accounting does not match".into()));
    }
    let covers: Vec<StageCover> = cert
        .stages
        .iter()
        .map(|s| StageCover {
            d: s.d,
            xs: s.xs.clone(),
        })
        .collect();
    verify_weight_set(&weights, &params, &covers, tier)
}
