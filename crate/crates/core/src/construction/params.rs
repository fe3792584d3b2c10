use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zmod::{is_prime, Modulus};

pub const DEFAULT_C: f64 = 9.0;
/// Largest prime accepted; residue sets are dense bit vectors of length p.
pub const MAX_PRIME: u64 = 1 << 32;
pub const MAX_K_TOTAL: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

/// Parameters of one construction run.
///
/// `radius` is `L = ceil(C · p^(1/k_total))`, shared by every stage.
/// Relaxed parameters skip the `C > 8` and `8·k_total·L < p` checks; they
/// exist for small-prime demonstrations and property tests.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionParams {
    modulus: Modulus,
    pub k_total: u32,
    pub c: f64,
    pub radius: u64,
    pub seed: u64,
    pub relaxed: bool,
}

impl ConstructionParams {
    pub fn p(&self) -> u64 {
        self.modulus.n()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// `floor(k_total / 2)`.
    pub fn m(&self) -> u32 {
        self.k_total / 2
    }

    pub fn parity(&self) -> Parity {
        if self.k_total % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `floor(L / 2)`, the radius of the progressions in the bad-set conditions.
    pub fn half(&self) -> u64 {
        self.radius / 2
    }

    /// Tuple dimension of each stage: `[m − 1]` when even, `[m − 1, m]` when odd.
    pub fn stage_dimensions(&self) -> Vec<usize> {
        let m = self.m() as usize;
        match self.parity() {
            Parity::Even => vec![m - 1],
            Parity::Odd => vec![m - 1, m],
        }
    }

    /// Number of dilated copies of A in the numerator and denominator of the
    /// quotient condition, minus one: `(m − 1, m − 1)` even, `(m, m − 1)` odd.
    pub fn quotient_dimensions(&self) -> (usize, usize) {
        let m = self.m() as usize;
        match self.parity() {
            Parity::Even => (m - 1, m - 1),
            Parity::Odd => (m, m - 1),
        }
    }

    /// The wrap guard `8·k_total·L < p`.
    pub fn guard_holds(&self) -> bool {
        8u128 * self.k_total as u128 * (self.radius as u128) < self.p() as u128
    }
}

/// `ceil(C · p^(1/k_total))`.
pub fn radius_for(p: u64, k_total: u32, c: f64) -> u64 {
    (c * (p as f64).powf(1.0 / k_total as f64)).ceil() as u64
}

/// Smallest prime `p` with `8·k_total·ceil(C·p^(1/k_total)) < p`.
pub fn min_admissible_prime(k_total: u32, c: f64) -> u64 {
    let mut p = 2u64;
    loop {
        if is_prime(p) && 8 * k_total as u64 * radius_for(p, k_total, c) < p {
            return p;
        }
        p += 1;
    }
}

fn check_common(p: u64, k_total: u32, c: f64) -> Result<Modulus> {
    if p > MAX_PRIME {
        return Err(Error::InvalidParams(format!("p must be at most {MAX_PRIME}")));
    }
    let modulus = Modulus::prime(p)?;
    if k_total < 4 {
        return Err(Error::TargetTooSmall(k_total));
    }
    if k_total > MAX_K_TOTAL {
        return Err(Error::InvalidParams(format!("k must be at most {MAX_K_TOTAL}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParams(format!("C must be positive, got {c}")));
    }
    Ok(modulus)
}

pub fn make_params(p: u64, k_total: u32, c: f64, seed: u64) -> Result<ConstructionParams> {
    let modulus = check_common(p, k_total, c)?;
    if c <= 8.0 {
        return Err(Error::ConstantTooSmall(c));
    }
    let params = ConstructionParams {
        modulus,
        k_total,
        c,
        radius: radius_for(p, k_total, c),
        seed,
        relaxed: false,
    };
    if !params.guard_holds() {
        return Err(Error::PrimeTooSmall {
            p,
            k_total,
            c,
            min_prime: min_admissible_prime(k_total, c),
        });
    }
    Ok(params)
}

/// Test-mode parameters: any positive C, no wrap guard. L is capped at p − 1.
pub fn make_params_relaxed(p: u64, k_total: u32, c: f64, seed: u64) -> Result<ConstructionParams> {
    let modulus = check_common(p, k_total, c)?;
    let radius = radius_for(p, k_total, c).clamp(1, p - 1);
    Ok(ConstructionParams {
        modulus,
        k_total,
        c,
        radius,
        seed,
        relaxed: true,
    })
}

/// Test-mode radii must stay below p.
fn check_radius(radius: u64, p: u64) -> Result<()> {
    if radius == 0 || radius >= p {
        return Err(Error::InvalidParams(format!(
            "radius must lie in [1, p−1], got {radius}"
        )));
    }
    Ok(())
}

/// Test-mode parameters with an explicit radius; C is reported as `L / p^(1/k_total)`.
pub fn params_with_radius(p: u64, k_total: u32, radius: u64, seed: u64) -> Result<ConstructionParams> {
    check_radius(radius, p)?;
    let c = radius as f64 / (p as f64).powf(1.0 / k_total as f64);
    let modulus = check_common(p, k_total, c)?;
    Ok(ConstructionParams {
        modulus,
        k_total,
        c,
        radius,
        seed,
        relaxed: true,
    })
}

/// Rebuilds parameters from recorded values, re-running the checks that
/// apply to non-relaxed parameters.
pub fn params_from_record(
    p: u64,
    k_total: u32,
    c: f64,
    radius: u64,
    seed: u64,
    relaxed: bool,
) -> Result<ConstructionParams> {
    if relaxed {
        let modulus = check_common(p, k_total, c)?;
        check_radius(radius, p)?;
        return Ok(ConstructionParams {
            modulus,
            k_total,
            c,
            radius,
            seed,
            relaxed,
        });
    }
    let params = make_params(p, k_total, c, seed)?;
    if params.radius != radius {
        return Err(Error::InvalidParams(format!(
            "recorded radius {radius} does not match ceil(C·p^(1/k)) = {}",
            params.radius
        )));
    }
    Ok(params)
}
