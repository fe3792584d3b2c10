//! Parsers for the textual arguments of the command-line tool.

use crate::davenport::WeightSet;
use crate::error::{Error, Result};
use crate::zmod::{is_prime, Modulus};

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected a non-negative integer, got {s:?}")))
}

/// Comma-separated weights, e.g. `"1,2,5"`, each in `[1, n−1]`.
pub fn parse_weight_list(s: &str, n: u64) -> Result<WeightSet> {
    let modulus = Modulus::new(n)?;
    if s.trim().is_empty() {
        return Err(Error::EmptyWeightSet);
    }
    let values = s.split(',').map(parse_u64).collect::<Result<Vec<_>>>()?;
    WeightSet::new(modulus, values)
}

/// Inclusive range `"a..b"` or a single value `"a"`.
pub fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse_u64(lo)?, parse_u64(hi)?),
        None => {
            let v = parse_u64(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(Error::Parse(format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

/// Largest value accepted in a prime list.
pub const MAX_PRIME_SPEC: u64 = 10_000_000;

/// A prime list: a single value must be prime; a range keeps its primes.
pub fn parse_prime_spec(s: &str) -> Result<Vec<u64>> {
    let single = !s.contains("..");
    let (lo, hi) = parse_range(s)?;
    if hi > MAX_PRIME_SPEC {
        return Err(Error::Parse(format!("primes above {MAX_PRIME_SPEC} are not supported")));
    }
    if single {
        return if is_prime(lo) {
            Ok(vec![lo])
        } else {
            Err(Error::NotPrime(lo))
        };
    }
    Ok(crate::zmod::primes_in(lo, hi))
}

/// A list of `k` values: a single value or an inclusive range, all at least 1.
pub fn parse_k_spec(s: &str) -> Result<Vec<u32>> {
    let (lo, hi) = parse_range(s)?;
    if lo == 0 || hi > 1024 {
        return Err(Error::Parse(format!("k out of range in {s:?}")));
    }
    Ok((lo as u32..=hi as u32).collect())
}
