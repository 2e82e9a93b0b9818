//! Counter-based SplitMix64 signs.
//!
//! Draw `k` for a seed is `mix(seed + (k + 1)·γ)` with
//! `γ = 0x9E3779B97F4A7C15` and the standard SplitMix64 finalizer
//! (`0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`, shifts 30/27/31). A draw's
//! sign is its top bit: clear is `+`, set is `−`. Labels are sorted
//! byte-wise and label `k` in that order takes draw `k`.

use crate::error::{domain, Result};
use crate::sequence::{ControlLabel, ErrorAssignment};

pub const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn draw(seed: u64, k: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(k.wrapping_add(1).wrapping_mul(SPLITMIX_GAMMA)))
}

pub fn sign(seed: u64, k: u64) -> f64 {
    if draw(seed, k) >> 63 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `±magnitude` per label. The two labels of `correlated` share one group
/// and take the draw of whichever sorts first.
pub fn random_sign_assignment(
    seed: u64,
    labels: &[ControlLabel],
    magnitude: f64,
    correlated: Option<(&ControlLabel, &ControlLabel)>,
) -> Result<ErrorAssignment> {
    if !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(domain(format!(
            "magnitude must be finite and >= 0, got {magnitude}"
        )));
    }
    let mut sorted: Vec<&ControlLabel> = labels.iter().collect();
    if let Some((a, b)) = correlated {
        sorted.extend([a, b]);
    }
    sorted.sort();
    sorted.dedup();
    let signs: Vec<f64> = (0..sorted.len()).map(|k| sign(seed, k as u64)).collect();
    let index_of = |l: &ControlLabel| sorted.iter().position(|x| *x == l).expect("label present");
    let mut shared_sign = None;
    if let Some((a, b)) = correlated {
        shared_sign = Some((a, b, signs[index_of(a).min(index_of(b))]));
    }
    let mut out = ErrorAssignment::new();
    let mut pattern = Vec::with_capacity(sorted.len());
    for (k, &l) in sorted.iter().enumerate() {
        let s = match shared_sign {
            Some((a, b, s)) if l == a || l == b => s,
            _ => signs[k],
        };
        pattern.push(format!("{l}{}", if s > 0.0 { '+' } else { '-' }));
        match shared_sign {
            Some((a, b, _)) if l == a && a != b => {
                out.group([a.clone(), b.clone()], s * magnitude)?
            }
            Some((a, b, _)) if l == b && a != b => {}
            _ => out.set(l.clone(), s * magnitude)?,
        }
    }
    Ok(out.with_seed(seed).with_sign_pattern(pattern.join(";")))
}
