//! Log-space helpers and deterministic seed derivation.

use crate::real::Real;

/// log(Σ exp(x_i)) with max-subtraction. Empty input yields −∞.
pub fn logsumexp<F: Real>(xs: &[F]) -> F {
    let mut m = F::neg_infinity();
    for &x in xs {
        if x > m {
            m = x;
        }
    }
    if !m.is_finite() {
        return m;
    }
    let mut s = F::zero();
    for &x in xs {
        s += (x - m).exp();
    }
    m + s.ln()
}

/// Exponentiate and normalize a log-weight vector in place so it sums to 1.
///
/// Entries that underflow to zero are clamped to the smallest positive value;
/// the true quantity is strictly positive everywhere and the clamp only
/// replaces a representation artifact (its effect on the sum is below any
/// testable tolerance).
pub fn normalize_log_weights<F: Real>(xs: &mut [F]) {
    let lse = logsumexp(xs);
    for x in xs.iter_mut() {
        let p = (*x - lse).exp();
        *x = if p > F::zero() { p } else { F::min_positive_value() };
    }
}

/// splitmix64 step, used to derive independent sub-seeds from a run seed.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministically derive a sub-seed from a base seed and a stream label.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = base ^ 0x51ed_2701_8c89_35d1;
    let mut out = splitmix64(&mut state);
    for &p in parts {
        state ^= p;
        out = splitmix64(&mut state);
    }
    out
}
