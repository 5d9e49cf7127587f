//! Divisors supported on the ramification points: τ-profiles, vanishing
//! orders and the admissible (non-vanishing) β-vectors.

use crate::curve::{reduce, CurveSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficients `β` of `Σ β_i P_i` together with their τ-profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BetaVector {
    pub beta: Vec<u32>,
    pub tau: Vec<i64>,
    /// Vanishing order of theta at the associated point, `Σ max(0, τ_k)`.
    pub order: u32,
}

impl BetaVector {
    pub fn is_admissible(&self) -> bool {
        self.order == 0 && self.tau.iter().all(|&t| t == 0)
    }
}

fn check_range<T: Real>(spec: &CurveSpec<T>, beta: &[u32]) -> Result<()> {
    if beta.len() != spec.m() {
        return Err(Error::InvalidBeta(format!("expected {} entries, got {}", spec.m(), beta.len())));
    }
    if let Some((i, b)) = beta.iter().enumerate().find(|(_, &b)| b >= spec.n) {
        return Err(Error::InvalidBeta(format!("beta[{i}] = {b} outside 0..{}", spec.n - 1)));
    }
    Ok(())
}

/// Residue sums `Σ_i reduce(β_i + k R_i)` for `k = 0..N-1`.
fn residue_sums(n: u32, r: &[u32], beta: &[u32]) -> Vec<i64> {
    let ni = n as i64;
    (0..ni)
        .map(|k| {
            beta.iter()
                .zip(r)
                .map(|(&b, &ri)| reduce(b as i64 + k * ri as i64, ni))
                .sum()
        })
        .collect()
}

/// τ-profile `τ_k = (r/2 - Σ_i reduce(β_i + k R_i)) / N`.
pub fn tau_profile<T: Real>(spec: &CurveSpec<T>, beta: &[u32]) -> Result<BetaVector> {
    check_range(spec, beta)?;
    let n = spec.n as i64;
    let half_r = (spec.m() as i64 * (n - 1)) / 2;
    let sum: i64 = beta.iter().map(|&b| b as i64).sum();
    if reduce(sum - half_r, n) != 0 {
        return Err(Error::InvalidBeta(format!(
            "sum(beta) = {sum} is not congruent to r/2 = {half_r} mod {n}"
        )));
    }
    let tau: Vec<i64> = residue_sums(spec.n, &spec.r, beta)
        .into_iter()
        .map(|s| {
            debug_assert_eq!(reduce(half_r - s, n), 0);
            (half_r - s) / n
        })
        .collect();
    let order = tau.iter().map(|&t| t.max(0) as u32).sum();
    Ok(BetaVector { beta: beta.to_vec(), tau, order })
}

/// All β in `{0..N-1}^m` with identically zero τ-profile, in lexicographic order.
pub fn enumerate_admissible<T: Real>(spec: &CurveSpec<T>) -> Result<Vec<BetaVector>> {
    let m = spec.m();
    let n = spec.n;
    let bits = m as f64 * (n as f64).log2();
    if bits > 30.0 {
        return Err(Error::SearchTooLarge(format!("N^m = {n}^{m} exceeds 2^30")));
    }
    let half_r = (m as i64 * (n as i64 - 1)) / 2;
    let mut out = Vec::new();
    let mut current = vec![0u32; m];

    // τ_0 = 0 forces Σ β = r/2 exactly; prune on the running sum.
    fn recurse<T: Real>(
        spec: &CurveSpec<T>,
        pos: usize,
        partial: i64,
        half_r: i64,
        current: &mut Vec<u32>,
        out: &mut Vec<BetaVector>,
    ) {
        let m = current.len();
        let top = spec.n as i64 - 1;
        if pos == m {
            if partial == half_r {
                let bv = tau_profile(spec, current).expect("congruence holds");
                if bv.is_admissible() {
                    out.push(bv);
                }
            }
            return;
        }
        let remaining = (m - pos - 1) as i64;
        for b in 0..spec.n {
            let p = partial + b as i64;
            if p > half_r {
                break;
            }
            if p + remaining * top < half_r {
                continue;
            }
            current[pos] = b;
            recurse(spec, pos + 1, p, half_r, current, out);
        }
    }

    recurse(spec, 0, 0, half_r, &mut current, &mut out);
    Ok(out)
}

/// Counting rule for `R_i = 1`: admissible iff every residue occurs `m/N` times.
pub fn nonsingular_rule<T: Real>(spec: &CurveSpec<T>, beta: &[u32]) -> Result<bool> {
    if spec.r.iter().any(|&r| r != 1) {
        return Err(Error::InvalidBeta("counting rule needs all R_i = 1".into()));
    }
    check_range(spec, beta)?;
    let n = spec.n as usize;
    if !spec.m().is_multiple_of(n) {
        return Err(Error::InvalidBeta("counting rule needs N | m".into()));
    }
    let mut counts = vec![0usize; n];
    for &b in beta {
        counts[b as usize] += 1;
    }
    Ok(counts.iter().all(|&c| c == spec.m() / n))
}

/// Partition rule for `N = 3` covers with `R_i ∈ {1, 2}`.
///
/// With `s_k` (resp. `t_k`) the number of exponent-1 (resp. exponent-2)
/// points carrying `β = k`, set `μ_0 = s_0 - t_2`, `μ_1 = s_1 - t_1`,
/// `μ_2 = s_2 - t_0`. Then `3τ_0 = μ_0 - μ_2`, `3τ_1 = μ_2 - μ_1`,
/// `3τ_2 = μ_1 - μ_0`, so the profile vanishes iff the μ's agree (their common
/// value is then `(s - t)/3`).
pub fn n3_partition_rule<T: Real>(spec: &CurveSpec<T>, beta: &[u32]) -> Result<bool> {
    if spec.n != 3 {
        return Err(Error::InvalidBeta("partition rule is specific to N = 3".into()));
    }
    check_range(spec, beta)?;
    let mut s = [0i64; 3];
    let mut t = [0i64; 3];
    for (&b, &r) in beta.iter().zip(&spec.r) {
        match r {
            1 => s[b as usize] += 1,
            2 => t[b as usize] += 1,
            _ => unreachable!("validated exponent"),
        }
    }
    let mu = [s[0] - t[2], s[1] - t[1], s[2] - t[0]];
    Ok(mu[0] == mu[1] && mu[1] == mu[2])
}

/// Linear-equivalence shift `E_i = reduce(β_i + k R_i)` with `h_i = (β_i + k R_i - E_i)/N`.
///
/// `Σ β_i P_i - Σ E_i P_i` is the divisor of `y^{-k} ∏ (x - λ_i)^{h_i}`.
pub fn equivalence_shift<T: Real>(spec: &CurveSpec<T>, beta: &[u32], k: u32) -> (Vec<u32>, Vec<i64>) {
    let n = spec.n as i64;
    let mut e = Vec::with_capacity(beta.len());
    let mut h = Vec::with_capacity(beta.len());
    for (&b, &r) in beta.iter().zip(&spec.r) {
        let v = b as i64 + k as i64 * r as i64;
        let ei = reduce(v, n);
        e.push(ei as u32);
        h.push((v - ei) / n);
    }
    (e, h)
}

/// `β'_i = N - 1 - β_i`; corresponds to `-e_β` in the Jacobian.
pub fn negate<T: Real>(spec: &CurveSpec<T>, beta: &[u32]) -> Vec<u32> {
    beta.iter().map(|&b| spec.n - 1 - b).collect()
}

/// All β satisfying the congruence, with their profiles (for diagnostics and
/// the negative vanishing tests).
pub fn enumerate_congruent<T: Real>(spec: &CurveSpec<T>) -> Result<Vec<BetaVector>> {
    let m = spec.m();
    let n = spec.n;
    if m as f64 * (n as f64).log2() > 30.0 {
        return Err(Error::SearchTooLarge(format!("N^m = {n}^{m} exceeds 2^30")));
    }
    let total = (n as u64).pow(m as u32);
    let mut out = Vec::new();
    let mut beta = vec![0u32; m];
    for mut idx in 0..total {
        for slot in beta.iter_mut().rev() {
            *slot = (idx % n as u64) as u32;
            idx /= n as u64;
        }
        if let Ok(bv) = tau_profile(spec, &beta) {
            out.push(bv);
        }
    }
    Ok(out)
}
