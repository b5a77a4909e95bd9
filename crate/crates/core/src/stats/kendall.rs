//! Kendall's τ-b in `O(n log n)` (Knight's algorithm).

use crate::error::{Error, Result};
use crate::perf::ScoreValue;

/// τ-b over the pairs where both values are defined.
///
/// Undefined when fewer than two pairs remain or either side is constant.
pub fn kendall_tau(xs: &[ScoreValue], ys: &[ScoreValue]) -> Result<ScoreValue> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "kendall_tau needs equal lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter_map(|(x, y)| Some((x.value()?, y.value()?)))
        .collect();
    Ok(tau_b(pairs))
}

pub fn kendall_tau_f64(xs: &[f64], ys: &[f64]) -> ScoreValue {
    tau_b(xs.iter().copied().zip(ys.iter().copied()).collect())
}

fn tau_b(mut pairs: Vec<(f64, f64)>) -> ScoreValue {
    if pairs.len() < 2 {
        return ScoreValue::Undefined;
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let x_ties = tie_pairs(pairs.iter().map(|p| p.0));
    let joint_ties = tie_pairs_by(&pairs, |p, q| p.0 == q.0 && p.1 == q.1);
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    finish(&mut ys, x_ties, joint_ties)
}

/// Completes τ-b from `ys` listed in x order (ties in x broken by y).
pub(crate) fn finish(ys: &mut [f64], x_ties: u64, joint_ties: u64) -> ScoreValue {
    let n = ys.len() as u64;
    let n0 = n * (n - 1) / 2;
    let discordant = sort_count_inversions(ys);
    let y_ties = tie_pairs(ys.iter().copied());
    let num = n0 as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * discordant as f64;
    let den = ((n0 - x_ties) as f64 * (n0 - y_ties) as f64).sqrt();
    if den == 0.0 {
        ScoreValue::Undefined
    } else {
        ScoreValue::Defined((num / den).clamp(-1.0, 1.0))
    }
}

/// `Σ t(t−1)/2` over runs of equal consecutive values.
pub(crate) fn tie_pairs(sorted: impl Iterator<Item = f64>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<f64> = None;
    for v in sorted {
        if prev == Some(v) {
            run += 1;
        } else {
            total += run * (run + 1) / 2;
            run = 0;
        }
        prev = Some(v);
    }
    total + run * (run + 1) / 2
}

pub(crate) fn tie_pairs_by<T>(sorted: &[T], eq: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    for w in sorted.windows(2) {
        if eq(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run + 1) / 2;
            run = 0;
        }
    }
    total + run * (run + 1) / 2
}

/// Sorts ascending and returns the number of pairs `i < j` with `v[i] > v[j]`.
pub(crate) fn sort_count_inversions(v: &mut [f64]) -> u64 {
    let n = v.len();
    let mut buf = v.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    // Bottom-up merge sort, alternating between `v` and `buf`.
    let mut src_is_v = true;
    while width < n {
        {
            let (src, dst): (&[f64], &mut [f64]) =
                if src_is_v { (&*v, &mut buf[..]) } else { (&buf[..], &mut *v) };
            let mut start = 0;
            while start < n {
                let mid = (start + width).min(n);
                let end = (start + 2 * width).min(n);
                let (mut i, mut j, mut k) = (start, mid, start);
                while i < mid && j < end {
                    if src[j] < src[i] {
                        dst[k] = src[j];
                        swaps += (mid - i) as u64;
                        j += 1;
                    } else {
                        dst[k] = src[i];
                        i += 1;
                    }
                    k += 1;
                }
                dst[k..k + mid - i].copy_from_slice(&src[i..mid]);
                k += mid - i;
                dst[k..k + end - j].copy_from_slice(&src[j..end]);
                start = end;
            }
        }
        src_is_v = !src_is_v;
        width *= 2;
    }
    if !src_is_v {
        v.copy_from_slice(&buf);
    }
    swaps
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct pair counting.
    fn brute(xs: &[f64], ys: &[f64]) -> ScoreValue {
        let n = xs.len();
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let sx = xs[i].partial_cmp(&xs[j]).unwrap() as i32;
                let sy = ys[i].partial_cmp(&ys[j]).unwrap() as i32;
                if sx == 0 && sy == 0 {
                    continue;
                } else if sx == 0 {
                    tx += 1;
                } else if sy == 0 {
                    ty += 1;
                } else if sx == sy {
                    c += 1;
                } else {
                    d += 1;
                }
            }
        }
        let den = (((c + d + tx) * (c + d + ty)) as f64).sqrt();
        if den == 0.0 {
            ScoreValue::Undefined
        } else {
            ScoreValue::Defined((c - d) as f64 / den)
        }
    }

    #[test]
    fn examples() {
        assert_eq!(kendall_tau_f64(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), ScoreValue::Defined(1.0));
        assert_eq!(kendall_tau_f64(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), ScoreValue::Defined(-1.0));
        let t = kendall_tau_f64(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(kendall_tau_f64(&[1.0], &[1.0]), ScoreValue::Undefined);
        assert_eq!(kendall_tau_f64(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), ScoreValue::Undefined);
    }

    #[test]
    fn undefined_pairs_are_dropped() {
        let u = ScoreValue::Undefined;
        let d = ScoreValue::Defined;
        let xs = [d(1.0), u, d(2.0), d(3.0)];
        let ys = [d(1.0), d(9.0), u, d(3.0)];
        assert_eq!(kendall_tau(&xs, &ys).unwrap(), d(1.0));
        let ys2 = [u, d(9.0), u, d(3.0)];
        assert_eq!(kendall_tau(&xs, &ys2).unwrap(), u);
        assert!(kendall_tau(&xs, &ys[..2]).is_err());
    }

    #[test]
    fn matches_brute_force_with_ties() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % 7
        };
        for n in [2, 3, 5, 17, 64, 200] {
            for _ in 0..20 {
                let xs: Vec<f64> = (0..n).map(|_| next() as f64).collect();
                let ys: Vec<f64> = (0..n).map(|_| next() as f64).collect();
                let fast = kendall_tau_f64(&xs, &ys);
                let slow = brute(&xs, &ys);
                match (fast, slow) {
                    (ScoreValue::Defined(a), ScoreValue::Defined(b)) => assert!((a - b).abs() < 1e-12),
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }

    #[test]
    fn inversion_count() {
        let mut v = vec![3.0, 1.0, 2.0, 5.0, 4.0];
        assert_eq!(sort_count_inversions(&mut v), 3);
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }
}
