// Unnormalised multi-dimensional DFT over ∏ Z_{n_j}, in both sign conventions.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::group::FiniteAbelianGroup;

/// Fibres up to this order use the direct O(|G|²) sum under `TransformPath::Auto`.
pub(crate) const NAIVE_CUTOFF: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sign {
    /// `out[ω] = Σ_s in[s]·ω(s)`
    Pairing,
    /// `out[s] = Σ_ω in[ω]·conj(ω(s))`
    Conjugate,
}

pub(crate) fn naive_or_fast(group: &FiniteAbelianGroup, input: &[Complex64], sign: Sign) -> Vec<Complex64> {
    if group.order() <= NAIVE_CUTOFF {
        naive(group, input, sign)
    } else {
        fast(group, input, sign)
    }
}

pub(crate) fn naive(group: &FiniteAbelianGroup, input: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let n = group.order();
    let l = group.exponent();
    let roots = group.roots();
    (0..n)
        .map(|w| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, &v) in input.iter().enumerate() {
                let k = group.phase_index(w, a);
                let k = match sign {
                    Sign::Pairing => k,
                    Sign::Conjugate => (l - k) % l,
                };
                acc += v * roots[k as usize];
            }
            acc
        })
        .collect()
}

pub(crate) fn fast(group: &FiniteAbelianGroup, input: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let direction = match sign {
        Sign::Pairing => FftDirection::Inverse,
        Sign::Conjugate => FftDirection::Forward,
    };
    let mut data = input.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let order = group.order();
    let mut stride = order;
    for &modulus in group.moduli() {
        let n = modulus as usize;
        stride /= n;
        if n == 1 {
            continue;
        }
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = n * stride;
        for outer in (0..order).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, &v) in line.iter().enumerate() {
                    data[start + k * stride] = v;
                }
            }
        }
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_matches_naive_on_mixed_moduli() {
        for moduli in [vec![6], vec![2, 3], vec![4, 1, 5], vec![7, 2], vec![3, 3, 3]] {
            let g = FiniteAbelianGroup::new(&moduli).unwrap();
            let input: Vec<Complex64> = (0..g.order())
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
                .collect();
            for sign in [Sign::Pairing, Sign::Conjugate] {
                let a = naive(&g, &input, sign);
                let b = fast(&g, &input, sign);
                let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(err < 1e-12, "{moduli:?} {sign:?}: {err}");
            }
        }
    }
}
