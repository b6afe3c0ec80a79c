// Brute-force oracles written straight from the definitions. They share no code
// with the library beyond the element enumeration order (last coordinate fastest).
#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use pontryagin_bundles::{BundleFunction, FiniteAbelianGroup, GroupBundle};
use rand::Rng;

pub fn order(moduli: &[u64]) -> usize {
    moduli.iter().product::<u64>() as usize
}

pub fn residues(moduli: &[u64], mut idx: usize) -> Vec<u64> {
    let mut out = vec![0; moduli.len()];
    for j in (0..moduli.len()).rev() {
        out[j] = (idx % moduli[j] as usize) as u64;
        idx /= moduli[j] as usize;
    }
    out
}

pub fn index(moduli: &[u64], r: &[u64]) -> usize {
    r.iter().zip(moduli).fold(0, |acc, (&a, &n)| acc * n as usize + (a % n) as usize)
}

pub fn add(moduli: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).zip(moduli).map(|((x, y), n)| (x + y) % n).collect()
}

pub fn neg(moduli: &[u64], a: &[u64]) -> Vec<u64> {
    a.iter().zip(moduli).map(|(x, n)| (n - x) % n).collect()
}

/// `ω(s) = exp(2πi Σ w_j a_j / n_j)`
pub fn chi(moduli: &[u64], w: &[u64], a: &[u64]) -> Complex64 {
    let t: f64 = moduli.iter().zip(w.iter().zip(a)).map(|(&n, (&x, &y))| ((x * y) % n) as f64 / n as f64).sum();
    Complex64::from_polar(1.0, TAU * t)
}

/// `f̂(ω) = c Σ_s f(s) ω(s)`
pub fn fourier(moduli: &[u64], c: f64, f: &[Complex64]) -> Vec<Complex64> {
    let n = order(moduli);
    (0..n)
        .map(|w| {
            let wr = residues(moduli, w);
            (0..n).map(|s| f[s] * chi(moduli, &wr, &residues(moduli, s))).sum::<Complex64>() * c
        })
        .collect()
}

/// `f(s) = ĉ Σ_ω F(ω) conj(ω(s))` with `ĉ = 1/(c|G|)`
pub fn inverse_fourier(moduli: &[u64], c: f64, big_f: &[Complex64]) -> Vec<Complex64> {
    let n = order(moduli);
    let chat = 1.0 / (c * n as f64);
    (0..n)
        .map(|s| {
            let sr = residues(moduli, s);
            (0..n).map(|w| big_f[w] * chi(moduli, &residues(moduli, w), &sr).conj()).sum::<Complex64>() * chat
        })
        .collect()
}

/// `(f*g)(s) = c Σ_t f(t) g(s - t)`
pub fn convolve(moduli: &[u64], c: f64, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let n = order(moduli);
    (0..n)
        .map(|s| {
            let sr = residues(moduli, s);
            (0..n)
                .map(|t| {
                    let tr = residues(moduli, t);
                    f[t] * g[index(moduli, &add(moduli, &sr, &neg(moduli, &tr)))]
                })
                .sum::<Complex64>()
                * c
        })
        .collect()
}

/// `f*(s) = conj f(-s)`
pub fn involution(moduli: &[u64], f: &[Complex64]) -> Vec<Complex64> {
    (0..f.len()).map(|s| f[index(moduli, &neg(moduli, &residues(moduli, s)))].conj()).collect()
}

pub fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn sup(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn moduli_of(g: &FiniteAbelianGroup) -> Vec<u64> {
    g.moduli().to_vec()
}

/// Random moduli with total order in `1..=max_order`.
pub fn random_moduli<R: Rng>(rng: &mut R, max_order: usize) -> Vec<u64> {
    loop {
        let rank = rng.gen_range(1..=3);
        let m: Vec<u64> = (0..rank).map(|_| rng.gen_range(1..=max_order as u64)).collect();
        if order(&m) <= max_order {
            return m;
        }
    }
}

pub fn random_weight<R: Rng>(rng: &mut R) -> f64 {
    2f64.powf(rng.gen_range(-3.0..=3.0))
}

pub fn random_bundle<R: Rng>(rng: &mut R, max_points: usize, max_order: usize) -> GroupBundle {
    let k = rng.gen_range(1..=max_points);
    GroupBundle::from_points((0..k).map(|i| {
        let m: Vec<i64> = random_moduli(rng, max_order).iter().map(|&n| n as i64).collect();
        (format!("x{i}"), FiniteAbelianGroup::new(&m).unwrap(), random_weight(rng))
    }))
    .unwrap()
}

pub fn random_function<R: Rng>(rng: &mut R, b: &GroupBundle) -> BundleFunction {
    BundleFunction::from_fn(b, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}
