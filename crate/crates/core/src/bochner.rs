//! Positive-definite functions `f = h* * h`, their Bochner measures
//! `dμ^x = f̂ dβ̂^x`, and the localization functional `s ↦ ∫ g(st) f(t) dβ^x(t)`.

use num_complex::Complex64;
use serde_json::json;

use crate::bundle::{BundleElement, BundleFunction, FibreSubset, GroupBundle};
use crate::duality::{dual_bundle, fourier};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::report::{Check, VerificationReport};
use crate::transform::{self, Sign};
use crate::DEFAULT_TOLERANCE;

/// A finite positive measure on each dual fibre `Ĝ_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct BochnerMeasure {
    weights: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

impl BochnerMeasure {
    /// Weights `μ^x(ω)`, indexed like the characters of the fibre at `base`.
    pub fn weights(&self, base: usize) -> &[f64] {
        &self.weights[base]
    }

    pub fn total_mass(&self, base: usize) -> f64 {
        self.masses[base]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `f = h* * h`.
pub fn positive_definite_from(b: &GroupBundle, h: &BundleFunction) -> Result<BundleFunction> {
    b.convolve(&b.involution(h)?, h)
}

pub fn bochner_measure(b: &GroupBundle, f: &BundleFunction) -> Result<BochnerMeasure> {
    bochner_measure_with_tolerance(b, f, DEFAULT_TOLERANCE)
}

/// `μ^x(ω) = f̂(ω) ĉ_x`. Values in `[−tol·‖f̂^x‖, 0)` are clamped to zero; anything
/// more negative, or a transform that is not real to the same tolerance, is an error.
pub fn bochner_measure_with_tolerance(b: &GroupBundle, f: &BundleFunction, tol: f64) -> Result<BochnerMeasure> {
    let db = dual_bundle(b);
    let fh = fourier(b, f)?;
    let mut weights = Vec::with_capacity(b.len());
    let mut masses = Vec::with_capacity(b.len());
    for (bi, (id, dual_fibre)) in db.fibres().enumerate() {
        let values = fh.fibre(bi);
        let threshold = tol * fh.fibre_sup_norm(bi);
        let mut w = Vec::with_capacity(values.len());
        for z in values {
            if z.re < -threshold || z.im.abs() > threshold {
                let value = if z.re < -threshold { z.re } else { -z.im.abs() };
                return Err(Error::NotPositiveDefinite { point: id.to_string(), value, threshold });
            }
            w.push(z.re.max(0.0) * dual_fibre.weight);
        }
        masses.push(w.iter().sum());
        weights.push(w);
    }
    Ok(BochnerMeasure { weights, masses })
}

/// `f(s) = Σ_ω conj(ω(s)) μ^{p(s)}(ω)` for every `s`, sup-norm residual over `1 + ‖f‖`.
pub fn bochner_inversion_check(
    b: &GroupBundle,
    f: &BundleFunction,
    mu: &BochnerMeasure,
    tol: f64,
) -> Result<VerificationReport> {
    b.check(f)?;
    check_measure_shape(b, mu)?;
    let mut worst = 0.0f64;
    let mut witness = None;
    for (bi, (id, fibre)) in b.fibres().enumerate() {
        let weights: Vec<Complex64> = mu.weights[bi].iter().map(|&w| Complex64::new(w, 0.0)).collect();
        let recon = transform::naive_or_fast(&fibre.group, &weights, Sign::Conjugate);
        for (s, (r, v)) in recon.iter().zip(f.fibre(bi)).enumerate() {
            let err = (r - v).norm();
            if err > worst {
                worst = err;
                witness = Some(json!({
                    "point": id,
                    "element": fibre.group.element_at(s).residues,
                    "f": [v.re, v.im],
                    "reconstructed": [r.re, r.im],
                }));
            }
        }
    }
    let mut report = VerificationReport::new();
    report.push(Check::within("inversion", worst / (1.0 + f.sup_norm()), tol, witness));
    Ok(report)
}

/// `μ^x(Ĝ) = ‖f^x‖_∞ = f(e_x)` on each fibre and `μ^x(Ĝ) ≤ ‖f‖_∞` globally.
pub fn mass_bound_check(b: &GroupBundle, f: &BundleFunction, mu: &BochnerMeasure, tol: f64) -> Result<VerificationReport> {
    b.check(f)?;
    check_measure_shape(b, mu)?;
    let scale = 1.0 + f.sup_norm();
    let global = f.sup_norm();
    let mut mass_worst = 0.0f64;
    let mut mass_witness = None;
    let mut peak_worst = 0.0f64;
    let mut peak_witness = None;
    let mut bound_worst = 0.0f64;
    for (bi, (id, _)) in b.fibres().enumerate() {
        let sup = f.fibre_sup_norm(bi);
        let at_identity = f.fibre(bi)[0];
        let mass = mu.total_mass(bi);
        let err = (mass - sup).abs();
        if err > mass_worst {
            mass_worst = err;
            mass_witness = Some(json!({ "point": id, "mass": mass, "sup_norm": sup }));
        }
        let peak = (sup - at_identity.re).abs() + at_identity.im.abs();
        if peak > peak_worst {
            peak_worst = peak;
            peak_witness = Some(json!({ "point": id, "f_identity": [at_identity.re, at_identity.im], "sup_norm": sup }));
        }
        bound_worst = bound_worst.max(mass - global);
    }
    let mut report = VerificationReport::new();
    report.push(Check::within("mass_equals_sup", mass_worst / scale, tol, mass_witness));
    report.push(Check::within("sup_at_identity", peak_worst / scale, tol, peak_witness));
    report.push(Check::within("mass_bounded", bound_worst.max(0.0) / scale, tol, None));
    Ok(report)
}

/// `supp(h) ⊆ U` implies `supp(h* * h) ⊆ U⁻¹U`.
pub fn support_containment_check(b: &GroupBundle, h: &BundleFunction, u: &FibreSubset) -> Result<VerificationReport> {
    b.check(h)?;
    let mut report = VerificationReport::new();
    let support_tol = DEFAULT_TOLERANCE * (1.0 + h.sup_norm()).powi(2);
    let supp_h = b.support(h, 0.0);
    report.push(Check::exact(
        "support_within_window",
        supp_h.is_subset(u),
        Some(json!({ "reason": "supp(h) is not contained in U" })),
    ));
    let f = positive_definite_from(b, h)?;
    let supp_f = b.support(&f, support_tol);
    let window = u.inverse(b).product(b, u);
    let offender = first_outside(b, &supp_f, &window);
    report.push(Check::exact("support_contained", offender.is_none(), offender));
    Ok(report)
}

fn first_outside(b: &GroupBundle, set: &FibreSubset, window: &FibreSubset) -> Option<serde_json::Value> {
    b.fibres().enumerate().find_map(|(bi, (id, fibre))| {
        set.fibre(bi)
            .iter()
            .find(|&&i| !window.contains_index(bi, i))
            .map(|&i| json!({ "point": id, "element": fibre.group.element_at(i).residues }))
    })
}

/// `c_x Σ_t g(s·t) f(t)` on the fibre of `s`.
pub fn localization_functional(
    b: &GroupBundle,
    g: &BundleFunction,
    f: &BundleFunction,
    s: &BundleElement,
) -> Result<Complex64> {
    b.check(g)?;
    b.check(f)?;
    let (bi, si) = b.locate(s)?;
    let fibre = b.fibre_at(bi).1;
    Ok(localize(&fibre.group, fibre.weight, g.fibre(bi), f.fibre(bi), si))
}

pub(crate) fn localize(group: &FiniteAbelianGroup, weight: f64, g: &[Complex64], f: &[Complex64], s: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, &ft) in f.iter().enumerate() {
        acc += g[group.mul_index(s, t)] * ft;
    }
    acc * weight
}

/// The localization functional vanishes off `W·V` whenever `supp g ⊆ W`,
/// `supp f ⊆ V` and `V = V⁻¹`; and its nonzero set lies in `supp(g)·supp(f)⁻¹`.
/// Scans every element of every fibre.
pub fn localization_check(
    b: &GroupBundle,
    g: &BundleFunction,
    f: &BundleFunction,
    w: &FibreSubset,
    v: &FibreSubset,
    tol: f64,
) -> Result<VerificationReport> {
    b.check(g)?;
    b.check(f)?;
    let mut report = VerificationReport::new();
    report.push(Check::exact(
        "window_symmetric",
        v.inverse(b) == *v,
        Some(json!({ "reason": "V is not closed under inversion" })),
    ));
    let windows_ok = b.support(g, 0.0).is_subset(w) && b.support(f, 0.0).is_subset(v);
    report.push(Check::exact(
        "supports_within_windows",
        windows_ok,
        Some(json!({ "reason": "supp(g) ⊄ W or supp(f) ⊄ V" })),
    ));

    let wv = w.product(b, v);
    let supp_prod = b.support(g, 0.0).product(b, &b.support(f, 0.0).inverse(b));
    let mut outside_worst = 0.0f64;
    let mut outside_witness = None;
    let mut nonzero = FibreSubset::empty(b);
    let scale = (1.0 + g.sup_norm()) * (1.0 + f.sup_norm());
    for (bi, (id, fibre)) in b.fibres().enumerate() {
        for s in 0..fibre.group.order() {
            let value = localize(&fibre.group, fibre.weight, g.fibre(bi), f.fibre(bi), s);
            if value.norm() > tol * scale {
                nonzero.insert_index(bi, s);
            }
            if !wv.contains_index(bi, s) && value.norm() > outside_worst {
                outside_worst = value.norm();
                outside_witness = Some(json!({
                    "point": id,
                    "element": fibre.group.element_at(s).residues,
                    "value": [value.re, value.im],
                }));
            }
        }
    }
    report.push(Check::within("vanishes_outside_window", outside_worst / scale, tol, outside_witness));
    let offender = first_outside(b, &nonzero, &supp_prod);
    report.push(Check::exact("nonzero_within_support_product", offender.is_none(), offender));
    Ok(report)
}

/// The quadratic-form test of positive definiteness: the Hermitian matrix
/// `M[s][t] = f(s⁻¹t)` is positive semidefinite. Cubic in the order, so only
/// meant for small fibres.
pub fn quadratic_form_is_psd(group: &FiniteAbelianGroup, f: &[Complex64], tol: f64) -> bool {
    let n = group.order();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|s| (0..n).map(|t| f[group.mul_index(group.inv_index(s), t)]).collect())
        .collect();
    let scale = 1.0 + f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let eps = tol * scale * n as f64;
    for i in 0..n {
        for j in 0..n {
            if (m[i][j] - m[j][i].conj()).norm() > eps {
                return false;
            }
        }
    }
    // Outer-product Cholesky with diagonal pivoting on the remaining block.
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|a, b| m[*a.1][*a.1].re.total_cmp(&m[*b.1][*b.1].re))
            .expect("nonempty");
        let pivot = m[p][p].re;
        if pivot < -eps {
            return false;
        }
        if pivot <= eps {
            return active.iter().all(|&i| active.iter().all(|&j| m[i][j].norm() <= eps));
        }
        active.swap_remove(pos);
        let col: Vec<Complex64> = active.iter().map(|&i| m[i][p]).collect();
        for (a, &i) in active.iter().enumerate() {
            for (c, &j) in active.iter().enumerate() {
                m[i][j] -= col[a] * col[c].conj() / pivot;
            }
        }
    }
    true
}

fn check_measure_shape(b: &GroupBundle, mu: &BochnerMeasure) -> Result<()> {
    let ok = mu.weights.len() == b.len() && b.fibres().zip(&mu.weights).all(|((_, f), w)| w.len() == f.group.order());
    if ok {
        Ok(())
    } else {
        Err(Error::BundleMismatch("measure does not match bundle".into()))
    }
}
