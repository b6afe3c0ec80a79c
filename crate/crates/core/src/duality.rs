//! Dual bundles, the fibrewise Fourier (Gelfand) transform, the double dual and
//! the evaluation map `Φ(s)(ω) = ω(s)`.
//!
//! The transform pairs with `ω(s)`, not its conjugate:
//!
//! ```text
//! f̂(ω) = c_x Σ_{s∈G_x} f(s) ω(s)          inverse:  f(s) = ĉ_x Σ_ω F(ω) conj(ω(s))
//! ```
//!
//! and the dual Haar weight is `ĉ_x = 1 / (c_x |G_x|)`, the unique constant for
//! which `∫|f|² dβ^x = ∫|f̂|² dβ̂^x`.

use std::collections::HashMap;
use std::ops::Deref;

use num_complex::Complex64;
use serde_json::json;

use crate::bundle::{BundleElement, BundleFunction, GroupBundle};
use crate::error::Result;
use crate::group::{root_of_unity, Character, FiniteAbelianGroup};
use crate::report::{Check, VerificationReport};
use crate::transform::{self, Sign, NAIVE_CUTOFF};

/// Which summation the transform uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TransformPath {
    /// Direct `O(|G|²)` sum.
    Naive,
    /// Per-factor FFTs composed across the cyclic factors.
    Fast,
    /// Naive up to order 64, fast above.
    #[default]
    Auto,
}

impl TransformPath {
    fn run(self, group: &FiniteAbelianGroup, input: &[Complex64], sign: Sign) -> Vec<Complex64> {
        let naive = match self {
            TransformPath::Naive => true,
            TransformPath::Fast => false,
            TransformPath::Auto => group.order() <= NAIVE_CUTOFF,
        };
        if naive {
            transform::naive(group, input, sign)
        } else {
            transform::fast(group, input, sign)
        }
    }
}

/// The bundle of character groups `Ĝ_x` with the dual Haar system.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBundle {
    dual: GroupBundle,
    primal: GroupBundle,
}

impl DualBundle {
    /// The dual as a bundle in its own right.
    pub fn bundle(&self) -> &GroupBundle {
        &self.dual
    }

    pub fn primal(&self) -> &GroupBundle {
        &self.primal
    }

    pub fn weight(&self, x: &str) -> Result<f64> {
        self.dual.weight(x)
    }

    /// Reads `dual` as the dual of some bundle and recovers that bundle: the
    /// primal weight solving `ĉ = 1/(c|G|)` is `c = 1/(ĉ|G|)`.
    pub fn from_dual(dual: GroupBundle) -> Self {
        let primal = GroupBundle::from_points(
            dual.fibres().map(|(id, f)| (id, f.group.clone(), dual_weight(f.weight, f.group.order()))),
        )
        .expect("weights stay positive and finite");
        DualBundle { dual, primal }
    }
}

impl Deref for DualBundle {
    type Target = GroupBundle;

    fn deref(&self) -> &GroupBundle {
        &self.dual
    }
}

/// A function on a dual bundle, such as `f̂`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFunction(pub BundleFunction);

impl Deref for DualFunction {
    type Target = BundleFunction;

    fn deref(&self) -> &BundleFunction {
        &self.0
    }
}

impl DualFunction {
    pub fn into_inner(self) -> BundleFunction {
        self.0
    }
}

/// `ĉ_x = 1 / (c_x |G_x|)`.
pub fn dual_weight(weight: f64, order: usize) -> f64 {
    1.0 / (weight * order as f64)
}

pub fn dual_bundle(b: &GroupBundle) -> DualBundle {
    let dual = GroupBundle::from_points(
        b.fibres().map(|(id, f)| (id, f.group.clone(), dual_weight(f.weight, f.group.order()))),
    )
    .expect("dual of a valid bundle is valid");
    DualBundle { dual, primal: b.clone() }
}

/// The dual of the dual bundle; its weights return to `c_x`.
pub fn double_dual(b: &GroupBundle) -> DualBundle {
    dual_bundle(dual_bundle(b).bundle())
}

pub fn fourier(b: &GroupBundle, f: &BundleFunction) -> Result<DualFunction> {
    fourier_with(b, f, TransformPath::Auto)
}

/// `f̂(ω) = c_x Σ_s f(s) ω(s)` on every fibre.
pub fn fourier_with(b: &GroupBundle, f: &BundleFunction, path: TransformPath) -> Result<DualFunction> {
    b.check(f)?;
    let values = b
        .fibres()
        .zip(f.values())
        .map(|((_, fibre), v)| {
            path.run(&fibre.group, v, Sign::Pairing).into_iter().map(|z| z * fibre.weight).collect()
        })
        .collect();
    Ok(DualFunction(BundleFunction::from_values(b, values)?))
}

pub fn inverse_fourier(db: &DualBundle, transform: &DualFunction) -> Result<BundleFunction> {
    inverse_fourier_with(db, transform, TransformPath::Auto)
}

/// `f(s) = ĉ_x Σ_ω F(ω) conj(ω(s))`.
pub fn inverse_fourier_with(db: &DualBundle, transform: &DualFunction, path: TransformPath) -> Result<BundleFunction> {
    db.dual.check(transform)?;
    let values = db
        .dual
        .fibres()
        .zip(transform.values())
        .map(|((_, fibre), v)| {
            path.run(&fibre.group, v, Sign::Conjugate).into_iter().map(|z| z * fibre.weight).collect()
        })
        .collect();
    BundleFunction::from_values(&db.primal, values)
}

/// `Φ(s)`: the character of `Ĝ_{p(s)}` given by `ω ↦ ω(s)`.
///
/// With the self-dual coordinates this is `s`'s own residue vector; the
/// pairing equality is what [`verify_duality`] certifies.
pub fn evaluation_map(b: &GroupBundle, s: &BundleElement) -> Result<Character> {
    b.locate(s)?;
    Ok(Character { residues: s.element.residues.clone() })
}

/// Exact pairing tables of one fibre: `characters[s·n + ω]` is the numerator of
/// `ω(s)` and `evaluation[ξ·n + ω]` that of `ξ(ω)` for `ξ` in the double-dual
/// fibre, both over the common denominator `exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct FibrePairing {
    pub base_point: String,
    pub double_dual_base_point: String,
    pub group: FiniteAbelianGroup,
    pub double_dual_group: FiniteAbelianGroup,
    pub exponent: u64,
    pub characters: Vec<u64>,
    pub evaluation: Vec<u64>,
}

/// Pairing tables for every fibre, as consumed by [`verify_pairing_tables`].
#[derive(Clone, Debug, PartialEq)]
pub struct PairingTables {
    pub fibres: Vec<FibrePairing>,
}

/// Fibres above this order are not tabulated (the tables are quadratic in size).
pub const PAIRING_TABLE_CAP: usize = 2048;

pub fn pairing_tables(b: &GroupBundle) -> PairingTables {
    let dd = double_dual(b);
    let fibres = b
        .fibres()
        .zip(dd.bundle().fibres())
        .filter(|((_, f), _)| f.group.order() <= PAIRING_TABLE_CAP)
        .map(|((id, f), (dd_id, dd_f))| {
            let g = &f.group;
            let dual = g; // Ĝ_x carries the same moduli as G_x
            let ddg = &dd_f.group;
            let n = g.order();
            let exponent = g.exponent();
            let mut characters = vec![0; n * n];
            let mut evaluation = vec![0; n * n];
            for s in 0..n {
                for w in 0..n {
                    characters[s * n + w] = g.phase_index(w, s);
                    // ξ ∈ Ĝ̂_x acts on ω ∈ Ĝ_x through the dual fibre's own pairing.
                    evaluation[s * n + w] = rescale(dual.phase_index(s, w), ddg.exponent(), exponent);
                }
            }
            FibrePairing {
                base_point: id.to_string(),
                double_dual_base_point: dd_id.to_string(),
                group: g.clone(),
                double_dual_group: ddg.clone(),
                exponent,
                characters,
                evaluation,
            }
        })
        .collect();
    PairingTables { fibres }
}

fn rescale(num: u64, from: u64, to: u64) -> u64 {
    if from == to {
        num
    } else {
        (num as u128 * to as u128 / from as u128) as u64
    }
}

/// Certifies that `Φ: G → Ĝ̂` is a base-preserving bijective homomorphism on
/// every fibre, by exhaustive enumeration of the pairing tables.
pub fn verify_duality(b: &GroupBundle, tol: f64) -> VerificationReport {
    let mut report = verify_pairing_tables(&pairing_tables(b), tol);
    let skipped: Vec<&str> = b
        .fibres()
        .filter(|(_, f)| f.group.order() > PAIRING_TABLE_CAP)
        .map(|(id, _)| id)
        .collect();
    if !skipped.is_empty() {
        report.push(Check::skip(
            "untabulated_fibres",
            format!("fibres above order {PAIRING_TABLE_CAP} not tabulated: {}", skipped.join(", ")),
        ));
    }
    report
}

/// Exhaustive group homomorphism checks up to this order; above it the
/// generator form `T(s·g_j) = T(s) + T(g_j)` is used, which is equivalent.
const EXHAUSTIVE_HOM_CAP: usize = 64;

pub fn verify_pairing_tables(tables: &PairingTables, tol: f64) -> VerificationReport {
    let mut pairing_fail = None;
    let mut injective_fail = None;
    let mut surjective_fail = None;
    let mut hom_fail = None;
    let mut base_fail = None;
    let mut max_float = 0.0f64;

    for fp in &tables.fibres {
        let g = &fp.group;
        let n = g.order();
        let l = fp.exponent;
        let row = |t: &[u64], i: usize| t[i * n..(i + 1) * n].to_vec();

        if fp.base_point != fp.double_dual_base_point || fp.double_dual_group.order() != n {
            base_fail.get_or_insert(json!({
                "point": fp.base_point,
                "double_dual_point": fp.double_dual_base_point,
            }));
        }

        // Φ(s) is the double-dual element whose pairing row equals row s of ω(s).
        let by_row: HashMap<Vec<u64>, usize> = (0..n).map(|xi| (row(&fp.evaluation, xi), xi)).collect();
        let mut phi = vec![None; n];
        for (s, slot) in phi.iter_mut().enumerate() {
            *slot = by_row.get(&row(&fp.characters, s)).copied();
            if slot.is_none() {
                pairing_fail.get_or_insert(json!({
                    "point": fp.base_point,
                    "element": g.element_at(s).residues,
                    "reason": "no double-dual element pairs like ω ↦ ω(s)",
                }));
            }
            // Floating route through the coordinates returned by `evaluation_map`.
            let phi_coords = fp.double_dual_group.index_of(&g.element_at(s).residues).ok();
            for w in 0..n {
                let direct = root_of_unity(fp.characters[s * n + w], l);
                let through_phi = match phi_coords {
                    Some(xi) => root_of_unity(fp.evaluation[xi * n + w], l),
                    None => Complex64::new(f64::INFINITY, 0.0),
                };
                max_float = max_float.max((direct - through_phi).norm());
            }
        }

        let mut seen = vec![None; n];
        for (s, p) in phi.iter().enumerate() {
            if let Some(xi) = *p {
                if let Some(prev) = seen[xi] {
                    injective_fail.get_or_insert(json!({
                        "point": fp.base_point,
                        "elements": [g.element_at(prev).residues, g.element_at(s).residues],
                    }));
                }
                seen[xi] = Some(s);
            }
        }
        if let Some(xi) = seen.iter().position(Option::is_none) {
            surjective_fail.get_or_insert(json!({
                "point": fp.base_point,
                "missed": fp.double_dual_group.element_at(xi).residues,
            }));
        }

        // Φ(st) = Φ(s)Φ(t) and each Φ(s) is multiplicative on the dual fibre.
        let partners: Vec<usize> = if n <= EXHAUSTIVE_HOM_CAP {
            (0..n).collect()
        } else {
            generators(g)
        };
        'hom: for s in 0..n {
            for &t in &partners {
                let st = g.mul_index(s, t);
                for w in 0..n {
                    let lhs = fp.characters[st * n + w];
                    let rhs = (fp.characters[s * n + w] + fp.characters[t * n + w]) % l;
                    let lhs_dual = fp.characters[s * n + g.mul_index(w, t)];
                    let rhs_dual = (fp.characters[s * n + w] + fp.characters[s * n + t]) % l;
                    if lhs != rhs || lhs_dual != rhs_dual {
                        hom_fail.get_or_insert(json!({
                            "point": fp.base_point,
                            "s": g.element_at(s).residues,
                            "t": g.element_at(t).residues,
                            "character": g.element_at(w).residues,
                        }));
                        break 'hom;
                    }
                }
                if let (Some(a), Some(bb), Some(c)) = (phi[s], phi[t], phi[st]) {
                    if fp.double_dual_group.mul_index(a, bb) != c {
                        hom_fail.get_or_insert(json!({
                            "point": fp.base_point,
                            "s": g.element_at(s).residues,
                            "t": g.element_at(t).residues,
                        }));
                        break 'hom;
                    }
                }
            }
        }
    }

    let mut report = VerificationReport::new();
    let exact = |name: &str, fail: Option<serde_json::Value>| Check::exact(name, fail.is_none(), fail);
    report.push(exact("pairing", pairing_fail));
    report.push(exact("injective", injective_fail));
    report.push(exact("surjective", surjective_fail));
    report.push(exact("homomorphism", hom_fail));
    report.push(exact("base_preserving", base_fail));
    report.push(Check::within("pairing_values", max_float, tol, None));
    report
}

/// Indices of the standard generators `e_j` (skipping trivial factors).
pub(crate) fn generators(g: &FiniteAbelianGroup) -> Vec<usize> {
    (0..g.rank())
        .filter(|&j| g.moduli()[j] > 1)
        .map(|j| {
            let mut r = vec![0; g.rank()];
            r[j] = 1;
            g.index_of(&r).expect("generator in range")
        })
        .collect()
}

/// `(f*g)^ = f̂ ĝ` and `(f*)^ = conj(f̂)`, residuals scaled by `(1+‖f̂‖)(1+‖ĝ‖)`.
pub fn verify_gelfand_homomorphism(
    b: &GroupBundle,
    f: &BundleFunction,
    g: &BundleFunction,
    tol: f64,
) -> Result<VerificationReport> {
    let fh = fourier(b, f)?;
    let gh = fourier(b, g)?;
    let scale = (1.0 + fh.sup_norm()) * (1.0 + gh.sup_norm());
    let conv_hat = fourier(b, &b.convolve(f, g)?)?;
    let prod = fh.zip_with(&gh, |x, y| x * y)?;
    let star_hat = fourier(b, &b.involution(f)?)?;
    let conj = fh.map(|z| z.conj());

    let mut report = VerificationReport::new();
    report.push(Check::within("convolution", conv_hat.distance(&prod)? / scale, tol, None));
    report.push(Check::within("involution", star_hat.distance(&conj)? / scale, tol, None));
    Ok(report)
}

/// `(∫ conj(g) f dβ^x, ∫ conj(ĝ) f̂ dβ̂^x)`; the two agree by Plancherel.
pub fn plancherel_pairing(
    b: &GroupBundle,
    f: &BundleFunction,
    g: &BundleFunction,
    x: &str,
) -> Result<(Complex64, Complex64)> {
    let bi = b.base_index(x)?;
    let db = dual_bundle(b);
    let fh = fourier(b, f)?;
    let gh = fourier(b, g)?;
    let inner = |u: &[Complex64], v: &[Complex64]| u.iter().zip(v).map(|(a, c)| c.conj() * a).sum::<Complex64>();
    let lhs = inner(f.fibre(bi), g.fibre(bi)) * b.fibre_at(bi).1.weight;
    let rhs = inner(fh.fibre(bi), gh.fibre(bi)) * db.fibre_at(bi).1.weight;
    Ok((lhs, rhs))
}

/// `∫|f|² dβ^x = ∫|f̂|² dβ̂^x` on every fibre, relative residual.
pub fn verify_plancherel(b: &GroupBundle, f: &BundleFunction, tol: f64) -> Result<VerificationReport> {
    let mut worst = 0.0f64;
    let mut witness = None;
    for x in b.base() {
        let (lhs, rhs) = plancherel_pairing(b, f, f, x)?;
        let rel = (lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE);
        let rel = if lhs.norm() == 0.0 && rhs.norm() == 0.0 { 0.0 } else { rel };
        if rel > worst {
            worst = rel;
            witness = Some(json!({ "point": x, "primal": lhs.re, "dual": rhs.re }));
        }
    }
    let mut report = VerificationReport::new();
    report.push(Check::within("plancherel", worst, tol, witness));
    Ok(report)
}

/// `conj(ĝ(ω))·ω(s) = conj((λ_{s⁻¹} g)^(ω))` for every `ω ∈ Ĝ_{p(s)}`.
pub fn verify_translation_identity(
    b: &GroupBundle,
    g: &BundleFunction,
    s: &BundleElement,
    tol: f64,
) -> Result<VerificationReport> {
    let (bi, si) = b.locate(s)?;
    let fibre = b.fibre_at(bi).1;
    let group = &fibre.group;
    let gh = fourier(b, g)?;
    let s_inv = BundleElement::new(s.base_point.clone(), group.element_at(group.inv_index(si)));
    let moved = b.translate(&s_inv, g)?;
    let moved_hat: Vec<Complex64> = TransformPath::Auto
        .run(group, &moved, Sign::Pairing)
        .into_iter()
        .map(|z| z * fibre.weight)
        .collect();
    let roots = group.roots();
    let mut worst = 0.0f64;
    let mut witness = None;
    for (w, &mh) in moved_hat.iter().enumerate() {
        let lhs = gh.fibre(bi)[w].conj() * roots[group.phase_index(w, si) as usize];
        let rhs = mh.conj();
        let r = (lhs - rhs).norm();
        if r > worst {
            worst = r;
            witness = Some(json!({ "character": group.element_at(w).residues, "lhs": [lhs.re, lhs.im], "rhs": [rhs.re, rhs.im] }));
        }
    }
    let mut report = VerificationReport::new();
    report.push(Check::within("translation_identity", worst / (1.0 + gh.fibre_sup_norm(bi)), tol, witness));
    Ok(report)
}

/// Two bundles that differ only in Haar weights have identical character sets
/// and pairing tables; only the dual weights differ.
pub fn haar_independence_check(b: &GroupBundle, other: &GroupBundle) -> VerificationReport {
    let mut report = VerificationReport::new();
    let same_shape = b.len() == other.len()
        && b.fibres().zip(other.fibres()).all(|((x, f), (y, g))| x == y && f.group == g.group);
    report.push(Check::exact(
        "same_base_and_fibres",
        same_shape,
        Some(json!({ "reason": "bundles differ in base points or fibres" })),
    ));
    if !same_shape {
        return report;
    }
    let d1 = dual_bundle(b);
    let d2 = dual_bundle(other);
    let chars_equal = d1
        .fibres()
        .zip(d2.fibres())
        .all(|((_, f), (_, g))| f.group.characters() == g.group.characters());
    report.push(Check::exact("character_sets", chars_equal, None));

    let t1 = pairing_tables(b);
    let t2 = pairing_tables(other);
    let mismatch = t1
        .fibres
        .iter()
        .zip(&t2.fibres)
        .find(|(p, q)| p.characters != q.characters || p.evaluation != q.evaluation)
        .map(|(p, _)| json!({ "point": p.base_point }));
    report.push(Check::exact("pairing_tables", mismatch.is_none(), mismatch));

    let mut worst = 0.0f64;
    let mut weights = Vec::new();
    for (((x, f1), (_, f2)), ((_, p1), (_, p2))) in d1.fibres().zip(d2.fibres()).zip(b.fibres().zip(other.fibres())) {
        let n = f1.group.order();
        let e1 = dual_weight(p1.weight, n);
        let e2 = dual_weight(p2.weight, n);
        worst = worst.max(((f1.weight - e1) / e1).abs()).max(((f2.weight - e2) / e2).abs());
        weights.push(json!({ "point": x, "dual_weights": [f1.weight, f2.weight] }));
    }
    report.push(Check::within("dual_weights", worst, 1e-12, None).with_data(json!(weights)));

    let weights_equal = b.fibres().zip(other.fibres()).all(|((_, f), (_, g))| f.weight == g.weight);
    if weights_equal {
        report.push(Check::exact("identical_duals", d1 == d2, None));
    }
    report
}

/// `f̂` transformed once more, as a function on the double dual.
pub fn double_transform(b: &GroupBundle, f: &BundleFunction) -> Result<(DualBundle, BundleFunction)> {
    let db = dual_bundle(b);
    let fh = fourier(b, f)?;
    let ffh = fourier(db.bundle(), &fh)?;
    Ok((double_dual(b), ffh.into_inner()))
}

/// `(f̂)^(Φ(s)) = f(s⁻¹)` for every `s`, sup-norm residual over `1 + ‖f‖`.
pub fn verify_pullback_identity(b: &GroupBundle, f: &BundleFunction, tol: f64) -> Result<VerificationReport> {
    let (dd, ffh) = double_transform(b, f)?;
    let mut worst = 0.0f64;
    let mut witness = None;
    for (bi, (id, fibre)) in b.fibres().enumerate() {
        let group = &fibre.group;
        for s in 0..group.order() {
            let phi = evaluation_map(b, &BundleElement::new(id, group.element_at(s)))?;
            let xi = dd.fibre_at(bi).1.group.index_of(&phi.residues)?;
            let lhs = ffh.fibre(bi)[xi];
            let rhs = f.fibre(bi)[group.inv_index(s)];
            let r = (lhs - rhs).norm();
            if r > worst {
                worst = r;
                witness = Some(json!({ "point": id, "element": group.element_at(s).residues, "double_transform": [lhs.re, lhs.im], "f_inverse": [rhs.re, rhs.im] }));
            }
        }
    }
    let mut report = VerificationReport::new();
    report.push(Check::within("pullback_identity", worst / (1.0 + f.sup_norm()), tol, witness));
    Ok(report)
}

/// The Haar-normalisation round trip `ĉ̂_x = c_x`, relative residual.
pub fn verify_double_dual_weights(b: &GroupBundle, tol: f64) -> VerificationReport {
    let dd = double_dual(b);
    let worst = b
        .fibres()
        .zip(dd.fibres())
        .map(|((_, f), (_, g))| ((g.weight - f.weight) / f.weight).abs())
        .fold(0.0, f64::max);
    let mut report = VerificationReport::new();
    report.push(Check::within("double_dual_weights", worst, tol, None));
    report
}

impl From<&DualBundle> for GroupBundle {
    fn from(db: &DualBundle) -> Self {
        db.dual.clone()
    }
}
