//! Group bundles over a finite base and the convolution *-algebra `C_c(G)`.
//!
//! The Haar measure on the fibre over `x` is `β^x = c_x · counting`, so every
//! integral over a fibre is a weighted finite sum. Functions are stored densely,
//! one vector per base point, indexed by [`FiniteAbelianGroup::enumerate`].

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement, MAX_ORDER};
use crate::transform::{self, Sign, NAIVE_CUTOFF};

#[derive(Clone, Debug, PartialEq)]
pub struct Fibre {
    pub group: FiniteAbelianGroup,
    /// `c_x` in `β^x = c_x · counting`.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupBundle {
    fibres: IndexMap<String, Fibre>,
}

/// A point `s` of the bundle together with its base point `p(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BundleElement {
    pub base_point: String,
    pub element: GroupElement,
}

impl BundleElement {
    pub fn new(base_point: impl Into<String>, element: GroupElement) -> Self {
        BundleElement { base_point: base_point.into(), element }
    }
}

/// An element of `C_c(G)`: one complex vector per base point.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleFunction {
    values: Vec<Vec<Complex64>>,
}

/// A set of fibre elements per base point, stored as enumeration indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FibreSubset {
    sets: Vec<BTreeSet<usize>>,
}

impl GroupBundle {
    /// Validates a bundle from its base, fibres and Haar weights.
    pub fn new(
        base: Vec<String>,
        fibres: HashMap<String, FiniteAbelianGroup>,
        weights: HashMap<String, f64>,
    ) -> Result<Self> {
        for id in fibres.keys().chain(weights.keys()) {
            if !base.contains(id) {
                return Err(Error::UnknownBasePoint(id.clone()));
            }
        }
        let mut points = Vec::with_capacity(base.len());
        for id in base {
            let group = fibres.get(&id).cloned().ok_or_else(|| Error::MissingFibre(id.clone()))?;
            let weight = *weights
                .get(&id)
                .ok_or_else(|| Error::NonPositiveWeight { point: id.clone(), weight: f64::NAN })?;
            points.push((id, group, weight));
        }
        Self::from_points(points)
    }

    /// Builds a bundle from `(base point, fibre, weight)` triples in base order.
    pub fn from_points<S: Into<String>>(
        points: impl IntoIterator<Item = (S, FiniteAbelianGroup, f64)>,
    ) -> Result<Self> {
        let mut fibres = IndexMap::new();
        let mut total: u128 = 0;
        for (id, group, weight) in points {
            let id = id.into();
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NonPositiveWeight { point: id, weight });
            }
            total += group.order() as u128;
            if total > MAX_ORDER {
                return Err(Error::SizeCap { total });
            }
            if fibres.contains_key(&id) {
                return Err(Error::DuplicateBasePoint(id));
            }
            fibres.insert(id, Fibre { group, weight });
        }
        Ok(GroupBundle { fibres })
    }

    /// A bundle over a single point: an ordinary group with Haar weight `weight`.
    pub fn single(id: &str, group: FiniteAbelianGroup, weight: f64) -> Result<Self> {
        Self::from_points([(id, group, weight)])
    }

    pub fn len(&self) -> usize {
        self.fibres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibres.is_empty()
    }

    pub fn base(&self) -> impl Iterator<Item = &str> {
        self.fibres.keys().map(String::as_str)
    }

    pub fn base_index(&self, x: &str) -> Result<usize> {
        self.fibres.get_index_of(x).ok_or_else(|| Error::UnknownBasePoint(x.to_string()))
    }

    pub fn fibre(&self, x: &str) -> Result<&Fibre> {
        self.fibres.get(x).ok_or_else(|| Error::UnknownBasePoint(x.to_string()))
    }

    pub fn fibre_at(&self, index: usize) -> (&str, &Fibre) {
        let (id, fibre) = self.fibres.get_index(index).expect("base index in range");
        (id.as_str(), fibre)
    }

    pub fn fibres(&self) -> impl Iterator<Item = (&str, &Fibre)> {
        self.fibres.iter().map(|(id, f)| (id.as_str(), f))
    }

    pub fn group(&self, x: &str) -> Result<&FiniteAbelianGroup> {
        Ok(&self.fibre(x)?.group)
    }

    pub fn weight(&self, x: &str) -> Result<f64> {
        Ok(self.fibre(x)?.weight)
    }

    pub fn total_size(&self) -> usize {
        self.fibres.values().map(|f| f.group.order()).sum()
    }

    /// Same base and fibres, new Haar weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::BundleMismatch(format!(
                "{} weights for {} base points",
                weights.len(),
                self.len()
            )));
        }
        Self::from_points(self.fibres().zip(weights).map(|((id, f), &w)| (id, f.group.clone(), w)))
    }

    pub fn element(&self, x: &str, residues: &[u64]) -> Result<BundleElement> {
        let element = self.group(x)?.element(residues)?;
        Ok(BundleElement::new(x, element))
    }

    pub fn identity(&self, x: &str) -> Result<BundleElement> {
        Ok(BundleElement::new(x, self.group(x)?.identity()))
    }

    /// Every element of the bundle, base point by base point.
    pub fn elements(&self) -> Vec<BundleElement> {
        self.fibres()
            .flat_map(|(id, f)| f.group.enumerate().into_iter().map(move |e| BundleElement::new(id, e)))
            .collect()
    }

    /// Resolves `s` to `(base index, element index)`.
    pub fn locate(&self, s: &BundleElement) -> Result<(usize, usize)> {
        let bi = self.base_index(&s.base_point)?;
        let ei = self.fibre_at(bi).1.group.index_of(&s.element.residues)?;
        Ok((bi, ei))
    }

    pub(crate) fn check(&self, f: &BundleFunction) -> Result<()> {
        if f.values.len() != self.len() {
            return Err(Error::BundleMismatch(format!(
                "function has {} fibres, bundle has {}",
                f.values.len(),
                self.len()
            )));
        }
        for ((id, fibre), v) in self.fibres().zip(&f.values) {
            if v.len() != fibre.group.order() {
                return Err(Error::BundleMismatch(format!(
                    "fibre `{id}` has order {}, function provides {} values",
                    fibre.group.order(),
                    v.len()
                )));
            }
        }
        Ok(())
    }

    /// `∫ f dβ^x = c_x Σ_{s∈G_x} f(s)`.
    pub fn integrate(&self, f: &BundleFunction, x: &str) -> Result<Complex64> {
        self.check(f)?;
        let bi = self.base_index(x)?;
        let sum: Complex64 = f.values[bi].iter().sum();
        Ok(sum * self.fibre_at(bi).1.weight)
    }

    /// `(f * g)(s) = c_{p(s)} Σ_t f(t) g(t⁻¹s)`, fibre by fibre.
    pub fn convolve(&self, f: &BundleFunction, g: &BundleFunction) -> Result<BundleFunction> {
        self.check(f)?;
        self.check(g)?;
        let values = self
            .fibres()
            .zip(f.values.iter().zip(&g.values))
            .map(|((_, fibre), (fv, gv))| {
                if fibre.group.order() <= NAIVE_CUTOFF {
                    convolve_direct(&fibre.group, fibre.weight, fv, gv)
                } else {
                    convolve_spectral(&fibre.group, fibre.weight, fv, gv)
                }
            })
            .collect();
        Ok(BundleFunction { values })
    }

    /// `f*(s) = conj(f(s⁻¹))`.
    pub fn involution(&self, f: &BundleFunction) -> Result<BundleFunction> {
        self.check(f)?;
        let values = self
            .fibres()
            .zip(&f.values)
            .map(|((_, fibre), v)| (0..v.len()).map(|i| v[fibre.group.inv_index(i)].conj()).collect())
            .collect();
        Ok(BundleFunction { values })
    }

    /// Left translate `(λ_r g)(t) = g(r⁻¹t)` on the fibre `G_{p(r)}`.
    pub fn translate(&self, r: &BundleElement, g: &BundleFunction) -> Result<Vec<Complex64>> {
        self.check(g)?;
        let (bi, ri) = self.locate(r)?;
        let group = &self.fibre_at(bi).1.group;
        let r_inv = group.inv_index(ri);
        let gv = &g.values[bi];
        Ok((0..gv.len()).map(|t| gv[group.mul_index(r_inv, t)]).collect())
    }

    /// Indices where `|f(s)| > tol`.
    pub fn support(&self, f: &BundleFunction, tol: f64) -> FibreSubset {
        let sets = f
            .values
            .iter()
            .map(|v| v.iter().enumerate().filter(|(_, z)| z.norm() > tol).map(|(i, _)| i).collect())
            .collect();
        FibreSubset { sets }
    }
}

fn convolve_direct(group: &FiniteAbelianGroup, weight: f64, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (s, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &ft) in f.iter().enumerate() {
            acc += ft * g[group.mul_index(group.inv_index(t), s)];
        }
        *slot = acc * weight;
    }
    out
}

fn convolve_spectral(group: &FiniteAbelianGroup, weight: f64, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let fh = transform::fast(group, f, Sign::Pairing);
    let gh = transform::fast(group, g, Sign::Pairing);
    let prod: Vec<Complex64> = fh.iter().zip(&gh).map(|(a, b)| a * b).collect();
    let scale = weight / group.order() as f64;
    transform::fast(group, &prod, Sign::Conjugate).into_iter().map(|z| z * scale).collect()
}

impl BundleFunction {
    pub fn zeros(b: &GroupBundle) -> Self {
        Self::from_fn(b, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn constant(b: &GroupBundle, value: Complex64) -> Self {
        Self::from_fn(b, |_, _| value)
    }

    /// Evaluates `f(base point, element)` on every element of the bundle.
    pub fn from_fn(b: &GroupBundle, mut f: impl FnMut(&str, &GroupElement) -> Complex64) -> Self {
        let values = b
            .fibres()
            .map(|(id, fibre)| fibre.group.enumerate().iter().map(|e| f(id, e)).collect())
            .collect();
        BundleFunction { values }
    }

    /// Wraps raw per-fibre vectors, checking them against `b`.
    pub fn from_values(b: &GroupBundle, values: Vec<Vec<Complex64>>) -> Result<Self> {
        let f = BundleFunction { values };
        b.check(&f)?;
        Ok(f)
    }

    /// The indicator of a single bundle element.
    pub fn delta(b: &GroupBundle, s: &BundleElement) -> Result<Self> {
        let (bi, ei) = b.locate(s)?;
        let mut f = Self::zeros(b);
        f.values[bi][ei] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// The indicator of a subset.
    pub fn indicator(b: &GroupBundle, set: &FibreSubset) -> Result<Self> {
        let mut f = Self::zeros(b);
        if set.sets.len() != b.len() {
            return Err(Error::BundleMismatch("subset shape does not match bundle".into()));
        }
        for (v, s) in f.values.iter_mut().zip(&set.sets) {
            for &i in s {
                *v.get_mut(i).ok_or_else(|| Error::BundleMismatch(format!("index {i} out of range")))? =
                    Complex64::new(1.0, 0.0);
            }
        }
        Ok(f)
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Vec<Complex64>> {
        self.values
    }

    pub fn fibre(&self, index: usize) -> &[Complex64] {
        &self.values[index]
    }

    pub fn fibre_mut(&mut self, index: usize) -> &mut [Complex64] {
        &mut self.values[index]
    }

    pub fn at(&self, b: &GroupBundle, s: &BundleElement) -> Result<Complex64> {
        b.check(self)?;
        let (bi, ei) = b.locate(s)?;
        Ok(self.values[bi][ei])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fibre_sup_norm(&self, index: usize) -> f64 {
        self.values[index].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.map(|z| z * alpha)
    }

    pub fn map(&self, mut op: impl FnMut(Complex64) -> Complex64) -> Self {
        let values = self.values.iter().map(|v| v.iter().map(|&z| op(z)).collect()).collect();
        BundleFunction { values }
    }

    /// Pointwise combination of two functions with the same shape.
    pub fn zip_with(&self, other: &Self, mut op: impl FnMut(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.values.len() != other.values.len()
            || self.values.iter().zip(&other.values).any(|(a, b)| a.len() != b.len())
        {
            return Err(Error::BundleMismatch("functions have different shapes".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect())
            .collect();
        Ok(BundleFunction { values })
    }

    /// `sup |self − other|`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.zip_with(other, |a, b| a - b)?.sup_norm())
    }
}

impl FibreSubset {
    pub fn empty(b: &GroupBundle) -> Self {
        FibreSubset { sets: vec![BTreeSet::new(); b.len()] }
    }

    /// The whole of every fibre.
    pub fn full(b: &GroupBundle) -> Self {
        FibreSubset { sets: b.fibres().map(|(_, f)| (0..f.group.order()).collect()).collect() }
    }

    pub fn from_elements<'a>(b: &GroupBundle, elements: impl IntoIterator<Item = &'a BundleElement>) -> Result<Self> {
        let mut set = Self::empty(b);
        for s in elements {
            set.insert(b, s)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, b: &GroupBundle, s: &BundleElement) -> Result<()> {
        let (bi, ei) = b.locate(s)?;
        self.sets[bi].insert(ei);
        Ok(())
    }

    pub fn insert_index(&mut self, base: usize, element: usize) {
        self.sets[base].insert(element);
    }

    pub fn contains(&self, b: &GroupBundle, s: &BundleElement) -> Result<bool> {
        let (bi, ei) = b.locate(s)?;
        Ok(self.sets[bi].contains(&ei))
    }

    pub fn contains_index(&self, base: usize, element: usize) -> bool {
        self.sets.get(base).is_some_and(|s| s.contains(&element))
    }

    /// Element indices in the fibre at `base`.
    pub fn fibre(&self, base: usize) -> &BTreeSet<usize> {
        &self.sets[base]
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(BTreeSet::is_empty)
    }

    pub fn len(&self) -> usize {
        self.sets.iter().map(BTreeSet::len).sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.sets.len() == other.sets.len() && self.sets.iter().zip(&other.sets).all(|(a, b)| a.is_subset(b))
    }

    /// `{ t⁻¹ : t ∈ self }`.
    pub fn inverse(&self, b: &GroupBundle) -> Self {
        let sets = self
            .sets
            .iter()
            .enumerate()
            .map(|(bi, s)| {
                let group = &b.fibre_at(bi).1.group;
                s.iter().map(|&i| group.inv_index(i)).collect()
            })
            .collect();
        FibreSubset { sets }
    }

    /// Fibrewise product set `{ t·u : t ∈ self, u ∈ other }`.
    pub fn product(&self, b: &GroupBundle, other: &Self) -> Self {
        let sets = self
            .sets
            .iter()
            .zip(&other.sets)
            .enumerate()
            .map(|(bi, (s, o))| {
                let group = &b.fibre_at(bi).1.group;
                s.iter().flat_map(|&t| o.iter().map(move |&u| group.mul_index(t, u))).collect()
            })
            .collect();
        FibreSubset { sets }
    }

    pub fn union(&self, other: &Self) -> Self {
        let sets = self.sets.iter().zip(&other.sets).map(|(a, b)| a.union(b).copied().collect()).collect();
        FibreSubset { sets }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    #[test]
    fn make_bundle_validation() {
        let b = GroupBundle::single("x", z(4), 1.0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.total_size(), 4);

        let b = GroupBundle::from_points([("a", z(2), 1.0), ("b", z(3), 0.5)]).unwrap();
        assert_eq!(b.weight("b").unwrap(), 0.5);

        assert!(matches!(
            GroupBundle::single("x", z(4), 0.0),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            GroupBundle::from_points([("a", z(2), 1.0), ("a", z(3), 1.0)]),
            Err(Error::DuplicateBasePoint(_))
        ));
        let big = FiniteAbelianGroup::new(&[1 << 20]).unwrap();
        assert!(matches!(
            GroupBundle::from_points([("a", big, 1.0), ("b", z(2), 1.0)]),
            Err(Error::SizeCap { .. })
        ));

        let fibres = HashMap::from([("a".to_string(), z(2))]);
        let weights = HashMap::from([("a".to_string(), 1.0), ("b".to_string(), 1.0)]);
        assert_eq!(
            GroupBundle::new(vec!["a".into(), "b".into()], fibres, weights),
            Err(Error::MissingFibre("b".into()))
        );
    }

    #[test]
    fn integrate_counts_with_weight() {
        let b = GroupBundle::single("x", z(4), 1.0).unwrap();
        let one = BundleFunction::constant(&b, c(1.0));
        assert_eq!(b.integrate(&one, "x").unwrap(), c(4.0));

        let b = GroupBundle::single("x", z(4), 0.25).unwrap();
        assert_eq!(b.integrate(&one, "x").unwrap(), c(1.0));

        let b = GroupBundle::single("x", z(4), 2.5).unwrap();
        let d = BundleFunction::delta(&b, &b.identity("x").unwrap()).unwrap();
        assert_eq!(b.integrate(&d, "x").unwrap(), c(2.5));
        assert_eq!(b.integrate(&d, "y"), Err(Error::UnknownBasePoint("y".into())));
    }

    #[test]
    fn delta_convolution() {
        for weight in [1.0, 2.0] {
            let b = GroupBundle::single("x", FiniteAbelianGroup::new(&[2, 3]).unwrap(), weight).unwrap();
            let a = b.element("x", &[1, 2]).unwrap();
            let s = b.element("x", &[1, 1]).unwrap();
            let prod = b.element("x", &[0, 0]).unwrap();
            let lhs = b.convolve(&BundleFunction::delta(&b, &a).unwrap(), &BundleFunction::delta(&b, &s).unwrap()).unwrap();
            let rhs = BundleFunction::delta(&b, &prod).unwrap().scale(c(weight));
            assert!(lhs.distance(&rhs).unwrap() < 1e-15);
        }
    }

    #[test]
    fn spectral_convolution_matches_direct() {
        let g = FiniteAbelianGroup::new(&[10, 9]).unwrap();
        let f: Vec<Complex64> = (0..90).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
        let h: Vec<Complex64> = (0..90).map(|i| Complex64::new((i as f64 * 0.3).cos(), 0.1 * i as f64)).collect();
        let a = convolve_direct(&g, 0.7, &f, &h);
        let b = convolve_spectral(&g, 0.7, &f, &h);
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn involution_and_translation() {
        let b = GroupBundle::single("x", z(4), 1.0).unwrap();
        let a = b.element("x", &[1]).unwrap();
        let a_inv = b.element("x", &[3]).unwrap();
        let d = BundleFunction::delta(&b, &a).unwrap();
        assert_eq!(b.involution(&d).unwrap(), BundleFunction::delta(&b, &a_inv).unwrap());

        // real and even: f(s) = f(-s)
        let even = BundleFunction::from_values(&b, vec![vec![c(2.0), c(1.0), c(5.0), c(1.0)]]).unwrap();
        assert_eq!(b.involution(&even).unwrap(), even);

        let d0 = BundleFunction::delta(&b, &b.identity("x").unwrap()).unwrap();
        assert_eq!(b.translate(&a, &d0).unwrap(), vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(b.translate(&b.identity("x").unwrap(), &even).unwrap(), even.fibre(0).to_vec());

        let moved = BundleFunction::from_values(&b, vec![b.translate(&a, &even).unwrap()]).unwrap();
        assert_eq!(b.translate(&a_inv, &moved).unwrap(), even.fibre(0).to_vec());
    }

    #[test]
    fn support_and_subsets() {
        let b = GroupBundle::single("x", z(8), 1.0).unwrap();
        assert!(b.support(&BundleFunction::zeros(&b), 0.0).is_empty());
        let a = b.element("x", &[3]).unwrap();
        let supp = b.support(&BundleFunction::delta(&b, &a).unwrap(), 0.0);
        assert_eq!(supp, FibreSubset::from_elements(&b, [&a]).unwrap());

        let u = FibreSubset::from_elements(&b, [&b.element("x", &[1]).unwrap(), &b.element("x", &[2]).unwrap()]).unwrap();
        let uu = u.inverse(&b).product(&b, &u);
        let got: Vec<usize> = uu.fibre(0).iter().copied().collect();
        assert_eq!(got, vec![0, 1, 7]);
    }

    #[test]
    fn mismatched_functions_rejected() {
        let b = GroupBundle::single("x", z(4), 1.0).unwrap();
        let other = GroupBundle::single("x", z(5), 1.0).unwrap();
        let f = BundleFunction::zeros(&other);
        assert!(matches!(b.convolve(&f, &f), Err(Error::BundleMismatch(_))));
        assert!(matches!(b.involution(&f), Err(Error::BundleMismatch(_))));
    }
}
