//! Finite Abelian groups presented as products of cyclic groups.
//!
//! A group is `Z_{n_1} × … × Z_{n_k}`. Elements and characters share the residue
//! representation: the character with residues `w` pairs with the element `a` as
//! `exp(2πi Σ_j w_j a_j / n_j)`. All group arithmetic is integer-exact; the
//! pairing is also available as an exact rational [`Phase`].

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported group order (and total bundle size).
pub const MAX_ORDER: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
    order: usize,
    exponent: u64,
    strides: Vec<usize>,
}

/// An element of a fibre, as residues `a_j ∈ [0, n_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub residues: Vec<u64>,
}

/// A character of a fibre, in the canonical self-dual coordinates of `∏ Z_{n_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character {
    pub residues: Vec<u64>,
}

/// An exact point `num/den` of `Q/Z`, always reduced with `0 ≤ num < den`.
///
/// `char_eval` is `exp(2πi · phase)`, so equality of phases is equality of
/// character values without any floating-point tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    pub num: u64,
    pub den: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Phase {
        assert!(den > 0, "phase denominator must be positive");
        let num = num % den;
        let g = num.gcd(&den);
        Phase { num: num / g, den: den / g }
    }

    pub fn to_complex(self) -> Complex64 {
        root_of_unity(self.num, self.den)
    }
}

impl std::ops::Add for Phase {
    type Output = Phase;

    fn add(self, other: Phase) -> Phase {
        let den = self.den.lcm(&other.den);
        let num = self.num as u128 * (den / self.den) as u128 + other.num as u128 * (den / other.den) as u128;
        Phase::new((num % den as u128) as u64, den)
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        Phase::new(self.den - self.num, self.den)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `exp(2πi k/n)`, exact on the quarter turns.
pub fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    if (4 * k as u128) % n as u128 == 0 {
        return match (4 * k as u128 / n as u128) as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * (k as f64 / n as f64);
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

impl FiniteAbelianGroup {
    /// Builds `∏ Z_{n_j}`. Moduli equal to 1 are kept as given.
    pub fn new(moduli: &[i64]) -> Result<Self> {
        let mut checked = Vec::with_capacity(moduli.len());
        let mut order: u128 = 1;
        for (index, &value) in moduli.iter().enumerate() {
            if value < 1 {
                return Err(Error::NonPositiveModulus { index, value });
            }
            order = order.saturating_mul(value as u128);
            if order > MAX_ORDER {
                return Err(Error::OrderTooLarge { order });
            }
            checked.push(value as u64);
        }
        Ok(Self::from_checked(checked))
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n as i64])
    }

    pub fn trivial() -> Self {
        Self::from_checked(Vec::new())
    }

    fn from_checked(moduli: Vec<u64>) -> Self {
        let order = moduli.iter().product::<u64>() as usize;
        let exponent = moduli.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        let mut strides = vec![1usize; moduli.len()];
        for j in (0..moduli.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * moduli[j + 1] as usize;
        }
        FiniteAbelianGroup { moduli, order, exponent, strides }
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// Least common multiple of the moduli; every pairing phase has this denominator.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Invariant factors `d_1 | d_2 | … | d_k`, trivial factors removed.
    pub fn canonical_invariants(&self) -> Vec<u64> {
        let n = self.moduli.len();
        let relations: Vec<Vec<i128>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { self.moduli[i] as i128 } else { 0 }).collect())
            .collect();
        smith_normal_form(relations)
            .into_iter()
            .map(|d| d.unsigned_abs() as u64)
            .filter(|&d| d > 1)
            .collect()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { residues: vec![0; self.rank()] }
    }

    pub fn trivial_character(&self) -> Character {
        Character { residues: vec![0; self.rank()] }
    }

    fn check_residues(&self, residues: &[u64]) -> Result<()> {
        if residues.len() != self.rank() {
            return Err(Error::ShapeMismatch { expected: self.rank(), found: residues.len() });
        }
        for (index, (&value, &modulus)) in residues.iter().zip(&self.moduli).enumerate() {
            if value >= modulus {
                return Err(Error::ResidueOutOfRange { index, value, modulus });
            }
        }
        Ok(())
    }

    /// Validates residues as an element of this group.
    pub fn element(&self, residues: &[u64]) -> Result<GroupElement> {
        self.check_residues(residues)?;
        Ok(GroupElement { residues: residues.to_vec() })
    }

    /// Validates residues as a character of this group.
    pub fn character(&self, residues: &[u64]) -> Result<Character> {
        self.check_residues(residues)?;
        Ok(Character { residues: residues.to_vec() })
    }

    /// Reduces arbitrary integers into an element.
    pub fn reduce(&self, values: &[i64]) -> Result<GroupElement> {
        if values.len() != self.rank() {
            return Err(Error::ShapeMismatch { expected: self.rank(), found: values.len() });
        }
        let residues = values
            .iter()
            .zip(&self.moduli)
            .map(|(&v, &n)| v.rem_euclid(n as i64) as u64)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_residues(&a.residues)?;
        self.check_residues(&b.residues)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_residues(&a.residues)?;
        let residues = a.residues.iter().zip(&self.moduli).map(|(&x, &n)| (n - x) % n).collect();
        Ok(GroupElement { residues })
    }

    /// Pointwise product of characters, which in coordinates is residue addition.
    pub fn multiply_characters(&self, w: &Character, v: &Character) -> Result<Character> {
        let prod = self.multiply(&GroupElement { residues: w.residues.clone() }, &GroupElement { residues: v.residues.clone() })?;
        Ok(Character { residues: prod.residues })
    }

    /// The pairing `ω(s)` as an exact phase in `Q/Z`.
    pub fn phase(&self, w: &Character, a: &GroupElement) -> Result<Phase> {
        self.check_residues(&w.residues)?;
        self.check_residues(&a.residues)?;
        Ok(Phase::new(self.phase_numerator(&w.residues, &a.residues), self.exponent))
    }

    fn phase_numerator(&self, w: &[u64], a: &[u64]) -> u64 {
        let l = self.exponent as u128;
        let mut acc: u128 = 0;
        for ((&wj, &aj), &n) in w.iter().zip(a).zip(&self.moduli) {
            acc = (acc + (wj as u128 * aj as u128 % n as u128) * (l / n as u128)) % l;
        }
        acc as u64
    }

    /// `ω(s) = exp(2πi Σ_j w_j a_j / n_j)`.
    pub fn char_eval(&self, w: &Character, a: &GroupElement) -> Result<Complex64> {
        Ok(self.phase(w, a)?.to_complex())
    }

    /// All elements in lexicographic residue order (last coordinate fastest).
    pub fn enumerate(&self) -> Vec<GroupElement> {
        (0..self.order).map(|i| self.element_at(i)).collect()
    }

    pub fn characters(&self) -> Vec<Character> {
        (0..self.order).map(|i| Character { residues: self.element_at(i).residues }).collect()
    }

    /// Position of an element in [`enumerate`](Self::enumerate).
    pub fn index_of(&self, residues: &[u64]) -> Result<usize> {
        self.check_residues(residues)?;
        Ok(residues.iter().zip(&self.strides).map(|(&r, &s)| r as usize * s).sum())
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        debug_assert!(index < self.order);
        let residues = self
            .strides
            .iter()
            .zip(&self.moduli)
            .map(|(&s, &n)| ((index / s) as u64) % n)
            .collect();
        GroupElement { residues }
    }

    // Index-level arithmetic used by the dense function representation.

    pub(crate) fn mul_index(&self, i: usize, j: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.moduli) {
            let n = n as usize;
            out += ((i / s) % n + (j / s) % n) % n * s;
        }
        out
    }

    pub(crate) fn inv_index(&self, i: usize) -> usize {
        let mut out = 0;
        for (&s, &n) in self.strides.iter().zip(&self.moduli) {
            let n = n as usize;
            out += (n - (i / s) % n) % n * s;
        }
        out
    }

    /// Numerator over [`exponent`](Self::exponent) of the pairing of the
    /// character at index `w` with the element at index `a`.
    pub(crate) fn phase_index(&self, w: usize, a: usize) -> u64 {
        let l = self.exponent as usize;
        let mut acc = 0usize;
        for (&s, &n) in self.strides.iter().zip(&self.moduli) {
            let n = n as usize;
            acc = (acc + ((w / s) % n) * ((a / s) % n) % n * (l / n)) % l;
        }
        acc as u64
    }

    /// `exp(2πi k/L)` for `k = 0..L`, `L` the exponent.
    pub(crate) fn roots(&self) -> Vec<Complex64> {
        (0..self.exponent).map(|k| root_of_unity(k, self.exponent)).collect()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "Z_1");
        }
        let parts: Vec<String> = self.moduli.iter().map(|n| format!("Z_{n}")).collect();
        write!(f, "{}", parts.join("×"))
    }
}

impl From<Character> for GroupElement {
    fn from(c: Character) -> Self {
        GroupElement { residues: c.residues }
    }
}

impl From<GroupElement> for Character {
    fn from(a: GroupElement) -> Self {
        Character { residues: a.residues }
    }
}

/// Diagonal of the Smith normal form of an integer matrix, `d_1 | d_2 | …`,
/// padded with zeros to `min(rows, cols)` entries. Entries are nonnegative.
pub fn smith_normal_form(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let rank = rows.min(cols);
    for t in 0..rank {
        loop {
            // Smallest nonzero entry in the trailing block becomes the pivot.
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].unsigned_abs());
            let Some((pi, pj)) = pivot else {
                break;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(p);
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // The pivot must divide the whole trailing block.
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| m[i][j] % p != 0);
            match offender {
                Some((i, _)) => {
                    for j in t..cols {
                        let v = m[i][j];
                        m[t][j] += v;
                    }
                }
                None => break,
            }
        }
    }
    (0..rank).map(|t| m[t][t].abs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(moduli: &[i64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(moduli).unwrap()
    }

    #[test]
    fn construction() {
        assert_eq!(g(&[4]).order(), 4);
        assert_eq!(g(&[2, 3]).order(), 6);
        assert_eq!(g(&[1, 5, 1]).moduli(), &[1, 5, 1]);
        assert_eq!(
            FiniteAbelianGroup::new(&[0]),
            Err(Error::NonPositiveModulus { index: 0, value: 0 })
        );
        assert!(matches!(FiniteAbelianGroup::new(&[3, -2]), Err(Error::NonPositiveModulus { index: 1, .. })));
        assert!(matches!(FiniteAbelianGroup::new(&[1 << 10, 1 << 11]), Err(Error::OrderTooLarge { .. })));
        assert_eq!(g(&[1 << 10, 1 << 10]).order(), 1 << 20);
        assert_eq!(FiniteAbelianGroup::trivial().order(), 1);
    }

    #[test]
    fn invariants() {
        assert_eq!(g(&[2, 3]).canonical_invariants(), vec![6]);
        assert_eq!(g(&[2, 2]).canonical_invariants(), vec![2, 2]);
        assert_eq!(g(&[1]).canonical_invariants(), Vec::<u64>::new());
        assert_eq!(g(&[4, 6]).canonical_invariants(), vec![2, 12]);
        assert_eq!(g(&[6, 10, 15]).canonical_invariants(), vec![30, 30]);
    }

    #[test]
    fn smith_general_matrix() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        assert_eq!(smith_normal_form(m), vec![2, 6, 12]);
    }

    #[test]
    fn arithmetic() {
        let z4 = g(&[4]);
        let a = z4.element(&[3]).unwrap();
        let b = z4.element(&[2]).unwrap();
        assert_eq!(z4.multiply(&a, &b).unwrap().residues, vec![1]);
        assert_eq!(z4.invert(&z4.element(&[1]).unwrap()).unwrap().residues, vec![3]);
        assert_eq!(z4.invert(&z4.identity()).unwrap(), z4.identity());

        let z23 = g(&[2, 3]);
        let a = z23.element(&[1, 2]).unwrap();
        assert_eq!(z23.multiply(&a, &a).unwrap().residues, vec![0, 1]);
        assert_eq!(z23.invert(&a).unwrap().residues, vec![1, 1]);
        assert_eq!(
            z23.multiply(&a, &z4.identity()),
            Err(Error::ShapeMismatch { expected: 2, found: 1 })
        );
        assert!(matches!(z23.element(&[2, 0]), Err(Error::ResidueOutOfRange { index: 0, .. })));
        assert_eq!(z23.reduce(&[-1, 7]).unwrap().residues, vec![1, 1]);
    }

    #[test]
    fn characters() {
        let z4 = g(&[4]);
        let one = z4.element(&[1]).unwrap();
        let w = z4.character(&[1]).unwrap();
        assert_eq!(z4.char_eval(&w, &one).unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(z4.char_eval(&z4.trivial_character(), &one).unwrap(), Complex64::new(1.0, 0.0));

        let z23 = g(&[2, 3]);
        let w = z23.character(&[1, 1]).unwrap();
        let a = z23.element(&[1, 2]).unwrap();
        assert_eq!(z23.phase(&w, &a).unwrap(), Phase::new(1, 6));
        let v = z23.char_eval(&w, &a).unwrap();
        assert!((v - Complex64::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!(matches!(z23.char_eval(&z4.trivial_character(), &a), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(g(&[2]).enumerate(), vec![GroupElement { residues: vec![0] }, GroupElement { residues: vec![1] }]);
        assert_eq!(g(&[1]).enumerate(), vec![g(&[1]).identity()]);
        let elems: Vec<Vec<u64>> = g(&[2, 2]).enumerate().into_iter().map(|e| e.residues).collect();
        assert_eq!(elems, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let z = g(&[3, 1, 4]);
        for (i, e) in z.enumerate().iter().enumerate() {
            assert_eq!(z.index_of(&e.residues).unwrap(), i);
        }
    }

    #[test]
    fn index_arithmetic_matches_residue_arithmetic() {
        let z = g(&[2, 3, 4]);
        let elems = z.enumerate();
        for (i, a) in elems.iter().enumerate() {
            assert_eq!(z.inv_index(i), z.index_of(&z.invert(a).unwrap().residues).unwrap());
            for (j, b) in elems.iter().enumerate() {
                let ab = z.multiply(a, b).unwrap();
                assert_eq!(z.mul_index(i, j), z.index_of(&ab.residues).unwrap());
                let phase = Phase::new(z.phase_index(i, j), z.exponent());
                assert_eq!(phase, z.phase(&a.clone().into(), b).unwrap());
            }
        }
    }

    #[test]
    fn phase_arithmetic() {
        assert_eq!(Phase::new(3, 6), Phase::new(1, 2));
        assert_eq!(Phase::new(1, 3) + Phase::new(2, 3), Phase::ZERO);
        assert_eq!(Phase::new(1, 4) + Phase::new(1, 6), Phase::new(5, 12));
        assert_eq!(-Phase::new(1, 4), Phase::new(3, 4));
        assert_eq!(root_of_unity(3, 4), Complex64::new(0.0, -1.0));
    }
}
