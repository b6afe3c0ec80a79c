//! Random scenario families: convergent sequences under random trivializations,
//! and the same sequences with divergence injected on the tail.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{SequenceScenario, Term};
use crate::bundle::GroupBundle;
use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup, GroupElement};

fn prime_powers(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// Another product-of-cyclics presentation of the same group: the primary
/// factors are regrouped into coprime blocks and shuffled.
pub fn random_presentation<R: Rng + ?Sized>(group: &FiniteAbelianGroup, rng: &mut R) -> FiniteAbelianGroup {
    let mut parts: Vec<(u64, u64)> = group.moduli().iter().flat_map(|&n| prime_powers(n)).collect();
    if parts.is_empty() {
        return group.clone();
    }
    parts.shuffle(rng);
    let mut blocks: Vec<Vec<(u64, u64)>> = Vec::new();
    for part in parts {
        let open: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i].iter().all(|&(p, _)| p != part.0)).collect();
        if open.is_empty() || rng.gen_bool(0.4) {
            blocks.push(vec![part]);
        } else {
            blocks[*open.choose(rng).expect("nonempty")].push(part);
        }
    }
    let moduli: Vec<i64> = blocks.iter().map(|b| b.iter().map(|&(_, q)| q as i64).product()).collect();
    FiniteAbelianGroup::new(&moduli).expect("same order as a valid group")
}

/// A uniformly-guessed isomorphism `src → dst` (as an index table), found by
/// sending each generator to a random element of compatible order.
pub fn random_isomorphism<R: Rng + ?Sized>(
    src: &FiniteAbelianGroup,
    dst: &FiniteAbelianGroup,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let n = src.order();
    if dst.order() != n {
        return None;
    }
    let multiple = |t: usize, k: u64| (0..k).fold(0, |acc, _| dst.mul_index(acc, t));
    let candidates: Vec<Vec<usize>> = src
        .moduli()
        .iter()
        .map(|&m| (0..n).filter(|&t| multiple(t, m) == 0).collect())
        .collect();
    for _ in 0..500 {
        let images: Vec<usize> = candidates.iter().map(|c| *c.choose(rng).expect("identity qualifies")).collect();
        let mut multiples: Vec<Vec<usize>> = Vec::with_capacity(images.len());
        for (&t, &m) in images.iter().zip(src.moduli()) {
            let mut row = vec![0usize];
            for _ in 1..m {
                row.push(dst.mul_index(*row.last().expect("nonempty"), t));
            }
            multiples.push(row);
        }
        let table: Vec<usize> = (0..n)
            .map(|i| {
                let s = src.element_at(i);
                s.residues.iter().zip(&multiples).fold(0, |acc, (&r, row)| dst.mul_index(acc, row[r as usize]))
            })
            .collect();
        let mut seen = vec![false; n];
        if table.iter().all(|&t| !std::mem::replace(&mut seen[t], true)) {
            return Some(table);
        }
    }
    None
}

fn random_group<R: Rng + ?Sized>(rng: &mut R, min_order: usize, max_order: usize) -> FiniteAbelianGroup {
    loop {
        let rank = rng.gen_range(1..=3);
        let moduli: Vec<i64> = (0..rank).map(|_| rng.gen_range(1..=max_order as i64)).collect();
        if let Ok(g) = FiniteAbelianGroup::new(&moduli) {
            if (min_order..=max_order).contains(&g.order()) {
                return g;
            }
        }
    }
}

fn invert_table(table: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; table.len()];
    for (i, &t) in table.iter().enumerate() {
        inv[t] = i;
    }
    inv
}

/// A convergent scenario with `n_terms` terms and limit fibre of order in
/// `2..=max_order`: tail fibres are random re-presentations of the limit fibre,
/// and `s_n = ψ_n⁻¹(s_0)`, `ω_n = ω_0∘ψ_n` on the tail.
pub fn random_convergent_scenario<R: Rng + ?Sized>(rng: &mut R, n_terms: usize, max_order: usize) -> Result<SequenceScenario> {
    if n_terms == 0 || max_order < 2 {
        return Err(Error::InvalidScenario("need at least one term and a nontrivial limit fibre".into()));
    }
    let limit_group = random_group(rng, 2, max_order);
    let weight = 2f64.powf(rng.gen_range(-3.0..=3.0));
    let tail_index = rng.gen_range(1..=n_terms);

    let mut points: Vec<(String, FiniteAbelianGroup, f64)> = vec![("x0".into(), limit_group.clone(), weight)];
    for k in 0..rng.gen_range(1..=3) {
        points.push((format!("tail{k}"), random_presentation(&limit_group, rng), weight));
    }
    for k in 0..rng.gen_range(1..=3) {
        points.push((format!("pre{k}"), random_group(rng, 1, max_order), 2f64.powf(rng.gen_range(-3.0..=3.0))));
    }
    let bundle = GroupBundle::from_points(points.iter().cloned())?;

    let s0 = rng.gen_range(0..limit_group.order());
    let w0 = rng.gen_range(0..limit_group.order());
    let limit = Term {
        point: "x0".into(),
        element: limit_group.element_at(s0),
        character: Character::from(limit_group.element_at(w0)),
        trivialization: None,
    };
    let tail_points: Vec<&(String, FiniteAbelianGroup, f64)> = points.iter().filter(|p| !p.0.starts_with("pre")).collect();
    let pre_points: Vec<&(String, FiniteAbelianGroup, f64)> = points.iter().filter(|p| p.0.starts_with("pre")).collect();

    let mut terms = Vec::with_capacity(n_terms);
    for n in 1..=n_terms {
        if n < tail_index {
            let (id, g, _) = *pre_points.choose(rng).expect("prefix points exist");
            terms.push(Term {
                point: id.clone(),
                element: g.element_at(rng.gen_range(0..g.order())),
                character: Character::from(g.element_at(rng.gen_range(0..g.order()))),
                trivialization: None,
            });
            continue;
        }
        let (id, g, _) = *tail_points.choose(rng).expect("tail points exist");
        let psi = random_isomorphism(g, &limit_group, rng)
            .ok_or_else(|| Error::InvalidScenario("no isomorphism found".into()))?;
        let psi_inv = invert_table(&psi);
        let element = g.element_at(psi_inv[s0]);
        // ω_n = ω_0∘ψ_n, i.e. the preimage of ω_0 under ψ_n^∧.
        let dual = super::dual_isomorphism(g, &limit_group, &psi)?;
        let character = Character::from(g.element_at(invert_table(&dual)[w0]));
        terms.push(Term { point: id.clone(), element, character, trivialization: Some(psi) });
    }
    SequenceScenario::new(bundle, tail_index, limit, terms)
}

/// Which sequence to break.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divergence {
    Element,
    Character,
}

/// Breaks convergence on alternate tail terms ending at `N`: the injected terms
/// converge to a different limit, so no tail of the sequence stabilises.
pub fn inject_divergence<R: Rng + ?Sized>(sc: &SequenceScenario, kind: Divergence, rng: &mut R) -> Result<SequenceScenario> {
    let g0 = sc.limit_group().clone();
    if g0.order() < 2 {
        return Err(Error::InvalidScenario("trivial limit fibre cannot diverge".into()));
    }
    let target = match kind {
        Divergence::Element => sc.element_index(0),
        Divergence::Character => sc.character_index(0),
    };
    let wrong = loop {
        let c = rng.gen_range(0..g0.order());
        if c != target {
            break c;
        }
    };
    let mut out = sc.clone();
    let last = sc.len();
    let mut n = last;
    loop {
        let mut term = out.term(n).clone();
        let g = out.group_of(n).clone();
        let psi = out.psi(n).to_vec();
        match kind {
            Divergence::Element => term.element = g.element_at(invert_table(&psi)[wrong]),
            Divergence::Character => {
                let dual = super::dual_isomorphism(&g, &g0, &psi)?;
                term.character = Character::from(g.element_at(invert_table(&dual)[wrong]));
            }
        }
        out = out.with_term(n, term)?;
        if n < sc.tail_index() + 2 {
            break;
        }
        n -= 2;
    }
    Ok(out)
}

impl From<&GroupElement> for Character {
    fn from(a: &GroupElement) -> Self {
        Character { residues: a.residues.clone() }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn presentations_are_isomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for moduli in [vec![12], vec![6, 10], vec![2, 2, 3], vec![1, 9]] {
            let g = FiniteAbelianGroup::new(&moduli).unwrap();
            for _ in 0..10 {
                let h = random_presentation(&g, &mut rng);
                assert_eq!(h.canonical_invariants(), g.canonical_invariants());
                let psi = random_isomorphism(&h, &g, &mut rng).expect("isomorphic groups");
                super::super::check_isomorphism(&h, &g, &psi).unwrap();
            }
        }
    }

    #[test]
    fn generated_scenarios_converge() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let sc = random_convergent_scenario(&mut rng, 8, 12).unwrap();
            assert!(super::super::check_dual_convergence(&sc).passed());
            assert!(super::super::check_phi_forward_continuity(&sc).passed());
        }
    }
}
