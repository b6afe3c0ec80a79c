//! Sequential convergence in bundles over a finite truncated sequence.
//!
//! A [`SequenceScenario`] is a sequence of base points `x_1, …, x_N` with a declared
//! limit `x_0`. From the tail index `T` on, every fibre `G_{x_n}` comes with a
//! trivialization `ψ_n: G_{x_n} → G_{x_0}`. A sequence `s_n ∈ G_{x_n}` converges to
//! `s_0` iff `ψ_n(s_n) = s_0` for every `n` in the tail `T..=N`; characters
//! converge iff `ω_n∘ψ_n⁻¹ = ω_0` on the tail. All comparisons are exact.
//!
//! The checks below enumerate every convergent sequence up to its (irrelevant)
//! prefix: a convergent element sequence is determined on the tail by its limit,
//! so scanning all limits in `G_{x_0}` and all tail indices is exhaustive.

pub mod generate;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bochner::{bochner_measure, localize, positive_definite_from};
use crate::bundle::{BundleElement, BundleFunction, GroupBundle};
use crate::duality::{dual_bundle, fourier, generators};
use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup, GroupElement, Phase};
use crate::report::{Check, VerificationReport};
use crate::DEFAULT_TOLERANCE;

/// One term of the sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub point: String,
    pub element: GroupElement,
    pub character: Character,
    /// `ψ_n` as a table: entry `i` is the index in `G_{x_0}` of the image of the
    /// `i`-th element of `G_{x_n}`. Required for tail terms, ignored before.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivialization: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceScenario {
    bundle: GroupBundle,
    tail_index: usize,
    limit: Term,
    terms: Vec<Term>,
}

/// The failing term of a non-convergent sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub point: String,
    pub element: Vec<u64>,
    pub character: Vec<u64>,
    pub observed: String,
    pub expected: String,
}

/// A check's report together with its exact verdict.
#[derive(Clone, Debug)]
pub struct HarnessReport {
    pub report: VerificationReport,
    /// The tail index when every stage stabilised on the whole tail.
    pub stabilization_index: Option<usize>,
    pub counterexample: Option<Counterexample>,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Windows `W ∋ s_0` and `V = V⁻¹ ∋ e` in the limit fibre for the inverse-continuity pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct Windows {
    pub w: Vec<GroupElement>,
    pub v: Vec<GroupElement>,
}

/// Validates `table` as a group isomorphism `src → dst`.
pub fn check_isomorphism(src: &FiniteAbelianGroup, dst: &FiniteAbelianGroup, table: &[usize]) -> std::result::Result<(), String> {
    let n = src.order();
    if table.len() != n || dst.order() != n {
        return Err(format!("table has {} entries for groups of order {} and {}", table.len(), n, dst.order()));
    }
    let mut hit = vec![false; n];
    for &t in table {
        if t >= n || std::mem::replace(&mut hit[t], true) {
            return Err(format!("not a bijection (image {t})"));
        }
    }
    if table[0] != 0 {
        return Err("identity is not mapped to identity".into());
    }
    // ψ(s·g_j) = ψ(s)ψ(g_j) for all s and generators g_j forces ψ to be additive.
    for g in generators(src) {
        for s in 0..n {
            if table[src.mul_index(s, g)] != dst.mul_index(table[s], table[g]) {
                return Err(format!(
                    "not a homomorphism at {:?}·{:?}",
                    src.element_at(s).residues,
                    src.element_at(g).residues
                ));
            }
        }
    }
    Ok(())
}

/// The transpose `ψ^∧(ω) = ω∘ψ⁻¹` of an isomorphism `ψ: src → dst`, as a table
/// from characters of `src` to characters of `dst`.
pub fn dual_isomorphism(src: &FiniteAbelianGroup, dst: &FiniteAbelianGroup, table: &[usize]) -> Result<Vec<usize>> {
    check_isomorphism(src, dst, table).map_err(|reason| Error::InvalidTrivialization { index: 0, reason })?;
    let n = src.order();
    let mut inverse = vec![0; n];
    for (i, &t) in table.iter().enumerate() {
        inverse[t] = i;
    }
    let basis: Vec<usize> = (0..dst.rank())
        .map(|j| {
            let mut r = vec![0; dst.rank()];
            if dst.moduli()[j] > 1 {
                r[j] = 1;
            }
            dst.index_of(&r).expect("basis element")
        })
        .collect();
    (0..n)
        .map(|w| {
            // χ_j is read off from χ(e_j) = ω(ψ⁻¹(e_j)).
            let mut residues = Vec::with_capacity(dst.rank());
            for (j, &e) in basis.iter().enumerate() {
                let m = dst.moduli()[j];
                let phase = Phase::new(src.phase_index(w, inverse[e]), src.exponent());
                let scaled = phase.num as u128 * m as u128;
                if scaled % phase.den as u128 != 0 {
                    return Err(Error::InvalidTrivialization {
                        index: 0,
                        reason: "transposed character is not defined over the target moduli".into(),
                    });
                }
                residues.push((scaled / phase.den as u128) as u64 % m);
            }
            dst.index_of(&residues)
        })
        .collect()
}

fn exact_phase(group: &FiniteAbelianGroup, w: usize, s: usize) -> Phase {
    Phase::new(group.phase_index(w, s), group.exponent())
}

impl SequenceScenario {
    /// Validates a scenario. `terms[n-1]` is the `n`-th term; `limit` is term 0.
    pub fn new(bundle: GroupBundle, tail_index: usize, limit: Term, terms: Vec<Term>) -> Result<Self> {
        let n_terms = terms.len();
        if n_terms == 0 {
            return Err(Error::InvalidScenario("sequence has no terms".into()));
        }
        if tail_index < 1 || tail_index > n_terms {
            return Err(Error::InvalidScenario(format!("tail index {tail_index} outside 1..={n_terms}")));
        }
        let limit_group = bundle.group(&limit.point)?.clone();
        limit_group.element(&limit.element.residues)?;
        limit_group.character(&limit.character.residues)?;
        let limit_weight = bundle.weight(&limit.point)?;
        for (k, term) in terms.iter().enumerate() {
            let index = k + 1;
            let group = bundle.group(&term.point)?;
            group.element(&term.element.residues)?;
            group.character(&term.character.residues)?;
            match &term.trivialization {
                Some(table) => check_isomorphism(group, &limit_group, table)
                    .map_err(|reason| Error::InvalidTrivialization { index, reason })?,
                None if index >= tail_index => {
                    return Err(Error::InvalidTrivialization { index, reason: "tail term without trivialization".into() })
                }
                None => {}
            }
            if index >= tail_index {
                let w = bundle.weight(&term.point)?;
                if ((w - limit_weight) / limit_weight).abs() > 1e-12 {
                    return Err(Error::InvalidScenario(format!(
                        "Haar weight {w} at tail term {index} differs from the limit weight {limit_weight}"
                    )));
                }
            }
        }
        Ok(SequenceScenario { bundle, tail_index, limit, terms })
    }

    pub fn bundle(&self) -> &GroupBundle {
        &self.bundle
    }

    pub fn tail_index(&self) -> usize {
        self.tail_index
    }

    /// `N`, the number of terms before the limit.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn limit(&self) -> &Term {
        &self.limit
    }

    /// Term `n` for `n ≥ 1`; term 0 is the limit.
    pub fn term(&self, n: usize) -> &Term {
        if n == 0 {
            &self.limit
        } else {
            &self.terms[n - 1]
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn tail(&self) -> impl Iterator<Item = usize> {
        self.tail_index..=self.terms.len()
    }

    fn limit_group(&self) -> &FiniteAbelianGroup {
        self.bundle.group(&self.limit.point).expect("validated")
    }

    fn group_of(&self, n: usize) -> &FiniteAbelianGroup {
        self.bundle.group(&self.term(n).point).expect("validated")
    }

    fn psi(&self, n: usize) -> &[usize] {
        self.term(n).trivialization.as_deref().expect("tail terms carry trivializations")
    }

    fn psi_inverse(&self, n: usize) -> Vec<usize> {
        let psi = self.psi(n);
        let mut inv = vec![0; psi.len()];
        for (i, &t) in psi.iter().enumerate() {
            inv[t] = i;
        }
        inv
    }

    /// `ψ_n^∧` for a tail term.
    pub fn dual_trivialization(&self, n: usize) -> Result<Vec<usize>> {
        dual_isomorphism(self.group_of(n), self.limit_group(), self.psi(n))
            .map_err(|e| match e {
                Error::InvalidTrivialization { reason, .. } => Error::InvalidTrivialization { index: n, reason },
                other => other,
            })
    }

    fn element_index(&self, n: usize) -> usize {
        self.group_of(n).index_of(&self.term(n).element.residues).expect("validated")
    }

    fn character_index(&self, n: usize) -> usize {
        self.group_of(n).index_of(&self.term(n).character.residues).expect("validated")
    }

    fn enumeration_note(&self) -> String {
        format!(
            "enumerated all {} limit classes over tail {}..={} (prefix values do not affect convergence)",
            self.limit_group().order(),
            self.tail_index,
            self.len()
        )
    }

    /// Relabels the terms before the tail index; used to check prefix independence.
    pub fn with_prefix_permuted(&self, perm: &[usize]) -> Result<Self> {
        let prefix = self.tail_index - 1;
        if perm.len() != prefix {
            return Err(Error::InvalidScenario("permutation must cover exactly the prefix".into()));
        }
        let mut terms: Vec<Term> = perm.iter().map(|&i| self.terms[i].clone()).collect();
        terms.extend(self.terms[prefix..].iter().cloned());
        Self::new(self.bundle.clone(), self.tail_index, self.limit.clone(), terms)
    }

    /// Replaces term `n` (≥ 1).
    pub fn with_term(&self, n: usize, term: Term) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms[n - 1] = term;
        Self::new(self.bundle.clone(), self.tail_index, self.limit.clone(), terms)
    }
}

struct Scan {
    /// Smallest `K ≥ T` such that every tail index `≥ K` passed.
    settled_from: usize,
    last_failure: Option<Counterexample>,
}

impl Scan {
    fn new(sc: &SequenceScenario) -> Self {
        Scan { settled_from: sc.tail_index, last_failure: None }
    }

    fn fail(&mut self, n: usize, cx: Counterexample) {
        if self.last_failure.as_ref().is_none_or(|c| c.index < n) {
            self.settled_from = n + 1;
            self.last_failure = Some(cx);
        }
    }

    fn check(&self, name: &str, sc: &SequenceScenario) -> Check {
        let ok = self.last_failure.is_none();
        let mut c = Check::exact(name, ok, self.last_failure.as_ref().map(|cx| json!(cx)));
        if ok {
            c = c.with_data(json!({ "stabilization_index": sc.tail_index }));
        } else if let Some(w) = c.witness.take() {
            c.witness = Some(json!({ "counterexample": w, "settles_from": self.settled_from }));
        }
        c
    }
}

/// Decides `ω_n → ω_0`: base convergence by construction and, for every
/// convergent `s_n → s_0`, `ω_n(s_n) = ω_0(s_0)` on the whole tail.
pub fn check_dual_convergence(sc: &SequenceScenario) -> HarnessReport {
    let mut report = VerificationReport::new();
    report.push(Check::exact("base_convergence", true, None).with_note("tail fibres are trivialized onto the limit fibre"));

    let g0 = sc.limit_group();
    let w0 = sc.character_index(0);
    let mut scan = Scan::new(sc);
    for n in sc.tail() {
        let gn = sc.group_of(n);
        let wn = sc.character_index(n);
        let inv = sc.psi_inverse(n);
        for t in 0..g0.order() {
            let observed = exact_phase(gn, wn, inv[t]);
            let expected = exact_phase(g0, w0, t);
            if observed != expected {
                scan.fail(
                    n,
                    Counterexample {
                        index: n,
                        point: sc.term(n).point.clone(),
                        element: gn.element_at(inv[t]).residues,
                        character: sc.term(n).character.residues.clone(),
                        observed: observed.to_string(),
                        expected: expected.to_string(),
                    },
                );
                break;
            }
        }
    }
    report.push(scan.check("pairing_convergence", sc).with_note(sc.enumeration_note()));

    // The same verdict through the transposed trivializations.
    let coordinate_ok = sc.tail().all(|n| sc.dual_trivialization(n).map(|d| d[sc.character_index(n)] == w0).unwrap_or(false));
    report.push(Check::exact("transposed_trivialization_agrees", coordinate_ok == scan.last_failure.is_none(), None));

    finish(report, scan)
}

fn finish(report: VerificationReport, scan: Scan) -> HarnessReport {
    let passed = report.passed();
    HarnessReport {
        stabilization_index: passed.then_some(scan.settled_from),
        counterexample: scan.last_failure,
        report,
    }
}

/// `s_n → s_0` implies `Φ(s_n) → Φ(s_0)`: for every convergent character
/// sequence `ω_n → ω_0`, `ω_n(s_n) = ω_0(s_0)` on the whole tail.
pub fn check_phi_forward_continuity(sc: &SequenceScenario) -> HarnessReport {
    let mut report = VerificationReport::new();
    let mut elem_scan = Scan::new(sc);
    for n in sc.tail() {
        let si = sc.element_index(n);
        if sc.psi(n)[si] != sc.element_index(0) {
            elem_scan.fail(
                n,
                Counterexample {
                    index: n,
                    point: sc.term(n).point.clone(),
                    element: sc.term(n).element.residues.clone(),
                    character: Vec::new(),
                    observed: format!("{:?}", sc.limit_group().element_at(sc.psi(n)[si]).residues),
                    expected: format!("{:?}", sc.limit.element.residues),
                },
            );
        }
    }
    report.push(elem_scan.check("element_convergence", sc));

    let pairing = phi_pairing_scan(sc);
    report.push(pairing.check("phi_pairing_convergence", sc).with_note(sc.enumeration_note()));

    let mut out = finish(report, pairing);
    if out.counterexample.is_none() {
        out.counterexample = elem_scan.last_failure;
    }
    out
}

/// For every `χ ∈ Ĝ_{x_0}` and `ω_n = χ∘ψ_n`: `Φ(s_n)(ω_n) = ω_n(s_n)` against `χ(s_0)`.
fn phi_pairing_scan(sc: &SequenceScenario) -> Scan {
    let g0 = sc.limit_group();
    let s0 = sc.element_index(0);
    let mut scan = Scan::new(sc);
    for n in sc.tail() {
        let gn = sc.group_of(n);
        let sn = sc.element_index(n);
        let dual = match sc.dual_trivialization(n) {
            Ok(d) => d,
            Err(e) => {
                scan.fail(
                    n,
                    Counterexample {
                        index: n,
                        point: sc.term(n).point.clone(),
                        element: Vec::new(),
                        character: Vec::new(),
                        observed: e.to_string(),
                        expected: "a transposable trivialization".into(),
                    },
                );
                continue;
            }
        };
        let mut dual_inv = vec![0; dual.len()];
        for (i, &t) in dual.iter().enumerate() {
            dual_inv[t] = i;
        }
        for chi in 0..g0.order() {
            let wn = dual_inv[chi];
            let observed = exact_phase(gn, wn, sn);
            let expected = exact_phase(g0, chi, s0);
            if observed != expected {
                scan.fail(
                    n,
                    Counterexample {
                        index: n,
                        point: sc.term(n).point.clone(),
                        element: sc.term(n).element.residues.clone(),
                        character: gn.element_at(wn).residues,
                        observed: observed.to_string(),
                        expected: expected.to_string(),
                    },
                );
                break;
            }
        }
    }
    scan
}

pub fn check_phi_inverse_continuity(sc: &SequenceScenario) -> HarnessReport {
    let g0 = sc.limit_group();
    let windows = Windows { w: vec![sc.limit.element.clone()], v: vec![g0.identity()] };
    check_phi_inverse_continuity_with(sc, &windows, DEFAULT_TOLERANCE)
}

/// Runs the inverse-continuity argument stage by stage on the tail:
/// pairing convergence of `Φ(s_n)`, the dual integrals against `β̂`, the Bochner
/// density `dμ = f̂ dβ̂`, integrals against `μ`, the translated Plancherel pairing,
/// the localization functional, window membership, and finally `s_n → s_0`.
pub fn check_phi_inverse_continuity_with(sc: &SequenceScenario, windows: &Windows, tol: f64) -> HarnessReport {
    let mut report = VerificationReport::new();
    let g0 = sc.limit_group().clone();
    let n0 = g0.order();

    let idx = |e: &GroupElement| g0.index_of(&e.residues);
    let w_set: Vec<usize> = match windows.w.iter().map(idx).collect::<Result<_>>() {
        Ok(v) => v,
        Err(e) => return invalid_windows(report, e.to_string()),
    };
    let v_set: Vec<usize> = match windows.v.iter().map(idx).collect::<Result<_>>() {
        Ok(v) => v,
        Err(e) => return invalid_windows(report, e.to_string()),
    };
    let s0 = sc.element_index(0);
    let symmetric = v_set.iter().all(|&v| v_set.contains(&g0.inv_index(v)));
    if !w_set.contains(&s0) || !v_set.contains(&0) || !symmetric {
        return invalid_windows(report, "windows must satisfy s_0 ∈ W, e ∈ V and V = V⁻¹".into());
    }

    // U ⊆ V with U⁻¹U ⊆ V, grown greedily from {e}.
    let mut u_set = vec![0usize];
    for &cand in &v_set {
        if u_set.contains(&cand) {
            continue;
        }
        let mut trial = u_set.clone();
        trial.push(cand);
        if trial.iter().all(|&a| trial.iter().all(|&b| v_set.contains(&g0.mul_index(g0.inv_index(a), b)))) {
            u_set = trial;
        }
    }
    let o_set: Vec<usize> = {
        let mut o: Vec<usize> = w_set.iter().flat_map(|&a| v_set.iter().map(move |&b| (a, b))).map(|(a, b)| g0.mul_index(a, b)).collect();
        o.sort_unstable();
        o.dedup();
        o
    };

    let indicator = |set: &[usize]| -> Vec<Complex64> {
        (0..n0).map(|i| Complex64::new(if set.contains(&i) { 1.0 } else { 0.0 }, 0.0)).collect()
    };
    let h0 = indicator(&u_set);
    let g0_fn = indicator(&w_set);

    // Everything at index n is computed in the fibre G_{x_n}, with functions pulled back along ψ_n.
    struct Stage {
        dual_integrals: Vec<Complex64>,
        measure_integrals: Vec<Complex64>,
        bochner_ok: Option<String>,
        translated_pairing: Complex64,
        translated_via_measure: Complex64,
        localization: Complex64,
        in_window: bool,
    }

    let evaluate = |n: usize| -> Result<Stage> {
        let term = sc.term(n);
        let gn = sc.group_of(n).clone();
        let weight = sc.bundle.weight(&term.point)?;
        let (psi, dual_psi): (Vec<usize>, Vec<usize>) = if n == 0 {
            ((0..n0).collect(), (0..n0).collect())
        } else {
            (sc.psi(n).to_vec(), sc.dual_trivialization(n)?)
        };
        let local = GroupBundle::single(&term.point, gn.clone(), weight)?;
        let pull = |v: &[Complex64]| BundleFunction::from_values(&local, vec![psi.iter().map(|&t| v[t]).collect()]);
        let h = pull(&h0)?;
        let g = pull(&g0_fn)?;
        let f = positive_definite_from(&local, &h)?;
        let sn = sc.element_index(n);
        let dual_weight = dual_bundle(&local).fibre_at(0).1.weight;
        let roots = gn.roots();
        let omega_at = |w: usize| roots[gn.phase_index(w, sn) as usize];

        // φ ranges over point masses on Ĝ_{x_0}, transported along ψ_n^∧.
        let mut dual_inv = vec![0; n0];
        for (i, &t) in dual_psi.iter().enumerate() {
            dual_inv[t] = i;
        }
        let dual_integrals = (0..n0).map(|chi| omega_at(dual_inv[chi]) * dual_weight).collect();

        let (bochner_ok, mu_weights) = match bochner_measure(&local, &f) {
            Ok(mu) => {
                let fh = fourier(&local, &f)?;
                let density_err = fh
                    .fibre(0)
                    .iter()
                    .zip(mu.weights(0))
                    .map(|(z, &m)| (z.re * dual_weight - m).abs())
                    .fold(0.0, f64::max);
                let msg = (density_err > tol * (1.0 + fh.sup_norm())).then(|| format!("density residual {density_err:e}"));
                (msg, mu.weights(0).to_vec())
            }
            Err(e) => (Some(e.to_string()), vec![0.0; n0]),
        };
        let measure_integrals = (0..n0).map(|chi| omega_at(dual_inv[chi]) * mu_weights[dual_inv[chi]]).collect();

        let s_inv = BundleElement::new(term.point.clone(), gn.element_at(gn.inv_index(sn)));
        let moved = local.translate(&s_inv, &g)?;
        let translated_pairing = moved.iter().zip(f.fibre(0)).map(|(a, b)| a.conj() * b).sum::<Complex64>() * weight;
        let gh = fourier(&local, &g)?;
        let translated_via_measure = (0..gn.order())
            .map(|w| gh.fibre(0)[w].conj() * omega_at(w) * mu_weights[w])
            .sum::<Complex64>();
        let localization = localize(&gn, weight, g.fibre(0), f.fibre(0), sn);
        let in_window = o_set.contains(&psi[sn]);
        Ok(Stage {
            dual_integrals,
            measure_integrals,
            bochner_ok,
            translated_pairing,
            translated_via_measure,
            localization,
            in_window,
        })
    };

    let limit = match evaluate(0) {
        Ok(s) => s,
        Err(e) => return invalid_windows(report, e.to_string()),
    };

    let pairing = phi_pairing_scan(sc);
    report.push(pairing.check("double_dual_convergence", sc).with_note(sc.enumeration_note()));

    let mut eq2 = NumericScan::new(sc);
    let mut eq7 = Scan::new(sc);
    let mut eq5 = NumericScan::new(sc);
    let mut eq3 = NumericScan::new(sc);
    let mut eq3_identity = NumericScan::new(sc);
    let mut eq4 = NumericScan::new(sc);
    let mut window = Scan::new(sc);
    let mut conclusion = Scan::new(sc);
    if let Some(msg) = &limit.bochner_ok {
        eq7.fail(0, plain_cx(sc, 0, msg.clone(), "a positive Bochner measure".into()));
    }
    eq3_identity.observe(0, (limit.translated_pairing - limit.translated_via_measure).norm(), &json!({ "index": 0 }));

    for n in sc.tail() {
        let st = match evaluate(n) {
            Ok(s) => s,
            Err(e) => {
                eq7.fail(n, plain_cx(sc, n, e.to_string(), "an evaluable term".into()));
                continue;
            }
        };
        let diff = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        eq2.observe(n, diff(&st.dual_integrals, &limit.dual_integrals), &json!({ "index": n }));
        if let Some(msg) = st.bochner_ok {
            eq7.fail(n, plain_cx(sc, n, msg, "a positive Bochner measure".into()));
        }
        eq5.observe(n, diff(&st.measure_integrals, &limit.measure_integrals), &json!({ "index": n }));
        eq3.observe(n, (st.translated_pairing - limit.translated_pairing).norm(), &json!({ "index": n }));
        eq3_identity.observe(n, (st.translated_pairing - st.translated_via_measure).norm(), &json!({ "index": n }));
        eq4.observe(
            n,
            (st.localization - limit.localization).norm(),
            &json!({
                "index": n,
                "point": sc.term(n).point,
                "element": sc.term(n).element.residues,
                "value": [st.localization.re, st.localization.im],
                "limit": [limit.localization.re, limit.localization.im],
            }),
        );
        if !st.in_window {
            window.fail(n, plain_cx(sc, n, "outside W·V".into(), "inside W·V".into()));
        }
        if sc.psi(n)[sc.element_index(n)] != s0 {
            conclusion.fail(n, plain_cx(sc, n, "ψ_n(s_n) ≠ s_0".into(), "ψ_n(s_n) = s_0".into()));
        }
    }

    let scale = 1.0 + limit.localization.norm();
    report.push(eq2.check("dual_integrals", tol));
    report.push(eq7.check("bochner_density", sc));
    report.push(eq5.check("measure_integrals", tol * scale));
    report.push(eq3_identity.check("plancherel_translation_identity", tol * scale));
    report.push(eq3.check("translated_pairing", tol * scale));
    report.push(Check::within(
        "localization_limit_nonzero",
        if limit.localization.norm() > tol { 0.0 } else { 1.0 },
        0.0,
        Some(json!({ "limit": [limit.localization.re, limit.localization.im] })),
    ));
    report.push(eq4.check("localization", tol * scale));
    report.push(window.check("window_membership", sc));
    report.push(conclusion.check("conclusion_element_convergence", sc));

    let mut first_failure = None;
    for scan in [&eq4.scan, &conclusion, &window, &pairing] {
        if first_failure.is_none() {
            first_failure = scan.last_failure.clone();
        }
    }
    let passed = report.passed();
    HarnessReport {
        stabilization_index: passed.then_some(sc.tail_index),
        counterexample: first_failure,
        report,
    }
}

fn invalid_windows(mut report: VerificationReport, reason: String) -> HarnessReport {
    report.push(Check::exact("windows", false, Some(json!({ "reason": reason }))));
    HarnessReport { report, stabilization_index: None, counterexample: None }
}

fn plain_cx(sc: &SequenceScenario, n: usize, observed: String, expected: String) -> Counterexample {
    let t = sc.term(n);
    Counterexample {
        index: n,
        point: t.point.clone(),
        element: t.element.residues.clone(),
        character: t.character.residues.clone(),
        observed,
        expected,
    }
}

struct NumericScan {
    scan: Scan,
    worst: f64,
    residuals: Vec<(usize, f64, Value)>,
}

impl NumericScan {
    fn new(sc: &SequenceScenario) -> Self {
        NumericScan { scan: Scan::new(sc), worst: 0.0, residuals: Vec::new() }
    }

    fn observe(&mut self, n: usize, residual: f64, witness: &Value) {
        self.worst = self.worst.max(residual);
        self.residuals.push((n, residual, witness.clone()));
    }

    fn check(&mut self, name: &str, tol: f64) -> Check {
        for (n, r, w) in &self.residuals {
            if *r > tol && self.scan.last_failure.as_ref().is_none_or(|c| c.index < *n) {
                self.scan.settled_from = n + 1;
                self.scan.last_failure = Some(Counterexample {
                    index: *n,
                    point: w.get("point").and_then(Value::as_str).unwrap_or_default().to_string(),
                    element: w
                        .get("element")
                        .and_then(Value::as_array)
                        .map(|a| a.iter().filter_map(Value::as_u64).collect())
                        .unwrap_or_default(),
                    character: Vec::new(),
                    observed: format!("residual {r:e}"),
                    expected: format!("residual ≤ {tol:e}"),
                });
            }
        }
        let witness = self.scan.last_failure.as_ref().map(|cx| json!({ "counterexample": cx, "settles_from": self.scan.settled_from }));
        Check::within(name, self.worst, tol, witness)
    }
}
