//! Closed-form integrality tests.
//!
//! The main route ([`check_main`]) decides integrality of `Cay(G, S)` from the
//! connection-set split alone: condition (1) asks every one-dimensional
//! representation value to be a rational integer, condition (2) asks each
//! two-dimensional block's trace δ to be a rational integer and its
//! discriminant δ² − 4ε to be a perfect square.  The remaining routes are
//! fast paths for special shapes (symmetric sets, inversion automorphism,
//! antisymmetric sets over dihedral/dicyclic groups); each is an independent
//! re-derivation whose verdict must agree with the main route whenever its
//! precondition holds.  All arithmetic is exact over Z[ζ_m].

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{
    ab_inv, ab_mul, atoms, element_order, in_boolean_algebra, AbElement, Character,
};
use crate::cyclo::{is_rational_integer, perfect_square_integer, CycloInt};
use crate::ext::{split_connection_set, ConnectionSet, ExtGroup};
use crate::reps::{Rep, RepKind};

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Which decision procedure produced a [`CriterionTrace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    #[serde(rename = "main")]
    Main,
    #[serde(rename = "undirected")]
    Undirected,
    #[serde(rename = "s=-1")]
    SMinusOne,
    #[serde(rename = "dihedral-directed")]
    DihedralDirected,
    #[serde(rename = "dicyclic-directed")]
    DicyclicDirected,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Route::Main => "main",
            Route::Undirected => "undirected",
            Route::SMinusOne => "s=-1",
            Route::DihedralDirected => "dihedral-directed",
            Route::DicyclicDirected => "dicyclic-directed",
        };
        f.write_str(name)
    }
}

/// A scalar membership check: `value` must be a rational integer.
#[derive(Clone, Debug, Serialize)]
pub struct ValueCheck {
    pub label: String,
    pub value: CycloInt,
    pub integer: Option<i64>,
    pub ok: bool,
}

/// A quadratic check attached to one character: `discriminant` must be a
/// perfect square, and `delta` (when the route defines one) a rational
/// integer.
#[derive(Clone, Debug, Serialize)]
pub struct QuadCheck {
    pub character: String,
    pub delta: Option<CycloInt>,
    pub epsilon: Option<CycloInt>,
    pub discriminant: CycloInt,
    pub delta_integer: Option<i64>,
    pub square_root: Option<i64>,
    pub ok: bool,
}

/// Full evidence for one integrality verdict.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionTrace {
    pub route: Route,
    /// Set by the inversion route only: is S₁ a union of atoms?
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boolean_algebra: Option<bool>,
    pub condition1: Vec<ValueCheck>,
    pub condition2: Vec<QuadCheck>,
    pub overall: bool,
}

impl CriterionTrace {
    fn assemble(
        route: Route,
        boolean_algebra: Option<bool>,
        condition1: Vec<ValueCheck>,
        condition2: Vec<QuadCheck>,
    ) -> Self {
        let overall = boolean_algebra.unwrap_or(true)
            && condition1.iter().all(|c| c.ok)
            && condition2.iter().all(|c| c.ok);
        CriterionTrace {
            route,
            boolean_algebra,
            condition1,
            condition2,
            overall,
        }
    }

    /// The first failing check, rendered for diagnostics.
    pub fn failing_witness(&self) -> Option<String> {
        // Rational values read better as plain integers.
        fn show(v: &CycloInt) -> String {
            match is_rational_integer(v) {
                Some(n) => n.to_string(),
                None => v.to_string(),
            }
        }
        if let Some(false) = self.boolean_algebra {
            return Some("S₁ is not a union of atoms".to_string());
        }
        if let Some(c) = self.condition1.iter().find(|c| !c.ok) {
            return Some(format!("{}: value {} is not a rational integer", c.label, c.value));
        }
        if let Some(c) = self.condition2.iter().find(|c| !c.ok) {
            if let (Some(delta), None) = (&c.delta, c.delta_integer) {
                return Some(format!(
                    "{}: δ = {} is not a rational integer",
                    c.character, delta
                ));
            }
            return Some(format!(
                "{}: discriminant {} is not a perfect square",
                c.character,
                show(&c.discriminant)
            ));
        }
        None
    }
}

/// The five block invariants of one two-dimensional representation.
#[derive(Clone, Debug)]
pub struct Greek {
    pub alpha: CycloInt,
    pub beta: CycloInt,
    pub gamma: CycloInt,
    pub delta: CycloInt,
    pub epsilon: CycloInt,
}

fn char_sum(g: &ExtGroup, pi: &Character, set: &[AbElement]) -> CycloInt {
    pi.eval_sum(g.abelian(), set, g.working_order())
}

fn inv_set(g: &ExtGroup, set: &[AbElement]) -> Vec<AbElement> {
    set.iter().map(|a| ab_inv(g.abelian(), a)).collect()
}

fn f_set(g: &ExtGroup, set: &[AbElement]) -> Vec<AbElement> {
    set.iter().map(|a| g.apply_f(a)).collect()
}

fn yf_set(g: &ExtGroup, set: &[AbElement]) -> Vec<AbElement> {
    set.iter()
        .map(|a| ab_mul(g.abelian(), g.y(), &g.apply_f(a)))
        .collect()
}

/// α, β, γ and the trace/determinant pair (δ, ε) of the two-dimensional
/// block indexed by `pi`.
///
/// Errors when `pi` is trivial on B: such characters extend to
/// one-dimensional representations of G and have no two-dimensional block.
pub fn greek_letters(
    g: &ExtGroup,
    set: &ConnectionSet,
    pi: &Character,
) -> Result<Greek, CriteriaError> {
    if pi.is_trivial_on(g.abelian(), g.b()) {
        return Err(CriteriaError::Precondition(format!(
            "{pi} is trivial on B; it indexes no two-dimensional block"
        )));
    }
    let m = g.working_order();
    let i = CycloInt::imaginary_unit(m);

    let s1 = char_sum(g, pi, &set.s1);
    let fs1 = char_sum(g, pi, &f_set(g, &set.s1));
    let s2 = char_sum(g, pi, &set.s2);
    let s2_inv = char_sum(g, pi, &inv_set(g, &set.s2));

    let alpha = &char_sum(g, pi, &set.t1) - &char_sum(g, pi, &inv_set(g, &set.t1));
    let beta = &char_sum(g, pi, &yf_set(g, &set.t2)) - &char_sum(g, pi, &inv_set(g, &set.t2));
    let ft1 = f_set(g, &set.t1);
    let gamma = &char_sum(g, pi, &ft1) - &char_sum(g, pi, &inv_set(g, &ft1));

    let delta = &(&fs1 + &s1) + &(&i * &(&alpha + &gamma));
    let cross = &(&(&s1 * &gamma) + &(&fs1 * &alpha)) - &(&(&beta * &s2) - &(&beta.conj() * &s2_inv));
    let epsilon = &(&(&(&s1 * &fs1) - &(&s2 * &s2_inv)) + &(&i * &cross))
        - &(&(&alpha * &gamma) + &(&beta * &beta.conj()));

    Ok(Greek {
        alpha,
        beta,
        gamma,
        delta,
        epsilon,
    })
}

/// The exact value the one-dimensional representation (π lifted with
/// ρ(x) = x_value) assigns to the graph: ρ(S₁) + ρ(x)ρ(S₂) minus twice the
/// imaginary parts of ρ(T₁) and ρ(x)ρ(T₂), where −2·Im(z) enters the sum
/// algebraically as i·(z − conj z).
fn one_dim_value(
    g: &ExtGroup,
    set: &ConnectionSet,
    pi: &Character,
    x_value: &CycloInt,
) -> CycloInt {
    let i = CycloInt::imaginary_unit(g.working_order());
    let sym = &char_sum(g, pi, &set.s1) + &(x_value * &char_sum(g, pi, &set.s2));
    let z = char_sum(g, pi, &set.t1);
    let w = x_value * &char_sum(g, pi, &set.t2);
    let anti = &(&z - &z.conj()) + &(&w - &w.conj());
    &sym + &(&i * &anti)
}

fn value_check(label: String, value: CycloInt) -> ValueCheck {
    let integer = is_rational_integer(&value);
    ValueCheck {
        label,
        value,
        ok: integer.is_some(),
        integer,
    }
}

/// A quadratic check whose whole content is "discriminant is a perfect
/// square" (no separate δ requirement).
fn square_check(character: String, discriminant: CycloInt) -> QuadCheck {
    let square_root = perfect_square_integer(&discriminant);
    QuadCheck {
        character,
        delta: None,
        epsilon: None,
        ok: square_root.is_some(),
        delta_integer: None,
        square_root,
        discriminant,
    }
}

/// All characters of A nontrivial on B, recovered from the two-dimensional
/// representations: each contributes its indexing character π and the orbit
/// mate π∘f (distinct whenever π is nontrivial on B).
fn b_nontrivial_characters(g: &ExtGroup, reps: &[Rep]) -> Vec<Character> {
    let mut out = Vec::new();
    for rep in reps {
        if let RepKind::Two { pi } = &rep.kind {
            out.push(pi.clone());
            out.push(pi.precompose(g.abelian(), g.automorphism()));
        }
    }
    out
}

/// Decide integrality from the connection-set split: condition (1) over the
/// one-dimensional representations, condition (2) over one character per
/// {π, π∘f} orbit.
pub fn check_main(g: &ExtGroup, set: &ConnectionSet, reps: &[Rep]) -> CriterionTrace {
    check_main_mode(g, set, reps, false)
}

/// [`check_main`] with condition (2) evaluated on both members of each
/// {π, π∘f} orbit.  The mates index equivalent blocks, so the duplicated
/// checks must agree; the redundancy guards the block formulas.
pub fn check_main_paranoid(g: &ExtGroup, set: &ConnectionSet, reps: &[Rep]) -> CriterionTrace {
    check_main_mode(g, set, reps, true)
}

fn check_main_mode(
    g: &ExtGroup,
    set: &ConnectionSet,
    reps: &[Rep],
    paranoid: bool,
) -> CriterionTrace {
    let mut condition1 = Vec::new();
    let mut condition2 = Vec::new();
    for rep in reps {
        match &rep.kind {
            RepKind::One { pi, x_value } => {
                let value = one_dim_value(g, set, pi, x_value);
                condition1.push(value_check(format!("ρ{}", rep.label), value));
            }
            RepKind::Two { pi } => {
                let mut mates = vec![pi.clone()];
                if paranoid {
                    mates.push(pi.precompose(g.abelian(), g.automorphism()));
                }
                for mate in mates {
                    let greek = greek_letters(g, set, &mate)
                        .expect("two-dimensional blocks are indexed by B-nontrivial characters");
                    let delta_integer = is_rational_integer(&greek.delta);
                    let discriminant = &(&greek.delta * &greek.delta)
                        - &(&CycloInt::from_int(g.working_order(), 4) * &greek.epsilon);
                    let square_root = perfect_square_integer(&discriminant);
                    condition2.push(QuadCheck {
                        character: mate.to_string(),
                        delta: Some(greek.delta),
                        epsilon: Some(greek.epsilon),
                        discriminant,
                        ok: delta_integer.is_some() && square_root.is_some(),
                        delta_integer,
                        square_root,
                    });
                }
            }
        }
    }
    CriterionTrace::assemble(Route::Main, None, condition1, condition2)
}

/// Symmetric-set fast path (T = ∅): condition (1) drops its imaginary terms
/// and condition (2) becomes "π(f(S₁)) + π(S₁) ∈ ℤ and
/// (π(f(S₁)) − π(S₁))² + 4π(S₂)π(S₂⁻¹) is a perfect square".
pub fn check_undirected(
    g: &ExtGroup,
    set: &ConnectionSet,
    reps: &[Rep],
) -> Result<CriterionTrace, CriteriaError> {
    if !set.is_undirected() {
        return Err(CriteriaError::Precondition(
            "connection set has proper arcs (T ≠ ∅)".to_string(),
        ));
    }
    let m = g.working_order();
    let four = CycloInt::from_int(m, 4);
    let mut condition1 = Vec::new();
    for rep in reps {
        if let RepKind::One { pi, x_value } = &rep.kind {
            let value = &char_sum(g, pi, &set.s1) + &(x_value * &char_sum(g, pi, &set.s2));
            condition1.push(value_check(format!("ρ{}", rep.label), value));
        }
    }
    let mut condition2 = Vec::new();
    for pi in b_nontrivial_characters(g, reps) {
        let s1 = char_sum(g, &pi, &set.s1);
        let fs1 = char_sum(g, &pi, &f_set(g, &set.s1));
        let s2 = char_sum(g, &pi, &set.s2);
        let s2_inv = char_sum(g, &pi, &inv_set(g, &set.s2));
        let delta = &fs1 + &s1;
        let diff = &fs1 - &s1;
        let discriminant = &(&diff * &diff) + &(&four * &(&s2 * &s2_inv));
        let delta_integer = is_rational_integer(&delta);
        let square_root = perfect_square_integer(&discriminant);
        condition2.push(QuadCheck {
            character: pi.to_string(),
            delta: Some(delta),
            epsilon: None,
            discriminant,
            ok: delta_integer.is_some() && square_root.is_some(),
            delta_integer,
            square_root,
        });
    }
    Ok(CriterionTrace::assemble(
        Route::Undirected,
        None,
        condition1,
        condition2,
    ))
}

fn f_is_inversion(g: &ExtGroup) -> bool {
    let a = g.abelian();
    a.elements().iter().all(|e| g.apply_f(e) == ab_inv(a, e))
}

fn y_in_kernel(g: &ExtGroup, pi: &Character) -> bool {
    pi.pairing_exponent(g.abelian(), g.y()) == 0
}

/// Inversion fast path (f(a) = a⁻¹, so B = A²): S₁ must be a union of atoms,
/// and per character π nontrivial on A² one quadratic quantity — split on
/// whether y ∈ ker π — must be a perfect square.
pub fn check_s_minus_one(
    g: &ExtGroup,
    set: &ConnectionSet,
    reps: &[Rep],
) -> Result<CriterionTrace, CriteriaError> {
    if !f_is_inversion(g) {
        return Err(CriteriaError::Precondition(
            "the defining automorphism is not inversion".to_string(),
        ));
    }
    let m = g.working_order();
    let four = CycloInt::from_int(m, 4);
    let boolean_algebra = Some(in_boolean_algebra(g.abelian(), &set.s1));
    let mut condition2 = Vec::new();
    for pi in b_nontrivial_characters(g, reps) {
        let alpha = &char_sum(g, &pi, &set.t1) - &char_sum(g, &pi, &inv_set(g, &set.t1));
        let alpha_sq = &alpha * &alpha;
        let discriminant = if y_in_kernel(g, &pi) {
            let s2 = char_sum(g, &pi, &set.s2);
            let s2_inv = char_sum(g, &pi, &inv_set(g, &set.s2));
            &(&s2 * &s2_inv) - &alpha_sq
        } else {
            let t2 = char_sum(g, &pi, &set.t2);
            let t2_inv = char_sum(g, &pi, &inv_set(g, &set.t2));
            &(&four * &(&t2 * &t2_inv)) - &alpha_sq
        };
        condition2.push(square_check(pi.to_string(), discriminant));
    }
    Ok(CriterionTrace::assemble(
        Route::SMinusOne,
        boolean_algebra,
        Vec::new(),
        condition2,
    ))
}

/// Dihedral antisymmetric fast path: for S ⊆ A∖{1} with S ∩ S⁻¹ = ∅, the
/// graph is integral iff π(S) − π(S⁻¹) ∈ iℤ for every π nontrivial on A².
pub fn check_dihedral_directed(
    g: &ExtGroup,
    set: &ConnectionSet,
    reps: &[Rep],
) -> Result<CriterionTrace, CriteriaError> {
    if !f_is_inversion(g) || !g.y().is_identity() {
        return Err(CriteriaError::Precondition(
            "group is not dihedral".to_string(),
        ));
    }
    if !set.s2.is_empty() || !set.t2.is_empty() {
        return Err(CriteriaError::Precondition(
            "connection set is not contained in A".to_string(),
        ));
    }
    if !set.s1.is_empty() {
        return Err(CriteriaError::Precondition(
            "connection set is not antisymmetric (S ∩ S⁻¹ ≠ ∅)".to_string(),
        ));
    }
    let i = CycloInt::imaginary_unit(g.working_order());
    let mut condition1 = Vec::new();
    for pi in b_nontrivial_characters(g, reps) {
        let diff = &char_sum(g, &pi, &set.t1) - &char_sum(g, &pi, &inv_set(g, &set.t1));
        // π(S) − π(S⁻¹) ∈ iℤ, tested as −i·(π(S) − π(S⁻¹)) ∈ ℤ.
        let value = -&(&i * &diff);
        condition1.push(value_check(pi.to_string(), value));
    }
    Ok(CriterionTrace::assemble(
        Route::DihedralDirected,
        None,
        condition1,
        Vec::new(),
    ))
}

/// Dicyclic antisymmetric fast path: with S = T₁ ∪ xT₂ antisymmetric,
/// condition (a) bounds π(T₁) − π(T₁⁻¹) to iℤ when y ∈ ker π, and
/// condition (b) makes 4π(T₂)π(T₂⁻¹) − (π(T₁) − π(T₁⁻¹))² a perfect square
/// when y ∉ ker π.
pub fn check_dicyclic_directed(
    g: &ExtGroup,
    set: &ConnectionSet,
    reps: &[Rep],
) -> Result<CriterionTrace, CriteriaError> {
    if !f_is_inversion(g) || element_order(g.abelian(), g.y()) != 2 {
        return Err(CriteriaError::Precondition(
            "group is not dicyclic".to_string(),
        ));
    }
    if !set.s1.is_empty() || !set.s2.is_empty() {
        return Err(CriteriaError::Precondition(
            "connection set is not antisymmetric (S ∩ S⁻¹ ≠ ∅)".to_string(),
        ));
    }
    let m = g.working_order();
    let i = CycloInt::imaginary_unit(m);
    let four = CycloInt::from_int(m, 4);
    let mut condition1 = Vec::new();
    let mut condition2 = Vec::new();
    for pi in b_nontrivial_characters(g, reps) {
        let diff = &char_sum(g, &pi, &set.t1) - &char_sum(g, &pi, &inv_set(g, &set.t1));
        if y_in_kernel(g, &pi) {
            condition1.push(value_check(pi.to_string(), -&(&i * &diff)));
        } else {
            let t2 = char_sum(g, &pi, &set.t2);
            let t2_inv = char_sum(g, &pi, &inv_set(g, &set.t2));
            let discriminant = &(&four * &(&t2 * &t2_inv)) - &(&diff * &diff);
            condition2.push(square_check(pi.to_string(), discriminant));
        }
    }
    Ok(CriterionTrace::assemble(
        Route::DicyclicDirected,
        None,
        condition1,
        condition2,
    ))
}

/// Guaranteed-integral undirected sets S₁ ∪ xS₂ built from unions of atoms
/// with 1 ∉ S₁, f(S₁) = S₁ and f(S₂) = y⁻¹S₂.  Emits at most `budget` sets,
/// deterministically for a given seed; groups whose candidate space is small
/// yield their complete list.
pub fn coro_simple_generator(g: &ExtGroup, seed: u64, budget: usize) -> Vec<ConnectionSet> {
    if budget == 0 {
        return Vec::new();
    }
    let a = g.abelian();
    let all_atoms = atoms(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // f permutes atoms; index the induced permutation.
    let image_of: Vec<usize> = all_atoms
        .iter()
        .map(|at| {
            let img = g.apply_f(&at.representative);
            all_atoms
                .iter()
                .position(|other| other.members.binary_search(&img).is_ok())
                .expect("automorphism image lies in some atom")
        })
        .collect();

    // f-stable unions omitting the identity = unions of whole f-orbits of
    // non-identity atoms.
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; all_atoms.len()];
    for idx in 0..all_atoms.len() {
        if seen[idx] || all_atoms[idx].representative.is_identity() {
            continue;
        }
        let mate = image_of[idx];
        seen[idx] = true;
        seen[mate] = true;
        let mut orbit = vec![idx];
        if mate != idx {
            orbit.push(mate);
        }
        orbits.push(orbit);
    }

    let union_of = |atom_indices: &[usize]| -> Vec<AbElement> {
        let mut members: Vec<AbElement> = atom_indices
            .iter()
            .flat_map(|&idx| all_atoms[idx].members.iter().cloned())
            .collect();
        members.sort();
        members
    };

    // S₁ choices: subsets of the orbit list.
    let raw_cap: u64 = 1 << 13;
    let s1_sets: Vec<Vec<AbElement>> = subset_masks(orbits.len(), raw_cap, &mut rng)
        .into_iter()
        .map(|mask| {
            let picked: Vec<usize> = orbits
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .flat_map(|(_, orbit)| orbit.iter().copied())
                .collect();
            union_of(&picked)
        })
        .collect();

    // S₂ choices: atom subsets with f(S₂) = y⁻¹·S₂, identity atom allowed.
    let y_inv = ab_inv(a, g.y());
    let s2_sets: Vec<Vec<AbElement>> = subset_masks(all_atoms.len(), raw_cap, &mut rng)
        .into_iter()
        .filter_map(|mask| {
            let picked: Vec<usize> = (0..all_atoms.len()).filter(|j| mask >> j & 1 == 1).collect();
            let set = union_of(&picked);
            let mut image = f_set(g, &set);
            image.sort();
            let mut translated: Vec<AbElement> =
                set.iter().map(|e| ab_mul(a, &y_inv, e)).collect();
            translated.sort();
            if image == translated {
                Some(set)
            } else {
                None
            }
        })
        .collect();

    let mut masks = BTreeSet::new();
    for s1 in &s1_sets {
        for s2 in &s2_sets {
            let mut mask = 0u64;
            for e in s1 {
                let bit = g
                    .bit_index(&crate::ext::ExtElement {
                        flag: 0,
                        a: e.clone(),
                    })
                    .expect("non-identity member has a bit");
                mask |= 1 << bit;
            }
            for e in s2 {
                let bit = g
                    .bit_index(&crate::ext::ExtElement {
                        flag: 1,
                        a: e.clone(),
                    })
                    .expect("xA members always have a bit");
                mask |= 1 << bit;
            }
            masks.insert(mask);
        }
    }

    let mut ordered: Vec<u64> = masks.into_iter().collect();
    if ordered.len() > budget {
        ordered.shuffle(&mut rng);
        ordered.truncate(budget);
        ordered.sort_unstable();
    }
    ordered
        .into_iter()
        .map(|mask| {
            let set = split_connection_set(g, mask).expect("generated mask is in range");
            debug_assert!(set.is_undirected(), "generated sets are symmetric");
            set
        })
        .collect()
}

/// All subset bitmasks over `n` items when 2^n ≤ cap, otherwise `cap`
/// pseudo-random masks (duplicates filtered later through the result set).
fn subset_masks(n: usize, cap: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    assert!(n < 64, "atom count bounded by the group order");
    let total = 1u64 << n;
    if total <= cap {
        (0..total).collect()
    } else {
        (0..cap).map(|_| rng.gen_range(0..total)).collect()
    }
}
