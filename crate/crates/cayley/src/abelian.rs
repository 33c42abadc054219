//! Finite abelian groups A ≅ Z/n₁ × … × Z/n_k, their characters, order-2
//! automorphisms, the subgroup B = {f(a)a⁻¹}, quotients, and the Boolean
//! algebra generated by the cyclic subgroups.
//!
//! Everything is kept at desk scale (|A| ≤ 64) and computed by enumeration;
//! element order is lexicographic on coordinate vectors, character order is
//! lexicographic on exponent vectors, so downstream output is deterministic.

use crate::cyclo::{gcd, lcm, CycloInt};
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AbelianError {
    #[error("abelian group must have order ≥ 3, got {0}")]
    OrderTooSmall(u64),
    #[error("abelian group order {0} exceeds the supported bound 64")]
    OrderTooLarge(u64),
    #[error("invalid factor {0}: each cyclic factor must be ≥ 2")]
    BadFactor(u64),
    #[error("generator image {index} has order not dividing factor {factor}")]
    NotAHomomorphism { index: usize, factor: u64 },
    #[error("generator images do not define a bijection")]
    NotBijective,
    #[error("power map exponent {0} is not coprime to the group exponent {1}")]
    NotCoprime(i64, u64),
    #[error("set is not a subgroup: not closed under multiplication")]
    NotASubgroup,
}

/// A ≅ Z/n₁ × … × Z/n_k with the factor list as given (no normal form).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    order: u64,
    exponent: u64,
}

/// An element of A as its canonical residue vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbElement {
    coords: Vec<u64>,
}

impl AbelianGroup {
    pub fn new(factors: &[u64]) -> Result<Self, AbelianError> {
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(AbelianError::BadFactor(bad));
        }
        let order = factors.iter().product::<u64>();
        if order < 3 {
            return Err(AbelianError::OrderTooSmall(order));
        }
        if order > 64 {
            return Err(AbelianError::OrderTooLarge(order));
        }
        let exponent = factors.iter().fold(1, |e, &n| lcm(e, n));
        Ok(AbelianGroup { factors: factors.to_vec(), order, exponent })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn identity(&self) -> AbElement {
        AbElement { coords: vec![0; self.factors.len()] }
    }

    /// Canonicalizes arbitrary integer coordinates (negatives wrap).
    pub fn element(&self, coords: &[i64]) -> AbElement {
        assert_eq!(coords.len(), self.factors.len(), "coordinate dimension mismatch");
        AbElement {
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        }
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<AbElement> {
        (0..self.order).map(|r| self.unrank(r)).collect()
    }

    /// Mixed-radix rank; agrees with lexicographic order on coords.
    pub fn rank(&self, a: &AbElement) -> u64 {
        a.coords
            .iter()
            .zip(&self.factors)
            .fold(0, |r, (&c, &n)| r * n + c)
    }

    pub fn unrank(&self, mut r: u64) -> AbElement {
        let mut coords = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            coords[i] = r % self.factors[i];
            r /= self.factors[i];
        }
        AbElement { coords }
    }
}

impl AbElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let joined: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", joined.join(","))
    }
}

impl fmt::Debug for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl serde::Serialize for AbElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn ab_mul(group: &AbelianGroup, a: &AbElement, b: &AbElement) -> AbElement {
    assert_eq!(a.coords.len(), b.coords.len(), "coordinate dimension mismatch");
    AbElement {
        coords: a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&group.factors)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect(),
    }
}

pub fn ab_inv(group: &AbelianGroup, a: &AbElement) -> AbElement {
    AbElement {
        coords: a
            .coords
            .iter()
            .zip(&group.factors)
            .map(|(&x, &n)| (n - x) % n)
            .collect(),
    }
}

pub fn ab_pow(group: &AbelianGroup, a: &AbElement, j: i64) -> AbElement {
    AbElement {
        coords: a
            .coords
            .iter()
            .zip(&group.factors)
            .map(|(&x, &n)| ((x as i128 * j as i128).rem_euclid(n as i128)) as u64)
            .collect(),
    }
}

pub fn element_order(group: &AbelianGroup, a: &AbElement) -> u64 {
    a.coords
        .iter()
        .zip(&group.factors)
        .fold(1, |o, (&c, &n)| lcm(o, n / gcd(c, n)))
}

/// An automorphism of A, stored by its images of the canonical generators
/// e₁,…,e_k and validated at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<AbElement>,
}

impl Automorphism {
    pub fn new(group: &AbelianGroup, images: Vec<AbElement>) -> Result<Self, AbelianError> {
        assert_eq!(images.len(), group.factors.len(), "one image per generator");
        for (i, (img, &n)) in images.iter().zip(&group.factors).enumerate() {
            if n % element_order(group, img) != 0 {
                return Err(AbelianError::NotAHomomorphism { index: i, factor: n });
            }
        }
        let f = Automorphism { images };
        let seen: HashSet<AbElement> =
            group.elements().iter().map(|a| f.apply(group, a)).collect();
        if seen.len() as u64 != group.order {
            return Err(AbelianError::NotBijective);
        }
        Ok(f)
    }

    /// The inversion a ↦ a⁻¹, always an involution.
    pub fn inversion(group: &AbelianGroup) -> Self {
        Automorphism {
            images: (0..group.factors.len())
                .map(|i| {
                    let mut coords = vec![0i64; group.factors.len()];
                    coords[i] = -1;
                    group.element(&coords)
                })
                .collect(),
        }
    }

    pub fn identity(group: &AbelianGroup) -> Self {
        Automorphism {
            images: (0..group.factors.len())
                .map(|i| {
                    let mut coords = vec![0i64; group.factors.len()];
                    coords[i] = 1;
                    group.element(&coords)
                })
                .collect(),
        }
    }

    pub fn images(&self) -> &[AbElement] {
        &self.images
    }

    pub fn apply(&self, group: &AbelianGroup, a: &AbElement) -> AbElement {
        let mut out = group.identity();
        for (&c, img) in a.coords.iter().zip(&self.images) {
            out = ab_mul(group, &out, &ab_pow(group, img, c as i64));
        }
        out
    }

    pub fn is_involution(&self, group: &AbelianGroup) -> bool {
        group
            .elements()
            .iter()
            .all(|a| self.apply(group, &self.apply(group, a)) == *a)
    }

    pub fn is_identity(&self, group: &AbelianGroup) -> bool {
        *self == Automorphism::identity(group)
    }
}

/// B = {f(a)·a⁻¹ : a ∈ A}, sorted; a subgroup whenever f is an involution.
pub fn subgroup_b(group: &AbelianGroup, f: &Automorphism) -> Vec<AbElement> {
    let mut set: Vec<AbElement> = group
        .elements()
        .iter()
        .map(|a| ab_mul(group, &f.apply(group, a), &ab_inv(group, a)))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    set.sort();
    set
}

/// A/B with canonical (lex-least) coset representatives.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub reps: Vec<AbElement>,
    pub index: u64,
    coset_of: HashMap<AbElement, usize>,
}

impl Quotient {
    pub fn coset_index(&self, a: &AbElement) -> usize {
        self.coset_of[a]
    }
}

pub fn quotient(group: &AbelianGroup, b: &[AbElement]) -> Result<Quotient, AbelianError> {
    // nonempty + closed under multiplication ⇒ subgroup, since A is finite
    if b.is_empty() {
        return Err(AbelianError::NotASubgroup);
    }
    let bset: HashSet<&AbElement> = b.iter().collect();
    for x in b {
        for y in b {
            if !bset.contains(&ab_mul(group, x, y)) {
                return Err(AbelianError::NotASubgroup);
            }
        }
    }
    let mut reps: Vec<AbElement> = Vec::new();
    let mut coset_of = HashMap::new();
    for a in group.elements() {
        if coset_of.contains_key(&a) {
            continue;
        }
        let idx = reps.len();
        for x in b {
            coset_of.insert(ab_mul(group, &a, x), idx);
        }
        coset_of.insert(a.clone(), idx);
        reps.push(a);
    }
    let index = reps.len() as u64;
    Ok(Quotient { reps, index, coset_of })
}

/// A character of A, stored as its exponent vector: on the i-th generator it
/// takes the value ζ_{nᵢ}^{eᵢ}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    exponents: Vec<u64>,
}

impl Character {
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// t with π(a) = ζ_E^t, E = exponent(A).
    pub fn pairing_exponent(&self, group: &AbelianGroup, a: &AbElement) -> u64 {
        let e = group.exponent;
        let mut t: u64 = 0;
        for ((&ex, &c), &n) in self.exponents.iter().zip(&a.coords).zip(&group.factors) {
            t = (t + ex % n * (c % n) % e * (e / n)) % e;
        }
        t
    }

    /// π(a) in Z[ζ_m]; m must be a multiple of exponent(A).
    pub fn eval(&self, group: &AbelianGroup, a: &AbElement, m: usize) -> CycloInt {
        let e = group.exponent as usize;
        assert!(m.is_multiple_of(e), "order {m} does not contain the {e}-th roots");
        crate::cyclo::cyclo_from_root(m, (self.pairing_exponent(group, a) as usize * (m / e)) as i64)
    }

    /// Σ_{s∈S} π(s) in Z[ζ_m].
    pub fn eval_sum(&self, group: &AbelianGroup, set: &[AbElement], m: usize) -> CycloInt {
        let mut acc = CycloInt::zero(m);
        for s in set {
            acc = &acc + &self.eval(group, s, m);
        }
        acc
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn is_trivial_on(&self, group: &AbelianGroup, set: &[AbElement]) -> bool {
        set.iter().all(|a| self.pairing_exponent(group, a) == 0)
    }

    /// π ∘ f, again a character of A.
    pub fn precompose(&self, group: &AbelianGroup, f: &Automorphism) -> Character {
        let e = group.exponent;
        let exponents = group
            .factors
            .iter()
            .zip(f.images())
            .map(|(&n, img)| {
                let t = self.pairing_exponent(group, img);
                // e_j^{n_j} = 1 forces (E/n_j) | t, so the division is exact
                debug_assert_eq!(t % (e / n), 0);
                t / (e / n) % n
            })
            .collect();
        Character { exponents }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let joined: Vec<String> = self.exponents.iter().map(|c| c.to_string()).collect();
        write!(f, "χ[{}]", joined.join(","))
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for Character {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All |A| characters in lexicographic exponent order.
pub fn characters(group: &AbelianGroup) -> Vec<Character> {
    group
        .elements()
        .iter()
        .map(|a| Character { exponents: a.coords.clone() })
        .collect()
}

/// The |A| − (A:B) characters whose kernel does not contain B.
pub fn characters_nontrivial_on_b(group: &AbelianGroup, b: &[AbElement]) -> Vec<Character> {
    characters(group)
        .into_iter()
        .filter(|pi| !pi.is_trivial_on(group, b))
        .collect()
}

/// A generator-equivalence class {x : ⟨x⟩ = ⟨g⟩}.
#[derive(Clone, Debug)]
pub struct Atom {
    pub representative: AbElement,
    pub members: Vec<AbElement>,
}

/// The atoms of the Boolean algebra generated by the subgroups of A, i.e.
/// the partition of A by generated cyclic subgroup.
pub fn atoms(group: &AbelianGroup) -> Vec<Atom> {
    let mut by_subgroup: HashMap<Vec<u64>, Vec<AbElement>> = HashMap::new();
    for a in group.elements() {
        let mut cyclic: Vec<u64> = Vec::new();
        let mut p = a.clone();
        loop {
            cyclic.push(group.rank(&p));
            if p.is_identity() {
                break;
            }
            p = ab_mul(group, &p, &a);
        }
        cyclic.sort_unstable();
        by_subgroup.entry(cyclic).or_default().push(a);
    }
    let mut out: Vec<Atom> = by_subgroup
        .into_values()
        .map(|mut members| {
            members.sort();
            Atom { representative: members[0].clone(), members }
        })
        .collect();
    out.sort_by(|x, y| x.representative.cmp(&y.representative));
    out
}

/// True iff S is a union of atoms.
pub fn in_boolean_algebra(group: &AbelianGroup, set: &[AbElement]) -> bool {
    let sset: HashSet<&AbElement> = set.iter().collect();
    atoms(group).iter().all(|atom| {
        let hits = atom.members.iter().filter(|m| sset.contains(m)).count();
        hits == 0 || hits == atom.members.len()
    })
}

/// Verifies S^j = S for j coprime to exponent(A); the closure that makes
/// Boolean-algebra membership equivalent to integrality over A.
pub fn power_closure_check(
    group: &AbelianGroup,
    set: &[AbElement],
    j: i64,
) -> Result<bool, AbelianError> {
    if gcd(j.unsigned_abs(), group.exponent) != 1 {
        return Err(AbelianError::NotCoprime(j, group.exponent));
    }
    let original: HashSet<&AbElement> = set.iter().collect();
    let mapped: HashSet<AbElement> = set.iter().map(|a| ab_pow(group, a, j)).collect();
    Ok(mapped.len() == original.len() && mapped.iter().all(|a| original.contains(a)))
}
