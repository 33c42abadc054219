//! The complete list of inequivalent irreducible representations of
//! G = A ⊔ xA.
//!
//! With B = {f(a)a⁻¹} there are exactly 2(A:B) one-dimensional reps — each
//! character of A/B lifts two ways, ρ(x) = ±√π(ȳ) — and (|A|−(A:B))/2
//! two-dimensional ones, one per orbit {π, π∘f} of characters nontrivial on
//! B:
//!
//! ```text
//!   R_π(a)  = ( π(a)   0      )        R_π(xa) = ( 0       π(yf(a)) )
//!             ( 0      π(f(a)))                  ( π(a)    0        )
//! ```
//!
//! Squared dimensions sum to |G|, so these exhaust the irreducibles.

use crate::abelian::{characters, characters_nontrivial_on_b, Character};
use crate::cyclo::{cyclo_from_root, CycloInt};
use crate::ext::{ext_inv, ext_mul, ExtElement, ExtGroup};
use std::collections::HashSet;
use std::fmt;

/// Deterministic square root inside Z[ζ_m]: ζ^t ↦ ζ^{t/2} for even t, and
/// ζ^{(t+m)/2} for odd t in an odd-order ring.
///
/// # Panics
/// If `v` is not a root of unity of the ring, or if t and m are both odd —
/// then √v lives only in the index-two extension Z[ζ_{2m}].
pub fn sqrt_of_unity(v: &CycloInt) -> CycloInt {
    let m = v.order();
    let t = (0..m)
        .find(|&t| *v == cyclo_from_root(m, t as i64))
        .unwrap_or_else(|| panic!("{v} is not a root of unity of order dividing {m}"));
    if t % 2 == 0 {
        cyclo_from_root(m, (t / 2) as i64)
    } else {
        assert!(
            m % 2 == 1,
            "ζ_{m}^{t} has no square root in Z[ζ_{m}] (odd exponent, even order)"
        );
        cyclo_from_root(m, ((t + m) / 2) as i64)
    }
}

/// 2×2 matrix over Z[ζ_m].
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub e: [[CycloInt; 2]; 2],
}

impl Mat2 {
    pub fn zero(m: usize) -> Self {
        let z = CycloInt::zero(m);
        Mat2 { e: [[z.clone(), z.clone()], [z.clone(), z]] }
    }

    pub fn identity(m: usize) -> Self {
        let mut out = Self::zero(m);
        out.e[0][0] = CycloInt::from_int(m, 1);
        out.e[1][1] = CycloInt::from_int(m, 1);
        out
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = &out.e[i][j] + &rhs.e[i][j];
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let m = self.e[0][0].order();
        let mut out = Self::zero(m);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out.e[i][j] = &out.e[i][j] + &(&self.e[i][k] * &rhs.e[k][j]);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &CycloInt) -> Mat2 {
        let mut out = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = &out.e[i][j] * c;
            }
        }
        out
    }

    pub fn trace(&self) -> CycloInt {
        &self.e[0][0] + &self.e[1][1]
    }

    pub fn det(&self) -> CycloInt {
        &(&self.e[0][0] * &self.e[1][1]) - &(&self.e[0][1] * &self.e[1][0])
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]
        )
    }
}

#[derive(Clone, Debug)]
pub enum RepKind {
    /// ρ(a) = π(a) for a B-trivial π, ρ(xa) = x_value·π(a), x_value² = π(y).
    One { pi: Character, x_value: CycloInt },
    /// The induced matrices above, for a B-nontrivial orbit representative π.
    Two { pi: Character },
}

#[derive(Clone, Debug)]
pub struct Rep {
    pub label: usize,
    pub kind: RepKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepValue {
    Scalar(CycloInt),
    Matrix(Mat2),
}

impl Rep {
    pub fn dim(&self) -> usize {
        match self.kind {
            RepKind::One { .. } => 1,
            RepKind::Two { .. } => 2,
        }
    }

    pub fn eval(&self, g: &ExtGroup, el: &ExtElement) -> RepValue {
        let a = g.abelian();
        let m = g.working_order();
        match &self.kind {
            RepKind::One { pi, x_value } => {
                let v = pi.eval(a, &el.a, m);
                RepValue::Scalar(if el.flag == 0 { v } else { x_value * &v })
            }
            RepKind::Two { pi } => {
                let mut mat = Mat2::zero(m);
                if el.flag == 0 {
                    mat.e[0][0] = pi.eval(a, &el.a, m);
                    mat.e[1][1] = pi.eval(a, &g.apply_f(&el.a), m);
                } else {
                    let yfa = crate::abelian::ab_mul(a, g.y(), &g.apply_f(&el.a));
                    mat.e[0][1] = pi.eval(a, &yfa, m);
                    mat.e[1][0] = pi.eval(a, &el.a, m);
                }
                RepValue::Matrix(mat)
            }
        }
    }

    /// χ_ρ(g) = Tr ρ(g).
    pub fn character_value(&self, g: &ExtGroup, el: &ExtElement) -> CycloInt {
        match self.eval(g, el) {
            RepValue::Scalar(v) => v,
            RepValue::Matrix(mat) => mat.trace(),
        }
    }
}

impl RepValue {
    pub fn mul(&self, rhs: &RepValue) -> RepValue {
        match (self, rhs) {
            (RepValue::Scalar(x), RepValue::Scalar(y)) => RepValue::Scalar(x * y),
            (RepValue::Matrix(x), RepValue::Matrix(y)) => RepValue::Matrix(x.mul(y)),
            _ => panic!("dimension mismatch"),
        }
    }

    pub fn add(&self, rhs: &RepValue) -> RepValue {
        match (self, rhs) {
            (RepValue::Scalar(x), RepValue::Scalar(y)) => RepValue::Scalar(x + y),
            (RepValue::Matrix(x), RepValue::Matrix(y)) => RepValue::Matrix(x.add(y)),
            _ => panic!("dimension mismatch"),
        }
    }

    pub fn scale(&self, c: &CycloInt) -> RepValue {
        match self {
            RepValue::Scalar(x) => RepValue::Scalar(x * c),
            RepValue::Matrix(x) => RepValue::Matrix(x.scale(c)),
        }
    }

    pub fn zero_like(dim: usize, m: usize) -> RepValue {
        match dim {
            1 => RepValue::Scalar(CycloInt::zero(m)),
            _ => RepValue::Matrix(Mat2::zero(m)),
        }
    }
}

/// All irreducible representations, deterministically ordered: the +√ lifts
/// of the B-trivial characters (lex), the −√ lifts, then one two-dimensional
/// rep per {π, π∘f} orbit keyed by its lex-least member.
pub fn classify(g: &ExtGroup) -> Vec<Rep> {
    let a = g.abelian();
    let m = g.working_order();
    let b_trivial: Vec<Character> = characters(a)
        .into_iter()
        .filter(|pi| pi.is_trivial_on(a, g.b()))
        .collect();

    let mut reps = Vec::new();
    for negate in [false, true] {
        for pi in &b_trivial {
            let mut x_value = sqrt_of_unity(&pi.eval(a, g.y(), m));
            if negate {
                x_value = -x_value;
            }
            reps.push(Rep {
                label: reps.len(),
                kind: RepKind::One { pi: pi.clone(), x_value },
            });
        }
    }

    let mut seen: HashSet<Character> = HashSet::new();
    for pi in characters_nontrivial_on_b(a, g.b()) {
        if seen.contains(&pi) {
            continue;
        }
        // B ⊄ ker π forces π∘f ≠ π, so orbits have size exactly two
        let partner = pi.precompose(a, g.automorphism());
        debug_assert_ne!(partner, pi);
        seen.insert(partner);
        seen.insert(pi.clone());
        reps.push(Rep { label: reps.len(), kind: RepKind::Two { pi } });
    }
    reps
}

/// π₂ ∈ {π₁, π₁∘f}: the induced representations are equivalent exactly then.
pub fn equivalent_characters(
    g: &ExtGroup,
    pi1: &Character,
    pi2: &Character,
) -> bool {
    *pi2 == *pi1 || *pi2 == pi1.precompose(g.abelian(), g.automorphism())
}

/// χ_ρ over all of G in canonical element order.
pub fn character_of(rep: &Rep, g: &ExtGroup) -> Vec<CycloInt> {
    g.elements()
        .iter()
        .map(|el| rep.character_value(g, el))
        .collect()
}

/// Exact residue left when (χ₁|χ₂) is not an algebraic integer multiple of
/// 1/|G| — i.e. the undivided sum Σ χ₁(g)·conj χ₂(g) with its failed divisor.
#[derive(Debug, Clone)]
pub struct NonOrthonormal {
    pub sum: CycloInt,
    pub divisor: i64,
}

impl fmt::Display for NonOrthonormal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inner-product sum {} is not divisible by {}", self.sum, self.divisor)
    }
}

/// (χ₁|χ₂) = 1/|G| Σ_g χ₁(g)·conj χ₂(g), computed exactly: the sum is
/// reduced to the Φ_m power basis and divided coefficientwise.
pub fn inner_product(
    g: &ExtGroup,
    chi1: &[CycloInt],
    chi2: &[CycloInt],
) -> Result<CycloInt, NonOrthonormal> {
    assert_eq!(chi1.len(), chi2.len(), "characters on different carriers");
    let m = g.working_order();
    let mut sum = CycloInt::zero(m);
    for (v1, v2) in chi1.iter().zip(chi2) {
        sum = &sum + &(v1 * &v2.conj());
    }
    let n = g.order() as i64;
    let reduced = sum.reduced();
    if reduced.iter().any(|&c| c % n != 0) {
        return Err(NonOrthonormal { sum, divisor: n });
    }
    // the power basis is a Z-basis, so dividing its coordinates is exact
    let mut out = CycloInt::zero(m);
    for (t, &c) in reduced.iter().enumerate() {
        out = &out + &(&CycloInt::from_int(m, c / n) * &cyclo_from_root(m, t as i64));
    }
    Ok(out)
}

/// Conjugacy classes by brute force, each sorted, ordered by least member.
pub fn conjugacy_classes(g: &ExtGroup) -> Vec<Vec<ExtElement>> {
    let all = g.elements();
    let mut assigned: HashSet<ExtElement> = HashSet::new();
    let mut classes = Vec::new();
    for el in &all {
        if assigned.contains(el) {
            continue;
        }
        let mut class: Vec<ExtElement> = all
            .iter()
            .map(|h| ext_mul(g, &ext_mul(g, h, el), &ext_inv(g, h)))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        class.sort();
        assigned.extend(class.iter().cloned());
        classes.push(class);
    }
    classes
}
