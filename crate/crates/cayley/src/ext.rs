//! The extension G = ⟨A, x | x² = y, x a x⁻¹ = f(a)⟩ for an abelian A, an
//! involution f ∈ Aut(A) fixing y, written as the disjoint union A ⊔ xA.
//! Includes the textual group-spec grammar and the S ↦ (S₁, S₂, T₁, T₂)
//! decomposition of connection sets.
//!
//! Canonical element order — all of A∖{1} lexicographically, then xA
//! lexicographically — defines the bitmask semantics used by the census and
//! everything downstream.

use crate::abelian::{
    ab_inv, ab_mul, element_order, subgroup_b, AbElement, AbelianGroup, Automorphism,
};
use crate::cyclo::lcm;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("parse error at byte {pos}: {reason}")]
    Parse { pos: usize, reason: String },
    #[error("invalid group: {0}")]
    Invalid(String),
    #[error(transparent)]
    Abelian(#[from] crate::abelian::AbelianError),
    #[error("connection-set mask uses bits beyond the {bits} non-identity elements")]
    MaskOutOfRange { bits: u32 },
}

/// x^flag · a with flag ∈ {0, 1}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElement {
    pub flag: u8,
    pub a: AbElement,
}

impl fmt::Debug for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flag == 0 {
            write!(f, "({})", self.a)
        } else {
            write!(f, "(x·{})", self.a)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtGroup {
    a: AbelianGroup,
    f: Automorphism,
    y: AbElement,
    b: Vec<AbElement>,
    m: usize,
    spec: String,
}

impl ExtGroup {
    /// Validates the presentation data: f an involution ≠ id (G must be
    /// non-abelian), f(y) = y, and |G| = 2|A| ≤ 64.
    pub fn new(
        a: AbelianGroup,
        f: Automorphism,
        y: AbElement,
        spec: impl Into<String>,
    ) -> Result<Self, GroupError> {
        if f.is_identity(&a) {
            return Err(GroupError::Invalid("f = identity".into()));
        }
        if !f.is_involution(&a) {
            return Err(GroupError::Invalid("f not involutive".into()));
        }
        if f.apply(&a, &y) != y {
            return Err(GroupError::Invalid("f(y) ≠ y".into()));
        }
        if a.order() > 32 {
            return Err(GroupError::Invalid(format!(
                "|G| = {} exceeds the supported bound 64",
                2 * a.order()
            )));
        }
        let b = subgroup_b(&a, &f);
        let m = lcm(4, 2 * a.exponent()) as usize;
        Ok(ExtGroup { a, f, y, b, m, spec: spec.into() })
    }

    pub fn abelian(&self) -> &AbelianGroup {
        &self.a
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.f
    }

    pub fn y(&self) -> &AbElement {
        &self.y
    }

    /// B = {f(a)a⁻¹}, cached at construction.
    pub fn b(&self) -> &[AbElement] {
        &self.b
    }

    /// Cyclotomic working order m = lcm(4, 2·exponent(A)): contains 𝐢, all
    /// character values, and their square roots.
    pub fn working_order(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u64 {
        2 * self.a.order()
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn identity(&self) -> ExtElement {
        ExtElement { flag: 0, a: self.a.identity() }
    }

    pub fn apply_f(&self, a: &AbElement) -> AbElement {
        self.f.apply(&self.a, a)
    }

    /// All 2|A| elements in canonical order: A lex, then xA lex.
    pub fn elements(&self) -> Vec<ExtElement> {
        let mut out = Vec::with_capacity(2 * self.a.order() as usize);
        for flag in 0..2u8 {
            out.extend(self.a.elements().into_iter().map(|a| ExtElement { flag, a }));
        }
        out
    }

    /// Mask-bit position of a non-identity element; None for the identity.
    pub fn bit_index(&self, g: &ExtElement) -> Option<u32> {
        let n = self.a.order();
        let r = self.a.rank(&g.a);
        match g.flag {
            0 if r == 0 => None,
            0 => Some((r - 1) as u32),
            _ => Some((n - 1 + r) as u32),
        }
    }

    pub fn element_at_bit(&self, bit: u32) -> ExtElement {
        let n = self.a.order();
        let bit = bit as u64;
        if bit < n - 1 {
            ExtElement { flag: 0, a: self.a.unrank(bit + 1) }
        } else {
            ExtElement { flag: 1, a: self.a.unrank(bit - (n - 1)) }
        }
    }

    pub fn mask_bits(&self) -> u32 {
        (2 * self.a.order() - 1) as u32
    }

    /// Renders an element in the set-expression syntax (`1`, `a^2`, `x*a^2`
    /// for cyclic A; tuples `(c1,c2)` otherwise).
    pub fn render(&self, g: &ExtElement) -> String {
        let a_part = if self.a.factors().len() == 1 {
            match g.a.coords()[0] {
                0 => "1".to_string(),
                1 => "a".to_string(),
                c => format!("a^{c}"),
            }
        } else {
            format!("({})", g.a)
        };
        match (g.flag, g.a.is_identity()) {
            (0, _) => a_part,
            (_, true) => "x".to_string(),
            (_, false) => format!("x*{a_part}"),
        }
    }
}

pub fn ext_mul(g: &ExtGroup, lhs: &ExtElement, rhs: &ExtElement) -> ExtElement {
    let a = g.abelian();
    match (lhs.flag, rhs.flag) {
        (0, 0) => ExtElement { flag: 0, a: ab_mul(a, &lhs.a, &rhs.a) },
        (0, 1) => ExtElement { flag: 1, a: ab_mul(a, &g.apply_f(&lhs.a), &rhs.a) },
        (1, 0) => ExtElement { flag: 1, a: ab_mul(a, &lhs.a, &rhs.a) },
        _ => ExtElement {
            flag: 0,
            a: ab_mul(a, &g.y, &ab_mul(a, &g.apply_f(&lhs.a), &rhs.a)),
        },
    }
}

pub fn ext_inv(g: &ExtGroup, el: &ExtElement) -> ExtElement {
    let a = g.abelian();
    match el.flag {
        0 => ExtElement { flag: 0, a: ab_inv(a, &el.a) },
        _ => ExtElement {
            flag: 1,
            a: ab_mul(a, &ab_inv(a, &g.y), &g.apply_f(&ab_inv(a, &el.a))),
        },
    }
}

pub fn ext_pow(g: &ExtGroup, el: &ExtElement, mut k: u64) -> ExtElement {
    let mut acc = g.identity();
    let mut base = el.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = ext_mul(g, &acc, &base);
        }
        base = ext_mul(g, &base, &base);
        k >>= 1;
    }
    acc
}

/// A connection set S ⊆ G∖{1} with its symmetric/antisymmetric split
/// S = (S₁ ∪ xS₂) ⊔ (T₁ ∪ xT₂), where T = {s ∈ S : s⁻¹ ∉ S}.
#[derive(Clone, Debug)]
pub struct ConnectionSet {
    pub mask: u64,
    pub s1: Vec<AbElement>,
    pub s2: Vec<AbElement>,
    pub t1: Vec<AbElement>,
    pub t2: Vec<AbElement>,
}

impl ConnectionSet {
    pub fn contains(&self, g: &ExtGroup, el: &ExtElement) -> bool {
        match g.bit_index(el) {
            Some(bit) => self.mask >> bit & 1 == 1,
            None => false,
        }
    }

    pub fn members(&self, g: &ExtGroup) -> Vec<ExtElement> {
        (0..g.mask_bits())
            .filter(|&bit| self.mask >> bit & 1 == 1)
            .map(|bit| g.element_at_bit(bit))
            .collect()
    }

    /// True when S is symmetric (T = ∅), i.e. the graph has no proper arcs.
    pub fn is_undirected(&self) -> bool {
        self.t1.is_empty() && self.t2.is_empty()
    }

    /// True when no member's inverse is a member (S ∩ S⁻¹ = ∅); the empty
    /// set is vacuously undirected first.
    pub fn is_directed(&self) -> bool {
        self.s1.is_empty() && self.s2.is_empty() && !(self.t1.is_empty() && self.t2.is_empty())
    }
}

pub fn split_connection_set(g: &ExtGroup, mask: u64) -> Result<ConnectionSet, GroupError> {
    let bits = g.mask_bits();
    if bits < 64 && mask >> bits != 0 {
        return Err(GroupError::MaskOutOfRange { bits });
    }
    let members: Vec<ExtElement> = (0..bits)
        .filter(|&bit| mask >> bit & 1 == 1)
        .map(|bit| g.element_at_bit(bit))
        .collect();
    let in_set = |el: &ExtElement| match g.bit_index(el) {
        Some(bit) => mask >> bit & 1 == 1,
        None => false,
    };

    let (mut s1, mut s2, mut t1, mut t2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for el in &members {
        let symmetric = in_set(&ext_inv(g, el));
        match (symmetric, el.flag) {
            (true, 0) => s1.push(el.a.clone()),
            (true, _) => s2.push(el.a.clone()),
            (false, 0) => t1.push(el.a.clone()),
            (false, _) => t2.push(el.a.clone()),
        }
    }

    let set = ConnectionSet { mask, s1, s2, t1, t2 };
    debug_assert!(connection_set_invariants_hold(g, &set));
    Ok(set)
}

/// (S∖T)⁻¹ = S∖T elementwise: S₁⁻¹ = S₁ and S₂⁻¹ = y·f(S₂); T ∩ T⁻¹ = ∅.
fn connection_set_invariants_hold(g: &ExtGroup, set: &ConnectionSet) -> bool {
    let a = g.abelian();
    let mut s1_inv: Vec<AbElement> = set.s1.iter().map(|s| ab_inv(a, s)).collect();
    s1_inv.sort();
    let mut s2_inv: Vec<AbElement> = set.s2.iter().map(|s| ab_inv(a, s)).collect();
    s2_inv.sort();
    let mut yfs2: Vec<AbElement> = set
        .s2
        .iter()
        .map(|s| ab_mul(a, &g.y, &g.apply_f(s)))
        .collect();
    yfs2.sort();
    let t_inv_disjoint = set
        .t1
        .iter()
        .map(|s| ExtElement { flag: 0, a: s.clone() })
        .chain(set.t2.iter().map(|s| ExtElement { flag: 1, a: s.clone() }))
        .all(|el| !set.contains(g, &ext_inv(g, &el)));
    s1_inv == set.s1 && s2_inv == yfs2 && t_inv_disjoint
}

// ---------------------------------------------------------------------------
// Group-spec grammar
//
//   dihedral(N)                        A = Z/(N/2), f = inversion, y = 1
//   dicyclic(N1xN2x...; c1,c2,...)     f = inversion, y = (c1,...), y² = 1 ≠ y
//   semidihedral(M)                    A = Z/M, M = 2^(n−1) ≥ 8, f(a) = a^(M/2 − 1)
//   modular(M)                         A = Z/M, M = 2^(n−1) ≥ 8, f(a) = a^(M/2 + 1)
//   generic(N1x...; f=[r1,...]; y=c1,...)  diagonal f: eᵢ ↦ eᵢ^rᵢ
//   generic(N1x...; f=[[..],[..]]; y=...)  matrix f: eᵢ ↦ Σ rowᵢ
//
// Whitespace-insensitive; errors carry the byte position in the input.

struct Cursor<'t> {
    text: &'t str,
    pos: usize,
}

impl<'t> Cursor<'t> {
    fn new(text: &'t str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T, GroupError> {
        Err(GroupError::Parse { pos: self.pos, reason: reason.into() })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<(), GroupError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn try_eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        self.text[start..self.pos].to_string()
    }

    fn integer(&mut self) -> Result<i64, GroupError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| GroupError::Parse { pos: start, reason: "expected an integer".into() })
    }

    /// `N1xN2x...` — factor list separated by 'x'.
    fn factor_list(&mut self) -> Result<Vec<u64>, GroupError> {
        let mut out = Vec::new();
        loop {
            let n = self.integer()?;
            if n < 0 {
                return self.err("factors must be positive");
            }
            out.push(n as u64);
            if !self.try_eat('x') {
                return Ok(out);
            }
        }
    }

    fn coord_list(&mut self, arity: usize) -> Result<Vec<i64>, GroupError> {
        let mut out = vec![self.integer()?];
        while self.try_eat(',') {
            out.push(self.integer()?);
        }
        if out.len() != arity {
            return self.err(format!("expected {arity} coordinates, got {}", out.len()));
        }
        Ok(out)
    }

    fn end(&mut self) -> Result<(), GroupError> {
        self.skip_ws();
        if self.pos != self.text.len() {
            return self.err("trailing input");
        }
        Ok(())
    }
}

pub fn parse_group_spec(text: &str) -> Result<ExtGroup, GroupError> {
    let mut cur = Cursor::new(text);
    let family = cur.ident();
    cur.eat('(')?;
    let group = match family.as_str() {
        "dihedral" => {
            let n = cur.integer()?;
            cur.eat(')')?;
            if n < 6 || n % 2 != 0 {
                return Err(GroupError::Invalid(format!(
                    "dihedral order must be even and ≥ 6, got {n}"
                )));
            }
            let a = AbelianGroup::new(&[(n / 2) as u64])?;
            let y = a.identity();
            let f = Automorphism::inversion(&a);
            ExtGroup::new(a, f, y, format!("dihedral({n})"))
        }
        "dicyclic" => {
            let factors = cur.factor_list()?;
            cur.eat(';')?;
            let a = AbelianGroup::new(&factors)?;
            let y_coords = cur.coord_list(factors.len())?;
            cur.eat(')')?;
            let y = a.element(&y_coords);
            if a.exponent() < 3 {
                return Err(GroupError::Invalid(
                    "dicyclic A must have exponent ≥ 3".into(),
                ));
            }
            if a.order() % 2 != 0 {
                return Err(GroupError::Invalid("dicyclic A must have even order".into()));
            }
            if element_order(&a, &y) != 2 {
                return Err(GroupError::Invalid(format!(
                    "dicyclic y must have order 2, got order {}",
                    element_order(&a, &y)
                )));
            }
            let f = Automorphism::inversion(&a);
            let spec = format!(
                "dicyclic({}; {})",
                factors.iter().map(u64::to_string).collect::<Vec<_>>().join("x"),
                y
            );
            ExtGroup::new(a, f, y, spec)
        }
        "semidihedral" | "modular" => {
            let m = cur.integer()?;
            cur.eat(')')?;
            if m < 8 || (m & (m - 1)) != 0 {
                return Err(GroupError::Invalid(format!(
                    "{family} size must be a power of two ≥ 8, got {m}"
                )));
            }
            let a = AbelianGroup::new(&[m as u64])?;
            let r = if family == "semidihedral" { m / 2 - 1 } else { m / 2 + 1 };
            let f = Automorphism::new(&a, vec![a.element(&[r])])?;
            let y = a.identity();
            ExtGroup::new(a, f, y, format!("{family}({m})"))
        }
        "generic" => {
            let factors = cur.factor_list()?;
            let a = AbelianGroup::new(&factors)?;
            cur.eat(';')?;
            if cur.ident() != "f" {
                return cur.err("expected f=[...]");
            }
            cur.eat('=')?;
            cur.eat('[')?;
            let mut images = Vec::new();
            let mut spec_f = Vec::new();
            cur.skip_ws();
            if cur.peek() == Some('[') {
                // matrix form: image of generator i has coords row i
                for i in 0..factors.len() {
                    cur.eat('[')?;
                    let row = cur.coord_list(factors.len())?;
                    cur.eat(']')?;
                    spec_f.push(format!(
                        "[{}]",
                        row.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                    ));
                    images.push(a.element(&row));
                    if i + 1 < factors.len() {
                        cur.eat(',')?;
                    }
                }
            } else {
                // diagonal form: generator i ↦ its rᵢ-th power
                let rs = cur.coord_list(factors.len())?;
                for (i, &r) in rs.iter().enumerate() {
                    let mut coords = vec![0i64; factors.len()];
                    coords[i] = r;
                    images.push(a.element(&coords));
                    spec_f.push(r.to_string());
                }
            }
            cur.eat(']')?;
            cur.eat(';')?;
            if cur.ident() != "y" {
                return cur.err("expected y=...");
            }
            cur.eat('=')?;
            let y_coords = cur.coord_list(factors.len())?;
            cur.eat(')')?;
            let f = Automorphism::new(&a, images)?;
            let y = a.element(&y_coords);
            let spec = format!(
                "generic({}; f=[{}]; y={})",
                factors.iter().map(u64::to_string).collect::<Vec<_>>().join("x"),
                spec_f.join(","),
                y
            );
            ExtGroup::new(a, f, y, spec)
        }
        "" => return cur.err("expected a family name"),
        other => {
            return Err(GroupError::Parse {
                pos: 0,
                reason: format!(
                    "unknown family '{other}' (expected dihedral, dicyclic, semidihedral, modular, generic)"
                ),
            })
        }
    }?;
    cur.end()?;
    Ok(group)
}

/// Parses a comma-separated connection-set expression into a bitmask:
/// `1` is the identity of A (rejected — 1 ∉ S), `a`/`a^k` a power of the
/// generator when A is cyclic, `(c1,...,ck)` a coordinate tuple otherwise,
/// and an `x*` prefix (or bare `x`) selects the xA coset.  The empty string
/// is the empty set.  Inverse of [`ExtGroup::render`].
pub fn parse_set_expression(g: &ExtGroup, text: &str) -> Result<u64, GroupError> {
    let mut cur = Cursor::new(text);
    let mut mask = 0u64;
    cur.skip_ws();
    if cur.pos == text.len() {
        return Ok(0);
    }
    loop {
        let start = cur.pos;
        let el = parse_element(g, &mut cur)?;
        match g.bit_index(&el) {
            Some(bit) => mask |= 1 << bit,
            None => {
                return Err(GroupError::Parse {
                    pos: start,
                    reason: "the identity cannot belong to a connection set".into(),
                })
            }
        }
        if !cur.try_eat(',') {
            break;
        }
    }
    cur.end()?;
    Ok(mask)
}

fn parse_element(g: &ExtGroup, cur: &mut Cursor) -> Result<ExtElement, GroupError> {
    cur.skip_ws();
    if cur.peek() == Some('x') {
        cur.pos += 1;
        let a = if cur.try_eat('*') {
            parse_a_part(g, cur)?
        } else {
            g.abelian().identity()
        };
        return Ok(ExtElement { flag: 1, a });
    }
    Ok(ExtElement { flag: 0, a: parse_a_part(g, cur)? })
}

fn parse_a_part(g: &ExtGroup, cur: &mut Cursor) -> Result<AbElement, GroupError> {
    let a = g.abelian();
    cur.skip_ws();
    match cur.peek() {
        Some('(') => {
            cur.eat('(')?;
            let coords = cur.coord_list(a.factors().len())?;
            cur.eat(')')?;
            Ok(a.element(&coords))
        }
        Some('a') => {
            let start = cur.pos;
            let name = cur.ident();
            if name != "a" {
                return Err(GroupError::Parse {
                    pos: start,
                    reason: format!("unknown element '{name}'"),
                });
            }
            if a.factors().len() != 1 {
                return Err(GroupError::Parse {
                    pos: start,
                    reason: "use a coordinate tuple (c1,...,ck) for multi-factor groups".into(),
                });
            }
            let k = if cur.try_eat('^') { cur.integer()? } else { 1 };
            Ok(a.element(&[k]))
        }
        Some('1') => {
            cur.pos += 1;
            Ok(a.identity())
        }
        _ => cur.err("expected an element: 1, a, a^k, x, x*…, or (c1,...,ck)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> ExtGroup {
        parse_group_spec(spec).unwrap()
    }

    #[test]
    fn parse_families() {
        let d8 = g("dihedral(8)");
        assert_eq!(d8.abelian().factors(), &[4]);
        assert_eq!(*d8.y(), d8.abelian().identity());
        assert_eq!(d8.automorphism(), &Automorphism::inversion(d8.abelian()));
        assert_eq!(d8.b().len(), 2);
        assert_eq!(d8.working_order(), 8);

        let q8 = g("dicyclic(4; 2)");
        assert_eq!(*q8.y(), q8.abelian().element(&[2]));
        assert_eq!(q8.order(), 8);

        let sd = g("semidihedral(8)");
        assert_eq!(sd.automorphism().images(), &[sd.abelian().element(&[3])]);
        let md = g("modular(8)");
        assert_eq!(md.automorphism().images(), &[md.abelian().element(&[5])]);

        // alias: 3 ≡ −1 mod 4
        let alias = g("generic(4; f=[3]; y=0)");
        assert_eq!(alias.abelian(), d8.abelian());
        assert_eq!(alias.automorphism(), d8.automorphism());
        assert_eq!(alias.y(), d8.y());

        let multi = g("generic(2x4; f=[[1,0],[0,3]]; y=0,2)");
        assert_eq!(multi.order(), 16);

        // whitespace-insensitive
        assert_eq!(g("  dicyclic( 2 x 4 ; 0 , 2 )").spec(), "dicyclic(2x4; 0,2)");
    }

    #[test]
    fn parse_diagnostics() {
        for (text, needle) in [
            ("dihedral(7)", "even and ≥ 6"),
            ("dihedral(4)", "even and ≥ 6"),
            ("generic(2; f=[1]; y=0)", "order ≥ 3"),
            ("octahedral(3)", "unknown family"),
            ("dihedral(8", "expected ')'"),
            ("dihedral(8) trailing", "trailing input"),
            ("modular(4)", "power of two ≥ 8"),
            ("semidihedral(12)", "power of two ≥ 8"),
            ("dicyclic(3; 0)", "even order"),
            ("dicyclic(4; 1)", "order 2"),
            ("dicyclic(4; 0)", "order 2"),
            ("generic(4; f=[1]; y=0)", "f = identity"),
            ("generic(4; f=[2]; y=0)", "bijection"),
            ("generic(8; f=[3]; y=1)", "f(y) ≠ y"),
            ("generic(5; f=[2]; y=0)", "not involutive"),
            ("generic(2x4; f=[1,3]; y=1)", "expected 2 coordinates"),
        ] {
            let err = parse_group_spec(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text}: {err} missing {needle}");
        }
        // parse errors carry a position
        match parse_group_spec("dihedral(eight)").unwrap_err() {
            GroupError::Parse { pos, .. } => assert_eq!(pos, 9),
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn multiplication_table_shape() {
        let d8 = g("dihedral(8)");
        let a1 = d8.abelian().element(&[1]);
        let xa = ExtElement { flag: 1, a: a1.clone() };
        assert_eq!(ext_mul(&d8, &xa, &xa), d8.identity());

        let q8 = g("dicyclic(4; 2)");
        let x = ExtElement { flag: 1, a: q8.abelian().identity() };
        assert_eq!(
            ext_mul(&q8, &x, &x),
            ExtElement { flag: 0, a: q8.abelian().element(&[2]) }
        );

        // exhaustive associativity at order 8
        let all = d8.elements();
        for p in &all {
            for q in &all {
                for r in &all {
                    assert_eq!(
                        ext_mul(&d8, &ext_mul(&d8, p, q), r),
                        ext_mul(&d8, p, &ext_mul(&d8, q, r))
                    );
                }
            }
        }
    }

    #[test]
    fn inverses() {
        let d8 = g("dihedral(8)");
        let xa = ExtElement { flag: 1, a: d8.abelian().element(&[1]) };
        assert_eq!(ext_inv(&d8, &xa), xa);

        let q8 = g("dicyclic(4; 2)");
        let b = q8.abelian().element(&[1]);
        let xb = ExtElement { flag: 1, a: b.clone() };
        assert_eq!(
            ext_inv(&q8, &xb),
            ExtElement { flag: 1, a: q8.abelian().element(&[3]) } // a²·b
        );

        for spec in ["dihedral(8)", "dicyclic(4; 2)", "semidihedral(8)", "modular(8)"] {
            let grp = g(spec);
            for el in grp.elements() {
                assert_eq!(ext_mul(&grp, &el, &ext_inv(&grp, &el)), grp.identity());
            }
        }
    }

    #[test]
    fn conjugation_realizes_f() {
        for spec in ["dihedral(12)", "dicyclic(2x4; 0,2)", "semidihedral(16)"] {
            let grp = g(spec);
            let x = ExtElement { flag: 1, a: grp.abelian().identity() };
            let x_inv = ext_inv(&grp, &x);
            for a in grp.abelian().elements() {
                let lhs = ext_mul(
                    &grp,
                    &ext_mul(&grp, &x, &ExtElement { flag: 0, a: a.clone() }),
                    &x_inv,
                );
                assert_eq!(lhs, ExtElement { flag: 0, a: grp.apply_f(&a) });
            }
        }
    }

    #[test]
    fn element_order_and_bits_roundtrip() {
        let grp = g("dicyclic(2x4; 0,2)");
        let all = grp.elements();
        assert_eq!(all.len(), 16);
        for (i, el) in all.iter().enumerate() {
            match grp.bit_index(el) {
                None => assert_eq!(i, 0),
                Some(bit) => {
                    assert_eq!(bit as usize, i - 1);
                    assert_eq!(grp.element_at_bit(bit), *el);
                }
            }
        }
    }

    #[test]
    fn split_examples() {
        let d8 = g("dihedral(8)");
        let a = |c: i64| d8.abelian().element(&[c]);

        // S = {a, a³}: symmetric, purely abelian part
        let mask_sym = 1 << d8.bit_index(&ExtElement { flag: 0, a: a(1) }).unwrap()
            | 1 << d8.bit_index(&ExtElement { flag: 0, a: a(3) }).unwrap();
        let cs = split_connection_set(&d8, mask_sym).unwrap();
        assert_eq!(cs.s1, vec![a(1), a(3)]);
        assert!(cs.s2.is_empty() && cs.t1.is_empty() && cs.t2.is_empty());
        assert!(cs.is_undirected());

        // S = {a}: a⁻¹ = a³ ∉ S
        let cs = split_connection_set(&d8, 1).unwrap();
        assert_eq!(cs.t1, vec![a(1)]);
        assert!(cs.s1.is_empty() && cs.s2.is_empty() && cs.t2.is_empty());
        assert!(cs.is_directed());

        // dicyclic, S = {x}: x⁻¹ = xy ∉ S
        let q8 = g("dicyclic(4; 2)");
        let x_bit = q8
            .bit_index(&ExtElement { flag: 1, a: q8.abelian().identity() })
            .unwrap();
        let cs = split_connection_set(&q8, 1 << x_bit).unwrap();
        assert_eq!(cs.t2, vec![q8.abelian().identity()]);
        assert!(cs.s1.is_empty() && cs.s2.is_empty() && cs.t1.is_empty());
    }

    #[test]
    fn split_rejects_out_of_range() {
        let d8 = g("dihedral(8)");
        match split_connection_set(&d8, 1 << 7) {
            Err(GroupError::MaskOutOfRange { bits: 7 }) => {}
            other => panic!("expected mask-range error, got {other:?}"),
        }
    }

    #[test]
    fn split_roundtrip_all_masks() {
        let d8 = g("dihedral(8)");
        for mask in 0..(1u64 << d8.mask_bits()) {
            let cs = split_connection_set(&d8, mask).unwrap();
            // partition sizes add up
            assert_eq!(
                (cs.s1.len() + cs.s2.len() + cs.t1.len() + cs.t2.len()) as u32,
                mask.count_ones()
            );
            assert!(connection_set_invariants_hold(&d8, &cs));
        }
    }

    #[test]
    fn antisymmetric_dihedral_sets_live_in_a() {
        // in a dihedral group every xa is an involution, so an antisymmetric
        // set has empty xA part
        for spec in ["dihedral(8)", "dihedral(12)"] {
            let grp = g(spec);
            for mask in 0..(1u64 << grp.mask_bits()) {
                let cs = split_connection_set(&grp, mask).unwrap();
                if cs.s1.is_empty() && cs.s2.is_empty() {
                    assert!(cs.t2.is_empty(), "{spec} mask {mask}");
                }
            }
        }
    }

    #[test]
    fn render_set_expressions() {
        let d8 = g("dihedral(8)");
        let names: Vec<String> = d8.elements().iter().map(|e| d8.render(e)).collect();
        assert_eq!(names, ["1", "a", "a^2", "a^3", "x", "x*a", "x*a^2", "x*a^3"]);
        let multi = g("dicyclic(2x4; 0,2)");
        let el = ExtElement { flag: 1, a: multi.abelian().element(&[1, 3]) };
        assert_eq!(multi.render(&el), "x*(1,3)");
    }

    #[test]
    fn set_expression_roundtrips_through_render() {
        for spec in ["dihedral(8)", "dicyclic(2x4; 0,2)", "semidihedral(8)"] {
            let grp = g(spec);
            for bit in 0..grp.mask_bits() {
                let el = grp.element_at_bit(bit);
                let parsed = parse_set_expression(&grp, &grp.render(&el)).unwrap();
                assert_eq!(parsed, 1 << bit, "{spec} bit {bit}");
            }
            // The whole group, comma-joined, is the full mask.
            let joined: Vec<String> = (0..grp.mask_bits())
                .map(|bit| grp.render(&grp.element_at_bit(bit)))
                .collect();
            let parsed = parse_set_expression(&grp, &joined.join(", ")).unwrap();
            assert_eq!(parsed, (1 << grp.mask_bits()) - 1);
        }
    }

    #[test]
    fn set_expression_forms() {
        let d8 = g("dihedral(8)");
        let mask = parse_set_expression(&d8, " a , x*a^2 ,a^3 ").unwrap();
        let set = split_connection_set(&d8, mask).unwrap();
        assert_eq!(set.s1.len(), 2); // {a, a³} is symmetric
        assert_eq!(set.s2.len(), 1);
        assert_eq!(parse_set_expression(&d8, "").unwrap(), 0);
        assert_eq!(parse_set_expression(&d8, "  ").unwrap(), 0);
        // Negative exponents canonicalize: a^-1 = a^3 over Z/4.
        assert_eq!(
            parse_set_expression(&d8, "a^-1").unwrap(),
            parse_set_expression(&d8, "a^3").unwrap()
        );

        let multi = g("dicyclic(2x4; 0,2)");
        let mask = parse_set_expression(&multi, "(1,3), x*(0,2), x").unwrap();
        assert_eq!(mask.count_ones(), 3);
    }

    #[test]
    fn set_expression_diagnostics() {
        let d8 = g("dihedral(8)");
        let multi = g("dicyclic(2x4; 0,2)");
        let cases: Vec<(&ExtGroup, &str, &str)> = vec![
            (&d8, "1", "identity"),
            (&d8, "a^4", "identity"),
            (&d8, "b", "expected an element"),
            (&d8, "ab", "unknown element 'ab'"),
            (&d8, "a^", "expected an integer"),
            (&d8, "a,", "expected an element"),
            (&d8, "a)b", "trailing input"),
            (&multi, "a", "coordinate tuple"),
            (&multi, "(1)", "expected 2 coordinates"),
        ];
        for (grp, text, needle) in cases {
            match parse_set_expression(grp, text) {
                Err(GroupError::Parse { reason, .. }) => {
                    assert!(reason.contains(needle), "{text}: {reason}");
                }
                other => panic!("{text}: expected parse error, got {other:?}"),
            }
        }
        // x*1 is x itself: rendered as plain x, but the identity A-part is
        // accepted in x-position since x ≠ 1 in G.
        assert_eq!(
            parse_set_expression(&d8, "x*a^0").unwrap(),
            parse_set_expression(&d8, "x").unwrap()
        );
    }
}
