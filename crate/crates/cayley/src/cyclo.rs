//! Exact arithmetic in rings of cyclotomic integers Z[ζ_m].
//!
//! Values are stored as coefficient vectors in Z[x]/(x^m − 1), so addition
//! and multiplication are plain cyclic convolutions and conjugation is the
//! index reversal t ↦ m − t.  The representation is redundant; equality and
//! integrality questions are decided by reducing modulo the m-th cyclotomic
//! polynomial Φ_m, whose root set is exactly the primitive m-th roots.
//!
//! Coefficients are `i64` with 128-bit intermediates and checked narrowing.
//! At the scales this crate works at (|G| ≤ 64, character sums over subsets)
//! coefficients stay below |G|², so an overflow indicates a caller bug and
//! panics rather than returning an error.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

fn euler_phi(mut m: usize) -> usize {
    let mut phi = 1;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            phi *= p - 1;
            m /= p;
            while m.is_multiple_of(p) {
                phi *= p;
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi *= m - 1;
    }
    phi
}

/// Φ_m as ascending coefficients (monic, degree φ(m)), computed by the
/// recursive exact division Φ_m = (x^m − 1) / Π_{d|m, d<m} Φ_d and memoized
/// process-wide.
pub fn cyclotomic_polynomial(m: usize) -> Arc<Vec<i64>> {
    assert!(m >= 1, "cyclotomic index must be positive");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return hit.clone();
    }

    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_polynomial(d));
        }
    }
    debug_assert_eq!(num.len(), euler_phi(m) + 1);

    let phi = Arc::new(num);
    cache.lock().unwrap().insert(m, phi.clone());
    phi
}

/// Quotient of `num / den` for monic `den`, panicking if division is inexact.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    assert_eq!(*den.last().unwrap(), 1, "divisor must be monic");
    let dd = den.len() - 1;
    let mut rem: Vec<i128> = num.iter().map(|&c| c as i128).collect();
    let nd = rem.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        if c == 0 {
            continue;
        }
        quot[k] = i64::try_from(c).expect("cyclotomic coefficient overflow");
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj as i128;
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "inexact polynomial division");
    quot
}

/// An element of Z[ζ_m], as Σ c_t ζ_m^t with 0 ≤ t < m.
#[derive(Clone)]
pub struct CycloInt {
    order: usize,
    coeffs: Vec<i64>,
}

/// ζ_order^power (power taken mod order, negatives allowed).
pub fn cyclo_from_root(order: usize, power: i64) -> CycloInt {
    assert!(order >= 1, "root order must be positive");
    let mut coeffs = vec![0i64; order];
    coeffs[power.rem_euclid(order as i64) as usize] = 1;
    CycloInt { order, coeffs }
}

pub fn cyclo_add(x: &CycloInt, y: &CycloInt) -> CycloInt {
    x + y
}

pub fn cyclo_mul(x: &CycloInt, y: &CycloInt) -> CycloInt {
    x * y
}

pub fn cyclo_neg(x: &CycloInt) -> CycloInt {
    -x
}

pub fn cyclo_conj(x: &CycloInt) -> CycloInt {
    x.conj()
}

/// Embeds Z[ζ_m] ↪ Z[ζ_{m′}] via ζ_m = ζ_{m′}^{m′/m}.  Panics unless m | m′.
pub fn cyclo_lift(x: &CycloInt, order: usize) -> CycloInt {
    x.lift(order)
}

/// The integer n with x = n, if there is one.
pub fn is_rational_integer(x: &CycloInt) -> Option<i64> {
    x.as_integer()
}

/// The nonnegative root, when x is a nonnegative perfect-square integer.
pub fn perfect_square_integer(x: &CycloInt) -> Option<i64> {
    let n = x.as_integer()?;
    if n < 0 {
        return None;
    }
    // Bisection keeps the test exact; the candidate is re-squared to confirm.
    let (mut lo, mut hi) = (0i64, 3_037_000_500i64.min(n + 1));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if (mid as i128) * (mid as i128) < n as i128 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    (lo as i128 * lo as i128 == n as i128).then_some(lo)
}

impl CycloInt {
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "root order must be positive");
        CycloInt { order, coeffs: vec![0; order] }
    }

    pub fn from_int(order: usize, n: i64) -> Self {
        let mut v = Self::zero(order);
        v.coeffs[0] = n;
        v
    }

    /// 𝐢 = ζ_m^{m/4}.  Panics unless 4 | m.
    pub fn imaginary_unit(order: usize) -> Self {
        assert!(order.is_multiple_of(4), "imaginary unit needs 4 | order");
        cyclo_from_root(order, (order / 4) as i64)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn conj(&self) -> Self {
        let m = self.order;
        let mut coeffs = vec![0i64; m];
        for (t, &c) in self.coeffs.iter().enumerate() {
            coeffs[(m - t) % m] = c;
        }
        CycloInt { order: m, coeffs }
    }

    pub fn lift(&self, order: usize) -> Self {
        assert!(
            order.is_multiple_of(self.order),
            "lift target {} is not a multiple of order {}",
            order,
            self.order
        );
        let k = order / self.order;
        let mut coeffs = vec![0i64; order];
        for (t, &c) in self.coeffs.iter().enumerate() {
            coeffs[t * k] = c;
        }
        CycloInt { order, coeffs }
    }

    /// Remainder mod Φ_m: canonical coordinates on the power basis
    /// 1, ζ, …, ζ^{φ(m)−1}.
    pub fn reduced(&self) -> Vec<i64> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut rem: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        for k in (deg..rem.len()).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            for (j, &pj) in phi.iter().enumerate() {
                rem[k - deg + j] -= c * pj as i128;
            }
        }
        rem.truncate(deg.max(1));
        rem.iter()
            .map(|&c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|&c| c == 0)
    }

    pub fn as_integer(&self) -> Option<i64> {
        let red = self.reduced();
        red[1..].iter().all(|&c| c == 0).then(|| red[0])
    }

    /// Floating-point image (re, im) under ζ_m ↦ e^{2πi/m}.
    pub fn approx(&self) -> (f64, f64) {
        let m = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let theta = std::f64::consts::TAU * t as f64 / m;
                re += c as f64 * theta.cos();
                im += c as f64 * theta.sin();
            }
        }
        (re, im)
    }
}

fn assert_same_order(x: &CycloInt, y: &CycloInt) {
    assert_eq!(
        x.order, y.order,
        "cyclotomic order mismatch ({} vs {}); lift to a common order first",
        x.order, y.order
    );
}

impl std::ops::Add for &CycloInt {
    type Output = CycloInt;
    fn add(self, rhs: &CycloInt) -> CycloInt {
        assert_same_order(self, rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| a.checked_add(b).expect("cyclotomic coefficient overflow"))
            .collect();
        CycloInt { order: self.order, coeffs }
    }
}

impl std::ops::Sub for &CycloInt {
    type Output = CycloInt;
    fn sub(self, rhs: &CycloInt) -> CycloInt {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &CycloInt {
    type Output = CycloInt;
    fn neg(self) -> CycloInt {
        CycloInt {
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl std::ops::Mul for &CycloInt {
    type Output = CycloInt;
    fn mul(self, rhs: &CycloInt) -> CycloInt {
        assert_same_order(self, rhs);
        let m = self.order;
        let mut acc = vec![0i128; m];
        for (s, &cs) in self.coeffs.iter().enumerate() {
            if cs == 0 {
                continue;
            }
            for (t, &ct) in rhs.coeffs.iter().enumerate() {
                if ct != 0 {
                    acc[(s + t) % m] += cs as i128 * ct as i128;
                }
            }
        }
        CycloInt {
            order: m,
            coeffs: acc
                .iter()
                .map(|&c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
                .collect(),
        }
    }
}

macro_rules! forward_owned_ops {
    ($($trait:ident :: $fn:ident),*) => {$(
        impl std::ops::$trait for CycloInt {
            type Output = CycloInt;
            fn $fn(self, rhs: CycloInt) -> CycloInt {
                std::ops::$trait::$fn(&self, &rhs)
            }
        }
    )*};
}
forward_owned_ops!(Add::add, Sub::sub, Mul::mul);

impl std::ops::Neg for CycloInt {
    type Output = CycloInt;
    fn neg(self) -> CycloInt {
        -&self
    }
}

impl PartialEq for CycloInt {
    /// Equality as complex numbers: both sides are lifted to the lcm of
    /// their orders and the difference is reduced mod Φ.
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return (self - other).is_zero();
        }
        let m = lcm(self.order as u64, other.order as u64) as usize;
        (&self.lift(m) - &other.lift(m)).is_zero()
    }
}

impl Eq for CycloInt {}

impl fmt::Display for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c < 0 {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            if t > 0 {
                write!(f, "·z^{t}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " (order {})", self.order)
    }
}

impl fmt::Debug for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for CycloInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
