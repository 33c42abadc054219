//! Spectra of mixed Cayley graphs, three ways.
//!
//! The Hermitian adjacency matrix carries 1 on digons, ±i on one-way arcs.
//! Conjugating by the regular-representation decomposition turns it into the
//! per-irrep blocks
//!
//! ```text
//!   M_ρ = Σ_{s ∈ S∖T} ρ(s) + 𝐢 Σ_{s ∈ T} ρ(s) − 𝐢 Σ_{s ∈ T} ρ(s⁻¹)
//! ```
//!
//! whose eigenvalues, taken with multiplicity dim(ρ), are exactly the graph
//! spectrum.  `exact_spectrum` decides integrality from the blocks over
//! Z[ζ_m]; `numeric_spectrum` is the independent floating-point oracle (a
//! Jacobi diagonalizer on the doubled real symmetric form).

use crate::cyclo::{is_rational_integer, perfect_square_integer, CycloInt};
use crate::ext::{ext_inv, ConnectionSet, ExtElement, ExtGroup};
use crate::reps::{Rep, RepValue};
use serde::Serialize;

/// Eigenvalues within this distance of an integer count as integral on the
/// numeric route.
pub const NUMERIC_INTEGRALITY_TOL: f64 = 1e-6;

/// Convergence threshold for the Jacobi sweeps: off-diagonal Frobenius norm.
const JACOBI_OFF_NORM: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum SpectrumError {
    #[error("matrix is not Hermitian at ({0}, {1})")]
    NotHermitian(usize, usize),
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {norm:.3e})")]
    NoConvergence { sweeps: usize, norm: f64 },
}

/// A Gaussian integer a + bi; adjacency entries only ever use 0, ±1, ±i.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };

    pub fn conj(self) -> GaussInt {
        GaussInt { re: self.re, im: -self.im }
    }
}

/// Dense Hermitian matrix over Gaussian integers, row-major.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    pub n: usize,
    entries: Vec<GaussInt>,
}

impl HermitianMatrix {
    pub fn zero(n: usize) -> Self {
        HermitianMatrix { n, entries: vec![GaussInt::ZERO; n * n] }
    }

    pub fn entry(&self, row: usize, col: usize) -> GaussInt {
        self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: GaussInt) {
        self.entries[row * self.n + col] = v;
    }

    fn hermitian_violation(&self) -> Option<(usize, usize)> {
        for k in 0..self.n {
            for j in k..self.n {
                if self.entry(k, j) != self.entry(j, k).conj() {
                    return Some((k, j));
                }
            }
        }
        None
    }
}

/// The Hermitian adjacency matrix of Cay(G, S) in canonical vertex order:
/// entry(k, j) is 1 when both arcs v_k↔v_j exist, i when only v_k→v_j does,
/// −i when only v_j→v_k does.  Arc v_k→v_j exists iff v_k⁻¹·v_j ∈ S.
pub fn adjacency(g: &ExtGroup, set: &ConnectionSet) -> HermitianMatrix {
    let vertices = g.elements();
    let n = vertices.len();
    let mut out = HermitianMatrix::zero(n);
    for k in 0..n {
        let vk_inv = ext_inv(g, &vertices[k]);
        for (j, vj) in vertices.iter().enumerate() {
            let u = crate::ext::ext_mul(g, &vk_inv, vj);
            let forward = set.contains(g, &u);
            let backward = set.contains(g, &ext_inv(g, &u));
            let v = match (forward, backward) {
                (true, true) => GaussInt { re: 1, im: 0 },
                (true, false) => GaussInt { re: 0, im: 1 },
                (false, true) => GaussInt { re: 0, im: -1 },
                (false, false) => GaussInt::ZERO,
            };
            out.set(k, j, v);
        }
    }
    debug_assert!(out.hermitian_violation().is_none());
    out
}

/// One M_ρ per rep, over Z[ζ_m].
pub fn babai_blocks(g: &ExtGroup, set: &ConnectionSet, reps: &[Rep]) -> Vec<RepValue> {
    let m = g.working_order();
    let i = CycloInt::imaginary_unit(m);
    let sym: Vec<ExtElement> = set
        .s1
        .iter()
        .map(|a| ExtElement { flag: 0, a: a.clone() })
        .chain(set.s2.iter().map(|a| ExtElement { flag: 1, a: a.clone() }))
        .collect();
    let anti: Vec<ExtElement> = set
        .t1
        .iter()
        .map(|a| ExtElement { flag: 0, a: a.clone() })
        .chain(set.t2.iter().map(|a| ExtElement { flag: 1, a: a.clone() }))
        .collect();

    reps.iter()
        .map(|rep| {
            let mut block = RepValue::zero_like(rep.dim(), m);
            for s in &sym {
                block = block.add(&rep.eval(g, s));
            }
            for s in &anti {
                block = block.add(&rep.eval(g, s).scale(&i));
                block = block.add(&rep.eval(g, &ext_inv(g, s)).scale(&(-&i)));
            }
            block
        })
        .collect()
}

/// One eigenvalue of the spectrum multiset: exact when its block certifies
/// an integer, a floating-point approximation otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Eig {
    Exact(i64),
    Approx(f64),
}

impl Eig {
    pub fn value(self) -> f64 {
        match self {
            Eig::Exact(n) => n as f64,
            Eig::Approx(x) => x,
        }
    }

    pub fn as_exact(self) -> Option<i64> {
        match self {
            Eig::Exact(n) => Some(n),
            Eig::Approx(_) => None,
        }
    }
}

/// Exact per-block eigenvalue data.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "dim")]
pub enum RepBlock {
    #[serde(rename = "1")]
    One {
        label: usize,
        value: CycloInt,
        integer: Option<i64>,
    },
    #[serde(rename = "2")]
    Two {
        label: usize,
        delta: CycloInt,
        epsilon: CycloInt,
        delta_integer: Option<i64>,
        discriminant: CycloInt,
        square_root: Option<i64>,
        integral: bool,
    },
}

impl RepBlock {
    pub fn is_integral(&self) -> bool {
        match self {
            RepBlock::One { integer, .. } => integer.is_some(),
            RepBlock::Two { integral, .. } => *integral,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub integral: bool,
    pub eigenvalues: Vec<Eig>,
    pub per_rep: Vec<RepBlock>,
}

/// Decides integrality exactly and assembles the |G| eigenvalues; each block
/// contributes with the regular-representation multiplicity dim(ρ).
pub fn exact_spectrum(g: &ExtGroup, set: &ConnectionSet, reps: &[Rep]) -> SpectrumReport {
    let blocks = babai_blocks(g, set, reps);
    let mut eigenvalues: Vec<Eig> = Vec::with_capacity(g.order() as usize);
    let mut per_rep = Vec::with_capacity(reps.len());

    for (rep, block) in reps.iter().zip(&blocks) {
        match block {
            RepValue::Scalar(v) => {
                let integer = is_rational_integer(v);
                eigenvalues.push(match integer {
                    Some(n) => Eig::Exact(n),
                    None => Eig::Approx(v.approx().0),
                });
                per_rep.push(RepBlock::One { label: rep.label, value: v.clone(), integer });
            }
            RepValue::Matrix(mat) => {
                let delta = mat.trace();
                let epsilon = mat.det();
                let four = CycloInt::from_int(delta.order(), 4);
                let disc = &(&delta * &delta) - &(&four * &epsilon);
                let delta_integer = is_rational_integer(&delta);
                let square_root = perfect_square_integer(&disc);
                let integral = delta_integer.is_some() && square_root.is_some();
                let roots = match (delta_integer, square_root) {
                    (Some(d), Some(z)) if integral => {
                        // δ and √(δ²−4ε) always share a parity
                        assert_eq!((d - z).rem_euclid(2), 0, "parity violation");
                        [Eig::Exact((d - z) / 2), Eig::Exact((d + z) / 2)]
                    }
                    _ => {
                        let d = delta.approx().0;
                        let sq = disc.approx().0.max(0.0).sqrt();
                        [Eig::Approx((d - sq) / 2.0), Eig::Approx((d + sq) / 2.0)]
                    }
                };
                for r in roots {
                    eigenvalues.push(r);
                    eigenvalues.push(r);
                }
                per_rep.push(RepBlock::Two {
                    label: rep.label,
                    delta,
                    epsilon,
                    delta_integer,
                    discriminant: disc,
                    square_root,
                    integral,
                });
            }
        }
    }

    assert_eq!(eigenvalues.len() as u64, g.order(), "multiplicity bookkeeping");
    eigenvalues.sort_by(|a, b| a.value().total_cmp(&b.value()));
    SpectrumReport {
        integral: per_rep.iter().all(RepBlock::is_integral),
        eigenvalues,
        per_rep,
    }
}

/// Eigenvalues of a complex Hermitian matrix given as (re, im) parts, via
/// the real symmetric embedding [[X, −Y], [Y, X]] whose spectrum is the
/// original one doubled.
pub(crate) fn hermitian_eigenvalues(
    re: &[Vec<f64>],
    im: &[Vec<f64>],
) -> Result<Vec<f64>, SpectrumError> {
    let n = re.len();
    for k in 0..n {
        for j in 0..n {
            let sym_ok = (re[k][j] - re[j][k]).abs() < 1e-12;
            let skew_ok = (im[k][j] + im[j][k]).abs() < 1e-12;
            if !sym_ok || !skew_ok {
                return Err(SpectrumError::NotHermitian(k, j));
            }
        }
    }
    let big = 2 * n;
    let mut a = vec![0.0f64; big * big];
    for k in 0..n {
        for j in 0..n {
            a[k * big + j] = re[k][j];
            a[(n + k) * big + (n + j)] = re[k][j];
            a[k * big + (n + j)] = -im[k][j];
            a[(n + k) * big + j] = im[k][j];
        }
    }
    let mut doubled = jacobi_eigenvalues(&mut a, big)?;
    doubled.sort_by(f64::total_cmp);
    // exact double multiplicity: adjacent pairs after sorting
    Ok((0..n).map(|k| (doubled[2 * k] + doubled[2 * k + 1]) / 2.0).collect())
}

/// Cyclic Jacobi sweeps on a dense symmetric matrix (eigenvalues only).
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>, SpectrumError> {
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        let norm = (2.0 * off).sqrt();
        if norm < JACOBI_OFF_NORM {
            return Ok((0..n).map(|k| a[k * n + k]).collect());
        }
        if sweep + 1 == JACOBI_MAX_SWEEPS {
            return Err(SpectrumError::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, norm });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    unreachable!("sweep loop returns or errors")
}

/// Sorted eigenvalues of a Gaussian-integer Hermitian matrix.
pub fn numeric_spectrum(mat: &HermitianMatrix) -> Result<Vec<f64>, SpectrumError> {
    if let Some((k, j)) = mat.hermitian_violation() {
        return Err(SpectrumError::NotHermitian(k, j));
    }
    let n = mat.n;
    let re: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|j| mat.entry(k, j).re as f64).collect())
        .collect();
    let im: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|j| mat.entry(k, j).im as f64).collect())
        .collect();
    let mut eigs = hermitian_eigenvalues(&re, &im)?;
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// True iff every eigenvalue is within 1e−6 of an integer.
pub fn is_integral_numeric(eigs: &[f64]) -> bool {
    eigs.iter().all(|&x| (x - x.round()).abs() <= NUMERIC_INTEGRALITY_TOL)
}
