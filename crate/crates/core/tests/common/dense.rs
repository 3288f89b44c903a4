//! Full-tensor reference simulator. A state is a flat vector over
//! `bin x marker` with the marker factor spanned by the orthonormal
//! Fock/wall kets below; `Plus` and `Minus` are superpositions, not extra
//! basis vectors.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use eraser::hilbert::{Cavity, Wall};
use eraser::{BranchState, GridSpec, MarkerLabel};
use num_complex::Complex64;

pub const CAVITIES: usize = 5; // None, C1, C2, Vac, T
pub const DIM: usize = CAVITIES * 2;

pub type Ket = [Complex64; DIM];
pub type Matrix = [[Complex64; DIM]; DIM];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn slot(cavity: usize, wall: Wall) -> usize {
    cavity * 2 + matches!(wall, Wall::E) as usize
}

pub const NONE: usize = 0;
pub const C1: usize = 1;
pub const C2: usize = 2;
pub const VAC: usize = 3;
pub const T: usize = 4;

pub fn basis(cavity: usize, wall: Wall) -> Ket {
    let mut k = [ZERO; DIM];
    k[slot(cavity, wall)] = ONE;
    k
}

fn add(a: &Ket, b: &Ket, sb: f64) -> Ket {
    std::array::from_fn(|i| a[i] + b[i] * sb)
}

pub fn plus(wall: Wall) -> Ket {
    add(&basis(C1, wall), &basis(C2, wall), 1.0).map(|z| z * FRAC_1_SQRT_2)
}

pub fn minus(wall: Wall) -> Ket {
    add(&basis(C1, wall), &basis(C2, wall), -1.0).map(|z| z * FRAC_1_SQRT_2)
}

/// Physical ket of a crate label.
pub fn ket_of(label: MarkerLabel) -> Ket {
    let w = label.wall;
    match label.cavity {
        Cavity::None => basis(NONE, w),
        Cavity::C1 => basis(C1, w),
        Cavity::C2 => basis(C2, w),
        Cavity::Vac => basis(VAC, w),
        Cavity::T => basis(T, w),
        Cavity::Plus => plus(w),
        Cavity::Minus => minus(w),
    }
}

pub fn identity() -> Matrix {
    let mut m = [[ZERO; DIM]; DIM];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

/// `|a><b|`
pub fn outer(a: &Ket, b: &Ket) -> Matrix {
    let mut m = [[ZERO; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            m[i][j] = a[i] * b[j].conj();
        }
    }
    m
}

pub fn mat_add(a: &Matrix, b: &Matrix, sb: f64) -> Matrix {
    let mut m = *a;
    for i in 0..DIM {
        for j in 0..DIM {
            m[i][j] += b[i][j] * sb;
        }
    }
    m
}

/// Shutter opening: swaps `|+,G>` with `|Vac,E>`, leaves everything else.
pub fn shutter_matrix() -> Matrix {
    let p = plus(Wall::G);
    let v = basis(VAC, Wall::E);
    let mut m = identity();
    m = mat_add(&m, &outer(&p, &p), -1.0);
    m = mat_add(&m, &outer(&v, &v), -1.0);
    m = mat_add(&m, &outer(&v, &p), 1.0);
    mat_add(&m, &outer(&p, &v), 1.0)
}

/// Plate removal: `|C1,w>, |C2,w> -> |T,w>` for both walls.
pub fn merge_matrix() -> Matrix {
    let mut m = identity();
    for w in [Wall::G, Wall::E] {
        let t = basis(T, w);
        for c in [C1, C2] {
            let k = basis(c, w);
            m = mat_add(&m, &outer(&k, &k), -1.0);
            m = mat_add(&m, &outer(&t, &k), 1.0);
        }
    }
    m
}

/// Embeds a 2x2 block acting on `(|C1,G>, |C2,G>)` into the marker space.
pub fn path_block(u: [[Complex64; 2]; 2]) -> Matrix {
    let mut m = identity();
    let idx = [slot(C1, Wall::G), slot(C2, Wall::G)];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            m[i][j] = u[a][b];
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct DenseState {
    pub x: Vec<f64>,
    pub dx: f64,
    /// `v[bin * DIM + marker]`
    pub v: Vec<Complex64>,
}

impl DenseState {
    pub fn n_bins(&self) -> usize {
        self.x.len()
    }

    pub fn at(&self, bin: usize) -> Ket {
        std::array::from_fn(|k| self.v[bin * DIM + k])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.v.iter().zip(&other.v).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.dx
    }

    pub fn normalized(&self) -> DenseState {
        let n = self.norm_sqr().sqrt();
        DenseState { x: self.x.clone(), dx: self.dx, v: self.v.iter().map(|z| z / n).collect() }
    }

    pub fn apply(&self, m: &Matrix) -> DenseState {
        let mut v = vec![ZERO; self.v.len()];
        for bin in 0..self.n_bins() {
            for i in 0..DIM {
                v[bin * DIM + i] = (0..DIM).map(|j| m[i][j] * self.v[bin * DIM + j]).sum();
            }
        }
        DenseState { x: self.x.clone(), dx: self.dx, v }
    }

    pub fn pattern(&self) -> Vec<f64> {
        (0..self.n_bins())
            .map(|bin| self.v[bin * DIM..(bin + 1) * DIM].iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// `p(bin, +), p(bin, -)` with `projectors` listing orthonormal kets
    /// spanning each eigenspace. Position and marker projectors commute, so
    /// this is the joint table for either ordering.
    pub fn joint(&self, projectors: &[Vec<Ket>; 2]) -> Vec<[f64; 2]> {
        let total = self.norm_sqr();
        (0..self.n_bins())
            .map(|bin| {
                let psi = self.at(bin);
                std::array::from_fn(|o| {
                    projectors[o]
                        .iter()
                        .map(|e| e.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr())
                        .sum::<f64>()
                        * self.dx
                        / total
                })
            })
            .collect()
    }

    /// Position collapse: keep only `bin`, renormalized.
    pub fn collapsed(&self, bin: usize) -> DenseState {
        let mut v = vec![ZERO; self.v.len()];
        v[bin * DIM..(bin + 1) * DIM].copy_from_slice(&self.v[bin * DIM..(bin + 1) * DIM]);
        DenseState { x: self.x.clone(), dx: self.dx, v }.normalized()
    }
}

/// Eigenspaces of the path observable: `+1` on `C1`, `-1` on `C2`.
pub fn sigma_parallel_projectors() -> [Vec<Ket>; 2] {
    [
        vec![basis(C1, Wall::G), basis(C1, Wall::E)],
        vec![basis(C2, Wall::G), basis(C2, Wall::E)],
    ]
}

/// Eigenspaces of the symmetric observable: `+1` on `|+,G>` and on the
/// excited wall with vacuum cavities, `-1` on `|-,G>`.
pub fn sigma_perp_projectors() -> [Vec<Ket>; 2] {
    [vec![plus(Wall::G), basis(VAC, Wall::E)], vec![minus(Wall::G)]]
}

pub struct Optics {
    pub lambda: f64,
    pub d: f64,
    pub a: f64,
    pub l: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_bins: usize,
}

impl Optics {
    pub fn default_with_bins(n_bins: usize) -> Self {
        Optics { lambda: 1.0, d: 10.0, a: 2.0, l: 1000.0, x_min: -500.0, x_max: 500.0, n_bins }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_bins as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_bins).map(|i| self.x_min + (i as f64 + 0.5) * dx).collect()
    }

    /// Far-field amplitude of the slit at transverse offset `offset`,
    /// normalized on the grid.
    pub fn slit(&self, offset: f64) -> Vec<Complex64> {
        let s = self.lambda * self.l;
        let raw: Vec<Complex64> = self
            .centers()
            .iter()
            .map(|&x| {
                let t = PI * self.a * x / s;
                let env = if t == 0.0 { 1.0 } else { t.sin() / t };
                Complex64::from_polar(env, 2.0 * PI * x * offset / s)
            })
            .collect();
        let n = (raw.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx()).sqrt();
        raw.into_iter().map(|z| z / n).collect()
    }

    pub fn psi1(&self) -> Vec<Complex64> {
        self.slit(self.d / 2.0)
    }

    pub fn psi2(&self) -> Vec<Complex64> {
        self.slit(-self.d / 2.0)
    }

    pub fn tensor(&self, parts: &[(&[Complex64], Ket)]) -> DenseState {
        let n = self.n_bins;
        let mut v = vec![ZERO; n * DIM];
        for (amp, ket) in parts {
            for bin in 0..n {
                for k in 0..DIM {
                    v[bin * DIM + k] += amp[bin] * ket[k];
                }
            }
        }
        DenseState { x: self.centers(), dx: self.dx(), v }
    }

    pub fn prepare_off(&self) -> DenseState {
        let (p1, p2) = (self.psi1(), self.psi2());
        let k = basis(NONE, Wall::G);
        self.tensor(&[(&p1, k), (&p2, k)]).normalized()
    }

    pub fn prepare_on(&self) -> DenseState {
        let (p1, p2) = (self.psi1(), self.psi2());
        self.tensor(&[(&p1, basis(C1, Wall::G)), (&p2, basis(C2, Wall::G))]).normalized()
    }
}

/// Converts a crate state to the dense representation.
pub fn from_branch_state(s: &BranchState) -> DenseState {
    let g: &GridSpec = s.grid();
    let n = g.n_bins();
    let mut v = vec![ZERO; n * DIM];
    for (label, amp) in s.branches() {
        let ket = ket_of(*label);
        for (bin, z) in amp.values().iter().enumerate() {
            for k in 0..DIM {
                v[bin * DIM + k] += z * ket[k];
            }
        }
    }
    DenseState { x: g.centers().collect(), dx: g.dx(), v }
}

pub fn max_abs_diff(a: &DenseState, b: &DenseState) -> f64 {
    a.v.iter().zip(&b.v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Dense `n x n` complex matrices for the position-marker operator algebra.
pub type Dense = Vec<Vec<Complex64>>;

pub fn kron_diag_pauli(x: &[f64], sigma: [[Complex64; 2]; 2]) -> Dense {
    let n = x.len() * 2;
    let mut m = vec![vec![ZERO; n]; n];
    for (i, &xi) in x.iter().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                m[2 * i + a][2 * i + b] = sigma[a][b] * xi;
            }
        }
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut m = vec![vec![ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == ZERO {
                continue;
            }
            for j in 0..n {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

pub fn commutator_frobenius(a: &Dense, b: &Dense) -> f64 {
    let (ab, ba) = (matmul(a, b), matmul(b, a));
    ab.iter()
        .zip(&ba)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

/// Random 2x2 unitary from Gram-Schmidt on two complex Gaussian-ish columns.
pub fn random_unitary2(draw: &mut impl FnMut() -> f64) -> [[Complex64; 2]; 2] {
    let mut col = || [Complex64::new(draw() - 0.5, draw() - 0.5), Complex64::new(draw() - 0.5, draw() - 0.5)];
    let mut u = col();
    let n = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
    u = [u[0] / n, u[1] / n];
    let mut w = col();
    let proj = u[0].conj() * w[0] + u[1].conj() * w[1];
    w = [w[0] - proj * u[0], w[1] - proj * u[1]];
    let n = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    w = [w[0] / n, w[1] / n];
    // columns u, w
    [[u[0], w[0]], [u[1], w[1]]]
}
