//! Dense complex matrix helpers shared by the aggregation engines.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn cre(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Entries with real and imaginary parts uniform in [-1, 1).
pub fn random_cmatrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> CMatrix {
    let m = random_cmatrix(n, n, rng);
    CMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] })
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `tr(a * b)` in O(n^2) without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = czero();
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `|a - b| / max(|b|, floor)`; the floor keeps exact zeros comparable.
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Relative error with an absolute fallback when the reference is tiny.
pub fn rel_err_floor(a: Complex64, b: Complex64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}

/// Max entrywise difference relative to the largest reference entry.
pub fn matrix_rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}


/// Complex matrix stored as separate real and imaginary parts so products
/// run on the real GEMM kernel (three real products per complex product).
#[derive(Debug, Clone)]
pub struct SplitMatrix {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl SplitMatrix {
    pub fn from_complex(m: &CMatrix) -> Self {
        Self {
            re: m.map(|v| v.re),
            im: m.map(|v| v.im),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            re: DMatrix::identity(n, n),
            im: DMatrix::zeros(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            re: DMatrix::zeros(n, n),
            im: DMatrix::zeros(n, n),
        }
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(self.re.nrows(), self.re.ncols(), |i, j| {
            Complex64::new(self.re[(i, j)], self.im[(i, j)])
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let ac = &self.re * &other.re;
        let bd = &self.im * &other.im;
        let cross = (&self.re + &self.im) * (&other.re + &other.im);
        Self {
            im: cross - &ac - &bd,
            re: ac - bd,
        }
    }

    /// `self += k * other`
    pub fn add_scaled(&mut self, k: Complex64, other: &Self) {
        self.re += &other.re * k.re - &other.im * k.im;
        self.im += &other.re * k.im + &other.im * k.re;
    }

    pub fn trace(&self) -> Complex64 {
        Complex64::new(self.re.trace(), self.im.trace())
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.re.nrows())
            .map(|i| Complex64::new(self.re[(i, i)], self.im[(i, i)]))
            .collect()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Complex64 {
        // sum_ij a_ij b_ji
        let (a, b) = (self, other);
        let re = a.re.component_mul(&b.re.transpose()).sum() - a.im.component_mul(&b.im.transpose()).sum();
        let im = a.re.component_mul(&b.im.transpose()).sum() + a.im.component_mul(&b.re.transpose()).sum();
        Complex64::new(re, im)
    }
}
