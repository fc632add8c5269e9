//! Small dense complex matrices: 2x2 eigenvalues and the matrix exponential used by the integrators.

use num_complex::Complex64;

/// Complex 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Both eigenvalues, from `tr/2 +- sqrt(((a - d)/2)^2 + b c)`.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let [[a, b], [c, d]] = self.0;
        let mean = (a + d) * 0.5;
        let half = (a - d) * 0.5;
        let root = (half * half + b * c).sqrt();
        [mean - root, mean + root]
    }

    pub fn mul_vec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let m = self.0;
        Self::new(m[0][0] * k, m[0][1] * k, m[1][0] * k, m[1][1] * k)
    }

    pub fn to_dense(self) -> CMat {
        let mut m = CMat::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self.0[i][j];
            }
        }
        m
    }
}

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scaled(&self, k: f64) -> CMat {
        CMat {
            n: self.n,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring with a Taylor series.
    pub fn expm(&self) -> CMat {
        let norm = self.norm1();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let a = self.scaled(0.5f64.powi(squarings));
        let mut term = CMat::identity(self.n);
        let mut sum = CMat::identity(self.n);
        for k in 1..=30 {
            term = term.mul(&a).scaled(1.0 / k as f64);
            for (s, t) in sum.data.iter_mut().zip(&term.data) {
                *s += t;
            }
            if term.norm1() < 1e-18 * sum.norm1() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Top-left `rows x cols` block starting at `(r0, c0)` as a 2x2 matrix.
    pub fn block2(&self, r0: usize, c0: usize) -> Mat2 {
        Mat2::new(
            self[(r0, c0)],
            self[(r0, c0 + 1)],
            self[(r0 + 1, c0)],
            self[(r0 + 1, c0 + 1)],
        )
    }
}

/// Propagators of `x' = A x + u` over one step `dt` with `u` held constant:
/// `phi = e^{A dt}`, `gamma = int_0^dt e^{A s} ds`, `lambda = int_0^dt int_0^s e^{A v} dv ds`.
pub struct Propagators {
    pub phi: Mat2,
    pub gamma: Mat2,
    pub lambda: Mat2,
}

pub fn propagators(a: &Mat2, dt: f64) -> Propagators {
    // Augmented block matrix [[A, I, 0], [0, 0, I], [0, 0, 0]] dt.
    let mut m = CMat::zeros(6);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = a.0[i][j] * dt;
        }
        m[(i, i + 2)] = Complex64::new(dt, 0.0);
        m[(i + 2, i + 4)] = Complex64::new(dt, 0.0);
    }
    let e = m.expm();
    Propagators {
        phi: e.block2(0, 0),
        gamma: e.block2(0, 2),
        lambda: e.block2(0, 4),
    }
}
