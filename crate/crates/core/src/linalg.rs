//! Householder QR on column-scaled designs.
//!
//! Columns are scaled to unit Euclidean norm before factorisation so the
//! rank test (`|R_jj| < tol * max |R_ii|`) does not depend on units.

use crate::scalar::Scalar;

/// Relative tolerance on the diagonal of `R` below which a column counts as
/// linearly dependent on the ones before it.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Qr<T> {
    rows: usize,
    cols: usize,
    /// Householder vectors (column-major, `v[j]` has length `rows - j`).
    vs: Vec<Vec<T>>,
    betas: Vec<T>,
    /// Upper-triangular factor, `r[i][j]` with `j >= i`, row-major.
    r: Vec<Vec<T>>,
    scales: Vec<T>,
}

/// Index of the first column found to be dependent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDeficient(pub usize);

impl<T: Scalar> Qr<T> {
    /// Factorises an `rows x cols` matrix given as columns.
    pub fn new(columns: &[Vec<T>]) -> Result<Self, RankDeficient> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut a: Vec<Vec<T>> = Vec::with_capacity(cols);
        let mut scales = Vec::with_capacity(cols);
        for (j, c) in columns.iter().enumerate() {
            let norm = c.iter().map(|&v| v * v).sum::<T>().sqrt();
            if norm == T::zero() || !norm.is_finite() {
                return Err(RankDeficient(j));
            }
            scales.push(norm);
            a.push(c.iter().map(|&v| v / norm).collect());
        }
        if cols > rows {
            return Err(RankDeficient(rows));
        }

        let mut vs = Vec::with_capacity(cols);
        let mut betas = Vec::with_capacity(cols);
        for j in 0..cols {
            let x = &a[j][j..];
            let alpha = x.iter().map(|&v| v * v).sum::<T>().sqrt();
            let mut v: Vec<T> = x.to_vec();
            let sign = if x[0] >= T::zero() { T::one() } else { -T::one() };
            v[0] = v[0] + sign * alpha;
            let vnorm2: T = v.iter().map(|&e| e * e).sum();
            let beta = if vnorm2 > T::zero() {
                T::lit(2.0) / vnorm2
            } else {
                T::zero()
            };
            for col in a.iter_mut().skip(j) {
                let tail = &mut col[j..];
                let dot: T = v.iter().zip(tail.iter()).map(|(&p, &q)| p * q).sum();
                let f = beta * dot;
                for (t, &p) in tail.iter_mut().zip(v.iter()) {
                    *t = *t - f * p;
                }
            }
            vs.push(v);
            betas.push(beta);
        }

        let r: Vec<Vec<T>> = (0..cols)
            .map(|i| (0..cols).map(|j| if j >= i { a[j][i] } else { T::zero() }).collect())
            .collect();
        let max_diag = (0..cols)
            .map(|i| r[i][i].abs())
            .fold(T::zero(), T::max);
        let tol = T::lit(RANK_TOL) * max_diag;
        if let Some(j) = (0..cols).find(|&i| r[i][i].abs() <= tol) {
            return Err(RankDeficient(j));
        }
        Ok(Self {
            rows,
            cols,
            vs,
            betas,
            r,
            scales,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `Q' y`.
    pub fn qt_mul(&self, y: &[T]) -> Vec<T> {
        let mut out = y.to_vec();
        for (j, (v, &beta)) in self.vs.iter().zip(&self.betas).enumerate() {
            let tail = &mut out[j..];
            let dot: T = v.iter().zip(tail.iter()).map(|(&p, &q)| p * q).sum();
            let f = beta * dot;
            for (t, &p) in tail.iter_mut().zip(v.iter()) {
                *t = *t - f * p;
            }
        }
        out
    }

    /// Least-squares coefficients for `y` on the original (unscaled) columns.
    pub fn solve(&self, y: &[T]) -> Vec<T> {
        let qty = self.qt_mul(y);
        let z = self.back_substitute(&qty[..self.cols]);
        z.iter().zip(&self.scales).map(|(&b, &s)| b / s).collect()
    }

    fn back_substitute(&self, rhs: &[T]) -> Vec<T> {
        let n = self.cols;
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for j in i + 1..n {
                acc = acc - self.r[i][j] * x[j];
            }
            x[i] = acc / self.r[i][i];
        }
        x
    }

    /// Solves `R' z = b` for `z`.
    fn forward_substitute_rt(&self, b: &[T]) -> Vec<T> {
        let n = self.cols;
        let mut z = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = b[i];
            for k in 0..i {
                acc = acc - self.r[k][i] * z[k];
            }
            z[i] = acc / self.r[i][i];
        }
        z
    }

    /// `x' (X'X)^{-1} x` for a row `x` in original units.
    pub fn leverage(&self, x: &[T]) -> T {
        let scaled: Vec<T> = x.iter().zip(&self.scales).map(|(&v, &s)| v / s).collect();
        self.forward_substitute_rt(&scaled)
            .iter()
            .map(|&v| v * v)
            .sum()
    }

    /// `(X'X)^{-1}` in original units, row-major.
    pub fn xtx_inverse(&self) -> Vec<Vec<T>> {
        let n = self.cols;
        // columns of R^{-1}
        let mut rinv = vec![vec![T::zero(); n]; n];
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = self.back_substitute(&e);
            for i in 0..n {
                rinv[i][j] = col[i];
            }
        }
        let mut out = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut acc = T::zero();
                for k in i.max(j)..n {
                    acc = acc + rinv[i][k] * rinv[j][k];
                }
                let v = acc / (self.scales[i] * self.scales[j]);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }
}

/// `X b` for column-major `X`.
pub fn mat_vec<T: Scalar>(columns: &[Vec<T>], b: &[T]) -> Vec<T> {
    let rows = columns.first().map_or(0, Vec::len);
    let mut out = vec![T::zero(); rows];
    for (col, &coef) in columns.iter().zip(b) {
        for (o, &x) in out.iter_mut().zip(col) {
            *o = *o + x * coef;
        }
    }
    out
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// `g' M g` for a symmetric row-major `M`.
pub fn quad_form(m: &[Vec<f64>], g: &[f64]) -> f64 {
    g.iter()
        .enumerate()
        .map(|(i, gi)| gi * m[i].iter().zip(g).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn solves_exact_system() {
        let cols = vec![vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]];
        let qr = Qr::new(&cols).unwrap();
        let b = qr.solve(&[3.0, 5.0, 7.0]);
        assert_abs_diff_eq!(b[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn detects_dependent_column() {
        let cols = vec![
            vec![1.0, 1.0, 1.0, 1.0],
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 3.0, 4.0, 5.0],
        ];
        assert_eq!(Qr::new(&cols).unwrap_err(), RankDeficient(2));
        assert_eq!(Qr::new(&[vec![0.0, 0.0]]).unwrap_err(), RankDeficient(0));
    }

    #[test]
    fn inverse_matches_two_by_two() {
        let cols = vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]];
        // X'X = [[3,3],[3,5]], det 6
        let inv = Qr::new(&cols).unwrap().xtx_inverse();
        assert_abs_diff_eq!(inv[0][0], 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(inv[0][1], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(inv[1][1], 0.5, epsilon = 1e-12);
        let lev = Qr::new(&cols).unwrap().leverage(&[1.0, 2.0]);
        // [1,2] inv [1,2]' = 5/6 - 2 + 2
        assert_abs_diff_eq!(lev, 5.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let cols = vec![vec![1.0f32; 4], vec![1.0, 2.0, 3.0, 4.0]];
        let b = Qr::new(&cols).unwrap().solve(&[3.0, 5.0, 7.0, 9.0]);
        assert!((b[0] - 1.0).abs() < 1e-5 && (b[1] - 2.0).abs() < 1e-5);
    }
}
