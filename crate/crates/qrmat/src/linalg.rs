//! Dense complex matrices, Kronecker products and operators on tensor products.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

/// Kronecker product; basis vector (i, j) of A⊗B sits at i·dim(B) + j.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn diag(entries: &[C64]) -> CMat {
    CMat::from_diagonal(&DVector::from_column_slice(entries))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

/// Max modulus over the listed columns only.
pub fn max_abs_cols(m: &CMat, cols: &[usize]) -> f64 {
    cols.iter()
        .map(|&c| m.column(c).iter().fold(0.0f64, |acc, v| acc.max(v.norm())))
        .fold(0.0, f64::max)
}

/// Matrix power by repeated multiplication.
pub fn mpow(m: &CMat, n: usize) -> CMat {
    let mut out = CMat::identity(m.nrows(), m.ncols());
    for _ in 0..n {
        out = &out * m;
    }
    out
}

/// Whether m is c·I for some c, to tolerance; returns c.
pub fn scalar_value(m: &CMat, tol: f64) -> Option<C64> {
    let c = m[(0, 0)];
    let dev = m - CMat::identity(m.nrows(), m.ncols()) * c;
    (max_abs(&dev) <= tol * (1.0 + c.norm())).then_some(c)
}

/// Flip operator σ(v_i⊗w_j) = w_j⊗v_i from V1⊗V2 to V2⊗V1.
pub fn swap_matrix(d1: usize, d2: usize) -> CMat {
    let mut p = CMat::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d2 {
            p[(j * d1 + i, i * d2 + j)] = cone();
        }
    }
    p
}

/// Operator on V1⊗V2 with dims fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    pub dims: (usize, usize),
    pub matrix: CMat,
}

impl TensorOperator {
    pub fn new(dims: (usize, usize), matrix: CMat) -> Result<Self> {
        let n = dims.0 * dims.1;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}x{}, dims {:?} need {n}x{n}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        Ok(TensorOperator { dims, matrix })
    }

    pub fn identity(dims: (usize, usize)) -> Self {
        let n = dims.0 * dims.1;
        TensorOperator { dims, matrix: CMat::identity(n, n) }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dims.1 + j
    }

    /// Coefficient of v_{i'}⊗v_{j'} in the image of v_i⊗v_j.
    pub fn entry(&self, i: usize, j: usize, ip: usize, jp: usize) -> C64 {
        self.matrix[(self.index(ip, jp), self.index(i, j))]
    }

    pub fn compose(&self, other: &TensorOperator) -> TensorOperator {
        TensorOperator { dims: self.dims, matrix: &self.matrix * &other.matrix }
    }
}

/// Flat indices (i, j) with i + j + margin <= limit - 1; all indices when limit is None.
pub fn pair_window(d1: usize, d2: usize, limit: Option<usize>, margin: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..d1 {
        for j in 0..d2 {
            if limit.map_or(true, |l| i + j + margin < l) {
                out.push(i * d2 + j);
            }
        }
    }
    out
}

pub fn triple_window(dims: [usize; 3], limit: Option<usize>, margin: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                if limit.map_or(true, |l| i + j + k + margin < l) {
                    out.push((i * dims[1] + j) * dims[2] + k);
                }
            }
        }
    }
    out
}

/// Place an operator acting on factors (a, b) of V1⊗V2⊗V3 (a < b or a > b) into the triple space.
/// `op` is indexed in the order (factor a, factor b).
pub fn embed_pair(op: &CMat, dims: [usize; 3], a: usize, b: usize) -> CMat {
    let n = dims[0] * dims[1] * dims[2];
    let c = 3 - a - b;
    let flat = |idx: [usize; 3]| (idx[0] * dims[1] + idx[1]) * dims[2] + idx[2];
    let mut out = CMat::zeros(n, n);
    for i0 in 0..dims[0] {
        for i1 in 0..dims[1] {
            for i2 in 0..dims[2] {
                let idx = [i0, i1, i2];
                let col = flat(idx);
                let src = idx[a] * dims[b] + idx[b];
                for ia in 0..dims[a] {
                    for ib in 0..dims[b] {
                        let v = op[(ia * dims[b] + ib, src)];
                        if v == czero() {
                            continue;
                        }
                        let mut o = [0; 3];
                        o[a] = ia;
                        o[b] = ib;
                        o[c] = idx[c];
                        out[(flat(o), col)] += v;
                    }
                }
            }
        }
    }
    out
}

/// Right nullspace of m: vectors for singular values <= rel_tol·s_max.
/// Returns the basis (as columns) and all singular values in descending order.
pub fn nullspace(m: &CMat, rel_tol: f64) -> (CMat, Vec<f64>) {
    let k = m.ncols();
    // Reduce tall systems to a k×k triangle first.
    let square = if m.nrows() > k {
        m.clone().qr().r()
    } else {
        let mut padded = CMat::zeros(k, k);
        padded.view_mut((0, 0), (m.nrows(), k)).copy_from(m);
        padded
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = values.first().copied().unwrap_or(0.0);
    let null: Vec<usize> =
        order.iter().copied().filter(|&i| svd.singular_values[i] <= rel_tol * smax).collect();
    let mut basis = CMat::zeros(k, null.len());
    for (col, &i) in null.iter().enumerate() {
        for r in 0..k {
            basis[(r, col)] = v_t[(i, r)].conj();
        }
    }
    (basis, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_index_convention() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let b = CMat::from_row_slice(3, 3, &(0..9).map(|v| c(v as f64, 1.0)).collect::<Vec<_>>());
        let k = kron(&a, &b);
        for (i, ip, j, jp) in [(0, 1, 2, 0), (1, 0, 1, 2), (1, 1, 0, 0)] {
            assert_eq!(k[(i * 3 + j, ip * 3 + jp)], a[(i, ip)] * b[(j, jp)]);
        }
    }

    #[test]
    fn swap_conjugates_kron() {
        let a = CMat::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64));
        let b = CMat::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0 - i as f64));
        let p = swap_matrix(2, 3);
        let lhs = &p * kron(&a, &b) * p.transpose();
        assert!(max_abs(&(lhs - kron(&b, &a))) < 1e-14);
    }

    #[test]
    fn embed_matches_kron_with_identity() {
        let r = CMat::from_fn(6, 6, |i, j| c(i as f64 - j as f64, (i + 2 * j) as f64));
        let dims = [2, 3, 2];
        let e01 = embed_pair(&r, dims, 0, 1);
        assert!(max_abs(&(e01 - kron(&r, &CMat::identity(2, 2)))) < 1e-14);
        let r2 = CMat::from_fn(6, 6, |i, j| c((i * j) as f64, 0.5));
        let e12 = embed_pair(&r2, dims, 1, 2);
        assert!(max_abs(&(e12 - kron(&CMat::identity(2, 2), &r2))) < 1e-14);
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        let (basis, values) = nullspace(&m, 1e-10);
        assert_eq!(basis.ncols(), 1);
        assert!(max_abs(&(&m * &basis)) < 1e-12);
        assert!(values[0] >= values[1] && values[1] >= values[2]);
        let tall = CMat::from_fn(7, 2, |i, _| c(i as f64, 0.0));
        assert_eq!(nullspace(&tall, 1e-10).0.ncols(), 1);
    }

    #[test]
    fn windows() {
        assert_eq!(pair_window(3, 3, Some(3), 1), vec![0, 1, 3]);
        assert_eq!(pair_window(2, 2, None, 5).len(), 4);
        assert_eq!(triple_window([2, 2, 2], Some(2), 0), vec![0, 1, 2, 4]);
    }
}
