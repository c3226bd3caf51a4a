//! Independent reference computations: extrapolated q-binomials at roots of unity,
//! the forward Schur sum, and the unfactored product/exponential forms of R⁺, R⁻, R⁰.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{cone, czero, kron, CMat, TensorOperator};
use crate::qnum::{qexp_truncated, QParam};
use crate::raffine::imaginary_root_vectors;
use crate::repspace::Rep;

/// [s n] at q = ε·e^{h}, h → 0, by Neville extrapolation over h_k = h0/2^k.
pub fn qbinom_extrapolated(s: u32, n: u32, nprime: u32, levels: usize) -> Result<C64> {
    if n > s {
        return Err(Error::OutOfRange(format!("qbinom({s}, {n}) needs n <= s")));
    }
    let root = QParam::root_of_unity(nprime)?;
    let h0 = 0.01;
    let hs: Vec<f64> = (0..levels).map(|k| h0 / 2f64.powi(k as i32)).collect();
    let mut vals = Vec::with_capacity(levels);
    for &h in &hs {
        let qp = QParam::generic(root.q() * h.exp())?;
        vals.push((1..=n as i64).fold(cone(), |acc, k| acc * qp.qint(s as i64 - n as i64 + k) / qp.qint(k)));
    }
    Ok(neville_at_zero(&hs, &vals))
}

/// Value at 0 of the interpolating polynomial through (xs, ys).
pub fn neville_at_zero(xs: &[f64], ys: &[C64]) -> C64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (p[i + 1] * xs[i] - p[i] * xs[i + m]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// P_n = Σ over partitions n = Σ k·p_k of c^{Σp - 1}/Π p_k! · Π Q_k^{p_k}, for n = 1..=q.len().
pub fn schur_forward(q: &[CMat], c: C64) -> Vec<CMat> {
    let d = q[0].nrows();
    let mut out = Vec::with_capacity(q.len());
    for n in 1..=q.len() {
        let mut acc = CMat::zeros(d, d);
        for parts in multiplicities(n) {
            let count: u32 = parts.iter().sum();
            let mut term = CMat::identity(d, d) * c.powi(count as i32 - 1);
            for (k, &p) in parts.iter().enumerate() {
                for r in 1..=p {
                    term = term * &q[k] / C64::new(r as f64, 0.0);
                }
            }
            acc += term;
        }
        out.push(acc);
    }
    out
}

/// Partitions of n as multiplicity vectors (index k holds the count of part k+1).
fn multiplicities(n: usize) -> Vec<Vec<u32>> {
    fn go(rem: usize, max: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(rem)).rev() {
            cur[part - 1] += 1;
            go(rem - part, part, cur, out);
            cur[part - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut vec![0; n], &mut out);
    out
}

fn product_terms(rep1: &Rep, rep2: &Rep) -> Result<(QParam, usize)> {
    if rep1.qp != rep2.qp {
        return Err(Error::QParamMismatch);
    }
    Ok((rep1.qp, rep1.dim().max(rep2.dim())))
}

/// Π_{n=0}^{terms} exp_{q⁻²}((q-q⁻¹) zⁿ q^{-nH}E ⊗ F q^{nH}), n increasing left to right.
pub fn rplus_product(z: C64, rep1: &Rep, rep2: &Rep, terms: usize) -> Result<TensorOperator> {
    let (qp, cut) = product_terms(rep1, rep2)?;
    let mut r = CMat::identity(rep1.dim() * rep2.dim(), rep1.dim() * rep2.dim());
    for n in 0..=terms {
        let nf = n as f64;
        let x = kron(&(rep1.qh(-nf) * &rep1.e), &(&rep2.f * rep2.qh(nf))) * (qp.q_minus_qinv() * z.powi(n as i32));
        r *= qexp_truncated(&x, qp.powi(-2), cut)?;
    }
    TensorOperator::new((rep1.dim(), rep2.dim()), r)
}

/// Π_{n=terms}^{0} exp_{q⁻²}((q-q⁻¹) z^{n+1} F q^{-nH} ⊗ q^{nH}E), n decreasing left to right.
pub fn rminus_product(z: C64, rep1: &Rep, rep2: &Rep, terms: usize) -> Result<TensorOperator> {
    let (qp, cut) = product_terms(rep1, rep2)?;
    let mut r = CMat::identity(rep1.dim() * rep2.dim(), rep1.dim() * rep2.dim());
    for n in (0..=terms).rev() {
        let nf = n as f64;
        let x = kron(&(&rep1.f * rep1.qh(-nf)), &(rep2.qh(nf) * &rep2.e)) * (qp.q_minus_qinv() * z.powi(n as i32 + 1));
        r *= qexp_truncated(&x, qp.powi(-2), cut)?;
    }
    TensorOperator::new((rep1.dim(), rep2.dim()), r)
}

/// exp(Σ_{n=1}^{order} κ_n zⁿ E_{nδ}⊗F_{nδ}), κ_n = n(q²-q⁻²)²/(q^{2n}-q^{-2n}), both factors at x = 1.
/// The exponent must be diagonal.
pub fn rzero_exponential(z: C64, rep1: &Rep, rep2: &Rep, order: usize) -> Result<TensorOperator> {
    let (qp, _) = product_terms(rep1, rep2)?;
    let a = imaginary_root_vectors(rep1, cone(), order)?;
    let b = imaginary_root_vectors(rep2, cone(), order)?;
    let c2 = (qp.powi(2) - qp.powi(-2)).powi(2);
    let dim = rep1.dim() * rep2.dim();
    let mut s = CMat::zeros(dim, dim);
    for n in 1..=order {
        let ni = n as i64;
        let kappa = c2 * n as f64 / (qp.powi(2 * ni) - qp.powi(-2 * ni));
        s += kron(&a.e[n - 1], &b.f[n - 1]) * (kappa * z.powi(n as i32));
    }
    let scale = s.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    for i in 0..dim {
        for j in 0..dim {
            if i != j && s[(i, j)].norm() > 1e-12 * (1.0 + scale) {
                return Err(Error::InvalidParameter("exponent is not diagonal".into()));
            }
        }
    }
    let r = CMat::from_fn(dim, dim, |i, j| if i == j { s[(i, i)].exp() } else { czero() });
    TensorOperator::new((rep1.dim(), rep2.dim()), r)
}
