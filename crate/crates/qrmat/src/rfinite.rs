//! The U_q(sl2) R-matrix on pairs of truncated Verma modules.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cone, diag, embed_pair, kron, max_abs, max_abs_cols, pair_window, triple_window, CMat, TensorOperator};
use crate::qnum::{qbinom, qexp_truncated, QParam};
use crate::repspace::{coproduct, opposite_coproduct, Gen, Rep, RepKind};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RFiniteOptions {
    pub safe_margin: usize,
    pub include_cartan_factor: bool,
    pub tolerance: f64,
}

impl Default for RFiniteOptions {
    fn default() -> Self {
        RFiniteOptions { safe_margin: 0, include_cartan_factor: true, tolerance: DEFAULT_TOLERANCE }
    }
}

/// Coefficient in front of e⊗F^N in the product form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReshetikhinCoefficient {
    /// (q - q⁻¹)^N, the value that reproduces the direct formula.
    QDifference,
    /// (1 - ε⁻²)^{-N}.
    InverseOneMinus,
    /// c_{N'}: -(1 - ε⁻²)^{-N} for odd N, (-1)^N (1 - ε⁻²)^{-N} for even N.
    ParitySigned,
}

impl ReshetikhinCoefficient {
    pub fn value(self, qp: &QParam) -> Result<C64> {
        let n = qp.require_root()? as i32;
        let base = (cone() - qp.powi(-2)).powi(-n);
        Ok(match self {
            ReshetikhinCoefficient::QDifference => qp.q_minus_qinv().powi(n),
            ReshetikhinCoefficient::InverseOneMinus => base,
            ReshetikhinCoefficient::ParitySigned => {
                if qp.nprime().unwrap() % 2 == 1 {
                    -base
                } else if n % 2 == 0 {
                    base
                } else {
                    -base
                }
            }
        })
    }
}

/// Smallest truncation depth among non-exact factors.
pub fn joint_limit(reps: &[&Rep]) -> Option<usize> {
    reps.iter().filter_map(|r| r.truncation_limit()).min()
}

fn same_q(reps: &[&Rep]) -> Result<QParam> {
    let qp = reps[0].qp;
    if reps.iter().any(|r| r.qp != qp) {
        return Err(Error::QParamMismatch);
    }
    Ok(qp)
}

/// Diagonal of q^{½H⊗H} on v_i⊗v_j: q^{½(λ1-2i)(λ2-2j)}.
pub fn cartan_diag(rep1: &Rep, rep2: &Rep) -> Vec<C64> {
    let (w1, w2) = (rep1.weights(), rep2.weights());
    let mut out = Vec::with_capacity(w1.len() * w2.len());
    for a in &w1 {
        for b in &w2 {
            out.push(rep1.qp.pow(0.5 * a * b));
        }
    }
    out
}

pub fn cartan_factor(rep1: &Rep, rep2: &Rep) -> CMat {
    diag(&cartan_diag(rep1, rep2))
}

fn require_verma_e(rep: &Rep) -> Result<()> {
    match rep.kind {
        RepKind::TruncatedVerma { .. } | RepKind::Semicyclic { .. } => Ok(()),
        RepKind::Cyclic { .. } => {
            Err(Error::InvalidParameter("divided powers need the highest-weight E action".into()))
        }
    }
}

/// E^n/(n)_{q⁻²}! on a module with the Verma E action:
/// v_s ↦ q^{½n(n-1)}·qbinom(s,n)·Π_{r=1}^n [λ-s+r] v_{s-n}, finite at roots of unity.
pub fn e_divided_power(rep: &Rep, n: usize) -> Result<CMat> {
    require_verma_e(rep)?;
    let d = rep.dim();
    let qp = &rep.qp;
    let mut m = CMat::zeros(d, d);
    let pre = qp.powf(0.5 * (n * n.saturating_sub(1)) as f64);
    for s in n..d {
        let mut c = pre * qbinom(s as u32, n as u32, qp)?;
        for r in 1..=n {
            c *= qp.qint_c(rep.lambda - s as f64 + r as f64);
        }
        m[(s - n, s)] = c;
    }
    Ok(m)
}

/// The derivation e = lim E^N/(N)_{q⁻²}!.
pub fn e_derivation_matrix(rep: &Rep) -> Result<CMat> {
    let n = rep.qp.require_root()? as usize;
    e_divided_power(rep, n)
}

fn require_verma(rep: &Rep) -> Result<()> {
    if rep.is_truncated_verma() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("expected a truncated Verma module".into()))
    }
}

/// R(v_s⊗v_{s'}) = Σ_n q^{½(λ1-2s)(λ2-2s')} q^{½n(n-1)} (q-q⁻¹)^n qbinom(s,n) Π_{r≤n}[λ1-s+r] v_{s-n}⊗v_{s'+n}.
pub fn r_verma_direct(rep1: &Rep, rep2: &Rep) -> Result<TensorOperator> {
    let qp = same_q(&[rep1, rep2])?;
    require_verma(rep1)?;
    require_verma(rep2)?;
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let cart = cartan_diag(rep1, rep2);
    let qd = qp.q_minus_qinv();
    let mut r = CMat::zeros(d1 * d2, d1 * d2);
    for s in 0..d1 {
        for sp in 0..d2 {
            for n in 0..=s {
                if sp + n >= d2 {
                    break;
                }
                let mut c = cart[s * d2 + sp]
                    * qp.powf(0.5 * (n * n.saturating_sub(1)) as f64)
                    * qd.powi(n as i32)
                    * qbinom(s as u32, n as u32, &qp)?;
                for k in 1..=n {
                    c *= qp.qint_c(rep1.lambda - s as f64 + k as f64);
                }
                r[((s - n) * d2 + sp + n, s * d2 + sp)] += c;
            }
        }
    }
    TensorOperator::new((d1, d2), r)
}

/// exp_{q⁻²}((q-q⁻¹) A⊗B)·q^{½ h_A⊗h_B} for arbitrary raising/lowering blocks.
pub(crate) fn universal_on(
    e_a: &CMat,
    h_a: &[C64],
    f_b: &CMat,
    h_b: &[C64],
    qp: &QParam,
    terms: usize,
) -> Result<CMat> {
    let x = kron(e_a, f_b) * qp.q_minus_qinv();
    let series = qexp_truncated(&x, qp.powi(-2), terms)?;
    let mut cart = Vec::with_capacity(h_a.len() * h_b.len());
    for a in h_a {
        for b in h_b {
            cart.push(qp.pow(0.5 * a * b));
        }
    }
    Ok(series * diag(&cart))
}

/// exp_{q⁻²}((q-q⁻¹)E⊗F)·q^{½H⊗H} with the series cut at `terms`.
pub fn r_generic_universal(rep1: &Rep, rep2: &Rep, terms: usize) -> Result<TensorOperator> {
    let qp = same_q(&[rep1, rep2])?;
    if qp.is_root() {
        return Err(Error::InvalidParameter("the universal series needs generic q".into()));
    }
    let m = universal_on(&rep1.e, &rep1.weights(), &rep2.f, &rep2.weights(), &qp, terms)?;
    TensorOperator::new((rep1.dim(), rep2.dim()), m)
}

fn generalized_binomial(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a - i as f64) / (i + 1) as f64)
}

/// (1 - X)^a by the binomial series; X must be nilpotent.
fn nilpotent_power(x: &CMat, a: f64) -> CMat {
    let d = x.nrows();
    let mut sum = CMat::identity(d, d);
    let mut p = CMat::identity(d, d);
    for k in 1..=d {
        p = &p * x;
        if max_abs(&p) == 0.0 {
            break;
        }
        sum += &p * C64::new(generalized_binomial(a, k) * if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    sum
}

fn nilpotent_exp(x: &CMat) -> CMat {
    let d = x.nrows();
    let mut sum = CMat::identity(d, d);
    let mut p = CMat::identity(d, d);
    for k in 1..=d {
        p = &p * x / C64::new(k as f64, 0.0);
        if max_abs(&p) == 0.0 {
            break;
        }
        sum += &p;
    }
    sum
}

/// Product form at q = ε:
/// Π_{m=0}^{N-1} (1 - ε^{2(m+1)} w)^{-m/N} · exp(c·e⊗F^N) · q^{½H⊗H}, w = (1-ε⁻²)(ε-ε⁻¹)E⊗F.
pub fn r_reshetikhin_product(
    rep1: &Rep,
    rep2: &Rep,
    coefficient: ReshetikhinCoefficient,
) -> Result<TensorOperator> {
    let qp = same_q(&[rep1, rep2])?;
    let n = qp.require_root()? as usize;
    require_verma(rep1)?;
    require_verma(rep2)?;
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let w = kron(&rep1.e, &rep2.f) * ((cone() - qp.powi(-2)) * qp.q_minus_qinv());
    let mut prod = CMat::identity(d1 * d2, d1 * d2);
    for m in 1..n {
        let x = &w * qp.powi(2 * (m as i64 + 1));
        prod = prod * nilpotent_power(&x, -(m as f64) / n as f64);
    }
    let e = e_derivation_matrix(rep1)?;
    let mut f_n = CMat::identity(d2, d2);
    for _ in 0..n {
        f_n = &f_n * &rep2.f;
    }
    let expo = nilpotent_exp(&(kron(&e, &f_n) * coefficient.value(&qp)?));
    TensorOperator::new((d1, d2), prod * expo * cartan_factor(rep1, rep2))
}

fn pair_columns(rep1: &Rep, rep2: &Rep, margin: usize) -> Vec<usize> {
    pair_window(rep1.dim(), rep2.dim(), joint_limit(&[rep1, rep2]), margin)
}

/// max over a ∈ {E, F, K} of |R Δ(a) - Δ'(a) R| on the safe window.
pub fn intertwine_residual(r: &TensorOperator, rep1: &Rep, rep2: &Rep, margin: usize) -> Result<f64> {
    if r.dims != (rep1.dim(), rep2.dim()) {
        return Err(Error::InvalidParameter("operator dims do not match modules".into()));
    }
    let cols = pair_columns(rep1, rep2, margin);
    let mut worst: f64 = 0.0;
    for g in [Gen::E, Gen::F, Gen::K] {
        let d = coproduct(rep1, rep2, g)?.matrix;
        let dp = opposite_coproduct(rep1, rep2, g)?.matrix;
        worst = worst.max(max_abs_cols(&(&r.matrix * d - dp * &r.matrix), &cols));
    }
    Ok(worst)
}

/// |R12 R13 R23 - R23 R13 R12| on the safe window of V1⊗V2⊗V3.
pub fn ybe_residual<B>(reps: [&Rep; 3], builder: B, margin: usize) -> Result<f64>
where
    B: Fn(&Rep, &Rep) -> Result<TensorOperator>,
{
    same_q(&reps)?;
    let dims = [reps[0].dim(), reps[1].dim(), reps[2].dim()];
    let r12 = embed_pair(&builder(reps[0], reps[1])?.matrix, dims, 0, 1);
    let r13 = embed_pair(&builder(reps[0], reps[2])?.matrix, dims, 0, 2);
    let r23 = embed_pair(&builder(reps[1], reps[2])?.matrix, dims, 1, 2);
    let lhs = &r12 * &r13 * &r23;
    let rhs = &r23 * &r13 * &r12;
    let cols = triple_window(dims, joint_limit(&reps), margin);
    Ok(max_abs_cols(&(lhs - rhs), &cols))
}

/// (|(Δ⊗1)R - R13 R23|, |(1⊗Δ)R - R13 R12|) at generic q.
pub fn quasitriangularity_residual(rep1: &Rep, rep2: &Rep, rep3: &Rep) -> Result<(f64, f64)> {
    let qp = same_q(&[rep1, rep2, rep3])?;
    if qp.is_root() {
        return Err(Error::InvalidParameter("quasitriangularity is checked at generic q".into()));
    }
    let dims = [rep1.dim(), rep2.dim(), rep3.dim()];
    let terms = dims.iter().sum::<usize>();
    let build = |a: &Rep, b: &Rep| r_generic_universal(a, b, terms);
    let r12 = embed_pair(&build(rep1, rep2)?.matrix, dims, 0, 1);
    let r13 = embed_pair(&build(rep1, rep3)?.matrix, dims, 0, 2);
    let r23 = embed_pair(&build(rep2, rep3)?.matrix, dims, 1, 2);

    let sum_weights = |a: &Rep, b: &Rep| {
        let mut h = Vec::new();
        for x in a.weights() {
            for y in b.weights() {
                h.push(x + y);
            }
        }
        h
    };
    let e12 = coproduct(rep1, rep2, Gen::E)?.matrix;
    let left = universal_on(&e12, &sum_weights(rep1, rep2), &rep3.f, &rep3.weights(), &qp, terms)?;
    let f23 = coproduct(rep2, rep3, Gen::F)?.matrix;
    let right = universal_on(&rep1.e, &rep1.weights(), &f23, &sum_weights(rep2, rep3), &qp, terms)?;

    let cols = triple_window(dims, joint_limit(&[rep1, rep2, rep3]), 0);
    Ok((
        max_abs_cols(&(left - &r13 * &r23), &cols),
        max_abs_cols(&(right - &r13 * &r12), &cols),
    ))
}

/// Largest entry outside the pattern v_i⊗v_j ↦ span{v_{i-n}⊗v_{j+n}}.
pub fn triangularity_defect(r: &TensorOperator) -> f64 {
    let (d1, d2) = r.dims;
    let mut worst: f64 = 0.0;
    for i in 0..d1 {
        for j in 0..d2 {
            for ip in 0..d1 {
                for jp in 0..d2 {
                    let allowed = ip <= i && i - ip == jp.wrapping_sub(j) && jp >= j;
                    if !allowed {
                        worst = worst.max(r.entry(i, j, ip, jp).norm());
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repspace::truncated_verma;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pair(qp: &QParam, l1: C64, l2: C64, d1: usize, d2: usize) -> (Rep, Rep) {
        (truncated_verma(l1, d1, qp).unwrap(), truncated_verma(l2, d2, qp).unwrap())
    }

    #[test]
    fn highest_weight_eigenvalue() {
        let qp = QParam::generic(c(1.3, 0.0)).unwrap();
        let (l1, l2) = (c(0.7, 0.1), c(1.4, 0.0));
        let (r1, r2) = pair(&qp, l1, l2, 3, 3);
        let r = r_verma_direct(&r1, &r2).unwrap();
        assert!((r.matrix[(0, 0)] - qp.pow(0.5 * l1 * l2)).norm() < 1e-14);
        assert!(r.matrix.column(0).iter().skip(1).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn s_equals_one_row() {
        // R(v_1⊗v_0) = q^{½(λ1-2)λ2}(v_1⊗v_0 + (q-q⁻¹)[λ1] v_0⊗v_1)
        let qp = QParam::generic(c(1.3, 0.0)).unwrap();
        let (l1, l2) = (c(0.6, 0.0), c(1.1, 0.0));
        let (r1, r2) = pair(&qp, l1, l2, 3, 3);
        let r = r_verma_direct(&r1, &r2).unwrap();
        let pre = qp.pow(0.5 * (l1 - 2.0) * l2);
        assert!((r.entry(1, 0, 1, 0) - pre).norm() < 1e-13);
        assert!((r.entry(1, 0, 0, 1) - pre * qp.q_minus_qinv() * qp.qint_c(l1)).norm() < 1e-13);
    }

    #[test]
    fn direct_matches_universal_at_generic_q() {
        let qp = QParam::generic(c(1.3, 0.0)).unwrap();
        let (r1, r2) = pair(&qp, c(0.7, 0.2), c(1.4, -0.1), 4, 4);
        let a = r_verma_direct(&r1, &r2).unwrap();
        let b = r_generic_universal(&r1, &r2, 4).unwrap();
        let cols = pair_window(4, 4, Some(4), 0);
        assert!(max_abs_cols(&(&a.matrix - &b.matrix), &cols) < 1e-12);
        assert!(triangularity_defect(&b) < 1e-15);
    }

    #[test]
    fn identity_is_not_an_intertwiner() {
        let qp = QParam::generic(c(1.3, 0.0)).unwrap();
        let (r1, r2) = pair(&qp, c(0.7, 0.0), c(1.4, 0.0), 3, 3);
        let id = TensorOperator::identity((3, 3));
        assert!(intertwine_residual(&id, &r1, &r2, 1).unwrap() > 1e-3);
        let r = r_verma_direct(&r1, &r2).unwrap();
        assert!(intertwine_residual(&r, &r1, &r2, 1).unwrap() < 1e-12);
    }

    #[test]
    fn derivation_entries() {
        let qp = QParam::root_of_unity(3).unwrap();
        let lam = c(0.37, 0.2);
        let v = truncated_verma(lam, 6, &qp).unwrap();
        let e = e_derivation_matrix(&v).unwrap();
        for s in 0..3 {
            assert!(e.column(s).iter().all(|x| x.norm() == 0.0));
        }
        let mut expected = qp.powf(3.0);
        for r in 1..=3 {
            expected *= qp.qint_c(lam - 3.0 + r as f64);
        }
        assert!((e[(0, 3)] - expected).norm() < 1e-13);
    }

    #[test]
    fn reshetikhin_below_depth_n() {
        let qp = QParam::root_of_unity(5).unwrap();
        let (r1, r2) = pair(&qp, c(0.3, 0.1), c(1.2, -0.1), 3, 3);
        let a = r_reshetikhin_product(&r1, &r2, ReshetikhinCoefficient::QDifference).unwrap();
        let b = r_reshetikhin_product(&r1, &r2, ReshetikhinCoefficient::InverseOneMinus).unwrap();
        assert_eq!(a, b);
        assert!((a.matrix[(0, 0)] - qp.pow(0.5 * c(0.3, 0.1) * c(1.2, -0.1))).norm() < 1e-14);
    }

    #[test]
    fn parity_signed_coefficient() {
        let odd = QParam::root_of_unity(5).unwrap();
        let a = ReshetikhinCoefficient::ParitySigned.value(&odd).unwrap();
        let b = ReshetikhinCoefficient::InverseOneMinus.value(&odd).unwrap();
        assert!((a + b).norm() < 1e-14);
        let even = QParam::root_of_unity(8).unwrap();
        let a = ReshetikhinCoefficient::ParitySigned.value(&even).unwrap();
        let b = ReshetikhinCoefficient::InverseOneMinus.value(&even).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn one_dimensional_ybe_vanishes() {
        let qp = QParam::generic(c(1.2, 0.1)).unwrap();
        let v: Vec<Rep> = [0.3, 0.9, 1.7].iter().map(|&l| truncated_verma(c(l, 0.0), 1, &qp).unwrap()).collect();
        let res = ybe_residual([&v[0], &v[1], &v[2]], r_verma_direct, 0).unwrap();
        assert!(res < 1e-15);
        let (a, b) = quasitriangularity_residual(&v[0], &v[1], &v[2]).unwrap();
        assert!(a < 1e-15 && b < 1e-15);
    }
}
