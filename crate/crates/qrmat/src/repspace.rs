//! Finite matrix modules of U_q(sl2): truncated Verma, semicyclic and cyclic.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{comm, cone, czero, diag, kron, max_abs_cols, mpow, scalar_value, CMat, TensorOperator};
use crate::qnum::QParam;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RepKind {
    TruncatedVerma { depth: usize },
    Semicyclic { alpha: C64 },
    Cyclic { alpha: C64, beta: C64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rep {
    pub lambda: C64,
    pub kind: RepKind,
    pub e: CMat,
    pub f: CMat,
    pub k: CMat,
    pub qp: QParam,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    E,
    F,
    K,
    Kinv,
}

/// E v_m = [m][λ-m+1] v_{m-1}.
pub fn verma_e_coefficient(m: usize, lambda: C64, qp: &QParam) -> C64 {
    qp.qint(m as i64) * qp.qint_c(lambda - m as f64 + 1.0)
}

impl Rep {
    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    /// Spectrum λ - 2m of H.
    pub fn weights(&self) -> Vec<C64> {
        (0..self.dim()).map(|m| self.lambda - 2.0 * m as f64).collect()
    }

    /// Diagonal entries of q^{cH}.
    pub fn qh_diag(&self, c: C64) -> Vec<C64> {
        self.weights().into_iter().map(|h| self.qp.pow(c * h)).collect()
    }

    pub fn qh(&self, c: f64) -> CMat {
        diag(&self.qh_diag(C64::new(c, 0.0)))
    }

    pub fn kinv(&self) -> CMat {
        CMat::from_fn(self.dim(), self.dim(), |i, j| if i == j { self.k[(i, i)].inv() } else { czero() })
    }

    pub fn gen(&self, g: Gen) -> CMat {
        match g {
            Gen::E => self.e.clone(),
            Gen::F => self.f.clone(),
            Gen::K => self.k.clone(),
            Gen::Kinv => self.kinv(),
        }
    }

    /// A truncated Verma module is an honest quotient when F v_{D-1} = 0 is forced, i.e. [D][λ-D+1] = 0.
    pub fn is_exact(&self) -> bool {
        match self.kind {
            RepKind::TruncatedVerma { depth } => {
                let c = verma_e_coefficient(depth, self.lambda, &self.qp);
                c.norm() < 1e-10
            }
            _ => true,
        }
    }

    /// Depth bounding the trusted degree window; None for honest modules.
    pub fn truncation_limit(&self) -> Option<usize> {
        match self.kind {
            RepKind::TruncatedVerma { depth } if !self.is_exact() => Some(depth),
            _ => None,
        }
    }

    pub fn is_truncated_verma(&self) -> bool {
        matches!(self.kind, RepKind::TruncatedVerma { .. })
    }

    /// Basis vectors on which the defining relations are trusted.
    pub fn safe_columns(&self, margin: usize) -> Vec<usize> {
        match self.truncation_limit() {
            Some(d) => (0..d.saturating_sub(margin)).collect(),
            None => (0..self.dim()).collect(),
        }
    }
}

pub fn truncated_verma(lambda: C64, depth: usize, qp: &QParam) -> Result<Rep> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be >= 1".into()));
    }
    let mut e = CMat::zeros(depth, depth);
    let mut f = CMat::zeros(depth, depth);
    let mut kd = Vec::with_capacity(depth);
    for m in 0..depth {
        kd.push(qp.pow(lambda - 2.0 * m as f64));
        if m + 1 < depth {
            f[(m + 1, m)] = cone();
        }
        if m >= 1 {
            e[(m - 1, m)] = verma_e_coefficient(m, lambda, qp);
        }
    }
    Ok(Rep { lambda, kind: RepKind::TruncatedVerma { depth }, e, f, k: diag(&kd), qp: *qp })
}

/// Quotient of the Verma module by F^N - α.
pub fn semicyclic(alpha: C64, lambda: C64, qp: &QParam) -> Result<Rep> {
    let n = qp
        .order()
        .ok_or_else(|| Error::InvalidParameter("semicyclic modules need q at a root of unity".into()))?
        as usize;
    let mut rep = truncated_verma(lambda, n, qp)?;
    rep.f[(0, n - 1)] = alpha;
    rep.kind = RepKind::Semicyclic { alpha };
    Ok(rep)
}

/// Cyclic module with F^N = α, E^N = β.
///
/// E v_m = e_m v_{m-1} and E v_0 = e_0 v_{N-1}. The commutator fixes e_m = α e_0 + [m][λ-m+1]
/// for m >= 1, and E^N = β becomes e_0·Π_{m≥1}(α e_0 + [m][λ-m+1]) = β. The root of smallest
/// modulus is taken, which is the semicyclic module e_0 = 0 when β = 0.
pub fn cyclic(beta: C64, alpha: C64, lambda: C64, qp: &QParam) -> Result<Rep> {
    let n = qp
        .order()
        .ok_or_else(|| Error::InvalidParameter("cyclic modules need q at a root of unity".into()))?
        as usize;
    let cs: Vec<C64> = (1..n).map(|m| verma_e_coefficient(m, lambda, qp)).collect();
    let e0 = solve_closure(alpha, beta, &cs)?;
    let mut rep = semicyclic(alpha, lambda, qp)?;
    for m in 1..n {
        rep.e[(m - 1, m)] = alpha * e0 + cs[m - 1];
    }
    rep.e[(n - 1, 0)] += e0;
    rep.kind = RepKind::Cyclic { alpha, beta };
    let rel = relation_residuals(&rep);
    let en = mpow(&rep.e, n);
    let en_dev = max_abs_cols(&(en - CMat::identity(n, n) * beta), &(0..n).collect::<Vec<_>>());
    let scale = 1.0 + beta.norm() + e0.norm().powi(n as i32);
    if rel.max() > 1e-9 * scale || en_dev > 1e-9 * scale {
        return Err(Error::Inadmissible(format!(
            "constructed module misses the relations (relation residual {:e}, E^N residual {en_dev:e})",
            rel.max()
        )));
    }
    Ok(rep)
}

fn solve_closure(alpha: C64, beta: C64, cs: &[C64]) -> Result<C64> {
    let prod: C64 = cs.iter().product();
    if alpha.norm() < 1e-14 {
        if prod.norm() < 1e-12 {
            return if beta.norm() < 1e-14 {
                Ok(czero())
            } else {
                Err(Error::Inadmissible(format!("α = 0 and Π[m][λ-m+1] = 0 cannot give E^N = {beta}")))
            };
        }
        return Ok(beta / prod);
    }
    // Coefficients, lowest degree first, of x·Π(αx + c_m) - β.
    let mut poly = vec![czero(), cone()];
    for &c in cs {
        let mut next = vec![czero(); poly.len() + 1];
        for (d, &p) in poly.iter().enumerate() {
            next[d] += p * c;
            next[d + 1] += p * alpha;
        }
        poly = next;
    }
    poly[0] -= beta;
    let roots = poly_roots(&poly)?;
    roots
        .into_iter()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .ok_or_else(|| Error::Inadmissible("closure polynomial has no roots".into()))
}

/// Roots of Σ a_d x^d from the companion matrix, each refined by a few Newton steps.
fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(Error::Inadmissible("degenerate closure polynomial".into()));
    }
    if deg == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let mut comp = CMat::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = cone();
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = comp.schur();
    let (_, t) = schur.unpack();
    let eval = |x: C64| coeffs.iter().rev().fold(czero(), |acc, &c| acc * x + c);
    let deval = |x: C64| {
        coeffs.iter().enumerate().skip(1).rev().fold(czero(), |acc, (d, &c)| acc * x + c * d as f64)
    };
    Ok((0..deg)
        .map(|i| {
            let mut x = t[(i, i)];
            for _ in 0..4 {
                let d = deval(x);
                if d.norm() == 0.0 {
                    break;
                }
                x -= eval(x) / d;
            }
            x
        })
        .collect())
}

fn check_pair(rep1: &Rep, rep2: &Rep) -> Result<()> {
    if rep1.qp != rep2.qp {
        return Err(Error::QParamMismatch);
    }
    Ok(())
}

/// Δ(E) = E⊗1 + K⁻¹⊗E, Δ(F) = F⊗K + 1⊗F, Δ(K) = K⊗K.
pub fn coproduct(rep1: &Rep, rep2: &Rep, gen: Gen) -> Result<TensorOperator> {
    check_pair(rep1, rep2)?;
    let (i1, i2) = (CMat::identity(rep1.dim(), rep1.dim()), CMat::identity(rep2.dim(), rep2.dim()));
    let m = match gen {
        Gen::E => kron(&rep1.e, &i2) + kron(&rep1.kinv(), &rep2.e),
        Gen::F => kron(&rep1.f, &rep2.k) + kron(&i1, &rep2.f),
        Gen::K => kron(&rep1.k, &rep2.k),
        Gen::Kinv => kron(&rep1.kinv(), &rep2.kinv()),
    };
    TensorOperator::new((rep1.dim(), rep2.dim()), m)
}

/// Δ' = σ∘Δ: Δ'(E) = 1⊗E + E⊗K⁻¹, Δ'(F) = K⊗F + F⊗1.
pub fn opposite_coproduct(rep1: &Rep, rep2: &Rep, gen: Gen) -> Result<TensorOperator> {
    check_pair(rep1, rep2)?;
    let (i1, i2) = (CMat::identity(rep1.dim(), rep1.dim()), CMat::identity(rep2.dim(), rep2.dim()));
    let m = match gen {
        Gen::E => kron(&i1, &rep2.e) + kron(&rep1.e, &rep2.kinv()),
        Gen::F => kron(&rep1.k, &rep2.f) + kron(&rep1.f, &i2),
        Gen::K => kron(&rep1.k, &rep2.k),
        Gen::Kinv => kron(&rep1.kinv(), &rep2.kinv()),
    };
    TensorOperator::new((rep1.dim(), rep2.dim()), m)
}

/// Central Casimir c = (Kq + K⁻¹q⁻¹)/(q - q⁻¹)² + FE.
pub fn casimir(rep: &Rep) -> CMat {
    let q = rep.qp.q();
    let d = rep.qp.q_minus_qinv();
    (&rep.k * q + rep.kinv() * q.inv()) / (d * d) + &rep.f * &rep.e
}

/// (Kq + K⁻¹q⁻¹)/(q - q⁻¹) + EF with the single power of q - q⁻¹; not central.
pub fn casimir_single_denominator(rep: &Rep) -> CMat {
    let q = rep.qp.q();
    (&rep.k * q + rep.kinv() * q.inv()) / rep.qp.q_minus_qinv() + &rep.e * &rep.f
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelationResiduals {
    pub ke: f64,
    pub kf: f64,
    pub ef: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.ke.max(self.kf).max(self.ef)
    }
}

/// KEK⁻¹ = q²E, KFK⁻¹ = q⁻²F, [E,F] = (K-K⁻¹)/(q-q⁻¹), on the trusted columns.
pub fn relation_residuals(rep: &Rep) -> RelationResiduals {
    let q2 = rep.qp.powi(2);
    let kinv = rep.kinv();
    let all: Vec<usize> = (0..rep.dim()).collect();
    let safe = rep.safe_columns(1);
    let ke = &rep.k * &rep.e * &kinv - &rep.e * q2;
    let kf = &rep.k * &rep.f * &kinv - &rep.f / q2;
    let ef = comm(&rep.e, &rep.f) - (&rep.k - &kinv) / rep.qp.q_minus_qinv();
    RelationResiduals { ke: max_abs_cols(&ke, &all), kf: max_abs_cols(&kf, &all), ef: max_abs_cols(&ef, &safe) }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralEntry {
    pub name: &'static str,
    pub residual: f64,
    pub scalar: Option<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralReport {
    pub entries: Vec<CentralEntry>,
}

impl CentralReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

/// Commutators of E^N, F^N, K^N with E, F, K.
pub fn central_check(rep: &Rep) -> Result<CentralReport> {
    let n = rep.qp.require_root()? as usize;
    let gens = [&rep.e, &rep.f, &rep.k];
    let entries = [("E^N", &rep.e, 1), ("F^N", &rep.f, n), ("K^N", &rep.k, 1)]
        .into_iter()
        .map(|(name, g, margin)| {
            // F^N leaves the truncation N steps early.
            let safe = rep.safe_columns(margin);
            let x = mpow(g, n);
            let residual = gens.iter().map(|h| max_abs_cols(&comm(&x, h), &safe)).fold(0.0, f64::max);
            CentralEntry { name, residual, scalar: scalar_value(&x, 1e-9) }
        })
        .collect();
    Ok(CentralReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, swap_matrix};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn verma_actions() {
        let qp = QParam::generic(c(1.3, 0.2)).unwrap();
        let lam = c(0.7, 0.1);
        let v = truncated_verma(lam, 4, &qp).unwrap();
        assert!((v.e[(0, 1)] - qp.qint_c(lam)).norm() < 1e-14);
        assert_eq!(v.e.column(0).iter().map(|x| x.norm()).sum::<f64>(), 0.0);
        assert_eq!(v.f[(3, 2)], cone());
        assert_eq!(v.f.column(3).iter().map(|x| x.norm()).sum::<f64>(), 0.0);
        assert!(relation_residuals(&v).max() < 1e-12);
        assert!(!v.is_exact());
        assert_eq!(v.truncation_limit(), Some(4));
    }

    #[test]
    fn spin_half_block() {
        // Solving [E,F] = (K-K⁻¹)/(q-q⁻¹) on 2x2 with F = e_{10}, K = diag(q, q⁻¹) gives E = e_{01}.
        let qp = QParam::generic(c(1.7, 0.0)).unwrap();
        let v = truncated_verma(c(1.0, 0.0), 2, &qp).unwrap();
        assert!((v.e[(0, 1)] - 1.0).norm() < 1e-14);
        assert!(v.is_exact());
        let ef = comm(&v.e, &v.f) - (&v.k - v.kinv()) / qp.q_minus_qinv();
        assert!(max_abs(&ef) < 1e-14);
    }

    #[test]
    fn semicyclic_wrap() {
        let qp = QParam::root_of_unity(3).unwrap();
        let s = semicyclic(c(0.7, 0.0), c(1.0, 0.0), &qp).unwrap();
        let f3 = mpow(&s.f, 3);
        assert!(max_abs(&(f3 - CMat::identity(3, 3) * c(0.7, 0.0))) < 1e-12);
        let ef = comm(&s.e, &s.f) - (&s.k - s.kinv()) / qp.q_minus_qinv();
        assert!(max_abs(&ef) < 1e-12);
        let nil = semicyclic(czero(), c(0.4, 0.2), &qp).unwrap();
        let v = truncated_verma(c(0.4, 0.2), 3, &qp).unwrap();
        assert_eq!(nil.f, v.f);
        assert_eq!(nil.e, v.e);
        assert!(semicyclic(cone(), cone(), &QParam::generic(c(1.2, 0.0)).unwrap()).is_err());
    }

    #[test]
    fn cyclic_module_relations() {
        let qp = QParam::root_of_unity(3).unwrap();
        let cy = cyclic(c(0.3, 0.0), c(0.7, 0.0), c(1.0, 0.0), &qp).unwrap();
        assert!(relation_residuals(&cy).max() < 1e-9);
        let e3 = mpow(&cy.e, 3);
        assert!(max_abs(&(e3 - CMat::identity(3, 3) * c(0.3, 0.0))) < 1e-9);
        assert!(scalar_value(&casimir(&cy), 1e-9).is_some());
        let reduced = cyclic(czero(), c(0.7, 0.0), c(0.4, 0.3), &qp).unwrap();
        let semi = semicyclic(c(0.7, 0.0), c(0.4, 0.3), &qp).unwrap();
        assert!(max_abs(&(reduced.e - semi.e)) < 1e-14);
    }

    #[test]
    fn cyclic_inadmissible() {
        // λ = 1, N = 3: [2][0] = 0 kills the product, so α = 0 with β ≠ 0 has no solution.
        let qp = QParam::root_of_unity(3).unwrap();
        assert!(matches!(cyclic(cone(), czero(), cone(), &qp), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn coproduct_examples() {
        let qp = QParam::generic(c(1.3, 0.0)).unwrap();
        let (l1, l2) = (c(0.6, 0.0), c(1.1, 0.2));
        let (r1, r2) = (truncated_verma(l1, 3, &qp).unwrap(), truncated_verma(l2, 3, &qp).unwrap());
        let dk = coproduct(&r1, &r2, Gen::K).unwrap();
        assert!((dk.matrix[(0, 0)] - qp.pow(l1 + l2)).norm() < 1e-13);
        let de = coproduct(&r1, &r2, Gen::E).unwrap();
        assert!(de.matrix.column(0).iter().all(|v| v.norm() == 0.0));
        let df = coproduct(&r1, &r2, Gen::F).unwrap();
        assert!((df.entry(0, 0, 1, 0) - qp.pow(l2)).norm() < 1e-13);
        assert!((df.entry(0, 0, 0, 1) - 1.0).norm() < 1e-13);
        let dfp = opposite_coproduct(&r1, &r2, Gen::F).unwrap();
        assert!((dfp.entry(0, 0, 1, 0) - 1.0).norm() < 1e-13);
        assert!((dfp.entry(0, 0, 0, 1) - qp.pow(l1)).norm() < 1e-13);
        assert_eq!(opposite_coproduct(&r1, &r2, Gen::K).unwrap(), dk);
    }

    #[test]
    fn opposite_is_flip_conjugate() {
        let qp = QParam::root_of_unity(5).unwrap();
        let r1 = truncated_verma(c(0.3, 0.1), 3, &qp).unwrap();
        let r2 = semicyclic(c(0.5, -0.2), c(1.2, 0.0), &qp).unwrap();
        let p12 = swap_matrix(3, 5);
        let p21 = swap_matrix(5, 3);
        for g in [Gen::E, Gen::F, Gen::K, Gen::Kinv] {
            let flipped = &p21 * coproduct(&r2, &r1, g).unwrap().matrix * &p12;
            assert!(max_abs(&(flipped - opposite_coproduct(&r1, &r2, g).unwrap().matrix)) < 1e-13);
        }
        let other = QParam::root_of_unity(7).unwrap();
        let r3 = truncated_verma(cone(), 2, &other).unwrap();
        assert_eq!(coproduct(&r1, &r3, Gen::E), Err(Error::QParamMismatch));
    }

    #[test]
    fn coproduct_is_algebra_map() {
        let qp = QParam::generic(c(1.2, 0.1)).unwrap();
        let r1 = truncated_verma(c(2.0, 0.0), 3, &qp).unwrap();
        let r2 = truncated_verma(c(1.0, 0.0), 2, &qp).unwrap();
        let e = coproduct(&r1, &r2, Gen::E).unwrap().matrix;
        let f = coproduct(&r1, &r2, Gen::F).unwrap().matrix;
        let k = coproduct(&r1, &r2, Gen::K).unwrap().matrix;
        let ki = coproduct(&r1, &r2, Gen::Kinv).unwrap().matrix;
        assert!(max_abs(&(comm(&e, &f) - (k - ki) / qp.q_minus_qinv())) < 1e-12);
    }

    #[test]
    fn casimir_on_semicyclic() {
        let qp = QParam::root_of_unity(5).unwrap();
        let lam = c(0.8, 0.3);
        let s = semicyclic(czero(), lam, &qp).unwrap();
        let cas = casimir(&s);
        let d = qp.q_minus_qinv();
        let expected = (qp.pow(lam + 1.0) + qp.pow(-lam - 1.0)) / (d * d);
        assert!((cas[(0, 0)] - expected).norm() < 1e-12);
        let single = casimir_single_denominator(&s);
        assert!(max_abs(&comm(&single, &s.e)) > 1e-3);
        let s2 = semicyclic(c(0.4, 0.1), lam, &qp).unwrap();
        let cas2 = casimir(&s2);
        for g in [&s2.e, &s2.f, &s2.k] {
            assert!(max_abs(&comm(&cas2, g)) < 1e-9);
        }
    }

    #[test]
    fn centrality_at_root() {
        let qp = QParam::root_of_unity(5).unwrap();
        let s = semicyclic(c(0.4, 0.1), c(0.3, 0.2), &qp).unwrap();
        let rep = central_check(&s).unwrap();
        assert!(rep.max_residual() < 1e-9);
        assert!(rep.entries.iter().all(|e| e.scalar.is_some()));
        let v = truncated_verma(c(0.3, 0.2), 8, &qp).unwrap();
        assert!(central_check(&v).unwrap().max_residual() < 1e-9);
        let kn = &central_check(&v).unwrap().entries[2];
        assert!((kn.scalar.unwrap() - qp.pow(c(0.3, 0.2) * 5.0)).norm() < 1e-12);
    }
}
