//! Restriction of R(z) to semicyclic and cyclic modules: the curve conditions, the F^N exchange
//! relations, a nullspace intertwiner solver and Boltzmann-weight documents.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cone, czero, kron, max_abs, mpow, nullspace, CMat, TensorOperator};
use crate::qnum::QParam;
use crate::raffine::{affine_coproducts, eval_generators, r_spectral_on, SpectralOptions};
use crate::repspace::{truncated_verma, Rep, RepKind};
use crate::rfinite::cartan_diag;

/// Singular values at or below this fraction of the largest count as zero.
pub const NULLSPACE_THRESHOLD: f64 = 1e-8;

pub const BOLTZMANN_SCHEMA_VERSION: u32 = 1;

/// How Λ, the value standing for "λ^N" in the curve and exchange relations, is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaConvention {
    /// Λ = q^{Nλ}, the central value of K^N on the module.
    #[default]
    KPower,
    /// Λ = λ^N taken literally.
    RawPower,
}

impl LambdaConvention {
    pub fn big_lambda(self, lambda: C64, qp: &QParam) -> Result<C64> {
        let n = qp.require_root()? as f64;
        Ok(match self {
            LambdaConvention::KPower => qp.pow(lambda * n),
            LambdaConvention::RawPower => lambda.powf(n),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub nprime: u32,
    pub z: C64,
    pub lambda1: C64,
    pub lambda2: C64,
    pub alpha1: C64,
    pub alpha2: C64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<C64>,
}

impl CurveSpec {
    pub fn qparam(&self) -> Result<QParam> {
        QParam::root_of_unity(self.nprime)
    }

    /// The point whose second module is chosen on the curve through the first.
    pub fn on_curve(
        nprime: u32,
        z: C64,
        lambda1: C64,
        lambda2: C64,
        alpha1: C64,
        beta1: Option<C64>,
        convention: LambdaConvention,
    ) -> Result<CurveSpec> {
        let qp = QParam::root_of_unity(nprime)?;
        let l1 = nondegenerate(convention.big_lambda(lambda1, &qp)?)?;
        let l2 = nondegenerate(convention.big_lambda(lambda2, &qp)?)?;
        let alpha2 = alpha1 * (cone() - l2) / (cone() - l1);
        let beta2 = beta1.map(|b| b * (cone() - l2.inv()) / (cone() - l1.inv()));
        Ok(CurveSpec { nprime, z, lambda1, lambda2, alpha1, alpha2, beta1, beta2 })
    }

    pub fn rep1(&self) -> Result<Rep> {
        build_rep(self.beta1, self.alpha1, self.lambda1, &self.qparam()?)
    }

    pub fn rep2(&self) -> Result<Rep> {
        build_rep(self.beta2, self.alpha2, self.lambda2, &self.qparam()?)
    }
}

fn build_rep(beta: Option<C64>, alpha: C64, lambda: C64, qp: &QParam) -> Result<Rep> {
    match beta {
        Some(b) => crate::repspace::cyclic(b, alpha, lambda, qp),
        None => crate::repspace::semicyclic(alpha, lambda, qp),
    }
}

fn nondegenerate(big: C64) -> Result<C64> {
    if (big - cone()).norm() < 1e-12 {
        return Err(Error::UndefinedDenominator("Λ = 1 on the curve".into()));
    }
    Ok(big)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveResidual {
    pub r1: f64,
    pub r2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r3: Option<f64>,
}

impl CurveResidual {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3.unwrap_or(0.0))
    }
}

/// r1 = |α1/(1-Λ1) - α2/(1-Λ2)|, r2 = |z^N - 1|, r3 = |β1/(1-Λ1⁻¹) - β2/(1-Λ2⁻¹)|.
pub fn curve_residual(spec: &CurveSpec, convention: LambdaConvention) -> Result<CurveResidual> {
    let qp = spec.qparam()?;
    let n = qp.require_root()? as i32;
    let l1 = nondegenerate(convention.big_lambda(spec.lambda1, &qp)?)?;
    let l2 = nondegenerate(convention.big_lambda(spec.lambda2, &qp)?)?;
    let r1 = (spec.alpha1 / (cone() - l1) - spec.alpha2 / (cone() - l2)).norm();
    let r2 = (spec.z.powi(n) - cone()).norm();
    let r3 = match (spec.beta1, spec.beta2) {
        (Some(b1), Some(b2)) => Some((b1 / (cone() - l1.inv()) - b2 / (cone() - l2.inv())).norm()),
        _ => None,
    };
    Ok(CurveResidual { r1, r2, r3 })
}

fn semicyclic_alpha(rep: &Rep) -> Result<C64> {
    match rep.kind {
        RepKind::Semicyclic { alpha } => Ok(alpha),
        _ => Err(Error::InvalidParameter("semicyclic module required".into())),
    }
}

/// R(z) on V_{α1,λ1}⊗V_{α2,λ2}: R(z) of the Verma lifts (depth 2N) pushed down along
/// v_s ↦ α^{⌊s/N⌋} v_{s mod N}. On the curve the Verma-level R preserves the kernel of this map
/// and the result intertwines the semicyclic coproducts; off the curve it does not.
pub fn r_semicyclic(z: C64, sc1: &Rep, sc2: &Rep, opts: SpectralOptions) -> Result<TensorOperator> {
    let (a1, a2) = (semicyclic_alpha(sc1)?, semicyclic_alpha(sc2)?);
    if sc1.qp != sc2.qp {
        return Err(Error::QParamMismatch);
    }
    let qp = sc1.qp;
    let n = qp.require_root()? as usize;
    let lift1 = truncated_verma(sc1.lambda, 2 * n, &qp)?;
    let lift2 = truncated_verma(sc2.lambda, 2 * n, &qp)?;
    let big_d = 2 * n;
    let cols: Vec<usize> = (0..n).flat_map(|i| (0..n).map(move |j| i * big_d + j)).collect();
    let project = |w: C64| -> Result<CMat> {
        let big = r_spectral_on(w, &lift1, &lift2, opts, Some(&cols))?;
        let mut r = CMat::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let col = i * big_d + j;
                for s in 0..big_d {
                    for t in 0..big_d {
                        let v = big.matrix[(s * big_d + t, col)];
                        if v == czero() {
                            continue;
                        }
                        let w = a1.powi((s / n) as i32) * a2.powi((t / n) as i32);
                        r[((s % n) * n + t % n, i * n + j)] += v * w;
                    }
                }
            }
        }
        Ok(r)
    };
    match project(z) {
        Ok(r) => TensorOperator::new((n, n), r),
        Err(e @ Error::SingularDenominator { .. }) if opts.include_cartan_factor => {
            // The lift has a pole here (λ1 ± λ2 at special values) even though the restricted
            // intertwiner may exist; take it from the solver when it is unique.
            match intertwiner_nullspace(sc1, sc2, z, cone())? {
                IntertwinerSolution { matrix: Some(m), nullspace_dim: 1, .. } if m.matrix[(0, 0)].norm() > 1e-12 => {
                    // Same normalization as the lift: R(v0⊗v0) = q^{½λ1λ2} v0⊗v0.
                    let r = &m.matrix * (cartan_diag(sc1, sc2)[0] / m.matrix[(0, 0)]);
                    TensorOperator::new((n, n), r)
                }
                _ => Err(e),
            }
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnCommutationReport {
    /// |R(Λ2 F^N⊗1 + 1⊗F^N) - (Λ1 1⊗F^N + F^N⊗1)R|.
    pub first: f64,
    /// |R(x^N F^N⊗1 + y^N Λ1 1⊗F^N) - (y^N 1⊗F^N + x^N Λ2 F^N⊗1)R|.
    pub second: f64,
    /// x^N/y^N ≠ Λ1Λ2, so the two relations separate F^N⊗1 and 1⊗F^N.
    pub solvable: bool,
}

impl FnCommutationReport {
    pub fn max(&self) -> f64 {
        self.first.max(self.second)
    }
}

/// Exchange relations of R with the F^N-images for ρ_z⊗ρ_1.
pub fn fn_commutation_residual(
    z: C64,
    rep1: &Rep,
    rep2: &Rep,
    r: &TensorOperator,
    convention: LambdaConvention,
) -> Result<FnCommutationReport> {
    let qp = rep1.qp;
    let n = qp.require_root()? as usize;
    let (x, y) = (z, cone());
    let l1 = convention.big_lambda(rep1.lambda, &qp)?;
    let l2 = convention.big_lambda(rep2.lambda, &qp)?;
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let fa = kron(&mpow(&rep1.f, n), &CMat::identity(d2, d2));
    let fb = kron(&CMat::identity(d1, d1), &mpow(&rep2.f, n));
    let (xn, yn) = (x.powi(n as i32), y.powi(n as i32));
    let m = &r.matrix;
    let first = max_abs(&(m * (&fa * l2 + &fb) - (&fb * l1 + &fa) * m));
    let second = max_abs(&(m * (&fa * xn + &fb * (yn * l1)) - (&fb * yn + &fa * (xn * l2)) * m));
    let solvable = (xn / yn - l1 * l2).norm() > 1e-10 * (1.0 + (l1 * l2).norm());
    Ok(FnCommutationReport { first, second, solvable })
}

/// Intertwining residual of an operator for ρ_z⊗ρ_1 on honest modules.
pub fn semicyclic_intertwine_residual(z: C64, rep1: &Rep, rep2: &Rep, r: &TensorOperator) -> Result<f64> {
    crate::raffine::affine_residual_xy(r, rep1, rep2, z, cone(), 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntertwinerSolution {
    /// First nullspace vector, scaled so its largest entry is 1; None when the nullspace is empty.
    pub matrix: Option<TensorOperator>,
    pub nullspace_dim: usize,
    /// Smallest singular values, ascending (at most four).
    pub smallest_singular_values: Vec<f64>,
}

/// Nullspace of R ↦ RΔ(a) - Δ'(a)R for a ∈ {E0, F0, E1, F1} on ρ_x⊗ρ_y, with R restricted
/// to the entries allowed by Δ(K)-weight conservation.
pub fn intertwiner_nullspace(rep1: &Rep, rep2: &Rep, x: C64, y: C64) -> Result<IntertwinerSolution> {
    if rep1.qp != rep2.qp {
        return Err(Error::QParamMismatch);
    }
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let dim = d1 * d2;
    let g1 = eval_generators(rep1, x)?;
    let g2 = eval_generators(rep2, y)?;
    let weight: Vec<C64> =
        (0..d1).flat_map(|i| (0..d2).map(move |j| (i, j))).map(|(i, j)| rep1.k[(i, i)] * rep2.k[(j, j)]).collect();
    let mut unknowns = Vec::new();
    for row in 0..dim {
        for col in 0..dim {
            if (weight[row] - weight[col]).norm() <= 1e-9 * weight[col].norm() {
                unknowns.push((row, col));
            }
        }
    }
    let ops: Vec<(CMat, CMat)> = affine_coproducts(&g1, &g2)
        .into_iter()
        .filter(|(name, _, _)| !name.starts_with('K'))
        .map(|(_, d, dp)| (d, dp))
        .collect();
    let mut sys = CMat::zeros(ops.len() * dim * dim, unknowns.len());
    for (o, (d, dp)) in ops.iter().enumerate() {
        let base = o * dim * dim;
        for (u, &(r0, c0)) in unknowns.iter().enumerate() {
            // (RΔ)_{r0,c} picks up Δ_{c0,c}; (Δ'R)_{r,c0} picks up Δ'_{r,r0}.
            for c in 0..dim {
                sys[(base + r0 * dim + c, u)] += d[(c0, c)];
            }
            for r in 0..dim {
                sys[(base + r * dim + c0, u)] -= dp[(r, r0)];
            }
        }
    }
    let (basis, values) = nullspace(&sys, NULLSPACE_THRESHOLD);
    let mut smallest: Vec<f64> = values.iter().rev().take(4).copied().collect();
    smallest.sort_by(f64::total_cmp);
    let matrix = if basis.ncols() == 0 {
        None
    } else {
        let mut m = CMat::zeros(dim, dim);
        for (u, &(r, c)) in unknowns.iter().enumerate() {
            m[(r, c)] = basis[(u, 0)];
        }
        Some(TensorOperator::new((d1, d2), normalize_max(&m))?)
    };
    Ok(IntertwinerSolution { matrix, nullspace_dim: basis.ncols(), smallest_singular_values: smallest })
}

/// The intertwiner for ρ_x⊗ρ_y; `EmptyNullspace` when none exists.
pub fn solve_intertwiner(rep1: &Rep, rep2: &Rep, x: C64, y: C64) -> Result<(TensorOperator, usize)> {
    let sol = intertwiner_nullspace(rep1, rep2, x, y)?;
    match sol.matrix {
        Some(m) => Ok((m, sol.nullspace_dim)),
        None => Err(Error::EmptyNullspace),
    }
}

fn pivot(m: &CMat) -> usize {
    let top = max_abs(m);
    m.iter().position(|v| v.norm() >= top * (1.0 - 1e-9)).unwrap_or(0)
}

/// m divided by its first entry of (near-)maximal modulus.
pub fn normalize_max(m: &CMat) -> CMat {
    let p = m.iter().nth(pivot(m)).copied().unwrap_or(cone());
    if p == czero() {
        return m.clone();
    }
    m / p
}

/// max |a/a_p - b/b_p| with p the pivot of a: zero iff b is proportional to a.
pub fn proportionality_defect(a: &CMat, b: &CMat) -> f64 {
    let p = pivot(a);
    let (ap, bp) = (a.iter().nth(p).copied().unwrap_or(cone()), b.iter().nth(p).copied().unwrap_or(cone()));
    if bp.norm() == 0.0 {
        return f64::INFINITY;
    }
    max_abs(&(a / ap - b / bp))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannWeight {
    pub i: usize,
    pub j: usize,
    pub ip: usize,
    pub jp: usize,
    pub w: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannDocument {
    pub schema_version: u32,
    pub kind: String,
    pub meta: CurveSpec,
    pub dims: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_residual: Option<CurveResidual>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intertwine_residual: Option<f64>,
    /// Coefficient of v0⊗v0 in R(v0⊗v0).
    pub normalization: C64,
    /// W(i, j → i', j') for every pair of basis vectors, row-major in (i, j).
    pub weights: Vec<BoltzmannWeight>,
}

pub fn export_boltzmann(
    r: &TensorOperator,
    meta: &CurveSpec,
    curve_residual: Option<CurveResidual>,
    intertwine_residual: Option<f64>,
) -> BoltzmannDocument {
    let (d1, d2) = r.dims;
    let mut weights = Vec::with_capacity(d1 * d1 * d2 * d2);
    for i in 0..d1 {
        for j in 0..d2 {
            for ip in 0..d1 {
                for jp in 0..d2 {
                    weights.push(BoltzmannWeight { i, j, ip, jp, w: r.entry(i, j, ip, jp) });
                }
            }
        }
    }
    BoltzmannDocument {
        schema_version: BOLTZMANN_SCHEMA_VERSION,
        kind: "boltzmann-weights".into(),
        meta: *meta,
        dims: [d1, d2],
        curve_residual,
        intertwine_residual,
        normalization: r.entry(0, 0, 0, 0),
        weights,
    }
}

pub fn import_boltzmann(doc: &BoltzmannDocument) -> Result<TensorOperator> {
    if doc.schema_version != BOLTZMANN_SCHEMA_VERSION {
        return Err(Error::Format(format!("unsupported schema_version {}", doc.schema_version)));
    }
    let [d1, d2] = doc.dims;
    if doc.weights.len() != d1 * d1 * d2 * d2 {
        return Err(Error::Format(format!("expected {} weights, found {}", d1 * d1 * d2 * d2, doc.weights.len())));
    }
    let mut m = CMat::zeros(d1 * d2, d1 * d2);
    for w in &doc.weights {
        if w.i >= d1 || w.ip >= d1 || w.j >= d2 || w.jp >= d2 {
            return Err(Error::Format(format!("weight index ({}, {}, {}, {}) out of range", w.i, w.j, w.ip, w.jp)));
        }
        m[(w.ip * d2 + w.jp, w.i * d2 + w.j)] = w.w;
    }
    TensorOperator::new((d1, d2), m)
}

pub fn boltzmann_to_json(doc: &BoltzmannDocument) -> Result<String> {
    serde_json::to_string_pretty(doc).map_err(|e| Error::Format(e.to_string()))
}

pub fn boltzmann_from_json(s: &str) -> Result<BoltzmannDocument> {
    serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
}
