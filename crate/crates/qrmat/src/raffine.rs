//! Evaluation representations of affine U_q(sl2) and the spectral R-matrix R(z) = R⁺ R̄⁰ R⁻.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{comm, cone, czero, diag, embed_pair, kron, max_abs, max_abs_cols, mpow, pair_window, triple_window, CMat, TensorOperator};
use crate::qnum::{qpochhammer_truncated, QParam};
use crate::repspace::Rep;
use crate::rfinite::{cartan_diag, e_divided_power, joint_limit};

/// A module pulled back along ρ_x.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRep {
    pub rep: Rep,
    pub x: C64,
}

impl EvalRep {
    pub fn new(rep: Rep, x: C64) -> Result<Self> {
        check_x(x)?;
        Ok(EvalRep { rep, x })
    }

    pub fn generators(&self) -> AffineGenerators {
        eval_generators(&self.rep, self.x).expect("x checked at construction")
    }
}

fn check_x(x: C64) -> Result<()> {
    if x.norm() == 0.0 || !x.re.is_finite() || !x.im.is_finite() {
        return Err(Error::InvalidParameter("evaluation parameter must be nonzero and finite".into()));
    }
    Ok(())
}

/// Images of E_i, F_i, K_i (i = 0, 1) and the spectra of H_0, H_1.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineGenerators {
    pub e: [CMat; 2],
    pub f: [CMat; 2],
    pub k: [CMat; 2],
    pub h: [Vec<C64>; 2],
}

/// ρ_x(E_0) = E, ρ_x(F_0) = F, ρ_x(H_0) = H; ρ_x(E_1) = xF, ρ_x(F_1) = x⁻¹E, ρ_x(H_1) = -H.
pub fn eval_generators(rep: &Rep, x: C64) -> Result<AffineGenerators> {
    check_x(x)?;
    let h = rep.weights();
    Ok(AffineGenerators {
        e: [rep.e.clone(), &rep.f * x],
        f: [rep.f.clone(), &rep.e / x],
        k: [rep.k.clone(), rep.kinv()],
        h: [h.clone(), h.iter().map(|v| -v).collect()],
    })
}

fn diag_inverse(m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| if i == j { m[(i, i)].inv() } else { czero() })
}

/// (name, Δ(a), Δ'(a)) for the affine Chevalley generators.
pub fn affine_coproducts(g1: &AffineGenerators, g2: &AffineGenerators) -> Vec<(&'static str, CMat, CMat)> {
    let d1 = g1.e[0].nrows();
    let d2 = g2.e[0].nrows();
    let (i1, i2) = (CMat::identity(d1, d1), CMat::identity(d2, d2));
    let mut out = Vec::with_capacity(6);
    for i in 0..2 {
        let (k1i, k2i) = (diag_inverse(&g1.k[i]), diag_inverse(&g2.k[i]));
        let de = kron(&g1.e[i], &i2) + kron(&k1i, &g2.e[i]);
        let dep = kron(&i1, &g2.e[i]) + kron(&g1.e[i], &k2i);
        let df = kron(&g1.f[i], &g2.k[i]) + kron(&i1, &g2.f[i]);
        let dfp = kron(&g1.k[i], &g2.f[i]) + kron(&g1.f[i], &i2);
        let dk = kron(&g1.k[i], &g2.k[i]);
        let names = if i == 0 { ["E0", "F0", "K0"] } else { ["E1", "F1", "K1"] };
        out.push((names[0], de, dep));
        out.push((names[1], df, dfp));
        out.push((names[2], dk.clone(), dk));
    }
    out
}

/// max over affine generators of |R Δ(a) - Δ'(a) R| for ρ_x⊗ρ_y on the safe window.
pub fn affine_residual_xy(r: &TensorOperator, rep1: &Rep, rep2: &Rep, x: C64, y: C64, margin: usize) -> Result<f64> {
    let g1 = eval_generators(rep1, x)?;
    let g2 = eval_generators(rep2, y)?;
    let cols = pair_window(rep1.dim(), rep2.dim(), joint_limit(&[rep1, rep2]), margin);
    Ok(affine_coproducts(&g1, &g2)
        .iter()
        .map(|(_, d, dp)| max_abs_cols(&(&r.matrix * d - dp * &r.matrix), &cols))
        .fold(0.0, f64::max))
}

/// Images E_{α0+nδ}, F_{α0+nδ}, E_{α1+nδ}, F_{α1+nδ} for n = 0..=n_max.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRootImages {
    pub e_alpha0: Vec<CMat>,
    pub f_alpha0: Vec<CMat>,
    pub e_alpha1: Vec<CMat>,
    pub f_alpha1: Vec<CMat>,
}

pub fn eval_root_vectors(rep: &Rep, x: C64, n_max: usize) -> Result<RealRootImages> {
    check_x(x)?;
    let mut out = RealRootImages { e_alpha0: vec![], f_alpha0: vec![], e_alpha1: vec![], f_alpha1: vec![] };
    for n in 0..=n_max {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let xn = x.powi(n as i32) * sign;
        let nf = n as f64;
        out.e_alpha0.push(rep.qh(-nf) * &rep.e * xn);
        out.f_alpha0.push(&rep.f * rep.qh(nf) * (sign / x.powi(n as i32)));
        out.e_alpha1.push(&rep.f * rep.qh(-nf) * (xn * x));
        out.f_alpha1.push(rep.qh(nf) * &rep.e * (sign / x.powi(n as i32 + 1)));
    }
    Ok(out)
}

/// E'_{nδ}, E_{nδ} and their F mirrors for n = 1..=order (index n-1).
#[derive(Clone, Debug, PartialEq)]
pub struct ImaginaryRootImages {
    pub order: usize,
    pub eprime: Vec<CMat>,
    pub fprime: Vec<CMat>,
    pub e: Vec<CMat>,
    pub f: Vec<CMat>,
}

/// E'_{nδ} = ((-1)^{n-1}/[2]) xⁿ q^{-(n-1)H}(EF - q^{-2n}FE),
/// F'_{nδ} = ((-1)^{n-1}/[2]) x⁻ⁿ (EF - q^{2n}FE) q^{(n-1)H}.
pub fn eval_imaginary_prime(rep: &Rep, x: C64, n_max: usize) -> Result<ImaginaryRootImages> {
    check_x(x)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("imaginary root vectors start at n = 1".into()));
    }
    let qp = &rep.qp;
    let two = qp.qint(2);
    if two.norm() < 1e-12 {
        return Err(Error::UnsupportedOrder("[2]_q = 0".into()));
    }
    let ef = &rep.e * &rep.f;
    let fe = &rep.f * &rep.e;
    let mut eprime = Vec::with_capacity(n_max);
    let mut fprime = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let ni = n as i64;
        let pre_e = x.powi(n as i32) * sign / two;
        let pre_f = x.powi(-(n as i32)) * sign / two;
        eprime.push(rep.qh(-(n as f64 - 1.0)) * (&ef - &fe * qp.powi(-2 * ni)) * pre_e);
        fprime.push((&ef - &fe * qp.powi(2 * ni)) * rep.qh(n as f64 - 1.0) * pre_f);
    }
    Ok(ImaginaryRootImages { order: n_max, eprime, fprime, e: vec![], f: vec![] })
}

fn check_commuting(ms: &[CMat]) -> Result<()> {
    let scale = ms.iter().map(max_abs).fold(1.0, f64::max);
    for (a, ma) in ms.iter().enumerate() {
        for mb in &ms[a + 1..] {
            let r = max_abs(&comm(ma, mb));
            if r > 1e-10 * scale * scale {
                return Err(Error::NonCommuting(r));
            }
        }
    }
    Ok(())
}

/// Invert 1 + cP(z) = exp(cQ(z)) for commuting coefficients: nQ_n = nP_n - c Σ_{k<n} k Q_k P_{n-k}.
pub fn schur_log(p: &[CMat], c: C64) -> Vec<CMat> {
    let mut q: Vec<CMat> = Vec::with_capacity(p.len());
    for n in 1..=p.len() {
        let mut acc = &p[n - 1] * C64::new(n as f64, 0.0);
        for k in 1..n {
            acc -= &q[k - 1] * &p[n - k - 1] * (c * k as f64);
        }
        q.push(acc / C64::new(n as f64, 0.0));
    }
    q
}

/// Fill E_{nδ} (c = q²-q⁻²) and F_{nδ} (c = q⁻²-q²) from the primed images.
pub fn schur_to_imaginary(images: &ImaginaryRootImages, qp: &QParam) -> Result<ImaginaryRootImages> {
    check_commuting(&images.eprime)?;
    check_commuting(&images.fprime)?;
    let c = qp.powi(2) - qp.powi(-2);
    let mut out = images.clone();
    out.e = schur_log(&images.eprime, c);
    out.f = schur_log(&images.fprime, -c);
    Ok(out)
}

/// Images at x with the Schur conversion applied.
pub fn imaginary_root_vectors(rep: &Rep, x: C64, order: usize) -> Result<ImaginaryRootImages> {
    schur_to_imaginary(&eval_imaginary_prime(rep, x, order)?, &rep.qp)
}

/// Eigenvalues of K⁻¹⊗K on v_i⊗v_j.
fn kk_diag(rep1: &Rep, rep2: &Rep) -> Vec<C64> {
    let mut out = Vec::with_capacity(rep1.dim() * rep2.dim());
    for i in 0..rep1.dim() {
        for j in 0..rep2.dim() {
            out.push(rep2.k[(j, j)] / rep1.k[(i, i)]);
        }
    }
    out
}

/// Product of factors (1 - c z) over numerator and denominator lists.
#[derive(Clone, Debug, Default)]
struct Factors {
    num: Vec<C64>,
    den: Vec<C64>,
}

impl Factors {
    /// Value at z after cancelling equal factors; None on a surviving pole.
    fn eval(&self, z: C64) -> Option<C64> {
        self.eval_guarded(z, 1e-12)
    }

    /// None when a surviving denominator factor has modulus below `guard`.
    fn eval_guarded(&self, z: C64, guard: f64) -> Option<C64> {
        let mut num = self.num.clone();
        let mut den = Vec::with_capacity(self.den.len());
        for &d in &self.den {
            if let Some(pos) = num.iter().position(|&n| (n - d).norm() <= 1e-10 * (1.0 + d.norm())) {
                num.swap_remove(pos);
            } else {
                den.push(d);
            }
        }
        let mut v = cone();
        for d in den {
            let f = cone() - d * z;
            if f.norm() < guard {
                return None;
            }
            v /= f;
        }
        for n in num {
            v *= cone() - n * z;
        }
        Some(v)
    }
}

fn rzero_factors(rep1: &Rep, rep2: &Rep, i: usize, j: usize) -> Factors {
    let qp = &rep1.qp;
    let u = qp.pow(rep2.lambda - rep1.lambda);
    let b = qp.pow(rep1.lambda + rep2.lambda);
    let (ii, jj) = (i as i64, j as i64);
    let mut f = Factors::default();
    for l in (jj - ii + 1)..=jj {
        f.num.push(qp.powi(-2 * l) * u);
    }
    for l in (ii - jj + 1)..=ii {
        f.den.push(qp.powi(2 * l) * u);
    }
    for l in 0..jj {
        f.num.push(qp.powi(-2 * l) * b);
    }
    for l in 0..ii {
        f.den.push(qp.powi(2 * l) / b);
    }
    f
}

fn split(idx: usize, d2: usize) -> (usize, usize) {
    (idx / d2, idx % d2)
}

/// Diagonal R̄⁰(z): on v_i⊗v_j,
/// Π_{l=j-i+1}^{j}(1 - q^{-2l}uz)/Π_{l=i-j+1}^{i}(1 - q^{2l}uz) · Π_{l<j}(1 - q^{-2l}bz)/Π_{l<i}(1 - q^{2l}z/b),
/// u = q^{λ2-λ1}, b = q^{λ1+λ2}.
pub fn rzero_bar(z: C64, rep1: &Rep, rep2: &Rep) -> Result<TensorOperator> {
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let mut d = Vec::with_capacity(d1 * d2);
    for i in 0..d1 {
        for j in 0..d2 {
            d.push(rzero_factors(rep1, rep2, i, j).eval(z).ok_or(Error::SingularDenominator { i, j })?);
        }
    }
    TensorOperator::new((d1, d2), diag(&d))
}

fn plus_denominators(kk: C64, n: usize, qp: &QParam) -> Vec<C64> {
    (1..=n as i64).map(|k| qp.powi(-2 * k) * kk).collect()
}

/// Σ_n (q-q⁻¹)ⁿ (Eⁿ/(n)!⊗Fⁿ)·Π_{k=1}^{n}(1 - z q^{-2k} K⁻¹⊗K)⁻¹, diagonal acting first.
pub fn rplus_closed(z: C64, rep1: &Rep, rep2: &Rep) -> Result<TensorOperator> {
    let qp = rep1.qp;
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let kk = kk_diag(rep1, rep2);
    let mut r = CMat::zeros(d1 * d2, d1 * d2);
    for n in 0..d1.min(d2) {
        let block = kron(&e_divided_power(rep1, n)?, &mpow(&rep2.f, n)) * qp.q_minus_qinv().powi(n as i32);
        for col in 0..d1 * d2 {
            if block.column(col).iter().all(|v| v.norm() == 0.0) {
                continue;
            }
            let f = Factors { num: vec![], den: plus_denominators(kk[col], n, &qp) };
            let (i, j) = split(col, d2);
            let w = f.eval(z).ok_or(Error::SingularDenominator { i, j })?;
            let scaled = block.column(col) * w;
            let mut target = r.column_mut(col);
            target += scaled;
        }
    }
    TensorOperator::new((d1, d2), r)
}

/// Σ_n zⁿ(q-q⁻¹)ⁿ Π_{k=1}^{n}(1 - z q^{-2k} K⁻¹⊗K)⁻¹·(Fⁿ⊗Eⁿ/(n)!), diagonal acting last.
pub fn rminus_closed(z: C64, rep1: &Rep, rep2: &Rep) -> Result<TensorOperator> {
    let qp = rep1.qp;
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let kk = kk_diag(rep1, rep2);
    let mut r = CMat::zeros(d1 * d2, d1 * d2);
    for n in 0..d1.min(d2) {
        let block = kron(&mpow(&rep1.f, n), &e_divided_power(rep2, n)?) * (qp.q_minus_qinv() * z).powi(n as i32);
        for row in 0..d1 * d2 {
            if block.row(row).iter().all(|v| v.norm() == 0.0) {
                continue;
            }
            let f = Factors { num: vec![], den: plus_denominators(kk[row], n, &qp) };
            let (i, j) = split(row, d2);
            let w = f.eval(z).ok_or(Error::SingularDenominator { i, j })?;
            let scaled = block.row(row) * w;
            let mut target = r.row_mut(row);
            target += scaled;
        }
    }
    TensorOperator::new((d1, d2), r)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Multiply by q^{½H⊗H} on the right.
    pub include_cartan_factor: bool,
}

impl SpectralOptions {
    pub fn with_cartan() -> Self {
        SpectralOptions { include_cartan_factor: true }
    }
}

fn column_nonzeros(m: &CMat) -> Vec<Vec<(usize, C64)>> {
    (0..m.ncols())
        .map(|c| m.column(c).iter().enumerate().filter(|(_, v)| v.norm() != 0.0).map(|(r, v)| (r, *v)).collect())
        .collect()
}

/// R(z) = R⁺(z) R̄⁰(z) R⁻(z), optionally times q^{½H⊗H}.
///
/// The diagonal parts meeting on one intermediate vector are combined and cancelled first.
/// A pole that survives is either removable through cancellation between terms, in which
/// case the value is the mean over a small circle around z, or a genuine pole of R(z),
/// detected through the residue on that circle and reported as `SingularDenominator`.
pub fn r_spectral(z: C64, rep1: &Rep, rep2: &Rep, opts: SpectralOptions) -> Result<TensorOperator> {
    r_spectral_on(z, rep1, rep2, opts, None)
}

/// As `r_spectral`, computing only the listed columns (the rest stay zero).
pub(crate) fn r_spectral_on(
    z: C64,
    rep1: &Rep,
    rep2: &Rep,
    opts: SpectralOptions,
    cols: Option<&[usize]>,
) -> Result<TensorOperator> {
    if rep1.qp != rep2.qp {
        return Err(Error::QParamMismatch);
    }
    match r_spectral_direct(z, rep1, rep2, opts, NEAR_POLE, cols) {
        Err(Error::SingularDenominator { i, j }) => {
            let dim = rep1.dim() * rep2.dim();
            match removable_mean(z, dim, |w| Ok(r_spectral_direct(w, rep1, rep2, opts, 1e-12, cols)?.matrix))? {
                Some(mean) => TensorOperator::new((rep1.dim(), rep2.dim()), mean),
                None => r_spectral_direct(z, rep1, rep2, opts, 1e-12, cols).map_err(|_| Error::SingularDenominator { i, j }),
            }
        }
        other => other,
    }
}

/// Mean of `f` over a 16-point circle of radius 1e-2·max(1, |z|), or None when the Laurent
/// coefficients c₋₁..c₋₄ seen on that circle show a genuine pole.
fn removable_mean<F>(z: C64, dim: usize, f: F) -> Result<Option<CMat>>
where
    F: Fn(C64) -> Result<CMat>,
{
    const POINTS: usize = 16;
    const ORDERS: usize = 4;
    let rho = 1e-2 * z.norm().max(1.0);
    let mut mean = CMat::zeros(dim, dim);
    let mut polar = vec![CMat::zeros(dim, dim); ORDERS];
    for k in 0..POINTS {
        let u = C64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / POINTS as f64);
        let r = f(z + u * rho)?;
        for (m, acc) in polar.iter_mut().enumerate() {
            *acc += &r * u.powi(m as i32 + 1);
        }
        mean += r;
    }
    mean /= C64::new(POINTS as f64, 0.0);
    let scale = 1e-9 * (1.0 + max_abs(&mean)) * POINTS as f64;
    Ok(polar.iter().all(|p| max_abs(p) <= scale).then_some(mean))
}

/// Below this modulus of an uncancelled factor the direct sum loses too many digits.
const NEAR_POLE: f64 = 1e-3;

fn r_spectral_direct(
    z: C64,
    rep1: &Rep,
    rep2: &Rep,
    opts: SpectralOptions,
    guard: f64,
    cols: Option<&[usize]>,
) -> Result<TensorOperator> {
    let qp = rep1.qp;
    let (d1, d2) = (rep1.dim(), rep2.dim());
    let dim = d1 * d2;
    let kk = kk_diag(rep1, rep2);
    let nmax = d1.min(d2);
    let qd = qp.q_minus_qinv();
    let mut plus = Vec::with_capacity(nmax);
    let mut minus = Vec::with_capacity(nmax);
    for n in 0..nmax {
        let p = kron(&e_divided_power(rep1, n)?, &mpow(&rep2.f, n)) * qd.powi(n as i32);
        let m = kron(&mpow(&rep1.f, n), &e_divided_power(rep2, n)?) * (qd * z).powi(n as i32);
        plus.push(column_nonzeros(&p));
        minus.push(column_nonzeros(&m));
    }
    let rzero: Vec<Factors> = (0..dim).map(|idx| {
        let (i, j) = split(idx, d2);
        rzero_factors(rep1, rep2, i, j)
    }).collect();
    let cart = if opts.include_cartan_factor { cartan_diag(rep1, rep2) } else { vec![cone(); dim] };
    let mut r = CMat::zeros(dim, dim);
    let all: Vec<usize> = (0..dim).collect();
    for &col in cols.unwrap_or(&all) {
        for (m, mcols) in minus.iter().enumerate() {
            for &(mid, bval) in &mcols[col] {
                for (n, pcols) in plus.iter().enumerate() {
                    if pcols[mid].is_empty() {
                        continue;
                    }
                    let mut f = rzero[mid].clone();
                    f.den.extend(plus_denominators(kk[mid], n, &qp));
                    f.den.extend(plus_denominators(kk[mid], m, &qp));
                    let (i, j) = split(mid, d2);
                    let w = f.eval_guarded(z, guard).ok_or(Error::SingularDenominator { i, j })?;
                    for &(row, aval) in &pcols[mid] {
                        r[(row, col)] += aval * w * bval * cart[col];
                    }
                }
            }
        }
    }
    TensorOperator::new((d1, d2), r)
}

fn check_pochhammer_base(qp: &QParam) -> Result<C64> {
    if qp.is_root() {
        return Err(Error::Divergent("the scalar factor is singular at a root of unity".into()));
    }
    let base = qp.powi(-4);
    if base.norm() >= 1.0 {
        return Err(Error::Divergent(format!("|q⁻⁴| = {} >= 1", base.norm())));
    }
    Ok(base)
}

/// f(z) = (zq^{λ1-λ2-2}; q⁻⁴)_∞ (zq^{λ2-λ1-2}; q⁻⁴)_∞ / ((zq^{λ1+λ2-2}; q⁻⁴)_∞ (zq^{-λ1-λ2-2}; q⁻⁴)_∞),
/// each product cut at `terms` factors.
pub fn f_scalar(z: C64, lambda1: C64, lambda2: C64, qp: &QParam, terms: usize) -> Result<C64> {
    let base = check_pochhammer_base(qp)?;
    let p = |e: C64| qpochhammer_truncated(z * qp.pow(e), base, terms);
    let den = p(lambda1 + lambda2 - 2.0) * p(-lambda1 - lambda2 - 2.0);
    if den.norm() < 1e-300 {
        return Err(Error::Divergent("zero denominator in the scalar factor".into()));
    }
    Ok(p(lambda1 - lambda2 - 2.0) * p(lambda2 - lambda1 - 2.0) / den)
}

/// exp Σ_{n=1}^{terms} (q-q⁻¹)[nλ1][nλ2]/[2n]·zⁿ/n.
pub fn f_scalar_exp(z: C64, lambda1: C64, lambda2: C64, qp: &QParam, terms: usize) -> Result<C64> {
    check_pochhammer_base(qp)?;
    let mut s = czero();
    for n in 1..=terms {
        let nf = n as f64;
        let t = qp.q_minus_qinv() * qp.qint_c(lambda1 * nf) * qp.qint_c(lambda2 * nf) / qp.qint(2 * n as i64)
            * z.powi(n as i32)
            / nf;
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::Divergent(format!("term {n} overflowed")));
        }
        s += t;
    }
    Ok(s.exp())
}

/// |R12(x1/x2) R13(x1/x3) R23(x2/x3) - R23 R13 R12| on the safe window.
pub fn spectral_ybe_residual(xs: [C64; 3], reps: [&Rep; 3], opts: SpectralOptions) -> Result<f64> {
    for &x in &xs {
        check_x(x)?;
    }
    let dims = [reps[0].dim(), reps[1].dim(), reps[2].dim()];
    let r = |a: usize, b: usize| -> Result<CMat> {
        Ok(embed_pair(&r_spectral(xs[a] / xs[b], reps[a], reps[b], opts)?.matrix, dims, a, b))
    };
    let (r12, r13, r23) = (r(0, 1)?, r(0, 2)?, r(1, 2)?);
    let cols = triple_window(dims, joint_limit(&reps), 0);
    Ok(max_abs_cols(&(&r12 * &r13 * &r23 - &r23 * &r13 * &r12), &cols))
}

/// Intertwining residual of R(z) for ρ_z⊗ρ_1 over all affine generators.
pub fn affine_intertwine_residual(z: C64, rep1: &Rep, rep2: &Rep, opts: SpectralOptions) -> Result<f64> {
    let r = r_spectral(z, rep1, rep2, opts)?;
    affine_residual_xy(&r, rep1, rep2, z, cone(), 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineCentralEntry {
    pub k: usize,
    pub e_residual: f64,
    pub f_residual: f64,
}

/// |[ρ_x(E_{kNδ}), g]| and |[ρ_x(F_{kNδ}), g]| over g ∈ {E, F, K}, k = 1..=k_max.
pub fn central_affine_check(rep: &Rep, x: C64, k_max: usize) -> Result<Vec<AffineCentralEntry>> {
    let n = rep.qp.require_root()? as usize;
    if k_max == 0 || k_max * n > 64 {
        return Err(Error::OrderLimit(format!("k_max·N = {} outside 1..=64", k_max * n)));
    }
    let im = imaginary_root_vectors(rep, x, k_max * n)?;
    Ok((1..=k_max)
        .map(|k| {
            let res = |m: &CMat| imaginary_commutator_residual(rep, m);
            AffineCentralEntry { k, e_residual: res(&im.e[k * n - 1]), f_residual: res(&im.f[k * n - 1]) }
        })
        .collect())
}

/// max over g ∈ {E, F, K} of |[m, g]| on the module's trusted columns.
pub fn imaginary_commutator_residual(rep: &Rep, m: &CMat) -> f64 {
    let cols = rep.safe_columns(3);
    [&rep.e, &rep.f, &rep.k].iter().map(|g| max_abs_cols(&comm(m, g), &cols)).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrinfeldRelation {
    /// [a_m, a_n] = 0.
    ACommute,
    /// k x±_m k⁻¹ = q^{±2} x±_m.
    KConjugation,
    /// [a_m, x±_n] = ±([2m]/m) x±_{m+n}.
    AxCommutator,
    /// x±_{m+1}x±_n - q^{±2}x±_n x±_{m+1} = q^{±2}x±_m x±_{n+1} - x±_{n+1}x±_m.
    Exchange,
    /// [x⁺_m, x⁻_n] = (ψ_{m+n} - φ_{m+n})/(q - q⁻¹).
    PlusMinus,
    /// Σ ψ_m z^{-m} = k exp((q-q⁻¹) Σ a_m z^{-m}) and its φ mirror.
    Generating,
}

impl DrinfeldRelation {
    pub const ALL: [DrinfeldRelation; 6] = [
        DrinfeldRelation::ACommute,
        DrinfeldRelation::KConjugation,
        DrinfeldRelation::AxCommutator,
        DrinfeldRelation::Exchange,
        DrinfeldRelation::PlusMinus,
        DrinfeldRelation::Generating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DrinfeldRelation::ACommute => "a-commute",
            DrinfeldRelation::KConjugation => "k-conjugation",
            DrinfeldRelation::AxCommutator => "a-x-commutator",
            DrinfeldRelation::Exchange => "exchange",
            DrinfeldRelation::PlusMinus => "plus-minus",
            DrinfeldRelation::Generating => "generating",
        }
    }
}

/// Drinfeld generators in an evaluation module, read off the real and imaginary root vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DrinfeldImages {
    pub xp: BTreeMap<i64, CMat>,
    pub xm: BTreeMap<i64, CMat>,
    pub a: BTreeMap<i64, CMat>,
    /// ψ_m for m >= 0 and φ_m for m <= 0.
    pub psi: BTreeMap<i64, CMat>,
    pub phi: BTreeMap<i64, CMat>,
    pub k: CMat,
    pub kinv: CMat,
}

/// With c = 0 and k = ρ_x(K_1):
/// x⁺_n = (-1)ⁿq^{2n}E_{α1+nδ}, x⁻_{n+1} = (-1)ⁿq^{2n}E_{α0+nδ}k, a_n = (-1)ⁿq^{2n}[2]E_{nδ},
/// ψ_n = (-1)ⁿq^{2n}(q²-q⁻²)E'_{nδ}k, and the negative modes as ι-images.
pub fn drinfeld_images(rep: &Rep, x: C64, order: usize) -> Result<DrinfeldImages> {
    let qp = rep.qp;
    let real = eval_root_vectors(rep, x, order)?;
    let im = imaginary_root_vectors(rep, x, order)?;
    let k = rep.kinv();
    let kinv = rep.k.clone();
    let two = qp.qint(2);
    let c = qp.powi(2) - qp.powi(-2);
    let sgn = |n: usize| if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = DrinfeldImages {
        xp: BTreeMap::new(),
        xm: BTreeMap::new(),
        a: BTreeMap::new(),
        psi: BTreeMap::new(),
        phi: BTreeMap::new(),
        k: k.clone(),
        kinv: kinv.clone(),
    };
    for n in 0..=order {
        let ni = n as i64;
        let up = qp.powi(2 * ni) * sgn(n);
        let down = qp.powi(-2 * ni) * sgn(n);
        out.xp.insert(ni, &real.e_alpha1[n] * up);
        out.xm.insert(-ni, &real.f_alpha1[n] * down);
        if n < order {
            out.xm.insert(ni + 1, &real.e_alpha0[n] * &k * up);
            out.xp.insert(-ni - 1, &kinv * &real.f_alpha0[n] * down);
        }
        if n >= 1 {
            out.a.insert(ni, &im.e[n - 1] * (up * two));
            out.a.insert(-ni, &im.f[n - 1] * (down * two));
            out.psi.insert(ni, &im.eprime[n - 1] * &k * (up * c));
            out.phi.insert(-ni, &kinv * &im.fprime[n - 1] * (down * -c));
        }
    }
    out.psi.insert(0, k);
    out.phi.insert(0, kinv);
    Ok(out)
}

/// Residuals of the selected relations at c = 0 on the module's trusted columns.
pub fn drinfeld_relation_check(rep: &Rep, x: C64, selection: &[DrinfeldRelation]) -> Result<Vec<(String, f64)>> {
    let order = 4;
    let d = drinfeld_images(rep, x, order)?;
    let qp = rep.qp;
    let cols = rep.safe_columns(3);
    let res = |m: CMat| max_abs_cols(&m, &cols);
    let q2 = qp.powi(2);
    let zero = CMat::zeros(rep.dim(), rep.dim());
    let mut out = Vec::new();
    for &rel in selection {
        let mut worst: f64 = 0.0;
        match rel {
            DrinfeldRelation::ACommute => {
                for m in [-2i64, -1, 1, 2] {
                    for n in [-2i64, -1, 1, 2] {
                        worst = worst.max(res(comm(&d.a[&m], &d.a[&n])));
                    }
                }
            }
            DrinfeldRelation::KConjugation => {
                for m in -2i64..=2 {
                    worst = worst.max(res(&d.k * &d.xp[&m] * &d.kinv - &d.xp[&m] * q2));
                    worst = worst.max(res(&d.k * &d.xm[&m] * &d.kinv - &d.xm[&m] / q2));
                }
            }
            DrinfeldRelation::AxCommutator => {
                for m in [-1i64, 1, 2] {
                    let coef = qp.qint(2 * m) / m as f64;
                    for n in -1i64..=1 {
                        worst = worst.max(res(comm(&d.a[&m], &d.xp[&n]) - &d.xp[&(m + n)] * coef));
                        worst = worst.max(res(comm(&d.a[&m], &d.xm[&n]) + &d.xm[&(m + n)] * coef));
                    }
                }
            }
            DrinfeldRelation::Exchange => {
                for (xs, s) in [(&d.xp, q2), (&d.xm, q2.inv())] {
                    for m in -1i64..=1 {
                        for n in -1i64..=1 {
                            let lhs = &xs[&(m + 1)] * &xs[&n] - &xs[&n] * &xs[&(m + 1)] * s;
                            let rhs = &xs[&m] * &xs[&(n + 1)] * s - &xs[&(n + 1)] * &xs[&m];
                            worst = worst.max(res(lhs - rhs));
                        }
                    }
                }
            }
            DrinfeldRelation::PlusMinus => {
                for m in -1i64..=2 {
                    for n in -2i64..=1 {
                        let s = m + n;
                        let psi = d.psi.get(&s).unwrap_or(&zero);
                        let phi = d.phi.get(&s).unwrap_or(&zero);
                        let rhs = (psi - phi) / qp.q_minus_qinv();
                        worst = worst.max(res(comm(&d.xp[&m], &d.xm[&n]) - rhs));
                    }
                }
            }
            DrinfeldRelation::Generating => {
                // Coefficients of k exp((q-q⁻¹)Σ a_m w^m) via the same recursion as the Schur map.
                let a_pos: Vec<CMat> = (1..=order as i64).map(|m| &d.a[&m] * qp.q_minus_qinv()).collect();
                let a_neg: Vec<CMat> = (1..=order as i64).map(|m| &d.a[&-m] * -qp.q_minus_qinv()).collect();
                let psi = exp_series(&a_pos);
                let phi = exp_series(&a_neg);
                for m in 1..=order {
                    worst = worst.max(res(&d.k * &psi[m] - &d.psi[&(m as i64)]));
                    worst = worst.max(res(&d.kinv * &phi[m] - &d.phi[&-(m as i64)]));
                }
            }
        }
        out.push((rel.name().to_string(), worst));
    }
    Ok(out)
}

/// Coefficients 0..=len of exp(Σ_{m≥1} s_m w^m) for commuting s_m.
fn exp_series(s: &[CMat]) -> Vec<CMat> {
    let d = s[0].nrows();
    let mut e = vec![CMat::identity(d, d)];
    for n in 1..=s.len() {
        let mut acc = CMat::zeros(d, d);
        for k in 1..=n {
            acc += &s[k - 1] * &e[n - k] * C64::new(k as f64, 0.0);
        }
        e.push(acc / C64::new(n as f64, 0.0));
    }
    e
}

/// The module weight of v_i⊗v_j under K⊗K, for block-structure checks.
pub fn total_weight_diag(rep1: &Rep, rep2: &Rep) -> Vec<C64> {
    let mut out = Vec::new();
    for i in 0..rep1.dim() {
        for j in 0..rep2.dim() {
            out.push(rep1.k[(i, i)] * rep2.k[(j, j)]);
        }
    }
    out
}
