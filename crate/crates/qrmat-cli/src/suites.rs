//! Verification suites behind `qrmat verify`.

use clap::ValueEnum;
use num_complex::Complex64 as C64;
use qrmat::cpotts::{
    curve_residual, fn_commutation_residual, r_semicyclic, semicyclic_intertwine_residual, CurveSpec, LambdaConvention,
};
use qrmat::linalg::{max_abs, max_abs_cols, pair_window, CMat};
use qrmat::oracle::{rminus_product, rplus_product, rzero_exponential, schur_forward};
use qrmat::qnum::QParam;
use qrmat::raffine::{
    affine_intertwine_residual, central_affine_check, drinfeld_relation_check, f_scalar, imaginary_commutator_residual,
    imaginary_root_vectors, rminus_closed, rplus_closed, rzero_bar, spectral_ybe_residual, DrinfeldRelation,
    SpectralOptions,
};
use qrmat::report::{CheckRecord, Report};
use qrmat::repspace::{central_check, semicyclic, truncated_verma, Rep};
use qrmat::rfinite::{
    intertwine_residual, joint_limit, quasitriangularity_residual, r_reshetikhin_product, r_verma_direct,
    ybe_residual, ReshetikhinCoefficient,
};
use qrmat::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::params::{draw_disc, draw_lambda, draw_phase, tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Ybe,
    Intertwine,
    Quasi,
    Central,
    Drinfeld,
    Curve,
    SchurOracle,
    ProductOracle,
    Coincidence,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Ybe => "ybe",
            Suite::Intertwine => "intertwine",
            Suite::Quasi => "quasi",
            Suite::Central => "central",
            Suite::Drinfeld => "drinfeld",
            Suite::Curve => "curve",
            Suite::SchurOracle => "schur-oracle",
            Suite::ProductOracle => "product-oracle",
            Suite::Coincidence => "coincidence",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum CurveSweep {
    OnCurve,
    OffCurve,
    #[default]
    Both,
}

pub struct SuiteArgs {
    pub qp: Option<QParam>,
    pub depths: Option<Vec<usize>>,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub sweep: CurveSweep,
    pub count: Option<usize>,
}

struct Ctx<'a> {
    args: &'a SuiteArgs,
    qp: QParam,
    rng: ChaCha8Rng,
}

impl Ctx<'_> {
    fn tol(&self, default: f64) -> Result<f64> {
        tolerance(self.args.tolerance, default)
    }

    fn depths(&self, want: usize, default: usize) -> Result<Vec<usize>> {
        match &self.args.depths {
            None => Ok(vec![default; want]),
            Some(d) if d.len() == want => Ok(d.clone()),
            Some(d) if d.len() == 1 => Ok(vec![d[0]; want]),
            Some(d) => Err(Error::InvalidParameter(format!("suite needs {want} depths, got {}", d.len()))),
        }
    }

    fn root_order(&self, suite: Suite) -> Result<usize> {
        self.qp
            .order()
            .map(|n| n as usize)
            .ok_or_else(|| Error::InvalidParameter(format!("suite {} runs at a root of unity (--Nprime)", suite.name())))
    }

    fn require_generic(&self, suite: Suite) -> Result<()> {
        if self.qp.is_root() {
            return Err(Error::InvalidParameter(format!("suite {} runs at generic q (--q)", suite.name())));
        }
        Ok(())
    }

    fn verma(&mut self, depth: usize) -> Result<Rep> {
        let l = draw_lambda(&mut self.rng);
        truncated_verma(l, depth, &self.qp)
    }
}

fn default_q(suite: Suite) -> Result<QParam> {
    match suite {
        Suite::Ybe | Suite::Central | Suite::Curve | Suite::Coincidence => QParam::root_of_unity(3),
        Suite::ProductOracle => QParam::generic(C64::new(1.05, 0.02)),
        _ => QParam::generic(C64::new(1.2, 0.1)),
    }
}

pub fn run(suite: Suite, args: &SuiteArgs) -> Result<Report> {
    let qp = match args.qp {
        Some(qp) => qp,
        None => default_q(suite)?,
    };
    let mut ctx = Ctx { args, qp, rng: ChaCha8Rng::seed_from_u64(args.seed) };
    let records = match suite {
        Suite::Ybe => ybe(&mut ctx),
        Suite::Intertwine => intertwine(&mut ctx),
        Suite::Quasi => quasi(&mut ctx),
        Suite::Central => central(&mut ctx),
        Suite::Drinfeld => drinfeld(&mut ctx),
        Suite::Curve => curve(&mut ctx),
        Suite::SchurOracle => schur(&mut ctx),
        Suite::ProductOracle => products(&mut ctx),
        Suite::Coincidence => coincidence(&mut ctx),
    }?;
    Ok(Report::new(suite.name(), Some(args.seed), records))
}

fn lambdas(reps: &[&Rep]) -> Vec<C64> {
    reps.iter().map(|r| r.lambda).collect()
}

fn ybe(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    let root = ctx.qp.order().map(|n| n as usize);
    let depths = ctx.depths(3, root.unwrap_or(3))?;
    let tol = ctx.tol(if root.is_some() { 1e-7 } else { 1e-8 })?;
    let mut out = Vec::new();
    for trial in 0..3 {
        let reps = [ctx.verma(depths[0])?, ctx.verma(depths[1])?, ctx.verma(depths[2])?];
        let refs = [&reps[0], &reps[1], &reps[2]];
        let finite = ybe_residual(refs, r_verma_direct, 0)?;
        out.push(CheckRecord::hold("finite-ybe", finite, tol).param("trial", trial).param("lambda", lambdas(&refs)));
        let xs = if root.is_some() {
            [draw_phase(&mut ctx.rng), draw_phase(&mut ctx.rng), draw_phase(&mut ctx.rng)]
        } else {
            [C64::new(1.0, 0.0), C64::new(0.7, 0.0), C64::new(0.3, 0.0)]
        };
        let spectral = spectral_ybe_residual(xs, refs, SpectralOptions::with_cartan())?;
        out.push(
            CheckRecord::hold("spectral-ybe", spectral, tol)
                .param("trial", trial)
                .param("lambda", lambdas(&refs))
                .param("x", xs),
        );
    }
    Ok(out)
}

fn intertwine(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    let root = ctx.qp.order().map(|n| n as usize);
    let depths = ctx.depths(2, root.unwrap_or(3))?;
    let tol = ctx.tol(if root.is_some() { 1e-7 } else { 1e-8 })?;
    let mut out = Vec::new();
    for trial in 0..3 {
        let (a, b) = (ctx.verma(depths[0])?, ctx.verma(depths[1])?);
        let r = r_verma_direct(&a, &b)?;
        let finite = intertwine_residual(&r, &a, &b, 1)?;
        out.push(CheckRecord::hold("finite-intertwine", finite, tol).param("trial", trial).param("lambda", lambdas(&[&a, &b])));
        let z = if root.is_some() { draw_phase(&mut ctx.rng) } else { draw_disc(&mut ctx.rng, 0.5) };
        let affine = affine_intertwine_residual(z, &a, &b, SpectralOptions::with_cartan())?;
        out.push(
            CheckRecord::hold("affine-intertwine", affine, tol)
                .param("trial", trial)
                .param("lambda", lambdas(&[&a, &b]))
                .param("z", z),
        );
    }
    Ok(out)
}

fn quasi(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    ctx.require_generic(Suite::Quasi)?;
    let depths = ctx.depths(3, 3)?;
    let tol = ctx.tol(1e-9)?;
    let mut out = Vec::new();
    for trial in 0..2 {
        let reps = [ctx.verma(depths[0])?, ctx.verma(depths[1])?, ctx.verma(depths[2])?];
        let (left, right) = quasitriangularity_residual(&reps[0], &reps[1], &reps[2])?;
        let l = lambdas(&[&reps[0], &reps[1], &reps[2]]);
        out.push(CheckRecord::hold("quasi-delta-left", left, tol).param("trial", trial).param("lambda", &l));
        out.push(CheckRecord::hold("quasi-delta-right", right, tol).param("trial", trial).param("lambda", &l));
    }
    Ok(out)
}

fn central(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    let n = ctx.root_order(Suite::Central)?;
    let tol = ctx.tol(1e-8)?;
    let mut out = Vec::new();
    for trial in 0..3 {
        let alpha = draw_disc(&mut ctx.rng, 1.0);
        let lambda = draw_lambda(&mut ctx.rng);
        let rep = semicyclic(alpha, lambda, &ctx.qp)?;
        for entry in central_check(&rep)?.entries {
            out.push(
                CheckRecord::hold(format!("central-{}", entry.name), entry.residual, tol)
                    .param("trial", trial)
                    .param("alpha", alpha)
                    .param("lambda", lambda),
            );
        }
        let x = draw_phase(&mut ctx.rng) * ctx.rng.gen_range(0.6..1.4);
        for entry in central_affine_check(&rep, x, 1)? {
            out.push(CheckRecord::hold("central-E_N_delta", entry.e_residual, tol).param("trial", trial).param("x", x));
            out.push(CheckRecord::hold("central-F_N_delta", entry.f_residual, tol).param("trial", trial).param("x", x));
        }
        if n > 1 {
            let im = imaginary_root_vectors(&rep, x, 1)?;
            let res = imaginary_commutator_residual(&rep, &im.e[0]);
            out.push(CheckRecord::detect("noncentral-E_delta", res, tol).param("trial", trial).param("x", x));
        }
    }
    Ok(out)
}

fn drinfeld(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    let depth = ctx.depths(1, 4)?[0];
    let tol = ctx.tol(1e-8)?;
    let rep = truncated_verma(C64::new(depth as f64 - 1.0, 0.0), depth, &ctx.qp)?;
    let mut out = Vec::new();
    for trial in 0..2 {
        let x = draw_phase(&mut ctx.rng) * ctx.rng.gen_range(0.6..1.2);
        for (name, residual) in drinfeld_relation_check(&rep, x, &DrinfeldRelation::ALL)? {
            out.push(
                CheckRecord::hold(format!("drinfeld-{name}"), residual, tol)
                    .param("trial", trial)
                    .param("x", x)
                    .param("depth", depth),
            );
        }
    }
    Ok(out)
}

fn curve(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    let n = ctx.root_order(Suite::Curve)?;
    let nprime = ctx.qp.nprime().expect("root of unity");
    let count = ctx.args.count.unwrap_or(50);
    let (tol_curve, tol_int, tol_fn) = (ctx.tol(1e-8)?, ctx.tol(1e-6)?, ctx.tol(1e-7)?);
    let conv = LambdaConvention::KPower;
    let opts = SpectralOptions::with_cartan();
    let mut out = Vec::new();
    let modes: &[bool] = match ctx.args.sweep {
        CurveSweep::OnCurve => &[true],
        CurveSweep::OffCurve => &[false],
        CurveSweep::Both => &[true, false],
    };
    for &on in modes {
        for draw in 0..count {
            let (l1, l2) = (draw_lambda(&mut ctx.rng), draw_lambda(&mut ctx.rng));
            let alpha1 = draw_disc(&mut ctx.rng, 1.0);
            let k = ctx.rng.gen_range(0..n) as i64;
            let z = ctx.qp.powi(2 * k);
            let mut spec = CurveSpec::on_curve(nprime, z, l1, l2, alpha1, None, conv)?;
            if !on {
                let scale = (C64::new(1.0, 0.0) - conv.big_lambda(l2, &ctx.qp)?).norm();
                spec.alpha2 += draw_phase(&mut ctx.rng) * (scale * ctx.rng.gen_range(0.1..1.0));
            }
            let (a, b) = (spec.rep1()?, spec.rep2()?);
            let cr = curve_residual(&spec, conv)?;
            let r = r_semicyclic(z, &a, &b, opts)?;
            let res = semicyclic_intertwine_residual(z, &a, &b, &r)?;
            let tag = if on { "on-curve" } else { "off-curve" };
            let rec = |check: &str, residual: f64, tol: f64, hold: bool| {
                let r = if hold { CheckRecord::hold(check, residual, tol) } else { CheckRecord::detect(check, residual, tol) };
                r.param("draw", draw).param("sweep", tag).param("spec", spec)
            };
            if on {
                out.push(rec("curve-residual", cr.max(), tol_curve, true));
                out.push(rec("semicyclic-intertwine", res, tol_int, true));
                let fnr = fn_commutation_residual(z, &a, &b, &r, conv)?;
                out.push(rec("fn-commutation", fnr.max(), tol_fn, true).param("solvable", fnr.solvable));
            } else {
                out.push(rec("curve-residual", cr.r1, 1e-2, false));
                out.push(rec("semicyclic-intertwine", res, 1e-3, false));
            }
        }
    }
    Ok(out)
}

fn schur(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    let depth = ctx.depths(1, 4)?[0];
    let tol = ctx.tol(1e-10)?;
    let c = ctx.qp.powi(2) - ctx.qp.powi(-2);
    let mut out = Vec::new();
    for trial in 0..3 {
        let rep = ctx.verma(depth)?;
        let x = draw_phase(&mut ctx.rng) * ctx.rng.gen_range(0.6..1.2);
        let im = imaginary_root_vectors(&rep, x, 4)?;
        let fwd_e = schur_forward(&im.e, c);
        let fwd_f = schur_forward(&im.f, -c);
        for n in 0..4 {
            let res = max_abs(&(&fwd_e[n] - &im.eprime[n])).max(max_abs(&(&fwd_f[n] - &im.fprime[n])));
            out.push(
                CheckRecord::hold("schur-round-trip", res, tol)
                    .param("trial", trial)
                    .param("n", n + 1)
                    .param("lambda", rep.lambda)
                    .param("x", x),
            );
        }
        let e2 = &im.eprime[1] - &im.eprime[0] * &im.eprime[0] * (c / 2.0);
        out.push(CheckRecord::hold("schur-second-order", max_abs(&(&im.e[1] - e2)), tol).param("trial", trial));
    }
    Ok(out)
}

fn products(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    ctx.require_generic(Suite::ProductOracle)?;
    let depths = ctx.depths(2, 4)?;
    let tol = ctx.tol(1e-6)?;
    let mut out = Vec::new();
    for trial in 0..3 {
        let (a, b) = (ctx.verma(depths[0])?, ctx.verma(depths[1])?);
        let z = draw_disc(&mut ctx.rng, 0.5);
        let l = lambdas(&[&a, &b]);
        let plus = max_abs(&(rplus_closed(z, &a, &b)?.matrix - rplus_product(z, &a, &b, 30)?.matrix));
        let minus = max_abs(&(rminus_closed(z, &a, &b)?.matrix - rminus_product(z, &a, &b, 30)?.matrix));
        let f = f_scalar(z, a.lambda, b.lambda, &ctx.qp, 2000)?;
        let diff: CMat = rzero_exponential(z, &a, &b, 60)?.matrix - rzero_bar(z, &a, &b)?.matrix * f;
        // E_{nδ} contains EF, which leaves the truncation from the last basis vector.
        let (d0, d1) = (depths[0], depths[1]);
        let cols: Vec<usize> = (0..d0 - 1).flat_map(|i| (0..d1 - 1).map(move |j| i * d1 + j)).collect();
        let zero = max_abs_cols(&diff, &cols);
        for (name, res) in [("rplus-product", plus), ("rminus-product", minus), ("rzero-exponential", zero)] {
            out.push(CheckRecord::hold(name, res, tol).param("trial", trial).param("lambda", &l).param("z", z));
        }
    }
    Ok(out)
}

fn coincidence(ctx: &mut Ctx) -> Result<Vec<CheckRecord>> {
    let n = ctx.root_order(Suite::Coincidence)?;
    let depths = ctx.depths(2, 2 * n)?;
    let tol = ctx.tol(1e-8)?;
    let mut out = Vec::new();
    for trial in 0..10 {
        let (a, b) = (ctx.verma(depths[0])?, ctx.verma(depths[1])?);
        let direct = r_verma_direct(&a, &b)?;
        let product = r_reshetikhin_product(&a, &b, ReshetikhinCoefficient::QDifference)?;
        let cols = pair_window(a.dim(), b.dim(), joint_limit(&[&a, &b]), 0);
        let res = max_abs_cols(&(&direct.matrix - &product.matrix), &cols);
        out.push(
            CheckRecord::hold("verma-vs-reshetikhin", res, tol)
                .param("trial", trial)
                .param("lambda", lambdas(&[&a, &b]))
                .param("depths", &depths),
        );
        if trial == 0 && depths.iter().all(|&d| d > n) {
            for coef in [ReshetikhinCoefficient::InverseOneMinus, ReshetikhinCoefficient::ParitySigned] {
                let alt = r_reshetikhin_product(&a, &b, coef)?;
                let res = max_abs_cols(&(&direct.matrix - &alt.matrix), &cols);
                out.push(CheckRecord::detect("alternative-coefficient-differs", res, 1e-6).param("coefficient", coef));
            }
        }
    }
    Ok(out)
}
