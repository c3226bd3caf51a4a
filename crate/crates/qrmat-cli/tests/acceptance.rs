//! One line per acceptance criterion, then a non-zero exit if any criterion failed.

use std::process::{Command, ExitCode};

use num_complex::Complex64 as C64;
use qrmat::cpotts::{
    curve_residual, fn_commutation_residual, intertwiner_nullspace, proportionality_defect, r_semicyclic,
    semicyclic_intertwine_residual, CurveSpec, LambdaConvention,
};
use qrmat::linalg::{max_abs, max_abs_cols, pair_window, CMat};
use qrmat::oracle::{qbinom_extrapolated, rminus_product, rplus_product, rzero_exponential, schur_forward};
use qrmat::qnum::{qbinom, QParam};
use qrmat::raffine::{
    central_affine_check, drinfeld_relation_check, f_scalar, imaginary_commutator_residual,
    imaginary_root_vectors, r_spectral, rminus_closed, rplus_closed, rzero_bar, spectral_ybe_residual, DrinfeldRelation,
    SpectralOptions,
};
use qrmat::repspace::{central_check, semicyclic, truncated_verma, Rep};
use qrmat::rfinite::{
    intertwine_residual, joint_limit, quasitriangularity_residual, r_reshetikhin_product, r_verma_direct, ybe_residual,
    ReshetikhinCoefficient,
};
use qrmat::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn lambda(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(0.1..2.0), rng.gen_range(-0.5..0.5))
}

fn disc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn verma(rng: &mut ChaCha8Rng, depth: usize, qp: &QParam) -> Result<Rep> {
    truncated_verma(lambda(rng), depth, qp)
}

fn worst_below(id: &'static str, what: &str, worst: f64, tol: f64) -> Line {
    Line { id, pass: worst < tol, detail: format!("{what}: worst {worst:.3e} (tol {tol:.0e})") }
}

fn ac1() -> Result<Line> {
    let mut worst: f64 = 0.0;
    for nprime in [3u32, 4, 5, 6, 8] {
        let qp = QParam::root_of_unity(nprime)?;
        let big_n = qp.order().unwrap();
        for s in 0..=3 * big_n {
            for n in 0..=s {
                let exact = qbinom(s, n, &qp)?;
                let oracle = qbinom_extrapolated(s, n, nprime, 8)?;
                worst = worst.max((exact - oracle).norm() / oracle.norm().max(1.0));
            }
        }
    }
    Ok(worst_below("AC1", "q-binomials at roots of unity vs h-perturbation oracle", worst, 1e-6))
}

fn ac2(rng: &mut ChaCha8Rng) -> Result<Line> {
    let mut worst: f64 = 0.0;
    for nprime in [3u32, 4, 5, 6] {
        let qp = QParam::root_of_unity(nprime)?;
        let big_n = qp.order().unwrap() as usize;
        for _ in 0..10 {
            let (d1, d2) = (rng.gen_range(1..=2 * big_n), rng.gen_range(1..=2 * big_n));
            let (a, b) = (verma(rng, d1, &qp)?, verma(rng, d2, &qp)?);
            let direct = r_verma_direct(&a, &b)?;
            let product = r_reshetikhin_product(&a, &b, ReshetikhinCoefficient::QDifference)?;
            let cols = pair_window(a.dim(), b.dim(), joint_limit(&[&a, &b]), 0);
            worst = worst.max(max_abs_cols(&(&direct.matrix - &product.matrix), &cols));
        }
    }
    Ok(worst_below("AC2", "direct vs factorized finite R on safe windows", worst, 1e-8))
}

fn ac3(rng: &mut ChaCha8Rng) -> Result<Line> {
    let generic = QParam::generic(C64::new(1.2, 0.1))?;
    let (mut gen_worst, mut root_worst, mut quasi_worst): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for qp in [generic, QParam::root_of_unity(3)?, QParam::root_of_unity(5)?] {
        let depth = qp.order().map_or(3, |n| n as usize);
        for _ in 0..3 {
            let reps = [verma(rng, depth, &qp)?, verma(rng, depth, &qp)?, verma(rng, depth, &qp)?];
            let r = r_verma_direct(&reps[0], &reps[1])?;
            let res = intertwine_residual(&r, &reps[0], &reps[1], 1)?.max(ybe_residual(
                [&reps[0], &reps[1], &reps[2]],
                r_verma_direct,
                0,
            )?);
            if qp.is_root() {
                root_worst = root_worst.max(res);
            } else {
                gen_worst = gen_worst.max(res);
                let (l, rr) = quasitriangularity_residual(&reps[0], &reps[1], &reps[2])?;
                quasi_worst = quasi_worst.max(l.max(rr));
            }
        }
    }
    Ok(Line {
        id: "AC3",
        pass: gen_worst < 1e-8 && root_worst < 1e-7 && quasi_worst < 1e-9,
        detail: format!(
            "finite intertwining and YBE: generic {gen_worst:.3e} (tol 1e-8), root {root_worst:.3e} (tol 1e-7); quasitriangularity {quasi_worst:.3e} (tol 1e-9)"
        ),
    })
}

fn ac4(rng: &mut ChaCha8Rng) -> Result<Line> {
    let qp = QParam::generic(C64::new(1.05, 0.02))?;
    let mut worst: f64 = 0.0;
    for depth in [2usize, 3, 4] {
        for _ in 0..2 {
            let (a, b) = (verma(rng, depth, &qp)?, verma(rng, depth, &qp)?);
            let z = disc(rng, 0.5);
            worst = worst.max(max_abs(&(rplus_closed(z, &a, &b)?.matrix - rplus_product(z, &a, &b, 30)?.matrix)));
            worst = worst.max(max_abs(&(rminus_closed(z, &a, &b)?.matrix - rminus_product(z, &a, &b, 30)?.matrix)));
            let f = f_scalar(z, a.lambda, b.lambda, &qp, 2000)?;
            let diff: CMat = rzero_exponential(z, &a, &b, 60)?.matrix - rzero_bar(z, &a, &b)?.matrix * f;
            // The exponent leaves the truncation from the last basis vector of each factor.
            let cols: Vec<usize> = (0..depth - 1).flat_map(|i| (0..depth - 1).map(move |j| i * depth + j)).collect();
            worst = worst.max(max_abs_cols(&diff, &cols));
        }
    }
    Ok(worst_below("AC4", "closed vs product forms of R+, R-, f(z)R0", worst, 1e-6))
}

fn ac5(rng: &mut ChaCha8Rng) -> Result<Line> {
    let (mut vac, mut ybe): (f64, f64) = (0.0, 0.0);
    for nprime in [3u32, 5] {
        let qp = QParam::root_of_unity(nprime)?;
        let n = qp.order().unwrap() as usize;
        for _ in 0..3 {
            let reps = [verma(rng, n, &qp)?, verma(rng, n, &qp)?, verma(rng, n, &qp)?];
            for _ in 0..2 {
                let r = r_spectral(phase(rng), &reps[0], &reps[1], SpectralOptions::default())?;
                let col = r.matrix.column(0);
                vac = vac.max((col[0] - 1.0).norm()).max(col.iter().skip(1).fold(0.0, |m, v| m.max(v.norm())));
            }
            let xs = [phase(rng), phase(rng), phase(rng)];
            ybe = ybe.max(spectral_ybe_residual(xs, [&reps[0], &reps[1], &reps[2]], SpectralOptions::with_cartan())?);
        }
    }
    Ok(Line {
        id: "AC5",
        pass: vac <= 1e-12 && ybe < 1e-7,
        detail: format!("spectral R: vacuum defect {vac:.3e} (tol 1e-12), spectral YBE {ybe:.3e} (tol 1e-7)"),
    })
}

fn ac6(rng: &mut ChaCha8Rng) -> Result<Line> {
    let qp = QParam::root_of_unity(3)?;
    let conv = LambdaConvention::KPower;
    let (mut on_int, mut on_fn, mut off_int, mut off_count): (f64, f64, f64, usize) = (0.0, 0.0, f64::INFINITY, 0);
    for draw in 0..100 {
        let on = draw < 50;
        let (l1, l2) = (lambda(rng), lambda(rng));
        let z = qp.powi(2 * rng.gen_range(0..3));
        let mut spec = CurveSpec::on_curve(3, z, l1, l2, disc(rng, 1.0), None, conv)?;
        if !on {
            let scale = (C64::new(1.0, 0.0) - conv.big_lambda(l2, &qp)?).norm();
            spec.alpha2 += phase(rng) * (scale * rng.gen_range(0.1..1.0));
        }
        let (a, b) = (spec.rep1()?, spec.rep2()?);
        let r = r_semicyclic(z, &a, &b, SpectralOptions::with_cartan())?;
        let res = semicyclic_intertwine_residual(z, &a, &b, &r)?;
        if on {
            on_int = on_int.max(res);
            on_fn = on_fn.max(fn_commutation_residual(z, &a, &b, &r, conv)?.max());
        } else if curve_residual(&spec, conv)?.r1 > 1e-2 {
            off_count += 1;
            off_int = off_int.min(res);
        }
    }
    Ok(Line {
        id: "AC6",
        pass: on_int < 1e-6 && on_fn < 1e-7 && off_int > 1e-3 && off_count > 0,
        detail: format!(
            "curve biconditional, 50 on + 50 off draws: on-curve intertwine {on_int:.3e} (tol 1e-6), F^N exchange {on_fn:.3e} (tol 1e-7); smallest off-curve intertwine {off_int:.3e} over {off_count} draws (must exceed 1e-3)"
        ),
    })
}

fn ac7(rng: &mut ChaCha8Rng) -> Result<Line> {
    let (mut worst, mut control): (f64, f64) = (0.0, f64::INFINITY);
    for nprime in [3u32, 5] {
        let qp = QParam::root_of_unity(nprime)?;
        for _ in 0..3 {
            let rep = semicyclic(disc(rng, 1.0), lambda(rng), &qp)?;
            for e in central_check(&rep)?.entries {
                worst = worst.max(e.residual);
            }
            let x = phase(rng) * rng.gen_range(0.6..1.4);
            for e in central_affine_check(&rep, x, 1)? {
                worst = worst.max(e.e_residual).max(e.f_residual);
            }
            let im = imaginary_root_vectors(&rep, x, 1)?;
            control = control.min(imaginary_commutator_residual(&rep, &im.e[0]));
        }
    }
    Ok(Line {
        id: "AC7",
        pass: worst < 1e-8 && control > 1e-8,
        detail: format!("centrality of E^N, F^N, K^N, E_Nδ, F_Nδ: worst {worst:.3e} (tol 1e-8); E_δ control {control:.3e} (must exceed 1e-8)"),
    })
}

fn ac8(rng: &mut ChaCha8Rng) -> Result<Line> {
    let qp = QParam::generic(C64::new(1.2, 0.1))?;
    let c = qp.powi(2) - qp.powi(-2);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let rep = verma(rng, 4, &qp)?;
        let im = imaginary_root_vectors(&rep, phase(rng) * rng.gen_range(0.6..1.2), 4)?;
        let (fe, ff) = (schur_forward(&im.e, c), schur_forward(&im.f, -c));
        for n in 0..4 {
            worst = worst.max(max_abs(&(&fe[n] - &im.eprime[n]))).max(max_abs(&(&ff[n] - &im.fprime[n])));
        }
    }
    Ok(worst_below("AC8", "Schur forward sum after log inversion, n <= 4", worst, 1e-10))
}

fn ac9(rng: &mut ChaCha8Rng) -> Result<Line> {
    let qp = QParam::generic(C64::new(1.2, 0.1))?;
    let rep = truncated_verma(C64::new(3.0, 0.0), 4, &qp)?;
    let mut worst: f64 = 0.0;
    for _ in 0..2 {
        for (_, r) in drinfeld_relation_check(&rep, phase(rng) * rng.gen_range(0.6..1.2), &DrinfeldRelation::ALL)? {
            worst = worst.max(r);
        }
    }
    Ok(worst_below("AC9", "Drinfeld relations on ρ_x, depth 4", worst, 1e-8))
}

fn ac10(rng: &mut ChaCha8Rng) -> Result<(Line, String)> {
    let conv = LambdaConvention::KPower;
    let (mut dims_ok, mut worst_match, mut off_ok) = (true, 0.0f64, true);
    let mut probe = Vec::new();
    for nprime in [3u32, 5] {
        let qp = QParam::root_of_unity(nprime)?;
        let n = qp.order().unwrap() as i64;
        for trial in 0..4 {
            let z = qp.powi(2 * rng.gen_range(0..n));
            // Trial 0 is the nilpotent pair.
            let alpha1 = if trial == 0 { C64::new(0.0, 0.0) } else { disc(rng, 1.0) };
            let spec = CurveSpec::on_curve(nprime, z, lambda(rng), lambda(rng), alpha1, None, conv)?;
            let (a, b) = (spec.rep1()?, spec.rep2()?);
            let sol = intertwiner_nullspace(&a, &b, z, C64::new(1.0, 0.0))?;
            dims_ok &= sol.nullspace_dim == 1;
            if let Some(m) = sol.matrix {
                let r = r_semicyclic(z, &a, &b, SpectralOptions::with_cartan())?;
                worst_match = worst_match.max(proportionality_defect(&m.matrix, &r.matrix));
            }
            let mut off = spec;
            off.alpha2 += phase(rng) * 0.5 * (C64::new(1.0, 0.0) - conv.big_lambda(spec.lambda2, &qp)?).norm();
            off_ok &= intertwiner_nullspace(&a, &off.rep2()?, z, C64::new(1.0, 0.0))?.nullspace_dim == 0;
        }
        let z = qp.powi(2);
        let spec = CurveSpec::on_curve(nprime, z, lambda(rng), lambda(rng), disc(rng, 1.0), Some(disc(rng, 1.0)), conv)?;
        let sol = intertwiner_nullspace(&spec.rep1()?, &spec.rep2()?, z, C64::new(1.0, 0.0))?;
        probe.push(format!("N'={nprime}: nullspace dim {}", sol.nullspace_dim));
    }
    let line = Line {
        id: "AC10",
        pass: dims_ok && worst_match < 1e-5 && off_ok,
        detail: format!(
            "intertwiner solver: on-curve dim 1 {dims_ok}, match to restricted R {worst_match:.3e} (tol 1e-5), off-curve dim 0 {off_ok}"
        ),
    };
    Ok((line, format!("AC10 probe RECORDED cyclic on-curve pairs: {}", probe.join(", "))))
}

fn ac11() -> Line {
    let exe = env!("CARGO_BIN_EXE_qrmat");
    let suites = ["ybe", "intertwine", "quasi", "central", "drinfeld", "curve", "schur-oracle", "product-oracle", "coincidence"];
    let run = |args: &[&str]| Command::new(exe).args(args).env_remove("QRMAT_TOLERANCE").output().map(|o| o.stdout);
    let mut differing = Vec::new();
    for suite in suites {
        let args = ["verify", suite, "--seed", "42"];
        match (run(&args), run(&args)) {
            (Ok(a), Ok(b)) if a == b && !a.is_empty() => {}
            _ => differing.push(suite),
        }
    }
    let sweep = ["sweep", "--Nprime", "3", "--draws", "8", "--seed", "42"];
    if !matches!((run(&sweep), run(&sweep)), (Ok(a), Ok(b)) if a == b) {
        differing.push("sweep");
    }
    Line {
        id: "AC11",
        pass: differing.is_empty(),
        detail: format!("byte-identical reruns of {} suites and a seeded sweep; differing: {differing:?}", suites.len()),
    }
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut lines = Vec::new();
    let mut record = |id: &'static str, r: Result<Line>| {
        lines.push(r.unwrap_or_else(|e| Line { id, pass: false, detail: format!("error: {e}") }));
    };
    record("AC1", ac1());
    record("AC2", ac2(&mut rng));
    record("AC3", ac3(&mut rng));
    record("AC4", ac4(&mut rng));
    record("AC5", ac5(&mut rng));
    record("AC6", ac6(&mut rng));
    record("AC7", ac7(&mut rng));
    record("AC8", ac8(&mut rng));
    record("AC9", ac9(&mut rng));
    let probe = match ac10(&mut rng) {
        Ok((line, probe)) => {
            record("AC10", Ok(line));
            Some(probe)
        }
        Err(e) => {
            record("AC10", Err(e));
            None
        }
    };
    lines.push(ac11());
    for l in &lines {
        println!("{} {} {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
    }
    if let Some(p) = probe {
        println!("{p}");
    }
    if lines.iter().all(|l| l.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
