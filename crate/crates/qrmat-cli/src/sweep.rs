//! `qrmat sweep`: curve residual, restricted-R intertwining and solver nullspace over a grid.

use std::io::Write;

use num_complex::Complex64 as C64;
use qrmat::cpotts::{
    curve_residual, intertwiner_nullspace, r_semicyclic, semicyclic_intertwine_residual, CurveSpec, LambdaConvention,
};
use qrmat::raffine::SpectralOptions;
use qrmat::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::params::{draw_disc, draw_lambda};

pub const HEADER: [&str; 11] =
    ["nprime", "lambda1", "lambda2", "alpha1", "alpha2", "z", "r1", "r2", "intertwine_residual", "nullspace_dim", "status"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Lambda1,
    Lambda2,
    Alpha1,
    Alpha2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis {
    pub axis: Axis,
    pub values: Vec<f64>,
}

/// "name=lo:hi:count" with name in {lambda1, lambda2, alpha1, alpha2}; count may be 0.
pub fn parse_axis(s: &str) -> Result<GridAxis> {
    let bad = || Error::InvalidParameter(format!("malformed grid axis {s:?}, expected name=lo:hi:count"));
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let axis = match name.trim() {
        "lambda1" => Axis::Lambda1,
        "lambda2" => Axis::Lambda2,
        "alpha1" => Axis::Alpha1,
        "alpha2" => Axis::Alpha2,
        _ => return Err(bad()),
    };
    let parts: Vec<&str> = range.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let values = match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect(),
    };
    Ok(GridAxis { axis, values })
}

pub struct SweepArgs {
    pub nprime: u32,
    pub base: CurveSpec,
    pub axes: Vec<GridAxis>,
    /// Replace alpha2 by the on-curve partner of the first module.
    pub partner_on_curve: bool,
    /// Seeded random points instead of the grid.
    pub draws: Option<usize>,
    pub seed: u64,
}

fn points(args: &SweepArgs) -> Result<Vec<CurveSpec>> {
    if let Some(count) = args.draws {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        return Ok((0..count)
            .map(|_| CurveSpec {
                lambda1: draw_lambda(&mut rng),
                lambda2: draw_lambda(&mut rng),
                alpha1: draw_disc(&mut rng, 1.0),
                alpha2: draw_disc(&mut rng, 1.0),
                ..args.base
            })
            .collect());
    }
    let mut pts = vec![args.base];
    for ax in &args.axes {
        let mut next = Vec::with_capacity(pts.len() * ax.values.len());
        for p in &pts {
            for &v in &ax.values {
                let mut q = *p;
                let c = C64::new(v, 0.0);
                match ax.axis {
                    Axis::Lambda1 => q.lambda1 = c,
                    Axis::Lambda2 => q.lambda2 = c,
                    Axis::Alpha1 => q.alpha1 = c,
                    Axis::Alpha2 => q.alpha2 = c,
                }
                next.push(q);
            }
        }
        pts = next;
    }
    Ok(pts)
}

pub fn fmt_complex(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

struct Row {
    spec: CurveSpec,
    r1: Option<f64>,
    r2: Option<f64>,
    intertwine: Option<f64>,
    nullspace_dim: Option<usize>,
    status: String,
}

fn evaluate(spec: CurveSpec, partner: bool) -> Row {
    let conv = LambdaConvention::KPower;
    let spec = if partner {
        match CurveSpec::on_curve(spec.nprime, spec.z, spec.lambda1, spec.lambda2, spec.alpha1, None, conv) {
            Ok(s) => s,
            Err(e) => return Row { spec, r1: None, r2: None, intertwine: None, nullspace_dim: None, status: e.kind().into() },
        }
    } else {
        spec
    };
    let mut row = Row { spec, r1: None, r2: None, intertwine: None, nullspace_dim: None, status: "ok".into() };
    let step = |row: &mut Row| -> Result<()> {
        let cr = curve_residual(&spec, conv)?;
        row.r1 = Some(cr.r1);
        row.r2 = Some(cr.r2);
        let (a, b) = (spec.rep1()?, spec.rep2()?);
        row.nullspace_dim = Some(intertwiner_nullspace(&a, &b, spec.z, C64::new(1.0, 0.0))?.nullspace_dim);
        let r = r_semicyclic(spec.z, &a, &b, SpectralOptions::with_cartan())?;
        row.intertwine = Some(semicyclic_intertwine_residual(spec.z, &a, &b, &r)?);
        Ok(())
    };
    if let Err(e) = step(&mut row) {
        row.status = e.kind().into();
    }
    row
}

pub fn run(args: &SweepArgs, out: impl Write) -> Result<usize> {
    let pts = points(args)?;
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:e}"));
    for p in &pts {
        let row = evaluate(*p, args.partner_on_curve);
        let s = row.spec;
        w.write_record([
            args.nprime.to_string(),
            fmt_complex(s.lambda1),
            fmt_complex(s.lambda2),
            fmt_complex(s.alpha1),
            fmt_complex(s.alpha2),
            fmt_complex(s.z),
            opt(row.r1),
            opt(row.r2),
            opt(row.intertwine),
            row.nullspace_dim.map_or_else(String::new, |d| d.to_string()),
            row.status,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))?;
    Ok(pts.len())
}
