//! Parsing of command-line values and seeded parameter draws.

use num_complex::Complex64 as C64;
use qrmat::qnum::QParam;
use qrmat::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOLERANCE_ENV: &str = "QRMAT_TOLERANCE";

/// "re" or "re,im".
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::InvalidParameter(format!("cannot read complex number from {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

/// A ';'-separated list of complex numbers, or "roots:N" for the N-th roots of unity.
pub fn parse_z_list(s: &str) -> Result<Vec<C64>> {
    if let Some(n) = s.strip_prefix("roots:") {
        let n: u32 = n.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad root count in {s:?}")))?;
        if n == 0 {
            return Err(Error::InvalidParameter("roots:N needs N >= 1".into()));
        }
        return Ok((0..n).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)).collect());
    }
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_complex).collect()
}

pub fn parse_depths(s: &str) -> Result<Vec<usize>> {
    let out: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::InvalidParameter(format!("bad depth list {s:?}"))))
        .collect::<Result<_>>()?;
    if out.iter().any(|&d| d == 0) {
        return Err(Error::InvalidParameter("depths must be >= 1".into()));
    }
    Ok(out)
}

/// Exactly one of --q and --Nprime, or the fallback.
pub fn qparam(q: Option<&str>, nprime: Option<u32>, fallback: impl FnOnce() -> Result<QParam>) -> Result<QParam> {
    match (q, nprime) {
        (Some(_), Some(_)) => Err(Error::InvalidParameter("give either --q or --Nprime, not both".into())),
        (Some(q), None) => QParam::generic(parse_complex(q)?),
        (None, Some(n)) => QParam::root_of_unity(n),
        (None, None) => fallback(),
    }
}

/// Explicit value, else the environment override, else the suite default.
pub fn tolerance(flag: Option<f64>, default: f64) -> Result<f64> {
    let t = match flag {
        Some(t) => t,
        None => match std::env::var(TOLERANCE_ENV) {
            Ok(v) => v.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("{TOLERANCE_ENV}={v:?}")))?,
            Err(_) => return Ok(default),
        },
    };
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

/// λ uniform on [0.1, 2.0] + i·[-0.5, 0.5].
pub fn draw_lambda(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(0.1..2.0), rng.gen_range(-0.5..0.5))
}

/// Complex number uniform in the disc |w| <= r.
pub fn draw_disc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn draw_phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}
