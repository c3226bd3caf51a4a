//! q-integers, q-factorials and q-binomials, with finite limits at roots of unity.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Largest k scanned by the near-root guard on generic q.
pub const GENERIC_GUARD_ORDER: i32 = 64;
pub const GENERIC_GUARD_TOL: f64 = 1e-6;

/// Deformation parameter: a generic complex q or a primitive N'-th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QMode {
    Generic { q: [f64; 2] },
    RootOfUnity { nprime: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QParam {
    mode: QMode,
    q: C64,
    log_q: C64,
}

impl QParam {
    pub fn generic(q: C64) -> Result<Self> {
        if !(q.re.is_finite() && q.im.is_finite()) || q.norm() < 1e-300 {
            return Err(Error::InvalidParameter(format!("q = {q} is not a usable deformation parameter")));
        }
        let mut p = C64::new(1.0, 0.0);
        for k in 1..=GENERIC_GUARD_ORDER {
            p *= q;
            if (p - 1.0).norm() < GENERIC_GUARD_TOL {
                return Err(Error::InvalidParameter(format!(
                    "q = {q} is within {GENERIC_GUARD_TOL:e} of a root of unity of order {k}"
                )));
            }
        }
        Ok(QParam { mode: QMode::Generic { q: [q.re, q.im] }, q, log_q: q.ln() })
    }

    /// q = exp(2πi/N'). Orders below 3 leave [2]_q or q - 1/q degenerate.
    pub fn root_of_unity(nprime: u32) -> Result<Self> {
        if nprime < 3 {
            return Err(Error::UnsupportedOrder(format!("N' = {nprime}; need N' >= 3")));
        }
        let theta = 2.0 * PI / nprime as f64;
        Ok(QParam {
            mode: QMode::RootOfUnity { nprime },
            q: C64::new(theta.cos(), theta.sin()),
            log_q: C64::new(0.0, theta),
        })
    }

    pub fn from_mode(mode: QMode) -> Result<Self> {
        match mode {
            QMode::Generic { q } => QParam::generic(C64::new(q[0], q[1])),
            QMode::RootOfUnity { nprime } => QParam::root_of_unity(nprime),
        }
    }

    pub fn mode(&self) -> QMode {
        self.mode
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn log_q(&self) -> C64 {
        self.log_q
    }

    pub fn is_root(&self) -> bool {
        matches!(self.mode, QMode::RootOfUnity { .. })
    }

    pub fn nprime(&self) -> Option<u32> {
        match self.mode {
            QMode::RootOfUnity { nprime } => Some(nprime),
            QMode::Generic { .. } => None,
        }
    }

    /// N = N' for odd N', N'/2 for even N'; the order of q².
    pub fn order(&self) -> Option<u32> {
        self.nprime().map(|np| if np % 2 == 1 { np } else { np / 2 })
    }

    pub fn require_root(&self) -> Result<u32> {
        self.order()
            .ok_or_else(|| Error::InvalidParameter("operation needs q at a root of unity".into()))
    }

    /// q^x on the principal branch of log q.
    pub fn pow(&self, x: C64) -> C64 {
        (x * self.log_q).exp()
    }

    pub fn powf(&self, x: f64) -> C64 {
        self.pow(C64::new(x, 0.0))
    }

    /// Integer power, reduced mod N' at a root of unity so large exponents stay accurate.
    pub fn powi(&self, n: i64) -> C64 {
        match self.mode {
            QMode::RootOfUnity { nprime } => {
                let r = n.rem_euclid(nprime as i64) as f64;
                let theta = 2.0 * PI * r / nprime as f64;
                C64::new(theta.cos(), theta.sin())
            }
            QMode::Generic { .. } => self.q.powi(n as i32),
        }
    }

    pub fn q_minus_qinv(&self) -> C64 {
        self.q - self.q.inv()
    }

    /// [n]_q, exactly zero at a root of unity when N | n.
    pub fn qint(&self, n: i64) -> C64 {
        if let Some(nn) = self.order() {
            if n.rem_euclid(nn as i64) == 0 {
                return C64::new(0.0, 0.0);
            }
        }
        (self.powi(n) - self.powi(-n)) / self.q_minus_qinv()
    }

    /// [x]_q for complex x.
    pub fn qint_c(&self, x: C64) -> C64 {
        (self.pow(x) - self.pow(-x)) / self.q_minus_qinv()
    }

    /// (n)_t with t = q⁻², exactly zero at a root of unity when N | n.
    pub fn tbracket(&self, n: i64) -> C64 {
        if let Some(nn) = self.order() {
            if n.rem_euclid(nn as i64) == 0 {
                return C64::new(0.0, 0.0);
            }
        }
        (C64::new(1.0, 0.0) - self.powi(-2 * n)) / (C64::new(1.0, 0.0) - self.powi(-2))
    }

    /// [n]_q! (symmetric).
    pub fn qfactorial(&self, n: u32) -> C64 {
        (1..=n as i64).map(|k| self.qint(k)).product()
    }

    /// (n)_{q⁻²}!
    pub fn tfactorial(&self, n: u32) -> C64 {
        (1..=n as i64).map(|k| self.tbracket(k)).product()
    }
}

pub fn qint(n: i64, qp: &QParam) -> Result<C64> {
    if (qp.q - 1.0).norm() < 1e-15 || (qp.q + 1.0).norm() < 1e-15 {
        return Err(Error::UndefinedDenominator("q = ±1".into()));
    }
    Ok(qp.qint(n))
}

/// (1 - base^n)/(1 - base).
pub fn qbracket(n: i64, base: C64) -> Result<C64> {
    if (base - 1.0).norm() < 1e-15 {
        return Err(Error::UndefinedDenominator("base = 1".into()));
    }
    Ok((C64::new(1.0, 0.0) - base.powi(n as i32)) / (C64::new(1.0, 0.0) - base))
}

fn binomial(s: u64, n: u64) -> f64 {
    if n > s {
        return 0.0;
    }
    let n = n.min(s - n);
    (0..n).fold(1.0, |acc, i| acc * (s - i) as f64 / (i + 1) as f64)
}

fn qbinom_direct(s: u32, n: u32, qp: &QParam) -> C64 {
    // [s-n+1]...[s] / [1]...[n]
    (1..=n as i64).fold(C64::new(1.0, 0.0), |acc, k| {
        acc * qp.qint(s as i64 - n as i64 + k) / qp.qint(k)
    })
}

/// Symmetric q-binomial. At a root of unity the finite limit via q-Lucas:
/// s = s1 N + s0, n = n1 N + n0 gives C(s1,n1)·[s0 n0]·q^{-n(s-n)+n0(s0-n0)}, zero if n0 > s0.
pub fn qbinom(s: u32, n: u32, qp: &QParam) -> Result<C64> {
    if n > s {
        return Err(Error::OutOfRange(format!("qbinom({s}, {n}) needs n <= s")));
    }
    match qp.order() {
        None => Ok(qbinom_direct(s, n, qp)),
        Some(big_n) => {
            let (s1, s0) = (s / big_n, s % big_n);
            let (n1, n0) = (n / big_n, n % big_n);
            if n0 > s0 {
                return Ok(C64::new(0.0, 0.0));
            }
            let phase = -(n as i64) * (s as i64 - n as i64) + n0 as i64 * (s0 as i64 - n0 as i64);
            Ok(qbinom_direct(s0, n0, qp) * binomial(s1 as u64, n1 as u64) * qp.powi(phase))
        }
    }
}

/// Σ_{n ≤ terms} X^n/(n)_base!. A vanishing (n)_base is tolerated only once X^n = 0.
pub fn qexp_truncated(x: &CMat, base: C64, terms: usize) -> Result<CMat> {
    let dim = x.nrows();
    let mut sum = CMat::identity(dim, dim);
    let mut power = CMat::identity(dim, dim);
    let mut fact = C64::new(1.0, 0.0);
    let one = C64::new(1.0, 0.0);
    for n in 1..=terms {
        power = &power * x;
        if power.iter().all(|v| v.norm() == 0.0) {
            break;
        }
        let bracket = if (base - one).norm() < 1e-15 {
            C64::new(n as f64, 0.0)
        } else {
            (one - base.powi(n as i32)) / (one - base)
        };
        fact *= bracket;
        if fact.norm() < 1e-13 {
            return Err(Error::VanishingFactorial(n));
        }
        sum += &power / fact;
    }
    Ok(sum)
}

/// Π_{k<terms} (1 - z·base^k).
pub fn qpochhammer_truncated(z: C64, base: C64, terms: usize) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut b = C64::new(1.0, 0.0);
    for _ in 0..terms {
        acc *= C64::new(1.0, 0.0) - z * b;
        b *= base;
    }
    acc
}
