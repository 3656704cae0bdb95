//! Mathieu characteristic values and solutions of
//!
//! ```text
//! y'' + (a - 2 q cos 2z) y = 0
//! ```
//!
//! Characteristic values come from truncated Fourier-basis matrices, which
//! are symmetric and tridiagonal. Fractional orders use the Floquet basis
//! `exp(i (nu + 2n) z)`, `n = -N..=N`. Integer orders use the classical
//! reduced cosine or sine bases, which split the degenerate Floquet blocks
//! into the even (`a_r`) and odd (`b_r`) sequences.
//!
//! The truncation starts at `max(32, ceil|nu| + ceil(2 sqrt|q|) + 16)` and is
//! doubled until two successive truncations agree to `1e-12 * max(1, |a|)`.
//!
//! Useful identities for signed `q`:
//! `a_{2m}(-q) = a_{2m}(q)`, `a_{2m+1}(-q) = b_{2m+1}(q)`,
//! `b_{2m}(-q) = b_{2m}(q)`, and for fractional `nu`, `a_nu(-q) = a_nu(q)`.

mod tridiag;

use crate::error::{Error, Result};
use tridiag::SymTridiagonal;

/// Relative agreement required between successive truncations.
pub const TRUNCATION_TOLERANCE: f64 = 1e-12;

/// Largest truncation `N` tried before giving up.
pub const MAX_TRUNCATION: usize = 1 << 14;

/// Symmetry class of a solution.
///
/// For integer order `Even` selects `a_r` / `ce_r` and `Odd` selects
/// `b_r` / `se_r`. For fractional order both classes share one
/// characteristic value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// How the stored Fourier coefficients are to be summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// `sum c_k cos(k z)`
    Cosine,
    /// `sum c_k sin(k z)`
    Sine,
    /// `sum c_k exp(i k z)` with fractional frequencies `k = nu + 2n`
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Floquet,
    /// cos(2mz), m >= 0
    EvenCos,
    /// cos((2m+1)z), m >= 0
    OddCos,
    /// sin((2m+1)z), m >= 0
    OddSin,
    /// sin(2mz), m >= 1
    EvenSin,
}

#[derive(Debug, Clone, Copy)]
struct Problem {
    family: Family,
    nu: f64,
    index: usize,
}

fn integer_order(nu: f64) -> Option<u64> {
    (nu == nu.round() && nu.abs() < 1e15).then(|| nu.abs() as u64)
}

impl Problem {
    fn classify(order: f64, parity: Parity) -> Result<Self> {
        if !order.is_finite() {
            return Err(Error::InvalidParameter(format!("order must be finite, got {order}")));
        }
        let Some(r) = integer_order(order) else {
            return Ok(Problem {
                family: Family::Floquet,
                nu: order,
                index: 0,
            });
        };
        let r_usize = r as usize;
        let (family, index) = match (parity, r % 2) {
            (Parity::Even, 0) => (Family::EvenCos, r_usize / 2),
            (Parity::Even, _) => (Family::OddCos, (r_usize - 1) / 2),
            (Parity::Odd, 1) => (Family::OddSin, (r_usize - 1) / 2),
            (Parity::Odd, _) => {
                if r == 0 {
                    return Err(Error::InvalidParameter(
                        "odd-type solutions start at order 1".into(),
                    ));
                }
                (Family::EvenSin, r_usize / 2 - 1)
            }
        };
        Ok(Problem {
            family,
            nu: r as f64,
            index,
        })
    }

    fn initial_truncation(&self, q: f64) -> usize {
        let n = self.nu.abs().ceil() as usize + (2.0 * q.abs().sqrt()).ceil() as usize + 16;
        n.max(32)
    }

    /// Frequencies of the basis functions at truncation `n`.
    fn frequencies(&self, n: usize) -> Vec<f64> {
        match self.family {
            Family::Floquet => (-(n as i64)..=n as i64)
                .map(|k| self.nu + 2.0 * k as f64)
                .collect(),
            Family::EvenCos => (0..=n).map(|m| 2.0 * m as f64).collect(),
            Family::OddCos | Family::OddSin => (0..=n).map(|m| 2.0 * m as f64 + 1.0).collect(),
            Family::EvenSin => (1..=n + 1).map(|m| 2.0 * m as f64).collect(),
        }
    }

    fn eigen_index(&self, n: usize) -> usize {
        match self.family {
            Family::Floquet => {
                let nu = self.nu;
                (-(n as i64)..=n as i64)
                    .filter(|k| (nu + 2.0 * *k as f64).abs() < nu.abs())
                    .count()
            }
            _ => self.index,
        }
    }

    fn matrix(&self, q: f64, n: usize) -> SymTridiagonal {
        let freqs = self.frequencies(n);
        let mut diag: Vec<f64> = freqs.iter().map(|k| k * k).collect();
        let mut off = vec![q; diag.len() - 1];
        match self.family {
            Family::EvenCos => off[0] = std::f64::consts::SQRT_2 * q,
            Family::OddCos => diag[0] += q,
            Family::OddSin => diag[0] -= q,
            Family::Floquet | Family::EvenSin => {}
        }
        SymTridiagonal::new(diag, off)
    }

    fn value_at(&self, q: f64, n: usize) -> f64 {
        self.matrix(q, n).eigenvalue(self.eigen_index(n))
    }

    /// Adaptive characteristic value; returns the value and the truncation
    /// at which it was accepted.
    fn converge(&self, q: f64) -> Result<(f64, usize)> {
        check_q(q)?;
        let mut n = self.initial_truncation(q);
        let mut previous = self.value_at(q, n);
        loop {
            let next_n = 2 * n;
            let last = self.value_at(q, next_n);
            if (last - previous).abs() <= TRUNCATION_TOLERANCE * last.abs().max(1.0) {
                return Ok((last, next_n));
            }
            if next_n >= MAX_TRUNCATION {
                return Err(Error::Convergence {
                    context: "Mathieu characteristic value",
                    truncation: next_n,
                    previous,
                    last,
                });
            }
            n = next_n;
            previous = last;
        }
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("q must be finite, got {q}")))
    }
}

/// Even-type characteristic value `a_nu(q)`.
///
/// Integer `nu` gives the classical `a_r(q)`; a negative order is the same
/// as its absolute value.
pub fn char_value(order: f64, q: f64) -> Result<f64> {
    Problem::classify(order, Parity::Even)?.converge(q).map(|(a, _)| a)
}

/// Odd-type characteristic value `b_nu(q)`.
///
/// Differs from [`char_value`] only at integer order, where it returns the
/// classical `b_r(q)` (`r >= 1`).
pub fn char_value_odd(order: f64, q: f64) -> Result<f64> {
    Problem::classify(order, Parity::Odd)?.converge(q).map(|(a, _)| a)
}

/// Characteristic value at a fixed truncation `n`, without adaptation.
///
/// The Floquet basis then has `2n + 1` elements and the reduced integer
/// bases have `n + 1`.
pub fn char_value_at_truncation(order: f64, q: f64, parity: Parity, n: usize) -> Result<f64> {
    check_q(q)?;
    let problem = Problem::classify(order, parity)?;
    if n == 0 || problem.eigen_index(n) > n {
        return Err(Error::InvalidParameter(format!(
            "truncation {n} too small for order {order}"
        )));
    }
    Ok(problem.value_at(q, n))
}

/// A converged Mathieu solution stored as its Fourier series.
#[derive(Debug, Clone, PartialEq)]
pub struct MathieuSolution {
    order: f64,
    q: f64,
    characteristic: f64,
    kind: SeriesKind,
    frequencies: Vec<f64>,
    coefficients: Vec<f64>,
}

impl MathieuSolution {
    /// Solves for the solution of the given order and parity.
    ///
    /// Normalisation: the coefficients have unit Euclidean norm, so every
    /// solution reduces to `cos(nu z)`, `sin(nu z)` or `exp(i nu z)` at
    /// `q = 0`. Signs: `ce_r(0) > 0`, `se_r'(0) > 0`, and for fractional
    /// order the coefficient of `exp(i nu z)` is positive.
    pub fn new(order: f64, q: f64, parity: Parity) -> Result<Self> {
        let problem = Problem::classify(order, parity)?;
        let (characteristic, n) = problem.converge(q)?;
        let mut coefficients = problem.matrix(q, n).eigenvector(characteristic);
        let frequencies = problem.frequencies(n);
        if problem.family == Family::EvenCos {
            coefficients[0] /= std::f64::consts::SQRT_2;
        }
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        coefficients.iter_mut().for_each(|c| *c /= norm);

        let kind = match problem.family {
            Family::Floquet => SeriesKind::Exponential,
            Family::EvenCos | Family::OddCos => SeriesKind::Cosine,
            Family::OddSin | Family::EvenSin => SeriesKind::Sine,
        };
        let sign_probe = match kind {
            SeriesKind::Cosine => coefficients.iter().sum::<f64>(),
            SeriesKind::Sine => coefficients
                .iter()
                .zip(&frequencies)
                .map(|(c, k)| c * k)
                .sum::<f64>(),
            SeriesKind::Exponential => {
                let centre = coefficients[n];
                if centre.abs() > 1e-8 {
                    centre
                } else {
                    coefficients
                        .iter()
                        .copied()
                        .fold(0.0_f64, |acc, c| if c.abs() > acc.abs() { c } else { acc })
                }
            }
        };
        if sign_probe < 0.0 {
            coefficients.iter_mut().for_each(|c| *c = -*c);
        }

        Ok(Self {
            order: problem.nu,
            q,
            characteristic,
            kind,
            frequencies,
            coefficients,
        })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn characteristic(&self) -> f64 {
        self.characteristic
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    /// `(frequency, coefficient)` pairs of the series.
    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.frequencies
            .iter()
            .copied()
            .zip(self.coefficients.iter().copied())
    }

    /// `sum c_k cos(k z)`; for an exponential series this is the even part
    /// `C(z)`.
    pub fn cos_sum(&self, z: f64) -> f64 {
        if self.kind == SeriesKind::Sine {
            return 0.0;
        }
        self.terms().map(|(k, c)| c * (k * z).cos()).sum()
    }

    /// `sum c_k sin(k z)`; for an exponential series this is the odd part
    /// `S(z)`.
    pub fn sin_sum(&self, z: f64) -> f64 {
        if self.kind == SeriesKind::Cosine {
            return 0.0;
        }
        self.terms().map(|(k, c)| c * (k * z).sin()).sum()
    }

    /// Value of the solution itself: `ce`, `se`, or the real even part of
    /// a Floquet solution.
    pub fn value(&self, z: f64) -> f64 {
        match self.kind {
            SeriesKind::Sine => self.sin_sum(z),
            _ => self.cos_sum(z),
        }
    }
}

/// Even periodic Mathieu function `ce_r(q, z)`.
pub fn mathieu_ce(r: u32, q: f64, z: f64) -> Result<f64> {
    Ok(MathieuSolution::new(r as f64, q, Parity::Even)?.value(z))
}

/// Odd periodic Mathieu function `se_r(q, z)`, `r >= 1`.
pub fn mathieu_se(r: u32, q: f64, z: f64) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("se is defined for r >= 1".into()));
    }
    Ok(MathieuSolution::new(r as f64, q, Parity::Odd)?.value(z))
}

/// Even part `C(z)` of the Floquet solution of order `nu`.
///
/// At integer order this is `ce_r`.
pub fn mathieu_c(order: f64, q: f64, z: f64) -> Result<f64> {
    Ok(MathieuSolution::new(order, q, Parity::Even)?.cos_sum(z))
}

/// Odd part `S(z)` of the Floquet solution of order `nu`.
///
/// At integer order this is `se_r`.
pub fn mathieu_s(order: f64, q: f64, z: f64) -> Result<f64> {
    let sol = MathieuSolution::new(order, q, Parity::Odd)?;
    Ok(sol.sin_sum(z))
}

/// `j`-th eigenvalue of the Floquet matrix at reduced exponent `nu1`.
fn band_value(nu1: f64, j: usize, q: f64) -> Result<f64> {
    let problem = Problem {
        family: Family::Floquet,
        nu: nu1,
        index: j,
    };
    let at = |n: usize| problem.matrix(q, n).eigenvalue(j);
    let mut n = problem.initial_truncation(q).max(j + 16);
    let mut previous = at(n);
    loop {
        let next_n = 2 * n;
        let last = at(next_n);
        if (last - previous).abs() <= TRUNCATION_TOLERANCE * last.abs().max(1.0) {
            return Ok(last);
        }
        if next_n >= MAX_TRUNCATION {
            return Err(Error::Convergence {
                context: "Mathieu band edge",
                truncation: next_n,
                previous,
                last,
            });
        }
        n = next_n;
        previous = last;
    }
}

/// Floquet exponent `r >= 0` of the equation with parameters `(a, q)`.
///
/// The reduced exponent `nu1` in `[0, 1]` is found by bisection inside
/// the stability band containing `a`, then unwrapped to the band's order:
/// band `j` maps to `j + nu1` for even `j` and `j + 1 - nu1` for odd `j`.
/// Returns [`Error::UnstableBand`] with the bracketing edges when `a`
/// falls in a gap.
pub fn floquet_exponent(a: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("a must be finite, got {a}")));
    }
    let mut previous_top: Option<f64> = None;
    let mut j = 0usize;
    loop {
        let e0 = band_value(0.0, j, q)?;
        let e1 = band_value(1.0, j, q)?;
        let (lo, hi) = (e0.min(e1), e0.max(e1));
        if a < lo {
            return Err(Error::UnstableBand {
                a,
                q,
                lower: previous_top,
                upper: Some(lo),
            });
        }
        if a <= hi {
            let nu1 = bisect_band(a, q, j, e0, e1)?;
            return Ok(if j % 2 == 0 {
                j as f64 + nu1
            } else {
                (j + 1) as f64 - nu1
            });
        }
        previous_top = Some(hi);
        j += 1;
        if j > MAX_TRUNCATION {
            return Err(Error::InvalidParameter(format!("a = {a} is beyond the supported bands")));
        }
    }
}

fn bisect_band(a: f64, q: f64, j: usize, e0: f64, e1: f64) -> Result<f64> {
    if a == e0 {
        return Ok(0.0);
    }
    if a == e1 {
        return Ok(1.0);
    }
    let increasing = e1 > e0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 4.0 * f64::EPSILON {
        let mid = 0.5 * (lo + hi);
        let below = band_value(mid, j, q)? < a;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
