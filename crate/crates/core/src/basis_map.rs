//! Map between the two Andreev states in the barrier and the
//! computational basis.
//!
//! In the barrier a bound state is a superposition of
//! `|0>_A = (f1 e^{-i q_e z}, g1 e^{-i q_h z})` and
//! `|1>_A = (f2 e^{i q_e z}, g2 e^{i q_h z})`. The transform `T` sends
//! `|0>_A -> (1, 0)` and `|1>_A -> (0, 1)`, so it is the inverse of the
//! column matrix `[|0>_A |1>_A]`. A computational gate `G` acts on Andreev
//! vectors as `T^{-1} G T`.

use num_complex::Complex64;

use crate::andreev::{fi_amplitudes, sector_levels, Channel, JunctionParams};
use crate::error::{Error, Result};

pub type Spinor = [Complex64; 2];
pub type Matrix2 = [[Complex64; 2]; 2];

/// Relative determinant threshold below which two states are treated as
/// linearly dependent.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Residual tolerance of [`transport_pauli_x`].
pub const TRANSPORT_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The two barrier states at one position `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndreevBasisPair {
    pub state0: Spinor,
    pub state1: Spinor,
    pub z: f64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
    pub q_e: Complex64,
    pub q_h: Complex64,
    /// Common transverse factor `chi_l(x) chi_m(y)`, kept out of the states.
    pub transverse: f64,
}

impl AndreevBasisPair {
    pub fn from_amplitudes(
        (f1, f2, g1, g2): (Complex64, Complex64, Complex64, Complex64),
        (q_e, q_h): (Complex64, Complex64),
        z: f64,
    ) -> Self {
        let phase = |k: Complex64, sign: f64| (Complex64::i() * k * (sign * z)).exp();
        Self {
            state0: [f1 * phase(q_e, -1.0), g1 * phase(q_h, -1.0)],
            state1: [f2 * phase(q_e, 1.0), g2 * phase(q_h, 1.0)],
            z,
            f1,
            f2,
            g1,
            g2,
            q_e,
            q_h,
            transverse: 1.0,
        }
    }

    /// Pair taken from a solved bound state: level `level` (ascending) of
    /// the up-electron sector of `channel` at phase `phi`. `z` defaults to
    /// the middle of the barrier, `lambda + L_F / 2`.
    pub fn from_junction(
        phi: f64,
        channel: &Channel,
        params: &JunctionParams,
        level: usize,
        z: Option<f64>,
    ) -> Result<Self> {
        let levels = sector_levels(phi, channel, params, 128)?;
        let energy = *levels.get(level).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "level {level} requested but channel ({}, {}) has {} levels",
                channel.l,
                channel.m,
                levels.len()
            ))
        })?;
        let a = fi_amplitudes(energy, phi, channel, params)?;
        let z = z.unwrap_or(params.lambda + 0.5 * params.l_f as f64);
        let mut pair = Self::from_amplitudes((a.f1, a.f2, a.g1, a.g2), (a.q_e, a.q_h), z);
        pair.transverse = 1.0;
        Ok(pair)
    }

    /// Same pair with both states multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            state0: [self.state0[0] * c, self.state0[1] * c],
            state1: [self.state1[0] * c, self.state1[1] * c],
            f1: self.f1 * c,
            f2: self.f2 * c,
            g1: self.g1 * c,
            g2: self.g2 * c,
            ..*self
        }
    }
}

/// `T` together with the pair it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisTransform {
    pub matrix: Matrix2,
    pub source: AndreevBasisPair,
}

fn norm(v: &Spinor) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn det2(m: &Matrix2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inverse2(m: &Matrix2) -> Matrix2 {
    let d = det2(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub fn mat_vec(m: &Matrix2, v: &Spinor) -> Spinor {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

const PAULI_X: Matrix2 = [[ZERO, ONE], [ONE, ZERO]];

/// `T = [state0 state1]^{-1}`, or [`Error::Singular`] when
/// `|det| <= 1e-12 |state0| |state1|`.
pub fn build_transform(pair: &AndreevBasisPair) -> Result<BasisTransform> {
    let s: Matrix2 = [
        [pair.state0[0], pair.state1[0]],
        [pair.state0[1], pair.state1[1]],
    ];
    let det = det2(&s);
    let threshold = SINGULAR_THRESHOLD * norm(&pair.state0) * norm(&pair.state1);
    if !(det.norm() > threshold) {
        return Err(Error::Singular {
            det: det.norm(),
            threshold,
        });
    }
    Ok(BasisTransform {
        matrix: inverse2(&s),
        source: *pair,
    })
}

/// Entry-wise closed form of `T` in terms of the amplitudes and momenta.
/// `None` when one of its denominators vanishes.
pub fn closed_form_transform(pair: &AndreevBasisPair) -> Option<Matrix2> {
    let (f1, f2, g1, g2) = (pair.f1, pair.f2, pair.g1, pair.g2);
    let (qe, qh) = (pair.q_e, pair.q_h);
    let e = |x: Complex64| (Complex64::i() * x * pair.z).exp();

    let d11 = g1 * f2 * e(-qh) - g2 * f1 * e(qh - 2.0 * qe);
    let d21 = g2 * f1 * e(qh) - g1 * f2 * e(2.0 * qe - qh);
    if d11.norm() == 0.0 || d21.norm() == 0.0 || f1.norm() == 0.0 || f2.norm() == 0.0 {
        return None;
    }
    let d12 = g1 * e(-qh) - g2 * (f1 / f2) * e(qh - 2.0 * qe);
    let d22 = g2 * e(qh) - g1 * (f2 / f1) * e(2.0 * qe - qh);
    if d12.norm() == 0.0 || d22.norm() == 0.0 {
        return None;
    }
    Some([
        [-g2 * e(qh - qe) / d11, ONE / d12],
        [-g1 * e(qe - qh) / d21, ONE / d22],
    ])
}

/// True when `|det T| > 1e-12` and `T T^{-1}` is the identity to `1e-10`.
pub fn verify_bijection(t: &BasisTransform) -> bool {
    let det = det2(&t.matrix);
    if !(det.norm() > SINGULAR_THRESHOLD) {
        return false;
    }
    let product = mat_mul(&t.matrix, &inverse2(&t.matrix));
    (0..2).all(|i| {
        (0..2).all(|j| {
            let want = if i == j { ONE } else { ZERO };
            (product[i][j] - want).norm() < 1e-10
        })
    })
}

/// `T^{-1} sigma_x T`: the computational bit flip seen in the Andreev frame.
pub fn conjugated_pauli_x(t: &BasisTransform) -> Matrix2 {
    mat_mul(&inverse2(&t.matrix), &mat_mul(&PAULI_X, &t.matrix))
}

/// Applies `T^{-1} sigma_x T` to `state0` and checks that the result is
/// `state1` to `1e-10` relative. Returns the transported vector.
pub fn transport_pauli_x(t: &BasisTransform, pair: &AndreevBasisPair) -> Result<Spinor> {
    let out = mat_vec(&conjugated_pauli_x(t), &pair.state0);
    let diff = [out[0] - pair.state1[0], out[1] - pair.state1[1]];
    let residual = norm(&diff) / norm(&pair.state1);
    if residual <= TRANSPORT_TOLERANCE {
        Ok(out)
    } else {
        Err(Error::CorrespondenceViolation { residual })
    }
}
