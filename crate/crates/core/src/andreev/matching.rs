//! Boundary matching for one transverse channel.
//!
//! Works in the spin sector with spinor (up-electron, down-hole). Inside
//! the gap each lead contributes two modes that decay away from the
//! barrier. The barrier carries one electron and one hole pair of modes
//! `exp(-+ i q z)`. The coordinate `z` is measured from the left interface
//! site `lambda`, and the barrier occupies sites `1..=L_F`.
//!
//! On a lattice, equating the two wavefunctions at one site per interface
//! gives too few equations. Both solutions are therefore required to agree
//! on two adjacent sites per interface (`z = 0, 1` and `z = L_F, L_F + 1`),
//! which is the discrete Schroedinger equation at the boundary sites. The
//! result is a homogeneous 8x8 system in
//! `(left_0, left_1, f_1, f_2, g_1, g_2, right_0, right_1)`.
//!
//! The other spin sector has the mirrored spectrum `-E`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use super::quasiparticle::{channel_omega, fi_momenta_lattice, wavevector_k};
use super::{Channel, JunctionParams};
use crate::error::{Error, Result};

type Matrix8 = [[Complex64; 8]; 8];

/// Lead spinor `(Delta_lm e^{i theta/2}, (E - xi) e^{-i theta/2})`.
fn lead_spinor(energy: f64, xi: Complex64, delta_lm: f64, theta: f64) -> [Complex64; 2] {
    [
        Complex64::from_polar(delta_lm, 0.5 * theta),
        (Complex64::new(energy, 0.0) - xi) * Complex64::from_polar(1.0, -0.5 * theta),
    ]
}

#[derive(Debug, Clone, Copy)]
struct BarrierMode {
    /// electron (0) or hole (1) component
    component: usize,
    /// signed momentum: the mode is exp(i k z)
    k: Complex64,
    /// site where the mode is referenced to unit modulus
    origin: f64,
}

fn barrier_modes(energy: f64, channel: &Channel, params: &JunctionParams) -> [BarrierMode; 4] {
    let (q_e, q_h) = fi_momenta_lattice(energy, channel, params);
    let right = (params.l_f + 1) as f64;
    let mode = |component, k: Complex64| BarrierMode {
        component,
        k,
        // growing towards +z => reference at the right interface
        origin: if k.im < 0.0 { right } else { 0.0 },
    };
    [mode(0, -q_e), mode(0, q_e), mode(1, -q_h), mode(1, q_h)]
}

fn check_subgap(energy: f64, channel: &Channel) -> Result<()> {
    if channel.is_nodal() {
        return Err(Error::NodalChannel {
            l: channel.l,
            m: channel.m,
        });
    }
    if !(energy.abs() < channel.gap()) {
        return Err(Error::OutsideGap {
            energy,
            gap: channel.gap(),
        });
    }
    Ok(())
}

fn matching_matrix(
    energy: f64,
    phi: f64,
    channel: &Channel,
    params: &JunctionParams,
) -> Result<(Matrix8, [BarrierMode; 4])> {
    params.validate()?;
    check_subgap(energy, channel)?;
    let k = wavevector_k(energy, channel, params);
    let omega = channel_omega(energy, channel.delta_lm);
    let d = channel.delta_lm;
    let left = [(-k, omega), (k.conj(), -omega)];
    let right = [(k, omega), (-k.conj(), -omega)];
    let barrier = barrier_modes(energy, channel, params);
    let l_f = params.l_f as f64;

    let zero = Complex64::new(0.0, 0.0);
    let mut a = [[zero; 8]; 8];
    let mut row = 0;
    for z in [0.0, 1.0] {
        for comp in 0..2 {
            for (j, &(kk, xi)) in left.iter().enumerate() {
                a[row][j] = lead_spinor(energy, xi, d, 0.0)[comp] * (Complex64::i() * kk * z).exp();
            }
            for (j, mode) in barrier.iter().enumerate() {
                if mode.component == comp {
                    a[row][2 + j] = -(Complex64::i() * mode.k * (z - mode.origin)).exp();
                }
            }
            row += 1;
        }
    }
    for z in [l_f, l_f + 1.0] {
        for comp in 0..2 {
            for (j, mode) in barrier.iter().enumerate() {
                if mode.component == comp {
                    a[row][2 + j] = (Complex64::i() * mode.k * (z - mode.origin)).exp();
                }
            }
            for (j, &(kk, xi)) in right.iter().enumerate() {
                a[row][6 + j] = -lead_spinor(energy, xi, d, phi)[comp]
                    * (Complex64::i() * kk * (z - l_f - 1.0)).exp();
            }
            row += 1;
        }
    }
    Ok((a, barrier))
}

fn determinant8(mut a: Matrix8) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..8 {
        let pivot = (col..8)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for r in col + 1..8 {
            let factor = a[r][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..8 {
                let sub = factor * a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Determinant of the matching system; its real zeros in `E` are the
/// Andreev levels of the channel (this spin sector).
pub fn matching_determinant(
    energy: f64,
    phi: f64,
    channel: &Channel,
    params: &JunctionParams,
) -> Result<Complex64> {
    let (a, _) = matching_matrix(energy, phi, channel, params)?;
    Ok(determinant8(a))
}

/// Sub-gap levels of one channel at phase `phi`: the roots of this sector
/// together with their mirrors `-E`, sorted ascending. Degenerate levels
/// appear with their multiplicity.
///
/// `grid` (at least 64) is the number of scan points over
/// `(-|Delta_lm|, |Delta_lm|)`. They are spaced uniformly in `theta` with
/// `E = |Delta_lm| cos(theta)`, so the spacing shrinks quadratically
/// towards the gap edges where weakly bound levels sit.
pub fn andreev_levels(
    phi: f64,
    channel: &Channel,
    params: &JunctionParams,
    grid: usize,
) -> Result<Vec<f64>> {
    let mut roots = sector_levels(phi, channel, params, grid)?;
    let mirrored: Vec<f64> = roots.iter().map(|r| -r).collect();
    roots.extend(mirrored);
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Roots of the matching determinant of this spin sector only (no
/// mirrors), sorted ascending. These are the energies accepted by
/// [`fi_amplitudes`].
pub fn sector_levels(
    phi: f64,
    channel: &Channel,
    params: &JunctionParams,
    grid: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if channel.is_nodal() {
        return Err(Error::NodalChannel {
            l: channel.l,
            m: channel.m,
        });
    }
    if grid < 64 {
        return Err(Error::InvalidParameter(format!("grid must be at least 64, got {grid}")));
    }
    let gap = channel.gap();
    let xs: Vec<f64> = (1..=grid)
        .rev()
        .map(|i| gap * (PI * i as f64 / (grid + 1) as f64).cos())
        .collect();
    let det = |e: f64| matching_determinant(e, phi, channel, params);
    find_roots(&det, xs, 0)
}

const MAX_ZOOM_DEPTH: usize = 4;
const ZOOM_POINTS: usize = 16;
const ACCEPT_RATIO: f64 = 1e-6;

/// Phase-jump test: `d` and `reference` point in opposite half-planes.
fn opposite(d: Complex64, reference: Complex64) -> bool {
    (d * reference.conj()).re < 0.0
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Roots of `det` bracketed by the ascending sample points `xs`.
fn find_roots<F>(det: &F, xs: Vec<f64>, depth: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let n = xs.len();
    let ds = xs.iter().map(|&x| det(x)).collect::<Result<Vec<_>>>()?;
    let jump: Vec<bool> = (1..n).map(|i| opposite(ds[i], ds[i - 1])).collect();

    let mut roots = Vec::new();
    for i in 1..n {
        if jump[i - 1] {
            let r = bisect(det, xs[i - 1], xs[i], ds[i - 1])?;
            if det(r)?.norm() < ACCEPT_RATIO * (ds[i].norm() + ds[i - 1].norm()) {
                roots.push(r);
            }
        }
    }
    // |det| dips without a phase jump: possible double root
    for i in 1..n - 1 {
        let dip = ds[i].norm() < ds[i - 1].norm() && ds[i].norm() < ds[i + 1].norm();
        if !dip || jump[i - 1] || jump[i] {
            continue;
        }
        if depth < MAX_ZOOM_DEPTH {
            roots.extend(find_roots(det, linspace(xs[i - 1], xs[i + 1], ZOOM_POINTS), depth + 1)?);
        } else {
            let e = golden_min(det, xs[i - 1], xs[i + 1])?;
            let floor = ds[i - 1].norm().max(ds[i + 1].norm());
            if det(e)?.norm() < ACCEPT_RATIO * floor {
                roots.push(e);
                roots.push(e);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn bisect<F>(det: &F, mut lo: f64, mut hi: f64, mut d_lo: Complex64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let d = det(mid)?;
        if opposite(d, d_lo) {
            hi = mid;
        } else {
            lo = mid;
            d_lo = d;
        }
    }
}

fn golden_min<F>(det: &F, mut a: f64, mut b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = det(c)?.norm();
    let mut fd = det(d)?.norm();
    while b - a > 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = det(c)?.norm();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = det(d)?.norm();
        }
        if c >= d {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Barrier amplitudes of a bound state, in the convention
/// `psi_FI(z) = (f1 e^{-i q_e z} + f2 e^{i q_e z}, g1 e^{-i q_h z} + g2 e^{i q_h z})`
/// with `z` the absolute coordinate (left interface at `z = lambda`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiAmplitudes {
    pub energy: f64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
    pub q_e: Complex64,
    pub q_h: Complex64,
    /// Smallest singular value over the largest of the matching matrix.
    pub residual: f64,
}

/// Null vector of the matching system at a level `energy`, converted to
/// barrier amplitudes. The overall scale and phase are fixed by making the
/// largest amplitude real and positive with unit Euclidean norm.
pub fn fi_amplitudes(
    energy: f64,
    phi: f64,
    channel: &Channel,
    params: &JunctionParams,
) -> Result<FiAmplitudes> {
    let (a, barrier) = matching_matrix(energy, phi, channel, params)?;
    let mat = Mat::<Complex64>::from_fn(8, 8, |i, j| a[i][j]);
    let svd = mat
        .svd()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let residual = s[7].re / s[0].re;
    let v = svd.V();
    let null: Vec<Complex64> = (0..8).map(|i| v[(i, 7)]).collect();

    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for (j, mode) in barrier.iter().enumerate() {
        // local mode exp(i k (z_loc - origin)), z_loc = z - lambda
        let shift = params.lambda + mode.origin;
        amps[j] = null[2 + j] * (-Complex64::i() * mode.k * shift).exp();
    }
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let largest = amps
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap();
    let phase = largest.conj() / largest.norm();
    let amps: Vec<Complex64> = amps.iter().map(|c| c * phase / norm).collect();
    // barrier modes are ordered (-q_e, q_e, -q_h, q_h) = (f1, f2, g1, g2)
    Ok(FiAmplitudes {
        energy,
        f1: amps[0],
        f2: amps[1],
        g1: amps[2],
        g2: amps[3],
        q_e: barrier[1].k,
        q_h: barrier[3].k,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(l_f: usize) -> JunctionParams {
        JunctionParams {
            l_f,
            ..JunctionParams::default()
        }
    }

    #[test]
    fn determinant8_matches_known_values() {
        let zero = Complex64::new(0.0, 0.0);
        let mut a = [[zero; 8]; 8];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0 + i as f64, 0.5);
            row[(i + 1) % 8] = Complex64::new(0.0, 1.0);
        }
        let mat = Mat::<Complex64>::from_fn(8, 8, |i, j| a[i][j]);
        let want = mat.determinant();
        assert!((determinant8(a) - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn nodal_and_outside_gap_errors() {
        let p = fixture(2);
        let nodal = Channel::new(2, 2, &p).unwrap();
        assert!(matches!(
            andreev_levels(0.0, &nodal, &p, 64),
            Err(Error::NodalChannel { l: 2, m: 2 })
        ));
        let c = Channel::new(1, 3, &p).unwrap();
        assert!(matches!(
            matching_determinant(c.gap(), 0.0, &c, &p),
            Err(Error::OutsideGap { .. })
        ));
        assert!(andreev_levels(0.0, &c, &p, 10).is_err());
    }

    #[test]
    fn determinant_is_two_pi_periodic() {
        let p = fixture(3);
        let c = Channel::new(1, 2, &p).unwrap();
        for e in [-0.3, 0.1, 0.5] {
            let e = e * c.gap();
            let a = matching_determinant(e, 0.7, &c, &p).unwrap();
            let b = matching_determinant(e, 0.7 + 2.0 * std::f64::consts::PI, &c, &p).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm());
        }
    }

    #[test]
    fn levels_are_symmetric_and_inside_gap() {
        let p = fixture(2);
        for c in super::super::gapped_channels(&p) {
            let levels = andreev_levels(1.1, &c, &p, 128).unwrap();
            for (a, b) in levels.iter().zip(levels.iter().rev()) {
                assert!((a + b).abs() < 1e-12);
            }
            assert!(levels.iter().all(|e| e.abs() < c.gap()));
        }
    }

    #[test]
    fn null_vector_is_a_solution() {
        let p = fixture(2);
        let c = Channel::new(1, 3, &p).unwrap();
        let levels = sector_levels(0.9, &c, &p, 128).unwrap();
        let e = *levels.last().unwrap();
        let amps = fi_amplitudes(e, 0.9, &c, &p).unwrap();
        assert!(amps.residual < 1e-8, "residual {}", amps.residual);
        let n = amps.f1.norm_sqr() + amps.f2.norm_sqr() + amps.g1.norm_sqr() + amps.g2.norm_sqr();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
