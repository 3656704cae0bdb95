//! Single-particle ingredients of the matching problem.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::{Channel, JunctionParams};
use crate::error::{Error, Result};

/// BdG coherence factors
/// `u = sqrt((1 + Omega/E)/2)`, `v = sqrt((1 - Omega/E)/2)` with
/// `Omega = sqrt(E^2 - Delta_lm^2)`.
///
/// Inside the gap `Omega = i sqrt(Delta_lm^2 - E^2)`. At `E = 0` the ratio
/// `Omega / E` diverges and the limiting direction
/// `(e^{i pi/4}, e^{-i pi/4}) / sqrt(2)` is returned instead.
pub fn coherence_factors(energy: f64, channel: &Channel) -> (Complex64, Complex64) {
    if energy == 0.0 {
        return (
            Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4),
            Complex64::from_polar(FRAC_1_SQRT_2, -FRAC_PI_4),
        );
    }
    let omega = channel_omega(energy, channel.delta_lm);
    let ratio = omega / energy;
    let u = (0.5 * (1.0 + ratio)).sqrt();
    let v = (0.5 * (1.0 - ratio)).sqrt();
    (u, v)
}

/// `Omega = sqrt(E^2 - Delta^2)`, continued to `i sqrt(Delta^2 - E^2)` in
/// the gap.
pub(crate) fn channel_omega(energy: f64, delta_lm: f64) -> Complex64 {
    let s = energy * energy - delta_lm * delta_lm;
    if s >= 0.0 {
        Complex64::new(s.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-s).sqrt())
    }
}

/// Normalised transverse sine mode `sqrt(2/(M+1)) sin(pi l x / (M+1))`.
pub fn transverse_mode(l: usize, m_size: usize, x: usize) -> Result<f64> {
    if l == 0 || l > m_size || x == 0 || x > m_size {
        return Err(Error::InvalidParameter(format!(
            "transverse mode ({l}, x = {x}) outside 1..={m_size}"
        )));
    }
    let n1 = (m_size + 1) as f64;
    Ok((2.0 / n1).sqrt() * (PI * (l * x) as f64 / n1).sin())
}

/// Superconductor wavevector
/// `K = arccos(4 - mu_s/2t - C - (i/2t) sqrt(Delta_lm^2 - E^2))` on the
/// branch with `Im K >= 0`.
pub fn wavevector_k(energy: f64, channel: &Channel, params: &JunctionParams) -> Complex64 {
    let root = Complex64::new(channel.delta_lm * channel.delta_lm - energy * energy, 0.0).sqrt();
    let arg = Complex64::new(4.0 - params.mu_s / (2.0 * params.t) - channel.c_q, 0.0)
        - Complex64::i() * root / (2.0 * params.t);
    upper_branch(arg.acos())
}

fn upper_branch(k: Complex64) -> Complex64 {
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}

/// Barrier momenta `(q_e, q_h)` in the closed form
///
/// ```text
/// q_e = pi + i (1 + E/2t + g/4t + C - 2 cos(pi M/(M+1)))
/// q_h =      i (1 + E/2t + g/4t - C - 2 cos(pi/(M+1)))
/// ```
///
/// This is an approximation to [`fi_momenta_lattice`]; the matching uses the
/// exact lattice momenta.
pub fn fi_momenta(energy: f64, channel: &Channel, params: &JunctionParams) -> (Complex64, Complex64) {
    let t = params.t;
    let n1 = (params.m + 1) as f64;
    let common = 1.0 + energy / (2.0 * t) + params.g / (4.0 * t);
    let q_e = Complex64::new(
        PI,
        common + channel.c_q - 2.0 * (PI * params.m as f64 / n1).cos(),
    );
    let q_h = Complex64::new(0.0, common - channel.c_q - 2.0 * (PI / n1).cos());
    (q_e, q_h)
}

/// Exact barrier momenta of the lattice model, `Im q >= 0`:
/// `cos q_e = (eps_up - 2tC - E)/2t` for electrons and
/// `cos q_h = (E + eps_down - 2tC)/2t` for holes.
pub fn fi_momenta_lattice(
    energy: f64,
    channel: &Channel,
    params: &JunctionParams,
) -> (Complex64, Complex64) {
    let t = params.t;
    let transverse = 2.0 * t * channel.c_q;
    let ce = (params.onsite_fi_up() - transverse - energy) / (2.0 * t);
    let ch = (energy + params.onsite_fi_down() - transverse) / (2.0 * t);
    (
        upper_branch(Complex64::new(ce, 0.0).acos()),
        upper_branch(Complex64::new(ch, 0.0).acos()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chan(l: usize, m: usize) -> (Channel, JunctionParams) {
        let p = JunctionParams::default();
        (Channel::new(l, m, &p).unwrap(), p)
    }

    #[test]
    fn coherence_at_gap_edge_and_far_above() {
        let (c, _) = chan(1, 3);
        let (u, v) = coherence_factors(c.delta_lm, &c);
        assert!((u.re - FRAC_1_SQRT_2).abs() < 1e-15 && u.im.abs() < 1e-15);
        assert!((v.re - FRAC_1_SQRT_2).abs() < 1e-15 && v.im.abs() < 1e-15);
        let (u, v) = coherence_factors(1e6 * c.gap(), &c);
        assert!((u.re - 1.0).abs() < 1e-10 && v.norm() < 1e-5);
        let (u, v) = coherence_factors(2.0 * c.gap(), &c);
        assert!((u.norm_sqr() + v.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coherence_limit_at_zero_energy() {
        let (c, _) = chan(1, 2);
        let (u0, v0) = coherence_factors(0.0, &c);
        let (u, v) = coherence_factors(1e-9 * c.gap(), &c);
        let n = (u.norm_sqr() + v.norm_sqr()).sqrt();
        assert!((u / n - u0).norm() < 1e-6);
        assert!((v / n - v0).norm() < 1e-6);
    }

    #[test]
    fn transverse_modes_orthonormal() {
        for m_size in 2..=16 {
            for l in 1..=m_size {
                for l2 in 1..=m_size {
                    let s: f64 = (1..=m_size)
                        .map(|x| {
                            transverse_mode(l, m_size, x).unwrap()
                                * transverse_mode(l2, m_size, x).unwrap()
                        })
                        .sum();
                    let want = if l == l2 { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-13);
                }
            }
        }
        assert!(transverse_mode(0, 4, 1).is_err());
        assert!(transverse_mode(1, 4, 5).is_err());
    }

    #[test]
    fn subgap_wavevector_decays() {
        let (c, p) = chan(1, 2);
        for i in 0..20 {
            let e = -c.gap() + 0.1 * c.gap() * i as f64 + 0.01;
            let k = wavevector_k(e, &c, &p);
            assert!(k.im > 0.0);
            let cos_k = k.cos();
            let want = Complex64::new(4.0 - p.mu_s / 2.0 - c.c_q, 0.0)
                - Complex64::i() * Complex64::new(c.delta_lm.powi(2) - e * e, 0.0).sqrt() / 2.0;
            assert!((cos_k - want).norm() < 1e-12);
        }
        // at the gap edge the argument is real: K is real, or on the line
        // |Re K| = 0 or pi when |argument| > 1
        let edge = wavevector_k(c.delta_lm, &c, &p);
        assert!(edge.cos().im.abs() < 1e-12);
        assert!((edge.cos().re + c.c_q).abs() < 1e-12);
        let on_line = edge.re.abs() < 1e-12 || (edge.re.abs() - PI).abs() < 1e-12;
        assert!(edge.im.abs() < 1e-12 || on_line);
    }

    #[test]
    fn lattice_momenta_solve_dispersion() {
        let (c, p) = chan(2, 3);
        for e in [-1.0, -0.3, 0.0, 0.4] {
            let (qe, qh) = fi_momenta_lattice(e, &c, &p);
            let lhs_e = p.onsite_fi_up() - 2.0 * p.t * c.c_q - 2.0 * p.t * qe.cos();
            assert!((lhs_e - e).norm() < 1e-12);
            let lhs_h = -(p.onsite_fi_down() - 2.0 * p.t * c.c_q - 2.0 * p.t * qh.cos());
            assert!((lhs_h - e).norm() < 1e-12);
            assert!(qe.im >= 0.0 && qh.im >= 0.0);
        }
    }

    #[test]
    fn closed_form_momenta_structure() {
        let (c, p) = chan(1, 4);
        let (qe, qh) = fi_momenta(0.0, &c, &p);
        assert_eq!(qe.re, PI);
        assert_eq!(qh.re, 0.0);
        let (qe2, _) = fi_momenta(0.2, &c, &p);
        assert!(((qe2.im - qe.im) / 0.2 - 1.0 / (2.0 * p.t)).abs() < 1e-12);
    }
}
