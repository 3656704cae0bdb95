//! Cooper-pair-box spectrum.
//!
//! The Hamiltonian in the charge basis is
//!
//! ```text
//! H = 4 E_C (n - n_g)^2 - E_J cos(phi)
//! ```
//!
//! Its levels have a closed form in Mathieu characteristic values:
//! `E_k = E_C a_{nu_k}(q)` with `q = -E_J / (2 E_C)` and
//! `nu_k = k + 1 - ((k + 1) mod 2) + 2 n_g (-1)^k` for `n_g` reduced into
//! `[0, 1/2]`. This convention was fixed by comparing with
//! [`energies_charge_basis`], which diagonalises the charge-basis matrix
//! directly and serves as the reference.

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mathieu::{self, MathieuSolution, Parity, SeriesKind};

/// Parameters of a Cooper pair box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpbParams {
    /// Charging energy `e^2 / 2C`.
    pub e_c: f64,
    /// Josephson energy.
    pub e_j: f64,
    /// Offset charge in units of `2e`.
    pub n_g: f64,
    /// Flux normalisation constant. It does not enter any energy and is
    /// carried only so a parameter set can be echoed in full.
    pub phi_0: f64,
}

impl CpbParams {
    pub fn new(e_c: f64, e_j: f64, n_g: f64) -> Result<Self> {
        let p = Self {
            e_c,
            e_j,
            n_g,
            phi_0: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same box at a different offset charge.
    pub fn with_n_g(self, n_g: f64) -> Self {
        Self { n_g, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_c.is_finite() && self.e_c > 0.0) {
            return Err(Error::InvalidParameter(format!("E_C must be positive, got {}", self.e_c)));
        }
        if !(self.e_j.is_finite() && self.e_j >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "E_J must be non-negative, got {}",
                self.e_j
            )));
        }
        if !self.n_g.is_finite() {
            return Err(Error::InvalidParameter(format!("n_g must be finite, got {}", self.n_g)));
        }
        Ok(())
    }

    /// Mathieu parameter of the closed form.
    pub fn mathieu_q(&self) -> f64 {
        -self.e_j / (2.0 * self.e_c)
    }

    fn require_josephson(&self) -> Result<()> {
        self.validate()?;
        if self.e_j > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("this quantity needs E_J > 0".into()))
        }
    }
}

/// Which route produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumMethod {
    MathieuClosedForm,
    ChargeBasisOracle,
}

impl SpectrumMethod {
    pub fn tag(self) -> &'static str {
        match self {
            SpectrumMethod::MathieuClosedForm => "mathieu-closed-form",
            SpectrumMethod::ChargeBasisOracle => "charge-basis-oracle",
        }
    }
}

/// Lowest levels of the box at one offset charge, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CpbSpectrum {
    pub levels: Vec<f64>,
    pub n_g: f64,
    pub method: SpectrumMethod,
}

/// Default charge cutoff for [`energies_charge_basis`].
pub fn default_cutoff(params: &CpbParams, n_levels: usize) -> usize {
    let spread = (params.e_j / params.e_c).sqrt().ceil() as usize;
    (5 * spread + n_levels).max(20)
}

/// Lowest `n_levels` eigenvalues of the charge-basis matrix on
/// `n in [-cutoff, cutoff]` (centred on the nearest integer to `n_g`).
pub fn energies_charge_basis(
    params: &CpbParams,
    n_levels: usize,
    cutoff: usize,
) -> Result<CpbSpectrum> {
    params.validate()?;
    if n_levels == 0 {
        return Err(Error::InvalidParameter("n_levels must be at least 1".into()));
    }
    if cutoff < n_levels + 10 {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} must be at least n_levels + 10 = {}",
            n_levels + 10
        )));
    }
    let offset = params.n_g - params.n_g.round();
    let dim = 2 * cutoff + 1;
    let c = cutoff as f64;
    let h = Mat::<f64>::from_fn(dim, dim, |i, j| {
        if i == j {
            let n = i as f64 - c;
            4.0 * params.e_c * (n - offset) * (n - offset)
        } else if i.abs_diff(j) == 1 {
            -0.5 * params.e_j
        } else {
            0.0
        }
    });
    let values = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let levels: Vec<f64> = values.into_iter().take(n_levels).collect();

    let top = levels[n_levels - 1];
    let wall = 4.0 * params.e_c * (c - offset.abs()).powi(2);
    if top + params.e_j >= 0.9 * wall {
        return Err(Error::Truncation {
            cutoff,
            top_level: top,
            fraction: (top + params.e_j) / wall,
        });
    }
    Ok(CpbSpectrum {
        levels,
        n_g: params.n_g,
        method: SpectrumMethod::ChargeBasisOracle,
    })
}

/// Offset charge folded into `[0, 1/2]`, the integer shift `m`, and
/// whether the fold used the reflection `n_g -> m - n_r`.
fn reduce_offset(n_g: f64) -> (f64, f64, bool) {
    let m = n_g.floor();
    let x = n_g - m;
    if x > 0.5 {
        (1.0 - x, m + 1.0, true)
    } else {
        (x, m, false)
    }
}

/// Order and parity selecting level `k` at reduced offset `n_r`.
fn level_order(k: usize, n_r: f64) -> (f64, Parity) {
    let k1 = (k + 1) as f64;
    let base = k1 - ((k + 1) % 2) as f64;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let nu = base + 2.0 * n_r * sign;
    let parity = if k % 2 == 0 { Parity::Even } else { Parity::Odd };
    (nu, parity)
}

/// `E_k` from the Mathieu closed form.
pub fn energy_mathieu(k: usize, params: &CpbParams) -> Result<f64> {
    params.validate()?;
    let (n_r, _, _) = reduce_offset(params.n_g);
    let (nu, parity) = level_order(k, n_r);
    let q = params.mathieu_q();
    let a = match parity {
        Parity::Even => mathieu::char_value(nu, q)?,
        Parity::Odd => mathieu::char_value_odd(nu, q)?,
    };
    Ok(params.e_c * a)
}

/// Lowest `n_levels` levels from the Mathieu closed form.
pub fn energies_mathieu(params: &CpbParams, n_levels: usize) -> Result<CpbSpectrum> {
    let levels = (0..n_levels)
        .map(|k| energy_mathieu(k, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(CpbSpectrum {
        levels,
        n_g: params.n_g,
        method: SpectrumMethod::MathieuClosedForm,
    })
}

/// Eigenfunction `psi_k(phi)` in the phase representation, normalised so
/// that the integral of `|psi|^2` over one period is 1.
///
/// Built once per level; evaluate with [`CpbWavefunction::eval`].
#[derive(Debug, Clone)]
pub struct CpbWavefunction {
    solution: MathieuSolution,
    energy: f64,
    n_r: f64,
    shift: f64,
    reflected: bool,
    odd_sign: f64,
    norm: f64,
}

impl CpbWavefunction {
    pub fn new(k: usize, params: &CpbParams) -> Result<Self> {
        params.validate()?;
        let (n_r, shift, reflected) = reduce_offset(params.n_g);
        let (nu, parity) = level_order(k, n_r);
        let solution = MathieuSolution::new(nu, params.mathieu_q(), parity)?;
        let energy = params.e_c * solution.characteristic();
        let norm = match solution.kind() {
            SeriesKind::Exponential => (2.0 * PI).sqrt(),
            SeriesKind::Cosine | SeriesKind::Sine => {
                let sum: f64 = solution
                    .terms()
                    .map(|(freq, c)| if freq == 0.0 { PI * c * c } else { 0.5 * PI * c * c })
                    .sum();
                (2.0 * sum).sqrt()
            }
        };
        let odd_sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        Ok(Self {
            solution,
            energy,
            n_r,
            shift,
            reflected,
            odd_sign,
            norm,
        })
    }

    /// Level energy `E_k`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        let z = 0.5 * phi;
        let periodic = match self.solution.kind() {
            SeriesKind::Exponential => Complex64::new(
                self.solution.cos_sum(z),
                self.odd_sign * self.solution.sin_sum(z),
            ),
            _ => Complex64::new(self.solution.value(z), 0.0),
        };
        let reduced = Complex64::from_polar(1.0, self.n_r * phi) * periodic / self.norm;
        let oriented = if self.reflected { reduced.conj() } else { reduced };
        Complex64::from_polar(1.0, self.shift * phi) * oriented
    }
}

/// `psi_k(phi)` for a single phase; see [`CpbWavefunction`].
pub fn wavefunction(k: usize, phi: f64, params: &CpbParams) -> Result<Complex64> {
    Ok(CpbWavefunction::new(k, params)?.eval(phi))
}

/// `alpha = (E_2 - E_1) - (E_1 - E_0)`.
pub fn anharmonicity(params: &CpbParams) -> Result<f64> {
    let e = energies_mathieu(params, 3)?.levels;
    Ok((e[2] - e[1]) - (e[1] - e[0]))
}

/// `alpha / E_01`.
pub fn relative_anharmonicity(params: &CpbParams) -> Result<f64> {
    params.require_josephson()?;
    let e = energies_mathieu(params, 3)?.levels;
    Ok(((e[2] - e[1]) - (e[1] - e[0])) / (e[1] - e[0]))
}

/// `eps_k = E_k(n_g = 1/2) - E_k(n_g = 0)`.
pub fn charge_dispersion(k: usize, params: &CpbParams) -> Result<f64> {
    params.validate()?;
    let half = energy_mathieu(k, &params.with_n_g(0.5))?;
    let zero = energy_mathieu(k, &params.with_n_g(0.0))?;
    Ok(half - zero)
}

const SWEET_SPOT_GRID: usize = 64;
const SWEET_SPOT_STEP: f64 = 1e-4;

fn transition_energy(params: &CpbParams, n_g: f64) -> Result<f64> {
    let p = params.with_n_g(n_g);
    Ok(energy_mathieu(1, &p)? - energy_mathieu(0, &p)?)
}

/// Centred-difference derivative of `E_1 - E_0` with respect to `n_g`.
pub fn transition_slope(params: &CpbParams, n_g: f64) -> Result<f64> {
    let up = transition_energy(params, n_g + SWEET_SPOT_STEP)?;
    let down = transition_energy(params, n_g - SWEET_SPOT_STEP)?;
    Ok((up - down) / (2.0 * SWEET_SPOT_STEP))
}

/// Offset charges in `[0, 1)` where `d(E_1 - E_0)/dn_g` vanishes, ascending.
/// The `n_g` stored in `params` is ignored.
pub fn sweet_spots(params: &CpbParams) -> Result<Vec<f64>> {
    params.require_josephson()?;
    let flat = 1e-9 * params.e_c;
    let grid: Vec<f64> = (0..=SWEET_SPOT_GRID)
        .map(|i| i as f64 / SWEET_SPOT_GRID as f64)
        .collect();
    let slopes = grid
        .iter()
        .map(|&x| transition_slope(params, x))
        .collect::<Result<Vec<_>>>()?;

    let mut spots = Vec::new();
    for (i, (&x, &d)) in grid.iter().zip(&slopes).enumerate() {
        if d.abs() < flat {
            spots.push(x);
            continue;
        }
        if i + 1 < grid.len() {
            let d_next = slopes[i + 1];
            if d_next.abs() >= flat && d.signum() != d_next.signum() {
                spots.push(bisect_slope(params, x, grid[i + 1], d)?);
            }
        }
    }

    let mut folded: Vec<f64> = spots
        .into_iter()
        .map(|x| {
            let y = x - x.floor();
            if 1.0 - y < 1e-8 {
                0.0
            } else {
                y
            }
        })
        .collect();
    folded.sort_by(f64::total_cmp);
    folded.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    Ok(folded)
}

fn bisect_slope(params: &CpbParams, mut lo: f64, mut hi: f64, d_lo: f64) -> Result<f64> {
    let lo_sign = d_lo.signum();
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let d = transition_slope(params, mid)?;
        if d == 0.0 {
            return Ok(mid);
        }
        if d.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
