//! Phase-sampled Andreev spectra, Josephson current and 0/pi character.
//!
//! The current is `I(phi) = sum_n (d eps_n / d phi) f(eps_n)` in units with
//! `2e = hbar = 1`. It equals `dF/dphi` for the free energy
//! `F = -T sum_n ln(1 + exp(-eps_n / T))`, which becomes `sum_n min(eps_n, 0)`
//! at `T = 0`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::matching::andreev_levels;
use super::{gapped_channels, Channel, JunctionParams};
use crate::error::{Error, Result};

/// Fermi function `(1 - tanh(E / 2T)) / 2`; a step with `f(0) = 1/2` at `T = 0`.
pub fn fermi(energy: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        if energy < 0.0 {
            1.0
        } else if energy > 0.0 {
            0.0
        } else {
            0.5
        }
    } else {
        0.5 * (1.0 - (0.5 * energy / temperature).tanh())
    }
}

/// `-T sum ln(1 + exp(-eps/T))` over the given levels.
pub fn free_energy(levels: &[f64], temperature: f64) -> f64 {
    levels
        .iter()
        .map(|&e| {
            let ground = e.min(0.0);
            if temperature == 0.0 {
                ground
            } else {
                ground - temperature * (-e.abs() / temperature).exp().ln_1p()
            }
        })
        .sum()
}

/// Andreev levels of every gapped channel on the periodic phase grid
/// `phi_k = 2 pi k / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AndreevSpectrum {
    pub phi_grid: Vec<f64>,
    pub channels: Vec<Channel>,
    /// `levels[c][k]`: sorted levels of channel `c` at `phi_grid[k]`.
    pub levels: Vec<Vec<Vec<f64>>>,
    pub params: JunctionParams,
    /// Energy scan resolution passed to [`andreev_levels`].
    pub root_grid: usize,
}

impl AndreevSpectrum {
    pub fn compute(params: &JunctionParams, n_phi: usize, root_grid: usize) -> Result<Self> {
        params.validate()?;
        if n_phi < 8 {
            return Err(Error::InvalidParameter(format!(
                "phase grid needs at least 8 points, got {n_phi}"
            )));
        }
        let phi_grid: Vec<f64> = (0..n_phi).map(|k| TAU * k as f64 / n_phi as f64).collect();
        let channels = gapped_channels(params);
        let jobs: Vec<(usize, usize)> = (0..channels.len())
            .flat_map(|c| (0..n_phi).map(move |k| (c, k)))
            .collect();
        let flat = jobs
            .par_iter()
            .map(|&(c, k)| andreev_levels(phi_grid[k], &channels[c], params, root_grid))
            .collect::<Result<Vec<_>>>()?;
        let mut it = flat.into_iter();
        let levels = (0..channels.len())
            .map(|_| (0..n_phi).map(|_| it.next().unwrap()).collect())
            .collect();
        Ok(Self {
            phi_grid,
            channels,
            levels,
            params: *params,
            root_grid,
        })
    }

    pub fn step(&self) -> f64 {
        TAU / self.phi_grid.len() as f64
    }

    /// Grid index of `phi` (taken modulo `2 pi`).
    pub fn phase_index(&self, phi: f64) -> Result<usize> {
        let n = self.phi_grid.len();
        let x = phi.rem_euclid(TAU) / self.step();
        let k = x.round();
        if (x - k).abs() > 1e-9 * n as f64 {
            return Err(Error::PhaseNotOnGrid { phi });
        }
        Ok(k as usize % n)
    }

    /// All levels at a grid phase, sorted.
    pub fn levels_at(&self, phi: f64) -> Result<Vec<f64>> {
        let k = self.phase_index(phi)?;
        let mut all: Vec<f64> = self.levels.iter().flat_map(|c| c[k].iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        Ok(all)
    }

    /// Free energy at every grid phase.
    pub fn free_energy_curve(&self, temperature: f64) -> Vec<(f64, f64)> {
        (0..self.phi_grid.len())
            .map(|k| {
                let f = self
                    .levels
                    .iter()
                    .map(|c| free_energy(&c[k], temperature))
                    .sum();
                (self.phi_grid[k], f)
            })
            .collect()
    }
}

const MAX_REFINEMENTS: usize = 4;

/// Unmatched levels further than this fraction of the gap from the gap edge
/// mean a level was lost, not absorbed by the continuum.
const EDGE_WINDOW: f64 = 0.01;

/// Extends `levels` to `len` entries by adding `-gap` in front and `gap`
/// behind, or returns `None` when the lists cannot be paired that way.
fn pad_to_edges(levels: &[f64], len: usize, gap: f64) -> Option<Vec<f64>> {
    let missing = len.checked_sub(levels.len())?;
    if missing % 2 != 0 {
        return None;
    }
    let half = missing / 2;
    let mut out = vec![-gap; half];
    out.extend_from_slice(levels);
    out.extend(std::iter::repeat_n(gap, half));
    Some(out)
}

/// Derivative of every level of one channel at grid index `k`, from a
/// five-point stencil. Levels are paired across the stencil by rank. When
/// the level count changes inside the stencil the step is halved (with
/// fresh level computations) up to four times. A change that survives is a
/// level pair entering or leaving the continuum: the outermost levels sit
/// at the gap edge there, so the shorter lists are padded with `-gap` and
/// `gap`.
fn channel_slopes(spectrum: &AndreevSpectrum, c: usize, k: usize) -> Result<Vec<f64>> {
    let n = spectrum.phi_grid.len();
    let phi = spectrum.phi_grid[k];
    let channel = &spectrum.channels[c];
    let mut h = spectrum.step();
    let mut stencil: Vec<Vec<f64>> = [-2i64, -1, 1, 2]
        .iter()
        .map(|&o| spectrum.levels[c][(k as i64 + o).rem_euclid(n as i64) as usize].clone())
        .collect();
    let centre = &spectrum.levels[c][k];
    for refinement in 0..=MAX_REFINEMENTS {
        if stencil.iter().all(|s| s.len() == centre.len()) {
            let slopes = (0..centre.len())
                .map(|i| {
                    (stencil[0][i] - 8.0 * stencil[1][i] + 8.0 * stencil[2][i] - stencil[3][i])
                        / (12.0 * h)
                })
                .collect();
            return Ok(slopes);
        }
        if refinement == MAX_REFINEMENTS {
            if let Some(padded) = pad_stencil(&stencil, centre, channel.gap()) {
                let [m2, m1, p1, p2] = [&padded[0], &padded[1], &padded[3], &padded[4]];
                let width = padded[2].len();
                let slopes = (0..width)
                    .map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
                    .collect::<Vec<_>>();
                // keep only the levels that exist at the centre
                let offset = (width - centre.len()) / 2;
                return Ok(slopes[offset..offset + centre.len()].to_vec());
            }
            break;
        }
        h *= 0.5;
        stencil = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|&o| andreev_levels(phi + o * h, channel, &spectrum.params, spectrum.root_grid))
            .collect::<Result<Vec<_>>>()?;
    }
    Err(Error::Tracking {
        phi_lo: phi - 2.0 * h,
        phi_hi: phi + 2.0 * h,
    })
}

/// Stencil rows (centre in the middle) padded to a common length, if
/// every level without a partner lies within [`EDGE_WINDOW`] of the edge.
fn pad_stencil(stencil: &[Vec<f64>], centre: &[f64], gap: f64) -> Option<Vec<Vec<f64>>> {
    let rows = [&stencil[0][..], &stencil[1], centre, &stencil[2], &stencil[3]];
    let width = rows.iter().map(|r| r.len()).max()?;
    let shortest = rows.iter().map(|r| r.len()).min()?;
    let unmatched = (width - shortest) / 2;
    for row in &rows {
        let mut outer = row.iter().take(unmatched).chain(row.iter().rev().take(unmatched));
        if row.len() == width && outer.any(|e| gap - e.abs() > EDGE_WINDOW * gap) {
            return None;
        }
    }
    rows.iter().map(|r| pad_to_edges(r, width, gap)).collect()
}

fn current_at_index(spectrum: &AndreevSpectrum, k: usize, temperature: f64) -> Result<f64> {
    let mut total = 0.0;
    for c in 0..spectrum.channels.len() {
        let slopes = channel_slopes(spectrum, c, k)?;
        total += slopes
            .iter()
            .zip(&spectrum.levels[c][k])
            .map(|(d, &e)| d * fermi(e, temperature))
            .sum::<f64>();
    }
    Ok(total)
}

/// Josephson current at a grid phase of `spectrum`, at `params.temperature`.
pub fn josephson_current(phi: f64, params: &JunctionParams, spectrum: &AndreevSpectrum) -> Result<f64> {
    params.validate()?;
    let k = spectrum.phase_index(phi)?;
    current_at_index(spectrum, k, params.temperature)
}

/// `(phi, I(phi))` over the whole grid of `spectrum`.
pub fn current_phase_relation(
    params: &JunctionParams,
    spectrum: &AndreevSpectrum,
) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    (0..spectrum.phi_grid.len())
        .into_par_iter()
        .map(|k| Ok((spectrum.phi_grid[k], current_at_index(spectrum, k, params.temperature)?)))
        .collect()
}

/// Ground-state phase of the junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JunctionType {
    Zero,
    Pi,
}

impl JunctionType {
    pub fn tag(self) -> &'static str {
        match self {
            JunctionType::Zero => "zero",
            JunctionType::Pi => "pi",
        }
    }
}

/// Summary returned by [`critical_current_and_parity`].
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionParity {
    /// `max |I(phi)|` over the phase grid.
    pub critical_current: f64,
    /// From the position of the free-energy minimum.
    pub junction_type: JunctionType,
    /// `dI/dphi` at `phi = 0`, from the free-energy curvature.
    pub slope_at_zero: f64,
    pub current: Vec<(f64, f64)>,
    pub free_energy: Vec<(f64, f64)>,
}

/// Phase offset used for the curvature of `F` at zero.
pub const CURVATURE_STEP: f64 = 0.02;

/// [`critical_current_and_parity_with`] on a 64-point phase grid with a
/// 128-point energy scan.
pub fn critical_current_and_parity(params: &JunctionParams) -> Result<JunctionParity> {
    critical_current_and_parity_with(params, 64, 128)
}

pub fn critical_current_and_parity_with(
    params: &JunctionParams,
    n_phi: usize,
    root_grid: usize,
) -> Result<JunctionParity> {
    let spectrum = AndreevSpectrum::compute(params, n_phi, root_grid)?;
    let current = current_phase_relation(params, &spectrum)?;
    let free = spectrum.free_energy_curve(params.temperature);
    let critical_current = current.iter().fold(0.0_f64, |m, &(_, i)| m.max(i.abs()));

    let (phi_min, _) = free
        .iter()
        .copied()
        .fold((0.0, f64::INFINITY), |best, p| if p.1 < best.1 { p } else { best });
    let to_zero = phi_min.min(TAU - phi_min);
    let to_pi = (phi_min - PI).abs();
    let junction_type = if to_zero < to_pi {
        JunctionType::Zero
    } else {
        JunctionType::Pi
    };

    let f_at = |phi: f64| -> Result<f64> {
        spectrum
            .channels
            .par_iter()
            .map(|c| Ok(free_energy(&andreev_levels(phi, c, params, root_grid)?, params.temperature)))
            .sum()
    };
    let f0 = f_at(0.0)?;
    let f1 = f_at(CURVATURE_STEP)?;
    let slope_at_zero = 2.0 * (f1 - f0) / (CURVATURE_STEP * CURVATURE_STEP);

    Ok(JunctionParity {
        critical_current,
        junction_type,
        slope_at_zero,
        current,
        free_energy: free,
    })
}
