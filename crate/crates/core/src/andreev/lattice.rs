//! Real-space Bogoliubov-de Gennes diagonalisation of a finite
//! S / FI / S stack on an `M x M` cross-section.
//!
//! The Hamiltonian conserves spin, so it splits into the sectors
//! `(c_up, c_down^dagger)` and `(c_down, c_up^dagger)`. Both are built and
//! diagonalised; their union is the full quasiparticle spectrum.

use faer::{Mat, Side};
use num_complex::Complex64;

use super::JunctionParams;
use crate::error::{Error, Result};

/// Largest sector dimension accepted by [`bdg_lattice_oracle`].
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Spin sector of the BdG Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// basis `(c_up, c_down^dagger)`
    UpElectron,
    /// basis `(c_down, c_up^dagger)`
    DownElectron,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    LeftLead,
    Barrier,
    RightLead,
}

struct Geometry {
    m: usize,
    layers: usize,
    sc_layers: usize,
    l_f: usize,
}

impl Geometry {
    fn sites(&self) -> usize {
        self.layers * self.m * self.m
    }

    fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.m + y) * self.m + x
    }

    fn region(&self, z: usize) -> Region {
        if z < self.sc_layers {
            Region::LeftLead
        } else if z < self.sc_layers + self.l_f {
            Region::Barrier
        } else {
            Region::RightLead
        }
    }
}

/// Dense BdG matrix of one spin sector (dimension `2 (2 sc_layers + L_F) M^2`).
pub fn bdg_sector_matrix(
    phi: f64,
    params: &JunctionParams,
    sc_layers: usize,
    sector: Sector,
) -> Mat<Complex64> {
    let geo = Geometry {
        m: params.m,
        layers: 2 * sc_layers + params.l_f,
        sc_layers,
        l_f: params.l_f,
    };
    let n = geo.sites();
    let mut h = Mat::<Complex64>::zeros(2 * n, 2 * n);
    let t = params.t;
    let (eps_e, eps_h) = match sector {
        Sector::UpElectron => (params.onsite_fi_up(), params.onsite_fi_down()),
        Sector::DownElectron => (params.onsite_fi_down(), params.onsite_fi_up()),
    };
    // pairing block sign: +D for the first sector, -D for the second
    let pair_sign = match sector {
        Sector::UpElectron => 1.0,
        Sector::DownElectron => -1.0,
    };

    for z in 0..geo.layers {
        let region = geo.region(z);
        let theta = match region {
            Region::RightLead => phi,
            _ => 0.0,
        };
        for y in 0..geo.m {
            for x in 0..geo.m {
                let i = geo.index(x, y, z);
                let (on_e, on_h) = match region {
                    Region::Barrier => (eps_e, eps_h),
                    _ => (params.onsite_sc(), params.onsite_sc()),
                };
                h[(i, i)] = Complex64::new(on_e, 0.0);
                h[(n + i, n + i)] = Complex64::new(-on_h, 0.0);

                let neighbours = [
                    (x + 1 < geo.m).then(|| geo.index(x + 1, y, z)),
                    (y + 1 < geo.m).then(|| geo.index(x, y + 1, z)),
                    (z + 1 < geo.layers).then(|| geo.index(x, y, z + 1)),
                ];
                for j in neighbours.into_iter().flatten() {
                    h[(i, j)] = Complex64::new(-t, 0.0);
                    h[(j, i)] = Complex64::new(-t, 0.0);
                    h[(n + i, n + j)] = Complex64::new(t, 0.0);
                    h[(n + j, n + i)] = Complex64::new(t, 0.0);
                }

                if region == Region::Barrier {
                    continue;
                }
                let bonds = [
                    ((x + 1 < geo.m).then(|| geo.index(x + 1, y, z)), 1.0),
                    ((y + 1 < geo.m).then(|| geo.index(x, y + 1, z)), -1.0),
                ];
                for (j, sign) in bonds {
                    let Some(j) = j else { continue };
                    let d = Complex64::from_polar(pair_sign * sign * 0.5 * params.delta, theta);
                    // D is symmetric; the lower-left block is its adjoint
                    h[(i, n + j)] = d;
                    h[(j, n + i)] = d;
                    h[(n + j, i)] = d.conj();
                    h[(n + i, j)] = d.conj();
                }
            }
        }
    }
    h
}

/// Eigenvalues of a single sector, ascending.
pub fn bdg_sector_spectrum(
    phi: f64,
    params: &JunctionParams,
    sc_layers: usize,
    sector: Sector,
    cap: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if sc_layers < 8 {
        return Err(Error::InvalidParameter(format!(
            "sc_layers must be at least 8, got {sc_layers}"
        )));
    }
    let dimension = 2 * (2 * sc_layers + params.l_f) * params.m * params.m;
    if dimension > cap {
        return Err(Error::LatticeTooLarge { dimension, cap });
    }
    bdg_sector_matrix(phi, params, sc_layers, sector)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// Both sectors' eigenvalues with `|E| < 2 Delta`, sorted ascending.
pub fn bdg_lattice_oracle(phi: f64, params: &JunctionParams, sc_layers: usize) -> Result<Vec<f64>> {
    bdg_lattice_oracle_with_cap(phi, params, sc_layers, DEFAULT_DIMENSION_CAP)
}

/// [`bdg_lattice_oracle`] with an explicit per-sector dimension cap.
pub fn bdg_lattice_oracle_with_cap(
    phi: f64,
    params: &JunctionParams,
    sc_layers: usize,
    cap: usize,
) -> Result<Vec<f64>> {
    let window = 2.0 * params.delta;
    let mut levels = Vec::new();
    for sector in [Sector::UpElectron, Sector::DownElectron] {
        let spectrum = bdg_sector_spectrum(phi, params, sc_layers, sector, cap)?;
        levels.extend(spectrum.into_iter().filter(|e| e.abs() < window));
    }
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}
