//! Andreev bound states of a d-wave superconductor / ferromagnetic
//! insulator / superconductor (S/FI/S) junction.
//!
//! Tight-binding model (lattice constant 1, hopping `-t` on every bond):
//!
//! * superconductor on-site energy `8t - mu_s`, d-wave pairing `+Delta/2`
//!   on x-bonds and `-Delta/2` on y-bonds, phase 0 on the left lead and
//!   `phi` on the right lead;
//! * ferromagnetic insulator on-site energies `-(6t + g/2)` (up) and
//!   `6t + g/2` (down), so the exchange splitting is `V_ex = 12t + g`.
//!
//! The `M x M` cross-section has open edges, so the transverse sine modes
//! `(l, m)` decouple the problem into chains along `z`. Each channel has a
//! gap `Delta_lm = Delta (cos q_l - cos q_m)`.
//!
//! Submodules:
//! * [`quasiparticle`]: coherence factors, transverse modes, lead and
//!   barrier wavevectors;
//! * [`matching`]: boundary-matching determinant and its real roots;
//! * [`lattice`]: real-space BdG diagonalisation used as the reference;
//! * [`current`]: phase-sampled spectra, Josephson current, 0/pi parity.

pub mod current;
pub mod lattice;
pub mod matching;
pub mod quasiparticle;

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub use current::{
    critical_current_and_parity, critical_current_and_parity_with, current_phase_relation, fermi,
    free_energy, josephson_current, AndreevSpectrum, JunctionParity, JunctionType,
};
pub use lattice::{bdg_lattice_oracle, bdg_lattice_oracle_with_cap, DEFAULT_DIMENSION_CAP};
pub use matching::{
    andreev_levels, fi_amplitudes, matching_determinant, sector_levels, FiAmplitudes,
};
pub use quasiparticle::{
    coherence_factors, fi_momenta, fi_momenta_lattice, transverse_mode, wavevector_k,
};

/// Junction parameters. Energies share one unit; `t = 1` by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionParams {
    pub t: f64,
    pub mu_s: f64,
    pub delta: f64,
    pub g: f64,
    /// Transverse cell size.
    pub m: usize,
    /// Number of barrier layers.
    pub l_f: usize,
    /// Position of the left interface along `z`.
    pub lambda: f64,
    pub temperature: f64,
}

impl Default for JunctionParams {
    /// `t = 1, mu_s = 8, Delta = 2, g = 1, M = 4, L_F = 2, lambda = 0, T = 0`.
    fn default() -> Self {
        Self {
            t: 1.0,
            mu_s: 8.0,
            delta: 2.0,
            g: 1.0,
            m: 4,
            l_f: 2,
            lambda: 0.0,
            temperature: 0.0,
        }
    }
}

impl JunctionParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.t.is_finite() && self.t > 0.0) {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if !self.mu_s.is_finite() || !self.g.is_finite() || !self.lambda.is_finite() {
            return bad("mu_s, g and lambda must be finite".into());
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return bad(format!("Delta must be non-negative, got {}", self.delta));
        }
        if self.m < 2 {
            return bad(format!("M must be at least 2, got {}", self.m));
        }
        if self.l_f < 1 {
            return bad("L_F must be at least 1".into());
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("temperature must be non-negative, got {}", self.temperature));
        }
        Ok(())
    }

    /// Exchange splitting `12t + g`.
    pub fn v_ex(&self) -> f64 {
        12.0 * self.t + self.g
    }

    pub fn onsite_sc(&self) -> f64 {
        8.0 * self.t - self.mu_s
    }

    pub fn onsite_fi_up(&self) -> f64 {
        -(6.0 * self.t + 0.5 * self.g)
    }

    pub fn onsite_fi_down(&self) -> f64 {
        6.0 * self.t + 0.5 * self.g
    }
}

/// Transverse channel `(l, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub l: usize,
    pub m: usize,
    pub q_l: f64,
    pub q_m: f64,
    pub delta_lm: f64,
    pub c_q: f64,
}

impl Channel {
    pub fn new(l: usize, m: usize, params: &JunctionParams) -> Result<Self> {
        if l == 0 || m == 0 || l > params.m || m > params.m {
            return Err(Error::InvalidParameter(format!(
                "channel ({l}, {m}) outside 1..={}",
                params.m
            )));
        }
        let q = |j: usize| PI * j as f64 / (params.m + 1) as f64;
        let (q_l, q_m) = (q(l), q(m));
        Ok(Self {
            l,
            m,
            q_l,
            q_m,
            delta_lm: if l == m { 0.0 } else { params.delta * (q_l.cos() - q_m.cos()) },
            c_q: q_l.cos() + q_m.cos(),
        })
    }

    pub fn is_nodal(&self) -> bool {
        self.delta_lm == 0.0
    }

    /// Channel gap `|Delta_lm|`.
    pub fn gap(&self) -> f64 {
        self.delta_lm.abs()
    }
}

/// All `M^2` channels, ordered by `(l, m)`.
pub fn channels(params: &JunctionParams) -> Vec<Channel> {
    (1..=params.m)
        .flat_map(|l| (1..=params.m).map(move |m| (l, m)))
        .map(|(l, m)| Channel::new(l, m, params).expect("indices in range"))
        .collect()
}

/// Channels with a nonzero gap.
pub fn gapped_channels(params: &JunctionParams) -> Vec<Channel> {
    channels(params).into_iter().filter(|c| !c.is_nodal()).collect()
}
