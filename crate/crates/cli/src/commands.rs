use std::f64::consts::TAU;

use num_complex::Complex64;
use qspectra::andreev::{
    andreev_levels, bdg_lattice_oracle, critical_current_and_parity_with, current_phase_relation,
    gapped_channels, AndreevSpectrum, Channel, JunctionParams,
};
use qspectra::basis_map::{
    build_transform, conjugated_pauli_x, mat_vec, transport_pauli_x, AndreevBasisPair, Spinor,
};
use qspectra::cpb::{
    anharmonicity, charge_dispersion, default_cutoff, energies_charge_basis, energies_mathieu,
    relative_anharmonicity, CpbParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::error::{invalid, CliResult};
use crate::output::{Cell, Plot, Table};

type Point<'a> = Option<(&'a str, f64)>;

pub fn run(cfg: &RunConfig) -> CliResult<Table> {
    match cfg.command {
        Command::CpbLevels => cpb_levels(cfg),
        Command::CpbDispersion => cpb_dispersion(cfg),
        Command::CpbAnharmonicity => cpb_anharmonicity(cfg),
        Command::JunctionLevels => junction_levels(cfg),
        Command::JunctionCurrent => junction_current(cfg),
        Command::JunctionParity => junction_parity(cfg),
        Command::BasisMap => basis_map(cfg),
        Command::OracleCompare => oracle_compare(cfg),
    }
}

fn cpb_params(cfg: &RunConfig, point: Point) -> CliResult<CpbParams> {
    let e_c = cfg.number("e_c", point);
    let p = CpbParams {
        e_c,
        e_j: cfg.number("ej_over_ec", point) * e_c,
        n_g: cfg.number("n_g", point),
        phi_0: cfg.number("phi_0", point),
    };
    p.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(p)
}

fn junction_params(cfg: &RunConfig, point: Point) -> CliResult<JunctionParams> {
    let p = JunctionParams {
        t: cfg.number("t", point),
        mu_s: cfg.number("mu_s", point),
        delta: cfg.number("delta", point),
        g: cfg.number("g", point),
        m: cfg.integer("m", point),
        l_f: cfg.integer("l_f", point),
        lambda: cfg.number("lambda", point),
        temperature: cfg.number("temperature", point),
    };
    p.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(p)
}

/// Validates every sweep point up front, then evaluates them in parallel
/// and returns the results in sweep order.
fn sweep_map<P, T, F>(
    cfg: &RunConfig,
    build: impl Fn(&RunConfig, Point) -> CliResult<P>,
    eval: F,
) -> CliResult<(String, Vec<(f64, T)>)>
where
    P: Sync,
    T: Send,
    F: Fn(f64, &P) -> CliResult<T> + Sync,
{
    let (key, xs) = cfg.axis_points();
    let params = xs
        .iter()
        .map(|&x| build(cfg, Some((key.as_str(), x))))
        .collect::<CliResult<Vec<_>>>()?;
    let results = xs
        .par_iter()
        .zip(params.par_iter())
        .map(|(&x, p)| Ok((x, eval(x, p)?)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((key, results))
}

fn n_levels(cfg: &RunConfig) -> CliResult<usize> {
    let n = cfg.integer("n_levels", None);
    if n == 0 {
        return Err(invalid("n_levels must be at least 1"));
    }
    Ok(n)
}

fn cpb_levels(cfg: &RunConfig) -> CliResult<Table> {
    let n = n_levels(cfg)?;
    let oracle = cfg.raw("method") == "charge-basis";
    let (key, rows) = sweep_map(cfg, cpb_params, |_, p| {
        let spectrum = if oracle {
            energies_charge_basis(p, n, default_cutoff(p, n))?
        } else {
            energies_mathieu(p, n)?
        };
        Ok(spectrum.levels)
    })?;
    let mut table = Table {
        columns: std::iter::once(key.clone())
            .chain((0..n).map(|k| format!("E{k}")))
            .collect(),
        plot: Plot::new("Cooper pair box levels", &key, "E_k / E_C"),
        ..Table::default()
    };
    for (x, levels) in rows {
        let e_c = cfg.number("e_c", Some((key.as_str(), x)));
        for (k, e) in levels.iter().enumerate() {
            table.plot.push(&format!("E{k}"), x, e / e_c);
        }
        table
            .rows
            .push(std::iter::once(x.into()).chain(levels.into_iter().map(Cell::from)).collect());
    }
    Ok(table)
}

fn cpb_dispersion(cfg: &RunConfig) -> CliResult<Table> {
    let n = n_levels(cfg)?;
    let (key, rows) = sweep_map(cfg, cpb_params, |_, p| {
        let eps = (0..n)
            .map(|k| charge_dispersion(k, p))
            .collect::<qspectra::Result<Vec<_>>>()?;
        let at_zero = energies_mathieu(&p.with_n_g(0.0), 2)?.levels;
        Ok((p.e_j / p.e_c, eps, at_zero[1] - at_zero[0], p.e_c))
    })?;
    let mut columns = vec![key.clone(), "sqrt_8ej_over_ec".to_string()];
    columns.extend((0..n).map(|k| format!("eps{k}")));
    columns.push("e01".into());
    let mut table = Table {
        columns,
        plot: Plot::new("Charge dispersion", "sqrt(8 E_J / E_C)", "ln |eps_k / E_C|"),
        ..Table::default()
    };
    for (x, (ratio, eps, e01, e_c)) in rows {
        let s = (8.0 * ratio).sqrt();
        for (k, e) in eps.iter().enumerate() {
            table.plot.push(&format!("eps{k}"), s, (e / e_c).abs().ln());
        }
        let mut row: Vec<Cell> = vec![x.into(), s.into()];
        row.extend(eps.into_iter().map(Cell::from));
        row.push(e01.into());
        table.rows.push(row);
    }
    Ok(table)
}

fn cpb_anharmonicity(cfg: &RunConfig) -> CliResult<Table> {
    let (key, rows) = sweep_map(cfg, cpb_params, |_, p| {
        let alpha = anharmonicity(p)?;
        let relative = if p.e_j > 0.0 { relative_anharmonicity(p)? } else { f64::NAN };
        let e = energies_mathieu(p, 2)?.levels;
        Ok((alpha, relative, e[1] - e[0], p.e_c))
    })?;
    let mut table = Table {
        columns: vec![key.clone(), "alpha".into(), "alpha_over_e01".into(), "e01".into()],
        plot: Plot::new("Anharmonicity", &key, "dimensionless"),
        ..Table::default()
    };
    for (x, (alpha, relative, e01, e_c)) in rows {
        table.plot.push("alpha / E_C", x, alpha / e_c);
        table.plot.push("alpha / E_01", x, relative);
        table
            .rows
            .push(vec![x.into(), alpha.into(), relative.into(), e01.into()]);
    }
    Ok(table)
}

fn level_rows(phi: f64, p: &JunctionParams, grid: usize) -> CliResult<Vec<(Channel, Vec<f64>)>> {
    gapped_channels(p)
        .par_iter()
        .map(|c| Ok((*c, andreev_levels(phi, c, p, grid)?)))
        .collect()
}

fn check_grid(grid: usize) -> CliResult<usize> {
    if grid < 64 {
        return Err(invalid(format!("root_grid must be at least 64, got {grid}")));
    }
    Ok(grid)
}

fn junction_levels(cfg: &RunConfig) -> CliResult<Table> {
    let grid = check_grid(cfg.integer("root_grid", None))?;
    let (key, _) = cfg.axis_points();
    let axis_is_phi = key == "phi";
    let (key, rows) = sweep_map(cfg, junction_params, |x, p| {
        let phi = cfg.number("phi", Some((key.as_str(), x)));
        Ok((phi, p.delta, level_rows(phi, p, grid)?))
    })?;
    let mut columns: Vec<String> = Vec::new();
    if !axis_is_phi {
        columns.push(key.clone());
    }
    columns.extend(["phi", "l", "m", "n", "energy", "delta_lm"].map(String::from));
    let x_label = if axis_is_phi { "phi" } else { key.as_str() };
    let mut table = Table {
        columns,
        plot: Plot::new("Andreev levels", x_label, "E / Delta"),
        ..Table::default()
    };
    for (x, (phi, delta, channels)) in rows {
        for (c, levels) in channels {
            for (n, e) in levels.iter().enumerate() {
                let mut row: Vec<Cell> = Vec::new();
                if !axis_is_phi {
                    row.push(x.into());
                }
                row.extend([
                    phi.into(),
                    c.l.into(),
                    c.m.into(),
                    n.into(),
                    (*e).into(),
                    c.delta_lm.into(),
                ]);
                table.rows.push(row);
                let scale = if delta > 0.0 { delta } else { 1.0 };
                table
                    .plot
                    .scatter(&format!("({},{})", c.l, c.m), x, e / scale);
            }
        }
    }
    Ok(table)
}

fn phase_grid(cfg: &RunConfig) -> CliResult<usize> {
    let n = cfg.integer("n_phi", None);
    if n < 8 {
        return Err(invalid(format!("n_phi must be at least 8, got {n}")));
    }
    Ok(n)
}

fn junction_current(cfg: &RunConfig) -> CliResult<Table> {
    let grid = check_grid(cfg.integer("root_grid", None))?;
    let n_phi = phase_grid(cfg)?;
    let swept = cfg.sweep.is_some();
    let (key, rows) = sweep_map(cfg, junction_params, |_, p| {
        let spectrum = AndreevSpectrum::compute(p, n_phi, grid)?;
        let current = current_phase_relation(p, &spectrum)?;
        let free = spectrum.free_energy_curve(p.temperature);
        Ok((current, free))
    })?;
    let mut columns = Vec::new();
    if swept {
        columns.push(key.clone());
    }
    columns.extend(["phi", "current", "free_energy"].map(String::from));
    let mut table = Table {
        columns,
        plot: Plot::new("Current-phase relation", "phi", "I (2e/hbar = 1)"),
        ..Table::default()
    };
    for (x, (current, free)) in rows {
        let name = if swept { format!("{key}={x}") } else { "I".to_string() };
        for ((phi, i), (_, f)) in current.into_iter().zip(free) {
            let mut row: Vec<Cell> = Vec::new();
            if swept {
                row.push(x.into());
            }
            row.extend([phi.into(), i.into(), f.into()]);
            table.rows.push(row);
            table.plot.push(&name, phi, i);
        }
    }
    Ok(table)
}

fn junction_parity(cfg: &RunConfig) -> CliResult<Table> {
    let grid = check_grid(cfg.integer("root_grid", None))?;
    let n_phi = phase_grid(cfg)?;
    let (key, rows) = sweep_map(cfg, junction_params, |_, p| {
        Ok(critical_current_and_parity_with(p, n_phi, grid)?)
    })?;
    let mut table = Table {
        columns: vec![
            key.clone(),
            "critical_current".into(),
            "junction_type".into(),
            "slope_at_zero".into(),
        ],
        plot: Plot::new("Critical current and dI/dphi at 0", &key, "current units"),
        ..Table::default()
    };
    for (x, r) in rows {
        table.plot.push("I_c", x, r.critical_current);
        table.plot.push("dI/dphi at 0", x, r.slope_at_zero);
        table.summary.push(format!("{key} = {x}: {} junction", r.junction_type.tag()));
        table.rows.push(vec![
            x.into(),
            r.critical_current.into(),
            r.junction_type.tag().into(),
            r.slope_at_zero.into(),
        ]);
    }
    Ok(table)
}

fn spinor_norm(v: &Spinor) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

struct MapOutcome {
    det_rel: f64,
    matrix: Option<[[Complex64; 2]; 2]>,
    residual: f64,
    status: &'static str,
}

fn map_pair(pair: &AndreevBasisPair) -> CliResult<MapOutcome> {
    let det = pair.state0[0] * pair.state1[1] - pair.state0[1] * pair.state1[0];
    let det_rel = det.norm() / (spinor_norm(&pair.state0) * spinor_norm(&pair.state1));
    let t = match build_transform(pair) {
        Ok(t) => t,
        Err(qspectra::Error::Singular { .. }) => {
            return Ok(MapOutcome {
                det_rel,
                matrix: None,
                residual: f64::NAN,
                status: "singular",
            })
        }
        Err(e) => return Err(e.into()),
    };
    let out = mat_vec(&conjugated_pauli_x(&t), &pair.state0);
    let diff = [out[0] - pair.state1[0], out[1] - pair.state1[1]];
    let residual = spinor_norm(&diff) / spinor_norm(&pair.state1);
    let status = match transport_pauli_x(&t, pair) {
        Ok(_) => "ok",
        Err(qspectra::Error::CorrespondenceViolation { .. }) => "violation",
        Err(e) => return Err(e.into()),
    };
    Ok(MapOutcome {
        det_rel,
        matrix: Some(t.matrix),
        residual,
        status,
    })
}

fn matrix_cells(m: Option<[[Complex64; 2]; 2]>) -> Vec<Cell> {
    let mut cells = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let v = m.map(|m| m[i][j]).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            cells.push(v.re.into());
            cells.push(v.im.into());
        }
    }
    cells
}

const MATRIX_COLUMNS: [&str; 8] = [
    "t00_re", "t00_im", "t01_re", "t01_im", "t10_re", "t10_im", "t11_re", "t11_im",
];

fn basis_map(cfg: &RunConfig) -> CliResult<Table> {
    if cfg.raw("source") == "random" {
        return basis_map_random(cfg);
    }
    let (key, _) = cfg.axis_points();
    let (key, rows) = sweep_map(cfg, junction_params, |x, p| {
        let point = Some((key.as_str(), x));
        let channel = Channel::new(cfg.integer("channel_l", point), cfg.integer("channel_m", point), p)
            .map_err(|e| invalid(e.to_string()))?;
        let phi = cfg.number("phi", point);
        let z = match cfg.raw("z") {
            "mid" => None,
            _ => Some(cfg.number("z", point)),
        };
        let level = cfg.integer("level", point);
        let pair = AndreevBasisPair::from_junction(phi, &channel, p, level, z)?;
        let energy = qspectra::andreev::sector_levels(phi, &channel, p, 128)?[level];
        Ok((phi, channel, level, energy, pair.z, map_pair(&pair)?))
    })?;
    let mut columns = Vec::new();
    if key != "phi" {
        columns.push(key.clone());
    }
    columns.extend(["phi", "l", "m", "level", "energy", "z", "det_rel"].map(String::from));
    columns.extend(MATRIX_COLUMNS.map(String::from));
    columns.extend(["transport_residual", "status"].map(String::from));
    let mut table = Table {
        columns,
        plot: Plot::new("Basis map transport residual", &key, "log10 residual"),
        ..Table::default()
    };
    for (x, (phi, c, level, energy, z, outcome)) in rows {
        let mut row: Vec<Cell> = Vec::new();
        if key != "phi" {
            row.push(x.into());
        }
        row.extend([
            phi.into(),
            c.l.into(),
            c.m.into(),
            level.into(),
            energy.into(),
            z.into(),
            outcome.det_rel.into(),
        ]);
        row.extend(matrix_cells(outcome.matrix));
        row.push(outcome.residual.into());
        row.push(outcome.status.into());
        table.plot.push("residual", x, outcome.residual.log10());
        table.rows.push(row);
    }
    Ok(table)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn basis_map_random(cfg: &RunConfig) -> CliResult<Table> {
    if cfg.sweep.is_some() {
        return Err(invalid("basis-map with source=random takes no sweep"));
    }
    let samples = cfg.integer("samples", None);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs: Vec<AndreevBasisPair> = (0..samples)
        .map(|_| {
            let amps = (
                random_complex(&mut rng),
                random_complex(&mut rng),
                random_complex(&mut rng),
                random_complex(&mut rng),
            );
            let q = (random_complex(&mut rng), random_complex(&mut rng));
            let z = rng.random_range(0.0..2.0);
            AndreevBasisPair::from_amplitudes(amps, q, z)
        })
        .collect();
    let outcomes = pairs.par_iter().map(map_pair).collect::<CliResult<Vec<_>>>()?;

    let mut columns: Vec<String> = ["sample", "z", "det_rel"].map(String::from).to_vec();
    columns.extend(MATRIX_COLUMNS.map(String::from));
    columns.extend(["transport_residual", "status"].map(String::from));
    let mut table = Table {
        columns,
        plot: Plot::new("Random basis pairs", "sample", "log10 residual"),
        ..Table::default()
    };
    let mut worst: f64 = 0.0;
    let mut singular = 0;
    for (i, (pair, o)) in pairs.iter().zip(outcomes).enumerate() {
        if o.status == "singular" {
            singular += 1;
        } else {
            worst = worst.max(o.residual);
        }
        table.plot.push("residual", i as f64, o.residual.log10());
        let mut row: Vec<Cell> = vec![i.into(), pair.z.into(), o.det_rel.into()];
        row.extend(matrix_cells(o.matrix));
        row.push(o.residual.into());
        row.push(o.status.into());
        table.rows.push(row);
    }
    table.summary.push(format!(
        "{samples} samples: max transport residual {worst:.3e}, singular pairs {singular}"
    ));
    Ok(table)
}

fn tolerance(cfg: &RunConfig, auto: f64) -> f64 {
    match cfg.raw("tolerance") {
        "auto" => auto,
        _ => cfg.number("tolerance", None),
    }
}

fn oracle_compare(cfg: &RunConfig) -> CliResult<Table> {
    let mut table = if cfg.raw("target") == "junction" {
        oracle_junction(cfg)?
    } else {
        oracle_cpb(cfg)?
    };
    let dev_col = table.columns.len() - 1;
    let worst = table
        .rows
        .iter()
        .filter_map(|r| match r[dev_col] {
            Cell::Float(x) => Some(x),
            _ => None,
        })
        .fold(0.0_f64, f64::max);
    let tol = tolerance(cfg, if cfg.raw("target") == "junction" { 1e-3 } else { 1e-8 });
    table.summary.push(format!(
        "max relative deviation {worst:.3e} over {} values (tolerance {tol:e})",
        table.rows.len()
    ));
    if !(worst < tol) {
        table.failure = Some(format!(
            "oracle deviation {worst:.3e} exceeds tolerance {tol:e}"
        ));
    }
    Ok(table)
}

fn oracle_cpb(cfg: &RunConfig) -> CliResult<Table> {
    let n = n_levels(cfg)?;
    let steps = cfg.integer("n_g_steps", None);
    if steps < 2 {
        return Err(invalid("n_g_steps must be at least 2"));
    }
    let e_c = cfg.number("e_c", None);
    let mut points = Vec::new();
    for ratio in cfg.numbers("ratios") {
        for i in 0..steps {
            let n_g = i as f64 / (steps - 1) as f64;
            let p = CpbParams {
                e_c,
                e_j: ratio * e_c,
                n_g,
                phi_0: cfg.number("phi_0", None),
            };
            p.validate().map_err(|e| invalid(e.to_string()))?;
            points.push((ratio, p));
        }
    }
    let results = points
        .par_iter()
        .map(|(ratio, p)| {
            let closed = energies_mathieu(p, n)?.levels;
            let oracle = energies_charge_basis(p, n, default_cutoff(p, n))?.levels;
            Ok((*ratio, p.n_g, closed, oracle))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table {
        columns: ["ej_over_ec", "n_g", "k", "mathieu", "charge_basis", "rel_dev"]
            .map(String::from)
            .to_vec(),
        plot: Plot::new("Closed form vs charge basis", "n_g", "log10 relative deviation"),
        ..Table::default()
    };
    for (ratio, n_g, closed, oracle) in results {
        for (k, (a, b)) in closed.iter().zip(&oracle).enumerate() {
            let dev = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
            table.plot.push(&format!("E_J/E_C={ratio}"), n_g, dev.max(1e-17).log10());
            table.rows.push(vec![
                ratio.into(),
                n_g.into(),
                k.into(),
                (*a).into(),
                (*b).into(),
                dev.into(),
            ]);
        }
    }
    Ok(table)
}

fn oracle_junction(cfg: &RunConfig) -> CliResult<Table> {
    let grid = check_grid(cfg.integer("root_grid", None))?;
    let p = junction_params(cfg, None)?;
    let sc_layers = cfg.integer("sc_layers", None);
    let n_phase = cfg.integer("n_phase", None);
    if n_phase < 2 {
        return Err(invalid("n_phase must be at least 2"));
    }
    let phases: Vec<f64> = (0..n_phase)
        .map(|j| TAU * j as f64 / (n_phase - 1) as f64)
        .collect();
    let results = phases
        .par_iter()
        .map(|&phi| {
            let lattice = bdg_lattice_oracle(phi, &p, sc_layers)?;
            Ok((phi, lattice, level_rows(phi, &p, grid)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table {
        columns: ["phi", "l", "m", "energy", "lattice", "rel_dev"].map(String::from).to_vec(),
        plot: Plot::new("Matching vs lattice", "phi", "E / Delta"),
        ..Table::default()
    };
    for (phi, lattice, channels) in results {
        for (c, levels) in channels {
            for e in levels {
                let nearest = lattice
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
                    .unwrap_or(f64::NAN);
                let dev = (nearest - e).abs() / e.abs();
                table.plot.scatter("matching", phi, e / p.delta);
                table.rows.push(vec![
                    phi.into(),
                    c.l.into(),
                    c.m.into(),
                    e.into(),
                    nearest.into(),
                    if dev.is_nan() { f64::INFINITY.into() } else { dev.into() },
                ]);
            }
        }
        for e in lattice {
            table.plot.scatter("lattice", phi, e / p.delta);
        }
    }
    Ok(table)
}
