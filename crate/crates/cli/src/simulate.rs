//! `simulate <kind>`: runs a scenario and renders CSV plus a summary.

use cz_mech_core::dynamics::{
    assemble, body_point_rhs, integrate_body_point, integrate_mass_point, multiphase_step, nbody_simulate, orbit_period,
    simulate_rigid_body, BodyPointInertia, MassPoint, MassPointState, MultiphaseState, NbodyConfig, RigidBodyModel,
    RigidBodyState,
};
use cz_mech_core::frames::{Placement, Rotation};
use cz_mech_core::linalg::norm;
use cz_mech_core::measures::{InertiaDensity, MassDistribution, PointMass};
use cz_mech_core::screw::{dual_vector, SkewTensor3};
use cz_mech_core::Error;
use nalgebra::{Matrix3, Vector3, Vector6};
use serde::de::DeserializeOwned;

use crate::config::*;
use crate::{CliError, Kind};

/// Round-trip decimal rendering.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[String]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

pub struct Outcome {
    pub csv: String,
    pub summary: Vec<(String, String)>,
}

impl Outcome {
    pub fn summary_text(&self) -> String {
        self.summary.iter().map(|(k, v)| format!("{k} {v}\n")).collect()
    }
}

fn parse<S: DeserializeOwned>(text: &str) -> Result<S, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn numerical(e: impl Into<Error>) -> CliError {
    let e = e.into();
    if e.is_numerical() {
        CliError::Numerical(e.to_string())
    } else {
        CliError::Config(e.to_string())
    }
}

fn keep(i: usize, last: usize, every: usize) -> bool {
    i % every == 0 || i == last
}

fn m3(m: &M3) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[i][j])
}

fn v3(v: &V3) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub struct Overrides {
    pub h: Option<f64>,
    pub steps: Option<usize>,
}

impl Overrides {
    fn apply(&self, integ: &mut Integrator) {
        if let Some(h) = self.h {
            integ.h = h;
        }
        if let Some(s) = self.steps {
            integ.steps = s;
        }
    }
}

pub fn run(kind: Kind, text: &str, ov: &Overrides) -> Result<Outcome, CliError> {
    match kind {
        Kind::Rigid => {
            let mut s: RigidScenario = parse(text)?;
            ov.apply(&mut s.integrator);
            check_header(s.schema_version, s.kind.as_deref(), "rigid", &s.integrator, &s.output).map_err(CliError::Config)?;
            rigid(&s)
        }
        Kind::Nbody => {
            let mut s: NbodyScenario = parse(text)?;
            ov.apply(&mut s.integrator);
            check_header(s.schema_version, s.kind.as_deref(), "nbody", &s.integrator, &s.output).map_err(CliError::Config)?;
            nbody(&s)
        }
        Kind::Masspoint => {
            let mut s: MassPointScenario = parse(text)?;
            ov.apply(&mut s.integrator);
            check_header(s.schema_version, s.kind.as_deref(), "masspoint", &s.integrator, &s.output).map_err(CliError::Config)?;
            masspoint(&s)
        }
        Kind::Bodypoint => {
            let mut s: BodyPointScenario = parse(text)?;
            ov.apply(&mut s.integrator);
            check_header(s.schema_version, s.kind.as_deref(), "bodypoint", &s.integrator, &s.output).map_err(CliError::Config)?;
            bodypoint(&s)
        }
        Kind::Multiphase => {
            let mut s: MultiphaseScenario = parse(text)?;
            ov.apply(&mut s.integrator);
            check_header(s.schema_version, s.kind.as_deref(), "multiphase", &s.integrator, &s.output).map_err(CliError::Config)?;
            multiphase(&s)
        }
    }
}

fn rigid_model(body: &BodyConfig) -> Result<RigidBodyModel<f64>, CliError> {
    match body {
        BodyConfig::Points(pts) => {
            let pts = pts.iter().map(|p| PointMass { x: v3(&p.x), m: p.m, nu: p.nu }).collect();
            let d = MassDistribution::points(pts).map_err(|e| CliError::Config(format!("`body.points`: {e}")))?;
            assemble(&d).map_err(numerical)
        }
        BodyConfig::MassProperties(mp) => {
            RigidBodyModel::from_mass_properties(mp.mass, &v3(&mp.com), &m3(&mp.inertia)).map_err(numerical)
        }
    }
}

fn rigid(s: &RigidScenario) -> Result<Outcome, CliError> {
    let model = rigid_model(&s.body)?;
    let rv = v3(&s.initial.rotation_vector);
    let angle = norm(&rv);
    let rot = if angle > 0.0 { Rotation::about_axis(&(rv / angle), angle) } else { Rotation::identity() };
    let mut vel = Vector6::zeros();
    vel.fixed_rows_mut::<3>(0).copy_from(&v3(&s.initial.velocity));
    vel.fixed_rows_mut::<3>(3).copy_from(&v3(&s.initial.angular_velocity));
    let state0 = RigidBodyState { placement: Placement::new(rot, v3(&s.initial.position)), velocity: vel };

    let mass = model.theta[(0, 0)];
    let mc = model.theta.fixed_view::<3, 3>(3, 0).into_owned();
    let first_moment = dual_vector(&SkewTensor3::try_from_matrix(&((mc - mc.transpose()) * 0.5), 0.0).expect("antisymmetrized"));
    if let WrenchConfig::Table(t) = &s.wrench {
        t.validate(6, "wrench").map_err(CliError::Config)?;
    }
    let wrench = |t: f64, st: &RigidBodyState<f64>| -> Vector6<f64> {
        match &s.wrench {
            WrenchConfig::None => Vector6::zeros(),
            WrenchConfig::Constant { value } => Vector6::from_column_slice(value),
            WrenchConfig::Gravity { g } => {
                let f = st.placement.c().transpose() * v3(g) * mass;
                let tq = first_moment.cross(&(st.placement.c().transpose() * v3(g)));
                Vector6::new(f[0], f[1], f[2], tq[0], tq[1], tq[2])
            }
            WrenchConfig::Table(tab) => Vector6::from_column_slice(&tab.at(t)),
        }
    };
    let traj = simulate_rigid_body(&model, wrench, state0, s.integrator.h, s.integrator.steps).map_err(numerical)?;

    let mut header = vec!["t".to_string()];
    for i in 1..=3 {
        for j in 1..=3 {
            header.push(format!("C{i}{j}"));
        }
    }
    header.extend(labels("d", 3));
    header.extend(labels("v", 3));
    header.extend(labels("w", 3));
    header.push("ke".into());
    let mut csv = Csv::new(&header);
    let last = traj.len() - 1;
    for (i, smp) in traj.iter().enumerate() {
        if !keep(i, last, s.output.every) {
            continue;
        }
        let c = smp.state.placement.c();
        let mut row = vec![smp.t];
        for a in 0..3 {
            for b in 0..3 {
                row.push(c[(a, b)]);
            }
        }
        row.extend(smp.state.placement.d().iter());
        row.extend(smp.state.velocity.iter());
        row.push(smp.kinetic_energy);
        csv.row(&row);
    }
    let (ke0, l0) = (traj[0].kinetic_energy, traj[0].momentum);
    let ke_drift = traj.iter().fold(0.0f64, |a, s| a.max((s.kinetic_energy - ke0).abs())) / ke0.abs().max(f64::MIN_POSITIVE);
    let l_drift = traj.iter().fold(0.0f64, |a, s| a.max(norm(&(s.momentum - l0)))) / norm(&l0).max(f64::MIN_POSITIVE);
    let end = &traj[last];
    let mut summary = vec![
        ("kind".to_string(), "rigid".to_string()),
        ("steps".into(), s.integrator.steps.to_string()),
        ("t_final".into(), num(end.t)),
        ("kinetic_energy_final".into(), num(end.kinetic_energy)),
        ("kinetic_energy_drift_rel".into(), num(ke_drift)),
        ("momentum_drift_rel".into(), num(l_drift)),
    ];
    summary.push(("velocity_final".into(), end.state.velocity.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")));
    Ok(Outcome { csv: csv.text, summary })
}

fn nbody(s: &NbodyScenario) -> Result<Outcome, CliError> {
    if s.bodies.is_empty() {
        return Err(CliError::Config("`bodies` must not be empty".into()));
    }
    let pts: Vec<PointMass<f64>> = s.bodies.iter().map(|b| PointMass { x: v3(&b.x), m: b.m, nu: 0.0 }).collect();
    MassDistribution::points(pts.clone()).map_err(|e| CliError::Config(format!("`bodies`: {e}")))?;
    let vels: Vec<Vector3<f64>> = s.bodies.iter().map(|b| v3(&b.v)).collect();
    let cfg = NbodyConfig { gamma: s.gamma, min_distance: s.min_distance, h: s.integrator.h, steps: s.integrator.steps };
    let traj = nbody_simulate(&pts, &vels, &cfg).map_err(numerical)?;
    let n = s.bodies.len();
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        header.extend((1..=3).map(|k| format!("x{i}_{k}")));
    }
    for i in 1..=n {
        header.extend((1..=3).map(|k| format!("v{i}_{k}")));
    }
    header.push("energy".into());
    header.extend(labels("p", 3));
    header.extend(labels("L", 3));
    let mut csv = Csv::new(&header);
    let last = traj.len() - 1;
    for (i, smp) in traj.iter().enumerate() {
        if !keep(i, last, s.output.every) {
            continue;
        }
        let mut row = vec![smp.t];
        smp.x.iter().for_each(|x| row.extend(x.iter()));
        smp.v.iter().for_each(|v| row.extend(v.iter()));
        row.push(smp.energy);
        row.extend(smp.momentum.iter());
        row.extend(smp.angular_momentum.iter());
        csv.row(&row);
    }
    let e0 = traj[0].energy;
    let e_drift = traj.iter().fold(0.0f64, |a, s| a.max((s.energy - e0).abs())) / e0.abs().max(f64::MIN_POSITIVE);
    let p0 = traj[0].momentum;
    let p_drift = traj.iter().fold(0.0f64, |a, s| a.max(norm(&(s.momentum - p0))));
    let l0 = traj[0].angular_momentum;
    let l_drift = traj.iter().fold(0.0f64, |a, s| a.max(norm(&(s.angular_momentum - l0))));
    let mut summary = vec![
        ("kind".to_string(), "nbody".to_string()),
        ("bodies".into(), n.to_string()),
        ("steps".into(), s.integrator.steps.to_string()),
        ("t_final".into(), num(traj[last].t)),
        ("energy_drift_rel".into(), num(e_drift)),
        ("momentum_drift_abs".into(), num(p_drift)),
        ("angular_momentum_drift_abs".into(), num(l_drift)),
    ];
    if n == 2 {
        let period = orbit_period(&traj, 0, 1).map(num).unwrap_or_else(|| "none".into());
        summary.push(("period".into(), period));
    }
    Ok(Outcome { csv: csv.text, summary })
}

fn masspoint(s: &MassPointScenario) -> Result<Outcome, CliError> {
    if !(s.mass > s.m_min) {
        return Err(CliError::Config("`mass` must exceed `m_min`".into()));
    }
    if let ForceConfig::Table(t) = &s.force {
        t.validate(3, "force").map_err(CliError::Config)?;
    }
    let p = MassPoint {
        force: Box::new(|t, st: &MassPointState<f64>| match &s.force {
            ForceConfig::None => Vector3::zeros(),
            ForceConfig::Constant { value } => v3(value),
            ForceConfig::Gravity { g } => v3(g) * st.m,
            ForceConfig::Table(tab) => Vector3::from_column_slice(&tab.at(t)),
        }),
        mass_rate: Box::new(|_, st: &MassPointState<f64>| match &s.mass_rate {
            MassRateConfig::Constant { value } => *value,
            MassRateConfig::Exponential { k } => -k * st.m,
        }),
        gain_velocity: Box::new(|_, st: &MassPointState<f64>| match &s.gain_velocity {
            GainVelocityConfig::Absolute { value } => v3(value),
            GainVelocityConfig::Relative { value } => st.v + v3(value),
        }),
        m_min: s.m_min,
    };
    let s0 = MassPointState { x: v3(&s.x), v: v3(&s.v), m: s.mass };
    let traj = integrate_mass_point(&p, s0, s.integrator.h, s.integrator.steps).map_err(numerical)?;
    let mut header = vec!["t".to_string()];
    header.extend(labels("x", 3));
    header.extend(labels("v", 3));
    header.push("m".into());
    let mut csv = Csv::new(&header);
    let last = traj.len() - 1;
    for (i, st) in traj.iter().enumerate() {
        if keep(i, last, s.output.every) {
            let mut row = vec![i as f64 * s.integrator.h];
            row.extend(st.x.iter());
            row.extend(st.v.iter());
            row.push(st.m);
            csv.row(&row);
        }
    }
    let end = &traj[last];
    let summary = vec![
        ("kind".to_string(), "masspoint".to_string()),
        ("steps".into(), s.integrator.steps.to_string()),
        ("t_final".into(), num(last as f64 * s.integrator.h)),
        ("mass_final".into(), num(end.m)),
        ("velocity_final".into(), end.v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")),
    ];
    Ok(Outcome { csv: csv.text, summary })
}

fn bodypoint(s: &BodyPointScenario) -> Result<Outcome, CliError> {
    let blocks = InertiaDensity::new(m3(&s.a), m3(&s.b)).map_err(|e| CliError::Config(format!("`a`/`b`: {e}")))?;
    if !(s.rho > 0.0) {
        return Err(CliError::Config("`rho` must be positive".into()));
    }
    let inertia = BodyPointInertia { rho: s.rho, blocks };
    let y0 = Vector6::new(s.v[0], s.v[1], s.v[2], s.mu[0], s.mu[1], s.mu[2]);
    let rhs = Vector6::new(s.alpha[0], s.alpha[1], s.alpha[2], s.beta[0], s.beta[1], s.beta[2]);
    body_point_rhs(&inertia, &y0, &rhs, s.nu).map_err(numerical)?;
    let traj = integrate_body_point(&inertia, y0, |_| rhs, s.nu, s.integrator.h, s.integrator.steps).map_err(numerical)?;
    let mut header = vec!["t".to_string(), "rho".to_string()];
    header.extend(labels("v", 3));
    header.extend(labels("mu", 3));
    let mut csv = Csv::new(&header);
    let last = traj.len() - 1;
    for (i, (rho, y)) in traj.iter().enumerate() {
        if keep(i, last, s.output.every) {
            let mut row = vec![i as f64 * s.integrator.h, *rho];
            row.extend(y.iter());
            csv.row(&row);
        }
    }
    let m = blocks.unit_block();
    let (rho_end, y_end) = traj[last];
    let t_end = last as f64 * s.integrator.h;
    let expected = m * y0 * s.rho + rhs * t_end;
    let residual = norm(&(m * y_end * rho_end - expected));
    let summary = vec![
        ("kind".to_string(), "bodypoint".to_string()),
        ("steps".into(), s.integrator.steps.to_string()),
        ("t_final".into(), num(t_end)),
        ("rho_final".into(), num(rho_end)),
        ("momentum_balance_residual".into(), num(residual)),
    ];
    Ok(Outcome { csv: csv.text, summary })
}

fn multiphase(s: &MultiphaseScenario) -> Result<Outcome, CliError> {
    let mut state = MultiphaseState {
        rho: s.rho.clone(),
        offsets: s.offsets.iter().map(v3).collect(),
        rates: s.rates.clone(),
        stoichiometry: s.stoichiometry.clone(),
    };
    state.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let n = state.rho.len();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|a| format!("rho_{a}")));
    header.push("rho".into());
    header.push("J_x".into());
    let mut csv = Csv::new(&header);
    let row = |t: f64, st: &MultiphaseState<f64>| {
        let mut r = vec![t];
        r.extend(st.rho.iter());
        r.push(st.total_density());
        r.push(st.inertia_invariant());
        r
    };
    csv.row(&row(0.0, &state));
    let (mut max_total, mut max_inertia) = (0.0f64, 0.0f64);
    let steps = s.integrator.steps;
    for i in 0..steps {
        let step = multiphase_step(&state, s.div_v, s.integrator.h).map_err(numerical)?;
        max_total = max_total.max(step.total_residual);
        max_inertia = max_inertia.max(step.inertia_residual);
        state = step.state;
        if keep(i + 1, steps, s.output.every) {
            csv.row(&row((i + 1) as f64 * s.integrator.h, &state));
        }
    }
    let summary = vec![
        ("kind".to_string(), "multiphase".to_string()),
        ("steps".into(), steps.to_string()),
        ("t_final".into(), num(steps as f64 * s.integrator.h)),
        ("rho_final".into(), num(state.total_density())),
        ("total_density_residual_max".into(), num(max_total)),
        ("inertia_invariant_residual_max".into(), num(max_inertia)),
    ];
    Ok(Outcome { csv: csv.text, summary })
}
