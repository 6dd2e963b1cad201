//! Motion equations: rigid bodies in quasi-velocities, variable-mass points,
//! body points with rotational inertia, gravitating point systems and
//! per-point multiphase continuity.

use nalgebra::{Matrix3, Matrix6, SVector, Vector3, Vector6};

use crate::frames::{poisson_rate, wrench_generator, wrench_transform, Placement, Rotation};
use crate::linalg::{max_abs, norm, orthogonality_residual, symmetric_eigenvalues, Lu};
use crate::measures::{InertiaDensity, MassDistribution, MeasureError, PointMass};
use crate::ode::{rk4_step, try_rk4_step, NonFiniteDerivative};
use crate::real::Real;
use crate::screw::skew;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("degenerate body: inertia has minimum eigenvalue {min_eigenvalue:e}")]
    DegenerateBody { min_eigenvalue: f64 },
    #[error("inertia matrix is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricInertia { asymmetry: f64 },
    #[error("singular inertia matrix")]
    SingularInertia,
    #[error("rotation drift {residual:e} at step {step} exceeds tolerance")]
    RotationDrift { step: usize, residual: f64 },
    #[error("mass {mass:e} fell below the minimum at t = {t}")]
    MassUnderflow { t: f64, mass: f64 },
    #[error("bodies {i} and {j} approached to {distance:e} at t = {t}")]
    CloseApproach { t: f64, i: usize, j: usize, distance: f64 },
    #[error("density of component {component} became negative ({value:e}); reduce the step")]
    NegativeDensity { component: usize, value: f64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    NonFinite(#[from] NonFiniteDerivative),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Rotation drift allowed before projection.
pub const ROTATION_DRIFT_TOL: f64 = 1e-8;
/// Relative eigenvalue floor for a nondegenerate body.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `m [[I, −r×], [r×, −(r×)²]]`.
pub fn point_inertia_block<T: Real>(r: &Vector3<T>, m: T) -> Matrix6<T> {
    let rx = skew(r);
    let mut out = Matrix6::zeros();
    out.fixed_view_mut::<3, 3>(0, 0).copy_from(&(Matrix3::identity() * m));
    out.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-rx * m));
    out.fixed_view_mut::<3, 3>(3, 0).copy_from(&(rx * m));
    out.fixed_view_mut::<3, 3>(3, 3).copy_from(&(-(rx * rx) * m));
    out
}

/// Rigid body in its own frame p.
#[derive(Clone, Debug)]
pub struct RigidBodyModel<T: Real> {
    pub distribution: Option<MassDistribution<T>>,
    pub theta: Matrix6<T>,
    pub q_nu: Matrix6<T>,
    lu: Lu<T, 6>,
}

impl<T: Real> RigidBodyModel<T> {
    /// Validates `theta` (symmetric, positive definite) and factors it.
    pub fn from_blocks(theta: Matrix6<T>, q_nu: Matrix6<T>) -> Result<Self, DynamicsError> {
        let scale = T::one().max(max_abs(&theta));
        let asym = max_abs(&(theta - theta.transpose()));
        if asym > T::lit(1e-10) * scale {
            return Err(DynamicsError::AsymmetricInertia { asymmetry: f64_of(asym) });
        }
        let min_ev = symmetric_eigenvalues(&theta)[0];
        if !(min_ev > T::lit(DEGENERACY_TOL) * max_abs(&theta)) {
            return Err(DynamicsError::DegenerateBody { min_eigenvalue: f64_of(min_ev) });
        }
        let lu = Lu::new(&theta).ok_or(DynamicsError::SingularInertia)?;
        Ok(Self { distribution: None, theta, q_nu, lu })
    }

    /// Mass `m`, centre of mass `c` and rotational inertia `j` about `c`.
    pub fn from_mass_properties(m: T, c: &Vector3<T>, j: &Matrix3<T>) -> Result<Self, DynamicsError> {
        let mut theta = point_inertia_block(c, m);
        let rot = theta.fixed_view::<3, 3>(3, 3) + j;
        theta.fixed_view_mut::<3, 3>(3, 3).copy_from(&rot);
        Self::from_blocks(theta, Matrix6::zeros())
    }

    pub fn inverse_apply(&self, f: &Vector6<T>) -> Vector6<T> {
        self.lu.solve(f)
    }
}

/// Sums point blocks over the distribution: `Θ_ρ` from masses, `Q_ν` from mass rates.
pub fn assemble<T: Real>(d: &MassDistribution<T>) -> Result<RigidBodyModel<T>, DynamicsError> {
    let mut theta = Matrix6::zeros();
    let mut q_nu = Matrix6::zeros();
    for n in d.nodes() {
        theta += point_inertia_block(&n.x, n.mass());
        q_nu += point_inertia_block(&n.x, n.source());
    }
    let mut model = RigidBodyModel::from_blocks(theta, q_nu)?;
    model.distribution = Some(d.clone());
    Ok(model)
}

/// `V̇ = Θ⁻¹(F − (Q_ν + Φ^wr(V) Θ) V)` with `V = (v, ω)` in body coordinates.
pub fn newton_euler_rhs<T: Real>(model: &RigidBodyModel<T>, v: &Vector6<T>, f: &Vector6<T>) -> Vector6<T> {
    let lin = v.fixed_rows::<3>(0).into_owned();
    let ang = v.fixed_rows::<3>(3).into_owned();
    let phi = wrench_generator(&lin, &ang);
    let momentum = model.theta * v;
    model.inverse_apply(&(f - model.q_nu * v - phi * momentum))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidBodyState<T: Real> {
    pub placement: Placement<T>,
    /// `(v, ω)` of the body frame, in body coordinates.
    pub velocity: Vector6<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidSample<T: Real> {
    pub t: T,
    pub state: RigidBodyState<T>,
    /// `½ Vᵀ Θ V`.
    pub kinetic_energy: T,
    /// Momentum wrench `L Θ V` reduced at the origin of frame 0.
    pub momentum: Vector6<T>,
}

fn rigid_sample<T: Real>(model: &RigidBodyModel<T>, t: T, state: RigidBodyState<T>) -> RigidSample<T> {
    let m = model.theta * state.velocity;
    RigidSample {
        t,
        state,
        kinetic_energy: T::half() * state.velocity.dot(&m),
        momentum: wrench_transform(&state.placement).apply(&m),
    }
}

type RigidVec<T> = SVector<T, 18>;

fn pack<T: Real>(s: &RigidBodyState<T>) -> RigidVec<T> {
    let mut y = RigidVec::zeros();
    y.fixed_rows_mut::<6>(0).copy_from(&s.velocity);
    y.fixed_rows_mut::<9>(6).copy_from_slice(s.placement.c().as_slice());
    y.fixed_rows_mut::<3>(15).copy_from(s.placement.d());
    y
}

fn unpack<T: Real>(y: &RigidVec<T>) -> (Vector6<T>, Matrix3<T>, Vector3<T>) {
    (
        y.fixed_rows::<6>(0).into_owned(),
        Matrix3::from_column_slice(y.fixed_rows::<9>(6).as_slice()),
        y.fixed_rows::<3>(15).into_owned(),
    )
}

/// Integrates the Newton–Euler equation with the Poisson relation `Ċ = C ω×`
/// and `ḋ = C v`. The wrench callback receives body-frame quantities and the
/// attitude projected onto the rotations. Returns `steps + 1` samples.
pub fn simulate_rigid_body<T: Real>(
    model: &RigidBodyModel<T>,
    wrench: impl Fn(T, &RigidBodyState<T>) -> Vector6<T>,
    state0: RigidBodyState<T>,
    h: T,
    steps: usize,
) -> Result<Vec<RigidSample<T>>, DynamicsError> {
    if !(h > T::zero()) {
        return Err(DynamicsError::InvalidInput("step size must be positive".into()));
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(rigid_sample(model, T::zero(), state0));
    let mut y = pack(&state0);
    let rhs = |t: T, y: &RigidVec<T>| {
        let (v, c, d) = unpack(y);
        let state = RigidBodyState {
            placement: Placement::new(Rotation::projected(&c), d),
            velocity: v,
        };
        let vdot = newton_euler_rhs(model, &v, &wrench(t, &state));
        let cdot = poisson_rate(&c, &v.fixed_rows::<3>(3).into_owned());
        let ddot = c * v.fixed_rows::<3>(0);
        let mut k = RigidVec::zeros();
        k.fixed_rows_mut::<6>(0).copy_from(&vdot);
        k.fixed_rows_mut::<9>(6).copy_from_slice(cdot.as_slice());
        k.fixed_rows_mut::<3>(15).copy_from(&ddot);
        k
    };
    for i in 0..steps {
        let t = T::count(i) * h;
        y = rk4_step(rhs, &y, t, h)?;
        let (v, c, d) = unpack(&y);
        let drift = orthogonality_residual(&c);
        if drift > T::lit(ROTATION_DRIFT_TOL) {
            return Err(DynamicsError::RotationDrift { step: i + 1, residual: f64_of(drift) });
        }
        let state = RigidBodyState { placement: Placement::new(Rotation::projected(&c), d), velocity: v };
        y = pack(&state);
        out.push(rigid_sample(model, T::count(i + 1) * h, state));
    }
    Ok(out)
}

/// Position, velocity and mass of a mass-point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassPointState<T: Real> {
    pub x: Vector3<T>,
    pub v: Vector3<T>,
    pub m: T,
}

impl<T: Real> MassPointState<T> {
    fn to_vec(self) -> SVector<T, 7> {
        SVector::<T, 7>::from_column_slice(&[self.x[0], self.x[1], self.x[2], self.v[0], self.v[1], self.v[2], self.m])
    }

    fn from_vec(y: &SVector<T, 7>) -> Self {
        Self {
            x: y.fixed_rows::<3>(0).into_owned(),
            v: y.fixed_rows::<3>(3).into_owned(),
            m: y[6],
        }
    }
}

type PointFn<'a, T, R> = Box<dyn Fn(T, &MassPointState<T>) -> R + 'a>;

/// Variable-mass point: applied force `f`, mass rate `ν` and velocity `u` of
/// the gained or lost mass, so that the reactive force is `ξ = νu`.
pub struct MassPoint<'a, T: Real> {
    pub force: PointFn<'a, T, Vector3<T>>,
    pub mass_rate: PointFn<'a, T, T>,
    pub gain_velocity: PointFn<'a, T, Vector3<T>>,
    pub m_min: T,
}

impl<'a, T: Real> MassPoint<'a, T> {
    /// Constant mass under a force.
    pub fn newtonian(force: impl Fn(T, &MassPointState<T>) -> Vector3<T> + 'a) -> Self {
        Self {
            force: Box::new(force),
            mass_rate: Box::new(|_, _| T::zero()),
            gain_velocity: Box::new(|_, _| Vector3::zeros()),
            m_min: T::zero(),
        }
    }
}

/// `v̇ = (f + ν(u − v)) / m`; with `ν = 0` exactly `f / m`.
pub fn mass_point_rhs<T: Real>(p: &MassPoint<'_, T>, s: &MassPointState<T>, t: T) -> Result<Vector3<T>, DynamicsError> {
    if !(s.m > p.m_min) {
        return Err(DynamicsError::MassUnderflow { t: f64_of(t), mass: f64_of(s.m) });
    }
    let f = (p.force)(t, s);
    let nu = (p.mass_rate)(t, s);
    if nu == T::zero() {
        return Ok(f / s.m);
    }
    Ok((f + ((p.gain_velocity)(t, s) - s.v) * nu) / s.m)
}

/// Integrates position, velocity and mass; returns `steps + 1` states.
pub fn integrate_mass_point<T: Real>(
    p: &MassPoint<'_, T>,
    s0: MassPointState<T>,
    h: T,
    steps: usize,
) -> Result<Vec<MassPointState<T>>, DynamicsError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s0);
    let mut y = s0.to_vec();
    for i in 0..steps {
        let t = T::count(i) * h;
        y = try_rk4_step(
            |tt, yy: &SVector<T, 7>| -> Result<SVector<T, 7>, DynamicsError> {
                let s = MassPointState::from_vec(yy);
                let a = mass_point_rhs(p, &s, tt)?;
                let nu = (p.mass_rate)(tt, &s);
                Ok(MassPointState { x: s.v, v: a, m: nu }.to_vec())
            },
            &y,
            t,
            h,
        )?;
        let s = MassPointState::from_vec(&y);
        if !(s.m > p.m_min) {
            return Err(DynamicsError::MassUnderflow { t: f64_of(t + h), mass: f64_of(s.m) });
        }
        out.push(s);
    }
    Ok(out)
}

/// Block inertia `ρ [[I, A], [Aᵀ, B]]` of a body-point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyPointInertia<T: Real> {
    pub rho: T,
    pub blocks: InertiaDensity<T>,
}

/// `(ρ d/dt + ν) M (v; μ) = (α; β)` solved for `(v̇, μ̇)`; `ρ̇ = ν`.
pub fn body_point_rhs<T: Real>(
    inertia: &BodyPointInertia<T>,
    y: &Vector6<T>,
    rhs: &Vector6<T>,
    nu: T,
) -> Result<Vector6<T>, DynamicsError> {
    let m = inertia.blocks.unit_block();
    let lu = Lu::new(&m).ok_or(DynamicsError::SingularInertia)?;
    if !(inertia.rho > T::zero()) {
        return Err(DynamicsError::MassUnderflow { t: f64::NAN, mass: f64_of(inertia.rho) });
    }
    Ok(lu.solve(&(rhs - m * y * nu)) / inertia.rho)
}

/// Integrates a body-point with constant blocks, mass rate and right-hand side.
/// Returns `steps + 1` pairs `(ρ, (v; μ))`.
pub fn integrate_body_point<T: Real>(
    inertia: &BodyPointInertia<T>,
    y0: Vector6<T>,
    rhs: impl Fn(T) -> Vector6<T>,
    nu: T,
    h: T,
    steps: usize,
) -> Result<Vec<(T, Vector6<T>)>, DynamicsError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push((inertia.rho, y0));
    let mut z = SVector::<T, 7>::zeros();
    z.fixed_rows_mut::<6>(0).copy_from(&y0);
    z[6] = inertia.rho;
    for i in 0..steps {
        let t = T::count(i) * h;
        z = try_rk4_step(
            |tt, zz: &SVector<T, 7>| -> Result<SVector<T, 7>, DynamicsError> {
                let cur = BodyPointInertia { rho: zz[6], blocks: inertia.blocks };
                let yd = body_point_rhs(&cur, &zz.fixed_rows::<6>(0).into_owned(), &rhs(tt), nu)?;
                let mut k = SVector::<T, 7>::zeros();
                k.fixed_rows_mut::<6>(0).copy_from(&yd);
                k[6] = nu;
                Ok(k)
            },
            &z,
            t,
            h,
        )?;
        out.push((z[6], z.fixed_rows::<6>(0).into_owned()));
    }
    Ok(out)
}

/// Snapshot of a gravitating point system.
#[derive(Clone, Debug, PartialEq)]
pub struct NbodySample<T: Real> {
    pub t: T,
    pub x: Vec<Vector3<T>>,
    pub v: Vec<Vector3<T>>,
    /// Kinetic plus potential energy `½Σmv² − γΣ mᵢmⱼ/rᵢⱼ`.
    pub energy: T,
    pub momentum: Vector3<T>,
    /// About the origin.
    pub angular_momentum: Vector3<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NbodyConfig<T: Real> {
    pub gamma: T,
    pub min_distance: T,
    pub h: T,
    pub steps: usize,
}

fn nbody_accel<T: Real>(
    masses: &[T],
    y: &[T],
    gamma: T,
    min_distance: T,
    t: T,
) -> Result<Vec<T>, DynamicsError> {
    let n = masses.len();
    let mut out = vec![T::zero(); 6 * n];
    for i in 0..n {
        for k in 0..3 {
            out[3 * i + k] = y[3 * n + 3 * i + k];
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let r = Vector3::new(y[3 * j] - y[3 * i], y[3 * j + 1] - y[3 * i + 1], y[3 * j + 2] - y[3 * i + 2]);
            let dist = norm(&r);
            if !(dist > min_distance) {
                return Err(DynamicsError::CloseApproach { t: f64_of(t), i, j, distance: f64_of(dist) });
            }
            let g = r * (gamma / (dist * dist * dist));
            for k in 0..3 {
                out[3 * n + 3 * i + k] += g[k] * masses[j];
                out[3 * n + 3 * j + k] -= g[k] * masses[i];
            }
        }
    }
    Ok(out)
}

fn nbody_sample<T: Real>(masses: &[T], y: &[T], gamma: T, t: T) -> NbodySample<T> {
    let n = masses.len();
    let x: Vec<Vector3<T>> = (0..n).map(|i| Vector3::new(y[3 * i], y[3 * i + 1], y[3 * i + 2])).collect();
    let v: Vec<Vector3<T>> = (0..n).map(|i| Vector3::new(y[3 * n + 3 * i], y[3 * n + 3 * i + 1], y[3 * n + 3 * i + 2])).collect();
    let mut energy = T::zero();
    let mut momentum = Vector3::zeros();
    let mut angular = Vector3::zeros();
    for i in 0..n {
        let p = v[i] * masses[i];
        energy += T::half() * masses[i] * v[i].dot(&v[i]);
        momentum += p;
        angular += x[i].cross(&p);
        for j in (i + 1)..n {
            energy -= gamma * masses[i] * masses[j] / norm(&(x[j] - x[i]));
        }
    }
    NbodySample { t, x, v, energy, momentum, angular_momentum: angular }
}

/// RK4 integration of point masses under mutual gravitation. Mass rates must be zero.
pub fn nbody_simulate<T: Real>(
    points: &[PointMass<T>],
    velocities: &[Vector3<T>],
    cfg: &NbodyConfig<T>,
) -> Result<Vec<NbodySample<T>>, DynamicsError> {
    if points.len() != velocities.len() {
        return Err(DynamicsError::InvalidInput(format!(
            "{} points but {} velocities",
            points.len(),
            velocities.len()
        )));
    }
    if points.iter().any(|p| p.nu != T::zero()) {
        return Err(DynamicsError::InvalidInput("gravitating points must have zero mass rate".into()));
    }
    let masses: Vec<T> = points.iter().map(|p| p.m).collect();
    let mut y: Vec<T> = points.iter().flat_map(|p| [p.x[0], p.x[1], p.x[2]]).collect();
    y.extend(velocities.iter().flat_map(|v| [v[0], v[1], v[2]]));
    let mut out = Vec::with_capacity(cfg.steps + 1);
    nbody_accel(&masses, &y, cfg.gamma, cfg.min_distance, T::zero())?;
    out.push(nbody_sample(&masses, &y, cfg.gamma, T::zero()));
    for i in 0..cfg.steps {
        let t = T::count(i) * cfg.h;
        y = try_rk4_step(|tt, yy: &Vec<T>| nbody_accel(&masses, yy, cfg.gamma, cfg.min_distance, tt), &y, t, cfg.h)?;
        out.push(nbody_sample(&masses, &y, cfg.gamma, t + cfg.h));
    }
    Ok(out)
}

/// Time for the separation of bodies `i` and `j` to sweep one full turn in
/// the xy-plane, by linear interpolation of the unwrapped angle.
pub fn orbit_period<T: Real>(samples: &[NbodySample<T>], i: usize, j: usize) -> Option<T> {
    let angle = |s: &NbodySample<T>| {
        let r = s.x[j] - s.x[i];
        r[1].atan2(r[0])
    };
    let two_pi = T::TAU();
    let a0 = angle(samples.first()?);
    let mut unwrapped = T::zero();
    let mut prev = a0;
    for w in samples.windows(2) {
        let a = angle(&w[1]);
        let mut da = a - prev;
        if da > T::PI() {
            da -= two_pi;
        } else if da < -T::PI() {
            da += two_pi;
        }
        let next = unwrapped + da;
        if next.abs() >= two_pi {
            let frac = (two_pi - unwrapped.abs()) / da.abs();
            return Some(w[0].t + (w[1].t - w[0].t) * frac);
        }
        unwrapped = next;
        prev = a;
    }
    None
}

/// Component densities at a material point, with the reaction network.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiphaseState<T: Real> {
    pub rho: Vec<T>,
    /// Constant offsets of the component centres from the particulate centre.
    pub offsets: Vec<Vector3<T>>,
    /// Reaction velocities `J_I`.
    pub rates: Vec<T>,
    /// `stoichiometry[α][I]`.
    pub stoichiometry: Vec<Vec<T>>,
}

/// Diagnostics of one multiphase step.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiphaseStep<T: Real> {
    pub state: MultiphaseState<T>,
    /// `|Σρ_α − ρ|` with `ρ` advanced by its own continuity equation.
    pub total_residual: T,
    /// `|J_x − 2Σρ_α l_α²|` with `J_x` advanced by its own equation.
    pub inertia_residual: T,
}

impl<T: Real> MultiphaseState<T> {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let n = self.rho.len();
        if self.offsets.len() != n || self.stoichiometry.len() != n {
            return Err(DynamicsError::InvalidInput("component tables differ in length".into()));
        }
        if let Some(row) = self.stoichiometry.iter().find(|r| r.len() != self.rates.len()) {
            return Err(DynamicsError::InvalidInput(format!(
                "stoichiometric row has {} entries for {} reactions",
                row.len(),
                self.rates.len()
            )));
        }
        if let Some((component, &value)) = self.rho.iter().enumerate().find(|(_, r)| !(**r >= T::zero())) {
            return Err(DynamicsError::NegativeDensity { component, value: f64_of(value) });
        }
        Ok(())
    }

    pub fn total_density(&self) -> T {
        self.rho.iter().fold(T::zero(), |a, &r| a + r)
    }

    /// `γ_α = Σ_I ν_{αI} J_I`.
    pub fn formation(&self) -> Vec<T> {
        self.stoichiometry
            .iter()
            .map(|row| row.iter().zip(&self.rates).fold(T::zero(), |a, (&nu, &j)| a + nu * j))
            .collect()
    }

    /// `J_ij = Σ ρ_α (‖z‖² δ_ij − z_i z_j)`.
    pub fn inertia_tensor(&self) -> Matrix3<T> {
        self.rho.iter().zip(&self.offsets).fold(Matrix3::zeros(), |acc, (&r, z)| {
            acc + (Matrix3::identity() * z.dot(z) - z * z.transpose()) * r
        })
    }

    /// `2Σρ_α l_α²`.
    pub fn inertia_invariant(&self) -> T {
        self.rho.iter().zip(&self.offsets).fold(T::zero(), |a, (&r, z)| a + T::two() * r * z.dot(z))
    }
}

/// Advances `dρ_α/dt = γ_α − ρ_α div v` by one RK4 step, with `J_I` and
/// `div v` held constant over the step. All components share the velocity.
pub fn multiphase_step<T: Real>(state: &MultiphaseState<T>, div_v: T, h: T) -> Result<MultiphaseStep<T>, DynamicsError> {
    state.validate()?;
    let gamma = state.formation();
    let rho = rk4_step(
        |_, r: &Vec<T>| r.iter().zip(&gamma).map(|(&r, &g)| g - r * div_v).collect::<Vec<T>>(),
        &state.rho,
        T::zero(),
        h,
    )?;
    if let Some((component, &value)) = rho.iter().enumerate().find(|(_, r)| **r < T::zero()) {
        return Err(DynamicsError::NegativeDensity { component, value: f64_of(value) });
    }
    let gamma_sum = gamma.iter().fold(T::zero(), |a, &g| a + g);
    let total = rk4_step(|_, r: &SVector<T, 1>| SVector::<T, 1>::new(gamma_sum - r[0] * div_v), &SVector::<T, 1>::new(state.total_density()), T::zero(), h)?[0];
    let source = gamma
        .iter()
        .zip(&state.offsets)
        .fold(T::zero(), |a, (&g, z)| a + T::two() * g * z.dot(z));
    let jx = rk4_step(|_, j: &SVector<T, 1>| SVector::<T, 1>::new(source - j[0] * div_v), &SVector::<T, 1>::new(state.inertia_invariant()), T::zero(), h)?[0];
    let next = MultiphaseState { rho, ..state.clone() };
    Ok(MultiphaseStep {
        total_residual: (next.total_density() - total).abs(),
        inertia_residual: (next.inertia_invariant() - jx).abs(),
        state: next,
    })
}
