//! Mass, momentum, inertia, energy and gravity measures over mixed
//! distributions: absolutely continuous parts given by quadrature nodes and
//! pure point masses.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::linalg::{max_abs, norm, symmetric_eigenvalues};
use crate::real::Real;
use crate::screw::{screw_total, Slider, WrenchReduction};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("invalid {kind} node {index}: {reason}")]
    InvalidNode { kind: &'static str, index: usize, reason: &'static str },
    #[error("expected {expected} per-node values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("target {target} and source {source_index} are {distance:e} m apart (minimum {min:e})")]
    Singularity { target: usize, source_index: usize, distance: f64, min: f64 },
    #[error("inertia density {index} is not symmetric positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    InertiaNotPsd { index: usize, min_eigenvalue: f64 },
    #[error("grid needs at least 3 points per axis, got {0}")]
    GridTooSmall(usize),
}

/// Quadrature node of the absolutely continuous part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcNode<T: Real> {
    pub x: Vector3<T>,
    /// Quadrature weight (volume), m³.
    pub w: T,
    /// Density, kg/m³.
    pub rho: T,
    /// Source density, kg/(m³·s).
    pub nu: T,
}

/// Pure point mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMass<T: Real> {
    pub x: Vector3<T>,
    pub m: T,
    /// Mass rate, kg/s.
    pub nu: T,
}

/// Mixed mass distribution. Nodes are always enumerated continuous part first,
/// then point masses; every per-node slice argument follows that order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MassDistribution<T: Real> {
    ac_nodes: Vec<AcNode<T>>,
    pp_points: Vec<PointMass<T>>,
}

/// Per-node view shared by both parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeView<T: Real> {
    pub x: Vector3<T>,
    /// Measure weight: the quadrature weight for continuous nodes, 1 for point masses.
    pub weight: T,
    /// Density for continuous nodes, mass for point masses.
    pub rho: T,
    pub nu: T,
}

impl<T: Real> NodeView<T> {
    pub fn mass(&self) -> T {
        self.weight * self.rho
    }
    pub fn source(&self) -> T {
        self.weight * self.nu
    }
}

impl<T: Real> MassDistribution<T> {
    pub fn new(ac_nodes: Vec<AcNode<T>>, pp_points: Vec<PointMass<T>>) -> Result<Self, MeasureError> {
        for (index, n) in ac_nodes.iter().enumerate() {
            let reason = if !n.x.iter().all(|c| c.is_finite()) {
                Some("position not finite")
            } else if !(n.w > T::zero()) {
                Some("quadrature weight must be positive")
            } else if !(n.rho >= T::zero()) {
                Some("density must be non-negative")
            } else if !n.nu.is_finite() {
                Some("source density not finite")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(MeasureError::InvalidNode { kind: "continuous", index, reason });
            }
        }
        for (index, p) in pp_points.iter().enumerate() {
            let reason = if !p.x.iter().all(|c| c.is_finite()) {
                Some("position not finite")
            } else if !(p.m >= T::zero()) {
                Some("mass must be non-negative")
            } else if !p.nu.is_finite() {
                Some("mass rate not finite")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(MeasureError::InvalidNode { kind: "point", index, reason });
            }
        }
        Ok(Self { ac_nodes, pp_points })
    }

    pub fn points(pp_points: Vec<PointMass<T>>) -> Result<Self, MeasureError> {
        Self::new(Vec::new(), pp_points)
    }

    pub fn ac_nodes(&self) -> &[AcNode<T>] {
        &self.ac_nodes
    }

    pub fn pp_points(&self) -> &[PointMass<T>] {
        &self.pp_points
    }

    pub fn len(&self) -> usize {
        self.ac_nodes.len() + self.pp_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeView<T>> + '_ {
        let ac = self.ac_nodes.iter().map(|n| NodeView { x: n.x, weight: n.w, rho: n.rho, nu: n.nu });
        let pp = self.pp_points.iter().map(|p| NodeView { x: p.x, weight: T::one(), rho: p.m, nu: p.nu });
        ac.chain(pp)
    }

    /// Union of two distributions (disjoint supports assumed).
    pub fn merged(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.ac_nodes.extend_from_slice(&other.ac_nodes);
        out.pp_points.extend_from_slice(&other.pp_points);
        out
    }

    /// Uniform-density box `[lo, hi]` sampled at `n³` midpoint nodes.
    pub fn midpoint_box(lo: Vector3<T>, hi: Vector3<T>, n: usize, rho: T, nu: T) -> Result<Self, MeasureError> {
        let step = (hi - lo) / T::count(n);
        let w = step[0] * step[1] * step[2];
        let mut nodes = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let idx = Vector3::new(T::count(i), T::count(j), T::count(k)).add_scalar(T::half());
                    nodes.push(AcNode { x: lo + step.component_mul(&idx), w, rho, nu });
                }
            }
        }
        Self::new(nodes, Vec::new())
    }

    fn expect_len(&self, got: usize) -> Result<(), MeasureError> {
        if got != self.len() {
            return Err(MeasureError::LengthMismatch { expected: self.len(), got });
        }
        Ok(())
    }
}

/// Translation velocity and torque coordinate of one node.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PointState<T: Real> {
    pub v: Vector3<T>,
    pub mu: Vector3<T>,
}

impl<T: Real> PointState<T> {
    pub fn new(v: Vector3<T>, mu: Vector3<T>) -> Self {
        Self { v, mu }
    }

    pub fn stacked(&self) -> Vector6<T> {
        Vector6::new(self.v[0], self.v[1], self.v[2], self.mu[0], self.mu[1], self.mu[2])
    }
}

/// Inertia blocks `A`, `B` of a node; the density comes from the distribution.
/// The density-scaled tensor is `θ = ρ [[I, A], [Aᵀ, B]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InertiaDensity<T: Real> {
    pub a: Matrix3<T>,
    pub b: Matrix3<T>,
}

/// Tolerance for symmetry and semidefiniteness of inertia blocks.
pub const INERTIA_TOL: f64 = 1e-10;

impl<T: Real> InertiaDensity<T> {
    /// Checks that `[[I, A], [Aᵀ, B]]` is symmetric positive semidefinite.
    pub fn new(a: Matrix3<T>, b: Matrix3<T>) -> Result<Self, MeasureError> {
        let me = Self { a, b };
        me.check(0)?;
        Ok(me)
    }

    /// Point-like node: `A = B = 0`.
    pub fn point() -> Self {
        Self { a: Matrix3::zeros(), b: Matrix3::zeros() }
    }

    fn check(&self, index: usize) -> Result<(), MeasureError> {
        let m = self.unit_block();
        let tol = T::lit(INERTIA_TOL) * T::one().max(max_abs(&m));
        let asym = max_abs(&(m - m.transpose()));
        let min_ev = symmetric_eigenvalues(&m)[0];
        if asym > tol || min_ev < -tol {
            return Err(MeasureError::InertiaNotPsd { index, min_eigenvalue: min_ev.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    }

    /// `[[I, A], [Aᵀ, B]]`.
    pub fn unit_block(&self) -> Matrix6<T> {
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.a);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.a.transpose());
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.b);
        m
    }

    /// `θ = ρ [[I, A], [Aᵀ, B]]`.
    pub fn assembled(&self, rho: T) -> Matrix6<T> {
        self.unit_block() * rho
    }
}

fn check_states<T: Real>(d: &MassDistribution<T>, states: &[PointState<T>], theta: &[InertiaDensity<T>]) -> Result<(), MeasureError> {
    d.expect_len(states.len())?;
    d.expect_len(theta.len())?;
    for (i, th) in theta.iter().enumerate() {
        th.check(i)?;
    }
    Ok(())
}

/// Total mass `Σ wᵢρᵢ + Σ mₖ`.
pub fn total_mass<T: Real>(d: &MassDistribution<T>) -> T {
    d.nodes().fold(T::zero(), |acc, n| acc + n.mass())
}

/// Total mass rate `Σ wᵢνᵢ + Σ νₖ`.
pub fn total_source<T: Real>(d: &MassDistribution<T>) -> T {
    d.nodes().fold(T::zero(), |acc, n| acc + n.source())
}

/// Per-node momentum slider `ρ(v + Aμ), ρ(Aᵀv + Bμ)` bound at the node.
pub fn momentum_density<T: Real>(node: &NodeView<T>, state: &PointState<T>, theta: &InertiaDensity<T>) -> Slider<T, 3> {
    let p = (state.v + theta.a * state.mu) * node.rho;
    let q = (theta.a.transpose() * state.v + theta.b * state.mu) * node.rho;
    Slider::new(p, q, node.x)
}

/// Momentum screw of the distribution reduced at `y`.
pub fn momentum_screw<T: Real>(
    d: &MassDistribution<T>,
    states: &[PointState<T>],
    theta: &[InertiaDensity<T>],
    y: &Vector3<T>,
) -> Result<WrenchReduction<T, 3>, MeasureError> {
    check_states(d, states, theta)?;
    let items: Vec<_> = d
        .nodes()
        .zip(states.iter().zip(theta))
        .map(|(n, (s, th))| (n.weight, momentum_density(&n, s, th)))
        .collect();
    Ok(screw_total(&items, y).total)
}

/// `Σ weight · (v, μ)ᵀ θ (v, μ)`; no ½ factor.
pub fn kinetic_energy<T: Real>(
    d: &MassDistribution<T>,
    states: &[PointState<T>],
    theta: &[InertiaDensity<T>],
) -> Result<T, MeasureError> {
    check_states(d, states, theta)?;
    Ok(d.nodes().zip(states.iter().zip(theta)).fold(T::zero(), |acc, (n, (s, th))| {
        let u = s.stacked();
        acc + n.weight * u.dot(&(th.assembled(n.rho) * u))
    }))
}

/// `Σ weight · θ`.
pub fn inertia_measure<T: Real>(d: &MassDistribution<T>, theta: &[InertiaDensity<T>]) -> Result<Matrix6<T>, MeasureError> {
    d.expect_len(theta.len())?;
    for (i, th) in theta.iter().enumerate() {
        th.check(i)?;
    }
    Ok(d.nodes().zip(theta).fold(Matrix6::zeros(), |acc, (n, th)| acc + th.assembled(n.rho) * n.weight))
}

/// Gravitational interaction settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GravityConfig<T: Real> {
    pub gamma: T,
    /// Pairs closer than this are a singularity error (unless softened).
    pub min_distance: T,
    /// Plummer softening length; off by default.
    pub softening: Option<T>,
}

impl<T: Real> GravityConfig<T> {
    pub fn new(gamma: T) -> Self {
        Self { gamma, min_distance: T::lit(1e-9), softening: None }
    }
}

/// Accelerations at target nodes and the total gravity screw.
#[derive(Clone, Debug, PartialEq)]
pub struct GravityField<T: Real> {
    pub accelerations: Vec<Vector3<T>>,
    /// Screw of mass-weighted homogeneous sliders `ρ_x γ_x` reduced at the requested point.
    pub total: WrenchReduction<T, 3>,
}

/// Acceleration at `x` due to a mass `m` at `y`: `γ m (y - x) / ‖y - x‖³`.
pub fn pair_acceleration<T: Real>(cfg: &GravityConfig<T>, x: &Vector3<T>, y: &Vector3<T>, m: T) -> Option<Vector3<T>> {
    let r = y - x;
    let r2 = r.dot(&r);
    let dist = r2.sqrt();
    match cfg.softening {
        Some(eps) => {
            let s2 = r2 + eps * eps;
            Some(r * (cfg.gamma * m / (s2 * s2.sqrt())))
        }
        None if dist < cfg.min_distance => None,
        None => Some(r * (cfg.gamma * m / (r2 * dist))),
    }
}

fn gravity_impl<T: Real>(
    target: &MassDistribution<T>,
    sources: &MassDistribution<T>,
    cfg: &GravityConfig<T>,
    y: &Vector3<T>,
    skip_self: bool,
) -> Result<GravityField<T>, MeasureError> {
    let src: Vec<NodeView<T>> = sources.nodes().collect();
    let mut accelerations = Vec::with_capacity(target.len());
    let mut items = Vec::with_capacity(target.len());
    for (i, n) in target.nodes().enumerate() {
        let mut acc = Vector3::zeros();
        for (j, s) in src.iter().enumerate() {
            if skip_self && i == j {
                continue;
            }
            acc += pair_acceleration(cfg, &n.x, &s.x, s.mass()).ok_or_else(|| MeasureError::Singularity {
                target: i,
                source_index: j,
                distance: norm(&(s.x - n.x)).to_f64().unwrap_or(f64::NAN),
                min: cfg.min_distance.to_f64().unwrap_or(f64::NAN),
            })?;
        }
        accelerations.push(acc);
        items.push((n.weight, Slider::homogeneous(acc * n.rho, n.x)));
    }
    Ok(GravityField { accelerations, total: screw_total(&items, y).total })
}

/// Gravity exerted by `sources` on `target`.
pub fn gravity_field<T: Real>(
    target: &MassDistribution<T>,
    sources: &MassDistribution<T>,
    cfg: &GravityConfig<T>,
    y: &Vector3<T>,
) -> Result<GravityField<T>, MeasureError> {
    gravity_impl(target, sources, cfg, y, false)
}

/// Internal gravity of a distribution on itself, excluding self-pairs.
pub fn self_gravity<T: Real>(d: &MassDistribution<T>, cfg: &GravityConfig<T>, y: &Vector3<T>) -> Result<GravityField<T>, MeasureError> {
    gravity_impl(d, d, cfg, y, true)
}

/// `d/dt ∫ ρ f` over the distribution, from per-node `f` and its material derivative:
/// `Σ_ac w (ρ ḟ + ν f) + Σ_pp (m ḟ + ν f)`.
pub fn transport_derivative<T: Real>(d: &MassDistribution<T>, f: &[T], f_dot: &[T]) -> Result<T, MeasureError> {
    d.expect_len(f.len())?;
    d.expect_len(f_dot.len())?;
    Ok(d.nodes()
        .zip(f.iter().zip(f_dot))
        .fold(T::zero(), |acc, (n, (&fv, &fd))| acc + n.weight * (n.rho * fd + n.nu * fv)))
}

/// Uniform grid on a box, `n` points per axis including both faces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T: Real> {
    pub lo: Vector3<T>,
    pub hi: Vector3<T>,
    pub n: usize,
}

impl<T: Real> Grid<T> {
    pub fn spacing(&self) -> Vector3<T> {
        (self.hi - self.lo) / T::count(self.n - 1)
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Vector3<T> {
        self.lo + self.spacing().component_mul(&Vector3::new(T::count(i), T::count(j), T::count(k)))
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    fn sample<V: Copy>(&self, f: impl Fn(&Vector3<T>) -> V) -> Vec<V> {
        let mut out = Vec::with_capacity(self.n * self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    out.push(f(&self.point(i, j, k)));
                }
            }
        }
        out
    }
}

/// Continuity residual at interior grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualField<T: Real> {
    pub points: Vec<Vector3<T>>,
    pub values: Vec<T>,
    pub max_abs: T,
    pub h: T,
}

/// `∂ρ/∂t + div(ρv) − ν` from fields sampled on `grid` at `t - dt`, `t`, `t + dt`,
/// with second-order central differences in space and time (`dt` = smallest spacing).
pub fn continuity_residual<T: Real>(
    grid: &Grid<T>,
    t: T,
    rho: impl Fn(T, &Vector3<T>) -> T,
    v: impl Fn(T, &Vector3<T>) -> Vector3<T>,
    nu: impl Fn(T, &Vector3<T>) -> T,
) -> Result<ResidualField<T>, MeasureError> {
    if grid.n < 3 {
        return Err(MeasureError::GridTooSmall(grid.n));
    }
    let h = grid.spacing();
    let dt = h[0].min(h[1]).min(h[2]);
    let rho_prev = grid.sample(|x| rho(t - dt, x));
    let rho_next = grid.sample(|x| rho(t + dt, x));
    let flux = grid.sample(|x| v(t, x) * rho(t, x));
    let source = grid.sample(|x| nu(t, x));
    let two = T::two();
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut worst = T::zero();
    for i in 1..grid.n - 1 {
        for j in 1..grid.n - 1 {
            for k in 1..grid.n - 1 {
                let c = grid.index(i, j, k);
                let drho = (rho_next[c] - rho_prev[c]) / (two * dt);
                let div = (flux[grid.index(i + 1, j, k)][0] - flux[grid.index(i - 1, j, k)][0]) / (two * h[0])
                    + (flux[grid.index(i, j + 1, k)][1] - flux[grid.index(i, j - 1, k)][1]) / (two * h[1])
                    + (flux[grid.index(i, j, k + 1)][2] - flux[grid.index(i, j, k - 1)][2]) / (two * h[2]);
                let r = drho + div - source[c];
                worst = worst.max(r.abs());
                points.push(grid.point(i, j, k));
                values.push(r);
            }
        }
    }
    Ok(ResidualField { points, values, max_abs: worst, h: h[0].max(h[1]).max(h[2]) })
}
