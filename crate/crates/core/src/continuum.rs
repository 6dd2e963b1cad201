//! Residual checks of the continuum identities on manufactured fields.
//!
//! Only spatial derivatives are discretized (second-order central
//! differences); everything else is evaluated in closed form, so residuals
//! of exact solutions decay like `h²`.

use nalgebra::{Matrix3, Vector3, Vector6};

use crate::linalg::{max_abs, norm};
use crate::measures::InertiaDensity;
use crate::real::Real;
use crate::screw::{dual_vector, skew, SkewTensor3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContinuumError {
    #[error("resolution {0} is below the minimum of 3 cells per axis")]
    ResolutionTooLow(usize),
    #[error("empty sample set")]
    NoSamples,
    #[error("invalid box: lower corner must be below upper corner")]
    InvalidBox,
}

/// `τ`, the dual vector of `Pᵀ − P`.
pub fn antisymmetric_dual<T: Real>(p: &Matrix3<T>) -> Vector3<T> {
    let a = p.transpose() - p;
    dual_vector(&SkewTensor3::try_from_matrix(&a, T::zero()).expect("Pᵀ − P is antisymmetric"))
}

/// Row divergence `(div P)_i = ∂_j P_ij` by central differences of step `h`.
pub fn divergence<T: Real>(p: impl Fn(&Vector3<T>) -> Matrix3<T>, x: &Vector3<T>, h: T) -> Vector3<T> {
    let mut out = Vector3::zeros();
    for j in 0..3 {
        let mut e = Vector3::zeros();
        e[j] = h;
        let d = (p(&(x + e)) - p(&(x - e))) / (T::two() * h);
        out += d.column(j);
    }
    out
}

/// `(∇f) w = Σ_j w_j ∂_j f` by central differences.
pub fn directional<T: Real>(f: impl Fn(&Vector3<T>) -> Vector6<T>, x: &Vector3<T>, w: &Vector3<T>, h: T) -> Vector6<T> {
    let mut out = Vector6::zeros();
    for j in 0..3 {
        let mut e = Vector3::zeros();
        e[j] = h;
        out += (f(&(x + e)) - f(&(x - e))) * (w[j] / (T::two() * h));
    }
    out
}

type Field<'a, T, R> = Box<dyn Fn(&Vector3<T>) -> R + 'a>;
type TimeField<'a, T, R> = Box<dyn Fn(&Vector3<T>, T) -> R + 'a>;

/// Closed-form tensor field, optionally with its exact row divergence.
pub struct TensorField<'a, T: Real> {
    pub value: Field<'a, T, Matrix3<T>>,
    pub divergence: Option<Field<'a, T, Vector3<T>>>,
}

impl<'a, T: Real> TensorField<'a, T> {
    pub fn new(value: impl Fn(&Vector3<T>) -> Matrix3<T> + 'a) -> Self {
        Self { value: Box::new(value), divergence: None }
    }

    pub fn with_divergence(mut self, div: impl Fn(&Vector3<T>) -> Vector3<T> + 'a) -> Self {
        self.divergence = Some(Box::new(div));
        self
    }

    fn div_at(&self, x: &Vector3<T>, h: T) -> Vector3<T> {
        match &self.divergence {
            Some(d) => d(x),
            None => divergence(|y| (self.value)(y), x, h),
        }
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds<T: Real> {
    pub lo: Vector3<T>,
    pub hi: Vector3<T>,
}

impl<T: Real> Bounds<T> {
    pub fn new(lo: Vector3<T>, hi: Vector3<T>) -> Result<Self, ContinuumError> {
        if (0..3).any(|k| !(hi[k] > lo[k])) {
            return Err(ContinuumError::InvalidBox);
        }
        Ok(Self { lo, hi })
    }

    pub fn volume(&self) -> T {
        let e = self.hi - self.lo;
        e[0] * e[1] * e[2]
    }

    /// Cells per axis for a target spacing `h`, and the actual spacings.
    fn cells(&self, h: T) -> Result<([usize; 3], Vector3<T>), ContinuumError> {
        let mut n = [0usize; 3];
        let mut dx = Vector3::zeros();
        for k in 0..3 {
            let len = self.hi[k] - self.lo[k];
            n[k] = (len / h).round().to_usize().unwrap_or(0);
            if n[k] < 3 {
                return Err(ContinuumError::ResolutionTooLow(n[k]));
            }
            dx[k] = len / T::count(n[k]);
        }
        Ok((n, dx))
    }
}

/// Residual statistics at one resolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualLevel<T: Real> {
    pub h: T,
    pub max: T,
    pub mean: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceResidualReport<T: Real> {
    pub levels: Vec<ResidualLevel<T>>,
    /// Least-squares slope of `log max` against `log h`.
    pub order: Option<T>,
    /// RMS deviation of the log-log fit; zero for two levels.
    pub order_fit_residual: T,
}

impl<T: Real> BalanceResidualReport<T> {
    pub fn from_levels(levels: Vec<ResidualLevel<T>>) -> Self {
        let pts: Vec<(T, T)> = levels
            .iter()
            .filter(|l| l.max > T::zero() && l.h > T::zero())
            .map(|l| (l.h.ln(), l.max.ln()))
            .collect();
        let (order, order_fit_residual) = if pts.len() < 2 {
            (None, T::zero())
        } else {
            let n = T::count(pts.len());
            let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
            let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
            let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
            let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
            let slope = sxy / sxx;
            let rss = pts.iter().fold(T::zero(), |a, p| {
                let e = p.1 - (my + slope * (p.0 - mx));
                a + e * e
            });
            (Some(slope), (rss / n).sqrt())
        };
        Self { levels, order, order_fit_residual }
    }

    pub fn finest(&self) -> Option<&ResidualLevel<T>> {
        self.levels.last()
    }
}

fn level<T: Real>(h: T, norms: &[T]) -> Result<ResidualLevel<T>, ContinuumError> {
    if norms.is_empty() {
        return Err(ContinuumError::NoSamples);
    }
    let max = norms.iter().fold(T::zero(), |a, &r| a.max(r));
    let mean = norms.iter().fold(T::zero(), |a, &r| a + r) / T::count(norms.len());
    Ok(ResidualLevel { h, max, mean })
}

/// Both readings of the moment identity, `div(R P) = R div P + τ` pointwise
/// and its volume integral with the left side as a surface flux.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report<T: Real> {
    pub pointwise: BalanceResidualReport<T>,
    pub integral: BalanceResidualReport<T>,
    /// Surface flux `∮ R P n dS` at the finest resolution.
    pub flux: Vector3<T>,
    /// `∫ (R div P + τ) dV` at the finest resolution.
    pub volume: Vector3<T>,
}

/// Integral pieces at spacing `h`: surface flux of `R P` and volume integral of `R div P + τ`.
pub fn lemma1_integrals<T: Real>(
    field: &TensorField<'_, T>,
    y: &Vector3<T>,
    bounds: &Bounds<T>,
    h: T,
) -> Result<(Vector3<T>, Vector3<T>), ContinuumError> {
    let (n, dx) = bounds.cells(h)?;
    let rp = |x: &Vector3<T>| skew(&(y - x)) * (field.value)(x);
    let center = |i: usize, j: usize, k: usize| {
        bounds.lo
            + Vector3::new(
                dx[0] * (T::count(i) + T::half()),
                dx[1] * (T::count(j) + T::half()),
                dx[2] * (T::count(k) + T::half()),
            )
    };
    let cell_volume = dx[0] * dx[1] * dx[2];
    let mut volume = Vector3::zeros();
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                let x = center(i, j, k);
                let div = match &field.divergence {
                    Some(d) => d(&x),
                    None => {
                        let mut out = Vector3::zeros();
                        for a in 0..3 {
                            let mut e = Vector3::zeros();
                            e[a] = dx[a] * T::half();
                            out += ((field.value)(&(x + e)) - (field.value)(&(x - e))).column(a) / dx[a];
                        }
                        out
                    }
                };
                let p = (field.value)(&x);
                volume += (skew(&(y - x)) * div + antisymmetric_dual(&p)) * cell_volume;
            }
        }
    }
    let mut flux = Vector3::zeros();
    for axis in 0..3 {
        let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
        let area = dx[u] * dx[w];
        for a in 0..n[u] {
            for b in 0..n[w] {
                let mut x = Vector3::zeros();
                x[u] = bounds.lo[u] + dx[u] * (T::count(a) + T::half());
                x[w] = bounds.lo[w] + dx[w] * (T::count(b) + T::half());
                x[axis] = bounds.hi[axis];
                let hi = rp(&x).column(axis).into_owned();
                x[axis] = bounds.lo[axis];
                let lo = rp(&x).column(axis).into_owned();
                flux += (hi - lo) * area;
            }
        }
    }
    Ok((flux, volume))
}

/// Evaluates both readings at each spacing in `hs`. Pointwise samples are a
/// fixed `5³` lattice inside the box shrunk by the widest stencil, so every
/// spacing sees the same points.
pub fn lemma1_residual<T: Real>(
    field: &TensorField<'_, T>,
    y: &Vector3<T>,
    bounds: &Bounds<T>,
    hs: &[T],
) -> Result<Lemma1Report<T>, ContinuumError> {
    for &h in hs {
        bounds.cells(h)?;
    }
    let widest = hs.iter().fold(T::zero(), |a, &h| a.max(h));
    let margin = Vector3::from_element(widest);
    let inner = Bounds::new(bounds.lo + margin, bounds.hi - margin)?;
    let points = lattice_points(&inner, 5);
    let mut pointwise = Vec::with_capacity(hs.len());
    let mut integral = Vec::with_capacity(hs.len());
    let mut last = (Vector3::zeros(), Vector3::zeros());
    for &h in hs {
        let norms: Vec<T> = points
            .iter()
            .map(|x| {
                let lhs = divergence(|z| skew(&(y - z)) * (field.value)(z), x, h);
                let rhs = skew(&(y - x)) * field.div_at(x, h) + antisymmetric_dual(&(field.value)(x));
                norm(&(lhs - rhs))
            })
            .collect();
        pointwise.push(level(h, &norms)?);
        let (flux, volume) = lemma1_integrals(field, y, bounds, h)?;
        integral.push(level(h, &[norm(&(flux - volume))])?);
        last = (flux, volume);
    }
    Ok(Lemma1Report {
        pointwise: BalanceResidualReport::from_levels(pointwise),
        integral: BalanceResidualReport::from_levels(integral),
        flux: last.0,
        volume: last.1,
    })
}

/// Manufactured polar-medium fields. `state` is `(v; μ)` and `state_dt` its
/// partial time derivative; `body` is the body-force density `(γ; δ)`.
pub struct PolarFields<'a, T: Real> {
    pub rho: TimeField<'a, T, T>,
    pub nu: TimeField<'a, T, T>,
    pub state: TimeField<'a, T, Vector6<T>>,
    pub state_dt: TimeField<'a, T, Vector6<T>>,
    pub blocks: InertiaDensity<T>,
    pub body: TimeField<'a, T, Vector6<T>>,
    pub stress: TimeField<'a, T, Matrix3<T>>,
    pub couple_stress: TimeField<'a, T, Matrix3<T>>,
}

/// Pointwise residual of
/// `(ρ d/dt + ν) M (v; μ) − ρ(γ; δ) − div(P; Q) − (0; τ)`
/// with `d/dt = ∂_t + v·∇`.
pub fn polar_residual_at<T: Real>(f: &PolarFields<'_, T>, x: &Vector3<T>, t: T, h: T) -> Vector6<T> {
    let m = f.blocks.unit_block();
    let y = (f.state)(x, t);
    let v = y.fixed_rows::<3>(0).into_owned();
    let dydt = (f.state_dt)(x, t) + directional(|z| (f.state)(z, t), x, &v, h);
    let rho = (f.rho)(x, t);
    let lhs = m * dydt * rho + m * y * (f.nu)(x, t);
    let div_p = divergence(|z| (f.stress)(z, t), x, h);
    let div_q = divergence(|z| (f.couple_stress)(z, t), x, h);
    let tau = antisymmetric_dual(&(f.stress)(x, t));
    let mut rhs = (f.body)(x, t) * rho;
    for k in 0..3 {
        rhs[k] += div_p[k];
        rhs[k + 3] += div_q[k] + tau[k];
    }
    lhs - rhs
}

pub fn polar_balance_residual<T: Real>(
    f: &PolarFields<'_, T>,
    points: &[Vector3<T>],
    t: T,
    hs: &[T],
) -> Result<BalanceResidualReport<T>, ContinuumError> {
    let levels = hs
        .iter()
        .map(|&h| {
            let norms: Vec<T> = points.iter().map(|x| norm(&polar_residual_at(f, x, t, h))).collect();
            level(h, &norms)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BalanceResidualReport::from_levels(levels))
}

/// Manufactured fields for the non-polar balance with body force `g`.
pub struct CauchyFields<'a, T: Real> {
    pub rho: TimeField<'a, T, T>,
    pub nu: TimeField<'a, T, T>,
    pub velocity: TimeField<'a, T, Vector3<T>>,
    pub velocity_dt: TimeField<'a, T, Vector3<T>>,
    pub g: TimeField<'a, T, Vector3<T>>,
    pub stress: TimeField<'a, T, Matrix3<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyReport<T: Real> {
    pub balance: BalanceResidualReport<T>,
    /// Largest `|P − Pᵀ|` entry over the samples.
    pub max_asymmetry: T,
    /// False when the stress is not symmetric within `1e−10` relative.
    pub symmetric: bool,
}

/// Pointwise residual of `(ρ d/dt + ν) v − ρ g − div P`.
pub fn cauchy_residual_at<T: Real>(f: &CauchyFields<'_, T>, x: &Vector3<T>, t: T, h: T) -> Vector3<T> {
    let v = (f.velocity)(x, t);
    let mut conv = Vector3::zeros();
    for j in 0..3 {
        let mut e = Vector3::zeros();
        e[j] = h;
        conv += ((f.velocity)(&(x + e), t) - (f.velocity)(&(x - e), t)) * (v[j] / (T::two() * h));
    }
    let rho = (f.rho)(x, t);
    let lhs = ((f.velocity_dt)(x, t) + conv) * rho + v * (f.nu)(x, t);
    lhs - (f.g)(x, t) * rho - divergence(|z| (f.stress)(z, t), x, h)
}

pub fn cauchy_balance_residual<T: Real>(
    f: &CauchyFields<'_, T>,
    points: &[Vector3<T>],
    t: T,
    hs: &[T],
) -> Result<CauchyReport<T>, ContinuumError> {
    let mut max_asymmetry = T::zero();
    let mut symmetric = true;
    for x in points {
        let p = (f.stress)(x, t);
        let asym = max_abs(&(p - p.transpose()));
        max_asymmetry = max_asymmetry.max(asym);
        if asym > T::lit(1e-10) * T::one().max(max_abs(&p)) {
            symmetric = false;
        }
    }
    let levels = hs
        .iter()
        .map(|&h| {
            let norms: Vec<T> = points.iter().map(|x| norm(&cauchy_residual_at(f, x, t, h))).collect();
            level(h, &norms)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CauchyReport { balance: BalanceResidualReport::from_levels(levels), max_asymmetry, symmetric })
}

/// Deterministic interior sample points: a `k³` lattice strictly inside the box.
pub fn lattice_points<T: Real>(bounds: &Bounds<T>, k: usize) -> Vec<Vector3<T>> {
    let mut out = Vec::with_capacity(k * k * k);
    let step = (bounds.hi - bounds.lo) / T::count(k + 1);
    for i in 1..=k {
        for j in 1..=k {
            for l in 1..=k {
                out.push(bounds.lo + Vector3::new(step[0] * T::count(i), step[1] * T::count(j), step[2] * T::count(l)));
            }
        }
    }
    out
}
