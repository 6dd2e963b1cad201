//! Linear isotropic tensor maps and their multiplicative groups.
//!
//! Four cases are covered, each closed under composition:
//!
//! | type            | map                                                                 |
//! |-----------------|---------------------------------------------------------------------|
//! | [`IsoMap3`]     | `p₀I + p₁ tr(Z) I + p₂Z + p₃Zᵀ`                                      |
//! | [`IsoMapSym3`]  | `p₀I + p₁ tr(Z) I + p₂Z`, `Z` symmetric                              |
//! | [`IsoMap2`]     | `p₀I + p̃₀Ĩ + p₁ tr(Z) I + p₂ tr(ĨZ) I + p₃Z + p₄Zᵀ + p₅ĨZ + p₆ZᵀĨ` |
//! | [`IsoMapSym2`]  | `p₀I + p₁ tr(Z) I + p₂Z + p₃(ĨZ − ZĨ)`, `Z` symmetric                |
//!
//! with `Ĩ = [[0, −1], [1, 0]]`. Composition acts on coefficients: if `P`
//! has coefficients `p` and `Q` (applied to `P`) has `q`, then `Q∘P` has
//! `R(p)·q` where `R(p)` is the case's composition matrix.

use nalgebra::{Matrix2, Matrix3, SMatrix, SVector};

use crate::linalg::{max_abs, solve, symmetric_part, trace};
use crate::ode::{rk4_step, NonFiniteDerivative};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstitutiveError {
    #[error("{case} map is not invertible: factor {factor} = {value:e} vanishes")]
    Singular { case: &'static str, factor: &'static str, value: f64 },
    #[error("{case} map requires a symmetric argument (asymmetry {asymmetry:e})")]
    NotSymmetric { case: &'static str, asymmetry: f64 },
    #[error(transparent)]
    NonFinite(#[from] NonFiniteDerivative),
}

/// Relative threshold on determinant factors.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Relative symmetry tolerance on arguments of the symmetric cases.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// One multiplicative factor of a composition-matrix determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetFactor<T> {
    pub name: &'static str,
    pub value: T,
    /// Homogeneity degree in the coefficients.
    pub degree: i32,
    /// Multiplicity in the determinant.
    pub power: i32,
}

/// Result of a well-definedness test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WellDefined<T> {
    pub ok: bool,
    pub determinant: T,
    /// `SINGULAR_TOL · scale^degree`.
    pub threshold: T,
}

/// Common surface of the four isotropic map groups.
pub trait IsotropicMap<T: Real, const N: usize>: Copy + std::fmt::Debug + PartialEq {
    const CASE: &'static str;
    /// Whether the map is only defined on symmetric arguments.
    const SYMMETRIC: bool;

    fn identity() -> Self;
    fn coefficients(&self) -> Vec<T>;
    /// Evaluates the defining linear combination without argument checks.
    fn eval(&self, z: &SMatrix<T, N, N>) -> SMatrix<T, N, N>;
    /// `self ∘ inner`, at coefficient level.
    fn after(&self, inner: &Self) -> Self;
    fn det_factors(&self) -> Vec<DetFactor<T>>;
    /// Largest magnitude among the coefficients the determinant depends on.
    fn scale(&self) -> T;
    /// Closed-form inverse; meaningful only when the map is well defined.
    fn inverse_unchecked(&self) -> Self;
}

/// Applies `m` to `z`, checking symmetry for the symmetric cases.
pub fn apply<T: Real, const N: usize, M: IsotropicMap<T, N>>(
    m: &M,
    z: &SMatrix<T, N, N>,
) -> Result<SMatrix<T, N, N>, ConstitutiveError> {
    if M::SYMMETRIC {
        let asym = max_abs(&(z - z.transpose()));
        if asym > T::lit(SYMMETRY_TOL) * T::one().max(max_abs(z)) {
            return Err(ConstitutiveError::NotSymmetric { case: M::CASE, asymmetry: asym.to_f64().unwrap_or(f64::NAN) });
        }
    }
    Ok(m.eval(z))
}

/// `outer ∘ inner`.
pub fn compose<T: Real, const N: usize, M: IsotropicMap<T, N>>(outer: &M, inner: &M) -> M {
    outer.after(inner)
}

pub fn is_well_defined<T: Real, const N: usize, M: IsotropicMap<T, N>>(m: &M) -> WellDefined<T> {
    let factors = m.det_factors();
    let determinant = factors.iter().fold(T::one(), |acc, f| acc * f.value.powi(f.power));
    let degree: i32 = factors.iter().map(|f| f.degree * f.power).sum();
    let threshold = T::lit(SINGULAR_TOL) * m.scale().powi(degree);
    let ok = determinant.is_finite() && determinant.abs() > threshold && m.scale() > T::zero();
    WellDefined { ok, determinant, threshold }
}

pub fn invert<T: Real, const N: usize, M: IsotropicMap<T, N>>(m: &M) -> Result<M, ConstitutiveError> {
    if !is_well_defined(m).ok {
        let scale = m.scale();
        let worst = m
            .det_factors()
            .into_iter()
            .map(|f| {
                let rel = if scale > T::zero() { f.value.abs() / scale.powi(f.degree) } else { T::zero() };
                (rel, f)
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(_, f)| f)
            .expect("every case has determinant factors");
        return Err(ConstitutiveError::Singular {
            case: M::CASE,
            factor: worst.name,
            value: worst.value.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(m.inverse_unchecked())
}

fn max_abs_of<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// `p₀I + p₁ tr(Z) I + p₂Z + p₃Zᵀ` on general 3×3 arguments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsoMap3<T: Real> {
    pub p: [T; 4],
}

impl<T: Real> IsoMap3<T> {
    pub fn new(p0: T, p1: T, p2: T, p3: T) -> Self {
        Self { p: [p0, p1, p2, p3] }
    }

    /// Coefficients in the alternative basis `I, tr(Z) I, sym(Z), skew(Z)`.
    pub fn to_split(&self) -> [T; 4] {
        let [p0, p1, p2, p3] = self.p;
        [p0, p1, p2 + p3, p2 - p3]
    }

    pub fn from_split(p0: T, p1: T, sym: T, skew: T) -> Self {
        Self::new(p0, p1, (sym + skew) * T::half(), (sym - skew) * T::half())
    }

    pub fn composition_matrix(&self) -> SMatrix<T, 4, 4> {
        let [p0, p1, p2, p3] = self.p;
        let (z, o, three) = (T::zero(), T::one(), T::lit(3.0));
        SMatrix::<T, 4, 4>::from_row_slice(&[
            o, three * p0, p0, p0, //
            z, three * p1 + p2 + p3, p1, p1, //
            z, z, p2, p3, //
            z, z, p3, p2,
        ])
    }
}

impl<T: Real> IsotropicMap<T, 3> for IsoMap3<T> {
    const CASE: &'static str = "3D general";
    const SYMMETRIC: bool = false;

    fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    fn coefficients(&self) -> Vec<T> {
        self.p.to_vec()
    }

    fn eval(&self, z: &Matrix3<T>) -> Matrix3<T> {
        let [p0, p1, p2, p3] = self.p;
        Matrix3::identity() * (p0 + p1 * trace(z)) + z * p2 + z.transpose() * p3
    }

    fn after(&self, inner: &Self) -> Self {
        let r = inner.composition_matrix() * SVector::<T, 4>::from_column_slice(&self.p);
        Self { p: [r[0], r[1], r[2], r[3]] }
    }

    fn det_factors(&self) -> Vec<DetFactor<T>> {
        let [_, p1, p2, p3] = self.p;
        vec![
            DetFactor { name: "3p1+p2+p3", value: T::lit(3.0) * p1 + p2 + p3, degree: 1, power: 1 },
            DetFactor { name: "p2+p3", value: p2 + p3, degree: 1, power: 1 },
            DetFactor { name: "p2-p3", value: p2 - p3, degree: 1, power: 1 },
        ]
    }

    fn scale(&self) -> T {
        max_abs_of(&self.p[1..])
    }

    fn inverse_unchecked(&self) -> Self {
        let [p0, p1, p2, p3] = self.p;
        let a = T::lit(3.0) * p1 + p2 + p3;
        let d = p2 * p2 - p3 * p3;
        Self::new(-p0 / a, -p1 / ((p2 + p3) * a), p2 / d, -p3 / d)
    }
}

/// `p₀I + p₁ tr(Z) I + p₂Z` on symmetric 3×3 arguments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsoMapSym3<T: Real> {
    pub p: [T; 3],
}

impl<T: Real> IsoMapSym3<T> {
    pub fn new(p0: T, p1: T, p2: T) -> Self {
        Self { p: [p0, p1, p2] }
    }

    /// Hooke map with Lamé constants: `λ tr(Z) I + 2μ Z`.
    pub fn lame(lambda: T, mu: T) -> Self {
        Self::new(T::zero(), lambda, T::two() * mu)
    }

    pub fn composition_matrix(&self) -> SMatrix<T, 3, 3> {
        let [p0, p1, p2] = self.p;
        let (z, o, three) = (T::zero(), T::one(), T::lit(3.0));
        SMatrix::<T, 3, 3>::from_row_slice(&[
            o, three * p0, p0, //
            z, three * p1 + p2, p1, //
            z, z, p2,
        ])
    }
}

impl<T: Real> IsotropicMap<T, 3> for IsoMapSym3<T> {
    const CASE: &'static str = "3D symmetric";
    const SYMMETRIC: bool = true;

    fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    fn coefficients(&self) -> Vec<T> {
        self.p.to_vec()
    }

    fn eval(&self, z: &Matrix3<T>) -> Matrix3<T> {
        let [p0, p1, p2] = self.p;
        Matrix3::identity() * (p0 + p1 * trace(z)) + z * p2
    }

    fn after(&self, inner: &Self) -> Self {
        let r = inner.composition_matrix() * SVector::<T, 3>::from_column_slice(&self.p);
        Self { p: [r[0], r[1], r[2]] }
    }

    fn det_factors(&self) -> Vec<DetFactor<T>> {
        let [_, p1, p2] = self.p;
        vec![
            DetFactor { name: "3p1+p2", value: T::lit(3.0) * p1 + p2, degree: 1, power: 1 },
            DetFactor { name: "p2", value: p2, degree: 1, power: 1 },
        ]
    }

    fn scale(&self) -> T {
        max_abs_of(&self.p[1..])
    }

    fn inverse_unchecked(&self) -> Self {
        let [p0, p1, p2] = self.p;
        let a = T::lit(3.0) * p1 + p2;
        Self::new(-p0 / a, -p1 / (p2 * a), T::one() / p2)
    }
}

/// `Ĩ`, the planar quarter-turn.
pub fn quarter_turn<T: Real>() -> Matrix2<T> {
    Matrix2::new(T::zero(), -T::one(), T::one(), T::zero())
}

/// General planar isotropic map with coefficients `(p₀, p̃₀, p₁, …, p₆)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsoMap2<T: Real> {
    pub p: [T; 8],
}

impl<T: Real> IsoMap2<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(p0: T, p0t: T, p1: T, p2: T, p3: T, p4: T, p5: T, p6: T) -> Self {
        Self { p: [p0, p0t, p1, p2, p3, p4, p5, p6] }
    }

    pub fn composition_matrix(&self) -> SMatrix<T, 8, 8> {
        let [p0, pt, p1, p2, p3, p4, p5, p6] = self.p;
        let (z, o, two) = (T::zero(), T::one(), T::two());
        SMatrix::<T, 8, 8>::from_row_slice(&[
            o, z, two * p0, -two * pt, p0, p0, -pt, pt, //
            z, o, z, z, pt, -pt, p0, p0, //
            z, z, two * p1 + p3 + p4, -(p5 + p6), p1, p1, -p6, p6, //
            z, z, two * p2 + p5 - p6, p3 - p4, p2, p2, -p4, p4, //
            z, z, z, z, p3, p4, p6 - p5 - p2, -p2, //
            z, z, z, z, p4, p3, p2, p2 + p5 - p6, //
            z, z, z, z, p5, -p6, p1 + p3 + p4, p1, //
            z, z, z, z, p6, -p5, p1, p1 + p3 + p4,
        ])
    }

    /// `(2p₁+p₃+p₄)(p₃−p₄) + (2p₂+p₅−p₆)(p₅+p₆)`.
    fn trace_factor(&self) -> T {
        let [_, _, p1, p2, p3, p4, p5, p6] = self.p;
        (T::two() * p1 + p3 + p4) * (p3 - p4) + (T::two() * p2 + p5 - p6) * (p5 + p6)
    }

    /// `(p₃+p₄)² + (p₅−p₆)²`.
    fn rotation_factor(&self) -> T {
        let [_, _, _, _, p3, p4, p5, p6] = self.p;
        (p3 + p4) * (p3 + p4) + (p5 - p6) * (p5 - p6)
    }
}

impl<T: Real> IsotropicMap<T, 2> for IsoMap2<T> {
    const CASE: &'static str = "2D general";
    const SYMMETRIC: bool = false;

    fn identity() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(z, z, z, z, o, z, z, z)
    }

    fn coefficients(&self) -> Vec<T> {
        self.p.to_vec()
    }

    fn eval(&self, z: &Matrix2<T>) -> Matrix2<T> {
        let [p0, pt, p1, p2, p3, p4, p5, p6] = self.p;
        let it = quarter_turn::<T>();
        let zt = z.transpose();
        Matrix2::identity() * (p0 + p1 * trace(z) + p2 * trace(&(it * z)))
            + it * pt
            + z * p3
            + zt * p4
            + it * z * p5
            + zt * it * p6
    }

    fn after(&self, inner: &Self) -> Self {
        let r = inner.composition_matrix() * SVector::<T, 8>::from_column_slice(&self.p);
        Self { p: [r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7]] }
    }

    fn det_factors(&self) -> Vec<DetFactor<T>> {
        vec![
            DetFactor {
                name: "(2p1+p3+p4)(p3-p4)+(2p2+p5-p6)(p5+p6)",
                value: self.trace_factor(),
                degree: 2,
                power: 2,
            },
            DetFactor { name: "(p3+p4)^2+(p5-p6)^2", value: self.rotation_factor(), degree: 2, power: 1 },
        ]
    }

    fn scale(&self) -> T {
        max_abs_of(&self.p[2..])
    }

    /// Solves the lower 4×4 block for `(q₃…q₆)`, then back-substitutes the
    /// upper block for `(q₀, q̃₀, q₁, q₂)`.
    fn inverse_unchecked(&self) -> Self {
        let r = self.composition_matrix();
        let lower: SMatrix<T, 4, 4> = r.fixed_view::<4, 4>(4, 4).into_owned();
        let mut e = SVector::<T, 4>::zeros();
        e[0] = T::one();
        let nan = T::nan();
        let q_hi = solve(&lower, &e).unwrap_or(SVector::<T, 4>::from_element(nan));
        let coupling: SMatrix<T, 4, 4> = r.fixed_view::<4, 4>(0, 4).into_owned();
        let b = coupling * q_hi;
        let [p0, pt, ..] = self.p;
        let a11 = r[(2, 2)];
        let a12 = r[(2, 3)];
        let a21 = r[(3, 2)];
        let a22 = r[(3, 3)];
        let det = a11 * a22 - a12 * a21;
        let q1 = -(a22 * b[2] - a12 * b[3]) / det;
        let q2 = -(a11 * b[3] - a21 * b[2]) / det;
        let q0 = -b[0] - T::two() * p0 * q1 + T::two() * pt * q2;
        let q0t = -b[1];
        Self::new(q0, q0t, q1, q2, q_hi[0], q_hi[1], q_hi[2], q_hi[3])
    }
}

/// `p₀I + p₁ tr(Z) I + p₂Z + p₃(ĨZ − ZĨ)` on symmetric 2×2 arguments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsoMapSym2<T: Real> {
    pub p: [T; 4],
}

impl<T: Real> IsoMapSym2<T> {
    pub fn new(p0: T, p1: T, p2: T, p3: T) -> Self {
        Self { p: [p0, p1, p2, p3] }
    }

    pub fn composition_matrix(&self) -> SMatrix<T, 4, 4> {
        let [p0, p1, p2, p3] = self.p;
        let (z, o, two, four) = (T::zero(), T::one(), T::two(), T::lit(4.0));
        SMatrix::<T, 4, 4>::from_row_slice(&[
            o, two * p0, p0, z, //
            z, two * p1 + p2, p1, two * p3, //
            z, z, p2, -four * p3, //
            z, z, p3, p2,
        ])
    }
}

impl<T: Real> IsotropicMap<T, 2> for IsoMapSym2<T> {
    const CASE: &'static str = "2D symmetric";
    const SYMMETRIC: bool = true;

    fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    fn coefficients(&self) -> Vec<T> {
        self.p.to_vec()
    }

    fn eval(&self, z: &Matrix2<T>) -> Matrix2<T> {
        let [p0, p1, p2, p3] = self.p;
        let it = quarter_turn::<T>();
        Matrix2::identity() * (p0 + p1 * trace(z)) + z * p2 + (it * z - z * it) * p3
    }

    fn after(&self, inner: &Self) -> Self {
        let r = inner.composition_matrix() * SVector::<T, 4>::from_column_slice(&self.p);
        Self { p: [r[0], r[1], r[2], r[3]] }
    }

    fn det_factors(&self) -> Vec<DetFactor<T>> {
        let [_, p1, p2, p3] = self.p;
        vec![
            DetFactor { name: "2p1+p2", value: T::two() * p1 + p2, degree: 1, power: 1 },
            DetFactor { name: "p2^2+4p3^2", value: p2 * p2 + T::lit(4.0) * p3 * p3, degree: 2, power: 1 },
        ]
    }

    fn scale(&self) -> T {
        max_abs_of(&self.p[1..])
    }

    fn inverse_unchecked(&self) -> Self {
        let [p0, p1, p2, p3] = self.p;
        let a = T::two() * p1 + p2;
        let b = p2 * p2 + T::lit(4.0) * p3 * p3;
        Self::new(-p0 / a, (T::two() * p3 * p3 - p1 * p2) / (a * b), p2 / b, -p3 / b)
    }
}

/// Strain and strain rate of a material point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrainState<T: Real, const N: usize> {
    pub strain: SMatrix<T, N, N>,
    pub rate: SMatrix<T, N, N>,
}

impl<T: Real, const N: usize> StrainState<T, N> {
    /// Symmetric part of the strain.
    pub fn z(&self) -> SMatrix<T, N, N> {
        symmetric_part(&self.strain)
    }

    /// Symmetric part of the strain rate.
    pub fn z_rate(&self) -> SMatrix<T, N, N> {
        symmetric_part(&self.rate)
    }
}

/// Integrates `Ṡ = G(t)` from `t = 0` with RK4; returns `steps + 1` states.
pub fn strain_evolve<T: Real, const N: usize>(
    velocity_gradient: impl Fn(T) -> SMatrix<T, N, N>,
    s0: SMatrix<T, N, N>,
    h: T,
    steps: usize,
) -> Result<Vec<StrainState<T, N>>, ConstitutiveError> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = s0;
    out.push(StrainState { strain: s, rate: velocity_gradient(T::zero()) });
    for i in 0..steps {
        let t = T::count(i) * h;
        s = rk4_step(|tt, _: &SMatrix<T, N, N>| velocity_gradient(tt), &s, t, h)?;
        out.push(StrainState { strain: s, rate: velocity_gradient(t + h) });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MediumKind {
    /// Stress from strain.
    Elastic,
    /// Stress from strain rate.
    Viscous,
}

/// Hooke-class stress `P = m(Z)` with `Z` the symmetrized strain or strain rate.
pub fn stress<T: Real, const N: usize, M: IsotropicMap<T, N>>(
    m: &M,
    state: &StrainState<T, N>,
    kind: MediumKind,
) -> Result<SMatrix<T, N, N>, ConstitutiveError> {
    invert(m)?;
    let z = match kind {
        MediumKind::Elastic => state.z(),
        MediumKind::Viscous => state.z_rate(),
    };
    apply(m, &z)
}

/// Trace of `ĨZ`, the planar rotation invariant.
pub fn planar_twist<T: Real>(z: &Matrix2<T>) -> T {
    trace(&(quarter_turn::<T>() * z))
}

/// Rotation of the plane by `angle`.
pub fn planar_rotation<T: Real>(angle: T) -> Matrix2<T> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}
