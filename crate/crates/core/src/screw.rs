//! Sliders and screws in spatial dimensions 2, 3 and 4.
//!
//! A [`Slider`] is a resultant `p` and torque `q` bound at a base point `x`.
//! Its reduction at any other point `y` keeps `p` and moves the torque with
//! the alternant of the offset:
//!
//! ```text
//! q_y = q_x + alt(x - y, p),      alt(r, p) = p ⊗ r - r ⊗ p
//! ```
//!
//! In three dimensions `alt(r, p) = r × p`, so a force bound at `x` has the
//! familiar moment `(x - y) × p` about `y`. Torques are stored in the compact
//! canonical form of the skew tensor `p ⊗ r - r ⊗ p`: a scalar in 2D, the dual
//! vector in 3D and the dual pair `(ω, ϖ)` in 4D.

use std::fmt::Debug;

use nalgebra::{Matrix2, Matrix3, Matrix4, SMatrix, SVector, Vector2, Vector3, Vector4, Vector6};

use crate::linalg::max_abs;
use crate::real::Real;

/// Operations every compact torque representation supports.
pub trait TorqueRep<T: Real>: Copy + Debug + PartialEq {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, s: T) -> Self;
    /// Largest absolute component.
    fn max_abs(&self) -> T;
    /// Flat canonical components (1, 3 or 8 entries).
    fn components(&self) -> Vec<T>;
}

/// Torque of a planar slider: the single independent entry of a 2×2 skew tensor.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PlanarTorque<T>(pub T);

impl<T: Real> TorqueRep<T> for PlanarTorque<T> {
    fn zero() -> Self {
        Self(T::zero())
    }
    fn add(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }
    fn sub(&self, other: &Self) -> Self {
        Self(self.0 - other.0)
    }
    fn scale(&self, s: T) -> Self {
        Self(self.0 * s)
    }
    fn max_abs(&self) -> T {
        self.0.abs()
    }
    fn components(&self) -> Vec<T> {
        vec![self.0]
    }
}

impl<T: Real> TorqueRep<T> for Vector3<T> {
    fn zero() -> Self {
        Vector3::zeros()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, s: T) -> Self {
        self * s
    }
    fn max_abs(&self) -> T {
        max_abs(self)
    }
    fn components(&self) -> Vec<T> {
        self.iter().copied().collect()
    }
}

/// Dual pair `(ω, ϖ)` of a skew 4×4 tensor in the canonical basis.
///
/// The fourth coordinates of both vectors vanish in this basis, so only the
/// first three of each are stored; [`DualPair::to_vector8`] restores the
/// stacked 8-vector `col{ω₁, ω₂, ω₃, 0, ϖ₁, ϖ₂, ϖ₃, 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DualPair<T: Real> {
    pub omega: Vector3<T>,
    pub varpi: Vector3<T>,
}

impl<T: Real> DualPair<T> {
    pub fn new(omega: Vector3<T>, varpi: Vector3<T>) -> Self {
        Self { omega, varpi }
    }

    pub fn to_vector8(&self) -> SVector<T, 8> {
        let z = T::zero();
        let (w, u) = (&self.omega, &self.varpi);
        SVector::<T, 8>::from_column_slice(&[w[0], w[1], w[2], z, u[0], u[1], u[2], z])
    }

    /// Inverse of [`to_vector8`](Self::to_vector8); `None` unless components 4 and 8 are exactly zero.
    pub fn from_vector8(v: &SVector<T, 8>) -> Option<Self> {
        if v[3] != T::zero() || v[7] != T::zero() {
            return None;
        }
        Some(Self {
            omega: Vector3::new(v[0], v[1], v[2]),
            varpi: Vector3::new(v[4], v[5], v[6]),
        })
    }
}

impl<T: Real> TorqueRep<T> for DualPair<T> {
    fn zero() -> Self {
        Self::default()
    }
    fn add(&self, other: &Self) -> Self {
        Self::new(self.omega + other.omega, self.varpi + other.varpi)
    }
    fn sub(&self, other: &Self) -> Self {
        Self::new(self.omega - other.omega, self.varpi - other.varpi)
    }
    fn scale(&self, s: T) -> Self {
        Self::new(self.omega * s, self.varpi * s)
    }
    fn max_abs(&self) -> T {
        max_abs(&self.omega).max(max_abs(&self.varpi))
    }
    fn components(&self) -> Vec<T> {
        self.to_vector8().iter().copied().collect()
    }
}

/// A matrix failed the antisymmetry check when converted to a skew tensor.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("matrix is not skew-symmetric (max |A + Aᵀ| = {residual:e})")]
pub struct NotSkew {
    pub residual: f64,
}

fn check_skew<T: Real, const N: usize>(m: &SMatrix<T, N, N>, tol: T) -> Result<(), NotSkew> {
    let residual = max_abs(&(m + m.transpose()));
    if residual > tol * T::one().max(max_abs(m)) {
        return Err(NotSkew { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

/// Skew 3×3 tensor stored as its dual vector, so `A + Aᵀ = 0` by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewTensor3<T: Real>(Vector3<T>);

impl<T: Real> SkewTensor3<T> {
    pub fn matrix(&self) -> Matrix3<T> {
        let w = &self.0;
        let z = T::zero();
        Matrix3::new(z, -w[2], w[1], w[2], z, -w[0], -w[1], w[0], z)
    }

    /// Reads the dual vector of `m`, rejecting matrices whose symmetric part
    /// exceeds `tol` relative to the largest entry.
    pub fn try_from_matrix(m: &Matrix3<T>, tol: T) -> Result<Self, NotSkew> {
        check_skew(m, tol)?;
        Ok(Self(Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])))
    }
}

/// Skew 4×4 tensor stored as its dual pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewTensor4<T: Real>(DualPair<T>);

impl<T: Real> SkewTensor4<T> {
    pub fn from_dual_pair(pair: DualPair<T>) -> Self {
        Self(pair)
    }

    /// The `Ω⁰` layout: `ω×` in the upper 3×3 block, `ϖ` in the last column.
    pub fn matrix(&self) -> Matrix4<T> {
        let w = &self.0.omega;
        let u = &self.0.varpi;
        let z = T::zero();
        Matrix4::new(
            z, -w[2], w[1], u[0], //
            w[2], z, -w[0], u[1], //
            -w[1], w[0], z, u[2], //
            -u[0], -u[1], -u[2], z,
        )
    }

    pub fn try_from_matrix(m: &Matrix4<T>, tol: T) -> Result<Self, NotSkew> {
        check_skew(m, tol)?;
        Ok(Self(DualPair::new(
            Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]),
            Vector3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]),
        )))
    }
}

/// `r×`, the skew tensor whose product with `u` is `r × u`.
pub fn cross_matrix<T: Real>(r: &Vector3<T>) -> SkewTensor3<T> {
    SkewTensor3(*r)
}

/// Dual vector `ω` with `ω× = Ω`.
pub fn dual_vector<T: Real>(omega: &SkewTensor3<T>) -> Vector3<T> {
    omega.0
}

pub fn dual_pair_4d<T: Real>(omega: &SkewTensor4<T>) -> DualPair<T> {
    omega.0
}

/// Shorthand for `cross_matrix(r).matrix()`.
pub fn skew<T: Real>(r: &Vector3<T>) -> Matrix3<T> {
    cross_matrix(r).matrix()
}

/// The 8×4 matrix `R⁰` with `R⁰·p` the stacked dual pair of `p ⊗ r - r ⊗ p`.
pub fn reduction_matrix_4d<T: Real>(r: &Vector4<T>) -> SMatrix<T, 8, 4> {
    let z = T::zero();
    SMatrix::<T, 8, 4>::from_row_slice(&[
        z, -r[2], r[1], z, //
        r[2], z, -r[0], z, //
        -r[1], r[0], z, z, //
        z, z, z, z, //
        r[3], z, z, -r[0], //
        z, r[3], z, -r[1], //
        z, z, r[3], -r[2], //
        z, z, z, z,
    ])
}

/// The entrywise 4×4 alternant display with every entry read from
/// `p ⊗ r - r ⊗ p`, entry (1,4) included.
pub fn alternant_matrix_4d<T: Real>(r: &Vector4<T>, p: &Vector4<T>) -> Matrix4<T> {
    let e = |i: usize, j: usize| r[j] * p[i] - r[i] * p[j];
    let z = T::zero();
    Matrix4::new(
        z, e(0, 1), e(0, 2), e(0, 3), //
        e(1, 0), z, e(1, 2), e(1, 3), //
        e(2, 0), e(2, 1), z, e(2, 3), //
        e(3, 0), e(3, 1), e(3, 2), z,
    )
}

/// Marker for a supported spatial dimension.
#[derive(Debug, Clone, Copy)]
pub struct Dim<const N: usize>;

/// Dimension-specific pieces of the slider calculus.
pub trait ScrewDim<T: Real, const N: usize> {
    type Torque: TorqueRep<T>;

    /// Compact form of `p ⊗ r - r ⊗ p`.
    fn alternant(r: &SVector<T, N>, p: &SVector<T, N>) -> Self::Torque;

    /// Full skew tensor encoded by a compact torque.
    fn torque_matrix(q: &Self::Torque) -> SMatrix<T, N, N>;
}

impl<T: Real> ScrewDim<T, 2> for Dim<2> {
    type Torque = PlanarTorque<T>;

    fn alternant(r: &Vector2<T>, p: &Vector2<T>) -> PlanarTorque<T> {
        PlanarTorque(r[0] * p[1] - r[1] * p[0])
    }

    fn torque_matrix(q: &PlanarTorque<T>) -> Matrix2<T> {
        Matrix2::new(T::zero(), -q.0, q.0, T::zero())
    }
}

impl<T: Real> ScrewDim<T, 3> for Dim<3> {
    type Torque = Vector3<T>;

    fn alternant(r: &Vector3<T>, p: &Vector3<T>) -> Vector3<T> {
        r.cross(p)
    }

    fn torque_matrix(q: &Vector3<T>) -> Matrix3<T> {
        skew(q)
    }
}

impl<T: Real> ScrewDim<T, 4> for Dim<4> {
    type Torque = DualPair<T>;

    fn alternant(r: &Vector4<T>, p: &Vector4<T>) -> DualPair<T> {
        let stacked = reduction_matrix_4d(r) * p;
        DualPair::from_vector8(&stacked).expect("rows 4 and 8 of the reduction matrix vanish")
    }

    fn torque_matrix(q: &DualPair<T>) -> Matrix4<T> {
        SkewTensor4(*q).matrix()
    }
}

pub type TorqueOf<T, const N: usize> = <Dim<N> as ScrewDim<T, N>>::Torque;

/// Compact alternant `alt(r, p)` in dimension `N`.
pub fn alternant<T: Real, const N: usize>(r: &SVector<T, N>, p: &SVector<T, N>) -> TorqueOf<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    <Dim<N> as ScrewDim<T, N>>::alternant(r, p)
}

/// Sliding vector-function: resultant and torque bound at `base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slider<T: Real, const N: usize>
where
    Dim<N>: ScrewDim<T, N>,
{
    pub p: SVector<T, N>,
    pub q: TorqueOf<T, N>,
    pub base: SVector<T, N>,
}

/// Stacked `[p; q]` at a reduction point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrenchReduction<T: Real, const N: usize>
where
    Dim<N>: ScrewDim<T, N>,
{
    pub p: SVector<T, N>,
    pub q: TorqueOf<T, N>,
    pub point: SVector<T, N>,
}

/// Stacked `[q; p]` at a reduction point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistReduction<T: Real, const N: usize>
where
    Dim<N>: ScrewDim<T, N>,
{
    pub q: TorqueOf<T, N>,
    pub p: SVector<T, N>,
    pub point: SVector<T, N>,
}

impl<T: Real, const N: usize> Slider<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    pub fn new(p: SVector<T, N>, q: TorqueOf<T, N>, base: SVector<T, N>) -> Self {
        Self { p, q, base }
    }

    /// Slider with zero torque at its base.
    pub fn homogeneous(p: SVector<T, N>, base: SVector<T, N>) -> Self {
        Self { p, q: TorqueOf::<T, N>::zero(), base }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.q == TorqueOf::<T, N>::zero()
    }

    /// Torque at `y`: `q_base + alt(base - y, p)`.
    pub fn torque_at(&self, y: &SVector<T, N>) -> TorqueOf<T, N> {
        self.q.add(&alternant(&(self.base - y), &self.p))
    }

    pub fn reduce(&self, y: &SVector<T, N>) -> WrenchReduction<T, N> {
        if *y == self.base {
            return WrenchReduction { p: self.p, q: self.q, point: *y };
        }
        WrenchReduction { p: self.p, q: self.torque_at(y), point: *y }
    }

    /// Same slider, bound at `z` instead.
    pub fn rebase(&self, z: &SVector<T, N>) -> Self {
        let r = self.reduce(z);
        Self { p: r.p, q: r.q, base: *z }
    }

    pub fn scaled(&self, w: T) -> Self {
        Self { p: self.p * w, q: self.q.scale(w), base: self.base }
    }
}

/// Free functions mirroring the methods, for call sites that read better that way.
pub fn reduce<T: Real, const N: usize>(s: &Slider<T, N>, y: &SVector<T, N>) -> WrenchReduction<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    s.reduce(y)
}

pub fn rebase<T: Real, const N: usize>(s: &Slider<T, N>, z: &SVector<T, N>) -> Slider<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    s.rebase(z)
}

impl<T: Real, const N: usize> WrenchReduction<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    /// The reduction of the same slider at another point.
    pub fn shifted_to(&self, y: &SVector<T, N>) -> Self {
        Self { p: self.p, q: self.q.add(&alternant(&(self.point - y), &self.p)), point: *y }
    }

    pub fn as_slider(&self) -> Slider<T, N> {
        Slider { p: self.p, q: self.q, base: self.point }
    }

    pub fn twist(&self) -> TwistReduction<T, N> {
        twist_of(self)
    }

    /// Stacked column `[p; q]` with the torque in canonical components.
    pub fn column(&self) -> Vec<T> {
        self.p.iter().copied().chain(self.q.components()).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        max_abs(&(self.p - other.p)).max(self.q.sub(&other.q).max_abs())
    }
}

impl<T: Real, const N: usize> TwistReduction<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    pub fn wrench(&self) -> WrenchReduction<T, N> {
        wrench_of(self)
    }

    /// Stacked column `[q; p]`.
    pub fn column(&self) -> Vec<T> {
        self.q.components().into_iter().chain(self.p.iter().copied()).collect()
    }
}

impl<T: Real> WrenchReduction<T, 3> {
    pub fn to_vector6(&self) -> Vector6<T> {
        Vector6::new(self.p[0], self.p[1], self.p[2], self.q[0], self.q[1], self.q[2])
    }

    pub fn from_vector6(v: &Vector6<T>, point: Vector3<T>) -> Self {
        Self { p: v.fixed_rows::<3>(0).into(), q: v.fixed_rows::<3>(3).into(), point }
    }
}

impl<T: Real> TwistReduction<T, 3> {
    pub fn to_vector6(&self) -> Vector6<T> {
        Vector6::new(self.q[0], self.q[1], self.q[2], self.p[0], self.p[1], self.p[2])
    }
}

pub fn twist_of<T: Real, const N: usize>(w: &WrenchReduction<T, N>) -> TwistReduction<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    TwistReduction { q: w.q, p: w.p, point: w.point }
}

pub fn wrench_of<T: Real, const N: usize>(t: &TwistReduction<T, N>) -> WrenchReduction<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    WrenchReduction { p: t.p, q: t.q, point: t.point }
}

/// Total of a weighted family of sliders reduced at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScrewTotal<T: Real, const N: usize>
where
    Dim<N>: ScrewDim<T, N>,
{
    pub total: WrenchReduction<T, N>,
    /// `Σ wᵢ qᵢ`, each torque taken at its own base.
    pub intrinsic_torque: TorqueOf<T, N>,
    /// `Σ wᵢ alt(xᵢ - y, pᵢ)`.
    pub resultant_torque: TorqueOf<T, N>,
}

/// Weighted total of sliders reduced at `y`, split into intrinsic and
/// resultant torques. `total.q = intrinsic_torque + resultant_torque`.
pub fn screw_total<T: Real, const N: usize>(items: &[(T, Slider<T, N>)], y: &SVector<T, N>) -> ScrewTotal<T, N>
where
    Dim<N>: ScrewDim<T, N>,
{
    let mut p = SVector::<T, N>::zeros();
    let mut intrinsic = TorqueOf::<T, N>::zero();
    let mut resultant = TorqueOf::<T, N>::zero();
    for (w, s) in items {
        p += s.p * *w;
        intrinsic = intrinsic.add(&s.q.scale(*w));
        resultant = resultant.add(&alternant(&(s.base - y), &s.p).scale(*w));
    }
    ScrewTotal {
        total: WrenchReduction { p, q: intrinsic.add(&resultant), point: *y },
        intrinsic_torque: intrinsic,
        resultant_torque: resultant,
    }
}
