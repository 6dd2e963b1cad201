//! Frame placements and the 6×6 wrench/twist transformation group.
//!
//! A [`Placement`] of a moving frame `p` relative to a fixed frame `0` is the
//! rotation `C = C_{0,p}` together with the origin offset `d = d_{0,p}`
//! expressed in frame 0. Its wrench transform
//!
//! ```text
//! L = [[C, 0], [d× C, C]] = C⊕ D^p = D⁰ C⊕
//! ```
//!
//! maps wrench reductions `[p; q]` taken at the origin of `p` in `p`
//! coordinates to reductions at the origin of `0` in `0` coordinates.
//!
//! Vectors carried by placements and frame velocities are tagged with the
//! frame they are expressed in ([`Base`] or [`Moving`]); converting between
//! tags requires the rotation, so frame mix-ups do not type-check.

use std::marker::PhantomData;

use nalgebra::{Matrix3, Matrix6, Vector3};

use crate::linalg::{max_abs, orthogonality_residual, orthonormalize, determinant};
use crate::ode::{rk4_step, NonFiniteDerivative};
use crate::real::Real;
use crate::screw::{dual_vector, skew, SkewTensor3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("not a rotation: ‖CᵀC − I‖ = {orthogonality:e}, det C = {det}")]
    NotRotation { orthogonality: f64, det: f64 },
    #[error("CᵀĊ is not skew-symmetric (residual {residual:e})")]
    InconsistentRate { residual: f64 },
    #[error(transparent)]
    NonFinite(#[from] NonFiniteDerivative),
}

/// Tolerance on `CᵀC = I` and `det C = 1` for accepting a rotation.
pub const ROTATION_TOL: f64 = 1e-10;
/// Tolerance on the symmetric part of `CᵀĊ` in [`angular_velocity`].
pub const RATE_SKEW_TOL: f64 = 1e-8;

/// Proper orthogonal 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation<T: Real>(Matrix3<T>);

impl<T: Real> Rotation<T> {
    pub fn new(m: Matrix3<T>) -> Result<Self, FrameError> {
        let orth = orthogonality_residual(&m);
        let det = determinant(&m);
        let tol = T::lit(ROTATION_TOL);
        if !(orth <= tol) || !((det - T::one()).abs() <= tol) {
            return Err(FrameError::NotRotation {
                orthogonality: orth.to_f64().unwrap_or(f64::NAN),
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Rodrigues formula for a rotation by `angle` about the unit direction of `axis`.
    pub fn about_axis(axis: &Vector3<T>, angle: T) -> Self {
        let n = crate::linalg::norm(axis);
        if n == T::zero() {
            return Self::identity();
        }
        let k = skew(&(axis / n));
        let (s, c) = angle.sin_cos();
        Self(Matrix3::identity() + k * s + k * k * (T::one() - c))
    }

    /// Nearest rotation to a nearly orthogonal matrix.
    pub fn projected(m: &Matrix3<T>) -> Self {
        Self(orthonormalize(m))
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn then(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }
}

/// Coordinates expressed in the fixed frame 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Base;
/// Coordinates expressed in the moving frame p.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moving;

/// A 3-vector tagged with the frame its coordinates refer to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameVec<T: Real, F> {
    coords: Vector3<T>,
    _frame: PhantomData<F>,
}

impl<T: Real, F> FrameVec<T, F> {
    pub fn new(coords: Vector3<T>) -> Self {
        Self { coords, _frame: PhantomData }
    }

    pub fn coords(&self) -> &Vector3<T> {
        &self.coords
    }
}

impl<T: Real> FrameVec<T, Moving> {
    pub fn to_base(&self, c: &Rotation<T>) -> FrameVec<T, Base> {
        FrameVec::new(c.matrix() * self.coords)
    }
}

impl<T: Real> FrameVec<T, Base> {
    pub fn to_moving(&self, c: &Rotation<T>) -> FrameVec<T, Moving> {
        FrameVec::new(c.matrix().transpose() * self.coords)
    }
}

/// Placement of frame p in frame 0: rotation `C_{0,p}` and offset `d_{0,p}` (frame-0 coordinates).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement<T: Real> {
    pub rotation: Rotation<T>,
    pub translation: FrameVec<T, Base>,
}

impl<T: Real> Placement<T> {
    pub fn new(rotation: Rotation<T>, translation: Vector3<T>) -> Self {
        Self { rotation, translation: FrameVec::new(translation) }
    }

    pub fn identity() -> Self {
        Self::new(Rotation::identity(), Vector3::zeros())
    }

    pub fn c(&self) -> &Matrix3<T> {
        self.rotation.matrix()
    }

    pub fn d(&self) -> &Vector3<T> {
        self.translation.coords()
    }

    /// Offset `d_{0,p}` in frame-p coordinates.
    pub fn d_moving(&self) -> FrameVec<T, Moving> {
        self.translation.to_moving(&self.rotation)
    }

    /// Placement of frame 0 relative to frame p.
    pub fn invert(&self) -> Self {
        let ct = self.rotation.inverse();
        Self::new(ct, -(ct.matrix() * self.d()))
    }

    /// Maps a point given in p coordinates to 0 coordinates.
    pub fn apply_point(&self, x_p: &Vector3<T>) -> Vector3<T> {
        self.d() + self.c() * x_p
    }
}

/// `self` places p in 0, `next` places k in p; the result places k in 0.
pub fn compose<T: Real>(a: &Placement<T>, b: &Placement<T>) -> Placement<T> {
    Placement::new(a.rotation.then(&b.rotation), a.d() + a.c() * b.d())
}

pub fn invert<T: Real>(a: &Placement<T>) -> Placement<T> {
    a.invert()
}

fn block6<T: Real>(a: &Matrix3<T>, b: &Matrix3<T>, c: &Matrix3<T>, d: &Matrix3<T>) -> Matrix6<T> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(c);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(d);
    m
}

/// Block swap `Π = [[0, I], [I, 0]]`.
pub fn block_swap<T: Real>() -> Matrix6<T> {
    let z = Matrix3::zeros();
    let i = Matrix3::identity();
    block6(&z, &i, &i, &z)
}

/// `C⊕ = blockdiag(C, C)`.
pub fn c_oplus<T: Real>(c: &Matrix3<T>) -> Matrix6<T> {
    block6(c, &Matrix3::zeros(), &Matrix3::zeros(), c)
}

/// `D = [[I, 0], [d×, I]]` for an offset in whichever frame `d` is given.
pub fn d_shift<T: Real>(d: &Vector3<T>) -> Matrix6<T> {
    let i = Matrix3::identity();
    block6(&i, &Matrix3::zeros(), &skew(d), &i)
}

/// The two factorizations `(C⊕ D^p, D⁰ C⊕)` of the wrench transform.
pub fn factorizations<T: Real>(p: &Placement<T>) -> (Matrix6<T>, Matrix6<T>) {
    let c = c_oplus(p.c());
    let dp = d_shift(p.d_moving().coords());
    let d0 = d_shift(p.d());
    (c * dp, d0 * c)
}

/// Wrench transformation matrix of a placement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrenchTransform<T: Real> {
    pub matrix: Matrix6<T>,
    pub placement: Placement<T>,
}

impl<T: Real> WrenchTransform<T> {
    /// Applies `L` to a stacked wrench reduction `[p; q]`.
    pub fn apply(&self, wrench: &nalgebra::Vector6<T>) -> nalgebra::Vector6<T> {
        self.matrix * wrench
    }
}

pub fn wrench_transform<T: Real>(p: &Placement<T>) -> WrenchTransform<T> {
    let (via_moving, _) = factorizations(p);
    WrenchTransform { matrix: via_moving, placement: *p }
}

/// `L^tw = Π L^wr Π`; maps stacked twist reductions `[q; p]` from p to 0.
pub fn twist_transform<T: Real>(p: &Placement<T>) -> Matrix6<T> {
    let pi = block_swap::<T>();
    pi * wrench_transform(p).matrix * pi
}

/// Velocity of frame p relative to frame 0: `v = ḋ_{0,p}` and `ω_{0,p}`, in p coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameVelocity<T: Real> {
    pub linear: FrameVec<T, Moving>,
    pub angular: FrameVec<T, Moving>,
}

impl<T: Real> FrameVelocity<T> {
    pub fn in_moving(linear: Vector3<T>, angular: Vector3<T>) -> Self {
        Self { linear: FrameVec::new(linear), angular: FrameVec::new(angular) }
    }

    pub fn in_base(linear: FrameVec<T, Base>, angular: FrameVec<T, Base>, c: &Rotation<T>) -> Self {
        Self { linear: linear.to_moving(c), angular: angular.to_moving(c) }
    }

    pub fn zero() -> Self {
        Self::in_moving(Vector3::zeros(), Vector3::zeros())
    }
}

/// Differential generators of a placement trajectory:
/// `L̇ = L Φ = Ψ L` for wrenches and `L̇^tw = L^tw Φ^tw = Ψ^tw L^tw` for twists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Generators<T: Real> {
    pub phi_wr: Matrix6<T>,
    pub psi_wr: Matrix6<T>,
    pub phi_tw: Matrix6<T>,
    pub psi_tw: Matrix6<T>,
}

/// `[[ω×, 0], [v×, ω×]]`.
pub fn wrench_generator<T: Real>(v: &Vector3<T>, w: &Vector3<T>) -> Matrix6<T> {
    let wx = skew(w);
    block6(&wx, &Matrix3::zeros(), &skew(v), &wx)
}

/// Generators at the current placement and frame velocity.
///
/// `Φ^wr` uses the frame-p components of `v` and `ω`. In `Ψ^wr` the linear
/// block is the frame-0 velocity of the frame-p point momentarily at the
/// origin of 0, `ḋ − ω × d`; with `ḋ` alone `Ψ L` differs from `L̇` whenever
/// `ω × d ≠ 0`. Twist generators are `−(·)ᵀ` of the wrench ones.
pub fn generators<T: Real>(placement: &Placement<T>, vel: &FrameVelocity<T>) -> Generators<T> {
    let rot = &placement.rotation;
    let phi_wr = wrench_generator(vel.linear.coords(), vel.angular.coords());
    let w0 = vel.angular.to_base(rot);
    let v0 = vel.linear.to_base(rot);
    let origin_velocity = v0.coords() - w0.coords().cross(placement.d());
    let psi_wr = wrench_generator(&origin_velocity, w0.coords());
    Generators { phi_wr, psi_wr, phi_tw: -phi_wr.transpose(), psi_tw: -psi_wr.transpose() }
}

/// Angular velocity in frame-p coordinates from `C` and `Ċ` (`ω× = CᵀĊ`).
pub fn angular_velocity<T: Real>(c: &Rotation<T>, c_dot: &Matrix3<T>) -> Result<Vector3<T>, FrameError> {
    let w = c.matrix().transpose() * c_dot;
    let residual = max_abs(&(w + w.transpose()));
    if residual > T::lit(RATE_SKEW_TOL) * T::one().max(max_abs(&w)) {
        return Err(FrameError::InconsistentRate { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    let skew_part = (w - w.transpose()) * T::half();
    let s = SkewTensor3::try_from_matrix(&skew_part, T::zero()).expect("antisymmetrized");
    Ok(dual_vector(&s))
}

/// `Ċ = C ω×` for a frame-p angular velocity.
pub fn poisson_rate<T: Real>(c: &Matrix3<T>, w_p: &Vector3<T>) -> Matrix3<T> {
    c * skew(w_p)
}

/// One RK4 step of the Poisson relation followed by projection onto the rotations.
pub fn poisson_step<T: Real>(
    c: &Rotation<T>,
    w_p: impl Fn(T) -> Vector3<T>,
    t: T,
    h: T,
) -> Result<Rotation<T>, FrameError> {
    let next = rk4_step(|tt, m: &Matrix3<T>| poisson_rate(m, &w_p(tt)), c.matrix(), t, h)?;
    Ok(Rotation::projected(&next))
}

/// Integrates `Ċ = C ω×(t)` from `t = 0`; returns `steps + 1` rotations including `c0`.
pub fn integrate_rotation<T: Real>(
    c0: &Rotation<T>,
    w_p: impl Fn(T) -> Vector3<T>,
    h: T,
    steps: usize,
) -> Result<Vec<Rotation<T>>, FrameError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(*c0);
    let mut c = *c0;
    for i in 0..steps {
        c = poisson_step(&c, &w_p, T::count(i) * h, h)?;
        out.push(c);
    }
    Ok(out)
}

/// Placement of a uniformly translating frame with constant orientation at time `t`.
pub fn galilean_boost<T: Real>(d0: &Vector3<T>, v0: &Vector3<T>, c: &Rotation<T>, t: T) -> Placement<T> {
    Placement::new(*c, d0 + v0 * t)
}

/// Velocity of a boosted frame, as used by [`generators`].
pub fn galilean_boost_velocity<T: Real>(v0: &Vector3<T>, c: &Rotation<T>) -> FrameVelocity<T> {
    FrameVelocity::in_base(FrameVec::new(*v0), FrameVec::new(Vector3::zeros()), c)
}
