//! Screw algebra, Galilean frames and continuum mechanics of Cosserat-type
//! systems: sliders and their reductions, placements and their generators,
//! mass and inertia measures, isotropic constitutive maps, motion equations
//! and residual checks of the balance laws.
//!
//! Everything is generic over the scalar through [`real::Real`] (`f32` or
//! `f64`); the aliases below fix `f64`.

pub mod constitutive;
pub mod continuum;
pub mod dynamics;
pub mod frames;
pub mod linalg;
pub mod measures;
pub mod ode;
pub mod real;
pub mod screw;

pub use real::Real;

pub type Slider3 = screw::Slider<f64, 3>;
pub type Slider2 = screw::Slider<f64, 2>;
pub type Slider4 = screw::Slider<f64, 4>;
pub type Wrench3 = screw::WrenchReduction<f64, 3>;
pub type Twist3 = screw::TwistReduction<f64, 3>;
pub type Rotation = frames::Rotation<f64>;
pub type Placement = frames::Placement<f64>;
pub type MassDistribution = measures::MassDistribution<f64>;
pub type IsoMap3 = constitutive::IsoMap3<f64>;
pub type IsoMapSym3 = constitutive::IsoMapSym3<f64>;
pub type IsoMap2 = constitutive::IsoMap2<f64>;
pub type IsoMapSym2 = constitutive::IsoMapSym2<f64>;
pub type RigidBodyModel = dynamics::RigidBodyModel<f64>;
pub type RigidBodyState = dynamics::RigidBodyState<f64>;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    NotSkew(#[from] screw::NotSkew),
    #[error(transparent)]
    Frame(#[from] frames::FrameError),
    #[error(transparent)]
    Measure(#[from] measures::MeasureError),
    #[error(transparent)]
    Constitutive(#[from] constitutive::ConstitutiveError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Continuum(#[from] continuum::ContinuumError),
    #[error(transparent)]
    NonFinite(#[from] ode::NonFiniteDerivative),
}

impl Error {
    /// Whether the error signals a numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        use dynamics::DynamicsError as D;
        match self {
            Error::NonFinite(_) => true,
            Error::Constitutive(constitutive::ConstitutiveError::Singular { .. }) => true,
            Error::Constitutive(constitutive::ConstitutiveError::NonFinite(_)) => true,
            Error::Dynamics(d) => !matches!(d, D::InvalidInput(_) | D::AsymmetricInertia { .. }),
            Error::Measure(measures::MeasureError::Singularity { .. }) => true,
            Error::Frame(frames::FrameError::NonFinite(_)) => true,
            _ => false,
        }
    }
}
