use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::fields::{ExpSum, SpaceTimeField, StepSum};
use super::flux::{BuiltinFlux, FluxFunction};
use super::nonlinear::{Ex3Flux, NonlinearFlux, SampleRegion};
use super::velocity::{ConstantVelocity, Ex1Velocity, Ex2Velocity, VelocityField2};
use crate::mesh::{MeshFamily, Rect};
use crate::{Error, Result, Scalar};

/// Source `𝔖(t, x, y, z)`.
pub trait SourceTerm<T: Scalar>: Send + Sync {
    fn eval(&self, t: T, x: T, y: T, z: T) -> T;
}

impl<T: Scalar, F: Fn(T, T, T, T) -> T + Send + Sync> SourceTerm<T> for F {
    fn eval(&self, t: T, x: T, y: T, z: T) -> T {
        self(t, x, y, z)
    }
}

/// Source making `exp(t(x+y))` solve `∂t α + div(u f(α)) = 𝔖` with the
/// Example 1 velocity:
/// `𝔖 = (x+y) α + f'(α) t α (u + v) + f(α) div u`. Independent of `z`.
#[derive(Debug, Clone, Copy)]
pub struct Ex1Source(pub BuiltinFlux);

impl<T: Scalar> SourceTerm<T> for Ex1Source {
    fn eval(&self, t: T, x: T, y: T, _z: T) -> T {
        let a = (t * (x + y)).exp();
        let [u, v] = Ex1Velocity.velocity(t, x, y);
        let div = VelocityField2::<T>::divergence(&Ex1Velocity, t, x, y);
        (x + y) * a + self.0.derivative(a) * t * a * (u + v) + self.0.eval(a) * div
    }
}

/// Source making `exp(t(x+y))` solve `∂t α + div F(t, x, α) = 𝔖_N` with
/// `F = (sin((x-t)α), cos((y-t)α))`. Independent of `z`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ex3Source;

impl<T: Scalar> SourceTerm<T> for Ex3Source {
    fn eval(&self, t: T, x: T, y: T, _z: T) -> T {
        let a = (t * (x + y)).exp();
        let (px, py) = (x - t, y - t);
        (x + y) * a + a * (T::one() + t * px) * (px * a).cos() - a * (T::one() + t * py) * (py * a).sin()
    }
}

/// Boundary treatment a case asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// No flux through `∂Ω` (the velocity vanishes there).
    ZeroFlux,
    /// Ghost states from the exact solution (inflow problems).
    ExactInflow,
    /// Ghost equals the interior state (fully nonlinear scheme).
    Mirror,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::ZeroFlux => "zero-flux",
            Boundary::ExactInflow => "exact-inflow-ghost",
            Boundary::Mirror => "mirror",
        }
    }
}

/// `∂t α + div(u f(α)) = 𝔖` benchmark.
#[derive(Clone)]
pub struct TransportCase<T: Scalar> {
    pub name: CaseName,
    pub domain: Rect<T>,
    pub final_time: T,
    pub flux: BuiltinFlux,
    pub velocity: Arc<dyn VelocityField2<T>>,
    pub initial: Arc<dyn SpaceTimeField<T>>,
    pub exact: Option<Arc<dyn SpaceTimeField<T>>>,
    pub source: Option<Arc<dyn SourceTerm<T>>>,
    pub boundary: Boundary,
}

/// `∂t α + div F(t, x, α) = 𝔖` benchmark.
#[derive(Clone)]
pub struct NonlinearCase<T: Scalar> {
    pub name: CaseName,
    pub domain: Rect<T>,
    pub final_time: T,
    pub flux: Arc<dyn NonlinearFlux<T>>,
    pub region: SampleRegion<T>,
    pub initial: Arc<dyn SpaceTimeField<T>>,
    pub exact: Option<Arc<dyn SpaceTimeField<T>>>,
    pub source: Option<Arc<dyn SourceTerm<T>>>,
    pub boundary: Boundary,
}

#[derive(Clone)]
pub enum Case<T: Scalar> {
    Transport(TransportCase<T>),
    Nonlinear(NonlinearCase<T>),
}

impl<T: Scalar> Case<T> {
    pub fn name(&self) -> CaseName {
        match self {
            Case::Transport(c) => c.name,
            Case::Nonlinear(c) => c.name,
        }
    }

    pub fn domain(&self) -> Rect<T> {
        match self {
            Case::Transport(c) => c.domain,
            Case::Nonlinear(c) => c.domain,
        }
    }

    pub fn final_time(&self) -> T {
        match self {
            Case::Transport(c) => c.final_time,
            Case::Nonlinear(c) => c.final_time,
        }
    }

    pub fn exact(&self) -> Option<&Arc<dyn SpaceTimeField<T>>> {
        match self {
            Case::Transport(c) => c.exact.as_ref(),
            Case::Nonlinear(c) => c.exact.as_ref(),
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self {
            Case::Transport(c) => c.boundary,
            Case::Nonlinear(c) => c.boundary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    Ex1Linear,
    Ex1Sinusoidal,
    Ex2Linear,
    Ex2Sinusoidal,
    Ex3Nonlinear,
    Despres,
}

impl CaseName {
    pub const ALL: [CaseName; 6] = [
        CaseName::Ex1Linear,
        CaseName::Ex1Sinusoidal,
        CaseName::Ex2Linear,
        CaseName::Ex2Sinusoidal,
        CaseName::Ex3Nonlinear,
        CaseName::Despres,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseName::Ex1Linear => "ex1-linear",
            CaseName::Ex1Sinusoidal => "ex1-sinusoidal",
            CaseName::Ex2Linear => "ex2-linear",
            CaseName::Ex2Sinusoidal => "ex2-sinusoidal",
            CaseName::Ex3Nonlinear => "ex3-nonlinear",
            CaseName::Despres => "despres",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CaseName::Ex1Linear => "smooth exp(t(x+y)) with manufactured source, f(s)=s, (-1,1)^2, T=1",
            CaseName::Ex1Sinusoidal => "smooth exp(t(x+y)) with manufactured source, f(s)=sin(2 pi s), (-1,1)^2, T=1",
            CaseName::Ex2Linear => "two Heaviside fronts advected by u=(1,1), f(s)=s, (-3,3)^2, T=2",
            CaseName::Ex2Sinusoidal => "two Heaviside fronts, f(s)=sin(2 pi s), compressible velocity, (-3,3)^2, T=2",
            CaseName::Ex3Nonlinear => "F=(sin((x-t)a), cos((y-t)a)) with manufactured source, (-1,1)^2, T=1",
            CaseName::Despres => "H(x-1/2) advected by u=(1,0) on staggered bricks, (-1,1)^2, T=1/4",
        }
    }

    pub fn default_family(self) -> MeshFamily {
        match self {
            CaseName::Despres => MeshFamily::Staggered,
            _ => MeshFamily::Cartesian,
        }
    }

    /// Mesh families a case can run on.
    pub fn supports(self, family: MeshFamily) -> bool {
        match self {
            CaseName::Despres => family == MeshFamily::Staggered,
            CaseName::Ex3Nonlinear => family == MeshFamily::Cartesian,
            _ => true,
        }
    }

    pub fn build<T: Scalar>(self) -> Case<T> {
        let biunit = Rect::square(-T::one(), T::one());
        let big = Rect::square(T::lit(-3.0), T::lit(3.0));
        let quarter = T::lit(-0.25);
        let ex2_steps = |drift: [T; 2]| {
            Arc::new(StepSum::axis_steps(&[(T::half(), quarter)], &[(T::half(), quarter)], drift))
        };
        let ex1 = |name, flux| {
            Case::Transport(TransportCase {
                name,
                domain: biunit,
                final_time: T::one(),
                flux,
                velocity: Arc::new(Ex1Velocity),
                initial: Arc::new(ExpSum),
                exact: Some(Arc::new(ExpSum)),
                source: Some(Arc::new(Ex1Source(flux))),
                boundary: Boundary::ZeroFlux,
            })
        };
        match self {
            CaseName::Ex1Linear => ex1(self, BuiltinFlux::Linear),
            CaseName::Ex1Sinusoidal => ex1(self, BuiltinFlux::Sinusoidal),
            CaseName::Ex2Linear => {
                let steps = ex2_steps([T::one(), T::one()]);
                Case::Transport(TransportCase {
                    name: self,
                    domain: big,
                    final_time: T::two(),
                    flux: BuiltinFlux::Linear,
                    velocity: Arc::new(ConstantVelocity([T::one(), T::one()])),
                    initial: steps.clone(),
                    exact: Some(steps),
                    source: None,
                    boundary: Boundary::ExactInflow,
                })
            }
            CaseName::Ex2Sinusoidal => Case::Transport(TransportCase {
                name: self,
                domain: big,
                final_time: T::two(),
                flux: BuiltinFlux::Sinusoidal,
                velocity: Arc::new(Ex2Velocity),
                initial: ex2_steps([T::zero(), T::zero()]),
                exact: None,
                source: None,
                boundary: Boundary::ZeroFlux,
            }),
            CaseName::Ex3Nonlinear => Case::Nonlinear(NonlinearCase {
                name: self,
                domain: biunit,
                final_time: T::one(),
                flux: Arc::new(Ex3Flux),
                region: SampleRegion {
                    domain: biunit,
                    t: [T::zero(), T::one()],
                    z: [-T::one(), T::lit(8.0)],
                },
                initial: Arc::new(ExpSum),
                exact: Some(Arc::new(ExpSum)),
                source: Some(Arc::new(Ex3Source)),
                boundary: Boundary::Mirror,
            }),
            CaseName::Despres => {
                let front = Arc::new(StepSum::axis_steps(&[(T::one(), T::half())], &[], [T::one(), T::zero()]));
                Case::Transport(TransportCase {
                    name: self,
                    domain: biunit,
                    final_time: T::lit(0.25),
                    flux: BuiltinFlux::Linear,
                    velocity: Arc::new(ConstantVelocity([T::one(), T::zero()])),
                    initial: front.clone(),
                    exact: Some(front),
                    source: None,
                    boundary: Boundary::ExactInflow,
                })
            }
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        CaseName::ALL
            .into_iter()
            .find(|c| c.name() == s || (s == "després" && *c == CaseName::Despres))
            .ok_or_else(|| Error::Config(format!("unknown case '{s}'")))
    }
}
