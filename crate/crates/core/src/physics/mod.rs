//! Fluxes, numerical fluxes, velocity fields, exact solutions and the
//! benchmark cases.

mod cases;
mod fields;
mod flux;
mod nonlinear;
mod velocity;

pub use cases::{Boundary, Case, CaseName, Ex1Source, Ex3Source, NonlinearCase, SourceTerm, TransportCase};
pub use fields::{ExpSum, FnField, HalfPlaneStep, SpaceTimeField, StepSum};
pub use flux::{godunov, BuiltinFlux, FluxFunction, Godunov, NumericalFlux, SampledFlux};
pub use nonlinear::{
    make_split, make_split_per_component, Ex3Flux, LinearTransportFlux, NonlinearFlux, SampleRegion, SplitFlux,
};
pub use velocity::{
    face_average_velocity, face_average_velocity3, ConstantVelocity, Ex1Velocity, Ex2Velocity, VelocityField2,
    VelocityField3,
};
