//! States, spectral operators, eigenpaths and path geometry.

pub mod geometry;
pub mod path;
pub mod spectral;
pub mod state;

pub use geometry::{length_grid, path_length, velocity_profile, LengthOptions, PathGeometry};
pub use path::{grover_gap, grover_path, DiscretePath, EigenPath, HamiltonianPath, PlanarPath, TrackedEigenstate};
pub use spectral::{
    measure_projector, phase_diff, phase_distance, reflection_about, wrap_phase, Projector, SpectralOperator,
};
pub use state::{angular_distance, fidelity, overlap_probability, StateVector};
