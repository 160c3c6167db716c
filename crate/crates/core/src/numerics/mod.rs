//! Small self-contained numerical kernels used across the engine.

pub mod cubic;
pub mod diff;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod root;

pub use cubic::{solve_cubic, CubicRoots};
pub use diff::{default_step, finite_diff};
pub use linalg::{solve3, sym_eigenvalues, sym_pencil_eigen, SymMatrix3};
pub use ode::{integrate_ode, OdeMethod, OdeSettings, Trajectory};
pub use quad::{quad_entropy, HermiteRule, QuadResult, QuadratureKind, QuadratureRule};
pub use root::{find_root, find_root_expanding};
