//! General numerical building blocks shared by the solvers.

pub mod interp;
pub mod ode;
pub mod polyfit;
pub mod quad;
pub mod roots;
