pub mod action;
pub mod bundle;
pub mod calculus;
pub mod checks;
pub mod error;
pub mod liebialg;
pub mod poisson;
pub mod report;
pub mod spec;
pub mod spinconn;
pub mod symkernel;

pub use error::{Error, Result};
pub use spec::{datasets, Geometry};
pub use checks::{run_checks, CheckOptions, Sampler, Selection};
pub use report::{Format, Report, Status};
