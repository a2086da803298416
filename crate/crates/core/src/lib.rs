pub mod basespace;
pub mod chiralbundle;
pub mod classify;
pub mod error;
pub mod invariants;
pub mod io;
pub mod modelzoo;
pub mod numkernel;
pub mod policy;
pub mod spectral;
