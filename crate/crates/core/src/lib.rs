//! Exact trace-identity engine for two generic traceless 4×4 matrices.

pub mod genmat;
pub mod glcat;
pub mod nullspace;
pub mod polyring;
pub mod syntax;
pub mod tracelang;
pub mod hwv;
pub mod images;
pub mod cache;
pub mod engine;
pub mod relfinder;
pub mod reproduce;
