pub mod affine_complex;
pub mod chern;
pub mod cover;
pub mod error;
pub mod examples;
pub mod gluing;
pub mod graphs;
pub mod laurent;
pub mod lattice;
pub mod linalg;
pub mod local_model;
pub mod pipeline;
pub mod schema;
pub mod snf;
pub mod svg;
