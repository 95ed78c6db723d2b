pub mod convert;
pub mod dataset;
pub mod depth;
pub mod edges;
pub mod eval;
pub mod fog;
