pub mod bisim;
pub mod cli;
pub mod corpus;
pub mod fo;
pub mod formula;
pub mod model;
pub mod relational;
pub mod samples;
pub mod transform;
