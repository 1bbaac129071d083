pub mod corpus;
pub mod dsl;
pub mod fuzz;
pub mod report;
