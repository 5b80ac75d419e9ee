pub mod cli_reports;
pub mod cylinders;
pub mod egalitarian;
pub mod finite_lab;
pub mod index_algebra;
pub mod pairing;
pub mod property_engine;
pub mod theorem_lab;
