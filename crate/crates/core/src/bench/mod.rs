//! Instance generators, the graph text format, the 3-SAT reduction, and
//! CSV experiment reports.

pub mod format;
pub mod gen;
pub mod report;
pub mod sat;
