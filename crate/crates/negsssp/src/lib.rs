//! File formats, generators, differential testing and benchmarking around
//! [`negsssp_core`].

pub mod bench;
pub mod diff;
pub mod gen;
pub mod io;
pub mod output;
