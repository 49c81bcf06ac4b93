pub mod algebra;
pub mod cli;
pub mod experiments;
pub mod invariants;
pub mod matgroup;
