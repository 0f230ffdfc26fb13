pub mod chc;
pub mod frontend;
pub mod automaton;
pub mod interp;
pub mod search;
pub mod asp;
pub mod driver;
