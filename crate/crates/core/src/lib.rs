pub mod enumeration;
pub mod family;
pub mod graph;
pub mod solver;
