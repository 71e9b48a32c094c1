pub mod canvas;
pub mod coloring;
pub mod generator;
pub mod graph;
pub mod io;
pub mod ops;
pub mod local_girth;
pub mod search;
pub mod solver;
