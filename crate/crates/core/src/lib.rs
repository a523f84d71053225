pub mod error;
pub mod exactnum;
pub mod matrix;
pub mod inversive;
pub mod coxeter;
pub mod structure;
pub mod arithmetic;
pub mod orbit;
pub mod geometrize;
pub mod localglobal;
pub mod render;
pub mod fixtures;
pub mod cli;
