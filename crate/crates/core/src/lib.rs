pub mod cli;
pub mod frames;
pub mod graphs;
pub mod hilbert;
pub mod io;
pub mod matcore;
pub mod qprcore;
pub mod random;
pub mod verify;
