pub mod cli;
pub mod diagram;
pub mod error;
pub mod field;
pub mod fragments;
pub mod harness;
pub mod models;
pub mod rewrite;
pub mod scalars;
pub mod semantics;
pub mod sexpr;
pub mod transfer;
