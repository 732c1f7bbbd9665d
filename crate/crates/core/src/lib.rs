//! Toolkit for logic programs with partial evaluable functions: a surface
//! parser, a reference model enumerator working directly on the logical
//! semantics, a translation to ordinary function-free programs, a safety
//! checker, and a typed total-function front end.

pub mod ast;
pub mod expand;
pub mod faspc;
pub mod flatten;
pub mod htsem;
pub mod lpcore;
pub mod parser;
pub mod randgen;
pub mod safety;
