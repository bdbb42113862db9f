//! Command-line frontend for the `equilens-core` uniformity measures.
//!
//! The core crate does all the mathematics and stays `no_std`; this crate
//! adds the parts that need an operating system: a scoped-thread
//! [`exec::ThreadExecutor`], the sequence mini-language of [`seqlang`],
//! point files ([`pointfile`]), and the `equilens` binary built on
//! [`app`]. Everything the binary does is reachable through [`app::run`],
//! so integration tests can drive the full command surface in-process.

pub mod app;
pub mod exec;
pub mod pointfile;
pub mod seqlang;
