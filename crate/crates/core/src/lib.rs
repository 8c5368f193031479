//! Headless, deterministic runtime for a Scratch-like block language, with
//! tests written as blocks.
//!
//! Projects are JSON documents ([`io`]) of sprites and scripts ([`ast`]).
//! A [`vm::Scheduler`] runs them frame by frame on a virtual clock. Test
//! scripts ([`testing`]) run on the same scheduler next to the program and
//! can snapshot and restore the whole world. [`batch`] applies one suite to
//! many projects and renders the result matrix.

pub mod ast;
pub mod batch;
pub mod catalog;
pub mod cli;
pub mod io;
pub mod testing;
pub mod validate;
pub mod value;
pub mod vm;

pub use ast::{Block, Input, Project, Script, Sprite};
pub use testing::{CancelToken, SuiteResult, TestResult, TestStatus};
pub use value::Value;
pub use vm::{Event, Program, Scheduler};
