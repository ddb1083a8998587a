//! File format, built-in corpus, seeded fuzzer and theorem driver for the
//! `rgw` command line tool.

pub mod corpus;
pub mod document;
pub mod fuzz;
pub mod theorems;
