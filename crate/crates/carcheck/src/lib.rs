//! Check suites and report assembly for the chiral CAR workbench.
//!
//! The library runs four suites of numerical identity checks against the
//! `chiral-car` crate — the mode-relabeling isomorphism, the embedded
//! symmetry algebras, the interval modular structure, and the twisted
//! sector — and assembles the outcomes into a deterministic report. The
//! binary in this crate is a thin argument-parsing shell around
//! [`suites::run_suite`].

pub mod config;
pub mod report;
pub mod suites;
