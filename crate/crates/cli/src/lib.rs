//! Command line front end for `biocircuit-core`: configuration files,
//! CSV and SVG output, and the named scenario catalog.

pub mod cli;
pub mod config;
pub mod csv;
pub mod experiments;
pub mod svg;
