pub mod config;
pub mod error;
pub mod io;
pub mod run;
pub mod spec_lang;
pub mod suite;
