pub mod bits;
pub mod cli;
pub mod error;
pub mod evolving;
pub mod flawed;
pub mod format;
pub mod generations;
pub mod gf_base;
pub mod gf_ext;
mod poly;
pub mod secrecy_lab;
pub mod static3;

pub use error::{Error, Result};
