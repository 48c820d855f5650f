pub mod baseline;
pub mod error;
pub mod fastprep;
pub mod harness;
pub mod oracle;
pub mod report;
pub mod simcore;
pub mod structsim;

pub use error::{Error, Result};
