//! Library side of the `a1mod` command-line tool.

pub mod app;
pub mod chart;
pub mod modfile;
pub mod record;

pub use app::{run, Cli, CliError};
pub use modfile::{parse_module, serialize, ParseError};
pub use record::ResultRecord;
