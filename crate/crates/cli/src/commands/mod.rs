//! One module per subcommand.

pub mod build;
pub mod estimate;
pub mod labels;
pub mod search;
pub mod simulate;
pub mod verify;
