//! Front end for `charsum-core`: single-case commands and verification campaigns.

pub mod campaign;
pub mod config;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod row;
pub mod single;

pub use campaign::{run_campaign, run_to_output, Summary};
pub use config::{CampaignConfig, Family};
pub use error::{CliError, CliResult};
pub use row::CaseRow;
pub use single::{run_case, CaseSpec};
