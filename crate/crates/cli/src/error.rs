use std::io;

use banscope_core::epidemic::EpidemicError;
use banscope_core::features::FeatureError;
use banscope_core::h0::H0Error;
use banscope_core::ingest::IngestError;
use banscope_core::likelihood::LikelihoodError;
use banscope_core::graph::StatsError;
use banscope_osn::ScenarioError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Transport(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Io(_) => 2,
            CliError::Transport(_) => 3,
        }
    }
}

macro_rules! data_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}

data_error!(IngestError, H0Error, EpidemicError, LikelihoodError, FeatureError, ScenarioError, StatsError, csv::Error, serde_json::Error);

pub type Result<T> = std::result::Result<T, CliError>;
