use thiserror::Error;

use crate::classify::ProfileError;
use crate::coverage::CoverageError;
use crate::history::HistoryError;
use crate::ingest::IngestError;
use crate::metrics::MetricsError;
use crate::phases::PhaseError;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
