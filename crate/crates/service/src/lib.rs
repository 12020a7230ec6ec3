//! HTTP query API over a built corpus store.
//!
//! The store is loaded once at startup and turned into an in-memory series
//! index; requests never touch raw articles and never mutate anything.
//!
//! Endpoints (all `GET`, JSON, dates as `YYYY-MM-DD`, undefined values `null`):
//!
//! - `/api/persons?range=FROM..TO&limit=&q=`
//! - `/api/timeseries?person=&from=&to=`
//! - `/api/correlation?a=&b=&n=&from=&to=&method=`
//! - `/api/matrix?persons=a,b,c&end=&n=&method=`
//! - `/api/mds?persons=a,b,c&end=&n=`
//!
//! Errors are `{"error": code, "message": text}` with a matching status.

mod api;
mod server;

use std::path::Path;

use serde::Deserialize;

pub use api::{ApiError, ApiResponse, ApiState, DEFAULT_PERSON_LIMIT};
pub use server::{router, serve, CorsConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid limits file: {0}")]
    Parse(String),
    #[error("invalid limits: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryLimits {
    pub max_persons_per_matrix: usize,
    pub max_range_days: usize,
    /// Allowed CORS origins; `"*"` allows any.
    pub cors_origins: Vec<String>,
}

impl Default for QueryLimits {
    fn default() -> Self {
        Self {
            max_persons_per_matrix: 50,
            max_range_days: 5000,
            cors_origins: vec!["*".to_string()],
        }
    }
}

impl QueryLimits {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let limits: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        limits.validate()?;
        Ok(limits)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_persons_per_matrix < 1 {
            return Err(ConfigError::Invalid("max_persons_per_matrix must be >= 1"));
        }
        if self.max_range_days < 1 {
            return Err(ConfigError::Invalid("max_range_days must be >= 1"));
        }
        Ok(())
    }
}
