//! Orchestration of greenlab experiments: configuration, run pipelines, CSV
//! output and the verification suite.

pub mod config;
pub mod csv;
pub mod runs;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Failure {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Numeric(#[from] greenlab_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Check(String),
}

impl Failure {
    /// 2 for configuration errors, 1 for everything numeric.
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Worker threads: `GREENLAB_THREADS` when set, else rayon's default.
pub fn thread_count() -> Option<usize> {
    std::env::var("GREENLAB_THREADS").ok()?.parse().ok().filter(|&n: &usize| n > 0)
}

pub fn pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}
