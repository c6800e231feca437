//! Command-line front end for the `densgraph` library.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, CliResult};

/// Worker pool sized by `DENSGRAPH_THREADS`; unset or 0 means one thread.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let threads = match std::env::var("DENSGRAPH_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("DENSGRAPH_THREADS={v:?} is not a nonnegative integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}
