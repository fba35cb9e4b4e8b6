pub mod jarzynski;
pub mod kl_fisher;
pub mod phase;
pub mod piston;
pub mod report;

use std::path::PathBuf;

use infobound::PhysicalContext;

use crate::config::Config;
use crate::error::CliError;

/// Everything a command needs: the merged configuration, the output
/// directory and the worker pool.
pub struct RunContext {
    pub config: Config,
    pub out: PathBuf,
    pub pool: rayon::ThreadPool,
}

impl RunContext {
    pub fn physics(&self) -> Result<PhysicalContext, CliError> {
        let kb = self.config.f64_or("physics.kb", 1.0)?;
        let temperature = self.config.f64_or("physics.temperature", 1.0)?;
        Ok(PhysicalContext::new(kb, temperature)?)
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.config.seed()
    }

    /// Maps `f` over `0..n` on the pool; results come back in index order.
    pub fn ordered_map<T, F>(&self, n: usize, f: F) -> Result<Vec<T>, CliError>
    where
        T: Send,
        F: Fn(usize) -> Result<T, CliError> + Sync + Send,
    {
        use rayon::prelude::*;
        self.pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(&f)
                .collect::<Result<Vec<T>, CliError>>()
        })
    }
}
