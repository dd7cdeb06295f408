//! Resource caps for enumeration and dynamic programming.
//!
//! Defaults are 10⁷ configurations and 10⁷ DP states, overridable through
//! the environment (`ICEVERTEX_MAX_CONFIGS`, `ICEVERTEX_MAX_STATES`) or by
//! constructing a [`Caps`] explicitly (the CLI exposes flags for both).

use crate::error::{Error, Result};

pub const DEFAULT_MAX_CONFIGS: u64 = 10_000_000;
pub const DEFAULT_MAX_STATES: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of configurations an enumeration may materialize.
    pub max_configs: u64,
    /// Maximum number of simultaneous DP states.
    pub max_states: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_configs: env_cap("ICEVERTEX_MAX_CONFIGS", DEFAULT_MAX_CONFIGS),
            max_states: env_cap("ICEVERTEX_MAX_STATES", DEFAULT_MAX_STATES),
        }
    }
}

impl Caps {
    pub fn unlimited() -> Self {
        Caps { max_configs: u64::MAX, max_states: u64::MAX }
    }

    pub(crate) fn check_configs(&self, n: u64) -> Result<()> {
        if n >= self.max_configs {
            Err(Error::CapExceeded { what: "enumerated configurations", cap: self.max_configs })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_states(&self, n: u64) -> Result<()> {
        if n >= self.max_states {
            Err(Error::CapExceeded { what: "dp states", cap: self.max_states })
        } else {
            Ok(())
        }
    }
}

fn env_cap(var: &str, default: u64) -> u64 {
    match std::env::var(var) {
        Ok(s) => s.parse().unwrap_or(default),
        Err(_) => default,
    }
}
