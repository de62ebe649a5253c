//! States file loading and rendering.
//!
//! The payload is JSON in one of two shapes: a bare list of `m` state
//! vectors — each a list of `[re, im]` pairs whose length is a power of
//! two — or the versioned wrapper
//! `{"format": "mswap states v1", "q": .., "states": [..]}`.
//! Vectors must be unit norm; the register width `q` is inferred from the
//! vector dimension in the bare form.

use anyhow::{bail, Context, Result};
use mswap_core::InputStates;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

/// Format tag of versioned states files.
pub const STATES_FORMAT: &str = "mswap states v1";

#[derive(Debug, Deserialize)]
struct Wrapper {
    format: String,
    q: usize,
    states: Vec<Vec<[f64; 2]>>,
}

/// Parses a states file.
pub fn parse_states(text: &str) -> Result<InputStates> {
    let value: Value = serde_json::from_str(text).context("states file is not valid JSON")?;
    let (q, raw) = if value.is_array() {
        let raw: Vec<Vec<[f64; 2]>> = serde_json::from_value(value)
            .context("states file must be a list of [re, im] vectors")?;
        let dim = raw.first().map(Vec::len).unwrap_or(0);
        if raw.is_empty() {
            bail!("states file lists no states");
        }
        if !dim.is_power_of_two() {
            bail!("state dimension {dim} is not a power of two");
        }
        (dim.trailing_zeros() as usize, raw)
    } else {
        let wrapper: Wrapper = serde_json::from_value(value)
            .context("states file must be a list of vectors or a versioned wrapper object")?;
        if wrapper.format != STATES_FORMAT {
            bail!(
                "unsupported states format {:?}; this build reads {STATES_FORMAT:?}",
                wrapper.format
            );
        }
        (wrapper.q, wrapper.states)
    };
    let states = raw
        .into_iter()
        .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        .collect();
    Ok(InputStates::new(q, states)?)
}
