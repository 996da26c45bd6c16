//! JSON envelopes and the configuration hash.

use gasbound_core::PairPotential;
use num_complex::Complex64;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "gasbound";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Result fields next to the tool identity and the hash of the inputs.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: &'a str,
    #[serde(flatten)]
    pub body: T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(config_hash: &'a str, body: T) -> Self {
        Self { tool: TOOL, version: VERSION, config_hash, body }
    }
}

/// SHA-256 over the command name, its parameters and the parsed potential.
///
/// The potential enters through its parsed form, so comments, formatting
/// and file location do not change the hash while tabulated values do.
/// Output path and thread count are not part of the configuration.
pub fn config_hash<A: Serialize>(command: &str, args: &A, potential: &PairPotential) -> String {
    #[derive(Serialize)]
    struct Canonical<'a, A> {
        command: &'a str,
        args: &'a A,
        potential: &'a PairPotential,
    }
    let bytes = serde_json::to_vec(&Canonical { command, args, potential }).expect("configuration serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub(crate) fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("results serialize");
    s.push('\n');
    s
}
