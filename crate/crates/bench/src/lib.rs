//! Shared inputs for the criterion benchmarks.

use rotnum_core::fixtures::Fixture;
use rotnum_core::RandomSystem;

/// Builds a named fixture, panicking on failure; benches have no error path.
pub fn fixture(name: &str, seed: u64) -> RandomSystem {
    Fixture::by_name(name).and_then(|f| f.build(seed)).expect("fixture builds")
}
