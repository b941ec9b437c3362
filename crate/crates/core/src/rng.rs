//! Labeled random substreams derived from one root seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Stream for SBG's speculate-or-not coin.
pub const SBG_DECISIONS: &str = "sbg/decisions";
/// Stream for SBG's candidate-language draw.
pub const SBG_CHOICES: &str = "sbg/choices";
/// Stream from which probe seeds are drawn.
pub const PROBE_SEEDS: &str = "adversary/probe-seeds";

/// Independent generator for `label` under `seed`.
///
/// Streams with different labels share no state, so adding a consumer never
/// perturbs the draws of another.
pub fn substream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

/// 64-bit child seed for `label`, used to seed nested components.
pub fn child_seed(seed: u64, label: &str) -> u64 {
    use rand::Rng;
    substream(seed, label).random()
}
