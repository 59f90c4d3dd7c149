/// Derives an independent stream seed from a base seed and an index.
///
/// Used wherever a batch of seeded tasks (cross-validation folds, corpus
/// images, annealing restarts) must each get their own deterministic
/// generator. SplitMix64 finalizer; cheap and well mixed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e37_79b9_7f4a_7c15_u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
