use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Independent, reproducible random stream for `(seed, tag, index)`.
pub(crate) fn stream(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(fnv1a(tag) ^ splitmix64(index)));
    ChaCha8Rng::seed_from_u64(mixed)
}
