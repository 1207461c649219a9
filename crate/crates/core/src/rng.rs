//! Deterministic pseudo-random numbers.
//!
//! Everything downstream (dataset generation, parameter init, batch order)
//! must reproduce bit-for-bit from a recorded seed, so the generator is
//! pinned here rather than borrowed from an external crate: xoshiro256++
//! state, seeded through SplitMix64 from an arbitrary list of 64-bit parts.

/// Splittable deterministic RNG (xoshiro256++).
#[derive(Debug, Clone)]
pub struct Prng {
    s: [u64; 4],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Prng {
    /// Seed from a list of parts, e.g. `(seed, split, episode_index)`.
    /// Distinct part lists yield independent streams.
    pub fn seed_from(parts: &[u64]) -> Prng {
        let mut acc = 0x243f_6a88_85a3_08d3u64; // arbitrary nonzero base
        for &p in parts {
            acc ^= splitmix64(&mut { p.wrapping_add(acc) });
            acc = acc.rotate_left(17).wrapping_add(p);
        }
        let mut sm = acc;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut sm);
        }
        // xoshiro must not start at the all-zero state
        if s == [0, 0, 0, 0] {
            s[0] = 1;
        }
        Prng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of randomness.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, n)`. Uses the fixed-point multiply mapping; the bias is
    /// far below anything observable for the small ranges used here.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Bernoulli draw.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Pick one element of a slice.
    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Derive an independent child stream.
    pub fn fork(&mut self) -> Prng {
        Prng::seed_from(&[self.next_u64(), self.next_u64()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_same_seed() {
        let mut a = Prng::seed_from(&[7, 1, 2]);
        let mut b = Prng::seed_from(&[7, 1, 2]);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_streams_for_distinct_parts() {
        let mut a = Prng::seed_from(&[7, 1, 2]);
        let mut b = Prng::seed_from(&[7, 1, 3]);
        let same = (0..16).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 2);
    }

    #[test]
    fn int_in_covers_range() {
        let mut rng = Prng::seed_from(&[42]);
        let mut seen = [false; 9];
        for _ in 0..500 {
            let v = rng.int_in(-4, 4);
            assert!((-4..=4).contains(&v));
            seen[(v + 4) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut rng = Prng::seed_from(&[3]);
        for _ in 0..1000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
