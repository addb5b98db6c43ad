//! Counter-based random numbers (Philox4x32-10).
//!
//! Every draw is a pure function of `(seed, counter)`, so a chain can be
//! replayed from any point and results do not depend on how work is spread
//! across threads. Counters are laid out as `[index, sweep, stream, purpose]`.

const MUL0: u32 = 0xD251_1F53;
const MUL1: u32 = 0xCD9E_8D57;
const WEYL0: u32 = 0x9E37_79B9;
const WEYL1: u32 = 0xBB67_AE85;

/// Philox4x32 with 10 rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Philox {
    key: [u32; 2],
}

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let prod = (a as u64) * (b as u64);
    ((prod >> 32) as u32, prod as u32)
}

impl Philox {
    pub const fn new(key: [u32; 2]) -> Self {
        Philox { key }
    }

    pub const fn from_seed(seed: u64) -> Self {
        Philox { key: [seed as u32, (seed >> 32) as u32] }
    }

    #[inline]
    pub fn block(&self, counter: [u32; 4]) -> [u32; 4] {
        let mut ctr = counter;
        let mut key = self.key;
        for round in 0..10 {
            if round > 0 {
                key[0] = key[0].wrapping_add(WEYL0);
                key[1] = key[1].wrapping_add(WEYL1);
            }
            let (hi0, lo0) = mulhilo(MUL0, ctr[0]);
            let (hi1, lo1) = mulhilo(MUL1, ctr[2]);
            ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
        }
        ctr
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&self, counter: [u32; 4]) -> f64 {
        let out = self.block(counter);
        let bits = ((out[0] as u64) << 32 | out[1] as u64) >> 11;
        bits as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// What a draw is used for; occupies the last counter word so that streams
/// for different purposes never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Purpose {
    Bond = 1,
    ClusterSpin = 2,
    ClusterMark = 3,
    Bootstrap = 4,
    Test = 5,
}

/// A keyed family of streams: `(seed)` fixes the key, `(stream, sweep, index)`
/// select the draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamRng {
    philox: Philox,
}

impl StreamRng {
    pub const fn new(seed: u64) -> Self {
        StreamRng { philox: Philox::from_seed(seed) }
    }

    #[inline]
    pub fn uniform(&self, purpose: Purpose, stream: u32, sweep: u32, index: u32) -> f64 {
        self.philox.uniform([index, sweep, stream, purpose as u32])
    }

    /// Uniform keyed by a 64-bit sample id (split over two counter words).
    #[inline]
    pub fn uniform_wide(&self, purpose: Purpose, id: u64, index: u32) -> f64 {
        self.philox.uniform([index, id as u32, (id >> 32) as u32, purpose as u32])
    }
}
