//! Seeded k-wise independent hashing over the Mersenne prime 2^61 - 1.
//!
//! Bucket hashes are pairwise independent (degree-1 polynomials), sign hashes
//! are 4-wise independent (degree-3 polynomials). Coefficients derive from a
//! SplitMix chain on the 64-bit seed, so constructing a hash is a handful of
//! multiplies (sketches are built per retained timestamp, on every update).

pub const MERSENNE_P: u64 = (1 << 61) - 1;

/// (a * b) mod 2^61-1 without u128 division.
#[inline(always)]
fn mul_mod(a: u64, b: u64) -> u64 {
    let z = (a as u128) * (b as u128);
    let lo = (z & MERSENNE_P as u128) as u64;
    let hi = (z >> 61) as u64;
    let mut s = lo + hi;
    if s >= MERSENNE_P {
        s -= MERSENNE_P;
    }
    s
}

#[inline(always)]
fn add_mod(a: u64, b: u64) -> u64 {
    let mut s = a + b;
    if s >= MERSENNE_P {
        s -= MERSENNE_P;
    }
    s
}

fn draw_coeff(seed: u64, index: u64) -> u64 {
    let c = mix64(seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15))) & MERSENNE_P;
    if c >= MERSENNE_P {
        0
    } else {
        c
    }
}

/// Degree-1 polynomial: pairwise independent.
#[derive(Clone, Debug)]
pub struct PairwiseHash {
    a: u64,
    b: u64,
}

impl PairwiseHash {
    pub fn from_seed(seed: u64) -> Self {
        let a = draw_coeff(seed, 1);
        let b = draw_coeff(seed, 2);
        PairwiseHash { a: a.max(1), b }
    }

    #[inline(always)]
    pub fn eval(&self, x: u64) -> u64 {
        add_mod(mul_mod(self.a, x & MERSENNE_P), self.b)
    }

    /// Bucket in [0, width); width must be a power of two.
    #[inline(always)]
    pub fn bucket(&self, x: u64, width_mask: u64) -> usize {
        (self.eval(x) & width_mask) as usize
    }
}

/// Degree-3 polynomial: 4-wise independent. Low bit gives a +-1 sign.
#[derive(Clone, Debug)]
pub struct FourwiseHash {
    c: [u64; 4],
}

impl FourwiseHash {
    pub fn from_seed(seed: u64) -> Self {
        let mut c = [0u64; 4];
        for (i, slot) in c.iter_mut().enumerate() {
            *slot = draw_coeff(seed, i as u64 + 1);
        }
        c[3] = c[3].max(1);
        FourwiseHash { c }
    }

    #[inline(always)]
    pub fn eval(&self, x: u64) -> u64 {
        let x = x & MERSENNE_P;
        let mut h = self.c[3];
        h = add_mod(mul_mod(h, x), self.c[2]);
        h = add_mod(mul_mod(h, x), self.c[1]);
        add_mod(mul_mod(h, x), self.c[0])
    }

    #[inline(always)]
    pub fn sign(&self, x: u64) -> i64 {
        if self.eval(x) & 1 == 1 {
            1
        } else {
            -1
        }
    }
}

/// SplitMix64 finalizer; used to derive per-component seeds from a master
/// seed and to make cheap stable coordinate-sampling decisions.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic seed schedule: seed for component `tag` instance `index`.
#[inline]
pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    mix64(master ^ mix64(tag.wrapping_mul(0xd6e8_feb8_6659_fd93) ^ index))
}
