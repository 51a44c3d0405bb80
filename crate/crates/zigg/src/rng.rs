//! Uniform bit sources and the full-precision uniform float generator.

use rand_mt::{Mt, Mt64};

use crate::scalar::{scale_down, Real};
use crate::Error;

/// A generator of independent uniform `BITS`-bit words, returned in the low bits.
pub trait BitSource {
    const BITS: u32;
    fn next_bits(&mut self) -> u64;
}

impl BitSource for Mt64 {
    const BITS: u32 = 64;
    #[inline]
    fn next_bits(&mut self) -> u64 {
        self.next_u64()
    }
}

impl BitSource for Mt {
    const BITS: u32 = 32;
    #[inline]
    fn next_bits(&mut self) -> u64 {
        self.next_u32() as u64
    }
}

impl<S: BitSource + ?Sized> BitSource for &mut S {
    const BITS: u32 = S::BITS;
    #[inline]
    fn next_bits(&mut self) -> u64 {
        (**self).next_bits()
    }
}

/// MT19937-64 seeded with the reference `init_genrand64` routine.
pub fn seeded(seed: u64) -> Mt64 {
    Mt64::new(seed)
}

/// Independent stream number `index` under a master seed, via `init_by_array64([seed, index])`.
pub fn stream(seed: u64, index: u64) -> Mt64 {
    Mt64::new_with_key([seed, index])
}

/// Replays a fixed list of words, then panics. For bit-exact tests.
#[derive(Clone, Debug)]
pub struct ReplaySource<const B: u32> {
    words: Vec<u64>,
    pos: usize,
}

impl<const B: u32> ReplaySource<B> {
    pub fn new(words: Vec<u64>) -> Self {
        ReplaySource { words, pos: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }
}

impl<const B: u32> BitSource for ReplaySource<B> {
    const BITS: u32 = B;
    fn next_bits(&mut self) -> u64 {
        let w = *self.words.get(self.pos).expect("replay source exhausted");
        self.pos += 1;
        w
    }
}

/// Counts the words pulled from an inner source.
#[derive(Debug)]
pub struct CountingSource<S> {
    pub inner: S,
    pub words: u64,
}

impl<S> CountingSource<S> {
    pub fn new(inner: S) -> Self {
        CountingSource { inner, words: 0 }
    }
}

impl<S: BitSource> BitSource for CountingSource<S> {
    const BITS: u32 = S::BITS;
    #[inline]
    fn next_bits(&mut self) -> u64 {
        self.words += 1;
        self.inner.next_bits()
    }
}

/// Trailing zero count by shifting; the reference path.
pub fn trailing_zeros_portable(mut r: u64) -> u32 {
    if r == 0 {
        return 64;
    }
    let mut n = 0;
    while r & 1 == 0 {
        r >>= 1;
        n += 1;
    }
    n
}

#[inline]
pub fn trailing_zeros(r: u64) -> u32 {
    #[cfg(feature = "intrinsics")]
    {
        r.trailing_zeros()
    }
    #[cfg(not(feature = "intrinsics"))]
    {
        trailing_zeros_portable(r)
    }
}

/// Largest low-bit pattern resolved by table lookup; wider patterns fall back to counting.
const MAX_TABLE_BITS: u32 = 12;

/// Uniform floats on [0,1) with every representable value reachable.
///
/// The top `f` bits of a word become the fraction of `m` in [1,2); the
/// remaining low bits select a geometric exponent through a table of powers
/// of two. When those bits are all zero, further words are consumed.
#[derive(Clone, Debug)]
pub struct CanonicalFloatGen<T> {
    bits: u32,
    low_bits: u32,
    table_bits: u32,
    multiplier: Vec<T>,
}

impl<T: Real> CanonicalFloatGen<T> {
    pub fn new(bits: u32) -> Result<Self, Error> {
        if bits > 64 || bits <= T::FRACTION_BITS {
            return Err(Error::Parameter(format!(
                "source width {bits} must exceed the {} fraction bits and be at most 64",
                T::FRACTION_BITS
            )));
        }
        let low_bits = bits - T::FRACTION_BITS;
        let table_bits = low_bits.min(MAX_TABLE_BITS);
        let mut multiplier = vec![T::zero(); 1 << table_bits];
        for (r, slot) in multiplier.iter_mut().enumerate().skip(1) {
            *slot = T::exp2_neg(1 + trailing_zeros(r as u64));
        }
        Ok(CanonicalFloatGen {
            bits,
            low_bits,
            table_bits,
            multiplier,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn table(&self) -> &[T] {
        &self.multiplier
    }

    #[inline]
    pub fn sample<S: BitSource + ?Sized>(&self, src: &mut S) -> T {
        debug_assert_eq!(S::BITS, self.bits);
        let u = src.next_bits();
        let m = T::one_plus_fraction(u >> self.low_bits);
        let r = u & ((1u64 << self.low_bits) - 1);
        let rt = r & ((1u64 << self.table_bits) - 1);
        if rt != 0 {
            return m * self.multiplier[rt as usize];
        }
        self.slow_path(m, r, src)
    }

    #[cold]
    fn slow_path<S: BitSource + ?Sized>(&self, m: T, r: u64, src: &mut S) -> T {
        if r != 0 {
            // only when the low field is wider than the table
            return scale_down(m, 1 + trailing_zeros(r));
        }
        let mut g = 1 + self.low_bits;
        loop {
            let r = src.next_bits();
            if r != 0 {
                return scale_down(m, g + trailing_zeros(r));
            }
            g += self.bits;
            if g > T::MIN_SUBNORMAL_EXP {
                return T::zero();
            }
        }
    }
}

/// `canonical_real` as a free function.
#[inline]
pub fn canonical_real<T: Real, S: BitSource + ?Sized>(gen: &CanonicalFloatGen<T>, src: &mut S) -> T {
    gen.sample(src)
}

/// `k * 2^-p` from the top `p = min(b, f+1)` bits of one word, so the value is exact and below 1.
#[inline]
pub fn fixed_real<T: Real, S: BitSource + ?Sized>(src: &mut S) -> T {
    let p = S::BITS.min(T::FRACTION_BITS + 1);
    let k = src.next_bits() >> (S::BITS - p);
    T::from_u64_lossy(k) * T::exp2_neg(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_holds_trailing_zero_powers() {
        let g = CanonicalFloatGen::<f64>::new(64).unwrap();
        assert_eq!(g.table().len(), 4096);
        assert_eq!(g.table()[1], 0.5);
        assert_eq!(g.table()[4], 0.125);
        assert_eq!(g.table()[2048], 2f64.powi(-12));
        let g = CanonicalFloatGen::<f32>::new(32).unwrap();
        assert_eq!(g.table().len(), 512);
    }

    #[test]
    fn narrow_source_rejected() {
        assert!(CanonicalFloatGen::<f64>::new(32).is_err());
        assert!(CanonicalFloatGen::<f32>::new(23).is_err());
    }

    #[test]
    fn lookup_path_examples() {
        let g = CanonicalFloatGen::<f64>::new(64).unwrap();
        let mut src = ReplaySource::<64>::new(vec![0b1, 0b100]);
        assert_eq!(g.sample(&mut src), 0.5);
        assert_eq!(g.sample(&mut src), 0.125);
    }

    #[test]
    fn fraction_comes_from_top_bits() {
        let g = CanonicalFloatGen::<f64>::new(64).unwrap();
        // top fraction bit set -> m = 1.5
        let mut src = ReplaySource::<64>::new(vec![(1u64 << 63) | 1]);
        assert_eq!(g.sample(&mut src), 0.75);
    }

    #[test]
    fn slow_path_matches_geometric_count() {
        let g = CanonicalFloatGen::<f64>::new(64).unwrap();
        // r = 0, then a word with 5 trailing zeros: g = 13 + 5
        let mut src = ReplaySource::<64>::new(vec![0, 0b100000]);
        assert_eq!(g.sample(&mut src), 2f64.powi(-18));
        // r = 0, one all-zero word, then bit 0: g = 13 + 64
        let mut src = ReplaySource::<64>::new(vec![0, 0, 1]);
        assert_eq!(g.sample(&mut src), 2f64.powi(-77));
        assert_eq!(src.consumed(), 3);
    }

    #[test]
    fn subnormals_reachable_and_exhaustion_flushes() {
        let g = CanonicalFloatGen::<f64>::new(64).unwrap();
        // g = 13 + 16*64 = 1037 after sixteen zero words, then 2^36 -> 1073
        let mut words = vec![1u64 << 63];
        words.extend(std::iter::repeat_n(0, 16));
        words.push(1 << 36);
        let mut src = ReplaySource::<64>::new(words);
        assert_eq!(g.sample(&mut src), f64::from_bits(3));

        let mut words = vec![0u64];
        words.extend(std::iter::repeat_n(0, 17));
        let mut src = ReplaySource::<64>::new(words);
        assert_eq!(g.sample(&mut src), 0.0);
    }

    #[test]
    fn f32_from_64_bit_words_uses_counting_beyond_table() {
        let g = CanonicalFloatGen::<f32>::new(64).unwrap();
        assert_eq!(g.table().len(), 4096);
        // low 41 bits: only bit 20 set -> g = 21
        let mut src = ReplaySource::<64>::new(vec![1 << 20]);
        assert_eq!(g.sample(&mut src), 2f32.powi(-21));
    }

    #[test]
    fn fixed_real_examples() {
        let mut src = ReplaySource::<32>::new(vec![0, 1 << 31, 1]);
        assert_eq!(fixed_real::<f64, _>(&mut src), 0.0);
        assert_eq!(fixed_real::<f64, _>(&mut src), 0.5);
        assert_eq!(fixed_real::<f64, _>(&mut src), 2f64.powi(-32));
        let mut src = ReplaySource::<64>::new(vec![u64::MAX]);
        assert!(fixed_real::<f64, _>(&mut src) < 1.0);
    }

    #[test]
    fn portable_and_intrinsic_counts_agree() {
        let mut src = seeded(7);
        for _ in 0..10_000 {
            let r = src.next_bits() >> (src.next_bits() % 64);
            assert_eq!(trailing_zeros_portable(r), r.trailing_zeros());
        }
        assert_eq!(trailing_zeros_portable(0), 64);
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        fn take(mut s: Mt64) -> Vec<u64> {
            (0..4).map(|_| s.next_bits()).collect()
        }
        assert_eq!(take(stream(1, 0)), take(stream(1, 0)));
        assert_ne!(take(stream(1, 0)), take(stream(1, 1)));
    }

    #[test]
    fn reference_mt64_output() {
        // first output of init_genrand64(5489)
        assert_eq!(seeded(5489).next_bits(), 14514284786278117030);
    }
}
