//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a [`Sampler`], a ChaCha8
//! keystream selected by an [`RngStream`] value `(seed, stream_id)`. The
//! ChaCha key is expanded from `seed` with SplitMix64, and `stream_id` picks
//! the ChaCha stream (nonce), so distinct ids never share keystream blocks.
//!
//! Stream ids for Monte Carlo work are derived as
//! `mix(base_seed, cell_key, replication, role)`; see [`RngStream::replication`]
//! and [`RngStream::role`].
//!
//! Standard normals are produced by inversion: one open-interval uniform per
//! draw pushed through Wichura's AS241 (PPND16) quantile approximation, which
//! is accurate to about 1e-16 relative. Inversion keeps one uniform per
//! variate, so Gaussian and uniform noise built from the same stream are
//! coupled entry by entry.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Role tags used to split a replication stream into independent parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Factors,
    Core,
    Noise,
    WarmStart,
    Graph,
    Reduction,
}

impl Role {
    fn tag(self) -> u64 {
        match self {
            Role::Factors => 0x6661_6374,
            Role::Core => 0x636f_7265,
            Role::Noise => 0x6e6f_6973,
            Role::WarmStart => 0x7761_726d,
            Role::Graph => 0x6772_6170,
            Role::Reduction => 0x7265_6475,
        }
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive mix of several words into one.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

/// 64-bit FNV-1a, used to key cells by their stable names.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// A value-type handle on one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Stream for replication `rep` of the cell keyed by `cell_key`.
    pub fn replication(base_seed: u64, cell_key: u64, rep: u64) -> Self {
        RngStream { seed: base_seed, stream_id: mix(&[base_seed, cell_key, rep]) }
    }

    /// Independent sub-stream for one role within this stream.
    pub fn role(self, role: Role) -> Self {
        RngStream { seed: self.seed, stream_id: mix(&[self.stream_id, role.tag()]) }
    }

    /// Independent sub-stream keyed by an arbitrary index.
    pub fn child(self, index: u64) -> Self {
        RngStream { seed: self.seed, stream_id: mix(&[self.stream_id, 0x63_6869_6c64, index]) }
    }

    pub fn sampler(self) -> Sampler {
        let mut key = [0u8; 32];
        let mut state = self.seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(self.stream_id);
        Sampler { inner }
    }
}

/// Stateful draw source created from an [`RngStream`].
pub struct Sampler {
    inner: ChaCha8Rng,
}

impl Sampler {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        normal_quantile(self.uniform())
    }

    /// `k` distinct indices from `0..n`, uniformly, in sorted order.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut idx = rand::seq::index::sample(&mut self.inner, n, k).into_vec();
        idx.sort_unstable();
        idx
    }
}

/// Standard normal quantile `Φ⁻¹(p)` for `p ∈ (0, 1)` (Wichura, AS241 PPND16).
// The coefficients are quoted exactly as published.
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608_0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083_0e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061_0e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561_0e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_90,
        5.769_497_221_460_691_405_50,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_70e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_40e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_40,
        6.897_673_349_851_000_045_50e-1,
        1.481_039_764_274_800_745_90e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946_00e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_20,
        5.463_784_911_164_114_369_90,
        1.784_826_539_917_291_335_80,
        2.965_605_718_285_048_912_30e-1,
        2.653_218_952_657_612_309_30e-2,
        1.242_660_947_388_078_438_60e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_90e-1,
        1.369_298_809_227_358_053_10e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591_00e-4,
        1.846_318_317_510_054_681_80e-5,
        1.421_511_758_316_445_888_70e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    #[inline]
    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}
