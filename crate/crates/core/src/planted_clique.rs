//! Planted cliques in random 3-uniform hypergraphs, the matricization
//! spectral detector, and the Gaussianization map that turns a hypergraph
//! adjacency tensor into a sparse rank-one tensor denoising instance.
//!
//! Vertices are zero-based. The first half is `0..N/2` (floor), the second
//! half `N/2..N`. Hyperedges exist only for three distinct vertices, so every
//! adjacency entry with a repeated index is 0.

use std::ops::Range;

use crate::error::{contract, Result};
use crate::linalg::{mode_leading_subspace, mode_singular_values};
use crate::rng::Sampler;
use crate::tensor::{Mode, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Half {
    First,
    Second,
}

impl Half {
    pub fn vertices(self, n: usize) -> Range<usize> {
        match self {
            Half::First => 0..n / 2,
            Half::Second => n / 2..n,
        }
    }
}

fn binom2(b: usize) -> usize {
    b * b.saturating_sub(1) / 2
}

fn binom3(c: usize) -> usize {
    c * c.saturating_sub(1) * c.saturating_sub(2) / 6
}

/// Symmetric 0/1 adjacency tensor of a 3-uniform hypergraph, one bit per
/// unordered triple.
#[derive(Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Adjacency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Adjacency {{ n: {}, edges: {} }}", self.n, self.edge_count())
    }
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency { n, bits: vec![0; binom3(n).div_ceil(64)] }
    }

    /// Every unordered triple independently present with probability 1/2.
    pub fn random(n: usize, rng: &mut Sampler) -> Self {
        let total = binom3(n);
        let mut bits: Vec<u64> = (0..total.div_ceil(64)).map(|_| rng.next_u64()).collect();
        let tail = total % 64;
        if tail != 0 {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Adjacency { n, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(a: usize, b: usize, c: usize) -> usize {
        binom3(c) + binom2(b) + a
    }

    fn sorted(i: usize, j: usize, k: usize) -> Option<(usize, usize, usize)> {
        let mut v = [i, j, k];
        v.sort_unstable();
        (v[0] < v[1] && v[1] < v[2]).then_some((v[0], v[1], v[2]))
    }

    /// `A[i, j, k]`; zero whenever two indices coincide.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        assert!(i < self.n && j < self.n && k < self.n, "vertex out of range");
        match Self::sorted(i, j, k) {
            Some((a, b, c)) => {
                let s = Self::slot(a, b, c);
                self.bits[s / 64] >> (s % 64) & 1 == 1
            }
            None => false,
        }
    }

    /// Lookup for an already strictly increasing triple.
    #[inline]
    fn get_ordered(&self, a: usize, b: usize, c: usize) -> bool {
        let s = Self::slot(a, b, c);
        self.bits[s / 64] >> (s % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: bool) {
        assert!(i < self.n && j < self.n && k < self.n, "vertex out of range");
        let (a, b, c) = Self::sorted(i, j, k).expect("hyperedges need three distinct vertices");
        let s = Self::slot(a, b, c);
        if value {
            self.bits[s / 64] |= 1 << (s % 64);
        } else {
            self.bits[s / 64] &= !(1 << (s % 64));
        }
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Dense `N x N x N` tensor of zeros and ones.
    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3::from_fn([self.n; 3], |i, j, k| if self.get(i, j, k) { 1.0 } else { 0.0 })
    }

    /// Reads a dense tensor back, checking it is a valid adjacency tensor.
    pub fn from_tensor(t: &Tensor3) -> Result<Self> {
        let [n, n2, n3] = t.dims();
        if n != n2 || n != n3 {
            return contract(format!("adjacency tensor must be cubic, got {:?}", t.dims()));
        }
        let mut adj = Adjacency::empty(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = t.get(i, j, k);
                    if v != 0.0 && v != 1.0 {
                        return contract(format!("entry ({i},{j},{k}) = {v} is not 0 or 1"));
                    }
                    match Self::sorted(i, j, k) {
                        None if v != 0.0 => {
                            return contract(format!("entry ({i},{j},{k}) repeats a vertex but is 1"));
                        }
                        None => {}
                        Some((a, b, c)) if (a, b, c) == (i, j, k) => {
                            if v == 1.0 {
                                adj.set(a, b, c, true);
                            }
                        }
                        Some((a, b, c)) if adj.get_ordered(a, b, c) != (v == 1.0) => {
                            return contract(format!("adjacency not symmetric at ({i},{j},{k})"));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(adj)
    }
}

/// One draw from the planted-clique hypergraph model.
#[derive(Debug, Clone)]
pub struct CliqueInstance {
    pub n: usize,
    pub kappa: usize,
    pub half: Half,
    /// Sorted clique vertices.
    pub clique: Vec<usize>,
    pub adjacency: Adjacency,
}

/// Random hypergraph with a `kappa`-clique planted uniformly in `half`.
pub fn sample_hypergraph(n: usize, kappa: usize, half: Half, rng: &mut Sampler) -> Result<CliqueInstance> {
    if n < 6 {
        return contract(format!("need at least 6 vertices, got {n}"));
    }
    if kappa == 0 || kappa > n / 2 {
        return contract(format!("clique size must lie in 1..={}, got {kappa}", n / 2));
    }
    let mut adjacency = Adjacency::random(n, rng);
    let range = half.vertices(n);
    let offset = range.start;
    let clique: Vec<usize> = rng.subset(range.len(), kappa).into_iter().map(|v| v + offset).collect();
    for (x, &c) in clique.iter().enumerate() {
        for (y, &b) in clique[..x].iter().enumerate() {
            for &a in &clique[..y] {
                adjacency.set(a, b, c, true);
            }
        }
    }
    Ok(CliqueInstance { n, kappa, half, clique, adjacency })
}

/// The three disjoint, equal-size vertex blocks tiling `half`.
pub fn spectral_blocks(n: usize, half: Half) -> [Range<usize>; 3] {
    let offset = half.vertices(n).start;
    [0, 1, 2].map(|k| offset + k * n / 6..offset + (k + 1) * n / 6)
}

/// `2 A[D1, D2, D3] - 1`: ±1 entries, +1 on hyperedges.
pub fn recentred_block(adj: &Adjacency, blocks: &[Range<usize>; 3]) -> Tensor3 {
    let [d1, d2, d3] = blocks;
    let dims = [d1.len(), d2.len(), d3.len()];
    let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    let ordered = d1.end <= d2.start && d2.end <= d3.start;
    for a in d1.clone() {
        for b in d2.clone() {
            for c in d3.clone() {
                let hit = if ordered { adj.get_ordered(a, b, c) } else { adj.get(a, b, c) };
                data.push(if hit { 1.0 } else { -1.0 });
            }
        }
    }
    Tensor3::new(dims, data).expect("block dims are positive")
}

/// Leading left singular vectors of the three matricizations of the
/// recentred block tensor.
#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    pub blocks: [Range<usize>; 3],
    pub directions: [Vec<f64>; 3],
}

fn check_blocks(n: usize) -> Result<()> {
    if n < 12 {
        return contract(format!("spectral blocks need N >= 12, got {n}"));
    }
    Ok(())
}

pub fn spectral_clique_estimate(inst: &CliqueInstance) -> Result<SpectralEstimate> {
    if inst.half != Half::First {
        return contract("spectral estimate is defined for cliques planted in the first half");
    }
    spectral_estimate_in(&inst.adjacency, Half::First)
}

/// Spectral estimate on the blocks of either half.
pub fn spectral_estimate_in(adj: &Adjacency, half: Half) -> Result<SpectralEstimate> {
    check_blocks(adj.n())?;
    let blocks = spectral_blocks(adj.n(), half);
    let block = recentred_block(adj, &blocks);
    let mut directions: [Vec<f64>; 3] = Default::default();
    for mode in Mode::ALL {
        let u = mode_leading_subspace(&block, mode, 1)?;
        directions[mode.index()] = u.matrix().column(0);
    }
    Ok(SpectralEstimate { blocks, directions })
}

/// Takes the `⌈κ/3⌉` largest-magnitude coordinates of each direction and
/// returns the union of the corresponding vertices, sorted.
pub fn recover_clique(est: &SpectralEstimate, kappa: usize) -> Vec<usize> {
    let per_block = kappa.div_ceil(3);
    let mut out = Vec::new();
    for (range, dir) in est.blocks.iter().zip(&est.directions) {
        let mut idx: Vec<usize> = (0..dir.len()).collect();
        idx.sort_by(|&a, &b| dir[b].abs().total_cmp(&dir[a].abs()).then(a.cmp(&b)));
        out.extend(idx.into_iter().take(per_block.min(dir.len())).map(|i| range.start + i));
    }
    out.sort_unstable();
    out
}

/// For each block, the sine of the angle between the estimated direction and
/// the normalized indicator of the clique vertices in that block (1 when the
/// block holds none of them).
pub fn direction_sines(est: &SpectralEstimate, clique: &[usize]) -> [f64; 3] {
    [0, 1, 2].map(|k| {
        let range = &est.blocks[k];
        let members: Vec<usize> = clique.iter().filter(|v| range.contains(v)).map(|v| v - range.start).collect();
        if members.is_empty() {
            return 1.0;
        }
        let dir = &est.directions[k];
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cos = members.iter().map(|&i| dir[i]).sum::<f64>().abs() / (norm * (members.len() as f64).sqrt());
        (1.0 - cos.min(1.0).powi(2)).sqrt()
    })
}

/// Largest singular value of the mode-1 matricization of the recentred
/// block tensor for `half`.
pub fn block_energy(adj: &Adjacency, half: Half) -> Result<f64> {
    check_blocks(adj.n())?;
    let block = recentred_block(adj, &spectral_blocks(adj.n(), half));
    Ok(mode_singular_values(&block, Mode::One)?[0])
}

/// Decides which half hosts the clique by comparing block spectral energy.
/// Ties go to the first half.
pub fn detect_half(adj: &Adjacency, n: usize, kappa: usize) -> Result<Half> {
    if adj.n() != n {
        return contract(format!("adjacency has {} vertices, expected {n}", adj.n()));
    }
    if kappa == 0 || kappa > n / 2 {
        return contract(format!("clique size must lie in 1..={}, got {kappa}", n / 2));
    }
    let first = block_energy(adj, Half::First)?;
    let second = block_energy(adj, Half::Second)?;
    Ok(if second > first { Half::Second } else { Half::First })
}

/// Truncation level, shift and embedding target of the Gaussianization map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionParams {
    pub trunc_m: f64,
    pub mu: f64,
    pub target_dims: [usize; 3],
}

impl ReductionParams {
    pub fn new(trunc_m: f64, mu: f64, target_dims: [usize; 3]) -> Result<Self> {
        if !(trunc_m >= 4.0 && trunc_m.is_finite()) {
            return contract(format!("truncation level must be at least 4, got {trunc_m}"));
        }
        if !(mu > 0.0 && mu <= 1.0 / (2.0 * trunc_m)) {
            return contract(format!("shift must lie in (0, 1/(2M)], got {mu}"));
        }
        Ok(ReductionParams { trunc_m, mu, target_dims })
    }

    /// `M = √(8 ln N)`, `μ = 1/(2M)`, target `(N/3)^3`.
    pub fn for_vertices(n: usize) -> Result<Self> {
        let m = (8.0 * (n as f64).ln()).sqrt();
        let p = n / 3;
        Self::new(m, 1.0 / (2.0 * m), [p, p, p])
    }
}

/// Signal strength `p^{3(1-τ)/4} / (2 √(8 ln 3p))` attached to the reduced
/// instance.
pub fn reduced_signal_strength(p: usize, tau: f64) -> f64 {
    let p = p as f64;
    p.powf(0.75 * (1.0 - tau)) / (2.0 * (8.0 * (3.0 * p).ln()).sqrt())
}

/// The index sets `V1, V2, V3` (each of size `p = N/3`) selecting the corner
/// block of the adjacency tensor, in order.
pub fn reduction_index_sets(n: usize) -> Result<[Vec<usize>; 3]> {
    if n == 0 || !n.is_multiple_of(6) {
        return contract(format!("reduction needs N divisible by 6, got {n}"));
    }
    let p = n / 3;
    let h = p / 2;
    let join = |a: Range<usize>, b: Range<usize>| a.chain(b).collect::<Vec<_>>();
    Ok([
        join(0..h, 3 * h..2 * p),
        join(h..p, 2 * p..2 * p + h),
        join(p..p + h, 2 * p + h..3 * p),
    ])
}

/// Maps an adjacency tensor to a `p x p x p` tensor whose entries are
/// `(Z + μ)·1{|Z| ≤ M}` where the corner block has a hyperedge and
/// `(Z - μ)·1{|Z| ≤ M}` elsewhere, with fresh standard normal `Z` per entry.
pub fn gaussianize(adj: &Adjacency, params: &ReductionParams, rng: &mut Sampler) -> Result<Tensor3> {
    let [v1, v2, v3] = reduction_index_sets(adj.n())?;
    let p = v1.len();
    let (m, mu) = (params.trunc_m, params.mu);
    let mut data = Vec::with_capacity(p * p * p);
    for &a in &v1 {
        for &b in &v2 {
            for &c in &v3 {
                let z = rng.standard_normal();
                let shift = if adj.get(a, b, c) { mu } else { -mu };
                data.push(if z.abs() <= m { z + shift } else { 0.0 });
            }
        }
    }
    Tensor3::new([p, p, p], data)
}

/// Zero-pads `y` into the corner of a tensor with dims `target`.
pub fn embed(y: &Tensor3, target: [usize; 3]) -> Result<Tensor3> {
    let dims = y.dims();
    if (0..3).any(|k| target[k] < dims[k]) {
        return contract(format!("cannot embed {dims:?} into smaller {target:?}"));
    }
    let mut data = vec![0.0; target[0] * target[1] * target[2]];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            let dst = (i * target[1] + j) * target[2];
            let src = (i * dims[1] + j) * dims[2];
            data[dst..dst + dims[2]].copy_from_slice(&y.as_slice()[src..src + dims[2]]);
        }
    }
    Ok(Tensor3::new(target, data).expect("padding keeps entries finite"))
}

/// Positions of the clique inside the Gaussianized tensor: for each mode
/// `j`, the coordinates `a` with `V_j[a] ∈ C`.
pub fn clique_block_supports(inst: &CliqueInstance) -> Result<[Vec<usize>; 3]> {
    let sets = reduction_index_sets(inst.n)?;
    Ok(sets.map(|v| {
        v.iter()
            .enumerate()
            .filter(|(_, vertex)| inst.clique.binary_search(vertex).is_ok())
            .map(|(pos, _)| pos)
            .collect()
    }))
}
