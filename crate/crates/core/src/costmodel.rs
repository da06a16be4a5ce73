//! Closed-form α-β communication costs for the 1D, 2D and 3D sparse
//! multiply variants, the grid optimizer, nnz estimators, and the MFBC
//! bound.
//!
//! Every asymptotic expression is evaluated with coefficient 1 and log base
//! 2. A grid dimension of size 1 carries no communication.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("invalid machine parameters: {0}")]
    InvalidMachine(String),
    #[error("invalid grid {0}x{1}x{2}: every dimension must be positive")]
    InvalidGrid(usize, usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Message and word counts of a communication schedule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostEstimate {
    pub messages: f64,
    pub words: f64,
}

impl CostEstimate {
    pub const ZERO: CostEstimate = CostEstimate { messages: 0.0, words: 0.0 };

    pub fn new(messages: f64, words: f64) -> Self {
        CostEstimate { messages, words }
    }

    /// `α · messages + β · words`
    pub fn seconds(&self, alpha: f64, beta: f64) -> f64 {
        alpha * self.messages + beta * self.words
    }
}

impl std::ops::Add for CostEstimate {
    type Output = CostEstimate;

    fn add(self, rhs: CostEstimate) -> CostEstimate {
        CostEstimate { messages: self.messages + rhs.messages, words: self.words + rhs.words }
    }
}

impl fmt::Display for CostEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}α + {}β", self.messages, self.words)
    }
}

/// α (seconds per message), β (seconds per word), processor count, memory
/// per processor in words, and replication factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: usize,
    pub memory_words: f64,
    pub c: f64,
}

impl MachineParams {
    pub fn validate(&self) -> Result<(), CostError> {
        if !(self.beta > 0.0) || !(self.alpha >= self.beta) {
            return Err(CostError::InvalidMachine(format!(
                "need alpha >= beta > 0, got alpha = {}, beta = {}",
                self.alpha, self.beta
            )));
        }
        if self.p == 0 || !(self.c >= 1.0 && self.c <= self.p as f64) {
            return Err(CostError::InvalidMachine(format!("need 1 <= c <= p, got c = {}, p = {}", self.c, self.p)));
        }
        if !(self.memory_words >= 0.0) {
            return Err(CostError::InvalidMachine(format!("memory {} must be nonnegative", self.memory_words)));
        }
        Ok(())
    }
}

/// The operand a 1D algorithm replicates (A or B) or reduces (C).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    A,
    B,
    C,
}

impl Operand {
    pub const ALL: [Operand; 3] = [Operand::A, Operand::B, Operand::C];
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Operand::A => "A",
            Operand::B => "B",
            Operand::C => "C",
        };
        f.write_str(s)
    }
}

/// 2D variants: the two operands that move (broadcast for A/B, reduction
/// for C); the third stays in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant2D {
    AB,
    AC,
    BC,
}

impl Variant2D {
    pub const ALL: [Variant2D; 3] = [Variant2D::AB, Variant2D::AC, Variant2D::BC];

    /// Operand whose blocks are split over processor rows.
    pub fn y(self) -> Operand {
        match self {
            Variant2D::AB | Variant2D::AC => Operand::A,
            Variant2D::BC => Operand::B,
        }
    }

    /// Operand whose blocks are split over processor columns.
    pub fn z(self) -> Operand {
        match self {
            Variant2D::AB => Operand::B,
            Variant2D::AC | Variant2D::BC => Operand::C,
        }
    }
}

impl fmt::Display for Variant2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.y(), self.z())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    OneD(Operand),
    TwoD(Variant2D),
    ThreeD(Operand, Variant2D),
}

impl Variant {
    /// All 15 variants: three 1D, three 2D, nine 3D.
    pub fn all() -> Vec<Variant> {
        let mut v: Vec<Variant> = Operand::ALL.iter().map(|&x| Variant::OneD(x)).collect();
        v.extend(Variant2D::ALL.iter().map(|&yz| Variant::TwoD(yz)));
        for x in Operand::ALL {
            for yz in Variant2D::ALL {
                v.push(Variant::ThreeD(x, yz));
            }
        }
        v
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::OneD(x) => write!(f, "{x}"),
            Variant::TwoD(yz) => write!(f, "{yz}"),
            Variant::ThreeD(x, yz) => write!(f, "{x}.{yz}"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = CostError;

    /// `A`, `AB`, or `C.AB` (also `C,AB` / `C/AB`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CostError::InvalidArgument(format!("unknown variant {s:?}"));
        let operand = |t: &str| match t {
            "A" => Some(Operand::A),
            "B" => Some(Operand::B),
            "C" => Some(Operand::C),
            _ => None,
        };
        let two = |t: &str| match t {
            "AB" => Some(Variant2D::AB),
            "AC" => Some(Variant2D::AC),
            "BC" => Some(Variant2D::BC),
            _ => None,
        };
        let s_up = s.trim().to_ascii_uppercase();
        if let Some((x, yz)) = s_up.split_once(['.', ',', '/']) {
            return Ok(Variant::ThreeD(operand(x).ok_or_else(bad)?, two(yz).ok_or_else(bad)?));
        }
        operand(&s_up)
            .map(Variant::OneD)
            .or_else(|| two(&s_up).map(Variant::TwoD))
            .ok_or_else(bad)
    }
}

/// A `p1 x p2 x p3` virtual processor grid. The 1D algorithm of a 3D
/// variant runs along `p1`; the 2D algorithm on `p2 x p3` layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProcGrid {
    pub p1: usize,
    pub p2: usize,
    pub p3: usize,
}

impl ProcGrid {
    pub fn new(p1: usize, p2: usize, p3: usize) -> Result<Self, CostError> {
        if p1 == 0 || p2 == 0 || p3 == 0 {
            return Err(CostError::InvalidGrid(p1, p2, p3));
        }
        Ok(ProcGrid { p1, p2, p3 })
    }

    pub fn one_d(p: usize) -> Result<Self, CostError> {
        Self::new(1, 1, p)
    }

    pub fn two_d(p_r: usize, p_c: usize) -> Result<Self, CostError> {
        Self::new(1, p_r, p_c)
    }

    pub fn p(&self) -> usize {
        self.p1 * self.p2 * self.p3
    }

    /// Every ordered factorization `p1 · p2 · p3 = p`.
    pub fn factorizations(p: usize) -> Vec<ProcGrid> {
        let divisors: Vec<usize> = (1..=p).filter(|d| p.is_multiple_of(*d)).collect();
        let mut out = Vec::new();
        for &p1 in &divisors {
            for &p2 in &divisors {
                if (p / p1).is_multiple_of(p2) {
                    out.push(ProcGrid { p1, p2, p3: p / p1 / p2 });
                }
            }
        }
        out
    }
}

impl fmt::Display for ProcGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.p1, self.p2, self.p3)
    }
}

impl std::str::FromStr for ProcGrid {
    type Err = CostError;

    /// `p1xp2xp3`, `p_rxp_c` (as `1 x p_r x p_c`), or `p` (as `1 x 1 x p`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<usize>, _> = s.split(['x', 'X']).map(|t| t.trim().parse::<usize>()).collect();
        let parts = parts.map_err(|_| CostError::InvalidArgument(format!("bad grid {s:?}")))?;
        match parts.as_slice() {
            [p] => ProcGrid::one_d(*p),
            [r, c] => ProcGrid::two_d(*r, *c),
            [a, b, c] => ProcGrid::new(*a, *b, *c),
            _ => Err(CostError::InvalidArgument(format!("bad grid {s:?}"))),
        }
    }
}

#[inline]
fn log2(p: usize) -> f64 {
    (p as f64).log2()
}

/// `W_X = α log p + β nnz(X)`; zero on one processor.
pub fn cost_1d(_variant: Operand, nnz_x: f64, p: usize) -> CostEstimate {
    if p <= 1 {
        return CostEstimate::ZERO;
    }
    CostEstimate::new(log2(p), nnz_x)
}

/// `W_YZ = α max(p_r, p_c) log p + β (nnz(Y)/p_r + nnz(Z)/p_c)`.
///
/// A grid with a unit dimension is the 1D algorithm it degenerates to:
/// `p_r = 1` replicates Y across `p_c`, `p_c = 1` moves Z across `p_r`.
pub fn cost_2d(_variant: Variant2D, nnz_y: f64, nnz_z: f64, p_r: usize, p_c: usize) -> CostEstimate {
    match (p_r, p_c) {
        (1, 1) => CostEstimate::ZERO,
        (1, c) => CostEstimate::new(log2(c), nnz_y),
        (r, 1) => CostEstimate::new(log2(r), nnz_z),
        (r, c) => CostEstimate::new(r.max(c) as f64 * log2(r * c), nnz_y / r as f64 + nnz_z / c as f64),
    }
}

fn pick(op: Operand, nnz: [f64; 3]) -> f64 {
    nnz[op as usize]
}

/// Nested 3D cost: the 1D variant `x` over `p1` on blocks from a `p2 x p3`
/// distribution, plus the 2D variant `yz` on each layer, where the operands
/// other than `x` arrive split `p1` ways.
pub fn cost_3d(x: Operand, yz: Variant2D, nnz_a: f64, nnz_b: f64, nnz_c: f64, grid: ProcGrid) -> CostEstimate {
    let nnz = [nnz_a, nnz_b, nnz_c];
    let ProcGrid { p1, p2, p3 } = grid;
    let outer = cost_1d(x, pick(x, nnz) / (p2 * p3) as f64, p1);
    let share = |op: Operand| if op == x { pick(op, nnz) } else { pick(op, nnz) / p1 as f64 };
    outer + cost_2d(yz, share(yz.y()), share(yz.z()), p2, p3)
}

/// Cost of any variant on `grid`. 1D variants use all `p` processors; 2D
/// variants use the `p2 x p3` layer and require `p1 = 1`.
pub fn cost_of(variant: Variant, nnz_a: f64, nnz_b: f64, nnz_c: f64, grid: ProcGrid) -> Result<CostEstimate, CostError> {
    let nnz = [nnz_a, nnz_b, nnz_c];
    match variant {
        Variant::OneD(x) => Ok(cost_1d(x, pick(x, nnz), grid.p())),
        Variant::TwoD(yz) => {
            if grid.p1 != 1 {
                return Err(CostError::InvalidArgument(format!("2D variant {yz} needs p1 = 1, got grid {grid}")));
            }
            Ok(cost_2d(yz, pick(yz.y(), nnz), pick(yz.z(), nnz), grid.p2, grid.p3))
        }
        Variant::ThreeD(x, yz) => Ok(cost_3d(x, yz, nnz_a, nnz_b, nnz_c, grid)),
    }
}

/// Words per processor of a 3D variant: `nnz(X) p1 / p + (nnz(Y) + nnz(Z)) / p`.
pub fn memory_3d(nnz_x: f64, nnz_y: f64, nnz_z: f64, p: usize, p1: usize) -> f64 {
    nnz_x * p1 as f64 / p as f64 + (nnz_y + nnz_z) / p as f64
}

#[inline]
fn delta(x: usize) -> f64 {
    if x > 1 {
        1.0
    } else {
        0.0
    }
}

/// `W_MM`: minimum over factorizations of
/// `α max(p1,p2,p3) log p + β (nnz(A)/(p1 p2) δ(p3) + nnz(B)/(p2 p3) δ(p1) + nnz(C)/(p1 p3) δ(p2))`.
pub fn w_mm(nnz_a: f64, nnz_b: f64, nnz_c: f64, p: usize, alpha: f64, beta: f64) -> (ProcGrid, CostEstimate) {
    ProcGrid::factorizations(p)
        .into_iter()
        .map(|g| {
            let ProcGrid { p1, p2, p3 } = g;
            let words = nnz_a / (p1 * p2) as f64 * delta(p3)
                + nnz_b / (p2 * p3) as f64 * delta(p1)
                + nnz_c / (p1 * p3) as f64 * delta(p2);
            let messages = if p > 1 { p1.max(p2).max(p3) as f64 * log2(p) } else { 0.0 };
            (g, CostEstimate::new(messages, words))
        })
        .min_by(|x, y| x.1.seconds(alpha, beta).total_cmp(&y.1.seconds(alpha, beta)))
        .expect("p has at least one factorization")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridChoice {
    pub grid: ProcGrid,
    pub variant: Variant,
    pub cost: CostEstimate,
    pub seconds: f64,
}

/// Every (grid, variant) pair for `p` processors, labelled by its effective
/// dimension: 3D grids with `p2 = p3 = 1` are 1D, with `p1 = 1` are 2D.
pub fn enumerate_configurations(nnz_a: f64, nnz_b: f64, nnz_c: f64, p: usize, alpha: f64, beta: f64) -> Vec<GridChoice> {
    let mut out = Vec::new();
    for grid in ProcGrid::factorizations(p) {
        for x in Operand::ALL {
            for yz in Variant2D::ALL {
                let variant = if grid.p2 == 1 && grid.p3 == 1 {
                    Variant::OneD(x)
                } else if grid.p1 == 1 {
                    Variant::TwoD(yz)
                } else {
                    Variant::ThreeD(x, yz)
                };
                let cost = cost_3d(x, yz, nnz_a, nnz_b, nnz_c, grid);
                out.push(GridChoice { grid, variant, cost, seconds: cost.seconds(alpha, beta) });
            }
        }
    }
    out
}

/// Exhaustive search over all factorizations and variants; ties keep the
/// first configuration in enumeration order.
pub fn optimize_grid(nnz_a: f64, nnz_b: f64, nnz_c: f64, p: usize, alpha: f64, beta: f64) -> Result<GridChoice, CostError> {
    if p == 0 {
        return Err(CostError::InvalidArgument("p must be at least 1".into()));
    }
    let all = enumerate_configurations(nnz_a, nnz_b, nnz_c, p, alpha, beta);
    let mut best = all[0];
    for c in &all[1..] {
        if c.seconds < best.seconds {
            best = *c;
        }
    }
    Ok(best)
}

/// Communication bound of batched MFBC on an unweighted graph of diameter
/// `d`: `α (d n² / m) √(p / c³) log p + β (n² / √(c p) + n √m / p^(2/3))`.
pub fn mfbc_bound(n: f64, m: f64, p: usize, c: f64, d: f64) -> Result<CostEstimate, CostError> {
    if !(m > 0.0) || p == 0 || !(c >= 1.0 && c <= p as f64) {
        return Err(CostError::InvalidArgument(format!("need m > 0 and 1 <= c <= p (m = {m}, c = {c}, p = {p})")));
    }
    let pf = p as f64;
    let messages = d * n * n / m * (pf / (c * c * c)).sqrt() * log2(p);
    let words = n * n / (c * pf).sqrt() + n * m.sqrt() / pf.powf(2.0 / 3.0);
    Ok(CostEstimate::new(messages, words))
}

/// Bandwidth of the batched algorithm including the replicated adjacency:
/// `n² / √(c p) + c m / p`.
pub fn replication_tradeoff(n: f64, m: f64, p: usize, c: f64) -> f64 {
    let pf = p as f64;
    n * n / (c * pf).sqrt() + c * m / pf
}

/// `p^(1/3) n² / m`, the replication factor quoted alongside the bound.
pub fn quoted_optimal_replication(n: f64, m: f64, p: usize) -> f64 {
    (p as f64).cbrt() * n * n / m
}

/// Stationary point of [`replication_tradeoff`]: `(n² √p / (2 m))^(2/3)`.
pub fn tradeoff_minimizer(n: f64, m: f64, p: usize) -> f64 {
    (n * n * (p as f64).sqrt() / (2.0 * m)).powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimates {
    pub flops: f64,
    pub nnz_c: f64,
}

/// Uniform-random estimates for an `m x k` times `k x n` product:
/// `flops ≈ nnz(A) nnz(B) / k` and `nnz(C) ≈ min(m n, flops)`.
pub fn estimate_product(nnz_a: f64, nnz_b: f64, k: usize, m: usize, n: usize) -> Estimates {
    let flops = if k == 0 { 0.0 } else { nnz_a * nnz_b / k as f64 };
    Estimates { flops, nnz_c: flops.min(m as f64 * n as f64) }
}

/// Expected nonzeros of a `b1 x b2` block of an `m x k` matrix.
pub fn block_nnz_estimate(nnz: f64, m: usize, k: usize, b1: usize, b2: usize) -> f64 {
    nnz * (b1 * b2) as f64 / (m * k) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(p1: usize, p2: usize, p3: usize) -> ProcGrid {
        ProcGrid::new(p1, p2, p3).unwrap()
    }

    #[test]
    fn one_d_examples() {
        assert_eq!(cost_1d(Operand::A, 1000.0, 16), CostEstimate::new(4.0, 1000.0));
        assert_eq!(cost_1d(Operand::C, 0.0, 16), CostEstimate::new(4.0, 0.0));
        assert_eq!(cost_1d(Operand::B, 1000.0, 1), CostEstimate::ZERO);
    }

    #[test]
    fn two_d_examples() {
        assert_eq!(cost_2d(Variant2D::AB, 1000.0, 4000.0, 4, 8), CostEstimate::new(40.0, 750.0));
        assert_eq!(cost_2d(Variant2D::AC, 5.0, 7.0, 1, 1), CostEstimate::ZERO);
        // p = 16 on a 4x4 grid: 4 · log2 16 = 16 messages, n/4 + n/4 words
        let n = 4096.0;
        assert_eq!(cost_2d(Variant2D::AC, n, n, 4, 4), CostEstimate::new(16.0, 2048.0));
    }

    #[test]
    fn two_d_unit_dimension_is_one_d() {
        for yz in Variant2D::ALL {
            assert_eq!(cost_2d(yz, 100.0, 300.0, 1, 8), cost_1d(yz.y(), 100.0, 8));
            assert_eq!(cost_2d(yz, 100.0, 300.0, 8, 1), cost_1d(yz.z(), 300.0, 8));
        }
    }

    #[test]
    fn three_d_degenerates() {
        for x in Operand::ALL {
            for yz in Variant2D::ALL {
                let (a, b, c) = (1000.0, 3000.0, 5000.0);
                let nnz = [a, b, c];
                assert_eq!(cost_3d(x, yz, a, b, c, grid(1, 4, 8)), cost_2d(yz, pick(yz.y(), nnz), pick(yz.z(), nnz), 4, 8));
                assert_eq!(cost_3d(x, yz, a, b, c, grid(16, 1, 1)), cost_1d(x, pick(x, nnz), 16));
            }
        }
    }

    #[test]
    fn three_d_case_structure_by_hand() {
        // nnz(A) = nnz(B) = nnz(C) = 1024 on a 2 x 4 x 8 grid:
        //   outer 1D over p1 = 2: log2 2 = 1 message, 1024 / 32 = 32 words
        //   layer 4 x 8, 8 · log2 32 = 40 messages
        //   X = Y  (A, AB): 1024/4 + (1024/2)/8 = 256 + 64
        //   X = Z  (C, AC): (1024/2)/4 + 1024/8 = 128 + 128
        //   X ∉ YZ (C, AB): (1024/2)/4 + (1024/2)/8 = 128 + 64
        let g = grid(2, 4, 8);
        let n = 1024.0;
        assert_eq!(cost_3d(Operand::A, Variant2D::AB, n, n, n, g), CostEstimate::new(41.0, 32.0 + 320.0));
        assert_eq!(cost_3d(Operand::C, Variant2D::AC, n, n, n, g), CostEstimate::new(41.0, 32.0 + 256.0));
        assert_eq!(cost_3d(Operand::C, Variant2D::AB, n, n, n, g), CostEstimate::new(41.0, 32.0 + 192.0));
    }

    #[test]
    fn memory_example() {
        assert_eq!(memory_3d(1000.0, 500.0, 500.0, 16, 2), 187.5);
    }

    #[test]
    fn bound_examples() {
        let w = mfbc_bound(1024.0, 16384.0, 64, 4.0, 8.0).unwrap();
        assert_eq!(w, CostEstimate::new(3072.0, 73728.0));
        assert_eq!(w.seconds(1.0, 1.0), 76800.0);

        let (n, m) = (100.0, 400.0);
        let single = mfbc_bound(n, m, 1, 1.0, 5.0).unwrap();
        assert_eq!(single, CostEstimate::new(0.0, n * n + n * m.sqrt()));

        let (c1, c2) = (mfbc_bound(n, m, 64, 2.0, 5.0).unwrap(), mfbc_bound(n, m, 64, 4.0, 5.0).unwrap());
        assert!((c1.messages / c2.messages - 2f64.powf(1.5)).abs() < 1e-12);

        assert!(mfbc_bound(n, m, 8, 9.0, 5.0).is_err());
        assert!(mfbc_bound(n, 0.0, 8, 1.0, 5.0).is_err());
    }

    #[test]
    fn bound_latency_nonincreasing_in_c() {
        let mut prev = f64::INFINITY;
        for c in 1..=64 {
            let w = mfbc_bound(4096.0, 65536.0, 64, c as f64, 10.0).unwrap();
            assert!(w.messages <= prev);
            prev = w.messages;
        }
    }

    #[test]
    fn tradeoff_minimizer_is_the_scan_minimum() {
        let (n, m, p) = (2048.0, 2048.0 * 64.0, 4096);
        let scan = (1..=p)
            .map(|c| (c, replication_tradeoff(n, m, p, c as f64)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let star = tradeoff_minimizer(n, m, p);
        assert!((scan.0 as f64 - star).abs() <= 1.0, "scan {} vs {star}", scan.0);
    }

    #[test]
    fn estimator_examples() {
        assert_eq!(estimate_product(100.0, 200.0, 50, 1000, 1000).flops, 400.0);
        assert_eq!(estimate_product(1000.0, 1000.0, 1, 10, 10).nnz_c, 100.0);
        assert_eq!(block_nnz_estimate(512.0, 64, 64, 8, 8), 8.0);
    }

    #[test]
    fn optimizer_trivial_processor() {
        let best = optimize_grid(10.0, 20.0, 30.0, 1, 1.0, 1.0).unwrap();
        assert_eq!(best.cost, CostEstimate::ZERO);
        assert_eq!(best.grid, grid(1, 1, 1));
        assert!(optimize_grid(1.0, 1.0, 1.0, 0, 1.0, 1.0).is_err());
    }

    #[test]
    fn optimizer_avoids_replicating_the_heavy_operand() {
        let (a, b, c) = (1e6, 1e3, 1e3);
        let best = optimize_grid(a, b, c, 8, 1.0, 1.0).unwrap();
        let replicate_a = cost_1d(Operand::A, a, 8).seconds(1.0, 1.0);
        assert!(best.seconds < replicate_a);
        assert!(!matches!(best.variant, Variant::OneD(Operand::A) | Variant::ThreeD(Operand::A, _)));
    }

    #[test]
    fn w_mm_matches_direct_evaluation() {
        let (g, w) = w_mm(1000.0, 1000.0, 1000.0, 8, 1.0, 1.0);
        assert_eq!(g.p(), 8);
        // the 2x2x2 grid: 2·3 messages, 3 · 1000/4 words
        let cube = 6.0 + 750.0;
        assert!(w.seconds(1.0, 1.0) <= cube);
        assert_eq!(w_mm(5.0, 5.0, 5.0, 1, 1.0, 1.0).1, CostEstimate::ZERO);
    }

    #[test]
    fn parsing() {
        assert_eq!("C.AB".parse::<Variant>().unwrap(), Variant::ThreeD(Operand::C, Variant2D::AB));
        assert_eq!("ac".parse::<Variant>().unwrap(), Variant::TwoD(Variant2D::AC));
        assert_eq!("B".parse::<Variant>().unwrap(), Variant::OneD(Operand::B));
        assert!("Q".parse::<Variant>().is_err());
        assert_eq!("2x2x2".parse::<ProcGrid>().unwrap(), grid(2, 2, 2));
        assert_eq!("4x8".parse::<ProcGrid>().unwrap(), grid(1, 4, 8));
        assert!("0x2x2".parse::<ProcGrid>().is_err());
    }

    #[test]
    fn machine_validation() {
        let ok = MachineParams { alpha: 2.0, beta: 1.0, p: 8, memory_words: 10.0, c: 2.0 };
        assert!(ok.validate().is_ok());
        assert!(MachineParams { alpha: 0.5, ..ok }.validate().is_err());
        assert!(MachineParams { c: 9.0, ..ok }.validate().is_err());
    }
}
