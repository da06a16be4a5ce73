//! Weight domain, the multpath and centpath monoids, and the two weight
//! actions that parameterize every generalized multiply.
//!
//! A multpath `(w, m)` is the weight and multiplicity of the shortest paths
//! found so far. A centpath `(w, p, c)` carries a partial centrality factor
//! and a counter of successors that have not yet reported.
//!
//! Weight equality in the tie cases is exact `f64` equality, which is exact
//! for integer-weight graphs.

use std::fmt;
use std::ops::Add;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("edge weight {0} is not a positive finite number")]
    InvalidWeight(f64),
}

/// An edge weight or path length. `Weight::INFINITY` is the sparsity
/// sentinel of the weight domain.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Weight(f64);

impl Weight {
    pub const INFINITY: Weight = Weight(f64::INFINITY);
    pub const ZERO: Weight = Weight(0.0);
    pub const ONE: Weight = Weight(1.0);

    /// Validated constructor for ingested edge weights: finite and strictly
    /// positive.
    pub fn edge(value: f64) -> Result<Weight, AlgebraError> {
        if value.is_finite() && value > 0.0 {
            Ok(Weight(value))
        } else {
            Err(AlgebraError::InvalidWeight(value))
        }
    }

    /// Unchecked constructor for derived quantities (distances, differences).
    pub const fn raw(value: f64) -> Weight {
        Weight(value)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl Add for Weight {
    type Output = Weight;

    #[inline]
    fn add(self, rhs: Weight) -> Weight {
        // inf + w = inf for every finite or infinite w >= 0
        Weight(self.0 + rhs.0)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "∞")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Weight> for f64 {
    fn from(w: Weight) -> f64 {
        w.0
    }
}

/// Element type that can be stored in a [`crate::spmat::SparseMatrix`].
///
/// Sentinel values are never materialized as stored entries.
pub trait Element: Copy + fmt::Debug + PartialEq + Send + Sync {
    fn is_sentinel(&self) -> bool;
}

impl Element for Weight {
    fn is_sentinel(&self) -> bool {
        self.is_infinite()
    }
}

/// Weight and multiplicity of a set of equal-weight paths.
///
/// The multiplicity is a double so that path counts may grow past `u64`;
/// it is exact for integer values below 2^53.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multpath {
    pub w: Weight,
    pub m: f64,
}

impl Multpath {
    pub const IDENTITY: Multpath = Multpath { w: Weight::INFINITY, m: 0.0 };

    pub fn new(w: f64, m: f64) -> Self {
        Multpath { w: Weight::raw(w), m }
    }
}

impl Element for Multpath {
    fn is_sentinel(&self) -> bool {
        self.w.is_infinite()
    }
}

/// Weight, partial centrality factor, and counter of unreported successors.
/// A counter of `-1` marks an entry that has already been reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centpath {
    pub w: Weight,
    pub p: f64,
    pub c: i64,
}

impl Centpath {
    pub const SENTINEL: Centpath = Centpath { w: Weight::INFINITY, p: 0.0, c: 0 };

    pub fn new(w: f64, p: f64, c: i64) -> Self {
        Centpath { w: Weight::raw(w), p, c }
    }
}

impl Element for Centpath {
    fn is_sentinel(&self) -> bool {
        self.w.is_infinite()
    }
}

/// Multpath monoid: keep the lighter operand, sum multiplicities on ties.
#[inline]
pub fn multpath_combine(x: Multpath, y: Multpath) -> Multpath {
    if x.w < y.w {
        x
    } else if x.w > y.w {
        y
    } else {
        Multpath { w: x.w, m: x.m + y.m }
    }
}

/// Centpath monoid: keep the heavier operand, sum factors and counters on
/// ties. Back-propagated contributions that are not on a shortest path
/// arrive with a weight strictly below the stored distance and lose.
#[inline]
pub fn centpath_combine(x: Centpath, y: Centpath) -> Centpath {
    if x.w > y.w {
        x
    } else if x.w < y.w {
        y
    } else {
        Centpath { w: x.w, p: x.p + y.p, c: x.c + y.c }
    }
}

/// Bellman-Ford action: extend a path by an edge.
#[inline]
pub fn bf_action(a: Multpath, w: Weight) -> Multpath {
    Multpath { w: a.w + w, m: a.m }
}

/// Brandes action: retract a path by an edge.
#[inline]
pub fn br_action(a: Centpath, w: Weight) -> Centpath {
    Centpath { w: Weight::raw(a.w.value() - w.value()), p: a.p, c: a.c }
}

#[inline]
fn tropical_add(a: Weight, w: Weight) -> Weight {
    a + w
}

#[inline]
fn tropical_min(x: Weight, y: Weight) -> Weight {
    if y < x {
        y
    } else {
        x
    }
}

/// An action `T x Weight -> T` paired with the monoid that reduces its
/// results. Function pointers keep the pair `Copy` and shareable across the
/// simulator's schedule slots.
pub struct Algebra<T> {
    pub action: fn(T, Weight) -> T,
    pub combine: fn(T, T) -> T,
}

impl<T> Clone for Algebra<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Algebra<T> {}

impl<T> fmt::Debug for Algebra<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra").finish_non_exhaustive()
    }
}

impl Algebra<Multpath> {
    pub fn bellman_ford() -> Self {
        Algebra { action: bf_action, combine: multpath_combine }
    }
}

impl Algebra<Centpath> {
    pub fn brandes() -> Self {
        Algebra { action: br_action, combine: centpath_combine }
    }
}

impl Algebra<Weight> {
    /// (min, +): plain shortest-distance relaxation.
    pub fn tropical() -> Self {
        Algebra { action: tropical_add, combine: tropical_min }
    }
}
