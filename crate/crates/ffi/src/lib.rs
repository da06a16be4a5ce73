//! C interface to the `mfbc` library.
//!
//! Graphs live behind an opaque [`MfbcGraph`] handle. Every fallible call
//! returns an [`MfbcStatus`]; on failure, [`mfbc_last_error_message`] holds
//! a description until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mfbc::costmodel::{mfbc_bound, optimize_grid, CostEstimate, Operand, Variant, Variant2D};
use mfbc::graphgen::{Edge, Graph};
use mfbc::mfbc::mfbc;
use mfbc::oracle::brandes;

/// Opaque graph handle.
pub struct MfbcGraph {
    graph: Graph,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfbcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    ComputationFailed = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfbcOperand {
    A = 0,
    B = 1,
    C = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfbcPairing {
    AB = 0,
    AC = 1,
    BC = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MfbcCost {
    pub messages: f64,
    pub words: f64,
    pub seconds: f64,
}

/// Chosen grid and variant. `dimensions` is 1, 2 or 3; `outer` is
/// meaningful for 1 and 3, `pairing` for 2 and 3.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfbcGridChoice {
    pub p1: usize,
    pub p2: usize,
    pub p3: usize,
    pub dimensions: u32,
    pub outer: MfbcOperand,
    pub pairing: MfbcPairing,
    pub cost: MfbcCost,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: MfbcStatus, message: impl Into<String>) -> MfbcStatus {
    set_error(message);
    status
}

fn guarded(body: impl FnOnce() -> MfbcStatus) -> MfbcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(MfbcStatus::Panic, "internal panic"))
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn mfbc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a graph on `n` vertices from `m` edges `(u[i], v[i])`.
/// `weights` may be null for an unweighted graph. Self-loops and repeated
/// edges are dropped. Release the handle with [`mfbc_graph_free`].
///
/// # Safety
/// `u` and `v` (and `weights` when non-null) must point to `m` readable
/// elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfbc_graph_new(
    n: usize,
    directed: bool,
    u: *const usize,
    v: *const usize,
    weights: *const f64,
    m: usize,
    out: *mut *mut MfbcGraph,
) -> MfbcStatus {
    guarded(|| {
        if out.is_null() || (m > 0 && (u.is_null() || v.is_null())) {
            return fail(MfbcStatus::NullPointer, "null argument");
        }
        let (us, vs) = if m == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(u, m), std::slice::from_raw_parts(v, m))
        };
        let ws = (!weights.is_null() && m > 0).then(|| std::slice::from_raw_parts(weights, m));
        let edges = (0..m).map(|i| Edge { u: us[i], v: vs[i], w: ws.map_or(1.0, |w| w[i]) });
        match Graph::from_edges_lenient(n, directed, ws.is_some(), edges) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(MfbcGraph { graph }));
                MfbcStatus::Ok
            }
            Err(e) => fail(MfbcStatus::InvalidGraph, e.to_string()),
        }
    })
}

/// Releases a handle from [`mfbc_graph_new`]. Null is ignored.
///
/// # Safety
/// `graph` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn mfbc_graph_free(graph: *mut MfbcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mfbc_graph_vertex_count(graph: *const MfbcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.n())
}

/// Number of stored edges after self-loops and repeats were dropped.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mfbc_graph_edge_count(graph: *const MfbcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.m())
}

unsafe fn score_target<'a>(graph: *const MfbcGraph, scores: *mut f64, len: usize) -> Result<(&'a Graph, &'a mut [f64]), MfbcStatus> {
    let Some(g) = graph.as_ref() else {
        return Err(fail(MfbcStatus::NullPointer, "null graph"));
    };
    if scores.is_null() {
        return Err(fail(MfbcStatus::NullPointer, "null score buffer"));
    }
    if len < g.graph.n() {
        return Err(fail(MfbcStatus::BufferTooSmall, format!("score buffer holds {len} values, graph has {}", g.graph.n())));
    }
    Ok((&g.graph, std::slice::from_raw_parts_mut(scores, g.graph.n())))
}

/// Betweenness of every vertex, written to `scores[0..n]`. `batch_size`
/// of 0 processes all sources in one batch.
///
/// # Safety
/// `graph` must be a live handle and `scores` must have room for `len`
/// values.
#[no_mangle]
pub unsafe extern "C" fn mfbc_betweenness(graph: *const MfbcGraph, batch_size: usize, scores: *mut f64, len: usize) -> MfbcStatus {
    guarded(|| {
        let (g, out) = match score_target(graph, scores, len) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if g.n() == 0 {
            return MfbcStatus::Ok;
        }
        let n_b = if batch_size == 0 { g.n() } else { batch_size.min(g.n()) };
        match mfbc(&g.adjacency(), n_b) {
            Ok(run) => {
                out.copy_from_slice(run.scores.as_slice());
                MfbcStatus::Ok
            }
            Err(e) => fail(MfbcStatus::ComputationFailed, e.to_string()),
        }
    })
}

/// Betweenness from the queue-based reference implementation.
///
/// # Safety
/// Same as [`mfbc_betweenness`].
#[no_mangle]
pub unsafe extern "C" fn mfbc_betweenness_reference(graph: *const MfbcGraph, scores: *mut f64, len: usize) -> MfbcStatus {
    guarded(|| match score_target(graph, scores, len) {
        Ok((g, out)) => {
            out.copy_from_slice(&brandes(g));
            MfbcStatus::Ok
        }
        Err(s) => s,
    })
}

fn to_cost(w: CostEstimate, alpha: f64, beta: f64) -> MfbcCost {
    MfbcCost { messages: w.messages, words: w.words, seconds: w.seconds(alpha, beta) }
}

/// Communication bound of batched betweenness on `p` processors with
/// replication `c` for a graph with `n` vertices, `m` edges and diameter
/// `d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfbc_cost_bound(n: f64, m: f64, p: usize, c: f64, d: f64, alpha: f64, beta: f64, out: *mut MfbcCost) -> MfbcStatus {
    guarded(|| {
        let Some(out) = out.as_mut() else {
            return fail(MfbcStatus::NullPointer, "null output");
        };
        match mfbc_bound(n, m, p, c, d) {
            Ok(w) => {
                *out = to_cost(w, alpha, beta);
                MfbcStatus::Ok
            }
            Err(e) => fail(MfbcStatus::InvalidArgument, e.to_string()),
        }
    })
}

fn operand(x: Operand) -> MfbcOperand {
    match x {
        Operand::A => MfbcOperand::A,
        Operand::B => MfbcOperand::B,
        Operand::C => MfbcOperand::C,
    }
}

fn pairing(yz: Variant2D) -> MfbcPairing {
    match yz {
        Variant2D::AB => MfbcPairing::AB,
        Variant2D::AC => MfbcPairing::AC,
        Variant2D::BC => MfbcPairing::BC,
    }
}

/// Cheapest grid and multiply variant for operands with the given nonzero
/// counts on `p` processors.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mfbc_optimize_grid(
    nnz_a: f64,
    nnz_b: f64,
    nnz_c: f64,
    p: usize,
    alpha: f64,
    beta: f64,
    out: *mut MfbcGridChoice,
) -> MfbcStatus {
    guarded(|| {
        let Some(out) = out.as_mut() else {
            return fail(MfbcStatus::NullPointer, "null output");
        };
        let best = match optimize_grid(nnz_a, nnz_b, nnz_c, p, alpha, beta) {
            Ok(b) => b,
            Err(e) => return fail(MfbcStatus::InvalidArgument, e.to_string()),
        };
        let (dimensions, outer, pair) = match best.variant {
            Variant::OneD(x) => (1, operand(x), MfbcPairing::AB),
            Variant::TwoD(yz) => (2, MfbcOperand::A, pairing(yz)),
            Variant::ThreeD(x, yz) => (3, operand(x), pairing(yz)),
        };
        *out = MfbcGridChoice {
            p1: best.grid.p1,
            p2: best.grid.p2,
            p3: best.grid.p3,
            dimensions,
            outer,
            pairing: pair,
            cost: to_cost(best.cost, alpha, beta),
        };
        MfbcStatus::Ok
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mfbc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
