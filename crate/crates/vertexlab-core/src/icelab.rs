//! Brute-force six-vertex enumeration oracle on tiny tori.
//!
//! Purpose
//! - Enumerate every arrow configuration on the N×M torus (one orientation
//!   bit per edge), keep those satisfying the ice rule (two arrows in, two
//!   out at every vertex), and accumulate the partition function
//!   Z = Σ c^(number of crossing vertices), split by the conserved per-row
//!   up-arrow count.
//! - This module exists to be *trusted*: it is the oracle the transfer-matrix
//!   route is checked against, so simplicity and obviousness beat cleverness.
//!
//! Why this design
//! - Depth-first assignment row by row (all horizontal edges of a row, then
//!   its vertical edges) with early pruning: a vertex is checked the moment
//!   its last incident edge is assigned, so dead branches die high up the
//!   tree. Row 0's vertices close the torus and are checked at the leaves.
//! - Weights are accumulated as integer histograms of the c-exponent and
//!   evaluated only at the end: the enumeration itself is exact, and the
//!   histogram doubles as the coefficient list of Z as a polynomial in c.
//! - Work is split over the 2^N assignments of the first row of horizontal
//!   edges; partial histograms merge by integer addition, so the result is
//!   deterministic regardless of scheduling.
//!
//! Notes
//! - Orientation convention: horizontal bit 1 points east, vertical bit 1
//!   points north. A vertex is a crossing (c-type) exactly when its west and
//!   east edges disagree.

use crate::error::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Histogram of c-exponents, keyed by the conserved row imbalance
/// r = N/2 − (up arrows per row).
type RHistograms = BTreeMap<i32, BTreeMap<u32, u64>>;

/// Exact enumeration result: the partition function, its split by row
/// imbalance r, and the integer exponent histograms behind both.
#[derive(Clone, Debug)]
pub struct IceEnumeration {
    /// Columns N (sites per row).
    pub n_cols: u32,
    /// Rows M.
    pub n_rows: u32,
    /// Crossing weight c the polynomial was evaluated at.
    pub c: f64,
    /// Z = Σ over ice configurations of c^(crossing count).
    pub z: f64,
    /// Restriction of Z to configurations with N/2 − r up arrows per row.
    pub z_by_r: BTreeMap<i32, f64>,
    /// Coefficient list of Z as a polynomial in c: exponent ↦ multiplicity.
    pub histogram: BTreeMap<u32, u64>,
    /// The same coefficients split by row imbalance.
    pub histogram_by_r: RHistograms,
    /// Total number of ice configurations (Z at c = 1).
    pub ice_count: u64,
}

/// Classify the arrow pattern at one vertex from its four incident edge
/// bits (west, east, south, north; 1 = east/north). Returns the type index
/// 1–6 for the six ice patterns, `None` for the ten non-ice patterns.
///
/// Types 1–2 are the straight (a) vertices, 3–4 the other straight (b)
/// pair, 5–6 the crossings weighted by c.
pub fn vertex_type(w: bool, e: bool, s: bool, n: bool) -> Option<u8> {
    match (w, e, s, n) {
        (true, true, true, true) => Some(1),
        (false, false, false, false) => Some(2),
        (true, true, false, false) => Some(3),
        (false, false, true, true) => Some(4),
        (true, false, false, true) => Some(5),
        (false, true, true, false) => Some(6),
        _ => None,
    }
}

/// Ice rule at a vertex: in-flow equals out-flow, i.e. w + s = e + n.
fn ice_ok(w: bool, e: bool, s: bool, n: bool) -> bool {
    (u8::from(w) + u8::from(s)) == (u8::from(e) + u8::from(n))
}

struct Grid {
    n: usize,
    m: usize,
    /// h[j][i]: edge from (i,j) east to (i+1,j); true = points east.
    h: Vec<Vec<bool>>,
    /// v[j][i]: edge from (i,j) north to (i,j+1); true = points north.
    v: Vec<Vec<bool>>,
}

impl Grid {
    fn vertex_bits(&self, i: usize, j: usize) -> (bool, bool, bool, bool) {
        let w = self.h[j][(i + self.n - 1) % self.n];
        let e = self.h[j][i];
        let s = self.v[(j + self.m - 1) % self.m][i];
        let n = self.v[j][i];
        (w, e, s, n)
    }
}

/// Record one complete ice configuration into the histograms.
fn record(grid: &Grid, out: &mut RHistograms) {
    let (n, m) = (grid.n, grid.m);
    let mut crossings = 0u32;
    for j in 0..m {
        let mut row_crossings = 0u32;
        for i in 0..n {
            let (w, e, s, bn) = grid.vertex_bits(i, j);
            let t = vertex_type(w, e, s, bn).expect("leaf reached with a non-ice vertex");
            if t >= 5 {
                row_crossings += 1;
            }
        }
        // Walking once around a row, the horizontal orientation flips an
        // even number of times, so each row's crossing count is even.
        assert!(row_crossings.is_multiple_of(2), "odd crossing count in row {j}");
        crossings += row_crossings;
    }
    let ups: usize = (0..n).filter(|&i| grid.v[0][i]).count();
    // The ice rule conserves the up count from row to row.
    for j in 1..m {
        let u: usize = (0..n).filter(|&i| grid.v[j][i]).count();
        assert_eq!(u, ups, "up-arrow count not conserved at row {j}");
    }
    let r = (n as i32) / 2 - (ups as i32);
    *out.entry(r).or_default().entry(crossings).or_insert(0) += 1;
}

/// Assign edge slots depth-first in row-major order (horizontals of row j,
/// then verticals of row j), pruning on every vertex whose four edges are
/// complete. `slot` counts assigned edges; row 0's vertices need the last
/// row's verticals and are checked in `record`.
fn search(grid: &mut Grid, slot: usize, out: &mut RHistograms) {
    let (n, m) = (grid.n, grid.m);
    if slot == 2 * n * m {
        // Close the torus: row-0 vertices see the final row's verticals.
        for i in 0..n {
            let (w, e, s, bn) = grid.vertex_bits(i, 0);
            if !ice_ok(w, e, s, bn) {
                return;
            }
        }
        record(grid, out);
        return;
    }
    let j = slot / (2 * n);
    let k = slot % (2 * n);
    for bit in [false, true] {
        if k < n {
            grid.h[j][k] = bit;
            search(grid, slot + 1, out);
        } else {
            let i = k - n;
            grid.v[j][i] = bit;
            // Vertex (i, j) just completed, unless it sits in row 0 whose
            // south edges arrive only at the very end.
            if j >= 1 {
                let (w, e, s, bn) = grid.vertex_bits(i, j);
                if !ice_ok(w, e, s, bn) {
                    continue;
                }
            }
            search(grid, slot + 1, out);
        }
    }
}

/// Enumerate all ice configurations on the N×M torus and evaluate
/// Z(c) with its split by row imbalance. N, M must be even and the raw
/// search space is capped at 2NM ≤ 24 edge bits.
pub fn enumerate(n_cols: u32, n_rows: u32, c: f64) -> Result<IceEnumeration> {
    if n_cols == 0 || n_rows == 0 || !n_cols.is_multiple_of(2) || !n_rows.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "torus sides must be positive and even, got {n_cols}×{n_rows}"
        )));
    }
    if 2 * n_cols * n_rows > 24 {
        return Err(Error::BudgetExceeded(format!(
            "2NM = {} edge bits exceeds the 24-bit oracle budget",
            2 * n_cols * n_rows
        )));
    }
    assert!(c.is_finite() && c > 0.0, "crossing weight must be positive");
    let n = n_cols as usize;
    let m = n_rows as usize;

    // Split over the 2^N assignments of row 0's horizontal edges.
    let merged: RHistograms = (0u32..(1 << n))
        .into_par_iter()
        .map(|seed| {
            let mut grid = Grid {
                n,
                m,
                h: vec![vec![false; n]; m],
                v: vec![vec![false; n]; m],
            };
            for i in 0..n {
                grid.h[0][i] = (seed >> i) & 1 == 1;
            }
            let mut local = RHistograms::new();
            search(&mut grid, n, &mut local);
            local
        })
        .reduce(RHistograms::new, |mut a, b| {
            for (r, hist) in b {
                let slot = a.entry(r).or_default();
                for (expo, count) in hist {
                    *slot.entry(expo).or_insert(0) += count;
                }
            }
            a
        });

    let eval = |hist: &BTreeMap<u32, u64>| -> f64 {
        hist.iter()
            .map(|(&expo, &count)| (count as f64) * c.powi(expo as i32))
            .sum()
    };
    let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
    let mut z_by_r = BTreeMap::new();
    let mut ice_count = 0u64;
    for (&r, hist) in &merged {
        z_by_r.insert(r, eval(hist));
        for (&expo, &count) in hist {
            *histogram.entry(expo).or_insert(0) += count;
            ice_count += count;
        }
    }
    Ok(IceEnumeration {
        n_cols,
        n_rows,
        c,
        z: eval(&histogram),
        z_by_r,
        histogram,
        histogram_by_r: merged,
        ice_count,
    })
}
