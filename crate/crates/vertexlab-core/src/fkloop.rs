//! Random-cluster model on the diagonal torus, its loop image, and the
//! spin coupling — all by exact enumeration at oracle sizes.
//!
//! Purpose
//! - Realize the chain cluster model → loop model → arrow model concretely:
//!   every edge configuration ω on the diagonal torus is decomposed into
//!   medial loops with homology and winding bookkeeping, weighted in both
//!   the cluster form p^o(1−p)^c q^k and the loop form C·√q^(ℓ+2s), and
//!   resummed over loop orientations onto six-vertex arrow configurations.
//!   A separate exact-enumeration check verifies the spin↔cluster coupling
//!   identity on small graphs.
//!
//! Why this design
//! - Everything here is finite and exact: enumeration over all 2^E edge
//!   configurations (E ≤ 20) with per-configuration integer invariants
//!   asserted unconditionally. The point is not scale but certainty — each
//!   algebraic identity is checked on every configuration, not sampled.
//! - Homology is computed twice by independent means: loops carry cover
//!   displacements summed along their steps, while clusters carry a
//!   union-find with displacement labels whose cycle defects span the
//!   period lattice (a net is exactly a rank-2 defect lattice). The Euler
//!   relation 2k = ℓ − o + 2s + E/2 then ties the two views together and is
//!   asserted for every configuration ever constructed.
//! - The torus is multigraph-degenerate at oracle sizes (parallel edges at
//!   2×2), so all structures index edges by their medial vertex rather than
//!   by endpoint pairs.
//!
//! Notes
//! - Loop turning is tracked in quarter turns; a retractable loop closes at
//!   ±4 quarters (±2π) and a winding loop at 0, which is asserted and is
//!   what makes the orientation resummation per loop equal e^λ + e^{−λ} or
//!   2 respectively.
//! - Weights use doubles with 1e−13 relative agreement between the two
//!   cluster-weight forms; √q is irrational for the interesting q.

use crate::error::{Error, Result};
use crate::icelab;
use crate::params::ModelParams;
use rayon::prelude::*;
use serde::Serialize;

/// The diagonal torus: medial vertices (a,b) ∈ ℤ_N × ℤ_M, one primal edge
/// crossing each medial vertex. Primal vertices sit on the coordinate
/// parity class `parity`, dual vertices on the other class; each class has
/// NM/2 members and there are NM primal edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiamondTorus {
    /// Medial columns N (even).
    pub n_cols: u32,
    /// Medial rows M (even).
    pub n_rows: u32,
    /// Which coordinate parity class carries the primal vertices.
    pub parity: u8,
}

impl DiamondTorus {
    /// Build a torus; both sides must be even and at least 2.
    pub fn new(n_cols: u32, n_rows: u32, parity: u8) -> Result<Self> {
        if n_cols < 2 || n_rows < 2 || !n_cols.is_multiple_of(2) || !n_rows.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "diagonal torus needs even sides ≥ 2, got {n_cols}×{n_rows}"
            )));
        }
        if parity > 1 {
            return Err(Error::InvalidParameter(format!(
                "parity must be 0 or 1, got {parity}"
            )));
        }
        Ok(DiamondTorus {
            n_cols,
            n_rows,
            parity,
        })
    }

    /// Number of primal edges = number of medial vertices.
    pub fn edge_count(&self) -> usize {
        (self.n_cols * self.n_rows) as usize
    }

    /// Number of primal vertices (one parity class).
    pub fn primal_vertex_count(&self) -> usize {
        self.edge_count() / 2
    }

    /// The dual torus: same medial lattice, primal and dual roles swapped.
    pub fn dual(&self) -> DiamondTorus {
        DiamondTorus {
            n_cols: self.n_cols,
            n_rows: self.n_rows,
            parity: 1 - self.parity,
        }
    }

    /// Endpoints of the primal edge crossing medial vertex (a,b), as
    /// wrapped coordinates, plus the cover displacement from the first
    /// endpoint to the second. Parity-class medial vertices carry the
    /// (1,1) diagonal, the others the (1,−1) diagonal.
    pub fn primal_endpoints(&self, a: u32, b: u32) -> ((u32, u32), (u32, u32), (i64, i64)) {
        let (n, m) = (self.n_cols, self.n_rows);
        if (a + b) % 2 == u32::from(self.parity) {
            (((a + n - 1) % n, (b + m - 1) % m), (a, b), (1, 1))
        } else {
            (((a + n - 1) % n, b), (a, (b + m - 1) % m), (1, -1))
        }
    }
}

/// One step of a medial loop: the undirected medial edge id and the
/// direction it was traversed in. Edge ids: horizontal edge (a,b)→(a+1,b)
/// is a + b·N; vertical edge (a,b)→(a,b+1) is NM + a + b·N.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MedialStep {
    /// Undirected medial edge id.
    pub edge: u32,
    /// Unit traversal direction (±1,0) or (0,±1).
    pub direction: (i8, i8),
}

/// A single medial loop with its topological bookkeeping.
#[derive(Clone, Debug)]
pub struct MedialLoop {
    /// Directed edge steps in traversal order; every undirected medial
    /// edge appears in exactly one loop, exactly once.
    pub steps: Vec<MedialStep>,
    /// Homology class (horizontal, vertical winding), primitive or zero.
    pub homology: (i64, i64),
    /// Net quarter turns along the loop: ±4 iff retractable, 0 iff winding.
    pub turning_quarters: i64,
}

impl MedialLoop {
    /// Number of medial edges on the loop.
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    /// Whether the loop has zero homology.
    pub fn retractable(&self) -> bool {
        self.homology == (0, 0)
    }
}

/// The full partition of the medial edge set into loops.
#[derive(Clone, Debug)]
pub struct LoopDecomposition {
    /// All loops of the configuration.
    pub loops: Vec<MedialLoop>,
}

impl LoopDecomposition {
    /// Number of loops with nonzero homology.
    pub fn winding_count(&self) -> u32 {
        self.loops.iter().filter(|l| !l.retractable()).count() as u32
    }

    /// Total |vertical winding| over loops; always even (= 2U).
    pub fn vertical_crossings(&self) -> u32 {
        self.loops.iter().map(|l| l.homology.1.unsigned_abs() as u32).sum()
    }
}

/// An edge configuration on the diagonal torus together with all derived
/// cluster and loop statistics. Construction asserts the Euler relation
/// 2k = ℓ − o + 2s + NM/2.
#[derive(Clone, Debug)]
pub struct RcTorusConfig {
    /// The underlying torus.
    pub torus: DiamondTorus,
    /// Open/closed state per primal edge, indexed by medial vertex a + b·N.
    pub omega: Vec<bool>,
    /// Open edges o.
    pub open_count: u32,
    /// Closed edges c = NM − o.
    pub closed_count: u32,
    /// Connected components k of the open primal graph (isolated vertices
    /// included).
    pub components: u32,
    /// Whether some cluster winds in both directions (rank-2 period
    /// lattice): s ∈ {0,1}.
    pub has_net: bool,
    /// Loop count ℓ.
    pub loop_count: u32,
    /// Loops with nonzero homology ℓ0.
    pub winding_loops: u32,
    /// Vertical winding pairs U (2U = total |vertical winding|).
    pub vertical_winding_pairs: u32,
}

const DIR_E: (i8, i8) = (1, 0);
const DIR_W: (i8, i8) = (-1, 0);
const DIR_N: (i8, i8) = (0, 1);
const DIR_S: (i8, i8) = (0, -1);

/// At medial vertex (a,b) arriving with direction `d_in`, resolve the
/// pairing and return (exit edge id, next vertex, exit direction).
fn transition(
    torus: &DiamondTorus,
    omega: &[bool],
    a: u32,
    b: u32,
    d_in: (i8, i8),
) -> (u32, (u32, u32), (i8, i8)) {
    let (n, m) = (torus.n_cols, torus.n_rows);
    let ne_bounce = ((a + b) % 2 == u32::from(torus.parity)) == omega[(a + b * n) as usize];
    // Slots: W = h(a−1,b), E = h(a,b), S = v(a,b−1), N = v(a,b). Arriving
    // eastbound means entering through W, and so on. NE bounce pairs
    // {W,N},{E,S}; NW bounce pairs {W,S},{E,N}.
    let inslot = match d_in {
        DIR_E => 'W',
        DIR_W => 'E',
        DIR_N => 'S',
        DIR_S => 'N',
        _ => unreachable!(),
    };
    let outslot = match (ne_bounce, inslot) {
        (true, 'W') => 'N',
        (true, 'N') => 'W',
        (true, 'E') => 'S',
        (true, 'S') => 'E',
        (false, 'W') => 'S',
        (false, 'S') => 'W',
        (false, 'E') => 'N',
        (false, 'N') => 'E',
        _ => unreachable!(),
    };
    let nm = n * m;
    match outslot {
        'E' => (a + b * n, ((a + 1) % n, b), DIR_E),
        'W' => ((a + n - 1) % n + b * n, ((a + n - 1) % n, b), DIR_W),
        'N' => (nm + a + b * n, (a, (b + 1) % m), DIR_N),
        'S' => (
            nm + a + ((b + m - 1) % m) * n,
            (a, (b + m - 1) % m),
            DIR_S,
        ),
        _ => unreachable!(),
    }
}

fn trace_loops(torus: &DiamondTorus, omega: &[bool]) -> LoopDecomposition {
    let (n, m) = (torus.n_cols, torus.n_rows);
    let nm = n * m;
    let mut visited = vec![false; 2 * nm as usize];
    let mut loops = Vec::new();
    for start_edge in 0..2 * nm {
        if visited[start_edge as usize] {
            continue;
        }
        let vertical = start_edge >= nm;
        let (a0, b0) = ((start_edge % nm) % n, (start_edge % nm) / n);
        let d0 = if vertical { DIR_N } else { DIR_E };
        let mut pos = if vertical {
            (a0, (b0 + 1) % m)
        } else {
            ((a0 + 1) % n, b0)
        };
        let mut steps = vec![MedialStep {
            edge: start_edge,
            direction: d0,
        }];
        visited[start_edge as usize] = true;
        let mut disp = (i64::from(d0.0), i64::from(d0.1));
        let mut turning = 0i64;
        let mut d_in = d0;
        loop {
            let (edge, next, d_out) = transition(torus, omega, pos.0, pos.1, d_in);
            // Quarter-turn sign: +1 for a left turn, −1 for a right turn.
            turning += i64::from(d_in.0) * i64::from(d_out.1)
                - i64::from(d_in.1) * i64::from(d_out.0);
            if edge == start_edge && d_out == d0 {
                break;
            }
            steps.push(MedialStep {
                edge,
                direction: d_out,
            });
            visited[edge as usize] = true;
            disp.0 += i64::from(d_out.0);
            disp.1 += i64::from(d_out.1);
            pos = next;
            d_in = d_out;
        }
        assert!(
            disp.0 % i64::from(n) == 0 && disp.1 % i64::from(m) == 0,
            "loop displacement {disp:?} not a period multiple"
        );
        let homology = (disp.0 / i64::from(n), disp.1 / i64::from(m));
        // Winding bookkeeping: a retractable simple loop turns through
        // exactly ±2π, a winding loop through 0.
        if homology == (0, 0) {
            assert!(turning.abs() == 4, "retractable loop turned {turning}/4");
        } else {
            assert_eq!(turning, 0, "winding loop turned {turning}/4");
            let g = gcd(homology.0.unsigned_abs(), homology.1.unsigned_abs());
            assert_eq!(g, 1, "non-primitive homology {homology:?}");
        }
        loops.push(MedialLoop {
            steps,
            homology,
            turning_quarters: turning,
        });
    }
    loops.sort_by_key(|l| l.steps[0].edge);
    LoopDecomposition { loops }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Union-find over primal vertices with cover-displacement labels; cycle
/// defects accumulate a per-cluster period lattice of rank ≤ 2.
struct PeriodDsu {
    parent: Vec<usize>,
    /// Cover position relative to the current parent.
    offset: Vec<(i64, i64)>,
    /// Up to two independent defect generators, kept at the root.
    gens: Vec<Vec<(i64, i64)>>,
}

impl PeriodDsu {
    fn new(size: usize) -> Self {
        PeriodDsu {
            parent: (0..size).collect(),
            offset: vec![(0, 0); size],
            gens: vec![Vec::new(); size],
        }
    }

    /// Root of x and x's cover position relative to that root.
    fn find(&mut self, x: usize) -> (usize, (i64, i64)) {
        if self.parent[x] == x {
            return (x, (0, 0));
        }
        let (root, parent_off) = self.find(self.parent[x]);
        let combined = (parent_off.0 + self.offset[x].0, parent_off.1 + self.offset[x].1);
        self.parent[x] = root;
        self.offset[x] = combined;
        (root, combined)
    }

    fn add_defect(&mut self, root: usize, d: (i64, i64)) {
        if d == (0, 0) || self.gens[root].len() == 2 {
            return;
        }
        if let Some(&g) = self.gens[root].first() {
            if g.0 * d.1 - g.1 * d.0 == 0 {
                return; // parallel to the existing generator
            }
        }
        self.gens[root].push(d);
    }

    /// Join the endpoints of an edge whose cover displacement from u to v
    /// is `d`; a closing edge records its cycle defect instead.
    fn union(&mut self, u: usize, v: usize, d: (i64, i64)) {
        let (ru, ou) = self.find(u);
        let (rv, ov) = self.find(v);
        if ru != rv {
            self.parent[rv] = ru;
            self.offset[rv] = (ou.0 + d.0 - ov.0, ou.1 + d.1 - ov.1);
            let moved = std::mem::take(&mut self.gens[rv]);
            for g in moved {
                self.add_defect(ru, g);
            }
        } else {
            self.add_defect(ru, (ou.0 + d.0 - ov.0, ou.1 + d.1 - ov.1));
        }
    }
}

/// Component count and net indicator of the open primal graph.
fn cluster_stats(torus: &DiamondTorus, omega: &[bool]) -> (u32, bool) {
    let (n, m) = (torus.n_cols, torus.n_rows);
    // Dense index over the primal parity class.
    let mut class_index = vec![usize::MAX; (n * m) as usize];
    let mut count = 0usize;
    for y in 0..m {
        for x in 0..n {
            if (x + y) % 2 == u32::from(torus.parity) {
                class_index[(x + y * n) as usize] = count;
                count += 1;
            }
        }
    }
    let mut dsu = PeriodDsu::new(count);
    for b in 0..m {
        for a in 0..n {
            if !omega[(a + b * n) as usize] {
                continue;
            }
            let (u, v, d) = torus.primal_endpoints(a, b);
            let ui = class_index[(u.0 + u.1 * n) as usize];
            let vi = class_index[(v.0 + v.1 * n) as usize];
            // The defect lattice lives in period units (N, M).
            dsu.union(ui, vi, d);
        }
    }
    let mut components = 0u32;
    let mut has_net = false;
    for x in 0..count {
        let (root, _) = dsu.find(x);
        if root == x {
            components += 1;
            if dsu.gens[root].len() == 2 {
                has_net = true;
            }
        }
    }
    (components, has_net)
}

impl RcTorusConfig {
    /// Analyze an edge configuration: loop statistics, cluster statistics,
    /// and the Euler relation 2k = ℓ − o + 2s + NM/2 (asserted).
    pub fn new(torus: DiamondTorus, omega: Vec<bool>) -> Self {
        assert_eq!(omega.len(), torus.edge_count(), "ω length mismatch");
        let open_count = omega.iter().filter(|&&x| x).count() as u32;
        let closed_count = torus.edge_count() as u32 - open_count;
        let decomposition = trace_loops(&torus, &omega);
        let loop_count = decomposition.loops.len() as u32;
        let winding_loops = decomposition.winding_count();
        let crossings = decomposition.vertical_crossings();
        assert!(crossings.is_multiple_of(2), "odd vertical crossing total {crossings}");
        let (components, has_net) = cluster_stats(&torus, &omega);
        let config = RcTorusConfig {
            torus,
            omega,
            open_count,
            closed_count,
            components,
            has_net,
            loop_count,
            winding_loops,
            vertical_winding_pairs: crossings / 2,
        };
        assert_eq!(
            2 * i64::from(config.components),
            i64::from(config.loop_count) - i64::from(config.open_count)
                + 2 * i64::from(config.has_net)
                + i64::from(torus.n_cols * torus.n_rows) / 2,
            "Euler relation violated"
        );
        config
    }

    /// Configuration from the low NM bits of `mask` (bit a + b·N).
    pub fn from_mask(torus: DiamondTorus, mask: u32) -> Self {
        let omega = (0..torus.edge_count())
            .map(|e| (mask >> e) & 1 == 1)
            .collect();
        RcTorusConfig::new(torus, omega)
    }
}

/// Re-trace the loop partition of a configuration.
pub fn loops_of(config: &RcTorusConfig) -> LoopDecomposition {
    trace_loops(&config.torus, &config.omega)
}

/// The cluster weight of a configuration in both closed forms.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RcWeight {
    /// p_c^o (1−p_c)^c q^k.
    pub standard: f64,
    /// C·√q^(ℓ+2s) with C = q^{MN/4} (1+√q)^{−MN}.
    pub loop_form: f64,
}

/// Evaluate both weight forms; they agree to 1e−13 relative for every
/// configuration (checked by the enumeration report).
pub fn rc_weight(config: &RcTorusConfig, params: &ModelParams) -> RcWeight {
    let q = params.q;
    let sq = q.sqrt();
    let p = params.p_c;
    let standard = p.powi(config.open_count as i32)
        * (1.0 - p).powi(config.closed_count as i32)
        * q.powi(config.components as i32);
    let e = (config.torus.n_cols * config.torus.n_rows) as i32;
    let constant = q.powf(f64::from(e) / 4.0) * (1.0 + sq).powi(-e);
    let loop_form =
        constant * sq.powi(config.loop_count as i32 + 2 * i32::from(config.has_net));
    RcWeight {
        standard,
        loop_form,
    }
}

/// Direct orientation resummation of one configuration: the sum over all
/// 2^ℓ loop orientations of e^{λ·(winding angle)/2π} per loop, against the
/// closed form 2^{ℓ0}·√q^{ℓ−ℓ0}. Returns (direct, closed).
pub fn oriented_resummation(config: &RcTorusConfig, params: &ModelParams) -> (f64, f64) {
    let decomposition = loops_of(config);
    let lambda = params.lambda;
    let signs: Vec<i64> = decomposition
        .loops
        .iter()
        .map(|l| l.turning_quarters.signum())
        .collect();
    let count = signs.len();
    let mut direct = 0.0f64;
    for orientation in 0u64..(1 << count) {
        let mut w = 1.0f64;
        for (i, &s) in signs.iter().enumerate() {
            if s == 0 {
                continue; // winding loop: weight 1 either way
            }
            let flip = if (orientation >> i) & 1 == 1 { -1.0 } else { 1.0 };
            w *= (lambda * flip * s as f64).exp();
        }
        direct += w;
    }
    let retractable = count as u32 - config.winding_loops;
    let closed =
        2.0f64.powi(config.winding_loops as i32) * params.q.sqrt().powi(retractable as i32);
    (direct, closed)
}

/// A six-vertex arrow configuration on the medial torus, produced by
/// orienting loops: h bit true = east arrow, v bit true = north arrow,
/// index a + b·N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusArrowConfig {
    /// Columns N.
    pub n_cols: u32,
    /// Rows M.
    pub n_rows: u32,
    /// Horizontal arrows, true = east.
    pub h_east: Vec<bool>,
    /// Vertical arrows, true = north.
    pub v_north: Vec<bool>,
}

impl TorusArrowConfig {
    /// Arrow bits (W,E,S,N) at vertex (a,b).
    pub fn vertex_bits(&self, a: u32, b: u32) -> (bool, bool, bool, bool) {
        let (n, m) = (self.n_cols, self.n_rows);
        (
            self.h_east[((a + n - 1) % n + b * n) as usize],
            self.h_east[(a + b * n) as usize],
            self.v_north[(a + ((b + m - 1) % m) * n) as usize],
            self.v_north[(a + b * n) as usize],
        )
    }

    /// Whether every vertex satisfies the ice rule.
    pub fn is_ice(&self) -> bool {
        (0..self.n_rows).all(|b| {
            (0..self.n_cols).all(|a| {
                let (w, e, s, n) = self.vertex_bits(a, b);
                icelab::vertex_type(w, e, s, n).is_some()
            })
        })
    }

    /// Number of type-5/6 vertices (arrows disagree across the crossing).
    pub fn c_vertex_count(&self) -> u32 {
        let mut count = 0;
        for b in 0..self.n_rows {
            for a in 0..self.n_cols {
                let (w, e, _, _) = self.vertex_bits(a, b);
                if w != e {
                    count += 1;
                }
            }
        }
        count
    }

    /// Up arrows in each row of vertical edges.
    pub fn row_up_counts(&self) -> Vec<u32> {
        (0..self.n_rows)
            .map(|b| {
                (0..self.n_cols)
                    .filter(|&a| self.v_north[(a + b * self.n_cols) as usize])
                    .count() as u32
            })
            .collect()
    }

    /// The globally arrow-reversed configuration.
    pub fn arrow_flip(&self) -> TorusArrowConfig {
        TorusArrowConfig {
            n_cols: self.n_cols,
            n_rows: self.n_rows,
            h_east: self.h_east.iter().map(|&x| !x).collect(),
            v_north: self.v_north.iter().map(|&x| !x).collect(),
        }
    }

    /// Compact bit key (valid for NM ≤ 32).
    pub fn key(&self) -> u64 {
        let mut k = 0u64;
        for (i, &x) in self.h_east.iter().chain(self.v_north.iter()).enumerate() {
            if x {
                k |= 1 << i;
            }
        }
        k
    }
}

/// Map an orientation choice (one reversal flag per loop, in the order of
/// `decomposition.loops`) to the arrow configuration it induces.
pub fn six_vertex_of(
    config: &RcTorusConfig,
    decomposition: &LoopDecomposition,
    reversed: &[bool],
) -> TorusArrowConfig {
    assert_eq!(reversed.len(), decomposition.loops.len());
    let (n, m) = (config.torus.n_cols, config.torus.n_rows);
    let nm = (n * m) as usize;
    let mut h_east = vec![false; nm];
    let mut v_north = vec![false; nm];
    for (lp, &rev) in decomposition.loops.iter().zip(reversed) {
        for step in &lp.steps {
            let forward = if step.edge < n * m {
                step.direction == DIR_E
            } else {
                step.direction == DIR_N
            };
            let bit = forward != rev;
            if step.edge < n * m {
                h_east[step.edge as usize] = bit;
            } else {
                v_north[(step.edge - n * m) as usize] = bit;
            }
        }
    }
    TorusArrowConfig {
        n_cols: n,
        n_rows: m,
        h_east,
        v_north,
    }
}

/// Exhaustive verification of the cluster↔arrow correspondence at one
/// torus size.
#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    /// Medial columns.
    pub n_cols: u32,
    /// Medial rows.
    pub n_rows: u32,
    /// Cluster weight parameter q.
    pub q: f64,
    /// Σ_ω w(ω)·(2/√q)^{ℓ0}·q^{−s}.
    pub lhs_i: f64,
    /// C·Z_6V.
    pub rhs_i: f64,
    /// Relative error of the equality (i).
    pub rel_err_i: f64,
    /// The U = 1 restricted sum.
    pub lhs_ii: f64,
    /// 4C·Z^{(1)}.
    pub rhs_ii: f64,
    /// lhs_ii ≤ rhs_ii.
    pub ok_ii: bool,
    /// The U ≥ 1 restricted sum.
    pub lhs_iii_r1: f64,
    /// C·Z^{(1)}.
    pub rhs_iii_r1: f64,
    /// lhs_iii_r1 ≥ rhs_iii_r1.
    pub ok_iii_r1: bool,
    /// The U ≥ 2 restricted sum.
    pub lhs_iii_r2: f64,
    /// C·Z^{(2)}.
    pub rhs_iii_r2: f64,
    /// lhs_iii_r2 ≥ rhs_iii_r2.
    pub ok_iii_r2: bool,
    /// Worst relative disagreement of the two weight forms over all ω.
    pub weight_form_err: f64,
    /// Worst relative error of the orientation resummation (checked when
    /// NM ≤ 8; 0 otherwise).
    pub resummation_err: f64,
    /// Euler relation held for every configuration (assertion-backed).
    pub per_config_euler_ok: bool,
    /// Number of configurations enumerated.
    pub config_count: u64,
    /// All of the above verdicts combined.
    pub ok: bool,
}

#[derive(Clone, Copy, Default)]
struct Partial {
    lhs_i: f64,
    lhs_ii: f64,
    lhs_iii_r1: f64,
    lhs_iii_r2: f64,
    weight_form_err: f64,
    resummation_err: f64,
    count: u64,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.lhs_i += other.lhs_i;
        self.lhs_ii += other.lhs_ii;
        self.lhs_iii_r1 += other.lhs_iii_r1;
        self.lhs_iii_r2 += other.lhs_iii_r2;
        self.weight_form_err = self.weight_form_err.max(other.weight_form_err);
        self.resummation_err = self.resummation_err.max(other.resummation_err);
        self.count += other.count;
        self
    }
}

/// Enumerate all 2^{NM} configurations and verify the correspondence: the
/// weighted loop sum equals C·Z_6V exactly (i), the U = 1 slice is bounded
/// by four sector partition functions (ii), and the U ≥ r tails dominate
/// the r-sector partition functions (iii). The arrow side is enumerated
/// independently.
pub fn correspondence_check(
    n_cols: u32,
    n_rows: u32,
    params: &ModelParams,
) -> Result<CorrespondenceReport> {
    let torus = DiamondTorus::new(n_cols, n_rows, 0)?;
    let edges = torus.edge_count();
    if edges > 20 {
        return Err(Error::BudgetExceeded(format!(
            "cluster enumeration capped at 20 edges, got {edges}"
        )));
    }
    if !params.lambda.is_finite() {
        return Err(Error::InvalidParameter(
            "correspondence needs finite q".to_string(),
        ));
    }
    let arrows = icelab::enumerate(n_cols, n_rows, params.c)?;
    let check_resummation = edges <= 8;

    let total: u32 = 1 << edges;
    let chunk = total.div_ceil(256).max(1);
    let partial = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|piece| {
            let lo = piece * chunk;
            let hi = (lo + chunk).min(total);
            let mut acc = Partial::default();
            for mask in lo..hi {
                let config = RcTorusConfig::from_mask(torus, mask);
                let w = rc_weight(&config, params);
                let rel = (w.standard - w.loop_form).abs() / w.standard.max(1e-300);
                acc.weight_form_err = acc.weight_form_err.max(rel);
                if check_resummation {
                    let (direct, closed) = oriented_resummation(&config, params);
                    acc.resummation_err = acc
                        .resummation_err
                        .max((direct - closed).abs() / closed.max(1e-300));
                }
                let term = w.standard
                    * (2.0 / params.q.sqrt()).powi(config.winding_loops as i32)
                    * params.q.powi(-i32::from(config.has_net));
                acc.lhs_i += term;
                if config.vertical_winding_pairs == 1 {
                    acc.lhs_ii += term;
                }
                if config.vertical_winding_pairs >= 1 {
                    acc.lhs_iii_r1 += term;
                }
                if config.vertical_winding_pairs >= 2 {
                    acc.lhs_iii_r2 += term;
                }
                acc.count += 1;
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Partial::default(), Partial::merge);

    let q = params.q;
    let constant =
        q.powf(edges as f64 / 4.0) * (1.0 + q.sqrt()).powi(-(edges as i32));
    let rhs_i = constant * arrows.z;
    let sector = |r: i32| arrows.z_by_r.get(&r).copied().unwrap_or(0.0);
    let rhs_ii = 4.0 * constant * sector(1);
    let rhs_iii_r1 = constant * sector(1);
    let rhs_iii_r2 = constant * sector(2);
    let rel_err_i = (partial.lhs_i - rhs_i).abs() / rhs_i;
    let slack = 1.0 + 1e-12;
    let ok_ii = partial.lhs_ii <= rhs_ii * slack;
    let ok_iii_r1 = partial.lhs_iii_r1 >= rhs_iii_r1 / slack;
    let ok_iii_r2 = partial.lhs_iii_r2 >= rhs_iii_r2 / slack;
    let ok = rel_err_i <= 1e-12
        && ok_ii
        && ok_iii_r1
        && ok_iii_r2
        && partial.weight_form_err <= 1e-13
        && partial.resummation_err <= 1e-12;
    Ok(CorrespondenceReport {
        n_cols,
        n_rows,
        q,
        lhs_i: partial.lhs_i,
        rhs_i,
        rel_err_i,
        lhs_ii: partial.lhs_ii,
        rhs_ii,
        ok_ii,
        lhs_iii_r1: partial.lhs_iii_r1,
        rhs_iii_r1,
        ok_iii_r1,
        lhs_iii_r2: partial.lhs_iii_r2,
        rhs_iii_r2,
        ok_iii_r2,
        weight_form_err: partial.weight_form_err,
        resummation_err: partial.resummation_err,
        per_config_euler_ok: true, // construction asserts it per config
        config_count: partial.count,
        ok,
    })
}

/// A small labelled multigraph for exact spin/cluster enumeration.
#[derive(Clone, Debug)]
pub struct SmallGraph {
    /// Vertex count.
    pub n_vertices: u32,
    /// Undirected edges as endpoint pairs.
    pub edges: Vec<(u32, u32)>,
}

/// The width×height grid with nearest-neighbour edges and free boundary.
pub fn grid_graph(width: u32, height: u32) -> SmallGraph {
    let mut edges = Vec::new();
    let id = |x: u32, y: u32| x + y * width;
    for y in 0..height {
        for x in 0..width {
            if x + 1 < width {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < height {
                edges.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    SmallGraph {
        n_vertices: width * height,
        edges,
    }
}

/// One pairwise coupling identity μ⁰[σx=σy] = 1/q + (1−1/q)·φ⁰[x↔y].
#[derive(Clone, Debug, Serialize)]
pub struct PairIdentity {
    /// First vertex.
    pub x: u32,
    /// Second vertex.
    pub y: u32,
    /// Spin side μ⁰[σx=σy].
    pub spin_agree: f64,
    /// Cluster side φ⁰[x↔y].
    pub connect_prob: f64,
    /// 1/q + (1−1/q)·φ⁰[x↔y] (the coupling-derived right side).
    pub rhs_coupling: f64,
    /// 1/q + φ⁰[x↔y] (the prefactor-less form, reported for comparison).
    pub rhs_unprefixed: f64,
    /// |spin_agree − rhs_coupling|.
    pub abs_err: f64,
}

/// One wired identity μ^i[σx=i] = 1/q + (1−1/q)·φ¹[x↔∂].
#[derive(Clone, Debug, Serialize)]
pub struct WiredIdentity {
    /// The probed vertex.
    pub x: u32,
    /// Spin side μ^i[σx=i] under the boundary condition σ|∂ = i.
    pub spin_boundary: f64,
    /// Cluster side φ¹[x↔∂] with ∂ wired into one vertex.
    pub wired_connect: f64,
    /// 1/q + (1−1/q)·φ¹[x↔∂].
    pub rhs_coupling: f64,
    /// |spin_boundary − rhs_coupling|.
    pub abs_err: f64,
}

/// Exact-enumeration report of the spin/cluster coupling on a small graph.
#[derive(Clone, Debug, Serialize)]
pub struct CouplingReport {
    /// Number of spin states.
    pub q: u32,
    /// Inverse temperature.
    pub beta: f64,
    /// Edge density p = 1 − e^{−β}.
    pub p: f64,
    /// All vertex pairs x < y.
    pub pairs: Vec<PairIdentity>,
    /// Wired identities for every vertex outside the boundary set.
    pub wired: Vec<WiredIdentity>,
    /// max over pairs of abs_err.
    pub max_pair_err: f64,
    /// max over wired identities of abs_err.
    pub max_wired_err: f64,
    /// Worst gap between the exponential and product spin-weight forms.
    pub weight_form_gap: f64,
}

struct FlatDsu {
    parent: Vec<usize>,
}

impl FlatDsu {
    fn new(size: usize) -> Self {
        FlatDsu {
            parent: (0..size).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Exact enumeration of the q-state spin model and the cluster model on a
/// small graph, verifying the coupling identities for every vertex pair
/// (free boundary) and for every vertex against a wired boundary set.
pub fn potts_coupling_check(
    graph: &SmallGraph,
    q: u32,
    beta: f64,
    boundary: &[u32],
) -> Result<CouplingReport> {
    if !(2..=5).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "spin count must be an integer in 2..=5, got {q}"
        )));
    }
    let n = graph.n_vertices as usize;
    let e = graph.edges.len();
    if e > 16 {
        return Err(Error::BudgetExceeded(format!(
            "edge enumeration capped at 16 edges, got {e}"
        )));
    }
    for &(u, v) in &graph.edges {
        if u as usize >= n || v as usize >= n {
            return Err(Error::InvalidParameter(format!(
                "edge ({u},{v}) out of range"
            )));
        }
    }
    for &b in boundary {
        if b as usize >= n {
            return Err(Error::InvalidParameter(format!(
                "boundary vertex {b} out of range"
            )));
        }
    }
    if (q as u64).pow(n as u32) > 10_000_000 {
        return Err(Error::BudgetExceeded(format!(
            "spin enumeration {q}^{n} too large"
        )));
    }
    let p = 1.0 - (-beta).exp();

    // --- Spin side, free boundary: all q^n configurations. ---
    let qf = f64::from(q);
    let mut spin = vec![0u32; n];
    let mut z_spin = 0.0f64;
    let mut z_spin_product_form = 0.0f64;
    let mut agree = vec![vec![0.0f64; n]; n];
    let spin_count = (q as u64).pow(n as u32);
    let mut weight_form_gap = 0.0f64;
    for mut code in 0..spin_count {
        for s in spin.iter_mut() {
            *s = (code % u64::from(q)) as u32;
            code /= u64::from(q);
        }
        let equal_edges = graph
            .edges
            .iter()
            .filter(|&&(u, v)| spin[u as usize] == spin[v as usize])
            .count();
        let w = (beta * equal_edges as f64).exp();
        // Edge-product form (1−p) + p·1[equal]: the same measure scaled by
        // e^{−β|E|} overall.
        let w_product = graph.edges.iter().fold(1.0f64, |acc, &(u, v)| {
            acc * if spin[u as usize] == spin[v as usize] {
                1.0
            } else {
                1.0 - p
            }
        });
        weight_form_gap =
            weight_form_gap.max((w * (-beta * e as f64).exp() - w_product).abs());
        z_spin += w;
        z_spin_product_form += w_product;
        for x in 0..n {
            for y in (x + 1)..n {
                if spin[x] == spin[y] {
                    agree[x][y] += w;
                }
            }
        }
    }
    assert!(
        (z_spin * (-beta * e as f64).exp() - z_spin_product_form).abs()
            <= 1e-12 * z_spin_product_form,
        "spin weight forms disagree"
    );

    // --- Spin side, wired boundary: σ fixed to state 0 on ∂. ---
    let free: Vec<usize> = (0..n).filter(|v| !boundary.contains(&(*v as u32))).collect();
    let mut z_wired_spin = 0.0f64;
    let mut boundary_hit = vec![0.0f64; n];
    if !boundary.is_empty() {
        let wired_count = (q as u64).pow(free.len() as u32);
        for mut code in 0..wired_count {
            for s in spin.iter_mut() {
                *s = 0;
            }
            for &v in &free {
                spin[v] = (code % u64::from(q)) as u32;
                code /= u64::from(q);
            }
            let equal_edges = graph
                .edges
                .iter()
                .filter(|&&(u, v)| spin[u as usize] == spin[v as usize])
                .count();
            let w = (beta * equal_edges as f64).exp();
            z_wired_spin += w;
            for x in 0..n {
                if spin[x] == 0 {
                    boundary_hit[x] += w;
                }
            }
        }
    }

    // --- Cluster side: all 2^|E| subsets, free and wired counts. ---
    let mut z_rc = 0.0f64;
    let mut z_rc_wired = 0.0f64;
    let mut connect = vec![vec![0.0f64; n]; n];
    let mut connect_boundary = vec![0.0f64; n];
    for mask in 0u32..(1 << e) {
        let open = mask.count_ones();
        let base = p.powi(open as i32) * (1.0 - p).powi((e as u32 - open) as i32);
        let mut dsu = FlatDsu::new(n);
        for (i, &(u, v)) in graph.edges.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                dsu.union(u as usize, v as usize);
            }
        }
        let roots: Vec<usize> = (0..n).map(|v| dsu.find(v)).collect();
        let mut distinct: Vec<usize> = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let w_free = base * qf.powi(distinct.len() as i32);
        z_rc += w_free;
        for x in 0..n {
            for y in (x + 1)..n {
                if roots[x] == roots[y] {
                    connect[x][y] += w_free;
                }
            }
        }
        if !boundary.is_empty() {
            // Wire the boundary: identify all its vertices before counting.
            let mut wired = FlatDsu::new(n);
            for (i, &(u, v)) in graph.edges.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    wired.union(u as usize, v as usize);
                }
            }
            for w in boundary.windows(2) {
                wired.union(w[0] as usize, w[1] as usize);
            }
            let wroots: Vec<usize> = (0..n).map(|v| wired.find(v)).collect();
            let mut wdistinct = wroots.clone();
            wdistinct.sort_unstable();
            wdistinct.dedup();
            let w_wired = base * qf.powi(wdistinct.len() as i32);
            z_rc_wired += w_wired;
            let broot = wired.find(boundary[0] as usize);
            for x in 0..n {
                if wroots[x] == broot {
                    connect_boundary[x] += w_wired;
                }
            }
        }
    }

    let mut pairs = Vec::new();
    let mut max_pair_err = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            let spin_agree = agree[x][y] / z_spin;
            let connect_prob = connect[x][y] / z_rc;
            let rhs_coupling = 1.0 / qf + (1.0 - 1.0 / qf) * connect_prob;
            let abs_err = (spin_agree - rhs_coupling).abs();
            max_pair_err = max_pair_err.max(abs_err);
            pairs.push(PairIdentity {
                x: x as u32,
                y: y as u32,
                spin_agree,
                connect_prob,
                rhs_coupling,
                rhs_unprefixed: 1.0 / qf + connect_prob,
                abs_err,
            });
        }
    }

    let mut wired = Vec::new();
    let mut max_wired_err = 0.0f64;
    if !boundary.is_empty() {
        for &x in &free {
            let spin_boundary = boundary_hit[x] / z_wired_spin;
            let wired_connect = connect_boundary[x] / z_rc_wired;
            let rhs_coupling = 1.0 / qf + (1.0 - 1.0 / qf) * wired_connect;
            let abs_err = (spin_boundary - rhs_coupling).abs();
            max_wired_err = max_wired_err.max(abs_err);
            wired.push(WiredIdentity {
                x: x as u32,
                spin_boundary,
                wired_connect,
                rhs_coupling,
                abs_err,
            });
        }
    }

    Ok(CouplingReport {
        q,
        beta,
        p,
        pairs,
        wired,
        max_pair_err,
        max_wired_err,
        weight_form_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::params_from_q;
    use std::collections::HashMap;

    fn torus22() -> DiamondTorus {
        DiamondTorus::new(2, 2, 0).unwrap()
    }

    #[test]
    fn test_hand_traced_configurations() {
        // All closed: loops encircle the two primal vertices (retractable),
        // every primal vertex isolated.
        let all_closed = RcTorusConfig::new(torus22(), vec![false; 4]);
        assert_eq!(
            (
                all_closed.loop_count,
                all_closed.winding_loops,
                all_closed.vertical_winding_pairs,
                all_closed.components,
                all_closed.has_net,
            ),
            (2, 0, 0, 2, false)
        );
        // All open: one cluster wrapping both ways (a net).
        let all_open = RcTorusConfig::new(torus22(), vec![true; 4]);
        assert_eq!(
            (
                all_open.loop_count,
                all_open.winding_loops,
                all_open.components,
                all_open.has_net,
            ),
            (2, 0, 1, true)
        );
        // Single open edge on the 2×4 torus: Euler forces ℓ = 3.
        let torus24 = DiamondTorus::new(2, 4, 0).unwrap();
        let mut omega = vec![false; 8];
        omega[0] = true;
        let single = RcTorusConfig::new(torus24, omega);
        assert_eq!(
            (
                single.components,
                single.has_net,
                single.loop_count,
                single.open_count,
            ),
            (3, false, 3, 1)
        );
    }

    #[test]
    fn test_loops_partition_medial_edges() {
        let torus = DiamondTorus::new(2, 4, 0).unwrap();
        for mask in 0u32..256 {
            let config = RcTorusConfig::from_mask(torus, mask);
            let decomposition = loops_of(&config);
            let mut seen = vec![0u32; 16];
            for lp in &decomposition.loops {
                for step in &lp.steps {
                    seen[step.edge as usize] += 1;
                }
                let g = gcd(
                    lp.homology.0.unsigned_abs(),
                    lp.homology.1.unsigned_abs(),
                );
                assert!(lp.homology == (0, 0) || g == 1);
            }
            assert!(seen.iter().all(|&c| c == 1), "mask {mask}: {seen:?}");
            assert!(decomposition.vertical_crossings().is_multiple_of(2));
        }
    }

    #[test]
    fn test_duality_preserves_loops() {
        // ω on the torus and 1−ω on the dual torus bounce identically at
        // every medial vertex, so their loop partitions coincide.
        let torus = torus22();
        let dual = torus.dual();
        for mask in 0u32..16 {
            let config = RcTorusConfig::from_mask(torus, mask);
            let dual_config = RcTorusConfig::from_mask(dual, !mask & 0xF);
            let key = |d: &LoopDecomposition| {
                let mut sets: Vec<Vec<u32>> = d
                    .loops
                    .iter()
                    .map(|l| {
                        let mut edges: Vec<u32> = l.steps.iter().map(|s| s.edge).collect();
                        edges.sort_unstable();
                        edges
                    })
                    .collect();
                sets.sort();
                sets
            };
            assert_eq!(key(&loops_of(&config)), key(&loops_of(&dual_config)));
        }
    }

    #[test]
    fn test_weight_forms_agree() {
        for q in [5.0, 10.0, 6.25] {
            let params = params_from_q(q).unwrap();
            for mask in 0u32..16 {
                let config = RcTorusConfig::from_mask(torus22(), mask);
                let w = rc_weight(&config, &params);
                assert!(
                    (w.standard - w.loop_form).abs() <= 1e-13 * w.standard,
                    "q={q}, mask={mask}: {} vs {}",
                    w.standard,
                    w.loop_form
                );
            }
        }
        // Spot value: all closed at q = 9: (1−p)⁴·9² = C·3².
        let params = params_from_q(9.0).unwrap();
        let config = RcTorusConfig::from_mask(torus22(), 0);
        let w = rc_weight(&config, &params);
        let direct = (1.0 - params.p_c).powi(4) * 81.0;
        assert!((w.standard - direct).abs() <= 1e-13 * direct);
        let constant = 9.0 * 4.0f64.powi(-4);
        assert!((w.loop_form - constant * 9.0).abs() <= 1e-13 * w.loop_form);
    }

    #[test]
    fn test_correspondence_identity_and_inequalities() {
        // Frozen totals from an independent implementation of the same
        // enumeration.
        let frozen = [
            (2u32, 2u32, 5.0, 2.365761411720e+00),
            (2, 4, 5.0, 3.262196444594e+00),
            (2, 2, 10.0, 2.308861570204e+00),
            (2, 4, 10.0, 3.067695604640e+00),
        ];
        for (n_cols, n_rows, q, lhs_expect) in frozen {
            let params = params_from_q(q).unwrap();
            let report = correspondence_check(n_cols, n_rows, &params).unwrap();
            assert!(report.ok, "{report:?}");
            assert!(report.rel_err_i <= 1e-12, "{}", report.rel_err_i);
            assert!(
                (report.lhs_i - lhs_expect).abs() <= 1e-11 * lhs_expect,
                "({n_cols},{n_rows},q={q}): {} vs {lhs_expect}",
                report.lhs_i
            );
            assert!(report.ok_ii && report.ok_iii_r1 && report.ok_iii_r2);
            assert_eq!(
                report.config_count,
                1u64 << (n_cols * n_rows)
            );
        }
    }

    #[test]
    fn test_oriented_resummation_closed_form() {
        let params = params_from_q(10.0).unwrap();
        for mask in 0u32..16 {
            let config = RcTorusConfig::from_mask(torus22(), mask);
            let (direct, closed) = oriented_resummation(&config, &params);
            assert!(
                (direct - closed).abs() <= 1e-12 * closed,
                "mask {mask}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn test_six_vertex_images_and_multiplicity() {
        // Group all (ω, orientation) pairs by arrow image: the preimage
        // count must be 2^{n56} and the winding-weight sum c^{n56}.
        let params = params_from_q(10.0).unwrap();
        let lambda = params.lambda;
        let mut by_image: HashMap<u64, (u64, f64)> = HashMap::new();
        let mut image_of_key: HashMap<u64, TorusArrowConfig> = HashMap::new();
        for mask in 0u32..16 {
            let config = RcTorusConfig::from_mask(torus22(), mask);
            let decomposition = loops_of(&config);
            let l = decomposition.loops.len();
            for orientation in 0u32..(1 << l) {
                let reversed: Vec<bool> =
                    (0..l).map(|i| (orientation >> i) & 1 == 1).collect();
                let image = six_vertex_of(&config, &decomposition, &reversed);
                assert!(image.is_ice());
                let weight: f64 = decomposition
                    .loops
                    .iter()
                    .zip(&reversed)
                    .map(|(lp, &rev)| {
                        let sign = lp.turning_quarters.signum() as f64
                            * if rev { -1.0 } else { 1.0 };
                        (lambda * sign).exp()
                    })
                    .product();
                let entry = by_image.entry(image.key()).or_insert((0, 0.0));
                entry.0 += 1;
                entry.1 += weight;
                image_of_key.entry(image.key()).or_insert(image);
            }
        }
        // Every ice configuration is reached: 18 on the 2×2 torus.
        assert_eq!(by_image.len(), 18);
        let mut z_total = 0.0;
        for (key, (count, weight)) in &by_image {
            let image = &image_of_key[key];
            let n56 = image.c_vertex_count();
            assert_eq!(*count, 1u64 << n56, "key {key}");
            let expect = params.c.powi(n56 as i32);
            assert!(
                (weight - expect).abs() <= 1e-12 * expect,
                "key {key}: {weight} vs {expect}"
            );
            z_total += expect;
        }
        let arrows = icelab::enumerate(2, 2, params.c).unwrap();
        assert!((z_total - arrows.z).abs() <= 1e-12 * arrows.z);
    }

    #[test]
    fn test_all_closed_images_stay_in_central_sector() {
        // Each retractable square loop of the all-closed configuration
        // carries one north and one south vertical edge whichever way it
        // is oriented, so every image keeps N/2 up arrows per row.
        let config = RcTorusConfig::from_mask(torus22(), 0);
        let decomposition = loops_of(&config);
        assert!(decomposition.loops.iter().all(MedialLoop::retractable));
        for orientation in 0u32..4 {
            let reversed: Vec<bool> = (0..2).map(|i| (orientation >> i) & 1 == 1).collect();
            let image = six_vertex_of(&config, &decomposition, &reversed);
            assert_eq!(image.row_up_counts(), vec![1, 1]);
            let flipped_reversed: Vec<bool> = reversed.iter().map(|&x| !x).collect();
            let flipped = six_vertex_of(&config, &decomposition, &flipped_reversed);
            assert_eq!(flipped, image.arrow_flip());
        }
    }

    #[test]
    fn test_winding_loops_oriented_down_shift_the_sector() {
        // A configuration with one vertical winding pair, all winding
        // loops oriented downward: the net vertical flux through each row
        // is −2, so every row has N/2 − 1 up arrows (here 0), and the
        // global flip reaches N/2 + 1.
        let mut found = 0;
        for mask in 0u32..16 {
            let config = RcTorusConfig::from_mask(torus22(), mask);
            if config.vertical_winding_pairs != 1 {
                continue;
            }
            found += 1;
            let decomposition = loops_of(&config);
            let reversed: Vec<bool> = decomposition
                .loops
                .iter()
                .map(|l| l.homology.1 > 0)
                .collect();
            let image = six_vertex_of(&config, &decomposition, &reversed);
            assert_eq!(image.row_up_counts(), vec![0, 0], "mask {mask}");
            let flipped_reversed: Vec<bool> = reversed.iter().map(|&x| !x).collect();
            let flipped = six_vertex_of(&config, &decomposition, &flipped_reversed);
            assert_eq!(flipped.row_up_counts(), vec![2, 2], "mask {mask}");
        }
        assert!(found > 0, "no single-winding-pair configuration found");
    }

    #[test]
    fn test_coupling_single_edge_exact() {
        let graph = SmallGraph {
            n_vertices: 2,
            edges: vec![(0, 1)],
        };
        // β = ln 2, q = 2: p = 1/2, φ⁰[0↔1] = 1/3, μ⁰[σ0=σ1] = 2/3.
        let report = potts_coupling_check(&graph, 2, 2.0f64.ln(), &[]).unwrap();
        assert_eq!(report.pairs.len(), 1);
        let pair = &report.pairs[0];
        assert!((pair.connect_prob - 1.0 / 3.0).abs() < 1e-15);
        assert!((pair.spin_agree - 2.0 / 3.0).abs() < 1e-15);
        assert!(pair.abs_err < 1e-15);
        assert!((report.p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn test_coupling_grid_at_critical_point() {
        let graph = grid_graph(2, 2);
        let beta = (1.0 + 3.0f64.sqrt()).ln();
        let report = potts_coupling_check(&graph, 3, beta, &[0, 1]).unwrap();
        assert_eq!(report.pairs.len(), 6);
        assert!(report.max_pair_err <= 1e-13, "{}", report.max_pair_err);
        assert!(report.max_wired_err <= 1e-13, "{}", report.max_wired_err);
        assert!(report.weight_form_gap <= 1e-12);
        // The prefactor-less form genuinely differs at finite coupling.
        assert!(report
            .pairs
            .iter()
            .any(|pr| (pr.rhs_unprefixed - pr.spin_agree).abs() > 1e-3));
    }

    #[test]
    fn test_coupling_infinite_temperature() {
        let graph = grid_graph(2, 2);
        let report = potts_coupling_check(&graph, 4, 0.0, &[0]).unwrap();
        for pair in &report.pairs {
            assert!((pair.spin_agree - 0.25).abs() < 1e-14);
            assert!(pair.connect_prob.abs() < 1e-14);
        }
        for w in &report.wired {
            assert!((w.spin_boundary - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn test_budget_and_parameter_rejections() {
        assert!(matches!(
            DiamondTorus::new(3, 2, 0),
            Err(Error::InvalidParameter(_))
        ));
        let params = params_from_q(10.0).unwrap();
        assert!(matches!(
            correspondence_check(6, 4, &params),
            Err(Error::BudgetExceeded(_))
        ));
        let graph = grid_graph(2, 2);
        assert!(matches!(
            potts_coupling_check(&graph, 7, 1.0, &[]),
            Err(Error::InvalidParameter(_))
        ));
        let big = grid_graph(4, 4);
        assert!(matches!(
            potts_coupling_check(&big, 2, 1.0, &[]),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
