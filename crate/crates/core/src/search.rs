//! Supremum of a variation total over all grid subpartition pairs.
//!
//! A partition of an `n`-point grid is a subset of the `n - 2` interior
//! indices, encoded as a bit mask (bit `k` selects index `k + 1`).
//! Partitions are ordered lexicographically by their sorted index
//! sequences; for masks this means `S < T` iff the lowest bit of `S ^ T`
//! lies in `S`, so the full grid is the smallest partition. Pairs compare
//! row partition first. Every exact method returns the lexicographically
//! smallest maximiser.
//!
//! Branch-and-bound walks the row subsets depth-first (include before
//! exclude, which visits them in lexicographic order) and, once all rows
//! are fixed, solves the column choice exactly with a longest-path dynamic
//! program. For families whose outer map is a root, the column program keeps
//! the Pareto front of (column sum, mixed sum) pairs.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::gridfn::{Grid1D, GridFunction2D, Partition, PartitionPair};
use crate::variation::{
    cell_dist, edge_dist, evaluate, Axis, Corners, FamilyConfig, PartitionView, VariationBreakdown,
};

/// Largest grid accepted by [`enumerate_partitions`].
pub const ENUMERATE_LIMIT: usize = 22;
/// Largest grid (per axis) accepted by [`brute_force_sup`].
pub const BRUTE_LIMIT: usize = 12;
/// Largest grid (per axis) accepted by branch-and-bound.
pub const BB_LIMIT: usize = 14;

/// Search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Auto,
    BruteForce,
    JordanFullGrid,
    BranchAndBound,
    Greedy,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::BruteForce => "brute-force",
            Method::JordanFullGrid => "jordan-full-grid",
            Method::BranchAndBound => "branch-and-bound",
            Method::Greedy => "greedy",
        }
    }

    /// Exact methods certify the supremum.
    pub fn is_exact(&self) -> bool {
        !matches!(self, Method::Greedy | Method::Auto)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts `auto|brute|bb|greedy|jordan` and the long names.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Method::Auto,
            "brute" | "brute-force" => Method::BruteForce,
            "bb" | "branch-and-bound" => Method::BranchAndBound,
            "greedy" => Method::Greedy,
            "jordan" | "jordan-full-grid" => Method::JordanFullGrid,
            other => {
                return Err(Error::InvalidConfig(alloc::format!(
                    "unknown method '{other}' (expected auto|brute|bb|greedy|jordan)"
                )))
            }
        })
    }
}

/// Outcome of a supremum search.
#[derive(Debug, Clone, PartialEq)]
pub struct SupResult {
    /// Total variation at `argmax`, recomputed directly.
    pub value: f64,
    pub argmax: PartitionPair,
    /// The method that produced the result (never [`Method::Auto`]).
    pub method: Method,
    pub optimal: bool,
    /// Row, column and mixed terms at `argmax`.
    pub breakdown: VariationBreakdown,
}

fn size_guard(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::SizeGuard { what, size, limit })
    } else {
        Ok(())
    }
}

/// `a` precedes `b` in lexicographic partition order.
#[inline]
fn lex_less(a: u64, b: u64) -> bool {
    let x = a ^ b;
    x != 0 && a & x & x.wrapping_neg() != 0
}

/// All interior masks for `interior` free indices, in lexicographic order.
fn lex_masks(interior: usize) -> Vec<u64> {
    fn walk(k: usize, interior: usize, mask: u64, out: &mut Vec<u64>) {
        if k == interior {
            out.push(mask);
            return;
        }
        walk(k + 1, interior, mask | 1 << k, out);
        walk(k + 1, interior, mask, out);
    }
    let mut out = Vec::with_capacity(1 << interior);
    walk(0, interior, 0, &mut out);
    out
}

fn indices_of(mask: u64, len: usize) -> Vec<usize> {
    Partition::from_interior_mask(mask, len).indices().to_vec()
}

/// Every partition of `grid`, in lexicographic order (`2^(n-2)` of them).
pub fn enumerate_partitions(grid: &Grid1D) -> Result<Vec<Partition>> {
    size_guard("enumerate_partitions grid", grid.len(), ENUMERATE_LIMIT)?;
    Ok(lex_masks(grid.len() - 2)
        .into_iter()
        .map(|m| Partition::from_interior_mask(m, grid.len()))
        .collect())
}

fn check_inputs(f: &GridFunction2D, g: Option<&GridFunction2D>, cfg: &FamilyConfig) -> Result<()> {
    if let Some(g) = g {
        f.check_same_domain(g)?;
    }
    cfg.check_for(f)
}

fn view<'a>(
    f: &'a GridFunction2D,
    g: Option<&'a GridFunction2D>,
    rows: &'a [usize],
    cols: &'a [usize],
) -> PartitionView<'a> {
    PartitionView { f, g, rows, cols }
}

fn finish(
    f: &GridFunction2D,
    g: Option<&GridFunction2D>,
    cfg: &FamilyConfig,
    argmax: PartitionPair,
    method: Method,
) -> Result<SupResult> {
    let breakdown = evaluate(
        &view(f, g, argmax.pi.indices(), argmax.pi_star.indices()),
        cfg,
    )?;
    Ok(SupResult {
        value: breakdown.total,
        argmax,
        method,
        optimal: method.is_exact(),
        breakdown,
    })
}

/// Exhaustive maximum over every row × column partition pair.
pub fn brute_force_sup(
    f: &GridFunction2D,
    g: Option<&GridFunction2D>,
    cfg: &FamilyConfig,
) -> Result<SupResult> {
    size_guard("brute_force_sup rows", f.rows(), BRUTE_LIMIT)?;
    size_guard("brute_force_sup cols", f.cols(), BRUTE_LIMIT)?;
    check_inputs(f, g, cfg)?;
    let rows: Vec<Vec<usize>> = lex_masks(f.rows() - 2)
        .into_iter()
        .map(|m| indices_of(m, f.rows()))
        .collect();
    let cols: Vec<Vec<usize>> = lex_masks(f.cols() - 2)
        .into_iter()
        .map(|m| indices_of(m, f.cols()))
        .collect();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (ri, r) in rows.iter().enumerate() {
        for (ci, c) in cols.iter().enumerate() {
            let v = evaluate(&view(f, g, r, c), cfg)?.total;
            if v > best.0 {
                best = (v, ri, ci);
            }
        }
    }
    let argmax = PartitionPair::new(
        Partition::new(rows[best.1].clone(), f.rows())?,
        Partition::new(cols[best.2].clone(), f.cols())?,
    );
    finish(f, g, cfg, argmax, Method::BruteForce)
}

/// Supremum with the requested method. `Auto` picks the full grid for
/// Wiener `p = 1`, branch-and-bound up to 14 points per axis, and greedy
/// local search beyond.
pub fn solve_sup(
    f: &GridFunction2D,
    g: Option<&GridFunction2D>,
    cfg: &FamilyConfig,
    method: Method,
) -> Result<SupResult> {
    check_inputs(f, g, cfg)?;
    let method = match method {
        Method::Auto if cfg.is_jordan() => Method::JordanFullGrid,
        Method::Auto if f.rows() <= BB_LIMIT && f.cols() <= BB_LIMIT => Method::BranchAndBound,
        Method::Auto => Method::Greedy,
        m => m,
    };
    match method {
        Method::BruteForce => brute_force_sup(f, g, cfg),
        Method::JordanFullGrid => {
            if !cfg.is_jordan() {
                return Err(Error::MethodIncompatible {
                    method: method.to_string(),
                    family: cfg.label(),
                });
            }
            finish(f, g, cfg, PartitionPair::full(f), method)
        }
        Method::BranchAndBound => {
            size_guard("branch-and-bound rows", f.rows(), BB_LIMIT)?;
            size_guard("branch-and-bound cols", f.cols(), BB_LIMIT)?;
            let tables = Tables::build(f, g, cfg)?;
            let argmax = tables.branch_and_bound();
            finish(f, g, cfg, argmax, method)
        }
        Method::Greedy => {
            let argmax = greedy(f, g, cfg)?;
            finish(f, g, cfg, argmax, method)
        }
        Method::Auto => unreachable!("resolved above"),
    }
}

/// Decisions for a prefix of the interior indices: `rows[k]` says whether
/// interior row index `k + 1` is kept; indices past the end are free.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialSelection {
    pub rows: Vec<bool>,
    pub cols: Vec<bool>,
}

impl PartialSelection {
    /// Nothing decided.
    pub fn empty() -> Self {
        PartialSelection::default()
    }

    /// Everything decided, following `pair`.
    pub fn complete(pair: &PartitionPair) -> Self {
        let flags = |p: &Partition| (1..p.grid_len() - 1).map(|i| p.contains(i)).collect();
        PartialSelection {
            rows: flags(&pair.pi),
            cols: flags(&pair.pi_star),
        }
    }
}

/// Upper bound on the total of every completion of `partial`.
pub fn bb_upper_bound(
    f: &GridFunction2D,
    g: Option<&GridFunction2D>,
    cfg: &FamilyConfig,
    partial: &PartialSelection,
) -> Result<f64> {
    size_guard("bb_upper_bound rows", f.rows(), BB_LIMIT)?;
    size_guard("bb_upper_bound cols", f.cols(), BB_LIMIT)?;
    check_inputs(f, g, cfg)?;
    if partial.rows.len() > f.rows() - 2 || partial.cols.len() > f.cols() - 2 {
        return Err(Error::InvalidPartition(
            "partial selection is longer than the grid interior".to_string(),
        ));
    }
    let tables = Tables::build(f, g, cfg)?;
    let rows = Constraint::prefix(&partial.rows, f.rows());
    let cols = Constraint::prefix(&partial.cols, f.cols());
    let w = tables.mixed_weights(&cols);
    Ok(tables.bound(&rows, &cols, &w))
}

/// Per-index decisions: `Some(true)` forced in, `Some(false)` forced out.
struct Constraint(Vec<Option<bool>>);

impl Constraint {
    fn free(len: usize) -> Self {
        Constraint(vec![None; len])
    }

    fn prefix(decided: &[bool], len: usize) -> Self {
        let mut c = Constraint::free(len);
        for (k, &d) in decided.iter().enumerate() {
            c.0[k + 1] = Some(d);
        }
        c
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn may_stop(&self, i: usize) -> bool {
        self.0[i] != Some(false)
    }

    fn must_stop(&self, i: usize) -> bool {
        self.0[i] == Some(true)
    }
}

/// Longest path from index 0 to the last index through allowed stops.
/// Edge weights may depend on the 1-based position of the step when
/// `positional`. Returns the best value and its (lexicographically
/// smallest) interior mask.
fn best_path(
    stops: &Constraint,
    positional: bool,
    mut edge: impl FnMut(usize, usize, usize) -> f64,
) -> (f64, u64) {
    let n = stops.len();
    let npos = if positional { n } else { 1 };
    // best[node * npos + pos]: best path to `node` whose last step has
    // position pos + 1 (or any position when not positional).
    let mut best: Vec<Option<(f64, u64)>> = vec![None; n * npos];
    for e in 1..n {
        if !stops.may_stop(e) {
            continue;
        }
        let bit = if e + 1 < n { 1u64 << (e - 1) } else { 0 };
        for c in (0..e).rev() {
            if c > 0 && !stops.may_stop(c) {
                continue;
            }
            for pos in 0..npos {
                let (base, mask) = if c == 0 {
                    if pos != 0 {
                        continue;
                    }
                    (0.0, 0)
                } else {
                    let prev = if positional {
                        if pos == 0 {
                            continue;
                        }
                        best[c * npos + pos - 1]
                    } else {
                        best[c * npos]
                    };
                    match prev {
                        Some(p) => p,
                        None => continue,
                    }
                };
                let v = base + edge(c, e, pos + 1);
                let m = mask | bit;
                let slot = &mut best[e * npos + pos];
                match slot {
                    Some((bv, bm)) if v < *bv || (v == *bv && !lex_less(m, *bm)) => {}
                    _ => *slot = Some((v, m)),
                }
            }
            if c > 0 && stops.must_stop(c) {
                break;
            }
        }
    }
    let mut out: Option<(f64, u64)> = None;
    for pos in 0..npos {
        if let Some((v, m)) = best[(n - 1) * npos + pos] {
            match out {
                Some((bv, bm)) if v < bv || (v == bv && !lex_less(m, bm)) => {}
                _ => out = Some((v, m)),
            }
        }
    }
    out.expect("a grid always has the coarse path")
}

/// Pairwise distances for every possible row, column and cell interval.
struct Tables<'a> {
    cfg: &'a FamilyConfig,
    t: &'a [f64],
    s: &'a [f64],
    n: usize,
    m: usize,
    row: Vec<f64>,
    col: Vec<f64>,
    cell: Vec<f64>,
}

impl<'a> Tables<'a> {
    fn build(
        f: &'a GridFunction2D,
        g: Option<&'a GridFunction2D>,
        cfg: &'a FamilyConfig,
    ) -> Result<Self> {
        let (n, m) = (f.rows(), f.cols());
        let mut row = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let gg = g.map(|g| (g.get(a, 0), g.get(b, 0)));
                row[a * n + b] = edge_dist(f.get(a, 0), f.get(b, 0), gg)?;
            }
        }
        let mut col = vec![0.0; m * m];
        for c in 0..m {
            for e in c + 1..m {
                let gg = g.map(|g| (g.get(0, c), g.get(0, e)));
                col[c * m + e] = edge_dist(f.get(0, c), f.get(0, e), gg)?;
            }
        }
        let corners = |h: &'a GridFunction2D, a: usize, b: usize, c: usize, e: usize| Corners {
            ac: h.get(a, c),
            ae: h.get(a, e),
            bc: h.get(b, c),
            be: h.get(b, e),
        };
        let mut cell = vec![0.0; n * n * m * m];
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..m {
                    for e in c + 1..m {
                        let gc = g.map(|g| corners(g, a, b, c, e));
                        cell[((a * n + b) * m + c) * m + e] =
                            cell_dist(corners(f, a, b, c, e), gc)?;
                    }
                }
            }
        }
        Ok(Tables {
            cfg,
            t: f.grid_t().points(),
            s: f.grid_s().points(),
            n,
            m,
            row,
            col,
            cell,
        })
    }

    fn row_term(&self, a: usize, b: usize, k: usize) -> f64 {
        self.cfg.edge_term(
            Axis::Row,
            self.row[a * self.n + b],
            self.t[b] - self.t[a],
            k,
        )
    }

    fn col_term(&self, c: usize, e: usize, l: usize) -> f64 {
        self.cfg.edge_term(
            Axis::Col,
            self.col[c * self.m + e],
            self.s[e] - self.s[c],
            l,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn cell_term(&self, a: usize, b: usize, c: usize, e: usize, k: usize, l: usize) -> f64 {
        let d = self.cell[((a * self.n + b) * self.m + c) * self.m + e];
        self.cfg
            .cell_term(d, self.t[b] - self.t[a], self.s[e] - self.s[c], k, l)
    }

    fn npos(&self) -> usize {
        if self.cfg.positional() {
            self.n
        } else {
            1
        }
    }

    /// `w[(a, b, k)]`: the best column-wise mixed sum for row interval
    /// `(a, b)` at row position `k`, over columns allowed by `cols`.
    fn mixed_weights(&self, cols: &Constraint) -> Vec<f64> {
        let (n, npos) = (self.n, self.npos());
        let positional = self.cfg.positional();
        let mut w = vec![0.0; n * n * npos];
        for a in 0..n {
            for b in a + 1..n {
                for kp in 0..npos.min(a + 1) {
                    let k = if positional { kp + 1 } else { 1 };
                    w[(a * n + b) * npos + kp] =
                        best_path(cols, positional, |c, e, l| self.cell_term(a, b, c, e, k, l)).0;
                }
            }
        }
        w
    }

    fn bound(&self, rows: &Constraint, cols: &Constraint, w: &[f64]) -> f64 {
        let positional = self.cfg.positional();
        let npos = self.npos();
        let n = self.n;
        let r = best_path(rows, positional, |a, b, k| self.row_term(a, b, k)).0;
        let c = best_path(cols, positional, |c, e, l| self.col_term(c, e, l)).0;
        let x = best_path(rows, positional, |a, b, k| {
            let kp = if positional { k - 1 } else { 0 };
            w[(a * n + b) * npos + kp]
        })
        .0;
        self.cfg.aggregate(r) + self.cfg.aggregate(c) + self.cfg.aggregate(x)
    }

    /// Best columns for a fixed row partition: `(total, column mask)`.
    fn solve_columns(&self, rows: &[usize]) -> (f64, u64) {
        let positional = self.cfg.positional();
        let r: f64 = rows
            .windows(2)
            .enumerate()
            .map(|(k, w)| self.row_term(w[0], w[1], k + 1))
            .sum();
        let mixed = |c: usize, e: usize, l: usize| -> f64 {
            rows.windows(2)
                .enumerate()
                .map(|(k, w)| self.cell_term(w[0], w[1], c, e, k + 1, l))
                .sum()
        };
        let free = Constraint::free(self.m);
        if self.cfg.linear() {
            let (v, mask) = best_path(&free, positional, |c, e, l| {
                self.col_term(c, e, l) + mixed(c, e, l)
            });
            return (r + v, mask);
        }
        debug_assert!(!positional);
        // Pareto fronts of (column sum, mixed sum, mask) per end node.
        let m = self.m;
        let mut fronts: Vec<Vec<(f64, f64, u64)>> = vec![Vec::new(); m];
        fronts[0].push((0.0, 0.0, 0));
        for e in 1..m {
            let bit = if e + 1 < m { 1u64 << (e - 1) } else { 0 };
            let mut cand = Vec::new();
            for (c, front) in fronts.iter().enumerate().take(e) {
                let (dc, dx) = (self.col_term(c, e, 1), mixed(c, e, 1));
                for &(pc, px, pm) in front {
                    cand.push((pc + dc, px + dx, pm | bit));
                }
            }
            fronts[e] = pareto(cand);
        }
        let mut best: Option<(f64, u64)> = None;
        for &(c, x, mask) in &fronts[m - 1] {
            let v = self.cfg.aggregate(c) + self.cfg.aggregate(x);
            match best {
                Some((bv, bm)) if v < bv || (v == bv && !lex_less(mask, bm)) => {}
                _ => best = Some((v, mask)),
            }
        }
        let (v, mask) = best.expect("non-empty front");
        (self.cfg.aggregate(r) + v, mask)
    }

    fn branch_and_bound(&self) -> PartitionPair {
        let n = self.n;
        let free_cols = Constraint::free(self.m);
        let w = self.mixed_weights(&free_cols);
        let mut state = Search {
            decided: Vec::with_capacity(n),
            best: f64::NEG_INFINITY,
            best_rows: 0,
            best_cols: 0,
        };
        self.descend(&mut state, &free_cols, &w);
        PartitionPair::new(
            Partition::from_interior_mask(state.best_rows, n),
            Partition::from_interior_mask(state.best_cols, self.m),
        )
    }

    fn descend(&self, st: &mut Search, cols: &Constraint, w: &[f64]) {
        let n = self.n;
        if st.decided.len() == n - 2 {
            let mask = st
                .decided
                .iter()
                .enumerate()
                .fold(0u64, |m, (k, &d)| if d { m | 1 << k } else { m });
            let rows = indices_of(mask, n);
            let (v, cmask) = self.solve_columns(&rows);
            if v > st.best {
                st.best = v;
                st.best_rows = mask;
                st.best_cols = cmask;
            }
            return;
        }
        if st.best > f64::NEG_INFINITY {
            let rows = Constraint::prefix(&st.decided, n);
            if self.bound(&rows, cols, w) <= st.best {
                return;
            }
        }
        for choice in [true, false] {
            st.decided.push(choice);
            self.descend(st, cols, w);
            st.decided.pop();
        }
    }
}

struct Search {
    decided: Vec<bool>,
    best: f64,
    best_rows: u64,
    best_cols: u64,
}

/// Non-dominated points; among exact duplicates the lexicographically
/// smallest mask survives.
fn pareto(mut cand: Vec<(f64, f64, u64)>) -> Vec<(f64, f64, u64)> {
    cand.sort_by(|p, q| {
        q.0.total_cmp(&p.0).then(q.1.total_cmp(&p.1)).then_with(|| {
            if lex_less(p.2, q.2) {
                core::cmp::Ordering::Less
            } else if p.2 == q.2 {
                core::cmp::Ordering::Equal
            } else {
                core::cmp::Ordering::Greater
            }
        })
    });
    let mut out: Vec<(f64, f64, u64)> = Vec::new();
    let mut best_x = f64::NEG_INFINITY;
    for p in cand {
        // Sorted by descending first coordinate, so `p` is dominated iff
        // some earlier point has a second coordinate at least as large.
        if p.1 > best_x {
            best_x = p.1;
            out.push(p);
        }
    }
    out
}

/// Local search from the full grid: repeatedly apply the single-index
/// toggle with the largest strict improvement.
fn greedy(
    f: &GridFunction2D,
    g: Option<&GridFunction2D>,
    cfg: &FamilyConfig,
) -> Result<PartitionPair> {
    let mut rows = vec![true; f.rows() - 2];
    let mut cols = vec![true; f.cols() - 2];
    let value = |rows: &[bool], cols: &[bool]| -> Result<f64> {
        let pi = Partition::from_flags(rows);
        let ps = Partition::from_flags(cols);
        Ok(evaluate(&view(f, g, pi.indices(), ps.indices()), cfg)?.total)
    };
    let mut current = value(&rows, &cols)?;
    loop {
        let mut best: Option<(f64, bool, usize)> = None;
        for axis_rows in [true, false] {
            let len = if axis_rows { rows.len() } else { cols.len() };
            for k in 0..len {
                let v = if axis_rows {
                    rows[k] = !rows[k];
                    let v = value(&rows, &cols)?;
                    rows[k] = !rows[k];
                    v
                } else {
                    cols[k] = !cols[k];
                    let v = value(&rows, &cols)?;
                    cols[k] = !cols[k];
                    v
                };
                if v > best.map_or(current, |b| b.0) {
                    best = Some((v, axis_rows, k));
                }
            }
        }
        match best {
            Some((v, true, k)) => {
                rows[k] = !rows[k];
                current = v;
            }
            Some((v, false, k)) => {
                cols[k] = !cols[k];
                current = v;
            }
            None => break,
        }
    }
    Ok(PartitionPair::new(
        Partition::from_flags(&rows),
        Partition::from_flags(&cols),
    ))
}
