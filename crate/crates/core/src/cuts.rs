//! Cut, volume and association statistics, the edge- and triangle-based
//! cut criteria, and sweep cuts over a node ordering.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_lambda, Error, Result};
use crate::graph::Graph;
use crate::partition::NodeSet;
use crate::sparse::SparseSymMatrix;
use crate::triangles::TriangleIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutCriterion {
    /// Edge conductance.
    Con2,
    /// Triangle conductance.
    Con3,
    /// Mixed-order conductance.
    Conx,
    /// Edge conductance in the mixed-order weighted graph `G_X`.
    Congx,
    Ncut2,
    Ncut3,
    Nass2,
    Nass3,
    Exp2,
    Exp3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl CutCriterion {
    pub const ALL: [CutCriterion; 10] = [
        CutCriterion::Con2,
        CutCriterion::Con3,
        CutCriterion::Conx,
        CutCriterion::Congx,
        CutCriterion::Ncut2,
        CutCriterion::Ncut3,
        CutCriterion::Nass2,
        CutCriterion::Nass3,
        CutCriterion::Exp2,
        CutCriterion::Exp3,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            CutCriterion::Con2 => "con2",
            CutCriterion::Con3 => "con3",
            CutCriterion::Conx => "conx",
            CutCriterion::Congx => "congx",
            CutCriterion::Ncut2 => "ncut2",
            CutCriterion::Ncut3 => "ncut3",
            CutCriterion::Nass2 => "nass2",
            CutCriterion::Nass3 => "nass3",
            CutCriterion::Exp2 => "exp2",
            CutCriterion::Exp3 => "exp3",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            CutCriterion::Nass2 | CutCriterion::Nass3 => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }

    /// Whether `a` is strictly better than `b` under this criterion.
    pub fn improves(self, a: f64, b: f64) -> bool {
        match self.direction() {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }

    /// Whether the value depends on the mixing parameter.
    pub fn uses_lambda(self) -> bool {
        matches!(self, CutCriterion::Conx | CutCriterion::Congx)
    }
}

impl fmt::Display for CutCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CutCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace(['-', '_'], "");
        CutCriterion::ALL
            .into_iter()
            .find(|c| c.tag() == lower)
            .ok_or_else(|| Error::Domain(format!("unknown cut criterion {s:?}")))
    }
}

/// Everything a criterion needs: the graph, its triangles, and the mixing
/// parameter used by `conx` and `congx`.
#[derive(Debug, Clone, Copy)]
pub struct CutContext<'a> {
    pub graph: &'a Graph,
    pub triangles: &'a TriangleIndex,
    pub lambda: f64,
}

impl<'a> CutContext<'a> {
    pub fn new(graph: &'a Graph, triangles: &'a TriangleIndex, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(CutContext { graph, triangles, lambda })
    }
}

/// Sufficient statistics of a split `{S, complement}`.
///
/// `assoc2` is twice the number of edges inside a side; `assoc3` is three
/// times the number of triangles inside a side, so that a triangle with all
/// endpoints in `S` adds the same amount to `vol3` and `assoc3`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CutStats {
    pub size: usize,
    pub n: usize,
    pub cut2: f64,
    pub vol2: f64,
    pub vol2_total: f64,
    pub edges_in: f64,
    pub edges_out: f64,
    pub cut3: f64,
    pub vol3: f64,
    pub vol3_total: f64,
    pub triangles_in: f64,
    pub triangles_out: f64,
    /// Cut weight of `S` in `G_T`.
    pub cut_t: f64,
    /// Volume of `S` in `G_T`.
    pub vol_t: f64,
    pub vol_t_total: f64,
}

impl CutStats {
    pub fn vol2_complement(&self) -> f64 {
        self.vol2_total - self.vol2
    }
    pub fn assoc2(&self) -> f64 {
        2.0 * self.edges_in
    }
    pub fn assoc2_complement(&self) -> f64 {
        2.0 * self.edges_out
    }
    pub fn vol3_complement(&self) -> f64 {
        self.vol3_total - self.vol3
    }
    pub fn assoc3(&self) -> f64 {
        3.0 * self.triangles_in
    }
    pub fn assoc3_complement(&self) -> f64 {
        3.0 * self.triangles_out
    }

    /// Criterion value, or `None` when a denominator vanishes.
    pub fn value(&self, c: CutCriterion, lambda: f64) -> Option<f64> {
        let (v2, v2c) = (self.vol2, self.vol2_complement());
        let (v3, v3c) = (self.vol3, self.vol3_complement());
        let smaller = self.size.min(self.n - self.size) as f64;
        let ratio = |num: f64, den: f64| (den > 0.0).then(|| num / den);
        match c {
            CutCriterion::Con2 => ratio(self.cut2, v2.min(v2c)),
            CutCriterion::Con3 => ratio(self.cut3, v3.min(v3c)),
            CutCriterion::Conx => {
                let mix = |a3: f64, a2: f64| (1.0 - lambda) * a3 + lambda * a2;
                ratio(mix(self.cut3, self.cut2), mix(v3, v2).min(mix(v3c, v2c)))
            }
            CutCriterion::Congx => {
                let cut = (1.0 - lambda) * self.cut_t + lambda * self.cut2;
                let vol = (1.0 - lambda) * self.vol_t + lambda * v2;
                let vol_c = (1.0 - lambda) * (self.vol_t_total - self.vol_t) + lambda * v2c;
                ratio(cut, vol.min(vol_c))
            }
            CutCriterion::Ncut2 => Some(ratio(self.cut2, v2)? + ratio(self.cut2, v2c)?),
            CutCriterion::Ncut3 => Some(ratio(self.cut3, v3)? + ratio(self.cut3, v3c)?),
            CutCriterion::Nass2 => Some(ratio(self.assoc2(), v2)? + ratio(self.assoc2_complement(), v2c)?),
            CutCriterion::Nass3 => Some(ratio(self.assoc3(), v3)? + ratio(self.assoc3_complement(), v3c)?),
            CutCriterion::Exp2 => ratio(self.cut2, smaller),
            CutCriterion::Exp3 => ratio(self.cut3, smaller),
        }
    }
}

/// Total weight of entries `w(i, j)` with `i` in `s` and `j` outside.
pub fn cut2(s: &NodeSet, w: &SparseSymMatrix) -> f64 {
    s.iter().flat_map(|i| w.row(i)).filter(|&(j, _)| !s.contains(j)).map(|(_, v)| v).sum()
}

/// Weighted degree total of `s`.
pub fn vol2(s: &NodeSet, w: &SparseSymMatrix) -> f64 {
    s.iter().flat_map(|i| w.row(i)).map(|(_, v)| v).sum()
}

/// Weighted degree total of `s` in the subgraph it induces.
pub fn assoc2(s: &NodeSet, w: &SparseSymMatrix) -> f64 {
    s.iter().flat_map(|i| w.row(i)).filter(|&(j, _)| s.contains(j)).map(|(_, v)| v).sum()
}

fn inside(s: &NodeSet, t: &[u32; 3]) -> usize {
    t.iter().filter(|&&v| s.contains(v as usize)).count()
}

/// Triangles with endpoints on both sides of `s`.
pub fn cut3(s: &NodeSet, ti: &TriangleIndex) -> f64 {
    ti.triangles().iter().filter(|t| matches!(inside(s, t), 1 | 2)).count() as f64
}

/// Triangle endpoints in `s`.
pub fn vol3(s: &NodeSet, ti: &TriangleIndex) -> f64 {
    ti.triangles().iter().map(|t| inside(s, t)).sum::<usize>() as f64
}

/// Triangle endpoints in `s` over triangles lying entirely inside `s`.
pub fn assoc3(s: &NodeSet, ti: &TriangleIndex) -> f64 {
    3.0 * ti.triangles().iter().filter(|t| inside(s, t) == 3).count() as f64
}

/// Statistics of `s` computed from scratch.
pub fn cut_stats(s: &NodeSet, ctx: &CutContext<'_>) -> CutStats {
    let (g, ti) = (ctx.graph, ctx.triangles);
    let w = g.adjacency();
    let c = s.complement();
    let mut in_count = [0usize; 4];
    for t in ti.triangles() {
        in_count[inside(s, t)] += 1;
    }
    CutStats {
        size: s.len(),
        n: g.n(),
        cut2: cut2(s, &w),
        vol2: vol2(s, &w),
        vol2_total: 2.0 * g.m() as f64,
        edges_in: assoc2(s, &w) / 2.0,
        edges_out: assoc2(&c, &w) / 2.0,
        cut3: (in_count[1] + in_count[2]) as f64,
        vol3: vol3(s, ti),
        vol3_total: 3.0 * ti.len() as f64,
        triangles_in: in_count[3] as f64,
        triangles_out: in_count[0] as f64,
        cut_t: cut2(s, ti.wt()),
        vol_t: vol2(s, ti.wt()),
        vol_t_total: ti.dt().iter().sum(),
    }
}

/// Value of `c` on the split `{s, complement}`.
pub fn criterion_value(c: CutCriterion, s: &NodeSet, ctx: &CutContext<'_>) -> Result<f64> {
    cut_stats(s, ctx).value(c, ctx.lambda).ok_or_else(|| Error::UndefinedCriterion {
        criterion: c.tag().to_string(),
        set_size: s.len(),
    })
}

/// Statistics of every proper prefix `order[..u]`, `u = 1..n-1`, computed
/// incrementally in `O(m + triangle incidences)`.
pub fn prefix_stats(order: &[usize], ctx: &CutContext<'_>) -> Result<Vec<CutStats>> {
    let (g, ti) = (ctx.graph, ctx.triangles);
    let n = g.n();
    check_order(order, n)?;
    let mut in_s = vec![false; n];
    let mut st = CutStats {
        n,
        vol2_total: 2.0 * g.m() as f64,
        vol3_total: 3.0 * ti.len() as f64,
        vol_t_total: ti.dt().iter().sum(),
        edges_out: g.m() as f64,
        triangles_out: ti.len() as f64,
        ..CutStats::default()
    };
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for &v in &order[..n - 1] {
        for &u in g.neighbors(v) {
            if in_s[u as usize] {
                st.edges_in += 1.0;
                st.cut2 -= 1.0;
            } else {
                st.edges_out -= 1.0;
                st.cut2 += 1.0;
            }
        }
        for (u, w) in ti.wt().row(v) {
            st.cut_t += if in_s[u] { -w } else { w };
        }
        for &t in ti.incident(v) {
            let tri = ti.triangles()[t as usize];
            let before = tri.iter().filter(|&&x| x as usize != v && in_s[x as usize]).count();
            match before {
                0 => {
                    st.triangles_out -= 1.0;
                    st.cut3 += 1.0;
                }
                2 => {
                    st.triangles_in += 1.0;
                    st.cut3 -= 1.0;
                }
                _ => {}
            }
        }
        st.size += 1;
        st.vol2 += g.degree(v) as f64;
        st.vol3 += ti.triangle_degree(v) as f64;
        st.vol_t += ti.dt()[v];
        in_s[v] = true;
        out.push(st);
    }
    Ok(out)
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain("a sweep cut needs at least two nodes".into()));
    }
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::Domain(format!("order is not a permutation of 0..{n}")));
    }
    Ok(())
}

/// Criterion values of every prefix of an ordering and the selected cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub criterion: CutCriterion,
    pub order: Vec<usize>,
    /// `values[u - 1]` is the value of prefix `u`; `None` where undefined.
    pub values: Vec<Option<f64>>,
    pub best_u: usize,
    pub best_value: f64,
}

impl SweepCurve {
    /// Builds the curve from precomputed prefix statistics. The first
    /// optimal prefix wins ties.
    pub fn from_stats(order: &[usize], stats: &[CutStats], c: CutCriterion, lambda: f64) -> Result<SweepCurve> {
        let values: Vec<Option<f64>> = stats.iter().map(|s| s.value(c, lambda)).collect();
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in values.iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(_, b)| c.improves(v, b)) {
                    best = Some((i + 1, v));
                }
            }
        }
        let (best_u, best_value) =
            best.ok_or_else(|| Error::UndefinedCriterion { criterion: c.tag().to_string(), set_size: 0 })?;
        Ok(SweepCurve { criterion: c, order: order.to_vec(), values, best_u, best_value })
    }

    /// The selected set `S = order[..best_u]`.
    pub fn best_set(&self) -> NodeSet {
        NodeSet::from_members(self.order.len(), self.order[..self.best_u].iter().copied())
    }

    /// `u,value` rows; undefined prefixes have an empty value.
    pub fn to_csv(&self) -> String {
        let mut out = format!("u,{}\n", self.criterion);
        for (i, v) in self.values.iter().enumerate() {
            match v {
                Some(v) => out.push_str(&format!("{},{}\n", i + 1, v)),
                None => out.push_str(&format!("{},\n", i + 1)),
            }
        }
        out
    }
}

/// Sweep cut of `order` under criterion `c`.
pub fn sweep_cut(order: &[usize], c: CutCriterion, ctx: &CutContext<'_>) -> Result<SweepCurve> {
    let stats = prefix_stats(order, ctx)?;
    SweepCurve::from_stats(order, &stats, c, ctx.lambda)
}

/// Sweep cuts for several criteria sharing one pass over the ordering.
/// Criteria that are undefined on every prefix yield an error entry.
pub fn sweep_all(order: &[usize], criteria: &[CutCriterion], ctx: &CutContext<'_>) -> Result<Vec<Result<SweepCurve>>> {
    let stats = prefix_stats(order, ctx)?;
    Ok(criteria.iter().map(|&c| SweepCurve::from_stats(order, &stats, c, ctx.lambda)).collect())
}
