//! Recurrent compact sets of relative positions.
//!
//! For pieces `I_j1` of `K1` and `I_j2` of `K2`, write `N1`, `N2` for the
//! parts of the sets inside them, rescaled to `[0, 1]`. A relative position
//! `(s, t)` in state `(j1, j2)` compares `N1` with `e^s N2 + t`. Passing to a
//! child interval of either set (or of both) is an affine map on positions.
//!
//! A region `R` of grid cells certifies stable intersection when every
//! position in a member cell has overlapping hulls and some move sends the
//! whole cell, thickened by `margin` cells, back into `R`. The search keeps
//! deleting unsupported cells until nothing changes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{refine, CoverConfig, Cursor, RegularCantorSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionGrid {
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    pub ns: usize,
    pub nt: usize,
    pub margin: usize,
}

impl PositionGrid {
    pub fn new(s_range: (f64, f64), t_range: (f64, f64), ns: usize, nt: usize, margin: usize) -> Result<Self> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ok(s_range) || !ok(t_range) || ns == 0 || nt == 0 {
            return Err(Error::invalid("position grid needs finite increasing ranges and cells"));
        }
        Ok(PositionGrid {
            s_range,
            t_range,
            ns,
            nt,
            margin,
        })
    }

    /// `s ∈ [-1, 1]` and every `t` with `[t, t + e^s]` meeting `[0, 1]`.
    pub fn standard(ns: usize, nt: usize, margin: usize) -> Self {
        PositionGrid {
            s_range: (-1.0, 1.0),
            t_range: (-(1f64.exp()), 1.0),
            ns,
            nt,
            margin,
        }
    }

    pub fn hs(&self) -> f64 {
        (self.s_range.1 - self.s_range.0) / self.ns as f64
    }

    pub fn ht(&self) -> f64 {
        (self.t_range.1 - self.t_range.0) / self.nt as f64
    }

    fn cells(&self) -> usize {
        self.ns * self.nt
    }

    /// `(s_lo, s_hi, t_lo, t_hi)` of a cell.
    pub fn cell_box(&self, is: usize, it: usize) -> (f64, f64, f64, f64) {
        let (hs, ht) = (self.hs(), self.ht());
        let s0 = self.s_range.0 + is as f64 * hs;
        let t0 = self.t_range.0 + it as f64 * ht;
        (s0, s0 + hs, t0, t0 + ht)
    }

    pub fn locate(&self, s: f64, t: f64) -> Option<(usize, usize)> {
        let is = ((s - self.s_range.0) / self.hs()).floor();
        let it = ((t - self.t_range.0) / self.ht()).floor();
        (is >= 0.0 && it >= 0.0 && (is as usize) < self.ns && (it as usize) < self.nt)
            .then_some((is as usize, it as usize))
    }
}

/// Position of `e^s N2 + t` relative to `N1` in state `(j1, j2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativePosition {
    pub state: (usize, usize),
    pub s: f64,
    pub t: f64,
}

impl RelativePosition {
    /// Positions of `K2 + t` against `K1`, one per pair of pieces.
    pub fn of_translation(k1: &RegularCantorSet, k2: &RegularCantorSet, t: f64) -> Vec<RelativePosition> {
        let mut out = Vec::new();
        for (j1, a) in k1.pieces().iter().enumerate() {
            for (j2, b) in k2.pieces().iter().enumerate() {
                out.push(RelativePosition {
                    state: (j1, j2),
                    s: (b.len() / a.len()).ln(),
                    t: (b.lo + t - a.lo) / a.len(),
                });
            }
        }
        out
    }
}

/// A renormalization step; indices count children in position order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "refine", rename_all = "lowercase")]
pub enum Move {
    First { child: usize },
    Second { child: usize },
    Both { first: usize, second: usize },
}

/// Moves available in a state: first-set children, then second-set
/// children, then all pairs with the first index major.
fn move_list(c1: usize, c2: usize) -> Vec<Move> {
    let mut v: Vec<Move> = (0..c1).map(|child| Move::First { child }).collect();
    v.extend((0..c2).map(|child| Move::Second { child }));
    for first in 0..c1 {
        v.extend((0..c2).map(|second| Move::Both { first, second }));
    }
    v
}

/// Child `c` of piece `j` in the rescaled coordinates of `j`: `x -> ratio x + offset`.
#[derive(Debug, Clone, Copy)]
struct NormChild {
    target: usize,
    ratio: f64,
    offset: f64,
}

fn norm_children(k: &RegularCantorSet) -> Result<Vec<Vec<NormChild>>> {
    Cursor::pieces(k)
        .iter()
        .map(|p| {
            let len = p.interval.len();
            Ok(p.children(k, 0.0)?
                .iter()
                .map(|c| NormChild {
                    target: c.state,
                    ratio: c.interval.len() / len,
                    offset: (c.interval.lo - p.interval.lo) / len,
                })
                .collect())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub grid: PositionGrid,
    pub pieces: (usize, usize),
    /// Per state `j1 * r2 + j2`: alternating run lengths over cells in
    /// `is * nt + it` order, starting with a run of non-members.
    pub mask_rle: Vec<Vec<u32>>,
    /// Per state, the index of a supporting move for each member cell, in cell order.
    pub witness: Vec<Vec<u16>>,
    pub members: usize,
    /// First-order bound on how fast positions and moves drift when piece
    /// endpoints move.
    pub sensitivity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecurrentOutcome {
    Certificate(Certificate),
    NotFound,
}

impl RecurrentOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            RecurrentOutcome::Certificate(c) => Some(c),
            RecurrentOutcome::NotFound => None,
        }
    }
}

fn rle_encode(bits: &[bool]) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut cur = false;
    let mut n = 0u32;
    for &b in bits {
        if b != cur {
            runs.push(n);
            cur = b;
            n = 0;
        }
        n += 1;
    }
    runs.push(n);
    runs
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("bad certificate: {e}")))
    }

    /// Member flags per state.
    pub fn mask(&self) -> Vec<Vec<bool>> {
        let cells = self.grid.cells();
        self.mask_rle
            .iter()
            .map(|runs| {
                let mut v = Vec::with_capacity(cells);
                for (i, &n) in runs.iter().enumerate() {
                    v.extend(std::iter::repeat(i % 2 == 1).take(n as usize));
                }
                v
            })
            .collect()
    }

    pub fn is_member(&self, p: &RelativePosition) -> bool {
        let Some((is, it)) = self.grid.locate(p.s, p.t) else {
            return false;
        };
        let layer = p.state.0 * self.pieces.1 + p.state.1;
        self.mask().get(layer).is_some_and(|m| m[is * self.grid.nt + it])
    }

    /// Whether some pair of pieces puts `K2 + t` in a member cell.
    pub fn certifies_translation(&self, k1: &RegularCantorSet, k2: &RegularCantorSet, t: f64) -> bool {
        RelativePosition::of_translation(k1, k2, t)
            .iter()
            .any(|p| self.is_member(p))
    }

    /// Endpoint perturbations smaller than this keep the certificate valid.
    pub fn stability_radius(&self) -> f64 {
        self.grid.margin as f64 * self.grid.hs().min(self.grid.ht()) / self.sensitivity
    }

    /// Centre of a member cell whose `margin`-neighbourhood is all members.
    pub fn interior_position(&self) -> Option<RelativePosition> {
        let mask = self.mask();
        let (ns, nt, m) = (self.grid.ns, self.grid.nt, self.grid.margin);
        for (layer, bits) in mask.iter().enumerate() {
            for is in m..ns.saturating_sub(m) {
                for it in m..nt.saturating_sub(m) {
                    let all = (is - m..=is + m).all(|a| (it - m..=it + m).all(|b| bits[a * nt + b]));
                    if all {
                        let (s0, s1, t0, t1) = self.grid.cell_box(is, it);
                        return Some(RelativePosition {
                            state: (layer / self.pieces.1, layer % self.pieces.1),
                            s: 0.5 * (s0 + s1),
                            t: 0.5 * (t0 + t1),
                        });
                    }
                }
            }
        }
        None
    }
}

pub fn recurrent_compact_search(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    grid: &PositionGrid,
) -> Result<RecurrentOutcome> {
    recurrent_compact_search_with(k1, k2, grid, &CoverConfig::default())
}

/// Inclusive cell ranges `(layer, is0, is1, it0, it1)` hit by the image of a
/// cell under a move, thickened by the margin; `None` if it leaves the grid.
type Rect = (usize, usize, usize, usize, usize);

struct Search<'a> {
    grid: &'a PositionGrid,
    c1: Vec<Vec<NormChild>>,
    c2: Vec<Vec<NormChild>>,
    r2: usize,
}

impl Search<'_> {
    fn image(&self, layer: usize, cell: usize, mv: Move) -> Option<Rect> {
        let g = self.grid;
        let (j1, j2) = (layer / self.r2, layer % self.r2);
        let (s0, s1, t0, t1) = g.cell_box(cell / g.nt, cell % g.nt);
        let (ds, ta, tb, target);
        match mv {
            Move::First { child } => {
                let c = self.c1[j1][child];
                ds = -c.ratio.ln();
                (ta, tb) = ((t0 - c.offset) / c.ratio, (t1 - c.offset) / c.ratio);
                target = (c.target, j2);
            }
            Move::Second { child } => {
                let c = self.c2[j2][child];
                ds = c.ratio.ln();
                (ta, tb) = (s0.exp() * c.offset + t0, s1.exp() * c.offset + t1);
                target = (j1, c.target);
            }
            Move::Both { first, second } => {
                let (a, b) = (self.c1[j1][first], self.c2[j2][second]);
                ds = b.ratio.ln() - a.ratio.ln();
                ta = (s0.exp() * b.offset + t0 - a.offset) / a.ratio;
                tb = (s1.exp() * b.offset + t1 - a.offset) / a.ratio;
                target = (a.target, b.target);
            }
        }
        let pad = |x: f64| 1e-12 * (1.0 + x.abs());
        let (sa, sb) = (s0 + ds, s1 + ds);
        let idx = |x: f64, lo: f64, h: f64| ((x - lo) / h).floor();
        let m = g.margin as f64;
        let is0 = idx(sa - pad(sa), g.s_range.0, g.hs()) - m;
        let is1 = idx(sb + pad(sb), g.s_range.0, g.hs()) + m;
        let it0 = idx(ta - pad(ta), g.t_range.0, g.ht()) - m;
        let it1 = idx(tb + pad(tb), g.t_range.0, g.ht()) + m;
        if is0 < 0.0 || it0 < 0.0 || is1 >= g.ns as f64 || it1 >= g.nt as f64 {
            return None;
        }
        Some((
            target.0 * self.r2 + target.1,
            is0 as usize,
            is1 as usize,
            it0 as usize,
            it1 as usize,
        ))
    }
}

/// Row-major 2D prefix sums over one layer.
fn prefix(bits: &[bool], ns: usize, nt: usize) -> Vec<u32> {
    let w = nt + 1;
    let mut p = vec![0u32; (ns + 1) * w];
    for i in 0..ns {
        let mut row = 0u32;
        for j in 0..nt {
            row += bits[i * nt + j] as u32;
            p[(i + 1) * w + j + 1] = p[i * w + j + 1] + row;
        }
    }
    p
}

fn rect_full(p: &[u32], nt: usize, r: &Rect) -> bool {
    let w = nt + 1;
    let (_, a0, a1, b0, b1) = *r;
    let sum = p[(a1 + 1) * w + b1 + 1] + p[a0 * w + b0] - p[a0 * w + b1 + 1] - p[(a1 + 1) * w + b0];
    sum as usize == (a1 - a0 + 1) * (b1 - b0 + 1)
}

/// Every position in the cell has `[t, t + e^s]` meeting `[0, 1]`.
fn forces_overlap(g: &PositionGrid, is: usize, it: usize) -> bool {
    let (s0, _, t0, t1) = g.cell_box(is, it);
    t1 <= 1.0 && t0 + s0.exp() >= 0.0
}

pub fn recurrent_compact_search_with(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    grid: &PositionGrid,
    cfg: &CoverConfig,
) -> Result<RecurrentOutcome> {
    if !k1.is_affine() || !k2.is_affine() {
        return Err(Error::NonAffineInput);
    }
    if k1.has_reversing_branch() || k2.has_reversing_branch() {
        return Err(Error::OrientationReversing);
    }
    let (r1, r2) = (k1.num_pieces(), k2.num_pieces());
    let layers = r1 * r2;
    let cells = grid.cells();
    let total = layers.saturating_mul(cells);
    if total > cfg.budget {
        return Err(Error::BudgetExceeded {
            what: "position cells",
            needed: total as u128,
            budget: cfg.budget as u128,
        });
    }
    let search = Search {
        grid,
        c1: norm_children(k1)?,
        c2: norm_children(k2)?,
        r2,
    };
    let moves: Vec<Vec<Move>> = (0..layers)
        .map(|l| move_list(search.c1[l / r2].len(), search.c2[l % r2].len()))
        .collect();
    let base: Vec<bool> = (0..cells)
        .map(|c| forces_overlap(grid, c / grid.nt, c % grid.nt))
        .collect();
    let mut mask: Vec<Vec<bool>> = vec![base; layers];
    let supported = |mask: &Vec<Vec<bool>>, sums: &Vec<Vec<u32>>, layer: usize, cell: usize| {
        moves[layer].iter().position(|&mv| {
            search
                .image(layer, cell, mv)
                .is_some_and(|r| mask[r.0][(r.1) * grid.nt + r.3] && rect_full(&sums[r.0], grid.nt, &r))
        })
    };
    loop {
        let sums: Vec<Vec<u32>> = mask.par_iter().map(|b| prefix(b, grid.ns, grid.nt)).collect();
        let next: Vec<Vec<bool>> = (0..layers)
            .into_par_iter()
            .map(|l| {
                (0..cells)
                    .map(|c| mask[l][c] && supported(&mask, &sums, l, c).is_some())
                    .collect()
            })
            .collect();
        if next == mask {
            break;
        }
        mask = next;
    }
    let members: usize = mask.iter().map(|b| b.iter().filter(|&&x| x).count()).sum();
    if members == 0 {
        return Ok(RecurrentOutcome::NotFound);
    }
    let sums: Vec<Vec<u32>> = mask.iter().map(|b| prefix(b, grid.ns, grid.nt)).collect();
    let witness = (0..layers)
        .map(|l| {
            (0..cells)
                .filter(|&c| mask[l][c])
                .map(|c| supported(&mask, &sums, l, c).expect("fixed point") as u16)
                .collect()
        })
        .collect();
    Ok(RecurrentOutcome::Certificate(Certificate {
        schema: 1,
        grid: *grid,
        pieces: (r1, r2),
        mask_rle: mask.iter().map(|b| rle_encode(b)).collect(),
        witness,
        members,
        sensitivity: sensitivity(k1, k2, &search),
    }))
}

fn sensitivity(k1: &RegularCantorSet, k2: &RegularCantorSet, search: &Search) -> f64 {
    let g = search.grid;
    // rescaled children depend on endpoints only through the target hulls
    let kappa = |k: &RegularCantorSet| {
        4.0 / (0..k.num_pieces())
            .map(|j| k.partition().target_hull(j).len())
            .fold(f64::INFINITY, f64::min)
    };
    let (k1c, k2c) = (kappa(k1), kappa(k2));
    let es = g.s_range.1.exp();
    let tm = g.t_range.0.abs().max(g.t_range.1.abs());
    let mut worst: f64 = 0.0;
    for c in search.c1.iter().flatten() {
        let a = c.ratio;
        worst = worst.max(k1c / a).max(k1c * ((tm + 1.0) / (a * a) + 1.0 / a));
        for d in search.c2.iter().flatten() {
            let b = d.ratio;
            worst = worst
                .max(k1c / a + k2c / b)
                .max(k1c * ((es + tm + 1.0) / (a * a) + 1.0 / a) + k2c * es / a);
        }
    }
    for d in search.c2.iter().flatten() {
        worst = worst.max(k2c / d.ratio).max(k2c * es);
    }
    let min_len = |k: &RegularCantorSet| k.pieces().iter().map(|p| p.len()).fold(f64::INFINITY, f64::min);
    let (l1, l2) = (min_len(k1), min_len(k2));
    worst.max(2.0 / l1 + 2.0 / l2).max((2.0 + 2.0 * tm) / l1)
}

/// Outcome of re-checking a certificate from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub valid: bool,
    pub members_checked: usize,
    pub failures: Vec<String>,
}

/// Re-verifies every member cell of `cert` against the two sets.
///
/// Shares no code with the search: children come from depth-1 covers and
/// images are taken over the four cell corners.
pub fn verify_certificate(cert: &Certificate, k1: &RegularCantorSet, k2: &RegularCantorSet) -> Result<CheckReport> {
    let g = &cert.grid;
    let mut failures = Vec::new();
    let mut fail = |msg: String| {
        if failures.len() < 20 {
            failures.push(msg);
        }
    };
    if cert.pieces != (k1.num_pieces(), k2.num_pieces()) {
        return Err(Error::invalid("certificate does not match the sets"));
    }
    let cells = g.ns * g.nt;
    // decode the mask
    let mut mask = Vec::new();
    for runs in &cert.mask_rle {
        let mut bits = Vec::with_capacity(cells);
        let mut on = false;
        for &n in runs {
            for _ in 0..n {
                bits.push(on);
            }
            on = !on;
        }
        if bits.len() != cells {
            return Err(Error::invalid("mask run lengths do not cover the grid"));
        }
        mask.push(bits);
    }
    if mask.len() != cert.pieces.0 * cert.pieces.1 || cert.witness.len() != mask.len() {
        return Err(Error::invalid("certificate layer count mismatch"));
    }
    let kids = |k: &RegularCantorSet| -> Result<Vec<Vec<(usize, f64, f64)>>> {
        let cover = refine(k, 1)?;
        let mut out = vec![Vec::new(); k.num_pieces()];
        for (iv, w) in cover.intervals.iter().zip(&cover.addresses) {
            let p = k.pieces()[w[0] as usize];
            out[w[0] as usize].push((w[1] as usize, iv.len() / p.len(), (iv.lo - p.lo) / p.len()));
        }
        Ok(out)
    };
    let (c1, c2) = (kids(k1)?, kids(k2)?);
    let r2 = cert.pieces.1;
    let hs = (g.s_range.1 - g.s_range.0) / g.ns as f64;
    let ht = (g.t_range.1 - g.t_range.0) / g.nt as f64;
    let mut checked = 0usize;
    for (layer, bits) in mask.iter().enumerate() {
        let (j1, j2) = (layer / r2, layer % r2);
        let (n1, n2) = (c1[j1].len(), c2[j2].len());
        let mut wit = cert.witness[layer].iter();
        for cell in (0..cells).filter(|&c| bits[c]) {
            checked += 1;
            let Some(&w) = wit.next() else {
                fail(format!("layer {layer}: missing witness"));
                break;
            };
            let (is, it) = (cell / g.nt, cell % g.nt);
            let s0 = g.s_range.0 + hs * is as f64;
            let t0 = g.t_range.0 + ht * it as f64;
            let (s1, t1) = (s0 + hs, t0 + ht);
            if !(t1 <= 1.0 && t0 + s0.exp() >= 0.0) {
                fail(format!("layer {layer} cell ({is},{it}): hulls may be disjoint"));
                continue;
            }
            let w = w as usize;
            // (target layer, position map)
            let (tl, f): ((usize, usize), Box<dyn Fn(f64, f64) -> (f64, f64)>) = if w < n1 {
                let (tg, a, b) = c1[j1][w];
                ((tg, j2), Box::new(move |s, t| (s - a.ln(), (t - b) / a)))
            } else if w < n1 + n2 {
                let (tg, a, b) = c2[j2][w - n1];
                ((j1, tg), Box::new(move |s, t| (s + a.ln(), s.exp() * b + t)))
            } else if w < n1 + n2 + n1 * n2 {
                let v = w - n1 - n2;
                let (ta, a1, b1) = c1[j1][v / n2];
                let (tb, a2, b2) = c2[j2][v % n2];
                (
                    (ta, tb),
                    Box::new(move |s, t| (s + a2.ln() - a1.ln(), (s.exp() * b2 + t - b1) / a1)),
                )
            } else {
                fail(format!("layer {layer} cell ({is},{it}): bad move index {w}"));
                continue;
            };
            let corners = [f(s0, t0), f(s0, t1), f(s1, t0), f(s1, t1)];
            let lo_s = corners.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
            let hi_s = corners.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
            let lo_t = corners.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            let hi_t = corners.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
            let m = g.margin as i64;
            let eps = 1e-12;
            let a0 = ((lo_s - eps * (1.0 + lo_s.abs()) - g.s_range.0) / hs).floor() as i64 - m;
            let a1 = ((hi_s + eps * (1.0 + hi_s.abs()) - g.s_range.0) / hs).floor() as i64 + m;
            let b0 = ((lo_t - eps * (1.0 + lo_t.abs()) - g.t_range.0) / ht).floor() as i64 - m;
            let b1 = ((hi_t + eps * (1.0 + hi_t.abs()) - g.t_range.0) / ht).floor() as i64 + m;
            if a0 < 0 || b0 < 0 || a1 >= g.ns as i64 || b1 >= g.nt as i64 {
                fail(format!("layer {layer} cell ({is},{it}): image leaves the grid"));
                continue;
            }
            let target = &mask[tl.0 * r2 + tl.1];
            let inside = (a0..=a1).all(|a| (b0..=b1).all(|b| target[a as usize * g.nt + b as usize]));
            if !inside {
                fail(format!("layer {layer} cell ({is},{it}): image not inside the region"));
            }
        }
        if wit.next().is_some() {
            fail(format!("layer {layer}: extra witnesses"));
        }
    }
    if checked != cert.members {
        fail(format!("member count {} != claimed {}", checked, cert.members));
    }
    Ok(CheckReport {
        valid: failures.is_empty(),
        members_checked: checked,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::{gap_lemma_test, intersect_test, GapLemmaOutcome};
    use crate::interval::Interval;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn fifth() -> RegularCantorSet {
        RegularCantorSet::build_affine_full(vec![iv(0.0, 0.4), iv(0.6, 1.0)]).unwrap()
    }

    fn thin() -> RegularCantorSet {
        RegularCantorSet::build_affine_full(vec![iv(0.0, 0.1), iv(0.9, 1.0)]).unwrap()
    }

    #[test]
    fn rle_round_trip() {
        let bits = [false, false, true, true, true, false, true];
        assert_eq!(rle_encode(&bits), vec![2, 3, 1, 1]);
        assert_eq!(rle_encode(&[true]), vec![0, 1]);
    }

    #[test]
    fn middle_fifth_has_a_certificate() {
        let grid = PositionGrid::standard(200, 200, 1);
        let out = recurrent_compact_search(&fifth(), &fifth(), &grid).unwrap();
        let cert = out.certificate().expect("certificate");
        assert!(cert.members > 0);
        let report = verify_certificate(cert, &fifth(), &fifth()).unwrap();
        assert!(report.valid, "{:?}", report.failures);
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(&back, cert);
        assert!(cert.certifies_translation(&fifth(), &fifth(), 0.3));
        // member positions pass the gap lemma as well
        let p = cert.interior_position().unwrap();
        let moved = fifth().affine_image(p.s.exp(), p.t).unwrap();
        assert_eq!(gap_lemma_test(&fifth(), &moved, 0.0), GapLemmaOutcome::CertifiedIntersection);
        assert!(!intersect_test(&fifth(), &moved, 0.0, 10).unwrap().is_disjoint());
    }

    #[test]
    fn tampered_certificate_fails() {
        let grid = PositionGrid::standard(120, 120, 1);
        let cert = recurrent_compact_search(&fifth(), &fifth(), &grid)
            .unwrap()
            .certificate()
            .cloned()
            .unwrap();
        let mut bad = cert.clone();
        // claim every cell of the first layer
        bad.mask_rle[0] = vec![0, (grid.ns * grid.nt) as u32];
        assert!(!verify_certificate(&bad, &fifth(), &fifth()).unwrap().valid);
    }

    #[test]
    fn thin_pair_and_empty_box_find_nothing() {
        let grid = PositionGrid::standard(100, 100, 1);
        assert_eq!(recurrent_compact_search(&thin(), &thin(), &grid).unwrap(), RecurrentOutcome::NotFound);
        let far = PositionGrid::new((-1.0, 1.0), (2.0, 3.0), 20, 20, 1).unwrap();
        assert_eq!(recurrent_compact_search(&fifth(), &fifth(), &far).unwrap(), RecurrentOutcome::NotFound);
        assert!(matches!(
            recurrent_compact_search(&RegularCantorSet::gauss(2).unwrap(), &fifth(), &grid),
            Err(Error::NonAffineInput)
        ));
    }
}
