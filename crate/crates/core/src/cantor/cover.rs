//! Construction covers: connected components of preimages of the pieces.

use serde::{Deserialize, Serialize};

use super::{Chart, RegularCantorSet};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Symbolic address of a construction interval: the pieces visited by its orbit.
pub type Word = Vec<u16>;

/// Limits applied while refining.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverConfig {
    /// Maximum number of intervals in any single cover.
    pub budget: usize,
    /// Intervals shorter than this abort refinement with `PrecisionLoss`.
    pub min_length: f64,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            budget: 2_000_000,
            min_length: 1e-14,
        }
    }
}

/// The depth-`n` cover of a Cantor set.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub depth: usize,
    /// Sorted by `lo`, pairwise disjoint.
    pub intervals: Vec<Interval>,
    pub addresses: Vec<Word>,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn max_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).fold(0.0, f64::max)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Index of the interval containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let i = self.intervals.partition_point(|iv| iv.lo <= x).checked_sub(1)?;
        self.intervals[i].contains(x).then_some(i)
    }
}

/// Result of a depth-limited membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Containment {
    /// `x` lies in a gap of the cover at this (minimal) depth, so `x` is not in the set.
    ExcludedAtDepth(usize),
    /// `x` is still covered at this depth; nothing is decided about the set itself.
    InCoverAtDepth(usize),
}

/// When a tree node stops being refined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Stop {
    /// Every leaf at exactly this cover depth.
    Depth(usize),
    /// Refine while longer than `length`, never past `max_depth`.
    Scale { length: f64, max_depth: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TreeNode {
    pub interval: Interval,
    /// 0 for the virtual root (the hull); cover depth is `level - 1`.
    pub level: u32,
    pub state: u16,
    pub parent: u32,
    pub first_child: u32,
    pub n_children: u32,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.n_children == 0
    }
}

/// Arena of construction intervals, children stored contiguously and sorted.
#[derive(Debug, Clone)]
pub(crate) struct CoverTree {
    pub nodes: Vec<TreeNode>,
    pub leaves: usize,
}

const ROOT_STATE: u16 = u16::MAX;

impl CoverTree {
    pub fn build(k: &RegularCantorSet, stop: Stop, cfg: &CoverConfig) -> Result<Self> {
        let mut nodes = vec![TreeNode {
            interval: k.hull(),
            level: 0,
            state: ROOT_STATE,
            parent: 0,
            first_child: 0,
            n_children: 0,
        }];
        // frontier entries: node index, chart mapping piece coordinates into place
        let mut frontier: Vec<(u32, Chart)> = vec![(0, k.root_chart())];
        let mut leaves = 1usize;
        while !frontier.is_empty() {
            let expand: Vec<bool> = frontier
                .iter()
                .map(|(i, _)| wants_children(&nodes[*i as usize], stop))
                .collect();
            let extra: usize = frontier
                .iter()
                .zip(&expand)
                .filter(|(_, &e)| e)
                .map(|((i, _), _)| fanout(k, nodes[*i as usize].state).saturating_sub(1))
                .sum();
            if extra == 0 {
                break;
            }
            if leaves + extra > cfg.budget {
                return Err(Error::BudgetExceeded {
                    what: "cover intervals",
                    needed: (leaves + extra) as u128,
                    budget: cfg.budget as u128,
                });
            }
            leaves += extra;
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for ((idx, chart), go) in frontier.into_iter().zip(expand) {
                if !go {
                    continue;
                }
                let parent = nodes[idx as usize];
                let (base, targets): (Chart, Vec<usize>) = if parent.state == ROOT_STATE {
                    (chart, (0..k.num_pieces()).collect())
                } else {
                    let s = parent.state as usize;
                    let base = chart
                        .then_inner(k.inverse_chart(s))
                        .ok_or(Error::PrecisionLoss {
                            depth: parent.level as usize,
                            length: 0.0,
                            floor: cfg.min_length,
                        })?;
                    (base, k.transitions()[s].clone())
                };
                let mut kids: Vec<(Interval, usize)> = targets
                    .iter()
                    .map(|&t| (base.apply_piece(&k.pieces()[t], k.exact_piece(t)), t))
                    .collect();
                kids.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
                let first = nodes.len() as u32;
                for &(iv, t) in &kids {
                    if iv.len() < cfg.min_length {
                        return Err(Error::PrecisionLoss {
                            depth: parent.level as usize,
                            length: iv.len(),
                            floor: cfg.min_length,
                        });
                    }
                    nodes.push(TreeNode {
                        interval: iv,
                        level: parent.level + 1,
                        state: t as u16,
                        parent: idx,
                        first_child: 0,
                        n_children: 0,
                    });
                    next.push((nodes.len() as u32 - 1, base.clone()));
                }
                let p = &mut nodes[idx as usize];
                p.first_child = first;
                p.n_children = kids.len() as u32;
            }
            frontier = next;
        }
        Ok(CoverTree { nodes, leaves })
    }

    pub fn children_idx(&self, idx: u32) -> std::ops::Range<u32> {
        let n = &self.nodes[idx as usize];
        n.first_child..n.first_child + n.n_children
    }

    /// Leaf indices in increasing position order.
    pub fn leaf_indices(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.leaves);
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i as usize];
            if n.is_leaf() {
                out.push(i);
            } else {
                stack.extend(self.children_idx(i).rev());
            }
        }
        out
    }

    pub fn address(&self, mut idx: u32) -> Word {
        let mut w = Vec::new();
        while idx != 0 {
            let n = &self.nodes[idx as usize];
            w.push(n.state);
            idx = n.parent;
        }
        w.reverse();
        w
    }

    pub fn into_cover(self, depth: usize) -> Cover {
        let leaves = self.leaf_indices();
        Cover {
            depth,
            intervals: leaves.iter().map(|&i| self.nodes[i as usize].interval).collect(),
            addresses: leaves.iter().map(|&i| self.address(i)).collect(),
        }
    }
}

fn wants_children(node: &TreeNode, stop: Stop) -> bool {
    if node.state == ROOT_STATE {
        return true;
    }
    let depth = node.level as usize - 1;
    match stop {
        Stop::Depth(n) => depth < n,
        Stop::Scale { length, max_depth } => depth < max_depth && node.interval.len() > length,
    }
}

fn fanout(k: &RegularCantorSet, state: u16) -> usize {
    if state == ROOT_STATE {
        k.num_pieces()
    } else {
        k.transitions()[state as usize].len()
    }
}

/// A construction interval that knows how to produce its children.
#[derive(Debug, Clone)]
pub(crate) struct Cursor {
    pub interval: Interval,
    pub state: usize,
    pub depth: usize,
    chart: Chart,
}

impl Cursor {
    /// The depth-0 intervals (the pieces).
    pub fn pieces(k: &RegularCantorSet) -> Vec<Cursor> {
        let chart = k.root_chart();
        (0..k.num_pieces())
            .map(|j| Cursor {
                interval: k.pieces()[j],
                state: j,
                depth: 0,
                chart: chart.clone(),
            })
            .collect()
    }

    /// Children in increasing position order.
    pub fn children(&self, k: &RegularCantorSet, min_length: f64) -> Result<Vec<Cursor>> {
        let lost = |length: f64| Error::PrecisionLoss {
            depth: self.depth + 1,
            length,
            floor: min_length,
        };
        let base = self
            .chart
            .then_inner(k.inverse_chart(self.state))
            .ok_or_else(|| lost(0.0))?;
        let mut out = Vec::with_capacity(k.transitions()[self.state].len());
        for &t in &k.transitions()[self.state] {
            let iv = base.apply_piece(&k.pieces()[t], k.exact_piece(t));
            if iv.len() < min_length {
                return Err(lost(iv.len()));
            }
            out.push(Cursor {
                interval: iv,
                state: t,
                depth: self.depth + 1,
                chart: base.clone(),
            });
        }
        out.sort_by(|a, b| a.interval.lo.total_cmp(&b.interval.lo));
        Ok(out)
    }
}

/// Depth-`n` cover with the default budget and length floor.
pub fn refine(k: &RegularCantorSet, n: usize) -> Result<Cover> {
    refine_with(k, n, &CoverConfig::default())
}

pub fn refine_with(k: &RegularCantorSet, n: usize, cfg: &CoverConfig) -> Result<Cover> {
    Ok(CoverTree::build(k, Stop::Depth(n), cfg)?.into_cover(n))
}

/// Descends the construction towards `x` for at most `n` levels.
pub fn contains(k: &RegularCantorSet, x: f64, n: usize) -> Containment {
    let Some(mut state) = k.pieces().iter().position(|p| p.contains(x)) else {
        return Containment::ExcludedAtDepth(0);
    };
    let mut chart = k.root_chart();
    for depth in 1..=n {
        let Some(base) = chart.then_inner(k.inverse_chart(state)) else {
            // endpoints no longer representable: stop descending
            return Containment::InCoverAtDepth(n);
        };
        let hit = k.transitions()[state].iter().copied().find(|&t| {
            base.apply_piece(&k.pieces()[t], k.exact_piece(t))
                .contains(x)
        });
        match hit {
            Some(t) => {
                state = t;
                chart = base;
            }
            None => return Containment::ExcludedAtDepth(depth),
        }
    }
    Containment::InCoverAtDepth(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{gauss_hull, Q};

    fn ternary() -> RegularCantorSet {
        RegularCantorSet::build_affine_exact(
            &[(Q::new(0, 1), Q::new(1, 3)), (Q::new(2, 3), Q::new(1, 1))],
            &[(0, 0), (0, 1), (1, 0), (1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn ternary_depth_zero_is_the_pieces() {
        let c = refine(&ternary(), 0).unwrap();
        assert_eq!(c.intervals, ternary().pieces());
        assert_eq!(c.addresses, vec![vec![0], vec![1]]);
    }

    #[test]
    fn ternary_depth_two_enumeration() {
        let c = refine(&ternary(), 2).unwrap();
        assert_eq!(c.len(), 8);
        for (i, iv) in c.intervals.iter().enumerate() {
            assert!((iv.len() - 1.0 / 27.0).abs() < 1e-15);
            // left endpoint in base 3 uses digits 0/2 given by the address
            let w = &c.addresses[i];
            let lo: f64 = w.iter().enumerate().map(|(k, &d)| 2.0 * d as f64 * 3f64.powi(-(k as i32 + 1))).sum();
            assert!((iv.lo - lo).abs() < 1e-15);
        }
    }

    #[test]
    fn budget_and_precision_guards() {
        let cfg = CoverConfig { budget: 100, ..Default::default() };
        let err = refine_with(&ternary(), 10, &cfg).unwrap_err();
        assert!(err.is_budget());
        let cfg = CoverConfig { budget: 1 << 24, min_length: 1e-6 };
        assert!(matches!(refine_with(&ternary(), 15, &cfg), Err(Error::PrecisionLoss { .. })));
    }

    #[test]
    fn gauss_two_depth_one() {
        let k = RegularCantorSet::gauss(2).unwrap();
        let c0 = refine(&k, 0).unwrap();
        let c1 = refine(&k, 1).unwrap();
        assert_eq!(c1.len(), 4);
        for iv in &c1.intervals {
            assert!(c0.intervals.iter().any(|p| p.contains_interval(iv)));
        }
        let (lo, hi) = gauss_hull(2);
        assert!((c1.intervals[0].lo - lo).abs() < 1e-15);
        assert!((c1.intervals[3].hi - hi).abs() < 1e-15);
    }

    #[test]
    fn containment_examples() {
        let k = ternary();
        assert_eq!(contains(&k, 0.5, 1), Containment::ExcludedAtDepth(0));
        assert_eq!(contains(&k, 0.25, 10), Containment::InCoverAtDepth(10));
        assert_eq!(contains(&k, 0.0, 25), Containment::InCoverAtDepth(25));
        // 0.2 = 0.0121..._3 falls in the gap (1/9, 2/9)
        assert_eq!(contains(&k, 0.2, 5), Containment::ExcludedAtDepth(1));
    }
}
