//! Regular Cantor sets defined by expanding Markov maps.
//!
//! A set is given by disjoint compact pieces `I_0 < I_1 < ... < I_{r-1}`, a
//! transition relation saying which pieces each branch covers, and one
//! expanding branch per piece mapping it onto the convex hull of its targets.
//! The Cantor set is the set of points whose forward orbit never leaves the
//! pieces. Depth-`n` covers are the connected components of the `n`-th
//! preimage of the pieces.

mod cover;
mod maps;

pub use cover::{contains, refine, refine_with, Containment, Cover, CoverConfig, Word};
pub(crate) use cover::{CoverTree, Cursor, Stop};
pub use maps::{recognize_rational, AffineMap, Mobius, Q};
pub(crate) use maps::{q_to_f64, Chart};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Relative tolerance for image-versus-hull checks of floating constructions.
pub const TAU_MARKOV: f64 = 1e-9;

/// How a branch acts on its piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BranchKind {
    Affine(AffineMap),
    Moebius(Mobius),
}

/// The restriction of the expanding map to one piece.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchMap {
    pub domain: Interval,
    pub kind: BranchKind,
    /// Bounds `[m, M]` on `|derivative|` over the domain.
    pub derivative_bounds: (f64, f64),
}

impl BranchMap {
    fn new(domain: Interval, kind: BranchKind) -> Result<Self> {
        let derivative_bounds = match &kind {
            BranchKind::Affine(m) => (m.slope.abs(), m.slope.abs()),
            BranchKind::Moebius(m) => {
                if m.det().abs() != 1 {
                    return Err(Error::invalid("Möbius branch must have determinant ±1"));
                }
                if !m.regular_on(&domain) {
                    return Err(Error::invalid("Möbius branch has a pole on its piece"));
                }
                let (a, b) = (m.abs_derivative(domain.lo), m.abs_derivative(domain.hi));
                (a.min(b), a.max(b))
            }
        };
        Ok(BranchMap {
            domain,
            kind,
            derivative_bounds,
        })
    }

    pub fn apply(&self, x: f64) -> f64 {
        match &self.kind {
            BranchKind::Affine(m) => m.apply(x),
            BranchKind::Moebius(m) => m.apply(x),
        }
    }

    /// Image of the whole piece.
    pub fn image(&self) -> Interval {
        Interval::spanning(self.apply(self.domain.lo), self.apply(self.domain.hi))
    }

    pub fn preserves_orientation(&self) -> bool {
        match &self.kind {
            BranchKind::Affine(m) => m.slope > 0.0,
            BranchKind::Moebius(m) => m.det() > 0,
        }
    }

    pub(crate) fn inverse_chart(&self) -> Chart {
        match &self.kind {
            BranchKind::Affine(m) => Chart::Affine(m.inverse()),
            BranchKind::Moebius(m) => Chart::Mobius(m.inverse()),
        }
    }
}

/// Ordered disjoint pieces plus the transition relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovPartition {
    pub pieces: Vec<Interval>,
    /// `transitions[j]` lists, in increasing order, the pieces covered by the branch on `j`.
    pub transitions: Vec<Vec<usize>>,
}

impl MarkovPartition {
    /// Builds the partition from `(j, s)` pairs and checks disjointness and mixing.
    pub fn new(pieces: Vec<Interval>, pairs: &[(usize, usize)]) -> Result<Self> {
        let r = pieces.len();
        if r == 0 {
            return Err(Error::invalid("partition needs at least one piece"));
        }
        for (i, p) in pieces.iter().enumerate() {
            if !(p.lo < p.hi) {
                return Err(Error::invalid(format!("piece {i} has no interior")));
            }
        }
        for i in 1..r {
            if !(pieces[i - 1].hi < pieces[i].lo) {
                return Err(Error::OverlappingPieces(i - 1, i));
            }
        }
        let mut transitions = vec![Vec::new(); r];
        for &(j, s) in pairs {
            if j >= r || s >= r {
                return Err(Error::invalid(format!("transition ({j}, {s}) out of range")));
            }
            transitions[j].push(s);
        }
        for (j, t) in transitions.iter_mut().enumerate() {
            t.sort_unstable();
            t.dedup();
            if t.is_empty() {
                return Err(Error::invalid(format!("piece {j} has no transitions")));
            }
        }
        let partition = MarkovPartition {
            pieces,
            transitions,
        };
        if !partition.is_mixing() {
            return Err(Error::NonMixingTransitions);
        }
        Ok(partition)
    }

    /// Full shift on `r` pieces.
    pub fn full(pieces: Vec<Interval>) -> Result<Self> {
        let r = pieces.len();
        let pairs: Vec<_> = (0..r).flat_map(|j| (0..r).map(move |s| (j, s))).collect();
        Self::new(pieces, &pairs)
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Some power `A^k`, `k <= r^2`, of the transition matrix is strictly positive.
    pub fn is_mixing(&self) -> bool {
        let r = self.len();
        let base: Vec<Vec<bool>> = (0..r)
            .map(|j| (0..r).map(|s| self.transitions[j].contains(&s)).collect())
            .collect();
        let mut power = base.clone();
        for _ in 0..r * r {
            if power.iter().all(|row| row.iter().all(|&b| b)) {
                return true;
            }
            power = (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| (0..r).any(|k| power[i][k] && base[k][j]))
                        .collect()
                })
                .collect();
        }
        false
    }

    /// Convex hull of the targets of piece `j`.
    pub fn target_hull(&self, j: usize) -> Interval {
        let t = &self.transitions[j];
        Interval {
            lo: self.pieces[t[0]].lo,
            hi: self.pieces[*t.last().unwrap()].hi,
        }
    }

    pub fn hull(&self) -> Interval {
        Interval {
            lo: self.pieces[0].lo,
            hi: self.pieces[self.len() - 1].hi,
        }
    }
}

/// A validated regular Cantor set.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularCantorSet {
    partition: MarkovPartition,
    branches: Vec<BranchMap>,
    exact_pieces: Option<Vec<(Q, Q)>>,
    inverse_charts: Vec<Chart>,
}

impl RegularCantorSet {
    /// Validates explicit branches against the partition.
    pub fn new(partition: MarkovPartition, kinds: Vec<BranchKind>) -> Result<Self> {
        let exact_maps = kinds
            .iter()
            .all(|k| matches!(k, BranchKind::Affine(m) if m.is_exact()));
        let exact = exact_maps
            .then(|| {
                partition
                    .pieces
                    .iter()
                    .map(|p| recognize_rational(p.lo).zip(recognize_rational(p.hi)))
                    .collect::<Option<Vec<_>>>()
            })
            .flatten();
        Self::with_exact(partition, kinds, exact)
    }

    fn with_exact(
        partition: MarkovPartition,
        kinds: Vec<BranchKind>,
        exact_pieces: Option<Vec<(Q, Q)>>,
    ) -> Result<Self> {
        if kinds.len() != partition.len() {
            return Err(Error::invalid("need exactly one branch per piece"));
        }
        let all_affine = kinds.iter().all(|k| matches!(k, BranchKind::Affine(_)));
        let all_moebius = kinds.iter().all(|k| matches!(k, BranchKind::Moebius(_)));
        if !all_affine && !all_moebius {
            return Err(Error::invalid("branches must be all affine or all Möbius"));
        }
        let branches = kinds
            .into_iter()
            .zip(&partition.pieces)
            .map(|(kind, &domain)| BranchMap::new(domain, kind))
            .collect::<Result<Vec<_>>>()?;
        let set = RegularCantorSet {
            inverse_charts: branches.iter().map(BranchMap::inverse_chart).collect(),
            partition,
            branches,
            exact_pieces,
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        let scale = self.partition.hull().len();
        for (j, branch) in self.branches.iter().enumerate() {
            let m = branch.derivative_bounds.0;
            if !(m > 1.0) {
                return Err(Error::ContractionViolation {
                    piece: j,
                    min_derivative: m,
                });
            }
            let hull = self.partition.target_hull(j);
            let err = self.image_error(j, &hull);
            if err > TAU_MARKOV * scale {
                return Err(Error::MarkovViolation { piece: j, error: err });
            }
            // pieces inside the image that are not listed as targets
            let t = &self.partition.transitions[j];
            for (s, p) in self.partition.pieces.iter().enumerate() {
                if !t.contains(&s) && p.overlaps(&hull) {
                    return Err(Error::MarkovViolation {
                        piece: j,
                        error: f64::INFINITY,
                    });
                }
            }
        }
        Ok(())
    }

    fn image_error(&self, j: usize, hull: &Interval) -> f64 {
        let branch = &self.branches[j];
        if let (BranchKind::Affine(m), Some(exact)) = (&branch.kind, &self.exact_pieces) {
            if let Some((s, o)) = &m.exact {
                let (lo, hi) = &exact[j];
                let t = &self.partition.transitions[j];
                let (hlo, hhi) = (&exact[t[0]].0, &exact[*t.last().unwrap()].1);
                let img = [s * lo + o, s * hi + o];
                let (ilo, ihi) = if img[0] <= img[1] {
                    (&img[0], &img[1])
                } else {
                    (&img[1], &img[0])
                };
                return if ilo == hlo && ihi == hhi {
                    0.0
                } else {
                    q_to_f64(&(ilo - hlo)).abs().max(q_to_f64(&(ihi - hhi)).abs())
                };
            }
        }
        let img = branch.image();
        (img.lo - hull.lo).abs().max((img.hi - hull.hi).abs())
    }

    /// Orientation-preserving affine branches onto the hull of each piece's targets.
    pub fn build_affine(pieces: Vec<Interval>, pairs: &[(usize, usize)]) -> Result<Self> {
        let exact: Option<Vec<(Q, Q)>> = pieces
            .iter()
            .map(|p| recognize_rational(p.lo).zip(recognize_rational(p.hi)))
            .collect();
        let partition = MarkovPartition::new(pieces, pairs)?;
        Self::affine_auto(partition, exact)
    }

    /// Same as [`build_affine`](Self::build_affine) with exact rational pieces.
    pub fn build_affine_exact(pieces: &[(Q, Q)], pairs: &[(usize, usize)]) -> Result<Self> {
        let float: Vec<Interval> = pieces
            .iter()
            .map(|(a, b)| Interval::new(q_to_f64(a), q_to_f64(b)))
            .collect::<Result<_>>()?;
        let partition = MarkovPartition::new(float, pairs)?;
        Self::affine_auto(partition, Some(pieces.to_vec()))
    }

    /// Affine set with full transitions.
    pub fn build_affine_full(pieces: Vec<Interval>) -> Result<Self> {
        let r = pieces.len();
        let pairs: Vec<_> = (0..r).flat_map(|j| (0..r).map(move |s| (j, s))).collect();
        Self::build_affine(pieces, &pairs)
    }

    fn affine_auto(partition: MarkovPartition, exact: Option<Vec<(Q, Q)>>) -> Result<Self> {
        let kinds = (0..partition.len())
            .map(|j| {
                let piece = partition.pieces[j];
                let hull = partition.target_hull(j);
                let exact_map = exact.as_ref().and_then(|e| {
                    let (lo, hi) = &e[j];
                    let t = &partition.transitions[j];
                    let (hlo, hhi) = (&e[t[0]].0, &e[*t.last().unwrap()].1);
                    let slope = (hhi - hlo) / (hi - lo);
                    let offset = hlo - &slope * lo;
                    Some(AffineMap::from_exact(slope, offset))
                });
                BranchKind::Affine(exact_map.unwrap_or_else(|| {
                    let slope = hull.len() / piece.len();
                    AffineMap {
                        slope,
                        offset: hull.lo - slope * piece.lo,
                        exact: None,
                    }
                }))
            })
            .collect();
        Self::with_exact(partition, kinds, exact)
    }

    /// The set of `[0,1]` numbers whose continued-fraction digits all lie in `1..=n`.
    ///
    /// Piece `j` is the cylinder of first digit `n - j`, so pieces come out in
    /// increasing order; the branch there is the Gauss map `x -> 1/x - a`.
    pub fn gauss(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(
                "a one-symbol system is a single point, not a Cantor set",
            ));
        }
        let (min, max) = gauss_hull(n);
        let pieces: Vec<Interval> = (0..n)
            .map(|j| {
                let a = (n - j) as f64;
                Interval {
                    lo: 1.0 / (a + max),
                    hi: 1.0 / (a + min),
                }
            })
            .collect();
        let kinds = (0..n)
            .map(|j| {
                let a = (n - j) as i128;
                BranchKind::Moebius(Mobius { a: -a, b: 1, c: 1, d: 0 })
            })
            .collect();
        let partition = MarkovPartition::full(pieces)?;
        Self::with_exact(partition, kinds, None)
    }

    pub fn partition(&self) -> &MarkovPartition {
        &self.partition
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.partition.pieces
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.partition.transitions
    }

    pub fn branches(&self) -> &[BranchMap] {
        &self.branches
    }

    pub fn num_pieces(&self) -> usize {
        self.partition.len()
    }

    pub fn hull(&self) -> Interval {
        self.partition.hull()
    }

    pub fn is_affine(&self) -> bool {
        self.branches
            .iter()
            .all(|b| matches!(b.kind, BranchKind::Affine(_)))
    }

    pub fn is_exact(&self) -> bool {
        self.exact_pieces.is_some()
            && self.branches.iter().all(|b| match &b.kind {
                BranchKind::Affine(m) => m.is_exact(),
                BranchKind::Moebius(_) => false,
            })
    }

    /// Any orientation-reversing branch present.
    pub fn has_reversing_branch(&self) -> bool {
        self.branches.iter().any(|b| !b.preserves_orientation())
    }

    pub(crate) fn exact_piece(&self, j: usize) -> Option<&(Q, Q)> {
        self.exact_pieces.as_ref().map(|e| &e[j])
    }

    pub(crate) fn inverse_chart(&self, j: usize) -> &Chart {
        &self.inverse_charts[j]
    }

    pub(crate) fn root_chart(&self) -> Chart {
        if self.is_affine() {
            Chart::identity_affine()
        } else {
            Chart::Mobius(Mobius::IDENTITY)
        }
    }

    /// Slopes of the affine branches, if every branch is affine.
    pub fn affine_slopes(&self) -> Option<Vec<f64>> {
        self.branches
            .iter()
            .map(|b| match &b.kind {
                BranchKind::Affine(m) => Some(m.slope),
                BranchKind::Moebius(_) => None,
            })
            .collect()
    }

    /// The image set `a K + b` for affine `K`, `a != 0`.
    ///
    /// Branches are conjugated, so slopes (and hence all fractal invariants)
    /// are unchanged; for `a < 0` the pieces are re-indexed to stay sorted.
    pub fn affine_image(&self, a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("affine image needs finite a != 0"));
        }
        if !self.is_affine() {
            return Err(Error::NonAffineInput);
        }
        let r = self.num_pieces();
        let idx = |j: usize| if a > 0.0 { j } else { r - 1 - j };
        let exact_ab = recognize_rational(a).zip(recognize_rational(b));
        let mut pieces = vec![Interval { lo: 0.0, hi: 0.0 }; r];
        let mut exact: Option<Vec<(Q, Q)>> = self
            .exact_pieces
            .as_ref()
            .and(exact_ab.as_ref())
            .map(|_| vec![(Q::from(0), Q::from(0)); r]);
        let mut kinds: Vec<Option<BranchKind>> = vec![None; r];
        for j in 0..r {
            let new_j = idx(j);
            pieces[new_j] = self.partition.pieces[j].affine(a, b);
            if let (Some(e), Some(src), Some((qa, qb))) =
                (exact.as_mut(), self.exact_pieces.as_ref(), exact_ab.as_ref())
            {
                let (lo, hi) = &src[j];
                let x = qa * lo + qb;
                let y = qa * hi + qb;
                e[new_j] = if x <= y { (x, y) } else { (y, x) };
            }
            let BranchKind::Affine(m) = &self.branches[j].kind else {
                unreachable!()
            };
            // conjugate: x -> s x + (a o + b - s b)
            let map = match (&m.exact, exact_ab.as_ref()) {
                (Some((s, o)), Some((qa, qb))) => {
                    AffineMap::from_exact(*s, qa * o + qb - s * qb)
                }
                _ => AffineMap {
                    slope: m.slope,
                    offset: a * m.offset + b - m.slope * b,
                    exact: None,
                },
            };
            kinds[new_j] = Some(BranchKind::Affine(map));
        }
        let pairs: Vec<(usize, usize)> = partition_pairs(&self.partition)
            .into_iter()
            .map(|(j, s)| (idx(j), idx(s)))
            .collect();
        let partition = MarkovPartition::new(pieces, &pairs)?;
        Self::with_exact(partition, kinds.into_iter().map(Option::unwrap).collect(), exact)
    }

    /// Rebuilds an affine set with piece endpoints moved by `deltas`
    /// (`2 r` values, low/high per piece); branches are re-derived so the
    /// Markov property holds by construction.
    pub fn perturbed_pieces(&self, deltas: &[f64]) -> Result<Self> {
        if !self.is_affine() {
            return Err(Error::NonAffineInput);
        }
        if deltas.len() != 2 * self.num_pieces() {
            return Err(Error::invalid("need two endpoint deltas per piece"));
        }
        let pieces = self
            .partition
            .pieces
            .iter()
            .enumerate()
            .map(|(j, p)| Interval::new(p.lo + deltas[2 * j], p.hi + deltas[2 * j + 1]))
            .collect::<Result<Vec<_>>>()?;
        let partition = MarkovPartition::new(pieces, &partition_pairs(&self.partition))?;
        Self::affine_auto(partition, None)
    }
}

fn partition_pairs(p: &MarkovPartition) -> Vec<(usize, usize)> {
    p.transitions
        .iter()
        .enumerate()
        .flat_map(|(j, t)| t.iter().map(move |&s| (j, s)))
        .collect()
}

/// Hull `[min, max]` of the continued-fraction set with digits `<= n`:
/// `min = [0; n, 1, n, 1, ...]`, `max = [0; 1, n, 1, n, ...]`.
pub fn gauss_hull(n: u32) -> (f64, f64) {
    let n = n as f64;
    // min solves n y^2 + n y - 1 = 0
    let min = 2.0 / (n + (n * n + 4.0 * n).sqrt());
    let max = 1.0 / (1.0 + min);
    (min, max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn ternary_has_slopes_three() {
        let k = RegularCantorSet::build_affine_full(vec![iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)]).unwrap();
        assert!(k.is_exact());
        for b in k.branches() {
            let BranchKind::Affine(m) = &b.kind else { panic!() };
            assert_eq!(m.exact.as_ref().unwrap().0, Q::from(3));
        }
        // psi(x) = 3x - floor(3x)
        for x in [0.0f64, 0.1, 0.25, 0.7, 0.9, 1.0 - 1e-9] {
            let j = usize::from(x > 0.5);
            let expected = 3.0 * x - (3.0 * x).floor();
            assert!((k.branches()[j].apply(x) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_piece_is_not_expanding() {
        let err = RegularCantorSet::build_affine(vec![iv(0.0, 1.0)], &[(0, 0)]).unwrap_err();
        assert!(matches!(err, Error::ContractionViolation { piece: 0, .. }));
    }

    #[test]
    fn middle_fifth_slopes() {
        let k = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.4), iv(0.6, 1.0)]).unwrap();
        for b in k.branches() {
            assert_eq!(b.derivative_bounds, (2.5, 2.5));
        }
    }

    #[test]
    fn overlapping_pieces_rejected() {
        let err = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.5), iv(0.4, 1.0)]).unwrap_err();
        assert_eq!(err, Error::OverlappingPieces(0, 1));
        let err = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.5), iv(0.5, 1.0)]).unwrap_err();
        assert_eq!(err, Error::OverlappingPieces(0, 1));
    }

    #[test]
    fn non_mixing_rejected() {
        // two pieces each mapping only to themselves
        let err = RegularCantorSet::build_affine(
            vec![iv(0.0, 0.1), iv(0.9, 1.0)],
            &[(0, 0), (1, 1)],
        )
        .unwrap_err();
        assert_eq!(err, Error::NonMixingTransitions);
        // a cycle 0 -> 1 -> 0 is irreducible but periodic
        let p = MarkovPartition::new(vec![iv(0.0, 0.1), iv(0.9, 1.0)], &[(0, 1), (1, 0)]);
        assert_eq!(p.unwrap_err(), Error::NonMixingTransitions);
    }

    #[test]
    fn golden_mean_shift_is_mixing() {
        // 0 -> {0,1}, 1 -> {0}
        let k = RegularCantorSet::build_affine(
            vec![iv(0.0, 0.3), iv(0.5, 0.6)],
            &[(0, 0), (0, 1), (1, 0)],
        )
        .unwrap();
        assert_eq!(k.partition().target_hull(1), iv(0.0, 0.3));
    }

    #[test]
    fn gauss_one_is_degenerate() {
        assert!(matches!(RegularCantorSet::gauss(1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn gauss_hull_endpoints() {
        // [0; 2,1,2,1,...] = (sqrt 3 - 1)/2, [0; 1,2,1,2,...] = sqrt 3 - 1
        let (lo, hi) = gauss_hull(2);
        assert!((lo - (3f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((hi - (3f64.sqrt() - 1.0)).abs() < 1e-15);
        // C(4): [(sqrt 2 - 1)/2, 2 (sqrt 2 - 1)]
        let (lo, hi) = gauss_hull(4);
        assert!((lo - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((hi - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let k = RegularCantorSet::gauss(4).unwrap();
        assert!(k.has_reversing_branch());
        assert_eq!(k.num_pieces(), 4);
    }

    #[test]
    fn explicit_branch_must_hit_hull() {
        let p = MarkovPartition::full(vec![iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)]).unwrap();
        let kinds = vec![
            BranchKind::Affine(AffineMap::new(3.0, 0.0)),
            BranchKind::Affine(AffineMap::new(3.0, -2.1)),
        ];
        assert!(matches!(
            RegularCantorSet::new(p.clone(), kinds),
            Err(Error::MarkovViolation { piece: 1, .. })
        ));
        let reversing = vec![
            BranchKind::Affine(AffineMap::new(-3.0, 1.0)),
            BranchKind::Affine(AffineMap::new(3.0, -2.0)),
        ];
        let k = RegularCantorSet::new(p, reversing).unwrap();
        assert!(k.has_reversing_branch());
    }

    #[test]
    fn affine_image_reflects_and_keeps_slopes() {
        let k = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.5), iv(0.75, 1.0)]).unwrap();
        let m = k.affine_image(-2.0, 1.0).unwrap();
        assert_eq!(m.pieces(), &[iv(-1.0, -0.5), iv(0.0, 1.0)]);
        let mut a = k.affine_slopes().unwrap();
        let mut b = m.affine_slopes().unwrap();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
        assert!(m.is_exact());
    }
}
