//! Randomized invariants, 1000 cases each with fixed seeds. Each check
//! returns the first failure found, already shrunk.

use cantorlab::cantor::refine;
use cantorlab::catalog::builtin;
use cantorlab::dimension::{hausdorff_dimension_moran, moran_root, thickness};
use cantorlab::intersect::{intersect_test, perturb, recurrent_compact_search, Certificate, PositionGrid, RelativePosition};
use cantorlab::setops::{cover_sum, SumOp};
use cantorlab::{Interval, IntervalUnion, RegularCantorSet};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

pub const CASES: u32 = 1000;

fn runner(seed: u64) -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    })
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Piece layout on `[0, 1]` from raw weights: `r` pieces and `r - 1` gaps.
fn layout(weights: &[f64]) -> Vec<(f64, f64)> {
    let total: f64 = weights.iter().sum();
    let mut x = 0.0;
    let mut out = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        let next = x + w / total;
        if i % 2 == 0 {
            out.push((x, next));
        }
        x = next;
    }
    out.last_mut().unwrap().1 = 1.0;
    out
}

fn affine_set(pieces: &[(f64, f64)]) -> RegularCantorSet {
    let iv = pieces.iter().map(|&(a, b)| Interval::new(a, b).unwrap()).collect();
    RegularCantorSet::build_affine_full(iv).unwrap()
}

/// Two or three pieces, each at most 45% of the hull, gaps at least 5%.
fn arb_layout() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop_oneof![
        (0.05f64..0.45, 0.05f64..0.45).prop_map(|(a, b)| layout(&[a, 1.0 - a - b, b])),
        prop::collection::vec(0.2f64..1.0, 5).prop_map(|w| {
            let s: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|x| (x / s).max(0.05)).collect();
            layout(&w)
        }),
    ]
}

fn arb_set() -> impl Strategy<Value = RegularCantorSet> {
    arb_layout().prop_map(|p| affine_set(&p))
}

fn nested(child: &[Interval], parent: &[Interval]) -> bool {
    child.iter().all(|c| {
        let i = parent.partition_point(|p| p.lo <= c.lo + 1e-12);
        i > 0 && parent[i - 1].lo <= c.lo + 1e-12 && c.hi <= parent[i - 1].hi + 1e-12
    })
}

fn scaled(pieces: &[(f64, f64)], a: f64, b: f64) -> RegularCantorSet {
    let mut p: Vec<(f64, f64)> = pieces
        .iter()
        .map(|&(lo, hi)| {
            let (x, y) = (a * lo + b, a * hi + b);
            (x.min(y), x.max(y))
        })
        .collect();
    p.sort_by(|u, v| u.0.total_cmp(&v.0));
    affine_set(&p)
}

fn close(u: &IntervalUnion, v: &IntervalUnion, tol: f64) -> bool {
    u.len() == v.len()
        && u.intervals()
            .iter()
            .zip(v.intervals())
            .all(|(x, y)| (x.lo - y.lo).abs() <= tol && (x.hi - y.hi).abs() <= tol)
}

struct Fixture {
    k: RegularCantorSet,
    cert: Certificate,
    /// Translations whose relative position sits `margin` cells deep inside the member set.
    interior: Vec<f64>,
}

fn deep_member(cert: &Certificate, mask: &[Vec<bool>], p: &RelativePosition) -> bool {
    let g = &cert.grid;
    let Some((is, it)) = g.locate(p.s, p.t) else {
        return false;
    };
    let m = g.margin;
    if is < m || it < m || is + m >= g.ns || it + m >= g.nt {
        return false;
    }
    let bits = &mask[p.state.0 * cert.pieces.1 + p.state.1];
    (is - m..=is + m).all(|a| (it - m..=it + m).all(|b| bits[a * g.nt + b]))
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let k = builtin("middle-fifth").unwrap();
        let cert = recurrent_compact_search(&k, &k, &PositionGrid::standard(200, 200, 1))
            .unwrap()
            .certificate()
            .cloned()
            .expect("middle-fifth pair has a certificate");
        let mask = cert.mask();
        let interior = (0..=4000)
            .map(|i| -1.0 + i as f64 / 2000.0)
            .filter(|&t| {
                RelativePosition::of_translation(&k, &k, t)
                    .iter()
                    .any(|p| deep_member(&cert, &mask, p))
            })
            .collect();
        Fixture { k, cert, interior }
    })
}


pub fn cover_nestedness() -> Result<(), String> {
    report(runner(0xC0FE_0001).run(&(arb_set(), 0usize..6), |(k, n)| {
        let a = refine(&k, n).unwrap();
        let b = refine(&k, n + 1).unwrap();
        prop_assert!(b.len() >= a.len());
        prop_assert!(nested(&b.intervals, &a.intervals));
        prop_assert!(b.total_length() <= a.total_length() + 1e-12);
        Ok(())
    }))
}

pub fn outer_measure_monotone() -> Result<(), String> {
    let strategy = (arb_set(), arb_set(), 0usize..4, any::<bool>(), 0.2f64..3.0);
    report(runner(0xC0FE_0002).run(&strategy, |(k1, k2, n, minus, lambda)| {
        let op = if minus { SumOp::Minus } else { SumOp::Plus };
        let a = cover_sum(&k1, &k2, n, op, lambda).unwrap();
        let b = cover_sum(&k1, &k2, n + 1, op, lambda).unwrap();
        prop_assert!(
            b.total_length() <= a.total_length() + 1e-12,
            "depth {} -> {}: {} > {}",
            n,
            n + 1,
            b.total_length(),
            a.total_length()
        );
        prop_assert!(nested(b.intervals(), a.intervals()));
        Ok(())
    }))
}

pub fn moran_map_monotone() -> Result<(), String> {
    let strategy = (prop::collection::vec(0.001f64..0.45, 2..12), 0.0f64..1.0, 0.0f64..1.0);
    report(runner(0xC0FE_0003).run(&strategy, |(lengths, d1, d2)| {
        let f = |d: f64| lengths.iter().map(|l| l.powf(d)).sum::<f64>();
        if d1 < d2 {
            prop_assert!(f(d1) > f(d2));
        } else if d2 < d1 {
            prop_assert!(f(d2) > f(d1));
        }
        let total: f64 = lengths.iter().sum();
        if total < 1.0 {
            let (d, width) = moran_root(&lengths, 1.0, 1e-12).unwrap();
            prop_assert!(width <= 1e-12);
            prop_assert!((0.0..=1.0 + 1e-9).contains(&d));
            // the bracket straddles the root
            prop_assert!(f(d - 1e-9) >= 1.0 && f(d + 1e-9) <= 1.0);
        }
        Ok(())
    }))
}

pub fn affine_equivariance() -> Result<(), String> {
    let strategy = (
        arb_layout(),
        arb_layout(),
        0usize..4,
        (0.25f64..4.0, any::<bool>()),
        -3.0f64..3.0,
        -3.0f64..3.0,
    );
    report(runner(0xC0FE_0004).run(&strategy, |(p1, p2, n, (mag, neg), b, c)| {
        let a = if neg { -mag } else { mag };
        let (k1, k2) = (affine_set(&p1), affine_set(&p2));
        let (m1, m2) = (scaled(&p1, a, b), scaled(&p2, a, c));
        let lhs = cover_sum(&m1, &m2, n, SumOp::Minus, 1.0).unwrap();
        let rhs = cover_sum(&k1, &k2, n, SumOp::Minus, 1.0).unwrap().affine(a, b - c);
        prop_assert!(close(&lhs, &rhs, 1e-12 * (1.0 + mag)), "{:?} vs {:?}", lhs, rhs);
        // dimension and thickness are scale invariant
        let d = hausdorff_dimension_moran(&k1, 3, 1e-13).unwrap().value;
        let dm = hausdorff_dimension_moran(&m1, 3, 1e-13).unwrap().value;
        prop_assert!((d - dm).abs() <= 1e-12);
        let t = thickness(&k1, 3).unwrap().value;
        let tm = thickness(&m1, 3).unwrap().value;
        // gap and bridge lengths are differences of endpoints near |b|, so
        // the attainable relative accuracy degrades by (|a| + |b|) / (|a| r)
        let r = refine(&k1, 3).unwrap().intervals.iter().map(|i| i.len()).fold(1.0, f64::min);
        let cond = (mag + b.abs()) / (mag * r);
        prop_assert!((t - tm).abs() <= 1e-12 * t.max(1.0) * cond.max(1.0), "{} vs {}", t, tm);
        Ok(())
    }))
}

pub fn certificate_soundness() -> Result<(), String> {
    let f = fixture();
    if f.interior.is_empty() {
        return Err("certificate has no deep interior translations".into());
    }
    let strategy = (any::<prop::sample::Index>(), any::<u64>(), 0.0f64..0.99);
    report(runner(0xC0FE_0005).run(&strategy, |(idx, seed, frac)| {
        let t = f.interior[idx.index(f.interior.len())];
        let radius = frac * f.cert.stability_radius();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k1 = perturb(&f.k, radius, &mut rng).unwrap();
        let k2 = perturb(&f.k, radius, &mut rng).unwrap();
        let outcome = intersect_test(&k1, &k2, t, 12).unwrap();
        prop_assert!(!outcome.is_disjoint(), "t = {}, radius = {:e}: {:?}", t, radius, outcome);
        Ok(())
    }))
}

pub const ALL: [(&str, fn() -> Result<(), String>); 5] = [
    ("cover nestedness", cover_nestedness),
    ("outer-measure monotonicity", outer_measure_monotone),
    ("Moran-map monotonicity", moran_map_monotone),
    ("affine equivariance", affine_equivariance),
    ("certificate soundness", certificate_soundness),
];
