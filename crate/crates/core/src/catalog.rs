//! Named built-in sets and the JSON set-definition format.

use serde::{Deserialize, Serialize};

use crate::cantor::{recognize_rational, AffineMap, BranchKind, Mobius, Cover, MarkovPartition, RegularCantorSet, Q};
use crate::dimension::BoxSample;
use crate::dynamics::{horseshoe_cantor_sets, AffineHorseshoe};
use crate::error::{Error, Result};
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Example spelling accepted by [`builtin`].
    pub usage: &'static str,
}

pub fn list_builtin_sets() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "ternary",
            description: "middle-thirds set, pieces [0,1/3],[2/3,1], ψ(x) = 3x − ⌊3x⌋",
            usage: "ternary",
        },
        CatalogEntry {
            name: "middle-fifth",
            description: "pieces [0,2/5],[3/5,1], slopes 5/2, thickness 2",
            usage: "middle-fifth",
        },
        CatalogEntry {
            name: "thin",
            description: "two-piece set [0,1/10],[9/10,1], slopes 10, dimension log2/log10",
            usage: "thin",
        },
        CatalogEntry {
            name: "golden",
            description: "pieces [0,1/2],[3/4,1], ratios 1/2 and 1/4, dimension log φ / log 2",
            usage: "golden",
        },
        CatalogEntry {
            name: "thick",
            description: "pieces [0,0.45],[0.55,1], thickness 4.5",
            usage: "thick",
        },
        CatalogEntry {
            name: "gauss",
            description: "numbers in [0,1] with continued-fraction digits in 1..=N, Möbius branches x ↦ 1/x − a",
            usage: "gauss:4",
        },
        CatalogEntry {
            name: "horseshoe-stable",
            description: "stable factor of the affine horseshoe: pieces [0,c],[1−c,1]",
            usage: "horseshoe-stable:0.2",
        },
        CatalogEntry {
            name: "horseshoe-unstable",
            description: "unstable factor of the affine horseshoe: pieces [0,1/e],[1−1/e,1]",
            usage: "horseshoe-unstable:5",
        },
    ]
}

fn exact_pair(lo: (i128, i128), hi: (i128, i128)) -> (Q, Q) {
    (Q::new(lo.0, lo.1), Q::new(hi.0, hi.1))
}

fn full_pairs(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|j| (0..r).map(move |s| (j, s))).collect()
}

fn exact_full(pieces: &[((i128, i128), (i128, i128))]) -> Result<RegularCantorSet> {
    let p: Vec<(Q, Q)> = pieces.iter().map(|&(a, b)| exact_pair(a, b)).collect();
    RegularCantorSet::build_affine_exact(&p, &full_pairs(p.len()))
}

fn parse_param(name: &str, arg: Option<&str>) -> Result<f64> {
    let a = arg.ok_or_else(|| Error::invalid(format!("built-in '{name}' needs a parameter, e.g. {name}:0.2")))?;
    a.parse::<f64>()
        .map_err(|_| Error::invalid(format!("bad parameter '{a}' for built-in '{name}'")))
}

/// Resolves a built-in name such as `ternary` or `gauss:4`.
pub fn builtin(spec: &str) -> Result<RegularCantorSet> {
    let (name, arg) = match spec.split_once([':', '(']) {
        Some((n, a)) => (n, Some(a.trim_end_matches(')'))),
        None => (spec, None),
    };
    match name {
        "ternary" => exact_full(&[((0, 1), (1, 3)), ((2, 3), (1, 1))]),
        "middle-fifth" => exact_full(&[((0, 1), (2, 5)), ((3, 5), (1, 1))]),
        "thin" => exact_full(&[((0, 1), (1, 10)), ((9, 10), (1, 1))]),
        "golden" => exact_full(&[((0, 1), (1, 2)), ((3, 4), (1, 1))]),
        "thick" => exact_full(&[((0, 1), (9, 20)), ((11, 20), (1, 1))]),
        "gauss" => {
            let n = match arg {
                Some(a) => a
                    .parse::<u32>()
                    .map_err(|_| Error::invalid(format!("bad digit bound '{a}'")))?,
                None => 4,
            };
            RegularCantorSet::gauss(n)
        }
        "horseshoe-stable" => {
            let c = parse_param(name, arg)?;
            Ok(horseshoe_cantor_sets(&AffineHorseshoe::new(c, 3.0)?)?.0)
        }
        "horseshoe-unstable" => {
            let e = parse_param(name, arg)?;
            Ok(horseshoe_cantor_sets(&AffineHorseshoe::new(0.25, e)?)?.1)
        }
        _ => Err(Error::invalid(format!("unknown set '{spec}'; try `list`"))),
    }
}

/// `"affine-auto"` or one explicit branch per piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BranchSpec {
    Auto(String),
    Explicit(Vec<ExplicitBranch>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExplicitBranch {
    Affine { slope: f64, offset: f64 },
    Moebius { a: i64, b: i64, c: i64, d: i64 },
}

impl From<&BranchKind> for ExplicitBranch {
    fn from(k: &BranchKind) -> Self {
        match k {
            BranchKind::Affine(m) => ExplicitBranch::Affine {
                slope: m.slope,
                offset: m.offset,
            },
            BranchKind::Moebius(m) => ExplicitBranch::Moebius {
                a: m.a as i64,
                b: m.b as i64,
                c: m.c as i64,
                d: m.d as i64,
            },
        }
    }
}

impl Default for BranchSpec {
    fn default() -> Self {
        BranchSpec::Auto("affine-auto".into())
    }
}

/// The on-disk set format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDefinition {
    pub pieces: Vec<[f64; 2]>,
    /// `(j, s)` pairs; omitted means full transitions.
    #[serde(default)]
    pub transitions: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub branches: BranchSpec,
}

impl SetDefinition {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("bad set definition: {e}")))
    }

    pub fn build(&self) -> Result<RegularCantorSet> {
        let pieces = self
            .pieces
            .iter()
            .map(|&[lo, hi]| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(usize, usize)> = match &self.transitions {
            Some(t) => t.iter().map(|&[j, s]| (j, s)).collect(),
            None => full_pairs(pieces.len()),
        };
        match &self.branches {
            BranchSpec::Auto(s) if s == "affine-auto" => RegularCantorSet::build_affine(pieces, &pairs),
            BranchSpec::Auto(s) => Err(Error::invalid(format!("unknown branch mode '{s}'"))),
            BranchSpec::Explicit(kinds) => {
                let kinds = kinds
                    .iter()
                    .map(|k| match *k {
                        ExplicitBranch::Affine { slope, offset } => BranchKind::Affine(AffineMap::new(slope, offset)),
                        ExplicitBranch::Moebius { a, b, c, d } => BranchKind::Moebius(Mobius {
                            a: a as i128,
                            b: b as i128,
                            c: c as i128,
                            d: d as i128,
                        }),
                    })
                    .collect();
                RegularCantorSet::new(MarkovPartition::new(pieces, &pairs)?, kinds)
            }
        }
    }
}

/// Definition of an existing set (branches written out explicitly).
pub fn definition_of(k: &RegularCantorSet) -> SetDefinition {
    let transitions = k
        .transitions()
        .iter()
        .enumerate()
        .flat_map(|(j, t)| t.iter().map(move |&s| [j, s]))
        .collect();
    SetDefinition {
        pieces: k.pieces().iter().map(|p| [p.lo, p.hi]).collect(),
        transitions: Some(transitions),
        branches: BranchSpec::Explicit(k.branches().iter().map(|b| (&b.kind).into()).collect()),
    }
}

/// True when `x` is a small rational, printed as `p/q`.
pub fn rational_label(x: f64) -> String {
    match recognize_rational(x) {
        Some(q) if *q.denom() == 1 => q.numer().to_string(),
        Some(q) => format!("{}/{}", q.numer(), q.denom()),
        None => format!("{x}"),
    }
}

/// CSV `depth,address,lo,hi`; addresses are dot-separated piece indices.
pub fn cover_csv(cover: &Cover) -> String {
    let mut out = String::from("depth,address,lo,hi\n");
    for (iv, w) in cover.intervals.iter().zip(&cover.addresses) {
        let addr: Vec<String> = w.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("{},{},{:e},{:e}\n", cover.depth, addr.join("."), iv.lo, iv.hi));
    }
    out
}

/// CSV `depth,N,r`.
pub fn box_csv(samples: &[BoxSample]) -> String {
    let mut out = String::from("depth,N,r\n");
    for s in samples {
        out.push_str(&format!("{},{},{:e}\n", s.depth, s.count, s.radius));
    }
    out
}
