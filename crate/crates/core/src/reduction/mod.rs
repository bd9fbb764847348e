//! Round reduction for ring coloring.
//!
//! A set family over the values of a complex is again a vertex value, which
//! gives a construction on complexes whose facets are triples of families
//! linked by an alternating quantifier condition ([`phi_facet_ok`]). A
//! `t`-round coloring map, pushed through that construction and composed
//! with the gluing map [`f_of_view`], yields a `(t-1)`-round coloring map
//! with doubly exponentially many colors ([`reduce_once`]). Iterating gives
//! the tower / iterated-logarithm bound computed by [`linial_bound`].

mod family;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;

use crate::complex::{
    verify_simplicial, ComplexError, EdgeIndex, EdgeOracle, Label, ProcessName, SimplicialCheck,
    Value, Vertex,
};
use crate::protocol::{
    build_protocol_complex, enumerate_views, IdMode, NodeState, ProtocolError, RingView,
};
use crate::search::AlgorithmTable;
use crate::task::{build_output_complex, builtin, TaskError};

pub use family::{phi_apply_map, SetFamily};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("view {0} does not carry strictly increasing IDs")]
    NotIncreasing(String),
    #[error("family member {0} is not a color in 1..={1}")]
    NotAColor(String, u32),
    #[error("color code {0} is out of range for k = {1}")]
    CodeOutOfRange(String, u32),
    #[error("reduction needs t >= 1 and a {t}-round table with increasing IDs in 1..={r}")]
    BadTable { t: usize, r: u32 },
    #[error("verification failed at the {stage} stage on facet {facet}")]
    VerificationFailed { stage: &'static str, facet: String },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// The facet condition on a triple of families over a ring complex: for
/// each consecutive pair `(i-1, i)`, `i = 0, 1`, some member `S` of the left
/// family is such that every member `S'` of the right family has a value
/// adjacent to all of `S`.
pub fn phi_facet_ok<E: EdgeOracle>(
    k: &E,
    s_left: &SetFamily,
    s_mid: &SetFamily,
    s_right: &SetFamily,
) -> bool {
    let pair_ok = |a: &SetFamily, na: i32, b: &SetFamily, nb: i32| {
        a.sets().iter().any(|s| {
            b.sets().iter().all(|s2| {
                s2.iter().any(|v2| {
                    let y = Vertex::new(ProcessName(nb), v2.clone());
                    s.iter()
                        .all(|v| k.is_edge(&Vertex::new(ProcessName(na), v.clone()), &y))
                })
            })
        })
    };
    pair_ok(s_left, -1, s_mid, 0) && pair_ok(s_mid, 0, s_right, 1)
}

/// Image of a view under the gluing map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedFamily {
    pub family: SetFamily,
    /// Set when the family or one of its members is empty because the ID
    /// range leaves no room on one side.
    pub id_range_exhausted: bool,
}

/// Maps a view `w` with increasing IDs `z_first < ... < z_last` to the
/// family `{ W^b : z_last < b <= r }` where `W^b = { a.w.b : 1 <= a < z_first }`,
/// each `a.w.b` being a view one step wider. New nodes get the unit label.
pub fn f_of_view(w: &RingView, r: u32) -> Result<GluedFamily, ReductionError> {
    let ids = w
        .ids()
        .ok_or_else(|| ReductionError::NotIncreasing(w.to_string()))?;
    if !ids.windows(2).all(|p| p[0] < p[1]) {
        return Err(ReductionError::NotIncreasing(w.to_string()));
    }
    let (first, last) = (ids[0], ids[ids.len() - 1]);
    let mut family = SetFamily::new();
    for b in last + 1..=r {
        let mut set = BTreeSet::new();
        for a in 1..first {
            let mut states = vec![NodeState::with_id(a, Label::unit())];
            states.extend_from_slice(w.states());
            states.push(NodeState::with_id(b, Label::unit()));
            set.insert(RingView::new(states)?.to_value());
        }
        family.insert(set);
    }
    let id_range_exhausted = family.is_empty() || family.sets().iter().any(BTreeSet::is_empty);
    Ok(GluedFamily {
        family,
        id_range_exhausted,
    })
}

/// A color of the `2^(2^k)`-coloring, encoding a family of subsets of
/// `{1..k}`: each member set becomes a `k`-bit mask, the family becomes a
/// bitmask over those `2^k` masks, and the code is that bitmask plus one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorCode {
    code: BigUint,
    k: u32,
}

fn color_index(v: &Value, k: u32) -> Result<u32, ReductionError> {
    v.as_label()
        .and_then(|l| l.as_str().parse::<u32>().ok())
        .filter(|c| (1..=k).contains(c))
        .map(|c| c - 1)
        .ok_or_else(|| ReductionError::NotAColor(v.canonical(), k))
}

impl ColorCode {
    pub fn encode(fam: &SetFamily, k: u32) -> Result<ColorCode, ReductionError> {
        let mut mask = BigUint::default();
        for s in fam.sets() {
            let mut m = 0u64;
            for v in s {
                m |= 1 << color_index(v, k)?;
            }
            mask.set_bit(m, true);
        }
        Ok(ColorCode {
            code: mask + 1u32,
            k,
        })
    }

    pub fn from_code(code: BigUint, k: u32) -> Result<ColorCode, ReductionError> {
        let max = BigUint::from(1u32) << (1u64 << k);
        if code == BigUint::default() || code > max {
            return Err(ReductionError::CodeOutOfRange(code.to_string(), k));
        }
        Ok(ColorCode { code, k })
    }

    pub fn decode(&self) -> SetFamily {
        let mask = &self.code - 1u32;
        let mut fam = SetFamily::new();
        for m in 0..1u64 << self.k {
            if mask.bit(m) {
                let set = (0..self.k)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| Value::Label(Label::number(i + 1)))
                    .collect();
                fam.insert(set);
            }
        }
        fam
    }

    pub fn code(&self) -> &BigUint {
        &self.code
    }

    /// Number of colors available for a given `k`: `2^(2^k)`.
    pub fn palette(k: u32) -> BigUint {
        BigUint::from(1u32) << (1u64 << k)
    }
}

impl fmt::Display for ColorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

/// Turns a `t`-round `k`-coloring table with increasing IDs in `1..=r` into a
/// `(t-1)`-round `2^(2^k)`-coloring table with increasing IDs in `1..=r-1`.
///
/// The input table is verified first. Each output color is the code of the
/// image of the glued family of the view; the result is checked to satisfy
/// the family facet condition and to be a proper coloring on every facet
/// of the smaller protocol complex.
pub fn reduce_once(
    delta: &AlgorithmTable,
    t: usize,
    r: u32,
    k: u32,
) -> Result<AlgorithmTable, ReductionError> {
    if t == 0 || delta.rounds() != t || delta.id_mode() != IdMode::Increasing(r) {
        return Err(ReductionError::BadTable { t, r });
    }
    let task = builtin(&format!("coloring:{k}"))?;
    let p = build_protocol_complex(&task, t, IdMode::Increasing(r))?;
    let o = build_output_complex(&task)?;
    let map = delta.to_map_table();
    match verify_simplicial(&map, &p, &o) {
        Ok(SimplicialCheck::Ok) => {}
        Ok(SimplicialCheck::Violation { facet, .. }) => {
            return Err(ReductionError::VerificationFailed {
                stage: "input",
                facet: facet.to_string(),
            })
        }
        Err(ComplexError::IncompleteTable(v)) => {
            return Err(ReductionError::VerificationFailed {
                stage: "input",
                facet: format!("missing entry {v}"),
            })
        }
        Err(e) => return Err(e.into()),
    }

    let smaller = IdMode::Increasing(r - 1);
    let mut images: BTreeMap<Value, SetFamily> = BTreeMap::new();
    let mut entries = BTreeMap::new();
    for w in enumerate_views(&task, t - 1, smaller)? {
        let glued = f_of_view(&w, r - 1)?;
        let image = phi_apply_map(&map, &glued.family)?;
        let code = ColorCode::encode(&image, k)?;
        images.insert(w.to_value(), image);
        entries.insert(w, Label::number(code));
    }

    let edges = EdgeIndex::new(&o);
    let q = build_protocol_complex(&task, t - 1, smaller)?;
    for f in q.facets() {
        let fams: Vec<&SetFamily> = f.values().map(|v| &images[v]).collect();
        if !phi_facet_ok(&edges, fams[0], fams[1], fams[2]) {
            return Err(ReductionError::VerificationFailed {
                stage: "family",
                facet: f.to_string(),
            });
        }
        let codes: Vec<String> = f.values().map(|v| images[v].to_string()).collect();
        if codes[0] == codes[1] || codes[1] == codes[2] {
            return Err(ReductionError::VerificationFailed {
                stage: "output",
                facet: f.to_string(),
            });
        }
    }
    Ok(AlgorithmTable::new(t - 1, smaller, entries))
}

/// A tower of twos, exact up to [`EXACT_TOWER_HEIGHT`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tower {
    Exact(BigUint),
    /// `2^2^...^2` of the given height, too large to write out.
    Symbolic(u32),
}

pub const EXACT_TOWER_HEIGHT: u32 = 5;

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tower::Exact(n) => write!(f, "{n}"),
            Tower::Symbolic(h) => write!(f, "2^^{h}"),
        }
    }
}

/// `tower(0) = 1`, `tower(h) = 2^tower(h-1)`.
pub fn tower(h: u32) -> Tower {
    if h > EXACT_TOWER_HEIGHT {
        return Tower::Symbolic(h);
    }
    let mut x = BigUint::from(1u32);
    for _ in 0..h {
        let e = u64::try_from(&x).expect("exponent fits below height 5");
        x = BigUint::from(1u32) << e;
    }
    Tower::Exact(x)
}

/// Least `h` with `tower(h) >= n`.
pub fn log_star(n: &BigUint) -> u32 {
    for h in 0..=EXACT_TOWER_HEIGHT {
        if let Tower::Exact(x) = tower(h) {
            if &x >= n {
                return h;
            }
        }
    }
    // every representable n is below tower(6)
    EXACT_TOWER_HEIGHT + 1
}

/// Round lower bound for 3-coloring an `n`-ring: `ceil(log*(n) / 2) - 1`,
/// floored at zero.
pub fn linial_bound(n: &BigUint) -> u32 {
    log_star(n).div_ceil(2).saturating_sub(1)
}
