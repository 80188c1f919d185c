//! Spirality of loops transverse to the suspension flows of a pseudo graph
//! manifold.
//!
//! Every JSJ piece carries a periodic or pseudo-Anosov suspension flow whose
//! closed leaves on a boundary torus are the degeneracy slope of that side.
//! For a loop crossing JSJ curves `c_1, ..., c_n` the spirality factors as
//!
//! ```text
//! s(α) = ∏ σ(c_i) · ∏ ρ(α_i),
//! σ(c) = ι(c, l⁻) / ι(c, l⁺),        ρ(γ) = ℓ(l_ini) / ℓ(l_ter),
//! ```
//!
//! where `ι` is the geometric intersection number, `l⁻` and `l⁺` are the
//! degeneracy slopes on the side the loop leaves and enters, and `ℓ` is the
//! leaf length in flow time.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::diagnostic::{Diagnostic, DiagnosticKind};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DecoratedJSJGraph, DirectedCycle, Edge, Step, Vertex, VertexKind};
use crate::lattice::{intersection_number, Slope};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceType {
    Seifert,
    PseudoAnosov,
}

impl PieceType {
    pub fn as_str(self) -> &'static str {
        match self {
            PieceType::Seifert => "seifert",
            PieceType::PseudoAnosov => "pseudo_anosov",
        }
    }

    /// Kind of the almost fiber subsurface a flow-transverse surface cuts out
    /// of a piece of this type.
    pub fn fiber_kind(self) -> VertexKind {
        match self {
            PieceType::Seifert => VertexKind::Horizontal,
            PieceType::PseudoAnosov => VertexKind::GeometricallyInfinite,
        }
    }
}

/// One boundary torus of a piece. The slope is expressed in the frame of the
/// JSJ torus it lies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    pub id: String,
    pub torus: String,
    pub degeneracy_slope: Slope,
    pub leaf_length: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub id: String,
    pub piece_type: PieceType,
    pub boundaries: Vec<Boundary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SideRef {
    pub piece: String,
    pub boundary: String,
}

impl SideRef {
    pub fn new(piece: impl Into<String>, boundary: impl Into<String>) -> Self {
        SideRef {
            piece: piece.into(),
            boundary: boundary.into(),
        }
    }
}

impl fmt::Display for SideRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.piece, self.boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torus {
    pub id: String,
    pub plus: SideRef,
    pub minus: SideRef,
    pub frame: Option<String>,
    /// Reduction curve carried by the torus, for twist coefficients.
    pub reduction_curve: Option<Slope>,
    pub twist_power: Option<u64>,
}

impl Torus {
    pub fn new(id: impl Into<String>, plus: SideRef, minus: SideRef) -> Self {
        Torus {
            id: id.into(),
            plus,
            minus,
            frame: None,
            reduction_curve: None,
            twist_power: None,
        }
    }

    pub fn side(&self, side: Side) -> &SideRef {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowManifest {
    pub pieces: Vec<Piece>,
    pub tori: Vec<Torus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// How `from_side` on a crossing is read.
///
/// With [`SideConvention::Leaving`] (the default) `from_side` names the side
/// of the torus the loop leaves, so `l⁻` is that side's degeneracy slope and
/// `l⁺` the slope of the side it enters. [`SideConvention::Entering`] reads
/// `from_side` as the side entered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum SideConvention {
    #[default]
    Leaving,
    Entering,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub id: String,
    pub torus: String,
    pub curve: Slope,
    pub from_side: Side,
}

impl Crossing {
    pub fn left_side(&self, conv: SideConvention) -> Side {
        match conv {
            SideConvention::Leaving => self.from_side,
            SideConvention::Entering => self.from_side.opposite(),
        }
    }

    pub fn entered_side(&self, conv: SideConvention) -> Side {
        self.left_side(conv).opposite()
    }

    /// The same crossing made in the opposite direction.
    pub fn flipped(&self) -> Crossing {
        Crossing {
            from_side: self.from_side.opposite(),
            ..self.clone()
        }
    }
}

/// Cyclic sequence of crossings; segment `i` runs inside one piece from
/// crossing `i - 1` to crossing `i`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoopItinerary {
    pub crossings: Vec<Crossing>,
}

impl LoopItinerary {
    pub fn new(crossings: Vec<Crossing>) -> Self {
        LoopItinerary { crossings }
    }

    /// The loop run backwards: crossings in reverse order, each flipped.
    pub fn reversed(&self) -> LoopItinerary {
        LoopItinerary {
            crossings: self.crossings.iter().rev().map(Crossing::flipped).collect(),
        }
    }

    pub fn repeated(&self, times: usize) -> LoopItinerary {
        LoopItinerary {
            crossings: (0..times)
                .flat_map(|_| self.crossings.iter().cloned())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
}

/// A path inside one piece from boundary `entry` to boundary `exit`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub piece: String,
    pub entry: String,
    pub exit: String,
}

impl FlowManifest {
    pub fn piece(&self, id: &str) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.id == id)
    }

    pub fn torus(&self, id: &str) -> Option<&Torus> {
        self.tori.iter().find(|t| t.id == id)
    }

    pub fn boundary(&self, side: &SideRef) -> Option<&Boundary> {
        self.piece(&side.piece)?
            .boundaries
            .iter()
            .find(|b| b.id == side.boundary)
    }

    fn resolve(&self, torus: &str, side: Side) -> Result<(&SideRef, &Boundary)> {
        let t = self
            .torus(torus)
            .ok_or_else(|| Error::InvalidManifest(format!("unknown torus {torus}")))?;
        let r = t.side(side);
        let b = self.boundary(r).ok_or_else(|| {
            Error::InvalidManifest(format!(
                "torus {torus} side {} names unknown boundary {r}",
                side.as_str()
            ))
        })?;
        Ok((r, b))
    }

    /// Degeneracy slopes `(l⁻, l⁺)` seen by a crossing.
    pub fn crossing_slopes(
        &self,
        c: &Crossing,
        conv: SideConvention,
    ) -> Result<(&Boundary, &Boundary)> {
        let (_, minus) = self.resolve(&c.torus, c.left_side(conv))?;
        let (_, plus) = self.resolve(&c.torus, c.entered_side(conv))?;
        Ok((minus, plus))
    }

    /// Pieces whose boundary leaf lengths are not all equal.
    pub fn non_equiperiodic_pieces(&self) -> Vec<&str> {
        self.pieces
            .iter()
            .filter(|p| {
                p.boundaries
                    .windows(2)
                    .any(|w| w[0].leaf_length != w[1].leaf_length)
            })
            .map(|p| p.id.as_str())
            .collect()
    }
}

/// `σ(c) = ι(c, l⁻) / ι(c, l⁺)` for a sided crossing.
pub fn sigma(c: &Crossing, m: &FlowManifest, conv: SideConvention) -> Result<Rational> {
    let (minus, plus) = m.crossing_slopes(c, conv)?;
    let num = transverse_count(c, &minus.degeneracy_slope, "-")?;
    let den = transverse_count(c, &plus.degeneracy_slope, "+")?;
    Ok(Rational::new(num, den))
}

fn transverse_count(c: &Crossing, slope: &Slope, side: &'static str) -> Result<BigInt> {
    let i = intersection_number(&c.curve, slope);
    if i == BigInt::from(0) {
        return Err(Error::NotFlowTransverse {
            crossing: c.id.clone(),
            torus: c.torus.clone(),
            side,
        });
    }
    Ok(i)
}

/// `ρ(γ) = ℓ(entry) / ℓ(exit)` for a path inside one piece.
pub fn rho(seg: &Segment, m: &FlowManifest) -> Result<Rational> {
    let piece = m
        .piece(&seg.piece)
        .ok_or_else(|| Error::BadSegment(format!("unknown piece {}", seg.piece)))?;
    let length = |id: &str| {
        piece
            .boundaries
            .iter()
            .find(|b| b.id == id)
            .map(|b| b.leaf_length.clone())
            .ok_or_else(|| {
                Error::BadSegment(format!("{id} is not a boundary of piece {}", piece.id))
            })
    };
    let (entry, exit) = (length(&seg.entry)?, length(&seg.exit)?);
    if !entry.is_positive() || !exit.is_positive() {
        return Err(Error::BadSegment(format!(
            "nonpositive leaf length on piece {}",
            piece.id
        )));
    }
    Ok(entry / exit)
}

/// Segments of the loop, segment `i` ending at crossing `i`.
pub fn segments(
    alpha: &LoopItinerary,
    m: &FlowManifest,
    conv: SideConvention,
) -> Result<Vec<Segment>> {
    let n = alpha.crossings.len();
    (0..n)
        .map(|i| {
            let prev = &alpha.crossings[(i + n - 1) % n];
            let next = &alpha.crossings[i];
            let (into, _) = m.resolve(&prev.torus, prev.entered_side(conv))?;
            let (out, _) = m.resolve(&next.torus, next.left_side(conv))?;
            if into.piece != out.piece {
                return Err(Error::BadSegment(format!(
                    "after crossing {} the loop is in piece {}, but crossing {} leaves piece {}",
                    prev.id, into.piece, next.id, out.piece
                )));
            }
            Ok(Segment {
                piece: into.piece.clone(),
                entry: into.boundary.clone(),
                exit: out.boundary.clone(),
            })
        })
        .collect()
}

/// Factor-by-factor evaluation of the product formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RwBreakdown {
    pub sigmas: Vec<(String, Rational)>,
    pub rhos: Vec<(Segment, Rational)>,
    pub sigma_product: Rational,
    pub rho_product: Rational,
    pub value: Rational,
}

pub fn rw_breakdown(
    alpha: &LoopItinerary,
    m: &FlowManifest,
    conv: SideConvention,
) -> Result<RwBreakdown> {
    if alpha.is_empty() {
        return Err(Error::BadSegment("loop has no crossings".into()));
    }
    let sigmas = alpha
        .crossings
        .iter()
        .map(|c| Ok((c.id.clone(), sigma(c, m, conv)?)))
        .collect::<Result<Vec<_>>>()?;
    let rhos = segments(alpha, m, conv)?
        .into_iter()
        .map(|s| {
            let r = rho(&s, m)?;
            Ok((s, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let sigma_product: Rational = sigmas.iter().map(|(_, s)| s).product();
    let rho_product: Rational = rhos.iter().map(|(_, r)| r).product();
    let value = &sigma_product * &rho_product;
    Ok(RwBreakdown {
        sigmas,
        rhos,
        sigma_product,
        rho_product,
        value,
    })
}

/// Spirality of a flow-transverse loop, `σ(α)·ρ(α)`. Always positive.
pub fn rw_spirality(
    alpha: &LoopItinerary,
    m: &FlowManifest,
    conv: SideConvention,
) -> Result<Rational> {
    rw_breakdown(alpha, m, conv).map(|b| b.value)
}

/// True when every piece has a single leaf length on all its boundaries, in
/// which case every `ρ` factor is 1.
pub fn equiperiodic_rho_is_one(m: &FlowManifest) -> bool {
    m.non_equiperiodic_pieces().is_empty()
}

/// Builds the decorated graph traced out by the loop: one vertex per segment,
/// one edge per crossing. Up to a common factor per vertex, the end of
/// crossing `c` on side `l` carries `ι(c, l) / ℓ(l)`; the factor chosen is
/// the entry leaf length of the segment, so edge `c` leaving segment `γ` gets
/// `ι(c, l⁻) ρ(γ)` and `ι(c, l⁺)`, cleared of denominators by their least
/// common multiple. The returned cycle runs once around the graph, and its
/// spirality equals [`rw_spirality`].
pub fn decorate_from_flow(
    alpha: &LoopItinerary,
    m: &FlowManifest,
    conv: SideConvention,
) -> Result<(DecoratedJSJGraph, DirectedCycle)> {
    let segs = segments(alpha, m, conv)?;
    if segs.is_empty() {
        return Err(Error::BadSegment("loop has no crossings".into()));
    }
    let weights = alpha
        .crossings
        .iter()
        .zip(&segs)
        .map(|(c, seg)| {
            let (minus, plus) = m.crossing_slopes(c, conv)?;
            for b in [minus, plus] {
                if !b.leaf_length.is_positive() {
                    return Err(Error::BadSegment(format!(
                        "nonpositive leaf length on {}",
                        b.id
                    )));
                }
            }
            let ini = Rational::from_integer(transverse_count(c, &minus.degeneracy_slope, "-")?)
                * rho(seg, m)?;
            let ter = Rational::from_integer(transverse_count(c, &plus.degeneracy_slope, "+")?);
            Ok((ini, ter))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = weights
        .iter()
        .flat_map(|(a, b)| [a.denom(), b.denom()])
        .fold(BigInt::one(), |acc, d| acc.lcm(d));
    let scale = Rational::from_integer(scale);

    let n = segs.len();
    let vertices: Vec<Vertex> = segs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let kind = m
                .piece(&s.piece)
                .map(|p| p.piece_type.fiber_kind())
                .unwrap_or(VertexKind::GeometricallyInfinite);
            Vertex::new(format!("s{i}@{}", s.piece), kind)
        })
        .collect();

    let mut seen = HashSet::new();
    let repeated: HashSet<&str> = alpha
        .crossings
        .iter()
        .filter(|c| !seen.insert(c.id.as_str()))
        .map(|c| c.id.as_str())
        .collect();
    let mut occurrence: HashMap<&str, usize> = HashMap::new();
    let edges = alpha
        .crossings
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(i, (c, (w_ini, w_ter)))| {
            let id = if repeated.contains(c.id.as_str()) {
                let k = occurrence.entry(c.id.as_str()).or_default();
                *k += 1;
                format!("{}#{}", c.id, k)
            } else {
                c.id.clone()
            };
            Edge {
                id,
                from: vertices[i].id.clone(),
                to: vertices[(i + 1) % n].id.clone(),
                h_ini: w_ini * &scale,
                h_ter: w_ter * &scale,
                omega: 1,
            }
        })
        .collect();
    let cycle = DirectedCycle::new((0..n).map(Step::forward).collect());
    Ok((DecoratedJSJGraph::new(vertices, edges), cycle))
}

/// Consistency checks on a flow manifest and, if given, a loop through it.
pub fn validate_flow(
    m: &FlowManifest,
    alpha: Option<&LoopItinerary>,
    conv: SideConvention,
) -> Vec<Diagnostic> {
    use DiagnosticKind as K;
    let mut out = Vec::new();

    let mut piece_ids = HashSet::new();
    for p in &m.pieces {
        if !piece_ids.insert(p.id.as_str()) {
            out.push(Diagnostic::error(
                K::DuplicateId,
                &p.id,
                "duplicate piece id",
            ));
        }
        let mut bids = HashSet::new();
        for b in &p.boundaries {
            let subject = format!("{}.{}", p.id, b.id);
            if !bids.insert(b.id.as_str()) {
                out.push(Diagnostic::error(
                    K::DuplicateId,
                    &subject,
                    "duplicate boundary id",
                ));
            }
            if !b.leaf_length.is_positive() {
                out.push(Diagnostic::error(
                    K::NonPositiveLeafLength,
                    &subject,
                    format!("leaf length {} must be positive", b.leaf_length),
                ));
            }
            match m.torus(&b.torus) {
                None => out.push(Diagnostic::error(
                    K::UnknownReference,
                    &subject,
                    format!("unknown torus {}", b.torus),
                )),
                Some(t) => {
                    let me = SideRef::new(&p.id, &b.id);
                    if t.plus != me && t.minus != me {
                        out.push(Diagnostic::error(
                            K::SideMismatch,
                            &subject,
                            format!(
                                "boundary lies on torus {} but is neither of its sides",
                                t.id
                            ),
                        ));
                    }
                }
            }
        }
        if p.piece_type == PieceType::Seifert
            && p.boundaries
                .windows(2)
                .any(|w| w[0].leaf_length != w[1].leaf_length)
        {
            out.push(Diagnostic::error(
                K::UnequalSeifertLengths,
                &p.id,
                "boundary fibers of a Seifert piece must share one leaf length",
            ));
        }
    }

    let mut torus_ids = HashSet::new();
    for t in &m.tori {
        if !torus_ids.insert(t.id.as_str()) {
            out.push(Diagnostic::error(
                K::DuplicateId,
                &t.id,
                "duplicate torus id",
            ));
        }
        if t.plus == t.minus {
            out.push(Diagnostic::error(
                K::SideMismatch,
                &t.id,
                "both sides name the same boundary",
            ));
        }
        for side in [Side::Plus, Side::Minus] {
            let r = t.side(side);
            match m.boundary(r) {
                None => out.push(Diagnostic::error(
                    K::UnknownReference,
                    &t.id,
                    format!("{} side names unknown boundary {r}", side.as_str()),
                )),
                Some(b) if b.torus != t.id => out.push(Diagnostic::error(
                    K::SideMismatch,
                    &t.id,
                    format!("{} side {r} lies on torus {}", side.as_str(), b.torus),
                )),
                Some(_) => {}
            }
        }
    }

    if let Some(alpha) = alpha {
        if alpha.is_empty() {
            out.push(Diagnostic::error(
                K::EmptyLoop,
                "loop",
                "loop has no crossings",
            ));
        }
        for c in &alpha.crossings {
            if m.torus(&c.torus).is_none() {
                out.push(Diagnostic::error(
                    K::UnknownReference,
                    &c.id,
                    format!("unknown torus {}", c.torus),
                ));
                continue;
            }
            if let Err(e) = sigma(c, m, conv) {
                let kind = match e {
                    Error::NotFlowTransverse { .. } => K::NotFlowTransverse,
                    _ => K::UnknownReference,
                };
                out.push(Diagnostic::error(kind, &c.id, e.to_string()));
            }
        }
        if !crate::diagnostic::has_errors(&out) {
            match segments(alpha, m, conv) {
                Ok(segs) => {
                    for s in segs {
                        if let Err(e) = rho(&s, m) {
                            out.push(Diagnostic::error(K::BadSegment, &s.piece, e.to_string()));
                        }
                    }
                }
                Err(e) => out.push(Diagnostic::error(K::BadSegment, "loop", e.to_string())),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_spirality;

    fn s(a: i64, b: i64) -> Slope {
        Slope::new(a, b).unwrap()
    }

    fn boundary(id: &str, torus: &str, slope: Slope, len: Rational) -> Boundary {
        Boundary {
            id: id.into(),
            torus: torus.into(),
            degeneracy_slope: slope,
            leaf_length: len,
        }
    }

    /// Two pieces glued along one torus: `minus` sees `l_minus`, `plus` sees `l_plus`.
    fn two_sided(
        l_minus: Slope,
        l_plus: Slope,
        len_minus: Rational,
        len_plus: Rational,
    ) -> FlowManifest {
        FlowManifest {
            pieces: vec![
                Piece {
                    id: "A".into(),
                    piece_type: PieceType::PseudoAnosov,
                    boundaries: vec![boundary("b", "T", l_minus, len_minus)],
                },
                Piece {
                    id: "B".into(),
                    piece_type: PieceType::PseudoAnosov,
                    boundaries: vec![boundary("b", "T", l_plus, len_plus)],
                },
            ],
            tori: vec![Torus::new(
                "T",
                SideRef::new("B", "b"),
                SideRef::new("A", "b"),
            )],
        }
    }

    fn crossing(id: &str, curve: Slope, from: Side) -> Crossing {
        Crossing {
            id: id.into(),
            torus: "T".into(),
            curve,
            from_side: from,
        }
    }

    fn one() -> Rational {
        Rational::one()
    }

    #[test]
    fn sigma_examples() {
        let conv = SideConvention::Leaving;
        let matched = two_sided(s(2, 3), s(2, 3), one(), one());
        for curve in [s(1, 0), s(0, 1), s(5, -1)] {
            assert!(sigma(&crossing("c", curve, Side::Minus), &matched, conv)
                .unwrap()
                .is_one());
        }

        let m = two_sided(s(1, 0), s(1, 1), one(), one());
        assert!(sigma(&crossing("c", s(0, 1), Side::Minus), &m, conv)
            .unwrap()
            .is_one());

        // |1*0 - 3*1| = 3 and |1*(-1) - 3*1| = 4
        let m = two_sided(s(1, 0), s(1, -1), one(), one());
        let c = crossing("c", s(1, 3), Side::Minus);
        assert_eq!(sigma(&c, &m, conv).unwrap(), Rational::new(3, 4));
        assert_eq!(sigma(&c.flipped(), &m, conv).unwrap(), Rational::new(4, 3));
        assert_eq!(
            sigma(&c, &m, SideConvention::Entering).unwrap(),
            Rational::new(4, 3)
        );
    }

    #[test]
    fn parallel_curve_is_not_transverse() {
        let m = two_sided(s(1, 0), s(1, 1), one(), one());
        let err = sigma(
            &crossing("c9", s(2, 0), Side::Minus),
            &m,
            SideConvention::Leaving,
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::NotFlowTransverse {
                crossing: "c9".into(),
                torus: "T".into(),
                side: "-"
            }
        );
    }

    #[test]
    fn rho_examples() {
        let m = FlowManifest {
            pieces: vec![
                Piece {
                    id: "P".into(),
                    piece_type: PieceType::PseudoAnosov,
                    boundaries: vec![
                        boundary("x", "T", s(1, 0), Rational::from(3)),
                        boundary("y", "U", s(1, 0), Rational::from(2)),
                        boundary("z", "V", s(1, 0), Rational::from(3)),
                    ],
                },
                Piece {
                    id: "S".into(),
                    piece_type: PieceType::Seifert,
                    boundaries: vec![
                        boundary("x", "T", s(0, 1), Rational::new(5, 7)),
                        boundary("y", "U", s(0, 1), Rational::new(5, 7)),
                    ],
                },
            ],
            tori: vec![],
        };
        let seg = |p: &str, a: &str, b: &str| Segment {
            piece: p.into(),
            entry: a.into(),
            exit: b.into(),
        };
        assert!(rho(&seg("P", "x", "z"), &m).unwrap().is_one());
        assert_eq!(rho(&seg("P", "x", "y"), &m).unwrap(), Rational::new(3, 2));
        assert!(rho(&seg("S", "x", "y"), &m).unwrap().is_one());
        assert!(matches!(
            rho(&seg("P", "x", "nope"), &m),
            Err(Error::BadSegment(_))
        ));
        assert!(matches!(
            rho(&seg("Q", "x", "y"), &m),
            Err(Error::BadSegment(_))
        ));
    }

    fn twisted_pair_like() -> (FlowManifest, LoopItinerary) {
        // p = q = 1, r- = 2, r+ = 1: l- = (1,0), l+ = (1,1), c1 = (1,3), c0 = (0,1)
        let m = two_sided(s(1, 0), s(1, 1), one(), one());
        let alpha = LoopItinerary::new(vec![
            crossing("c1", s(1, 3), Side::Minus),
            crossing("c0", s(0, 1), Side::Plus),
        ]);
        (m, alpha)
    }

    #[test]
    fn rw_examples() {
        let conv = SideConvention::Leaving;
        let matched = two_sided(s(1, 2), s(1, 2), Rational::from(4), Rational::from(4));
        let alpha = LoopItinerary::new(vec![
            crossing("a", s(3, 1), Side::Minus),
            crossing("b", s(-1, 4), Side::Plus),
        ]);
        assert!(rw_spirality(&alpha, &matched, conv).unwrap().is_one());

        let (m, alpha) = twisted_pair_like();
        let b = rw_breakdown(&alpha, &m, conv).unwrap();
        assert_eq!(b.sigmas[0].1, Rational::new(3, 2));
        assert!(b.sigmas[1].1.is_one());
        assert!(b.rho_product.is_one());
        assert_eq!(b.value, Rational::new(3, 2));

        let m = two_sided(s(1, 0), s(1, -1), one(), one());
        let there_and_back = LoopItinerary::new(vec![
            crossing("c", s(1, 3), Side::Minus),
            crossing("c", s(1, 3), Side::Plus),
        ]);
        assert!(rw_spirality(&there_and_back, &m, conv).unwrap().is_one());
    }

    #[test]
    fn reversed_loop_inverts() {
        let (m, alpha) = twisted_pair_like();
        let conv = SideConvention::Leaving;
        assert_eq!(
            rw_spirality(&alpha.reversed(), &m, conv).unwrap(),
            Rational::new(2, 3)
        );
    }

    #[test]
    fn rho_factor_enters() {
        let m = two_sided(s(1, 0), s(1, 1), Rational::from(2), Rational::new(1, 3));
        let alpha = LoopItinerary::new(vec![
            crossing("c1", s(1, 3), Side::Minus),
            crossing("c0", s(0, 1), Side::Plus),
        ]);
        // one boundary per piece, so every ρ is 1 regardless of lengths
        let b = rw_breakdown(&alpha, &m, SideConvention::Leaving).unwrap();
        assert!(b.rho_product.is_one());
        assert!(equiperiodic_rho_is_one(&m));
    }

    #[test]
    fn equiperiodicity() {
        let (m, _) = twisted_pair_like();
        assert!(equiperiodic_rho_is_one(&m));
        let mut uneven = m.clone();
        uneven.pieces[0]
            .boundaries
            .push(boundary("b2", "U", s(1, 0), Rational::from(3)));
        uneven.pieces[0].boundaries[0].leaf_length = Rational::from(2);
        assert!(!equiperiodic_rho_is_one(&uneven));
        let mut mixed = m;
        mixed.pieces[0]
            .boundaries
            .push(boundary("b2", "U", s(1, 0), Rational::from(1)));
        mixed.pieces[1].boundaries[0].leaf_length = Rational::new(7, 3);
        assert!(equiperiodic_rho_is_one(&mixed));
    }

    #[test]
    fn bad_segment_detected() {
        let (m, _) = twisted_pair_like();
        // both crossings leave the minus side, so the loop never returns
        let alpha = LoopItinerary::new(vec![
            crossing("c1", s(1, 3), Side::Minus),
            crossing("c0", s(0, 1), Side::Minus),
        ]);
        assert!(matches!(
            rw_spirality(&alpha, &m, SideConvention::Leaving),
            Err(Error::BadSegment(_))
        ));
    }

    #[test]
    fn decorate_matches_rw() {
        let conv = SideConvention::Leaving;
        let (m, alpha) = twisted_pair_like();
        let (g, cycle) = decorate_from_flow(&alpha, &m, conv).unwrap();
        assert_eq!(g.edges[0].id, "c1");
        assert_eq!(
            (g.edges[0].h_ini.clone(), g.edges[0].h_ter.clone()),
            (Rational::from(3), Rational::from(2))
        );
        assert_eq!(cycle_spirality(&g, &cycle).unwrap(), Rational::new(3, 2));

        let matched = two_sided(s(1, 2), s(1, 2), Rational::new(3, 4), Rational::new(5, 6));
        let alpha = LoopItinerary::new(vec![
            crossing("a", s(3, 1), Side::Minus),
            crossing("b", s(-1, 4), Side::Plus),
        ]);
        let (g, cycle) = decorate_from_flow(&alpha, &matched, conv).unwrap();
        for e in &g.edges {
            assert!(e.h_ini.is_integer() && e.h_ter.is_integer());
        }
        assert_eq!(
            cycle_spirality(&g, &cycle).unwrap(),
            rw_spirality(&alpha, &matched, conv).unwrap()
        );
    }

    #[test]
    fn repeated_crossings_get_distinct_edges() {
        let (m, alpha) = twisted_pair_like();
        let (g, cycle) =
            decorate_from_flow(&alpha.repeated(2), &m, SideConvention::Leaving).unwrap();
        let ids: Vec<_> = g.edges.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["c1#1", "c0#1", "c1#2", "c0#2"]);
        assert_eq!(cycle_spirality(&g, &cycle).unwrap(), Rational::new(9, 4));
    }

    #[test]
    fn validation_flags_problems() {
        let conv = SideConvention::Leaving;
        let (m, alpha) = twisted_pair_like();
        assert!(validate_flow(&m, Some(&alpha), conv).is_empty());

        let mut bad = m.clone();
        bad.pieces[0].boundaries[0].leaf_length = Rational::zero();
        bad.tori[0].plus = SideRef::new("B", "zz");
        let kinds: Vec<_> = validate_flow(&bad, None, conv)
            .iter()
            .map(|d| d.kind)
            .collect();
        assert!(kinds.contains(&DiagnosticKind::NonPositiveLeafLength));
        assert!(kinds.contains(&DiagnosticKind::UnknownReference));

        let parallel = LoopItinerary::new(vec![
            crossing("c1", s(1, 1), Side::Minus),
            crossing("c0", s(0, 1), Side::Plus),
        ]);
        let d = validate_flow(&m, Some(&parallel), conv);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::NotFlowTransverse);
        assert_eq!(d[0].subject, "c1");

        let mut seifert = m;
        seifert.pieces[0].piece_type = PieceType::Seifert;
        seifert.pieces[0]
            .boundaries
            .push(boundary("b2", "T", s(1, 0), Rational::from(5)));
        let kinds: Vec<_> = validate_flow(&seifert, None, conv)
            .iter()
            .map(|d| d.kind)
            .collect();
        assert!(kinds.contains(&DiagnosticKind::UnequalSeifertLengths));
        assert!(kinds.contains(&DiagnosticKind::SideMismatch));
    }
}
