//! Instance generators: the twisted two-crossing family with nontrivial
//! spirality, the matched-slope family that is always aspiral, and seeded
//! random graphs and flow manifests for property checks.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::{
    Boundary, Crossing, FlowManifest, LoopItinerary, Piece, PieceType, Side, SideRef, Torus,
};
use crate::graph::{DecoratedJSJGraph, DirectedCycle, Edge, Step, Vertex, VertexKind};
use crate::lattice::Slope;
use crate::rational::Rational;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters of the twisted example on a torus `T` between two pieces
/// `J-` and `J+` whose degeneracy slopes differ by `k` reduction curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwistedPairParams {
    /// Fractional Dehn twist coefficient along the reduction curve, nonzero.
    pub k: i64,
    pub p: i64,
    pub q: i64,
    pub r_minus: i64,
    pub r_plus: i64,
    /// Degree of the elevation of the loop.
    pub d: u32,
}

impl Default for TwistedPairParams {
    fn default() -> Self {
        TwistedPairParams {
            k: 1,
            p: 1,
            q: 1,
            r_minus: 2,
            r_plus: 1,
            d: 1,
        }
    }
}

impl TwistedPairParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::BadParams("k must be nonzero".into()));
        }
        for (name, v) in [
            ("p", self.p),
            ("q", self.q),
            ("r_minus", self.r_minus),
            ("r_plus", self.r_plus),
        ] {
            if v <= 0 {
                return Err(Error::BadParams(format!("{name} = {v} must be positive")));
            }
        }
        if self.d == 0 {
            return Err(Error::BadParams("d must be positive".into()));
        }
        if self.r_plus - self.r_minus != -self.k {
            return Err(Error::BadParams(format!(
                "r_plus - r_minus = {} but must equal -k = {}",
                self.r_plus - self.r_minus,
                -self.k
            )));
        }
        Ok(())
    }

    /// `(p r⁻ + q) / (p r⁺ + q)`, the spirality of the base loop.
    pub fn base_value(&self) -> Rational {
        Rational::new(
            self.p * self.r_minus + self.q,
            self.p * self.r_plus + self.q,
        )
    }

    pub fn expected(&self) -> Rational {
        self.base_value().pow(self.d as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedPairInstance {
    pub params: TwistedPairParams,
    pub manifest: FlowManifest,
    /// The loop crossing `c1` then `c0` once each.
    pub base_loop: LoopItinerary,
    /// Projection of the degree-`d` elevation: the base loop `d` times.
    pub elevated_loop: LoopItinerary,
    pub expected: Rational,
}

/// Frame `(l⁻, e)` on `T`: `l⁻ = (1, 0)`, `e = (0, 1)`, `l⁺ = (1, r⁻ - r⁺)`.
/// The loop crosses `c1 = (p, p r⁻ + q)` from the minus side and returns
/// through `c0 = (0, 1)`. All leaf lengths are 1.
pub fn gen_twisted_pair(params: TwistedPairParams) -> Result<TwistedPairInstance> {
    params.validate()?;
    let TwistedPairParams {
        p,
        q,
        r_minus,
        r_plus,
        ..
    } = params;
    let slope = |a, b| Slope::new(a, b).expect("nonzero by construction");
    let l_minus = slope(1, 0);
    let l_plus = slope(1, r_minus - r_plus);
    let e = slope(0, 1);

    let piece = |id: &str, l: Slope| Piece {
        id: id.into(),
        piece_type: PieceType::PseudoAnosov,
        boundaries: vec![Boundary {
            id: "T".into(),
            torus: "T".into(),
            degeneracy_slope: l,
            leaf_length: Rational::one(),
        }],
    };
    let mut torus = Torus::new("T", SideRef::new("J+", "T"), SideRef::new("J-", "T"));
    torus.frame = Some("(l-, e)".into());
    torus.reduction_curve = Some(e);
    torus.twist_power = Some(1);
    let manifest = FlowManifest {
        pieces: vec![piece("J-", l_minus), piece("J+", l_plus)],
        tori: vec![torus],
    };
    let base_loop = LoopItinerary::new(vec![
        Crossing {
            id: "c1".into(),
            torus: "T".into(),
            curve: slope(p, p * r_minus + q),
            from_side: Side::Minus,
        },
        Crossing {
            id: "c0".into(),
            torus: "T".into(),
            curve: e,
            from_side: Side::Plus,
        },
    ]);
    let elevated_loop = base_loop.repeated(params.d as usize);
    Ok(TwistedPairInstance {
        params,
        manifest,
        base_loop,
        elevated_loop,
        expected: params.expected(),
    })
}

/// Knobs for [`random_flow_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowShape {
    pub pieces: usize,
    pub extra_tori: usize,
    pub max_crossings: usize,
    /// Bound on numerators and denominators of leaf lengths.
    pub max_length_part: i64,
    pub max_coord: i64,
    /// Both sides of every torus share a degeneracy slope.
    pub matched: bool,
    /// One leaf length per piece.
    pub equiperiodic: bool,
}

impl Default for FlowShape {
    fn default() -> Self {
        FlowShape {
            pieces: 3,
            extra_tori: 2,
            max_crossings: 8,
            max_length_part: 20,
            max_coord: 5,
            matched: false,
            equiperiodic: false,
        }
    }
}

fn random_primitive<R: Rng + ?Sized>(rng: &mut R, max: i64) -> Slope {
    loop {
        let (a, b) = (rng.gen_range(-max..=max), rng.gen_range(-max..=max));
        if let Ok(s) = Slope::new(a, b) {
            if s.is_primitive() {
                return s;
            }
        }
    }
}

fn random_length<R: Rng + ?Sized>(rng: &mut R, max: i64) -> Rational {
    Rational::new(rng.gen_range(1..=max), rng.gen_range(1..=max))
}

/// A random pseudo graph manifold with a flow-transverse loop of at most
/// `shape.max_crossings` crossings.
///
/// Pieces are glued in a ring (piece `i` on the minus side of torus `R{i}`,
/// piece `i + 1` on the plus side) plus `extra_tori` random gluings.
pub fn random_flow_instance(rng: &mut impl Rng, shape: FlowShape) -> (FlowManifest, LoopItinerary) {
    let n = shape.pieces.max(1);
    let mut pieces: Vec<Piece> = (0..n)
        .map(|i| Piece {
            id: format!("P{i}"),
            piece_type: if rng.gen_bool(0.5) {
                PieceType::Seifert
            } else {
                PieceType::PseudoAnosov
            },
            boundaries: Vec::new(),
        })
        .collect();
    let piece_length: Vec<Rational> = (0..n)
        .map(|_| random_length(rng, shape.max_length_part))
        .collect();

    let mut gluings: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for _ in 0..shape.extra_tori {
        gluings.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }

    let mut tori = Vec::new();
    for (t, &(minus, plus)) in gluings.iter().enumerate() {
        let id = format!("R{t}");
        let l_minus = random_primitive(rng, shape.max_coord);
        let l_plus = if shape.matched {
            l_minus
        } else {
            random_primitive(rng, shape.max_coord)
        };
        let mut refs = Vec::with_capacity(2);
        for (piece, tag, slope) in [(minus, "-", l_minus), (plus, "+", l_plus)] {
            let p = &mut pieces[piece];
            let len = if shape.equiperiodic || p.piece_type == PieceType::Seifert {
                piece_length[piece].clone()
            } else {
                random_length(rng, shape.max_length_part)
            };
            let bid = format!("{id}{tag}");
            p.boundaries.push(Boundary {
                id: bid.clone(),
                torus: id.clone(),
                degeneracy_slope: slope,
                leaf_length: len,
            });
            refs.push(SideRef::new(p.id.clone(), bid));
        }
        let plus_ref = refs.pop().unwrap();
        let minus_ref = refs.pop().unwrap();
        tori.push(Torus::new(id, plus_ref, minus_ref));
    }
    let manifest = FlowManifest { pieces, tori };
    let alpha = random_loop(rng, &manifest, shape.max_crossings.max(2), shape.max_coord);
    (manifest, alpha)
}

fn random_transverse_curve<R: Rng + ?Sized>(rng: &mut R, a: &Slope, b: &Slope, max: i64) -> Slope {
    loop {
        let (x, y) = (rng.gen_range(-max..=max), rng.gen_range(-max..=max));
        let Ok(c) = Slope::new(x, y) else { continue };
        if !c.is_parallel(a) && !c.is_parallel(b) {
            return c;
        }
    }
}

fn random_loop(
    rng: &mut impl Rng,
    m: &FlowManifest,
    max_len: usize,
    max_coord: i64,
) -> LoopItinerary {
    // every boundary is one side of exactly one torus
    let mut exits: HashMap<&str, Vec<(&Torus, Side)>> = HashMap::new();
    for t in &m.tori {
        for side in [Side::Plus, Side::Minus] {
            exits
                .entry(t.side(side).piece.as_str())
                .or_default()
                .push((t, side));
        }
    }
    let start = m.pieces[rng.gen_range(0..m.pieces.len())].id.as_str();
    for _ in 0..64 {
        let target = rng.gen_range(1..=max_len);
        let mut at = start;
        let mut crossings = Vec::new();
        while crossings.len() < max_len {
            let &(t, side) = exits[at].choose(rng).expect("every piece has a boundary");
            crossings.push(random_crossing(rng, m, t, side, crossings.len(), max_coord));
            at = t.side(side.opposite()).piece.as_str();
            if at == start && crossings.len() >= target {
                return LoopItinerary::new(crossings);
            }
        }
    }
    // out and straight back
    let &(t, side) = exits[start].choose(rng).unwrap();
    let c = random_crossing(rng, m, t, side, 0, max_coord);
    let mut back = c.flipped();
    back.id = "c1".into();
    LoopItinerary::new(vec![c, back])
}

fn random_crossing(
    rng: &mut impl Rng,
    m: &FlowManifest,
    t: &Torus,
    side: Side,
    idx: usize,
    max_coord: i64,
) -> Crossing {
    let a = &m.boundary(&t.plus).expect("generated").degeneracy_slope;
    let b = &m.boundary(&t.minus).expect("generated").degeneracy_slope;
    Crossing {
        id: format!("c{idx}"),
        torus: t.id.clone(),
        curve: random_transverse_curve(rng, a, b, max_coord),
        from_side: side,
    }
}

/// A manifest in which every torus sees the same degeneracy slope from both
/// sides and every piece has one leaf length, with a loop through it. Its
/// loops all have spirality 1.
pub fn gen_matched_slopes(n_pieces: usize, seed: u64) -> Result<(FlowManifest, LoopItinerary)> {
    if n_pieces == 0 {
        return Err(Error::BadParams("need at least one piece".into()));
    }
    let mut rng = rng_from_seed(seed);
    let shape = FlowShape {
        pieces: n_pieces,
        extra_tori: rng.gen_range(0..=2),
        matched: true,
        equiperiodic: true,
        ..FlowShape::default()
    };
    Ok(random_flow_instance(&mut rng, shape))
}

/// Random decorated graph with `h` in `1..=max_h` and random signs.
pub fn random_graph(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_edges: usize,
    max_h: i64,
) -> DecoratedJSJGraph {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let ne = rng.gen_range(0..=max_edges);
    let kinds = [
        VertexKind::Horizontal,
        VertexKind::GeometricallyInfinite,
        VertexKind::ElementaryBand,
    ];
    let vertices = (0..nv)
        .map(|i| Vertex::new(format!("v{i}"), *kinds.choose(rng).unwrap()))
        .collect();
    let edges = (0..ne)
        .map(|i| {
            Edge::new(
                format!("e{i}"),
                format!("v{}", rng.gen_range(0..nv)),
                format!("v{}", rng.gen_range(0..nv)),
                rng.gen_range(1..=max_h),
                rng.gen_range(1..=max_h),
                if rng.gen_bool(0.5) { 1 } else { -1 },
            )
        })
        .collect();
    DecoratedJSJGraph::new(vertices, edges)
}

/// Random closed walk based at `base`, of length about `max_len` (the walk
/// home may add a few steps). Trivial if `base` has no edges.
pub fn random_closed_walk(
    rng: &mut impl Rng,
    g: &DecoratedJSJGraph,
    base: usize,
    max_len: usize,
) -> DirectedCycle {
    let ends = g.endpoints().expect("generated graphs are well formed");
    let mut incident: Vec<Vec<(Step, usize)>> = vec![Vec::new(); g.vertices.len()];
    for (e, &(a, b)) in ends.iter().enumerate() {
        incident[a].push((Step::forward(e), b));
        incident[b].push((Step::backward(e), a));
    }
    if incident[base].is_empty() {
        return DirectedCycle::default();
    }
    let target = rng.gen_range(1..=max_len.max(1));
    let mut at = base;
    let mut steps = Vec::new();
    while steps.len() < target {
        let &(s, next) = incident[at].choose(rng).unwrap();
        steps.push(s);
        at = next;
    }
    // shortest way home
    let mut prev: Vec<Option<(usize, Step)>> = vec![None; g.vertices.len()];
    let mut seen = vec![false; g.vertices.len()];
    seen[at] = true;
    let mut queue = VecDeque::from([at]);
    while let Some(v) = queue.pop_front() {
        for &(s, w) in &incident[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, s));
                queue.push_back(w);
            }
        }
    }
    let mut home = Vec::new();
    let mut cur = base;
    while let Some((p, s)) = prev[cur] {
        home.push(s);
        cur = p;
    }
    home.reverse();
    steps.extend(home);
    DirectedCycle::new(steps)
}

/// Random valid twisted-example parameters.
pub fn random_twisted_pair_params(rng: &mut impl Rng) -> TwistedPairParams {
    loop {
        let k = rng.gen_range(-6..=6);
        if k == 0 {
            continue;
        }
        let r_plus = rng.gen_range(1..=10);
        let r_minus = r_plus + k;
        if r_minus < 1 {
            continue;
        }
        return TwistedPairParams {
            k,
            p: rng.gen_range(1..=10),
            q: rng.gen_range(1..=20),
            r_minus,
            r_plus,
            d: rng.gen_range(1..=4),
        };
    }
}
