//! The decorated dual graph of the almost fiber part and its spirality
//! character, computed as the holonomy of a flat `Q^x` bundle.
//!
//! Each edge carries the two positive integers `h_ini`, `h_ter` attached to
//! its ends and a sign `omega`. Traversing an edge forward multiplies the
//! holonomy by `omega * h_ini / h_ter`; traversing it backward by the inverse.
//! Loops internal to a vertex cross no JSJ curve and contribute only a sign.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

pub use crate::diagnostic::{has_errors, Diagnostic, DiagnosticKind, Severity};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Horizontal,
    GeometricallyInfinite,
    ElementaryBand,
    /// Not a virtual fiber; never part of the almost fiber part.
    Vertical,
    /// Not a virtual fiber; never part of the almost fiber part.
    GeometricallyFinite,
}

impl VertexKind {
    pub fn is_virtual_fiber(self) -> bool {
        matches!(
            self,
            VertexKind::Horizontal | VertexKind::GeometricallyInfinite | VertexKind::ElementaryBand
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VertexKind::Horizontal => "horizontal",
            VertexKind::GeometricallyInfinite => "geometrically_infinite",
            VertexKind::ElementaryBand => "elementary_band",
            VertexKind::Vertical => "vertical",
            VertexKind::GeometricallyFinite => "geometrically_finite",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "horizontal" => VertexKind::Horizontal,
            "geometrically_infinite" => VertexKind::GeometricallyInfinite,
            "elementary_band" => VertexKind::ElementaryBand,
            "vertical" => VertexKind::Vertical,
            "geometrically_finite" => VertexKind::GeometricallyFinite,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
    pub orientable: bool,
    /// Orientation-reversing generators of the vertex subsurface that cross
    /// no JSJ curve.
    pub internal_omega_generators: u32,
}

impl Vertex {
    pub fn new(id: impl Into<String>, kind: VertexKind) -> Self {
        Vertex {
            id: id.into(),
            kind,
            orientable: true,
            internal_omega_generators: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub h_ini: Rational,
    pub h_ter: Rational,
    pub omega: i64,
}

impl Edge {
    pub fn new(
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        h_ini: impl Into<Rational>,
        h_ter: impl Into<Rational>,
        omega: i64,
    ) -> Self {
        Edge {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            h_ini: h_ini.into(),
            h_ter: h_ter.into(),
            omega,
        }
    }

    /// Holonomy factor of a forward traversal.
    pub fn forward_factor(&self) -> Rational {
        let ratio = &self.h_ini / &self.h_ter;
        if self.omega < 0 {
            -ratio
        } else {
            ratio
        }
    }
}

/// Dual graph of the almost fiber part with its gluing decorations. Loops and
/// multiple edges are allowed and the graph need not be connected.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecoratedJSJGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Downgrade non-integral `h` from an error to a warning.
    pub allow_rational_h: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub edge: usize,
    pub dir: Direction,
}

impl Step {
    pub fn forward(edge: usize) -> Step {
        Step {
            edge,
            dir: Direction::Forward,
        }
    }

    pub fn backward(edge: usize) -> Step {
        Step {
            edge,
            dir: Direction::Backward,
        }
    }
}

/// A closed edge path, by edge index into [`DecoratedJSJGraph::edges`].
/// The empty path is the trivial cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DirectedCycle {
    pub steps: Vec<Step>,
}

impl DirectedCycle {
    pub fn new(steps: Vec<Step>) -> Self {
        DirectedCycle { steps }
    }

    /// Builds a cycle from `(edge id, direction)` pairs.
    pub fn from_ids(g: &DecoratedJSJGraph, steps: &[(&str, Direction)]) -> Result<Self> {
        let steps = steps
            .iter()
            .map(|&(id, dir)| {
                g.edge_index(id)
                    .map(|edge| Step { edge, dir })
                    .ok_or_else(|| Error::InvalidCycle(format!("unknown edge {id}")))
            })
            .collect::<Result<_>>()?;
        Ok(DirectedCycle { steps })
    }

    pub fn is_trivial(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self) -> DirectedCycle {
        DirectedCycle {
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| Step {
                    edge: s.edge,
                    dir: s.dir.reversed(),
                })
                .collect(),
        }
    }

    /// The cycle traversed `times` times in a row.
    pub fn repeated(&self, times: usize) -> DirectedCycle {
        DirectedCycle {
            steps: self.steps.repeat(times),
        }
    }

    /// Net signed number of traversals of `edge`.
    pub fn net_count(&self, edge: usize) -> i64 {
        self.steps
            .iter()
            .filter(|s| s.edge == edge)
            .map(|s| match s.dir {
                Direction::Forward => 1,
                Direction::Backward => -1,
            })
            .sum()
    }

    /// Vertex index the cycle starts (and ends) at, if nontrivial.
    pub fn base_vertex(&self, g: &DecoratedJSJGraph) -> Result<Option<usize>> {
        let ends = g.endpoints()?;
        Ok(self.steps.first().map(|s| step_tail(&ends, *s)))
    }

    /// Rotates the cycle to start at the first visit of `vertex`.
    pub fn rotated_to(&self, g: &DecoratedJSJGraph, vertex: usize) -> Result<DirectedCycle> {
        let ends = g.endpoints()?;
        let pos = self
            .steps
            .iter()
            .position(|s| step_tail(&ends, *s) == vertex)
            .ok_or_else(|| Error::InvalidCycle("cycle does not visit the vertex".into()))?;
        let mut steps = self.steps[pos..].to_vec();
        steps.extend_from_slice(&self.steps[..pos]);
        Ok(DirectedCycle { steps })
    }

    /// Concatenation `self · other` based at a vertex both cycles visit.
    pub fn concat(&self, other: &DirectedCycle, g: &DecoratedJSJGraph) -> Result<DirectedCycle> {
        if self.is_trivial() {
            return Ok(other.clone());
        }
        if other.is_trivial() {
            return Ok(self.clone());
        }
        let ends = g.endpoints()?;
        let mine: HashSet<usize> = self.steps.iter().map(|s| step_tail(&ends, *s)).collect();
        let shared = other
            .steps
            .iter()
            .map(|s| step_tail(&ends, *s))
            .find(|v| mine.contains(v))
            .ok_or_else(|| Error::InvalidCycle("cycles share no vertex".into()))?;
        let mut steps = self.rotated_to(g, shared)?.steps;
        steps.extend(other.rotated_to(g, shared)?.steps);
        Ok(DirectedCycle { steps })
    }

    /// Renders the cycle by edge ids, e.g. `c0·c1^-1`.
    pub fn display<'a>(&'a self, g: &'a DecoratedJSJGraph) -> CycleDisplay<'a> {
        CycleDisplay {
            cycle: self,
            graph: g,
        }
    }
}

pub struct CycleDisplay<'a> {
    cycle: &'a DirectedCycle,
    graph: &'a DecoratedJSJGraph,
}

impl fmt::Display for CycleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycle.is_trivial() {
            return write!(f, "(trivial)");
        }
        for (i, s) in self.cycle.steps.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            let id = self
                .graph
                .edges
                .get(s.edge)
                .map(|e| e.id.as_str())
                .unwrap_or("?");
            match s.dir {
                Direction::Forward => write!(f, "{id}")?,
                Direction::Backward => write!(f, "{id}^-1")?,
            }
        }
        Ok(())
    }
}

fn step_tail(ends: &[(usize, usize)], s: Step) -> usize {
    let (from, to) = ends[s.edge];
    match s.dir {
        Direction::Forward => from,
        Direction::Backward => to,
    }
}

fn step_head(ends: &[(usize, usize)], s: Step) -> usize {
    let (from, to) = ends[s.edge];
    match s.dir {
        Direction::Forward => to,
        Direction::Backward => from,
    }
}

impl DecoratedJSJGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Self {
        DecoratedJSJGraph { vertices, edges }
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// `(from, to)` vertex indices per edge; fails on dangling endpoints or
    /// edge data the holonomy cannot be evaluated on.
    pub fn endpoints(&self) -> Result<Vec<(usize, usize)>> {
        let index: HashMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        self.edges
            .iter()
            .map(|e| {
                let look = |id: &str| {
                    index.get(id).copied().ok_or_else(|| {
                        Error::InvalidGraph(format!("edge {} references missing vertex {id}", e.id))
                    })
                };
                if !e.h_ini.is_positive() || !e.h_ter.is_positive() {
                    return Err(Error::InvalidGraph(format!(
                        "edge {} has nonpositive h",
                        e.id
                    )));
                }
                if e.omega != 1 && e.omega != -1 {
                    return Err(Error::InvalidGraph(format!(
                        "edge {} has omega {}",
                        e.id, e.omega
                    )));
                }
                Ok((look(&e.from)?, look(&e.to)?))
            })
            .collect()
    }

    /// Flips `omega` on every edge end at `vertex`. Cycle values are
    /// unchanged; loops at the vertex are flipped twice.
    pub fn regauge(&mut self, vertex: &str) {
        for e in &mut self.edges {
            let flips = (e.from == vertex) as u8 + (e.to == vertex) as u8;
            if flips == 1 {
                e.omega = -e.omega;
            }
        }
    }

    /// Connected components as sorted vertex index lists, ordered by their
    /// smallest vertex.
    pub fn components(&self) -> Result<Vec<Vec<usize>>> {
        let ends = self.endpoints()?;
        let mut uf = UnionFind::new(self.vertices.len());
        for &(a, b) in &ends {
            uf.union(a, b);
        }
        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..self.vertices.len() {
            by_root.entry(uf.find(v)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        Ok(comps)
    }
}

/// Structural and semantic checks. Errors make the graph unusable; warnings
/// flag data the holonomy product ignores or cannot judge.
pub fn validate(g: &DecoratedJSJGraph, opts: ValidationOptions) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |kind, severity, subject: &str, message: String| {
        out.push(Diagnostic {
            kind,
            severity,
            subject: subject.to_string(),
            message,
        })
    };

    let mut seen = HashSet::new();
    for v in &g.vertices {
        if !seen.insert(v.id.as_str()) {
            push(
                DiagnosticKind::DuplicateId,
                Severity::Error,
                &v.id,
                "duplicate vertex id".into(),
            );
        }
        if !v.kind.is_virtual_fiber() {
            push(
                DiagnosticKind::NonFiberVertex,
                Severity::Warning,
                &v.id,
                format!("{} subsurfaces are not virtual fibers", v.kind.as_str()),
            );
        }
        if v.orientable && v.internal_omega_generators > 0 {
            push(
                DiagnosticKind::OrientationMismatch,
                Severity::Warning,
                &v.id,
                "orientable vertex declares orientation-reversing internal loops".into(),
            );
        }
    }
    let mut seen = HashSet::new();
    let by_id: HashMap<&str, &Vertex> = g.vertices.iter().map(|v| (v.id.as_str(), v)).collect();
    for e in &g.edges {
        if !seen.insert(e.id.as_str()) {
            push(
                DiagnosticKind::DuplicateId,
                Severity::Error,
                &e.id,
                "duplicate edge id".into(),
            );
        }
        for end in [&e.from, &e.to] {
            if !by_id.contains_key(end.as_str()) {
                push(
                    DiagnosticKind::DanglingEdge,
                    Severity::Error,
                    &e.id,
                    format!("endpoint {end} is not a vertex"),
                );
            }
        }
        for (name, h) in [("h_ini", &e.h_ini), ("h_ter", &e.h_ter)] {
            if !h.is_positive() {
                push(
                    DiagnosticKind::NonPositiveH,
                    Severity::Error,
                    &e.id,
                    format!("{name} = {h} must be positive"),
                );
            } else if !h.is_integer() {
                let severity = if opts.allow_rational_h {
                    Severity::Warning
                } else {
                    Severity::Error
                };
                push(
                    DiagnosticKind::NonIntegralH,
                    severity,
                    &e.id,
                    format!("{name} = {h} is not an integer"),
                );
            }
        }
        if e.omega != 1 && e.omega != -1 {
            push(
                DiagnosticKind::BadOmega,
                Severity::Error,
                &e.id,
                format!("omega = {} must be +1 or -1", e.omega),
            );
        }
        if let (Some(a), Some(b)) = (by_id.get(e.from.as_str()), by_id.get(e.to.as_str())) {
            let band_next_to_nonorientable = (a.kind == VertexKind::ElementaryBand
                && !b.orientable)
                || (b.kind == VertexKind::ElementaryBand && !a.orientable);
            if band_next_to_nonorientable {
                push(
                    DiagnosticKind::AmbiguousBandOrientation,
                    Severity::Warning,
                    &e.id,
                    "omega across an elementary band next to a nonorientable subsurface is taken as given".into(),
                );
            }
        }
    }
    out
}

/// Spirality of a closed edge path: product of the per-edge holonomy factors.
pub fn cycle_spirality(g: &DecoratedJSJGraph, cycle: &DirectedCycle) -> Result<Rational> {
    let ends = g.endpoints()?;
    check_closed(&ends, cycle)?;
    Ok(holonomy(g, cycle))
}

fn holonomy(g: &DecoratedJSJGraph, cycle: &DirectedCycle) -> Rational {
    cycle
        .steps
        .iter()
        .map(|s| {
            let f = g.edges[s.edge].forward_factor();
            match s.dir {
                Direction::Forward => f,
                Direction::Backward => f.recip(),
            }
        })
        .product()
}

fn check_closed(ends: &[(usize, usize)], cycle: &DirectedCycle) -> Result<()> {
    if let Some(bad) = cycle.steps.iter().find(|s| s.edge >= ends.len()) {
        return Err(Error::InvalidCycle(format!(
            "edge index {} out of range",
            bad.edge
        )));
    }
    let n = cycle.steps.len();
    for i in 0..n {
        let (cur, next) = (cycle.steps[i], cycle.steps[(i + 1) % n]);
        if step_head(ends, cur) != step_tail(ends, next) {
            let what = if i + 1 == n {
                "does not close up"
            } else {
                "is disconnected"
            };
            return Err(Error::InvalidCycle(format!("path {what} after step {i}")));
        }
    }
    Ok(())
}

/// One fundamental cycle: the chord (non-forest edge) traversed forward,
/// then the forest path back to its start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisCycle {
    pub component: usize,
    pub chord: usize,
    pub cycle: DirectedCycle,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalGenerator {
    pub vertex: usize,
    pub value: Rational,
}

/// Values of the spirality character on a basis of first homology: the
/// fundamental cycles of a spanning forest plus internal generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiralityCharacter {
    pub forest: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    pub basis: Vec<BasisCycle>,
    pub internal: Vec<InternalGenerator>,
}

impl SpiralityCharacter {
    /// Evaluates the character on any closed edge path through its
    /// decomposition into fundamental cycles.
    pub fn evaluate(&self, cycle: &DirectedCycle) -> Rational {
        self.basis
            .iter()
            .map(|b| b.value.pow(cycle.net_count(b.chord)))
            .product()
    }

    pub fn is_aspiral(&self) -> bool {
        self.basis.iter().all(|b| b.value.is_unit())
    }

    pub fn rank(&self) -> usize {
        self.basis.len() + self.internal.len()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Spirality character with the deterministic spanning forest: edges are
/// offered in index order and kept when they join two trees.
pub fn character(g: &DecoratedJSJGraph) -> Result<SpiralityCharacter> {
    let ends = g.endpoints()?;
    let mut uf = UnionFind::new(g.vertices.len());
    let forest: Vec<usize> = (0..g.edges.len())
        .filter(|&e| uf.union(ends[e].0, ends[e].1))
        .collect();
    build_character(g, &ends, forest)
}

/// Spirality character relative to a caller-chosen spanning forest.
pub fn character_with_forest(
    g: &DecoratedJSJGraph,
    forest: &[usize],
) -> Result<SpiralityCharacter> {
    let ends = g.endpoints()?;
    let mut uf = UnionFind::new(g.vertices.len());
    let mut in_forest = vec![false; g.edges.len()];
    for &e in forest {
        if e >= g.edges.len() || in_forest[e] {
            return Err(Error::InvalidGraph(format!("bad forest edge index {e}")));
        }
        in_forest[e] = true;
        if !uf.union(ends[e].0, ends[e].1) {
            return Err(Error::InvalidGraph("forest contains a cycle".into()));
        }
    }
    for (e, &(a, b)) in ends.iter().enumerate() {
        if !in_forest[e] && uf.find(a) != uf.find(b) {
            return Err(Error::InvalidGraph("forest is not spanning".into()));
        }
    }
    let mut forest = forest.to_vec();
    forest.sort_unstable();
    build_character(g, &ends, forest)
}

fn build_character(
    g: &DecoratedJSJGraph,
    ends: &[(usize, usize)],
    forest: Vec<usize>,
) -> Result<SpiralityCharacter> {
    let components = g.components()?;
    let mut component_of = vec![0; g.vertices.len()];
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = ci;
        }
    }

    // forest adjacency: vertex -> (edge, neighbour, direction leaving vertex)
    let mut adj: Vec<Vec<(usize, usize, Direction)>> = vec![Vec::new(); g.vertices.len()];
    for &e in &forest {
        let (a, b) = ends[e];
        adj[a].push((e, b, Direction::Forward));
        adj[b].push((e, a, Direction::Backward));
    }

    let in_forest: HashSet<usize> = forest.iter().copied().collect();
    let chords: Vec<usize> = (0..g.edges.len())
        .filter(|e| !in_forest.contains(e))
        .collect();

    let basis = par::map(&chords, |&chord| {
        let (from, to) = ends[chord];
        let mut steps = vec![Step::forward(chord)];
        steps.extend(forest_path(&adj, to, from));
        let cycle = DirectedCycle { steps };
        let value = holonomy(g, &cycle);
        BasisCycle {
            component: component_of[from],
            chord,
            cycle,
            value,
        }
    });

    let internal = g
        .vertices
        .iter()
        .enumerate()
        .flat_map(|(vertex, v)| {
            (0..v.internal_omega_generators).map(move |_| InternalGenerator {
                vertex,
                value: Rational::from(-1),
            })
        })
        .collect();

    Ok(SpiralityCharacter {
        forest,
        components,
        basis,
        internal,
    })
}

fn forest_path(adj: &[Vec<(usize, usize, Direction)>], from: usize, to: usize) -> Vec<Step> {
    if from == to {
        return Vec::new();
    }
    let mut prev: Vec<Option<(usize, Step)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(edge, w, dir) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, Step { edge, dir }));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while let Some((p, step)) = prev[cur] {
        path.push(step);
        cur = p;
    }
    path.reverse();
    path
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub cycle: DirectedCycle,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aspirality {
    pub aspiral: bool,
    pub witness: Option<Witness>,
}

/// Aspiral iff every basis value is `±1`; otherwise the first offending
/// fundamental cycle is returned.
pub fn is_aspiral(g: &DecoratedJSJGraph) -> Result<Aspirality> {
    let ch = character(g)?;
    Ok(aspirality_of(&ch))
}

fn aspirality_of(ch: &SpiralityCharacter) -> Aspirality {
    let witness = ch
        .basis
        .iter()
        .find(|b| !b.value.is_unit())
        .map(|b| Witness {
            cycle: b.cycle.clone(),
            value: b.value.clone(),
        });
    Aspirality {
        aspiral: witness.is_none(),
        witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentVerdict {
    pub vertices: Vec<String>,
    pub aspiral: bool,
}

/// Decision for the immersed surface: aspirality of the almost fiber part is
/// equivalent to virtual embeddability and to being virtually a leaf of a
/// taut foliation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub aspiral: bool,
    /// The almost fiber part is empty.
    pub vacuous: bool,
    pub virtually_embedded: bool,
    pub virtually_taut_leaf: bool,
    pub witness: Option<Witness>,
    pub components: Vec<ComponentVerdict>,
    pub character: SpiralityCharacter,
}

pub fn verdict(g: &DecoratedJSJGraph) -> Result<Verdict> {
    let ch = character(g)?;
    let asp = aspirality_of(&ch);
    let components = ch
        .components
        .iter()
        .enumerate()
        .map(|(ci, comp)| ComponentVerdict {
            vertices: comp.iter().map(|&v| g.vertices[v].id.clone()).collect(),
            aspiral: ch
                .basis
                .iter()
                .filter(|b| b.component == ci)
                .all(|b| b.value.is_unit()),
        })
        .collect();
    Ok(Verdict {
        aspiral: asp.aspiral,
        vacuous: g.vertices.is_empty(),
        virtually_embedded: asp.aspiral,
        virtually_taut_leaf: asp.aspiral,
        witness: asp.witness,
        components,
        character: ch,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverVertex {
    pub id: String,
    pub base: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub base: String,
}

/// A combinatorial covering map onto a base graph, given vertex by vertex
/// and edge by edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphCover {
    pub vertices: Vec<CoverVertex>,
    pub edges: Vec<CoverEdge>,
}

impl GraphCover {
    /// The degree-`degree` cyclic cover with voltage `shift(e)`: sheet `i`
    /// of edge `e` runs from sheet `i` over its start to sheet
    /// `i + shift(e) mod degree` over its end.
    pub fn cyclic(
        g: &DecoratedJSJGraph,
        degree: usize,
        shift: impl Fn(usize) -> usize,
    ) -> GraphCover {
        let vertices = (0..degree)
            .flat_map(|i| {
                g.vertices.iter().map(move |v| CoverVertex {
                    id: format!("{}~{i}", v.id),
                    base: v.id.clone(),
                })
            })
            .collect();
        let edges = g
            .edges
            .iter()
            .enumerate()
            .flat_map(|(ei, e)| {
                let s = shift(ei);
                (0..degree).map(move |i| CoverEdge {
                    id: format!("{}~{i}", e.id),
                    from: format!("{}~{i}", e.from),
                    to: format!("{}~{}", e.to, (i + s) % degree),
                    base: e.id.clone(),
                })
            })
            .collect();
        GraphCover { vertices, edges }
    }

    /// Lifts `cycle` starting at cover vertex `start` and keeps lifting until
    /// the lift closes up. Returns the closed lift and how many times it
    /// wraps around `cycle`.
    pub fn lift_closed(
        &self,
        base: &DecoratedJSJGraph,
        cover: &DecoratedJSJGraph,
        cycle: &DirectedCycle,
        start: &str,
    ) -> Result<(DirectedCycle, usize)> {
        if cycle.is_trivial() {
            return Ok((DirectedCycle::default(), 1));
        }
        let ends = base.endpoints()?;
        check_closed(&ends, cycle)?;
        let mut at = start.to_string();
        let mut steps = Vec::new();
        for wraps in 1..=self.vertices.len().max(1) {
            for s in &cycle.steps {
                let base_id = &base.edges[s.edge].id;
                let (idx, ce) = self
                    .edges
                    .iter()
                    .enumerate()
                    .find(|(_, ce)| {
                        &ce.base == base_id
                            && match s.dir {
                                Direction::Forward => ce.from == at,
                                Direction::Backward => ce.to == at,
                            }
                    })
                    .ok_or_else(|| Error::NotACovering(format!("no lift of {base_id} at {at}")))?;
                let cover_idx = cover.edge_index(&ce.id).ok_or_else(|| {
                    Error::NotACovering(format!("cover graph lacks edge {}", ce.id))
                })?;
                debug_assert_eq!(cover.edges[cover_idx].id, self.edges[idx].id);
                steps.push(Step {
                    edge: cover_idx,
                    dir: s.dir,
                });
                at = match s.dir {
                    Direction::Forward => ce.to.clone(),
                    Direction::Backward => ce.from.clone(),
                };
            }
            if at == start {
                return Ok((DirectedCycle { steps }, wraps));
            }
        }
        Err(Error::NotACovering("lift never closes".into()))
    }
}

/// Pulls the decorated graph back along a covering map; each lifted end
/// keeps the decoration of the end it covers.
pub fn pullback(g: &DecoratedJSJGraph, cover: &GraphCover) -> Result<DecoratedJSJGraph> {
    g.endpoints()?;
    let base_v: HashMap<&str, &Vertex> = g.vertices.iter().map(|v| (v.id.as_str(), v)).collect();
    let base_e: HashMap<&str, &Edge> = g.edges.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut over: HashMap<&str, &str> = HashMap::new();
    for cv in &cover.vertices {
        if !base_v.contains_key(cv.base.as_str()) {
            return Err(Error::NotACovering(format!(
                "{} covers unknown vertex {}",
                cv.id, cv.base
            )));
        }
        if over.insert(cv.id.as_str(), cv.base.as_str()).is_some() {
            return Err(Error::NotACovering(format!(
                "duplicate cover vertex {}",
                cv.id
            )));
        }
    }

    // (cover vertex, base edge, is_ini_end) must hit every base end exactly once
    let mut ends_at: HashMap<&str, HashMap<(&str, bool), usize>> = HashMap::new();
    for ce in &cover.edges {
        let be = base_e.get(ce.base.as_str()).ok_or_else(|| {
            Error::NotACovering(format!("{} covers unknown edge {}", ce.id, ce.base))
        })?;
        for (cv, base_end, ini) in [(&ce.from, &be.from, true), (&ce.to, &be.to, false)] {
            let b = over.get(cv.as_str()).ok_or_else(|| {
                Error::NotACovering(format!("{} ends at unknown vertex {cv}", ce.id))
            })?;
            if b != base_end {
                return Err(Error::NotACovering(format!(
                    "{} ends at {cv} over {b}, but {} ends at {base_end}",
                    ce.id, be.id
                )));
            }
            *ends_at
                .entry(cv.as_str())
                .or_default()
                .entry((be.id.as_str(), ini))
                .or_default() += 1;
        }
    }
    for cv in &cover.vertices {
        let expected: HashSet<(&str, bool)> = g
            .edges
            .iter()
            .flat_map(|e| {
                let mut v = Vec::new();
                if e.from == cv.base {
                    v.push((e.id.as_str(), true));
                }
                if e.to == cv.base {
                    v.push((e.id.as_str(), false));
                }
                v
            })
            .collect();
        let empty = HashMap::new();
        let got = ends_at.get(cv.id.as_str()).unwrap_or(&empty);
        let bijective =
            got.len() == expected.len() && got.iter().all(|(k, &n)| n == 1 && expected.contains(k));
        if !bijective {
            return Err(Error::NotACovering(format!(
                "ends at {} do not map bijectively onto ends at {}",
                cv.id, cv.base
            )));
        }
    }

    let vertices = cover
        .vertices
        .iter()
        .map(|cv| {
            let b = base_v[cv.base.as_str()];
            Vertex {
                id: cv.id.clone(),
                ..b.clone()
            }
        })
        .collect();
    let edges = cover
        .edges
        .iter()
        .map(|ce| {
            let b = base_e[ce.base.as_str()];
            Edge {
                id: ce.id.clone(),
                from: ce.from.clone(),
                to: ce.to.clone(),
                ..b.clone()
            }
        })
        .collect();
    Ok(DecoratedJSJGraph { vertices, edges })
}
