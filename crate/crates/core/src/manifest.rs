//! JSON manifests: a decorated graph, a flow manifest with a loop, twist
//! data, or any combination.
//!
//! Unknown fields are collected while parsing; strict callers reject them,
//! lenient callers report them as warnings. Syntax and schema errors carry
//! the line and column of the offending value.

use std::fmt;

use serde::de::{self, value::MapAccessDeserializer, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::flow::{
    Boundary, Crossing, FlowManifest, LoopItinerary, Piece, PieceType, Side, SideRef, Torus,
};
use crate::graph::{DecoratedJSJGraph, Edge, Vertex, VertexKind};
use crate::lattice::{change_frame, h_value, GluingMatrix, Slope, SublatticeCover};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub lenient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifestError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown field(s): {}", .0.join(", "))]
    UnknownFields(Vec<String>),
}

impl From<serde_json::Error> for ManifestError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends the position to the message
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        ManifestError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

/// One fractional Dehn twist computation request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistData {
    pub id: String,
    pub l_plus: Slope,
    pub l_minus: Slope,
    pub e: Slope,
    pub m: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub graph: Option<DecoratedJSJGraph>,
    pub flow: Option<FlowManifest>,
    pub alpha: Option<LoopItinerary>,
    pub twists: Vec<TwistData>,
    pub expected: Option<Rational>,
    /// Free-form record of how the file was produced.
    pub generator: Option<Value>,
}

impl Manifest {
    /// Explicit twist entries followed by one per torus that declares a
    /// reduction curve and whose sides resolve.
    pub fn all_twists(&self) -> Vec<TwistData> {
        let mut out = self.twists.clone();
        if let Some(flow) = &self.flow {
            for t in &flow.tori {
                let Some(e) = t.reduction_curve else { continue };
                let (Some(plus), Some(minus)) = (flow.boundary(&t.plus), flow.boundary(&t.minus))
                else {
                    continue;
                };
                out.push(TwistData {
                    id: t.id.clone(),
                    l_plus: plus.degeneracy_slope,
                    l_minus: minus.degeneracy_slope,
                    e,
                    m: t.twist_power.unwrap_or(1),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub manifest: Manifest,
    /// Unknown fields, reported when parsing leniently.
    pub warnings: Vec<String>,
}

pub fn parse_manifest(text: &str, opts: ParseOptions) -> Result<Parsed, ManifestError> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Doc = serde_ignored::deserialize(&mut de, |path| unknown.push(path.to_string()))?;
    de.end()?;
    if !unknown.is_empty() && !opts.lenient {
        return Err(ManifestError::UnknownFields(unknown));
    }
    Ok(Parsed {
        manifest: doc.into_manifest(),
        warnings: unknown
            .into_iter()
            .map(|p| format!("unknown field `{p}` ignored"))
            .collect(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json(m: &Manifest) -> String {
    let mut s = serde_json::to_string_pretty(&Doc::from_manifest(m))
        .expect("manifest documents always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Doc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pieces: Vec<PieceDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tori: Vec<TorusDoc>,
    #[serde(default, rename = "loop", skip_serializing_if = "Option::is_none")]
    loop_: Option<Vec<CrossingDoc>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    fdtc: Vec<TwistDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected: Option<Rational>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    #[serde(default)]
    vertices: Vec<VertexDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

fn yes() -> bool {
    true
}

fn one() -> u64 {
    1
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexDoc {
    id: String,
    kind: VertexKind,
    #[serde(default = "yes")]
    orientable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    internal_omega_generators: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    id: String,
    from: String,
    to: String,
    h_ini: HRepr,
    h_ter: HRepr,
    omega: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct PieceDoc {
    id: String,
    #[serde(rename = "type")]
    piece_type: PieceType,
    #[serde(default)]
    boundaries: Vec<BoundaryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BoundaryDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    torus_id: String,
    degeneracy_slope: SlopeRepr,
    leaf_length: Rational,
    /// Maps this boundary's own frame to the torus frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gluing: Option<GluingRepr>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SideDoc {
    piece: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TorusDoc {
    id: String,
    plus_side: SideDoc,
    minus_side: SideDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reduction_curve: Option<SlopeRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    twist_power: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CrossingDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    torus_id: String,
    curve: SlopeRepr,
    from_side: Side,
}

#[derive(Debug, Serialize, Deserialize)]
struct TwistDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    l_plus: SlopeRepr,
    l_minus: SlopeRepr,
    e: SlopeRepr,
    #[serde(default = "one")]
    m: u64,
}

/// `[a, b]` or `{"vector": [a, b], "mult": m}`.
#[derive(Debug, Clone, Copy)]
struct SlopeRepr(Slope);

#[derive(Deserialize)]
struct SlopeObject {
    vector: [i64; 2],
    #[serde(default = "one")]
    mult: u64,
}

impl<'de> Deserialize<'de> for SlopeRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SlopeRepr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a slope [a, b] or {\"vector\": [a, b], \"mult\": m}")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, seq: A) -> Result<SlopeRepr, A::Error> {
                let [a, b] = <[i64; 2]>::deserialize(de::value::SeqAccessDeserializer::new(seq))?;
                Slope::new(a, b).map(SlopeRepr).map_err(de::Error::custom)
            }
            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<SlopeRepr, A::Error> {
                let o = SlopeObject::deserialize(MapAccessDeserializer::new(map))?;
                Slope::with_multiplicity(o.vector[0], o.vector[1], o.mult)
                    .map(SlopeRepr)
                    .map_err(de::Error::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for SlopeRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (a, b) = self.0.vector();
        if self.0.is_primitive() {
            [a, b].serialize(s)
        } else {
            #[derive(Serialize)]
            struct Out {
                vector: [i64; 2],
                mult: u64,
            }
            Out {
                vector: [a, b],
                mult: self.0.multiplicity(),
            }
            .serialize(s)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct GluingRepr(GluingMatrix);

impl<'de> Deserialize<'de> for GluingRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = <[[i64; 2]; 2]>::deserialize(d)?;
        GluingMatrix::new(m)
            .map(GluingRepr)
            .map_err(de::Error::custom)
    }
}

impl Serialize for GluingRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.matrix().serialize(s)
    }
}

/// An end decoration: a number, a `"p/q"` string, a curve with the cover of
/// its torus, or raw covering degrees.
#[derive(Debug, Clone)]
enum HRepr {
    Value(Rational),
    Cover {
        curve: Slope,
        cover: SublatticeCover,
    },
    Degrees {
        torus_degree: u64,
        curve_degree: u64,
    },
}

#[derive(Deserialize)]
struct HObject {
    curve: Option<SlopeRepr>,
    cover: Option<[[i64; 2]; 2]>,
    torus_degree: Option<u64>,
    curve_degree: Option<u64>,
}

impl HRepr {
    fn value(&self) -> Rational {
        match self {
            HRepr::Value(r) => r.clone(),
            HRepr::Cover { curve, cover } => {
                h_value(curve, cover).expect("cover degree divides the index")
            }
            HRepr::Degrees {
                torus_degree,
                curve_degree,
            } => Rational::new(*torus_degree, *curve_degree),
        }
    }
}

impl<'de> Deserialize<'de> for HRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = HRepr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer, a \"p/q\" string, {\"curve\", \"cover\"} or {\"torus_degree\", \"curve_degree\"}")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<HRepr, E> {
                Ok(HRepr::Value(Rational::from_integer(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<HRepr, E> {
                Ok(HRepr::Value(Rational::from_integer(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<HRepr, E> {
                v.parse().map(HRepr::Value).map_err(E::custom)
            }
            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<HRepr, A::Error> {
                let o = HObject::deserialize(MapAccessDeserializer::new(map))?;
                match o {
                    HObject {
                        curve: Some(SlopeRepr(curve)),
                        cover: Some(basis),
                        torus_degree: None,
                        curve_degree: None,
                    } => SublatticeCover::new(basis)
                        .map(|cover| HRepr::Cover { curve, cover })
                        .map_err(de::Error::custom),
                    HObject {
                        curve: None,
                        cover: None,
                        torus_degree: Some(t),
                        curve_degree: Some(c),
                    } if t > 0 && c > 0 => Ok(HRepr::Degrees {
                        torus_degree: t,
                        curve_degree: c,
                    }),
                    _ => Err(de::Error::custom(
                        "h needs either curve and cover, or positive torus_degree and curve_degree",
                    )),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for HRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            HRepr::Value(r) => match i64::try_from(r.numer()) {
                Ok(n) if r.is_integer() => n.serialize(s),
                _ => r.serialize(s),
            },
            HRepr::Cover { curve, cover } => {
                #[derive(Serialize)]
                struct Out {
                    curve: SlopeRepr,
                    cover: [[i64; 2]; 2],
                }
                Out {
                    curve: SlopeRepr(*curve),
                    cover: cover.basis(),
                }
                .serialize(s)
            }
            HRepr::Degrees {
                torus_degree,
                curve_degree,
            } => {
                #[derive(Serialize)]
                struct Out {
                    torus_degree: u64,
                    curve_degree: u64,
                }
                Out {
                    torus_degree: *torus_degree,
                    curve_degree: *curve_degree,
                }
                .serialize(s)
            }
        }
    }
}

impl Doc {
    fn into_manifest(self) -> Manifest {
        let graph = self.graph.map(|g| {
            let vertices = g
                .vertices
                .into_iter()
                .map(|v| Vertex {
                    id: v.id,
                    kind: v.kind,
                    orientable: v.orientable,
                    internal_omega_generators: v
                        .internal_omega_generators
                        .unwrap_or(u32::from(!v.orientable)),
                })
                .collect();
            let edges = g
                .edges
                .into_iter()
                .map(|e| Edge {
                    id: e.id,
                    from: e.from,
                    to: e.to,
                    h_ini: e.h_ini.value(),
                    h_ter: e.h_ter.value(),
                    omega: e.omega,
                })
                .collect();
            DecoratedJSJGraph::new(vertices, edges)
        });

        let flow = (!self.pieces.is_empty() || !self.tori.is_empty()).then(|| FlowManifest {
            pieces: self
                .pieces
                .into_iter()
                .map(|p| Piece {
                    id: p.id,
                    piece_type: p.piece_type,
                    boundaries: p
                        .boundaries
                        .into_iter()
                        .map(|b| Boundary {
                            id: b.id.unwrap_or_else(|| b.torus_id.clone()),
                            torus: b.torus_id,
                            degeneracy_slope: match b.gluing {
                                Some(GluingRepr(g)) => change_frame(&b.degeneracy_slope.0, &g),
                                None => b.degeneracy_slope.0,
                            },
                            leaf_length: b.leaf_length,
                        })
                        .collect(),
                })
                .collect(),
            tori: self
                .tori
                .into_iter()
                .map(|t| {
                    let side = |s: SideDoc| SideRef {
                        boundary: s.boundary.unwrap_or_else(|| t.id.clone()),
                        piece: s.piece,
                    };
                    Torus {
                        plus: side(t.plus_side),
                        minus: side(t.minus_side),
                        frame: t.frame,
                        reduction_curve: t.reduction_curve.map(|s| s.0),
                        twist_power: t.twist_power,
                        id: t.id,
                    }
                })
                .collect(),
        });

        let alpha = self.loop_.map(|cs| {
            LoopItinerary::new(
                cs.into_iter()
                    .enumerate()
                    .map(|(i, c)| Crossing {
                        id: c.id.unwrap_or_else(|| format!("c{i}")),
                        torus: c.torus_id,
                        curve: c.curve.0,
                        from_side: c.from_side,
                    })
                    .collect(),
            )
        });

        let twists = self
            .fdtc
            .into_iter()
            .enumerate()
            .map(|(i, t)| TwistData {
                id: t.id.unwrap_or_else(|| format!("fdtc{i}")),
                l_plus: t.l_plus.0,
                l_minus: t.l_minus.0,
                e: t.e.0,
                m: t.m,
            })
            .collect();

        Manifest {
            graph,
            flow,
            alpha,
            twists,
            expected: self.expected,
            generator: self.generator,
        }
    }

    fn from_manifest(m: &Manifest) -> Doc {
        let graph = m.graph.as_ref().map(|g| GraphDoc {
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexDoc {
                    id: v.id.clone(),
                    kind: v.kind,
                    orientable: v.orientable,
                    internal_omega_generators: (v.internal_omega_generators
                        != u32::from(!v.orientable))
                    .then_some(v.internal_omega_generators),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    from: e.from.clone(),
                    to: e.to.clone(),
                    h_ini: HRepr::Value(e.h_ini.clone()),
                    h_ter: HRepr::Value(e.h_ter.clone()),
                    omega: e.omega,
                })
                .collect(),
        });
        let (pieces, tori) = match &m.flow {
            None => (Vec::new(), Vec::new()),
            Some(f) => (
                f.pieces
                    .iter()
                    .map(|p| PieceDoc {
                        id: p.id.clone(),
                        piece_type: p.piece_type,
                        boundaries: p
                            .boundaries
                            .iter()
                            .map(|b| BoundaryDoc {
                                id: (b.id != b.torus).then(|| b.id.clone()),
                                torus_id: b.torus.clone(),
                                degeneracy_slope: SlopeRepr(b.degeneracy_slope),
                                leaf_length: b.leaf_length.clone(),
                                gluing: None,
                            })
                            .collect(),
                    })
                    .collect(),
                f.tori
                    .iter()
                    .map(|t| {
                        let side = |s: &SideRef| SideDoc {
                            piece: s.piece.clone(),
                            boundary: (s.boundary != t.id).then(|| s.boundary.clone()),
                        };
                        TorusDoc {
                            id: t.id.clone(),
                            plus_side: side(&t.plus),
                            minus_side: side(&t.minus),
                            frame: t.frame.clone(),
                            reduction_curve: t.reduction_curve.map(SlopeRepr),
                            twist_power: t.twist_power,
                        }
                    })
                    .collect(),
            ),
        };
        let loop_ = m.alpha.as_ref().map(|a| {
            a.crossings
                .iter()
                .map(|c| CrossingDoc {
                    id: Some(c.id.clone()),
                    torus_id: c.torus.clone(),
                    curve: SlopeRepr(c.curve),
                    from_side: c.from_side,
                })
                .collect()
        });
        let fdtc = m
            .twists
            .iter()
            .map(|t| TwistDoc {
                id: Some(t.id.clone()),
                l_plus: SlopeRepr(t.l_plus),
                l_minus: SlopeRepr(t.l_minus),
                e: SlopeRepr(t.e),
                m: t.m,
            })
            .collect();
        Doc {
            generator: m.generator.clone(),
            graph,
            pieces,
            tori,
            loop_,
            fdtc,
            expected: m.expected.clone(),
        }
    }
}
