//! JSON descriptors for spaces and points.

use super::{Flower, GeneralMetric, MetricSpace, Part, Point, WeightedTree};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceDesc {
    Line,
    Euclid2d,
    Tree {
        /// `[parent, child, length]`; a null length is an unbounded leaf edge.
        edges: Vec<(usize, usize, Option<f64>)>,
    },
    Ring {
        circumference: f64,
    },
    Flower {
        petals: Vec<f64>,
        #[serde(default)]
        stem: f64,
    },
    General {
        #[serde(default)]
        sites: Vec<String>,
        matrix: Vec<Vec<f64>>,
    },
}

impl SpaceDesc {
    /// Builds the space; structural errors (not metric violations) fail here.
    pub fn build(&self) -> Result<MetricSpace> {
        Ok(match self {
            SpaceDesc::Line => MetricSpace::Line,
            SpaceDesc::Euclid2d => MetricSpace::Euclid2D,
            SpaceDesc::Tree { edges } => MetricSpace::Tree(WeightedTree::from_edges(edges)?),
            SpaceDesc::Ring { circumference } => MetricSpace::Ring { circumference: *circumference },
            SpaceDesc::Flower { petals, stem } => {
                MetricSpace::Flower(Flower { petals: petals.clone(), stem: *stem })
            }
            SpaceDesc::General { sites, matrix } => {
                let sites = if sites.is_empty() {
                    (0..matrix.len()).map(|i| format!("s{i}")).collect()
                } else {
                    sites.clone()
                };
                MetricSpace::General(GeneralMetric { sites, matrix: matrix.clone() })
            }
        })
    }

    pub fn of(space: &MetricSpace) -> SpaceDesc {
        match space {
            MetricSpace::Line => SpaceDesc::Line,
            MetricSpace::Euclid2D => SpaceDesc::Euclid2d,
            MetricSpace::Tree(t) => SpaceDesc::Tree { edges: t.edges() },
            MetricSpace::Ring { circumference } => SpaceDesc::Ring { circumference: *circumference },
            MetricSpace::Flower(f) => SpaceDesc::Flower { petals: f.petals.clone(), stem: f.stem },
            MetricSpace::General(g) => SpaceDesc::General { sites: g.sites.clone(), matrix: g.matrix.clone() },
        }
    }
}

fn num(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Parse(format!("expected a number, got {v}")))
}

fn index(v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("expected a nonnegative integer, got {v}")))
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| Error::Parse(format!("missing field `{k}` in {v}")))
}

impl MetricSpace {
    /// Reads a point in the space's own JSON shape.
    pub fn point_from_json(&self, v: &Value) -> Result<Point> {
        let p = match self {
            MetricSpace::Line => Point::Line(num(v)?),
            MetricSpace::Ring { .. } => Point::Ring(num(v)?),
            MetricSpace::Euclid2D => match v.as_array().map(|a| a.as_slice()) {
                Some([x, y]) => Point::Plane(num(x)?, num(y)?),
                _ => return Err(Error::Parse(format!("expected [x, y], got {v}"))),
            },
            MetricSpace::Tree(_) => match v {
                Value::Array(a) if a.len() == 2 => Point::Tree { edge: index(&a[0])?, offset: num(&a[1])? },
                Value::Object(_) => Point::Tree { edge: index(field(v, "edge")?)?, offset: num(field(v, "offset")?)? },
                _ => return Err(Error::Parse(format!("expected [edge, offset], got {v}"))),
            },
            MetricSpace::Flower(_) => {
                if let Some(s) = v.get("stem") {
                    Point::Flower { part: Part::Stem, offset: num(s)? }
                } else {
                    Point::Flower { part: Part::Petal(index(field(v, "petal")?)?), offset: num(field(v, "offset")?)? }
                }
            }
            MetricSpace::General(_) => match v {
                Value::Object(_) => Point::Between {
                    from: index(field(v, "from")?)?,
                    to: index(field(v, "to")?)?,
                    traveled: num(field(v, "traveled")?)?,
                },
                _ => Point::Site(index(v)?),
            },
        };
        self.normalize(&p)
    }

    pub fn point_to_json(&self, p: &Point) -> Value {
        match p {
            Point::Line(x) | Point::Ring(x) => json!(x),
            Point::Plane(x, y) => json!([x, y]),
            Point::Tree { edge, offset } => json!([edge, offset]),
            Point::Flower { part: Part::Stem, offset } => json!({ "stem": offset }),
            Point::Flower { part: Part::Petal(i), offset } => json!({ "petal": i, "offset": offset }),
            Point::Site(i) => json!(i),
            Point::Between { from, to, traveled } => json!({ "from": from, "to": to, "traveled": traveled }),
        }
    }

    /// Short human-readable form used in trajectory CSV files.
    pub fn point_label(&self, p: &Point) -> String {
        match p {
            Point::Line(x) | Point::Ring(x) => format!("{x}"),
            Point::Plane(x, y) => format!("({x} {y})"),
            Point::Tree { edge, offset } => format!("e{edge}@{offset}"),
            Point::Flower { part: Part::Stem, offset } => format!("stem@{offset}"),
            Point::Flower { part: Part::Petal(i), offset } => format!("petal{i}@{offset}"),
            Point::Site(i) => match self {
                MetricSpace::General(g) => g.sites.get(*i).cloned().unwrap_or_else(|| format!("s{i}")),
                _ => format!("s{i}"),
            },
            Point::Between { from, to, traveled } => format!("s{from}->s{to}@{traveled}"),
        }
    }
}
