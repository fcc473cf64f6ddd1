use crate::error::{Error, Result};
use crate::space::{MetricSpace, Point, SpaceDesc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Open,
    Closed,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Open => "open",
            Variant::Closed => "closed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub id: usize,
    pub location: Point,
    pub release: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub space: MetricSpace,
    pub origin: Point,
    pub requests: Vec<Request>,
    pub predictions: Vec<Point>,
    pub variant: Variant,
}

impl Instance {
    /// Builds and checks an instance; points are normalized.
    pub fn new(space: MetricSpace, requests: Vec<(Point, f64)>, predictions: Vec<Point>, variant: Variant) -> Result<Self> {
        let v = space.validate();
        if !v.is_empty() {
            return Err(Error::InvalidSpace(v.join("; ")));
        }
        if predictions.len() != requests.len() {
            return Err(Error::InvalidInstance(format!(
                "{} predictions for {} requests",
                predictions.len(),
                requests.len()
            )));
        }
        let mut reqs = Vec::with_capacity(requests.len());
        for (id, (x, t)) in requests.into_iter().enumerate() {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidInstance(format!("request {id} has release time {t}")));
            }
            reqs.push(Request { id, location: space.normalize(&x)?, release: t });
        }
        let predictions = predictions.iter().map(|p| space.normalize(p)).collect::<Result<Vec<_>>>()?;
        Ok(Instance { origin: space.origin(), space, requests: reqs, predictions, variant })
    }

    /// Instance whose predictions are the true locations.
    pub fn perfect(space: MetricSpace, requests: Vec<(Point, f64)>, variant: Variant) -> Result<Self> {
        let preds = requests.iter().map(|(x, _)| x.clone()).collect();
        Instance::new(space, requests, preds, variant)
    }

    pub fn n(&self) -> usize {
        self.requests.len()
    }

    pub fn locations(&self) -> Vec<Point> {
        self.requests.iter().map(|r| r.location.clone()).collect()
    }

    pub fn releases(&self) -> Vec<f64> {
        self.requests.iter().map(|r| r.release).collect()
    }

    pub fn with_predictions(&self, predictions: Vec<Point>) -> Instance {
        Instance { predictions, ..self.clone() }
    }

    /// The instance served by a perfectly informed algorithm: predictions
    /// replaced with the true locations.
    pub fn truthful(&self) -> Instance {
        self.with_predictions(self.locations())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let desc: SpaceDesc = serde_json::from_value(v.get("space").cloned().ok_or_else(|| Error::Parse("missing `space`".into()))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        let space = desc.build()?;
        let v_issues = space.validate();
        if !v_issues.is_empty() {
            return Err(Error::InvalidSpace(v_issues.join("; ")));
        }
        if let Some(o) = v.get("origin") {
            let o = space.point_from_json(o)?;
            if space.dist(&o, &space.origin()) > crate::TOL {
                return Err(Error::InvalidInstance("the origin must be the space's distinguished origin".into()));
            }
        }
        let variant = match v.get("variant") {
            Some(x) => serde_json::from_value(x.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            None => Variant::Closed,
        };
        let empty = Vec::new();
        let reqs = v.get("requests").and_then(|r| r.as_array()).unwrap_or(&empty);
        let mut requests = Vec::with_capacity(reqs.len());
        for r in reqs {
            let x = space.point_from_json(r.get("x").ok_or_else(|| Error::Parse(format!("request without `x`: {r}")))?)?;
            let t = r.get("t").and_then(|t| t.as_f64()).ok_or_else(|| Error::Parse(format!("request without numeric `t`: {r}")))?;
            requests.push((x, t));
        }
        let predictions = match v.get("predictions").and_then(|p| p.as_array()) {
            Some(ps) => ps.iter().map(|p| space.point_from_json(p)).collect::<Result<Vec<_>>>()?,
            None => requests.iter().map(|(x, _)| x.clone()).collect(),
        };
        Instance::new(space, requests, predictions, variant)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "space": serde_json::to_value(SpaceDesc::of(&self.space)).expect("descriptor serializes"),
            "origin": self.space.point_to_json(&self.origin),
            "requests": self.requests.iter().map(|r| json!({
                "x": self.space.point_to_json(&r.location),
                "t": r.release,
            })).collect::<Vec<_>>(),
            "predictions": self.predictions.iter().map(|p| self.space.point_to_json(p)).collect::<Vec<_>>(),
            "variant": self.variant.name(),
        })
    }

    /// Same instance with every length and time multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Instance {
        let space = self.space.scaled(c);
        Instance {
            origin: space.origin(),
            requests: self
                .requests
                .iter()
                .map(|r| Request { id: r.id, location: self.space.scale_point(&r.location, c), release: r.release * c })
                .collect(),
            predictions: self.predictions.iter().map(|p| self.space.scale_point(p, c)).collect(),
            variant: self.variant,
            space,
        }
    }
}
