//! JSON instance files.
//!
//! ```json
//! {"metric": {"kind": "euclidean-L2", "points": [[0, 0], [3, 4]]},
//!  "facilities": [{"point": 0, "cost": 10}],
//!  "kappa": 2}
//! ```
//!
//! `kind` is one of `explicit-matrix` (with `matrix`), `euclidean-L2` or
//! `euclidean-Linf` (with `points`). One-dimensional points may be given as
//! bare numbers.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Instance, MetricKind, MetricSpace, PointId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub metric: MetricFile,
    pub facilities: Vec<FacilityFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Coords>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coords {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacilityFile {
    pub point: usize,
    #[serde(deserialize_with = "positive_cost")]
    pub cost: f64,
}

fn positive_cost<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("opening cost must be positive, got {v}")))
    }
}

impl InstanceFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_instance<T: Scalar>(&self) -> Result<Instance<T>> {
        let convert = |v: f64| {
            T::from_f64_value(v).ok_or_else(|| Error::InvalidInstance(format!("{v} is not a valid {}", T::NAME)))
        };
        let metric = match self.metric.kind.as_str() {
            "explicit-matrix" => {
                let rows = self
                    .metric
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInstance("explicit-matrix requires \"matrix\"".into()))?;
                let rows = rows
                    .iter()
                    .map(|row| row.iter().map(|&v| convert(v)).collect::<Result<Vec<T>>>())
                    .collect::<Result<Vec<_>>>()?;
                MetricSpace::from_matrix(rows)?
            }
            kind @ ("euclidean-L2" | "euclidean-Linf") => {
                let points = self
                    .metric
                    .points
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInstance(format!("{kind} requires \"points\"")))?;
                let points = points
                    .iter()
                    .map(|c| match c {
                        Coords::Scalar(x) => Ok(vec![convert(*x)?]),
                        Coords::Vector(xs) => xs.iter().map(|&x| convert(x)).collect(),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let kind = if kind == "euclidean-L2" { MetricKind::EuclideanL2 } else { MetricKind::EuclideanLinf };
                MetricSpace::euclidean(kind, points)?
            }
            other => return Err(Error::InvalidInstance(format!("unknown metric kind {other:?}"))),
        };
        let facilities =
            self.facilities.iter().map(|f| Ok((PointId(f.point), convert(f.cost)?))).collect::<Result<Vec<_>>>()?;
        Instance::new(metric, facilities, self.kappa)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

pub fn read_instance<T: Scalar>(path: &Path) -> Result<Instance<T>> {
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    InstanceFile::parse(&text, &path.display().to_string())?.to_instance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::PointId;

    const LINE5: &str = r#"{
  "metric": {"kind": "euclidean-L2", "points": [0, 25, 50, 100, 101]},
  "facilities": [{"point": 0, "cost": 10}, {"point": 3, "cost": 10}]
}"#;

    #[test]
    fn parses_line5() {
        let inst: Instance<f64> = InstanceFile::parse(LINE5, "line5.json").unwrap().to_instance().unwrap();
        assert_eq!(inst.num_points(), 5);
        assert_eq!(inst.facilities().len(), 2);
        assert_eq!(inst.distance(PointId(0), PointId(3)).unwrap(), 100.0);
    }

    #[test]
    fn negative_cost_reports_position() {
        let text = LINE5.replace("\"cost\": 10}]", "\"cost\": -1}]");
        match InstanceFile::parse(&text, "bad.json") {
            Err(Error::Parse { line, column, message, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
                assert!(message.contains("positive"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_matrix_names_the_pair() {
        let text = r#"{"metric": {"kind": "explicit-matrix", "matrix": [[0, 1, 2], [1, 0, 1], [2, 3, 0]]},
                       "facilities": [{"point": 0, "cost": 1}]}"#;
        let err = InstanceFile::parse(text, "m.json").unwrap().to_instance::<f64>().unwrap_err();
        assert!(err.to_string().contains("(P1,P2)"), "{err}");
    }

    #[test]
    fn exact_scalar_loads_integer_instance() {
        let inst: Instance<crate::Rational> = InstanceFile::parse(LINE5, "line5.json").unwrap().to_instance().unwrap();
        assert_eq!(inst.distance(PointId(3), PointId(4)).unwrap(), crate::Rational::from_integer(1));
    }

    #[test]
    fn round_trips_through_json() {
        let file = InstanceFile::parse(LINE5, "line5.json").unwrap();
        let again = InstanceFile::parse(&file.to_json(), "again.json").unwrap();
        assert_eq!(again.to_instance::<f64>().unwrap(), file.to_instance::<f64>().unwrap());
    }
}
