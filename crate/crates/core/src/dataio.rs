//! Training data: CSV loading, seeded synthetic generation, and sample
//! geometry.

use crate::rng::Rng64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("csv header must be `x,y`, got `{0}`")]
    Header(String),
    #[error("x = {x} outside domain [{lower}, {upper}]")]
    OutOfDomain { x: f64, lower: f64, upper: f64 },
    #[error("duplicate x value {0}")]
    DuplicateX(f64),
    #[error("need at least {need} points, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("invalid domain: lower {0} must be finite and below upper {1}")]
    BadDomain(f64, f64),
    #[error("invalid synthetic spec: {0}")]
    BadSpec(String),
}

/// Compact interval `[lower, upper]` the map is analyzed on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lower: f64,
    pub upper: f64,
}

impl Domain {
    pub fn new(lower: f64, upper: f64) -> Result<Self, DataError> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(DataError::BadDomain(lower, upper));
        }
        Ok(Domain { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// Observed samples of the unknown map, all inputs distinct and inside the
/// domain.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingData {
    points: Vec<(f64, f64)>,
    domain: Domain,
}

impl TrainingData {
    pub fn new(points: Vec<(f64, f64)>, domain: Domain) -> Result<Self, DataError> {
        if points.len() < 2 {
            return Err(DataError::TooFew {
                need: 2,
                got: points.len(),
            });
        }
        for &(x, _) in &points {
            if !domain.contains(x) {
                return Err(DataError::OutOfDomain {
                    x,
                    lower: domain.lower,
                    upper: domain.upper,
                });
            }
        }
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        for w in xs.windows(2) {
            if w[0] == w[1] {
                return Err(DataError::DuplicateX(w[0]));
            }
        }
        Ok(TrainingData { points, domain })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Covering radius of the sample inside the domain.
    pub fn covering_radius(&self) -> f64 {
        let xs: Vec<f64> = self.xs().collect();
        covering_radius_of(&xs, self.domain)
    }
}

/// Max over the domain of the distance to the nearest sample point.
///
/// From the sorted sample this is exact: full distance at the two boundary
/// gaps, half the gap between consecutive interior samples.
pub fn covering_radius_of(xs: &[f64], domain: Domain) -> f64 {
    assert!(!xs.is_empty(), "covering radius needs at least one sample");
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let mut r = (s[0] - domain.lower).max(domain.upper - s[s.len() - 1]);
    for w in s.windows(2) {
        r = r.max((w[1] - w[0]) / 2.0);
    }
    r
}

/// Closed-form 1D maps used to synthesize example data sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFunction {
    /// `r x (1 - x)`
    Logistic { r: f64 },
    /// `a atan(b x + c) + s`
    ArctanSigmoid { a: f64, b: f64, c: f64, s: f64 },
    /// `h exp(-w (x - c)^2)`
    GaussBump { h: f64, w: f64, c: f64 },
    /// Piecewise-linear interpolation through sorted `(x, y)` knots.
    Table { knots: Vec<(f64, f64)> },
}

impl MapFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            MapFunction::Logistic { r } => r * x * (1.0 - x),
            MapFunction::ArctanSigmoid { a, b, c, s } => a * (b * x + c).atan() + s,
            MapFunction::GaussBump { h, w, c } => h * (-w * (x - c) * (x - c)).exp(),
            MapFunction::Table { knots } => {
                if knots.is_empty() {
                    return 0.0;
                }
                if x <= knots[0].0 {
                    return knots[0].1;
                }
                let last = knots[knots.len() - 1];
                if x >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|k| k.0 <= x);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    fn validate(&self) -> Result<(), DataError> {
        let finite = |v: f64| v.is_finite();
        let ok = match self {
            MapFunction::Logistic { r } => finite(*r),
            MapFunction::ArctanSigmoid { a, b, c, s } => {
                finite(*a) && finite(*b) && finite(*c) && finite(*s)
            }
            MapFunction::GaussBump { h, w, c } => finite(*h) && finite(*w) && finite(*c),
            MapFunction::Table { knots } => {
                knots.len() >= 2
                    && knots.iter().all(|k| finite(k.0) && finite(k.1))
                    && knots.windows(2).all(|w| w[0].0 < w[1].0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(DataError::BadSpec(format!("{self:?}")))
        }
    }
}

/// Recipe for a reproducible synthetic data set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub function: MapFunction,
    pub count: usize,
    pub seed: u64,
}

/// Draws `count` inputs i.i.d. uniform on the domain from the seeded
/// generator and evaluates the map exactly at each.
pub fn generate(spec: &SyntheticSpec, domain: Domain) -> Result<TrainingData, DataError> {
    if spec.count < 2 {
        return Err(DataError::TooFew {
            need: 2,
            got: spec.count,
        });
    }
    spec.function.validate()?;
    let mut rng = Rng64::seed_from(spec.seed);
    let points: Vec<(f64, f64)> = (0..spec.count)
        .map(|_| {
            let x = domain.lower + domain.width() * rng.next_f64();
            (x, spec.function.eval(x))
        })
        .collect();
    TrainingData::new(points, domain)
}

/// Reads `x,y` rows (UTF-8, header required) and validates them against the
/// domain.
pub fn load_csv(path: &Path, domain: Domain) -> Result<TrainingData, DataError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != "x,y" {
        return Err(DataError::Header(header));
    }
    let mut points = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut parts = t.split(',');
        let parse = |s: Option<&str>| -> Result<f64, DataError> {
            s.map(str::trim)
                .filter(|s| !s.is_empty())
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or(DataError::Parse {
                    line: line_no,
                    msg: format!("malformed row `{t}`"),
                })
        };
        let x = parse(parts.next())?;
        let y = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(DataError::Parse {
                line: line_no,
                msg: "expected exactly two fields".into(),
            });
        }
        points.push((x, y));
    }
    TrainingData::new(points, domain)
}

/// Writes the data set back as `x,y` rows with round-trip float formatting.
pub fn write_csv(path: &Path, data: &TrainingData) -> Result<(), DataError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "x,y")?;
    for &(x, y) in data.points() {
        writeln!(f, "{x},{y}")?;
    }
    Ok(())
}
