//! Wire formats: distribution specs, relation names and real lists on the way
//! in; JSON with full-precision floats and flat CSV on the way out.

use std::io;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::elliptical::{EllipticalDistribution, GeneratorSpec};
use crate::error::{Error, Result};
use crate::order::OrderRelation;

/// JSON form of an elliptical distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub dim: usize,
    pub location: Vec<f64>,
    pub dispersion: Vec<Vec<f64>>,
    pub generator: GeneratorSpec,
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

impl DistributionSpec {
    pub fn from_distribution(d: &EllipticalDistribution) -> Self {
        let n = d.dim();
        Self {
            dim: n,
            location: d.mu().iter().copied().collect(),
            dispersion: (0..n).map(|i| d.sigma().row(i).iter().copied().collect()).collect(),
            generator: d.generator().clone(),
        }
    }

    /// Shape checks report the offending JSON path; the model checks
    /// (symmetry, PSD, generator parameters) report domain errors.
    pub fn to_distribution(&self) -> Result<EllipticalDistribution> {
        let n = self.dim;
        if n == 0 {
            return Err(parse_error("dim", "dimension must be at least 1"));
        }
        if self.location.len() != n {
            return Err(parse_error(
                "location",
                format!("expected {n} entries, found {}", self.location.len()),
            ));
        }
        if self.dispersion.len() != n {
            return Err(parse_error(
                "dispersion",
                format!("expected {n} rows, found {}", self.dispersion.len()),
            ));
        }
        for (i, row) in self.dispersion.iter().enumerate() {
            if row.len() != n {
                return Err(parse_error(
                    format!("dispersion[{i}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
        }
        let sigma = DMatrix::from_fn(n, n, |i, j| self.dispersion[i][j]);
        EllipticalDistribution::from_parts(&self.location, sigma, self.generator.clone())
    }
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(path, e.into_inner().to_string())
    })
}

pub fn parse_distribution_spec(text: &str) -> Result<DistributionSpec> {
    from_json(text)
}

/// Parses and validates a distribution.
pub fn parse_distribution(text: &str) -> Result<EllipticalDistribution> {
    parse_distribution_spec(text)?.to_distribution()
}

pub fn parse_generator(text: &str) -> Result<GeneratorSpec> {
    let g: GeneratorSpec = from_json(text)?;
    g.validate()?;
    Ok(g)
}

pub fn parse_relation(text: &str) -> Result<OrderRelation> {
    text.parse()
}

/// Any JSON document with path-annotated errors, e.g. a previously emitted
/// report.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    from_json(text)
}

/// Finite reals separated by commas or whitespace, optionally in brackets:
/// `0,0.3,0.6` or `[0, 0.3, 0.6]`.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    let inner = match (t.strip_prefix('['), t.ends_with(']')) {
        (Some(rest), true) => &rest[..rest.len() - 1],
        (None, false) => t,
        _ => return Err(parse_error("", "unbalanced brackets")),
    };
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            let v: f64 = s
                .parse()
                .map_err(|_| parse_error(format!("[{i}]"), format!("`{s}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_error(format!("[{i}]"), "value must be finite"))
            }
        })
        .collect()
}

/// Pretty JSON that writes every float with 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as indented JSON with 17 significant digits per float.
/// Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| Error::Serialize(e.to_string()))
}

/// Header plus one CSV record per row.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Serialize(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}
