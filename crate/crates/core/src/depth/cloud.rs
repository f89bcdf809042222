use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rational::{self, parse_decimal, round_to_denominator, Point, Rational};

/// One atom of a discrete measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub point: Point,
    pub weight: Rational,
}

/// An atomic probability measure on `R^dim` with exact rational weights that
/// sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPointCloud {
    dim: usize,
    atoms: Vec<Atom>,
}

impl WeightedPointCloud {
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dim == 0 {
            return Err(domain("cloud dimension must be at least 1"));
        }
        if atoms.is_empty() {
            return Err(domain("cloud needs at least one atom"));
        }
        let mut total = Rational::zero();
        for (i, a) in atoms.iter().enumerate() {
            if a.point.len() != dim {
                return Err(domain(format!("atom {i} has dimension {}, expected {dim}", a.point.len())));
            }
            if !a.weight.is_positive() {
                return Err(domain(format!("atom {i} has non-positive weight {}", a.weight)));
            }
            total += &a.weight;
        }
        if !total.is_one() {
            return Err(domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { dim, atoms })
    }

    /// Rescales positive weights so they sum to one.
    pub fn normalized(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        let total: Rational = atoms.iter().map(|a| &a.weight).sum();
        if !total.is_positive() {
            return Err(domain("weights must have a positive sum"));
        }
        let atoms = atoms.into_iter().map(|a| Atom { weight: a.weight / &total, point: a.point }).collect();
        Self::new(dim, atoms)
    }

    /// Equal weights `1/k` on the given points.
    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| domain("cloud needs at least one atom"))?;
        let w = Rational::new(BigInt::one(), BigInt::from(points.len()));
        Self::new(dim, points.into_iter().map(|point| Atom { point, weight: w.clone() }).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.atoms.iter().map(|a| &a.point)
    }

    /// Applies `x -> M x + t` to every atom (`M` given by rows).
    pub fn map_affine(&self, matrix: &[Vec<Rational>], offset: &[Rational]) -> Result<Self> {
        let out_dim = matrix.len();
        if out_dim == 0 || offset.len() != out_dim || matrix.iter().any(|r| r.len() != self.dim) {
            return Err(domain("affine map has the wrong shape for this cloud"));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { point: apply_affine(matrix, offset, &a.point), weight: a.weight.clone() })
            .collect();
        Self::new(out_dim, atoms)
    }

    pub fn translated(&self, shift: &[Rational]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(domain("translation has the wrong dimension"));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { point: a.point.iter().zip(shift).map(|(x, s)| x + s).collect(), weight: a.weight.clone() })
            .collect();
        Self::new(self.dim, atoms)
    }

    /// Coincident atoms merged with summed weights, in lexicographic point order.
    pub fn merged(&self) -> Self {
        let mut acc: BTreeMap<&Point, Rational> = BTreeMap::new();
        for a in &self.atoms {
            *acc.entry(&a.point).or_insert_with(Rational::zero) += &a.weight;
        }
        let atoms = acc.into_iter().map(|(p, w)| Atom { point: p.clone(), weight: w }).collect();
        Self { dim: self.dim, atoms }
    }

    /// Weighted mean of the atoms.
    pub fn mean(&self) -> Point {
        let mut m = vec![Rational::zero(); self.dim];
        for a in &self.atoms {
            for (mk, x) in m.iter_mut().zip(&a.point) {
                *mk += x * &a.weight;
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cloud serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads the tabular format: a header `x1,...,xd,weight` followed by one
    /// atom per line. Decimal values are read exactly and then rounded to the
    /// nearest multiple of `1/denominator_bound`; weights are rescaled to sum to one.
    pub fn from_csv(text: &str, denominator_bound: u64) -> Result<Self> {
        if denominator_bound == 0 {
            return Err(domain("denominator bound must be positive"));
        }
        let bound = BigInt::from(denominator_bound);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty table".into()))?;
        let cols: Vec<&str> = header.split([',', '\t']).map(str::trim).collect();
        let dim = cols.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| Error::Parse("table needs x1..xd and weight columns".into()))?;
        let expected: Vec<String> = (1..=dim).map(|i| format!("x{i}")).chain(["weight".to_string()]).collect();
        if cols.iter().zip(&expected).any(|(c, e)| !c.eq_ignore_ascii_case(e)) {
            return Err(Error::Parse(format!("header must be {}", expected.join(","))));
        }
        let mut atoms = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split([',', '\t']).map(str::trim).collect();
            if fields.len() != dim + 1 {
                return Err(Error::Parse(format!("row {} has {} fields, expected {}", lineno + 1, fields.len(), dim + 1)));
            }
            let values = fields
                .iter()
                .map(|f| parse_decimal(f).map(|v| round_to_denominator(&v, &bound)))
                .collect::<Result<Vec<_>>>()?;
            let (point, weight) = values.split_at(dim);
            atoms.push(Atom { point: point.to_vec(), weight: weight[0].clone() });
        }
        Self::normalized(dim, atoms)
    }

    /// Tabular output with exact `p/q` entries.
    pub fn to_csv(&self) -> String {
        let mut out = (1..=self.dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
        out.push_str(",weight\n");
        for a in &self.atoms {
            for x in &a.point {
                out.push_str(&rational::format_rational(x));
                out.push(',');
            }
            out.push_str(&rational::format_rational(&a.weight));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn apply_affine(matrix: &[Vec<Rational>], offset: &[Rational], p: &[Rational]) -> Point {
    matrix
        .iter()
        .zip(offset)
        .map(|(row, t)| row.iter().zip(p).fold(t.clone(), |acc, (m, x)| acc + m * x))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    #[serde(with = "rational::vec_as_str")]
    x: Vec<Rational>,
    #[serde(with = "rational::as_str")]
    w: Rational,
}

#[derive(Serialize, Deserialize)]
struct CloudRepr {
    dim: usize,
    atoms: Vec<AtomRepr>,
}

impl Serialize for WeightedPointCloud {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CloudRepr {
            dim: self.dim,
            atoms: self.atoms.iter().map(|a| AtomRepr { x: a.point.clone(), w: a.weight.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedPointCloud {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CloudRepr::deserialize(d)?;
        let atoms = r.atoms.into_iter().map(|a| Atom { point: a.x, weight: a.w }).collect();
        WeightedPointCloud::new(r.dim, atoms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn validation() {
        let p = vec![int(0)];
        assert!(WeightedPointCloud::new(1, vec![]).is_err());
        assert!(WeightedPointCloud::new(1, vec![Atom { point: p.clone(), weight: rat(1, 2) }]).is_err());
        assert!(WeightedPointCloud::new(2, vec![Atom { point: p.clone(), weight: int(1) }]).is_err());
        assert!(WeightedPointCloud::new(
            1,
            vec![Atom { point: p.clone(), weight: int(2) }, Atom { point: p.clone(), weight: int(-1) }]
        )
        .is_err());
        assert!(WeightedPointCloud::new(1, vec![Atom { point: p, weight: int(1) }]).is_ok());
    }

    #[test]
    fn json_round_trip_uses_strings() {
        let c = WeightedPointCloud::uniform(vec![vec![int(0), rat(1, 2)], vec![int(1), int(0)]]).unwrap();
        let text = c.to_json();
        assert!(text.contains("\"1/2\""));
        assert_eq!(WeightedPointCloud::from_json(&text).unwrap(), c);
        assert!(WeightedPointCloud::from_json(r#"{"dim":1,"atoms":[{"x":["0"],"w":"1/2"}]}"#).is_err());
    }

    #[test]
    fn csv_reads_decimals_exactly() {
        let c = WeightedPointCloud::from_csv("x1,x2,weight\n0.5,-1.25,1\n0,0,3\n", 1000).unwrap();
        assert_eq!(c.atoms()[0].point, vec![rat(1, 2), rat(-5, 4)]);
        assert_eq!(c.atoms()[0].weight, rat(1, 4));
        assert_eq!(c.atoms()[1].weight, rat(3, 4));
        let rounded = WeightedPointCloud::from_csv("x1,weight\n0.33333,1\n", 1000).unwrap();
        assert_eq!(rounded.atoms()[0].point, vec![rat(333, 1000)]);
        assert!(WeightedPointCloud::from_csv("a,b\n1,2\n", 10).is_err());
        assert!(WeightedPointCloud::from_csv("x1,weight\n1\n", 10).is_err());
    }

    #[test]
    fn merge_sums_coincident_atoms() {
        let c = WeightedPointCloud::uniform(vec![vec![int(1)], vec![int(0)], vec![int(1)]]).unwrap();
        let m = c.merged();
        assert_eq!(m.len(), 2);
        assert_eq!(m.atoms()[0].point, vec![int(0)]);
        assert_eq!(m.atoms()[1].weight, rat(2, 3));
    }
}
