//! Twisted Neumann-Zagier data and the objects derived from it: the twisted
//! 1-loop invariant, the propagator `Pi(t)` and the cover matrices.

use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};

use crate::circulant::BlockCirculant;
use crate::error::{Error, Result};
use crate::exactfield::serial::{coords_to_value, field_to_value, parse_element, parse_field};
use crate::exactfield::{FieldElement, NumberField};
use crate::laurent::laurent_poly::normalize_rational_unit;
use crate::laurent::{LaurentMatrix, LaurentPolynomial, RatMatrix};
use crate::linalg::FieldMatrix;

/// Integer peripheral rows and the gluing row they are added to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peripheral {
    pub a_mu: Vec<i64>,
    pub b_mu: Vec<i64>,
    pub a_lambda: Vec<i64>,
    pub b_lambda: Vec<i64>,
    pub row: usize,
}

/// Which peripheral curve fixes the constant propagator `Pi_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Curve {
    #[default]
    Longitude,
    Meridian,
}

#[derive(Debug)]
pub struct TwistedNZData {
    field: Arc<NumberField>,
    root_index: usize,
    a: LaurentMatrix,
    b: LaurentMatrix,
    shapes: Vec<FieldElement>,
    peripheral: Option<Peripheral>,
    propagator: OnceLock<RatMatrix>,
}

impl Clone for TwistedNZData {
    fn clone(&self) -> Self {
        TwistedNZData {
            field: self.field.clone(),
            root_index: self.root_index,
            a: self.a.clone(),
            b: self.b.clone(),
            shapes: self.shapes.clone(),
            peripheral: self.peripheral.clone(),
            propagator: self.propagator.clone(),
        }
    }
}

impl TwistedNZData {
    /// Validates and builds the data. `field` must contain the shapes.
    pub fn new(
        field: &Arc<NumberField>,
        a: LaurentMatrix,
        b: LaurentMatrix,
        shapes: Vec<FieldElement>,
        peripheral: Option<Peripheral>,
    ) -> Result<Self> {
        let n = shapes.len();
        let bad = |m: String| Err(Error::InvalidNzData(m));
        if (a.rows(), a.cols(), b.rows(), b.cols()) != (n, n, n, n) {
            return bad(format!("A and B must be {n}x{n}"));
        }
        for (j, z) in shapes.iter().enumerate() {
            if z.is_zero() || z.is_one() {
                return bad(format!("shape z_{j} must avoid 0 and 1"));
            }
        }
        if let Some(p) = &peripheral {
            if [&p.a_mu, &p.b_mu, &p.a_lambda, &p.b_lambda]
                .iter()
                .any(|v| v.len() != n)
                || p.row >= n
            {
                return bad(
                    "peripheral rows must have length N and replace an existing row".into(),
                );
            }
        }
        let det_b = b.det()?;
        if det_b.is_zero() {
            return bad("det B(t) vanishes identically".into());
        }
        if !det_b.eval_one().is_zero() {
            return bad("det B(t) is not divisible by t - 1".into());
        }
        let x = b.inverse()?.mul(&RatMatrix::from_laurent(&a));
        if x.invert_variable() != x.transpose() {
            return bad("B(1/t)^-1 A(1/t) differs from the transpose of B(t)^-1 A(t)".into());
        }
        Ok(TwistedNZData {
            field: field.clone(),
            root_index: 0,
            a,
            b,
            shapes,
            peripheral,
            propagator: OnceLock::new(),
        })
    }

    pub fn with_root_index(mut self, root_index: usize) -> Result<Self> {
        if root_index >= self.field.degree() {
            return Err(Error::RootIndex {
                index: root_index,
                degree: self.field.degree(),
            });
        }
        self.root_index = root_index;
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.shapes.len()
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn a(&self) -> &LaurentMatrix {
        &self.a
    }

    pub fn b(&self) -> &LaurentMatrix {
        &self.b
    }

    pub fn shapes(&self) -> &[FieldElement] {
        &self.shapes
    }

    pub fn peripheral(&self) -> Option<&Peripheral> {
        self.peripheral.as_ref()
    }

    /// `z' = 1/(1 - z)`.
    pub fn z_prime(&self) -> Vec<FieldElement> {
        self.shapes
            .iter()
            .map(|z| (&self.field.one() - z).inverse().unwrap())
            .collect()
    }

    /// `z'' = 1 - 1/z`.
    pub fn z_double_prime(&self) -> Vec<FieldElement> {
        self.shapes
            .iter()
            .map(|z| &self.field.one() - &z.inverse().unwrap())
            .collect()
    }

    fn delta_z(&self) -> FieldMatrix {
        let zp = self.z_prime();
        FieldMatrix::from_fn(&self.field, self.size(), self.size(), |i, j| {
            if i == j {
                zp[i].clone()
            } else {
                self.field.zero()
            }
        })
    }

    /// `det(A(t) - B(t) Delta_z') / (t - 1)`, up to a unit `c t^k`.
    pub fn twisted_one_loop(&self) -> Result<LaurentPolynomial> {
        let m = self
            .a
            .sub(&self.b.mul(&LaurentMatrix::constant(&self.delta_z())));
        let det = m.det()?;
        let t_minus_1 = LaurentPolynomial::from_ints(&self.field, 0, &[-1, 1]);
        let q = det.div_exact(&t_minus_1).ok_or(Error::NotDivisible)?;
        if q.is_zero() {
            return Err(Error::NotDivisible);
        }
        Ok(normalize_rational_unit(&q))
    }

    /// `Pi(t) = (-B(t)^-1 A(t) + Delta_z')^-1 = (B Delta_z' - A)^-1 B`.
    pub fn propagator(&self) -> &RatMatrix {
        self.propagator.get_or_init(|| {
            let m = self
                .b
                .mul(&LaurentMatrix::constant(&self.delta_z()))
                .sub(&self.a);
            // invertible: its determinant is (t - 1) delta(t) up to sign
            m.inverse()
                .expect("propagator of validated data")
                .mul(&RatMatrix::from_laurent(&self.b))
        })
    }

    pub fn propagator_at(&self, t: &FieldElement) -> Result<FieldMatrix> {
        self.propagator().eval(t).map_err(|_| Error::SingularAtRoot)
    }

    /// The constant propagator used for the zero flow value.
    pub fn pi_zero(&self, curve: Curve) -> Result<FieldMatrix> {
        match curve {
            Curve::Longitude => self.propagator_at(&self.field.one()),
            Curve::Meridian => {
                let p = self
                    .peripheral
                    .as_ref()
                    .ok_or_else(|| Error::InvalidNzData("meridian rows not supplied".into()))?;
                let with_row = |m: FieldMatrix, v: &[i64]| {
                    let mut m = m;
                    for (j, &x) in v.iter().enumerate() {
                        let e = m.get(p.row, j) + &self.field.from_int(x);
                        m.set(p.row, j, e);
                    }
                    m
                };
                let a = with_row(self.a.eval_one(), &p.a_mu);
                let b = with_row(self.b.eval_one(), &p.b_mu);
                let x = b.solve(&a).map_err(|_| Error::SingularAtRoot)?;
                let m = self.delta_z().sub(&x);
                m.inverse().map_err(|_| Error::SingularAtRoot)
            }
        }
    }

    /// `(A^(n), B^(n))`, folding exponents mod `n`.
    pub fn cover_matrices(&self, n: usize) -> Result<(BlockCirculant, BlockCirculant)> {
        Ok((
            BlockCirculant::from_representer(&self.a, n)?,
            BlockCirculant::from_representer(&self.b, n)?,
        ))
    }

    pub fn to_json(&self) -> Value {
        let matrix_terms = |m: &LaurentMatrix| {
            let Some((lo, hi)) = m.exponent_range() else {
                return json!([]);
            };
            Value::Array(
                (lo..=hi)
                    .filter_map(|k| {
                        let c = m.coefficient(k);
                        if c.is_zero() {
                            return None;
                        }
                        let rows: Vec<Value> = (0..c.rows())
                            .map(|i| {
                                Value::Array(
                                    c.row(i)
                                        .iter()
                                        .map(|x| {
                                            let q = x.to_rational().expect("integer NZ matrices");
                                            json!(q
                                                .to_integer()
                                                .to_string()
                                                .parse::<i64>()
                                                .unwrap())
                                        })
                                        .collect(),
                                )
                            })
                            .collect();
                        Some(json!({"exp": k, "matrix": rows}))
                    })
                    .collect(),
            )
        };
        let mut v = json!({
            "field": field_to_value(&self.field, self.root_index),
            "N": self.size(),
            "shapes": self.shapes.iter().map(coords_to_value).collect::<Vec<_>>(),
            "A": matrix_terms(&self.a),
            "B": matrix_terms(&self.b),
        });
        if let Some(p) = &self.peripheral {
            v["peripheral"] = json!({
                "a_mu": p.a_mu, "b_mu": p.b_mu, "a_lambda": p.a_lambda, "b_lambda": p.b_lambda, "row": p.row,
            });
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let (field, root_index) =
            parse_field(v.get("field").unwrap_or(&json!({"minpoly": [0, 1]})))?;
        let n = v
            .get("N")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("NZ data needs \"N\"".into()))? as usize;
        let shapes = v
            .get("shapes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("NZ data needs \"shapes\"".into()))?
            .iter()
            .map(|s| parse_element(s, &field))
            .collect::<Result<Vec<_>>>()?;
        if shapes.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} shapes, got {}",
                shapes.len()
            )));
        }
        let q = NumberField::rationals();
        let matrix = |key: &str| -> Result<LaurentMatrix> {
            let terms = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("NZ data needs {key:?}")))?;
            let mut parts = Vec::new();
            for t in terms {
                let k = t
                    .get("exp")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| Error::Parse("matrix term needs an integer \"exp\"".into()))?;
                let rows = int_rows(t.get("matrix"))?;
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!("{key} matrices must be {n}x{n}")));
                }
                parts.push((k, FieldMatrix::from_ints(&q, &rows)?));
            }
            if parts.is_empty() {
                return Ok(LaurentMatrix::zeros(&q, n, n));
            }
            LaurentMatrix::from_coefficients(&q, &parts)
        };
        let a = matrix("A")?;
        let b = matrix("B")?;
        let peripheral = match v.get("peripheral") {
            None | Some(Value::Null) => None,
            Some(p) => {
                let row = |k: &str| -> Result<Vec<i64>> {
                    int_row(p.get(k))
                        .map_err(|_| Error::Parse(format!("peripheral needs integer row {k:?}")))
                };
                Some(Peripheral {
                    a_mu: row("a_mu")?,
                    b_mu: row("b_mu")?,
                    a_lambda: row("a_lambda")?,
                    b_lambda: row("b_lambda")?,
                    row: p
                        .get("row")
                        .and_then(Value::as_u64)
                        .map_or(n.saturating_sub(1), |r| r as usize),
                })
            }
        };
        Self::new(&field, a, b, shapes, peripheral)?.with_root_index(root_index)
    }
}

fn int_row(v: Option<&Value>) -> Result<Vec<i64>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected an integer row".into()))?
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| Error::Parse(format!("expected an integer, got {x}")))
        })
        .collect()
}

fn int_rows(v: Option<&Value>) -> Result<Vec<Vec<i64>>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected an integer matrix".into()))?
        .iter()
        .map(|r| int_row(Some(r)))
        .collect()
}
