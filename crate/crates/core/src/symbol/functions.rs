use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar test functions f applied to grid values and spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarFn {
    /// Constant 1.
    One,
    Identity,
    /// x^m.
    Power(u32),
    Log,
    Reciprocal,
    /// Piecewise-linear interpolation through (x, y) nodes with ascending x;
    /// constant extension outside the node range.
    Table(Vec<(f64, f64)>),
}

impl ScalarFn {
    pub fn apply(&self, x: f64) -> Result<f64> {
        match self {
            ScalarFn::One => Ok(1.0),
            ScalarFn::Identity => Ok(x),
            ScalarFn::Power(m) => Ok(x.powi(*m as i32)),
            ScalarFn::Log => {
                if x <= 0.0 {
                    Err(Error::Domain {
                        op: "log",
                        detail: format!("argument {x} is not positive"),
                    })
                } else {
                    Ok(x.ln())
                }
            }
            ScalarFn::Reciprocal => {
                if x == 0.0 {
                    Err(Error::Domain {
                        op: "reciprocal",
                        detail: "argument is zero".into(),
                    })
                } else {
                    Ok(1.0 / x)
                }
            }
            ScalarFn::Table(nodes) => {
                if nodes.is_empty() {
                    return Err(Error::Invalid("empty function table".into()));
                }
                if x <= nodes[0].0 {
                    return Ok(nodes[0].1);
                }
                if x >= nodes[nodes.len() - 1].0 {
                    return Ok(nodes[nodes.len() - 1].1);
                }
                let pos = nodes.partition_point(|&(nx, _)| nx <= x);
                let (x0, y0) = nodes[pos - 1];
                let (x1, y1) = nodes[pos];
                Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
            }
        }
    }

    /// Exact sup of |f| over [lo, hi]; every variant is piecewise monotone so
    /// the supremum sits at an endpoint or a table node.
    pub fn sup_abs(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo > hi {
            return Err(Error::Invalid(format!("empty interval [{lo}, {hi}]")));
        }
        match self {
            ScalarFn::One => Ok(1.0),
            ScalarFn::Identity => Ok(lo.abs().max(hi.abs())),
            ScalarFn::Power(m) => Ok(lo.abs().max(hi.abs()).powi(*m as i32)),
            ScalarFn::Log => {
                if lo <= 0.0 {
                    Err(Error::Domain {
                        op: "log",
                        detail: format!("interval [{lo}, {hi}] touches the origin"),
                    })
                } else {
                    Ok(lo.ln().abs().max(hi.ln().abs()))
                }
            }
            ScalarFn::Reciprocal => {
                if lo <= 0.0 && hi >= 0.0 {
                    Err(Error::Domain {
                        op: "reciprocal",
                        detail: format!("interval [{lo}, {hi}] contains zero"),
                    })
                } else {
                    Ok((1.0 / lo.abs()).max(1.0 / hi.abs()))
                }
            }
            ScalarFn::Table(nodes) => {
                let mut sup = self.apply(lo)?.abs().max(self.apply(hi)?.abs());
                for &(x, y) in nodes {
                    if x >= lo && x <= hi {
                        sup = sup.max(y.abs());
                    }
                }
                Ok(sup)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ScalarFn::One => "1".into(),
            ScalarFn::Identity => "x".into(),
            ScalarFn::Power(m) => format!("x^{m}"),
            ScalarFn::Log => "log".into(),
            ScalarFn::Reciprocal => "1/x".into(),
            ScalarFn::Table(nodes) => format!("table[{}]", nodes.len()),
        }
    }
}
