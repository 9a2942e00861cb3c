use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar function of the projected covariates.
pub type LinkValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Writes the gradient of a link at `z` into the output slice.
pub type LinkGradientFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// `coef · Π z_i^{powers_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

impl Monomial {
    pub fn new(coef: f64, powers: Vec<u32>) -> Self {
        Self { coef, powers }
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    fn eval(&self, z: &[f64]) -> f64 {
        self.coef
            * self
                .powers
                .iter()
                .zip(z)
                .map(|(&p, &x)| x.powi(p as i32))
                .product::<f64>()
    }
}

/// Polynomial in `k` variables as a sum of monomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub k: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(k: usize, terms: Vec<Monomial>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("polynomial needs at least one variable".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.powers.len() != k) {
            return Err(Error::Shape(format!(
                "monomial {:?} has {} exponents, expected {k}",
                t.powers,
                t.powers.len()
            )));
        }
        Ok(Self { k, terms })
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn gradient_into(&self, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for t in &self.terms {
            for i in 0..self.k {
                let p = t.powers[i];
                if p == 0 {
                    continue;
                }
                let mut v = t.coef * p as f64;
                for (j, (&q, &x)) in t.powers.iter().zip(z).enumerate() {
                    let e = if j == i { q - 1 } else { q };
                    v *= x.powi(e as i32);
                }
                out[i] += v;
            }
        }
    }
}

/// User-supplied link.
#[derive(Clone)]
pub struct CustomLink {
    pub name: String,
    pub value: LinkValueFn,
    pub gradient: Option<LinkGradientFn>,
}

impl fmt::Debug for CustomLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLink")
            .field("name", &self.name)
            .field("has_gradient", &self.gradient.is_some())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum LinkKind {
    Linear(Vec<f64>),
    Polynomial(Polynomial),
    Custom(CustomLink),
}

/// Link function `f: ℝᵏ → ℝ`.
#[derive(Clone, Debug)]
pub struct LinkFunction {
    k: usize,
    kind: LinkKind,
}

impl LinkFunction {
    pub fn linear(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Parameter("linear link needs at least one coefficient".into()));
        }
        Ok(Self {
            k: a.len(),
            kind: LinkKind::Linear(a),
        })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self {
            k: p.k,
            kind: LinkKind::Polynomial(p),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        k: usize,
        value: LinkValueFn,
        gradient: Option<LinkGradientFn>,
    ) -> Self {
        Self {
            k,
            kind: LinkKind::Custom(CustomLink {
                name: name.into(),
                value,
                gradient,
            }),
        }
    }

    /// `f(z) = z₁² + z₂z₃`.
    pub fn paper_quadratic() -> Self {
        Self::polynomial(
            Polynomial::new(
                3,
                vec![Monomial::new(1.0, vec![2, 0, 0]), Monomial::new(1.0, vec![0, 1, 1])],
            )
            .expect("valid preset"),
        )
    }

    /// Single-variable power `f(z) = z^p`.
    pub fn power(p: u32) -> Self {
        Self::polynomial(Polynomial::new(1, vec![Monomial::new(1.0, vec![p])]).expect("valid preset"))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> &LinkKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            LinkKind::Linear(_) => "linear".into(),
            LinkKind::Polynomial(p) => format!("polynomial(degree {})", p.degree()),
            LinkKind::Custom(c) => c.name.clone(),
        }
    }

    /// Polynomial degree, when the link is a polynomial.
    pub fn degree(&self) -> Option<u32> {
        match &self.kind {
            LinkKind::Linear(_) => Some(1),
            LinkKind::Polynomial(p) => Some(p.degree()),
            LinkKind::Custom(_) => None,
        }
    }

    pub fn evaluate(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.k);
        match &self.kind {
            LinkKind::Linear(a) => a.iter().zip(z).map(|(x, y)| x * y).sum(),
            LinkKind::Polynomial(p) => p.eval(z),
            LinkKind::Custom(c) => (c.value)(z),
        }
    }

    pub fn has_gradient(&self) -> bool {
        !matches!(&self.kind, LinkKind::Custom(CustomLink { gradient: None, .. }))
    }

    /// Writes `∇f(z)` into `out`; returns `false` when no gradient is known.
    pub fn gradient_into(&self, z: &[f64], out: &mut [f64]) -> bool {
        match &self.kind {
            LinkKind::Linear(a) => {
                out.copy_from_slice(a);
                true
            }
            LinkKind::Polynomial(p) => {
                p.gradient_into(z, out);
                true
            }
            LinkKind::Custom(c) => match &c.gradient {
                Some(g) => {
                    g(z, out);
                    true
                }
                None => false,
            },
        }
    }

    pub fn gradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.k];
        self.gradient_into(z, &mut out).then_some(out)
    }
}
