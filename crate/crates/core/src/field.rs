//! Complex scalar fields on the plane, evaluable pointwise or on tensor grids.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::par;

/// A wavefunction-like field `f(x, y)` with an analytic x-derivative.
///
/// `tabulate` may share work across grid nodes but must agree bit-for-bit
/// with `value` and `dx` at every node.
pub trait FieldEval: Send + Sync {
    fn value(&self, x: f64, y: f64) -> Complex64;

    fn dx(&self, x: f64, y: f64) -> Complex64;

    fn tabulate(&self, xs: &[f64], ys: &[f64], with_dx: bool) -> SampledGrid {
        SampledGrid::build(xs, ys, with_dx, |i, j| {
            let (x, y) = (xs[i], ys[j]);
            let d = if with_dx { self.dx(x, y) } else { Complex64::new(0.0, 0.0) };
            (self.value(x, y), d)
        })
    }
}

/// Samples on a tensor grid, row-major with `y` selecting the row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Complex64>,
    pub dx: Option<Vec<Complex64>>,
}

impl SampledGrid {
    /// Fill a grid from `node(i, j) -> (value, dx)`; rows are computed in
    /// parallel but each row is written in order.
    pub fn build<F>(xs: &[f64], ys: &[f64], with_dx: bool, node: F) -> Self
    where
        F: Fn(usize, usize) -> (Complex64, Complex64) + Sync + Send,
    {
        let rows = par::map_indexed(ys.len(), |j| {
            let mut v = Vec::with_capacity(xs.len());
            let mut d = Vec::with_capacity(if with_dx { xs.len() } else { 0 });
            for i in 0..xs.len() {
                let (a, b) = node(i, j);
                v.push(a);
                if with_dx {
                    d.push(b);
                }
            }
            (v, d)
        });
        let mut values = Vec::with_capacity(xs.len() * ys.len());
        let mut dx = Vec::with_capacity(if with_dx { values.capacity() } else { 0 });
        for (v, d) in rows {
            values.extend(v);
            dx.extend(d);
        }
        Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            values,
            dx: with_dx.then_some(dx),
        }
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.xs.len() + i]
    }
}

/// Shared handle to a field plus an optional cached sampling.
#[derive(Clone)]
pub struct ScalarField2D {
    eval: Arc<dyn FieldEval>,
    samples: Option<Arc<SampledGrid>>,
}

impl fmt::Debug for ScalarField2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField2D")
            .field("sampled", &self.samples.as_ref().map(|s| (s.nx(), s.ny())))
            .finish()
    }
}

impl ScalarField2D {
    pub fn new(eval: Arc<dyn FieldEval>) -> Self {
        Self { eval, samples: None }
    }

    #[inline]
    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        self.eval.value(x, y)
    }

    #[inline]
    pub fn dx(&self, x: f64, y: f64) -> Complex64 {
        self.eval.dx(x, y)
    }

    pub fn tabulate(&self, xs: &[f64], ys: &[f64], with_dx: bool) -> SampledGrid {
        match &self.samples {
            Some(s) if s.xs == xs && s.ys == ys && (!with_dx || s.dx.is_some()) => (**s).clone(),
            _ => self.eval.tabulate(xs, ys, with_dx),
        }
    }

    /// Attach a cached sampling on the given grid.
    pub fn sampled(mut self, xs: &[f64], ys: &[f64], with_dx: bool) -> Self {
        self.samples = Some(Arc::new(self.eval.tabulate(xs, ys, with_dx)));
        self
    }

    pub fn samples(&self) -> Option<&SampledGrid> {
        self.samples.as_deref()
    }

    pub fn evaluator(&self) -> &Arc<dyn FieldEval> {
        &self.eval
    }
}

impl<T: FieldEval + 'static> From<T> for ScalarField2D {
    fn from(eval: T) -> Self {
        Self::new(Arc::new(eval))
    }
}

/// `sum_t c_t f_t(x, y)`, accumulated in term order.
pub struct Superposition {
    terms: Vec<(Complex64, ScalarField2D)>,
}

impl Superposition {
    pub fn new(terms: Vec<(Complex64, ScalarField2D)>) -> Self {
        Self { terms }
    }
}

impl FieldEval for Superposition {
    fn value(&self, x: f64, y: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, f) in &self.terms {
            acc += c * f.value(x, y);
        }
        acc
    }

    fn dx(&self, x: f64, y: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, f) in &self.terms {
            acc += c * f.dx(x, y);
        }
        acc
    }

    fn tabulate(&self, xs: &[f64], ys: &[f64], with_dx: bool) -> SampledGrid {
        let len = xs.len() * ys.len();
        let mut values = vec![Complex64::new(0.0, 0.0); len];
        let mut dx = vec![Complex64::new(0.0, 0.0); if with_dx { len } else { 0 }];
        for (c, f) in &self.terms {
            let g = f.tabulate(xs, ys, with_dx);
            for (acc, v) in values.iter_mut().zip(&g.values) {
                *acc += c * v;
            }
            if let Some(gd) = &g.dx {
                for (acc, v) in dx.iter_mut().zip(gd) {
                    *acc += c * v;
                }
            }
        }
        SampledGrid {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            values,
            dx: with_dx.then_some(dx),
        }
    }
}
