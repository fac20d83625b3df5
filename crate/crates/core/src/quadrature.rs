//! Composite Gauss-Legendre rules on graded panels.
//!
//! Panels are uniform across the well, where the eigenfunctions oscillate,
//! and grow geometrically through the slowly decaying `exp(-eps x)` tail of
//! the highest level. The y axis is the x axis shifted by a small offset so
//! that no node pair lands on the line `y = x`.

use std::f64::consts::PI;
use std::ops::Range;

use crate::morse::MorseParams;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the Bonnet recurrence
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Panel breakpoints along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisLayout {
    pub x_min: f64,
    pub x_max: f64,
    pub breakpoints: Vec<f64>,
}

impl AxisLayout {
    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Self {
        assert!(breakpoints.len() >= 2);
        assert!(breakpoints.windows(2).all(|w| w[1] > w[0]), "breakpoints must increase");
        Self {
            x_min: breakpoints[0],
            x_max: *breakpoints.last().unwrap(),
            breakpoints,
        }
    }

    /// Layout covering every bound level of `params`.
    ///
    /// Left edge: `exp(-z/2) z^p` has dropped by `e^-60` from its peak.
    /// Uniform panels run to `ln(nu) + 8`, then widths grow by 1.6 until the
    /// `z^eps` tail of the top level is below roughly `1e-13`.
    pub fn for_params(params: &MorseParams) -> Self {
        let p = params.p;
        let width = (5.0 / (0.5 * params.nu)).min(0.5);

        let drop = |z: f64| 0.5 * z - p * z.ln() - (p - p * (2.0 * p).ln());
        let (mut lo, mut hi) = (2.0 * p, 4.0 * p + 200.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if drop(mid) < 60.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x_min = ((params.nu / hi).ln() - 1.0).floor();
        let core_panels = ((params.nu.ln() + 8.0 - x_min) / width).ceil() as usize;
        let decay = params.eps.max(0.05);
        let x_max = params.nu.ln() + 32.0 / decay;

        let mut breakpoints: Vec<f64> = (0..=core_panels).map(|i| x_min + i as f64 * width).collect();
        let mut w = 2.0 * width;
        let mut x = *breakpoints.last().unwrap();
        while x < x_max {
            x = if x_max - (x + w) < 0.5 * w { x_max } else { x + w };
            breakpoints.push(x);
            w *= 1.6;
        }
        Self::from_breakpoints(breakpoints)
    }

    /// Split every panel into `parts` equal pieces.
    pub fn refined(&self, parts: usize) -> Self {
        assert!(parts >= 1);
        let mut bp = vec![self.breakpoints[0]];
        for w in self.breakpoints.windows(2) {
            for s in 1..=parts {
                bp.push(if s == parts { w[1] } else { w[0] + (w[1] - w[0]) * s as f64 / parts as f64 });
            }
        }
        Self::from_breakpoints(bp)
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self::from_breakpoints(self.breakpoints.iter().map(|b| b + offset).collect())
    }

    pub fn panels(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn smallest_panel(&self) -> f64 {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Nodes and weights along one axis, grouped by panel.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadAxis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub panels: Vec<Range<usize>>,
}

impl QuadAxis {
    pub fn new(layout: &AxisLayout, nodes_per_panel: usize) -> Self {
        let (t, w) = gauss_legendre(nodes_per_panel);
        let mut nodes = Vec::with_capacity(layout.panels() * nodes_per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut panels = Vec::with_capacity(layout.panels());
        for b in layout.breakpoints.windows(2) {
            let (mid, half) = (0.5 * (b[0] + b[1]), 0.5 * (b[1] - b[0]));
            let start = nodes.len();
            nodes.extend(t.iter().map(|ti| mid + half * ti));
            weights.extend(w.iter().map(|wi| half * wi));
            panels.push(start..nodes.len());
        }
        Self { nodes, weights, panels }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub nodes_per_panel: usize,
    /// Each default panel is split into this many pieces.
    pub refine: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            nodes_per_panel: 16,
            refine: 1,
        }
    }
}

/// Tensor-product rule over the truncation box.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub x: QuadAxis,
    pub y: QuadAxis,
    pub diagonal_offset: f64,
}

impl QuadratureGrid {
    pub fn new(layout: &AxisLayout, nodes_per_panel: usize, diagonal_offset: f64) -> Self {
        Self {
            x: QuadAxis::new(layout, nodes_per_panel),
            y: QuadAxis::new(&layout.shifted(diagonal_offset), nodes_per_panel),
            diagonal_offset,
        }
    }

    pub fn for_params(params: &MorseParams, options: QuadratureOptions) -> Self {
        let base = AxisLayout::for_params(params);
        let offset = 0.0173 * base.smallest_panel();
        Self::new(&base.refined(options.refine), options.nodes_per_panel, offset)
    }

    pub fn len(&self) -> usize {
        self.x.nodes.len() * self.y.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest `|x_i - y_j|` over all node pairs.
    pub fn min_diagonal_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for &x in &self.x.nodes {
            let pos = self.y.nodes.partition_point(|&y| y < x);
            for j in pos.saturating_sub(1)..(pos + 1).min(self.y.nodes.len()) {
                best = best.min((x - self.y.nodes[j]).abs());
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::psi1d;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 24] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
            assert!(x.windows(2).all(|p| p[1] > p[0]));
        }
    }

    #[test]
    fn known_three_point_rule() {
        let (x, w) = gauss_legendre(3);
        assert_relative_eq!(x[2], (0.6f64).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(w[0], 5.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(w[1], 8.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn default_layout_p3pi() {
        let mp = MorseParams::new(3.0 * std::f64::consts::PI).unwrap();
        let l = AxisLayout::for_params(&mp);
        assert_eq!(l.x_min, -4.0);
        assert!(l.x_max > 75.0);
        let r = l.refined(2);
        assert_eq!(r.panels(), 2 * l.panels());
        assert_eq!(r.x_max, l.x_max);
    }

    #[test]
    fn no_node_on_diagonal() {
        let mp = MorseParams::new(3.0 * std::f64::consts::PI).unwrap();
        for refine in [1, 2] {
            let g = QuadratureGrid::for_params(&mp, QuadratureOptions { nodes_per_panel: 16, refine });
            assert!(g.min_diagonal_distance() > 1e-12);
        }
    }

    #[test]
    fn ground_state_calibration() {
        let mp = MorseParams::new(3.0 * std::f64::consts::PI).unwrap();
        let g = QuadratureGrid::for_params(&mp, QuadratureOptions::default());
        let nx = g.x.integrate(|x| psi1d(&mp, 0, x).unwrap().powi(2));
        let ny = g.y.integrate(|y| psi1d(&mp, 0, y).unwrap().powi(2));
        assert!((nx * ny - 1.0).abs() < 1e-10, "{}", nx * ny - 1.0);
        for n in 0..=mp.k {
            let v = g.x.integrate(|x| psi1d(&mp, n, x).unwrap().powi(2));
            assert!((v - 1.0).abs() < 1e-10, "n={n}: {}", v - 1.0);
        }
    }
}
