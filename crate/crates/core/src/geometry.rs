//! Domain geometry: rectangles in ℂ, midpoint quadrature grids, compact
//! subsets with a safety margin, and zero-set sampling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::weights::Weight;
use crate::Result;

/// Closed axis-aligned rectangle centered at `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub center: Complex64,
    pub half_width_x: f64,
    pub half_width_y: f64,
}

impl Rect {
    pub fn new(center: Complex64, half_width_x: f64, half_width_y: f64) -> Result<Self> {
        let ok = center.re.is_finite()
            && center.im.is_finite()
            && half_width_x.is_finite()
            && half_width_y.is_finite()
            && half_width_x > 0.0
            && half_width_y > 0.0;
        if !ok {
            return Err(Error::BadRect);
        }
        Ok(Rect { center, half_width_x, half_width_y })
    }

    /// The square [−s, s]², the default experiment domain with s = 1.
    pub fn centered_square(s: f64) -> Result<Self> {
        Rect::new(Complex64::new(0.0, 0.0), s, s)
    }

    pub fn x_min(&self) -> f64 {
        self.center.re - self.half_width_x
    }

    pub fn x_max(&self) -> f64 {
        self.center.re + self.half_width_x
    }

    pub fn y_min(&self) -> f64 {
        self.center.im - self.half_width_y
    }

    pub fn y_max(&self) -> f64 {
        self.center.im + self.half_width_y
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_width_x * self.half_width_y
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z.re - self.center.re).abs() <= self.half_width_x
            && (z.im - self.center.im).abs() <= self.half_width_y
    }

    /// Distance from the origin to the rect; 0 when the rect contains 0.
    pub fn distance_to_origin(&self) -> f64 {
        let px = 0.0_f64.clamp(self.x_min(), self.x_max());
        let py = 0.0_f64.clamp(self.y_min(), self.y_max());
        px.hypot(py)
    }

    /// Largest |z| over the rect (attained at a corner).
    pub fn max_abs(&self) -> f64 {
        let x = self.center.re.abs() + self.half_width_x;
        let y = self.center.im.abs() + self.half_width_y;
        x.hypot(y)
    }
}

/// Midpoint tensor-product quadrature on a rect.
///
/// Nodes are cell centers in row-major order (y varies slowest): node
/// `iy * nx + ix` sits at (x_min + (ix+1/2)·hx, y_min + (iy+1/2)·hy).
/// Every weight equals `cell_area`; the Vec form is kept so downstream
/// code can treat the rule as a generic discrete measure.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub cell_area: f64,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn hx(&self) -> f64 {
        2.0 * self.rect.half_width_x / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        2.0 * self.rect.half_width_y / self.ny as f64
    }

    /// Coarsest spacing, the h in the resolution rule h ≤ 1/(4√k).
    pub fn spacing(&self) -> f64 {
        self.hx().max(self.hy())
    }

    pub fn row(&self, iy: usize) -> &[Complex64] {
        &self.nodes[iy * self.nx..(iy + 1) * self.nx]
    }

    /// ∫ f dA by the midpoint rule, folded row by row in grid order.
    pub fn integrate_real<F>(&self, f: F) -> f64
    where
        F: Fn(Complex64) -> f64 + Send + Sync,
    {
        let rows = crate::exec::map_indexed(self.ny, |iy| {
            let mut acc = 0.0;
            for &z in self.row(iy) {
                acc += f(z);
            }
            acc
        });
        self.cell_area * rows.iter().sum::<f64>()
    }

    /// Index of the grid node nearest to `z`.
    pub fn nearest_node(&self, z: Complex64) -> usize {
        let fx = (z.re - self.rect.x_min()) / self.hx() - 0.5;
        let fy = (z.im - self.rect.y_min()) / self.hy() - 0.5;
        let ix = (fx.round() as i64).clamp(0, self.nx as i64 - 1) as usize;
        let iy = (fy.round() as i64).clamp(0, self.ny as i64 - 1) as usize;
        iy * self.nx + ix
    }
}

pub fn build_grid(rect: &Rect, nx: usize, ny: usize) -> Result<Quadrature> {
    if nx == 0 || ny == 0 {
        return Err(Error::DegenerateGrid { nx, ny });
    }
    let hx = 2.0 * rect.half_width_x / nx as f64;
    let hy = 2.0 * rect.half_width_y / ny as f64;
    let (x0, y0) = (rect.x_min(), rect.y_min());
    let mut nodes = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        let y = y0 + (iy as f64 + 0.5) * hy;
        for ix in 0..nx {
            nodes.push(Complex64::new(x0 + (ix as f64 + 0.5) * hx, y));
        }
    }
    let cell_area = hx * hy;
    Ok(Quadrature { rect: *rect, nx, ny, cell_area, weights: vec![cell_area; nx * ny], nodes })
}

/// Compact subset K ⊂⊂ Ω obtained by shrinking the domain rect by `margin`
/// on every side. Sup-type functionals are evaluated on K only, away from
/// the boundary layer where the discrete projection is unreliable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactK {
    pub rect: Rect,
    pub margin: f64,
}

impl CompactK {
    pub fn contains(&self, z: Complex64) -> bool {
        self.rect.contains(z)
    }
}

pub fn shrink_to_compact(rect: &Rect, margin: f64) -> Result<CompactK> {
    let limit = rect.half_width_x.min(rect.half_width_y);
    if !(margin >= 0.0 && margin < limit) {
        return Err(Error::BadMargin { margin, limit });
    }
    let inner = Rect::new(rect.center, rect.half_width_x - margin, rect.half_width_y - margin)?;
    Ok(CompactK { rect: inner, margin })
}

/// Points on (an approximation of) the zero set E = {φ = 0} inside a rect.
#[derive(Debug, Clone)]
pub struct ZeroSetSample {
    pub points: Vec<Complex64>,
    pub tolerance: f64,
}

impl ZeroSetSample {
    /// Subset lying in K; errors when the intersection is empty.
    pub fn restrict(&self, k_region: &CompactK) -> Result<Vec<Complex64>> {
        let pts: Vec<Complex64> =
            self.points.iter().copied().filter(|&p| k_region.contains(p)).collect();
        if pts.is_empty() {
            return Err(Error::EmptySupSample);
        }
        Ok(pts)
    }
}

/// Samples E ∩ rect. Model weights carry a parametric description of E and
/// are sampled exactly; otherwise grid lines are scanned and each sign
/// change of the transverse derivative of φ is refined by bisection, keeping
/// the points where φ ≤ tolerance.
pub fn sample_zero_set(
    w: &Weight,
    rect: &Rect,
    n_samples: usize,
    tolerance: f64,
) -> Result<ZeroSetSample> {
    if n_samples == 0 {
        return Err(Error::BadArgument("n_samples must be positive".into()));
    }
    let mut points = match w.zero_curve() {
        Some(curve) => curve.sample(rect, n_samples),
        None => scan_lines(w, rect, n_samples),
    };
    points.retain(|&p| rect.contains(p) && w.eval(p) <= tolerance);
    if points.is_empty() {
        return Err(Error::EmptyZeroSet);
    }
    if points.len() > n_samples {
        let stride = points.len().div_ceil(n_samples);
        points = points.into_iter().step_by(stride).collect();
    }
    Ok(ZeroSetSample { points, tolerance })
}

/// Fallback scan: on each of `n_lines` vertical (resp. horizontal) lines,
/// bisect sign changes of ∂φ/∂y (resp. ∂φ/∂x). Duplicates between the two
/// sweeps are harmless for sup-type use.
fn scan_lines(w: &Weight, rect: &Rect, n_lines: usize) -> Vec<Complex64> {
    const PROBES: usize = 129;
    let mut pts = Vec::new();
    for i in 0..n_lines {
        let x = rect.x_min() + (i as f64 + 0.5) * (2.0 * rect.half_width_x / n_lines as f64);
        push_crossings(rect.y_min(), rect.y_max(), PROBES, |y| w.grad(Complex64::new(x, y)).1, |y| {
            pts.push(Complex64::new(x, y))
        });
    }
    for i in 0..n_lines {
        let y = rect.y_min() + (i as f64 + 0.5) * (2.0 * rect.half_width_y / n_lines as f64);
        push_crossings(rect.x_min(), rect.x_max(), PROBES, |x| w.grad(Complex64::new(x, y)).0, |x| {
            pts.push(Complex64::new(x, y))
        });
    }
    pts
}

fn push_crossings<G, E>(lo: f64, hi: f64, probes: usize, g: G, mut emit: E)
where
    G: Fn(f64) -> f64,
    E: FnMut(f64),
{
    let step = (hi - lo) / (probes - 1) as f64;
    let mut t0 = lo;
    let mut g0 = g(t0);
    for j in 1..probes {
        let t1 = lo + j as f64 * step;
        let g1 = g(t1);
        if g0 == 0.0 {
            emit(t0);
        } else if g0 * g1 < 0.0 {
            let (mut a, mut b, mut ga) = (t0, t1, g0);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let gm = g(m);
                if ga * gm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            emit(0.5 * (a + b));
        }
        t0 = t1;
        g0 = g1;
    }
    if g0 == 0.0 {
        emit(t0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{make_model_weight, ModelWeight, Weight};
    use proptest::prelude::*;

    fn unit_square() -> Rect {
        Rect::centered_square(1.0).unwrap()
    }

    fn kahan_sum(xs: &[f64]) -> f64 {
        let (mut s, mut c) = (0.0, 0.0);
        for &x in xs {
            let y = x - c;
            let t = s + y;
            c = (t - s) - y;
            s = t;
        }
        s
    }

    #[test]
    fn grid_layout_is_midpoint_row_major() {
        let r = Rect::new(Complex64::new(1.0, -0.5), 2.0, 1.5).unwrap();
        let q = build_grid(&r, 4, 3).unwrap();
        assert_eq!(q.len(), 12);
        assert_eq!(q.cell_area, 1.0 * 1.0);
        // first node: lower-left cell center
        assert_eq!(q.nodes[0], Complex64::new(-1.0 + 0.5, -2.0 + 0.5));
        // last node of first row, first node of second row
        assert_eq!(q.nodes[3], Complex64::new(1.0 + 1.5, -1.5));
        assert_eq!(q.nodes[4], Complex64::new(-0.5, -0.5));
        assert!(q.nodes.iter().all(|z| r.contains(*z)));
    }

    #[test]
    fn weights_sum_to_area() {
        for (nx, ny) in [(7, 13), (256, 256), (300, 200)] {
            let r = Rect::new(Complex64::new(0.3, -0.2), 1.1, 0.7).unwrap();
            let q = build_grid(&r, nx, ny).unwrap();
            let s = kahan_sum(&q.weights);
            assert!((s - r.area()).abs() <= 1e-12 * r.area(), "{nx}x{ny}: {s}");
        }
    }

    #[test]
    fn degenerate_grid_rejected() {
        let r = unit_square();
        assert!(matches!(build_grid(&r, 0, 16), Err(Error::DegenerateGrid { .. })));
        assert!(matches!(build_grid(&r, 16, 0), Err(Error::DegenerateGrid { .. })));
    }

    #[test]
    fn monomial_integral_matches_closed_form() {
        // ∫_{[−1,1]²} x² dA = 4/3; midpoint at 256² carries O(h²) error
        let q = build_grid(&unit_square(), 256, 256).unwrap();
        let got = q.integrate_real(|z| z.re * z.re);
        let exact = 4.0 / 3.0;
        assert!((got - exact).abs() <= 1e-4 * exact, "got {got}");
    }

    #[test]
    fn refinement_halves_error_quadratically() {
        // smooth non-polynomial integrand, exact value sin(1)·(e² − e⁻²)
        let exact = 1.0_f64.sin() * (2.0_f64.exp() - (-2.0_f64).exp());
        let err = |n: usize| {
            let q = build_grid(&unit_square(), n, n).unwrap();
            (q.integrate_real(|z| z.re.cos() * (2.0 * z.im).exp()) - exact).abs()
        };
        let (e32, e64, e128) = (err(32), err(64), err(128));
        let o1 = (e32 / e64).log2();
        let o2 = (e64 / e128).log2();
        assert!(o1 > 1.8 && o1 < 2.2, "order {o1}");
        assert!(o2 > 1.8 && o2 < 2.2, "order {o2}");
    }

    #[test]
    fn shrink_respects_margin_bounds() {
        let r = unit_square();
        let k = shrink_to_compact(&r, 0.25).unwrap();
        assert_eq!(k.rect.half_width_x, 0.75);
        assert!(k.contains(Complex64::new(0.75, -0.75)));
        assert!(!k.contains(Complex64::new(0.76, 0.0)));
        assert!(matches!(shrink_to_compact(&r, 1.0), Err(Error::BadMargin { .. })));
        assert!(matches!(shrink_to_compact(&r, -0.1), Err(Error::BadMargin { .. })));
    }

    #[test]
    fn flat_line_zero_set_is_sampled_parametrically() {
        let w = make_model_weight(ModelWeight::FlatLine, &unit_square()).unwrap();
        let e = sample_zero_set(&w, &unit_square(), 64, 1e-10).unwrap();
        assert_eq!(e.points.len(), 64);
        for p in &e.points {
            assert_eq!(p.im, 0.0);
            assert!(w.eval(*p) <= 1e-10);
        }
    }

    #[test]
    fn bisection_fallback_finds_a_circle() {
        // same φ as the circle model but without the parametric curve
        let w = Weight::from_parts(
            "circle_opaque",
            0.5,
            |z| {
                let d = z.norm() - 1.0;
                d * d
            },
            |z| {
                let rho = z.norm();
                let f = 2.0 * (rho - 1.0) / rho;
                (f * z.re, f * z.im)
            },
            |z| 1.0 - 0.5 / z.norm(),
            None,
        );
        let r = Rect::centered_square(2.0).unwrap();
        let e = sample_zero_set(&w, &r, 256, 1e-10).unwrap();
        assert!(e.points.len() >= 64);
        for p in &e.points {
            assert!((p.norm() - 1.0).abs() <= 1e-7, "off circle: {p}");
            assert!(w.eval(*p) <= 1e-10);
        }
    }

    #[test]
    fn empty_zero_set_is_an_error() {
        let w = make_model_weight(ModelWeight::FlatLine, &unit_square()).unwrap();
        let far = Rect::new(Complex64::new(2.5, 2.5), 0.5, 0.5).unwrap();
        assert!(matches!(sample_zero_set(&w, &far, 64, 1e-10), Err(Error::EmptyZeroSet)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn grid_nodes_stay_inside_and_weights_sum(
            cx in -3.0..3.0f64, cy in -3.0..3.0f64,
            hx in 0.1..4.0f64, hy in 0.1..4.0f64,
            nx in 1usize..24, ny in 1usize..24,
        ) {
            let r = Rect::new(Complex64::new(cx, cy), hx, hy).unwrap();
            let q = build_grid(&r, nx, ny).unwrap();
            prop_assert!(q.nodes.iter().all(|z| r.contains(*z)));
            let s = kahan_sum(&q.weights);
            prop_assert!((s - r.area()).abs() <= 1e-12 * r.area());
        }
    }
}
