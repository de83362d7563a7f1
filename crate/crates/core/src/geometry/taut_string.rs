//! Minimal-energy path through a tube of vertical gates.
//!
//! Among all absolutely continuous `f` with `f(0) = 0`, optionally `f(1)`
//! pinned, and `lower[k] ≤ f(x[k]) ≤ upper[k]`, the taut string minimises
//! every strictly convex functional of `f′`, in particular `∫ f′²`. It is
//! piecewise linear with vertices on the gate ends, and is found in linear
//! time by the funnel algorithm.

use super::SmoothPath;
use crate::process::Trajectory;
use crate::{Error, Result};

/// Gates `[lower[k], upper[k]]` at strictly increasing `knots` from 0 to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Tube {
    knots: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    end: Option<f64>,
}

impl Tube {
    /// Tube with start pinned at 0 and `end` pinned when given.
    pub fn new(knots: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>, end: Option<f64>) -> Result<Self> {
        let k = knots.len();
        if k < 2 || lower.len() != k || upper.len() != k {
            return Err(Error::invalid("tube arrays must have equal length ≥ 2"));
        }
        if knots[0] != 0.0 || knots[k - 1] != 1.0 || knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("tube knots must increase strictly from 0 to 1"));
        }
        if lower.iter().chain(&upper).chain(&end).any(|v| v.is_nan()) {
            return Err(Error::invalid("tube bounds must not be NaN"));
        }
        Ok(Tube {
            knots,
            lower,
            upper,
            end,
        })
    }

    /// The tube `{f : |g − f| ≤ ε on [0, 1]}` restricted to continuous
    /// paths that are affine between the knots of `g`. At each knot the gate
    /// covers the left limit, the value and the right limit, which is exact
    /// because the minimal-energy member is affine between those knots.
    pub fn around(g: &Trajectory, epsilon: f64, end: Option<f64>) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::invalid(format!("tube half-width {epsilon} must be nonnegative")));
        }
        let (lower, upper) = g
            .knot_envelopes()
            .map(|(lo, hi)| (hi - epsilon, lo + epsilon))
            .unzip();
        Self::new(g.knots().to_vec(), lower, upper, end)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn end(&self) -> Option<f64> {
        self.end
    }

    /// First knot where the tube is empty or misses a pinned value.
    pub fn infeasible_at(&self) -> Option<usize> {
        let last = self.knots.len() - 1;
        if !(self.lower[0] <= 0.0 && 0.0 <= self.upper[0]) {
            return Some(0);
        }
        if let Some(k) = (0..=last).find(|&k| !(self.lower[k] <= self.upper[k])) {
            return Some(k);
        }
        match self.end {
            Some(e) if !(self.lower[last] <= e && e <= self.upper[last]) => Some(last),
            _ => None,
        }
    }
}

/// Minimal-energy path through the tube, or `None` when the tube is empty.
pub fn taut_string(tube: &Tube) -> Option<SmoothPath> {
    if tube.infeasible_at().is_some() {
        return None;
    }
    let k = tube.knots.len();
    let mut lo = tube.lower.clone();
    let mut hi = tube.upper.clone();
    lo[0] = 0.0;
    hi[0] = 0.0;
    let vertices = match tube.end {
        Some(e) => {
            lo[k - 1] = e;
            hi[k - 1] = e;
            funnel(&tube.knots, &lo, &hi)
        }
        None => {
            // Reflect about x = 1 and pin the far end at 0; the symmetric
            // optimum restricted to [0, 1] solves the free-end problem.
            let (mut x, mut l, mut h) = (tube.knots.clone(), lo.clone(), hi.clone());
            for j in (0..k - 1).rev() {
                let xm = 1.0 + (1.0 - tube.knots[j]);
                if xm <= *x.last().unwrap() {
                    let last = l.len() - 1;
                    l[last] = l[last].max(lo[j]);
                    h[last] = h[last].min(hi[j]);
                    if l[last] > h[last] {
                        return None;
                    }
                } else {
                    x.push(xm);
                    l.push(lo[j]);
                    h.push(hi[j]);
                }
            }
            *x.last_mut().unwrap() = 2.0;
            let last = l.len() - 1;
            l[last] = 0.0;
            h[last] = 0.0;
            funnel(&x, &l, &h)
        }
    };
    Some(sample_vertices(&vertices, &tube.knots))
}

type Pt = (f64, f64);

/// `slope(a, b) < slope(a, c)` for `a.x < b.x, c.x`.
fn steeper(a: Pt, b: Pt, c: Pt) -> bool {
    (b.1 - a.1) * (c.0 - a.0) < (c.1 - a.1) * (b.0 - a.0)
}

/// `slope(a, b) ≥ slope(b, c)` for `a.x < b.x < c.x`.
fn not_convex(a: Pt, b: Pt, c: Pt) -> bool {
    (b.1 - a.1) * (c.0 - b.0) >= (c.1 - b.1) * (b.0 - a.0)
}

/// `slope(a, b) ≤ slope(b, c)` for `a.x < b.x < c.x`.
fn not_concave(a: Pt, b: Pt, c: Pt) -> bool {
    (b.1 - a.1) * (c.0 - b.0) <= (c.1 - b.1) * (b.0 - a.0)
}

/// Shortest path through gates `[lo[k], hi[k]]` at `x[k]`, with both end
/// gates degenerate. Returns the vertices, including both ends.
fn funnel(x: &[f64], lo: &[f64], hi: &[f64]) -> Vec<Pt> {
    let start = (x[0], lo[0]);
    let mut out = vec![start];
    // Upper chain: convex, hugging the upper gate ends. Lower chain: concave.
    let mut upper = vec![start];
    let mut lower = vec![start];
    let (mut uh, mut lh) = (0usize, 0usize);
    for k in 1..x.len() {
        let p = (x[k], hi[k]);
        while upper.len() - uh >= 2 && not_convex(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        if upper.len() - uh == 1 {
            while lower.len() - lh >= 2 && steeper(upper[uh], p, lower[lh + 1]) {
                lh += 1;
                out.push(lower[lh]);
                upper.clear();
                upper.push(lower[lh]);
                uh = 0;
            }
        }
        upper.push(p);

        let q = (x[k], lo[k]);
        while lower.len() - lh >= 2 && not_concave(lower[lower.len() - 2], lower[lower.len() - 1], q) {
            lower.pop();
        }
        if lower.len() - lh == 1 {
            while upper.len() - uh >= 2 && steeper(lower[lh], upper[uh + 1], q) {
                uh += 1;
                out.push(upper[uh]);
                lower.clear();
                lower.push(upper[uh]);
                lh = 0;
            }
        }
        lower.push(q);
    }
    out.extend_from_slice(&upper[uh + 1..]);
    out
}

/// Evaluates the polyline through `vertices` at the sorted `knots ⊂ [0, 1]`.
fn sample_vertices(vertices: &[Pt], knots: &[f64]) -> SmoothPath {
    let mut values = Vec::with_capacity(knots.len());
    let mut j = 0usize;
    for &t in knots {
        while j + 1 < vertices.len() && vertices[j + 1].0 <= t {
            j += 1;
        }
        let (x0, y0) = vertices[j];
        let v = if x0 == t || j + 1 == vertices.len() {
            y0
        } else {
            let (x1, y1) = vertices[j + 1];
            y0 + (y1 - y0) * ((t - x0) / (x1 - x0))
        };
        values.push(v);
    }
    values[0] = 0.0;
    SmoothPath::new_unchecked(knots.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Grid;

    fn grid_tube(m: usize, lower: Vec<f64>, upper: Vec<f64>, end: Option<f64>) -> Tube {
        Tube::new(Grid::new(m).unwrap().points().collect(), lower, upper, end).unwrap()
    }

    #[test]
    fn wide_tube_gives_zero_path() {
        let t = grid_tube(8, vec![-1.0; 9], vec![1.0; 9], None);
        let f = taut_string(&t).unwrap();
        assert_eq!(f.energy(), 0.0);
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn degenerate_tube_forces_the_identity() {
        let pts: Vec<f64> = Grid::new(8).unwrap().points().collect();
        let t = grid_tube(8, pts.clone(), pts.clone(), Some(1.0));
        let f = taut_string(&t).unwrap();
        assert!((f.energy() - 1.0).abs() < 1e-12);
        for (a, b) in f.values().iter().zip(&pts) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn conflicting_bounds_are_infeasible() {
        let mut lo = vec![-1.0; 5];
        lo[2] = 2.0;
        assert!(taut_string(&grid_tube(4, lo, vec![1.0; 5], None)).is_none());
        let t = grid_tube(4, vec![0.5; 5], vec![1.0; 5], None);
        assert_eq!(t.infeasible_at(), Some(0));
        assert!(taut_string(&t).is_none());
    }

    #[test]
    fn nan_bounds_are_rejected() {
        let pts: Vec<f64> = Grid::new(2).unwrap().points().collect();
        assert!(Tube::new(pts, vec![f64::NAN; 3], vec![1.0; 3], None).is_err());
    }

    #[test]
    fn string_wraps_around_a_peg() {
        // Must pass above 1 at t = 1/2 and return to 0: a tent of energy 4.
        let mut lo = vec![-10.0; 3];
        lo[1] = 1.0;
        let f = taut_string(&grid_tube(2, lo, vec![10.0; 3], Some(0.0))).unwrap();
        assert!((f.energy() - 4.0).abs() < 1e-12);
        // Free end: the string rises to the peg and stays flat.
        let mut lo = vec![-10.0; 3];
        lo[1] = 1.0;
        let f = taut_string(&grid_tube(2, lo, vec![10.0; 3], None)).unwrap();
        assert!((f.energy() - 2.0).abs() < 1e-12);
        assert!((f.eval(1.0) - 1.0).abs() < 1e-12);
    }
}
