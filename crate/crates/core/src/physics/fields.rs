use crate::mesh::shoelace_area;
use crate::quadrature::{average_1d, average_polygon, average_rect};
use crate::Scalar;

/// Scalar field `φ(t, x, y)` with cell and edge averages. Used for initial
/// data (at `t = 0`), exact solutions and ghost values.
pub trait SpaceTimeField<T: Scalar>: Send + Sync {
    fn value(&self, t: T, x: T, y: T) -> T;

    /// Average over `[x0, x1] × [y0, y1]`. Default: 3-point Gauss per
    /// direction on a 2×2 split of the rectangle.
    fn rect_average(&self, t: T, b: [T; 4]) -> T {
        let xm = (b[0] + b[1]) * T::half();
        let ym = (b[2] + b[3]) * T::half();
        let f = |x, y| self.value(t, x, y);
        (average_rect(b[0], xm, b[2], ym, f)
            + average_rect(xm, b[1], b[2], ym, f)
            + average_rect(b[0], xm, ym, b[3], f)
            + average_rect(xm, b[1], ym, b[3], f))
            * T::lit(0.25)
    }

    fn polygon_average(&self, t: T, poly: &[[T; 2]]) -> T {
        average_polygon(poly, |x, y| self.value(t, x, y))
    }

    fn segment_average(&self, t: T, p: [T; 2], q: [T; 2]) -> T {
        average_1d(T::zero(), T::one(), |s| {
            self.value(t, p[0] + (q[0] - p[0]) * s, p[1] + (q[1] - p[1]) * s)
        })
    }
}

/// Wraps a closure `(t, x, y) ↦ φ`; averages by quadrature.
pub struct FnField<F>(pub F);

impl<T: Scalar, F: Fn(T, T, T) -> T + Send + Sync> SpaceTimeField<T> for FnField<F> {
    fn value(&self, t: T, x: T, y: T) -> T {
        (self.0)(t, x, y)
    }
}

/// `exp(t (x + y))`, with closed-form rectangle averages.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpSum;

/// Average of `exp(c s)` over `[a, b]`.
fn exp_average<T: Scalar>(c: T, a: T, b: T) -> T {
    let w = c * (b - a);
    if w == T::zero() {
        (c * a).exp()
    } else {
        (c * a).exp() * w.exp_m1() / w
    }
}

impl<T: Scalar> SpaceTimeField<T> for ExpSum {
    fn value(&self, t: T, x: T, y: T) -> T {
        (t * (x + y)).exp()
    }

    fn rect_average(&self, t: T, b: [T; 4]) -> T {
        exp_average(t, b[0], b[1]) * exp_average(t, b[2], b[3])
    }
}

/// `c · H(n·x - d)`, translated with constant drift `w`:
/// at time `t` the offset is `d + t (n·w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneStep<T> {
    pub coef: T,
    pub normal: [T; 2],
    pub offset: T,
}

/// Sum of translated half-plane indicators; all averages are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSum<T> {
    pub terms: Vec<HalfPlaneStep<T>>,
    pub drift: [T; 2],
}

/// Part of a polygon with `n·x >= d`.
fn clip_half_plane<T: Scalar>(poly: &[[T; 2]], n: [T; 2], d: T) -> Vec<[T; 2]> {
    let side = |p: &[T; 2]| n[0] * p[0] + n[1] * p[1] - d;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let s = poly[(k + poly.len() - 1) % poly.len()];
        let e = poly[k];
        let (fs, fe) = (side(&s), side(&e));
        let cut = || {
            let r = fs / (fs - fe);
            [s[0] + (e[0] - s[0]) * r, s[1] + (e[1] - s[1]) * r]
        };
        match (fs >= T::zero(), fe >= T::zero()) {
            (true, true) => out.push(e),
            (true, false) => out.push(cut()),
            (false, true) => {
                out.push(cut());
                out.push(e);
            }
            (false, false) => {}
        }
    }
    out
}

impl<T: Scalar> StepSum<T> {
    pub fn new(terms: Vec<HalfPlaneStep<T>>, drift: [T; 2]) -> Self {
        Self { terms, drift }
    }

    /// `Σ c_k 1[x > a_k]` (normal `+x`) and `Σ c_k 1[y > b_k]` (normal `+y`).
    pub fn axis_steps(x_steps: &[(T, T)], y_steps: &[(T, T)], drift: [T; 2]) -> Self {
        let mut terms = Vec::new();
        for &(c, a) in x_steps {
            terms.push(HalfPlaneStep {
                coef: c,
                normal: [T::one(), T::zero()],
                offset: a,
            });
        }
        for &(c, b) in y_steps {
            terms.push(HalfPlaneStep {
                coef: c,
                normal: [T::zero(), T::one()],
                offset: b,
            });
        }
        Self::new(terms, drift)
    }

    fn offset_at(&self, s: &HalfPlaneStep<T>, t: T) -> T {
        s.offset + t * (s.normal[0] * self.drift[0] + s.normal[1] * self.drift[1])
    }
}

impl<T: Scalar> SpaceTimeField<T> for StepSum<T> {
    fn value(&self, t: T, x: T, y: T) -> T {
        self.terms
            .iter()
            .filter(|s| s.normal[0] * x + s.normal[1] * y > self.offset_at(s, t))
            .map(|s| s.coef)
            .sum()
    }

    fn rect_average(&self, t: T, b: [T; 4]) -> T {
        self.polygon_average(t, &[[b[0], b[2]], [b[1], b[2]], [b[1], b[3]], [b[0], b[3]]])
    }

    fn polygon_average(&self, t: T, poly: &[[T; 2]]) -> T {
        let area = shoelace_area(poly);
        self.terms
            .iter()
            .map(|s| {
                let cut = clip_half_plane(poly, s.normal, self.offset_at(s, t));
                if cut.len() < 3 {
                    T::zero()
                } else {
                    s.coef * (shoelace_area(&cut) / area).min(T::one()).max(T::zero())
                }
            })
            .sum()
    }

    fn segment_average(&self, t: T, p: [T; 2], q: [T; 2]) -> T {
        self.terms
            .iter()
            .map(|s| {
                let d = self.offset_at(s, t);
                let fp = s.normal[0] * p[0] + s.normal[1] * p[1] - d;
                let fq = s.normal[0] * q[0] + s.normal[1] * q[1] - d;
                let frac = if fp >= T::zero() && fq >= T::zero() {
                    T::one()
                } else if fp <= T::zero() && fq <= T::zero() {
                    T::zero()
                } else if fp > T::zero() {
                    fp / (fp - fq)
                } else {
                    fq / (fq - fp)
                };
                s.coef * frac
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heaviside_half() -> StepSum<f64> {
        StepSum::axis_steps(&[(1.0, 0.5)], &[], [0.0, 0.0])
    }

    #[test]
    fn unit_cell_half_covered() {
        assert_eq!(heaviside_half().rect_average(0.0, [0.0, 1.0, 0.0, 1.0]), 0.5);
    }

    #[test]
    fn translated_steps() {
        let s = StepSum::<f64>::axis_steps(&[(0.5, -0.25)], &[(0.5, -0.25)], [1.0, 1.0]);
        assert_eq!(s.value(2.0, 1.8, 1.8), 0.5 * 2.0);
        assert_eq!(s.value(2.0, 1.7, 1.8), 0.5);
        assert!((s.rect_average(1.0, [0.5, 1.0, 0.0, 1.0]) - (0.5 * 0.5 + 0.5 * 0.25)).abs() < 1e-15);
        assert!((s.segment_average(1.0, [0.5, 0.5], [1.0, 0.5]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn oblique_step_on_triangle() {
        let s = StepSum::new(
            vec![HalfPlaneStep {
                coef: 2.0,
                normal: [1.0, 1.0],
                offset: 1.0,
            }],
            [0.0, 0.0],
        );
        // triangle (0,0),(2,0),(0,2): region x+y>=1 has area 2 - 1/2
        let avg: f64 = s.polygon_average(0.0, &[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]);
        assert!((avg - 2.0 * 1.5 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exp_sum_closed_form_matches_quadrature() {
        let f = FnField(|t: f64, x: f64, y: f64| (t * (x + y)).exp());
        for b in [[0.0, 1.0, 0.0, 1.0], [-1.0, -0.5, 0.5, 1.0], [0.25, 0.5, -1.0, -0.75]] {
            for t in [0.0, 0.3, 1.0] {
                let exact = ExpSum.rect_average(t, b);
                // quadrature error of the 2x2-split Gauss rule is ~1e-8 here
                assert!((exact - f.rect_average(t, b)).abs() < 1e-7 * exact);
            }
        }
    }
}
