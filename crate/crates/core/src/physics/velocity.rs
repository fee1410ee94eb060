use crate::quadrature::gauss3_on;
use crate::Scalar;

/// Analytic velocity `(u, v)(t, x, y)` with its divergence.
pub trait VelocityField2<T: Scalar>: Send + Sync {
    fn velocity(&self, t: T, x: T, y: T) -> [T; 2];

    fn divergence(&self, t: T, x: T, y: T) -> T;

    /// `sup max(|u|, |v|)` over the case domain and `[0, t_end]`.
    fn sup_bound(&self, t_end: T) -> T;

    /// `sup_x |div u(t, x)|`, used for the growth bound.
    fn divergence_sup(&self, t: T) -> T;
}

/// Analytic velocity `(u, v, w)(t, x, y, z)`.
pub trait VelocityField3<T: Scalar>: Send + Sync {
    fn velocity(&self, t: T, x: T, y: T, z: T) -> [T; 3];

    fn divergence(&self, t: T, x: T, y: T, z: T) -> T;

    fn sup_bound(&self, t_end: T) -> T;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantVelocity<T, const D: usize>(pub [T; D]);

impl<T: Scalar> VelocityField2<T> for ConstantVelocity<T, 2> {
    fn velocity(&self, _: T, _: T, _: T) -> [T; 2] {
        self.0
    }
    fn divergence(&self, _: T, _: T, _: T) -> T {
        T::zero()
    }
    fn sup_bound(&self, _: T) -> T {
        self.0[0].abs().max(self.0[1].abs())
    }
    fn divergence_sup(&self, _: T) -> T {
        T::zero()
    }
}

impl<T: Scalar> VelocityField3<T> for ConstantVelocity<T, 3> {
    fn velocity(&self, _: T, _: T, _: T, _: T) -> [T; 3] {
        self.0
    }
    fn divergence(&self, _: T, _: T, _: T, _: T) -> T {
        T::zero()
    }
    fn sup_bound(&self, _: T) -> T {
        self.0.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

/// `u = t sin(πx) cos(πy/2) / 16`, `v = t sin(πy) cos(πx/2) / 16`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ex1Velocity;

impl<T: Scalar> VelocityField2<T> for Ex1Velocity {
    fn velocity(&self, t: T, x: T, y: T) -> [T; 2] {
        let pi = T::PI();
        let s = t / T::lit(16.0);
        [
            s * (pi * x).sin() * (pi * y * T::half()).cos(),
            s * (pi * y).sin() * (pi * x * T::half()).cos(),
        ]
    }

    fn divergence(&self, t: T, x: T, y: T) -> T {
        let pi = T::PI();
        t * pi / T::lit(16.0)
            * ((pi * x).cos() * (pi * y * T::half()).cos() + (pi * y).cos() * (pi * x * T::half()).cos())
    }

    fn sup_bound(&self, t_end: T) -> T {
        t_end.abs() / T::lit(16.0)
    }

    fn divergence_sup(&self, t: T) -> T {
        T::two() * t.abs() * T::PI() / T::lit(16.0)
    }
}

/// `u = sin(πx) cos(πy/2) / 20`, `v = sin(πy) cos(πx/2) / 20`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ex2Velocity;

impl<T: Scalar> VelocityField2<T> for Ex2Velocity {
    fn velocity(&self, _: T, x: T, y: T) -> [T; 2] {
        let pi = T::PI();
        let s = T::lit(0.05);
        [
            s * (pi * x).sin() * (pi * y * T::half()).cos(),
            s * (pi * y).sin() * (pi * x * T::half()).cos(),
        ]
    }

    fn divergence(&self, _: T, x: T, y: T) -> T {
        let pi = T::PI();
        pi * T::lit(0.05)
            * ((pi * x).cos() * (pi * y * T::half()).cos() + (pi * y).cos() * (pi * x * T::half()).cos())
    }

    fn sup_bound(&self, _: T) -> T {
        T::lit(0.05)
    }

    fn divergence_sup(&self, _: T) -> T {
        T::two() * T::PI() * T::lit(0.05)
    }
}

/// Time-and-edge average of `u·n` over the segment `p → q`, with
/// `n = (dy, -dx)/|pq|` (outward for a counterclockwise cell).
pub fn face_average_velocity<T: Scalar, V: VelocityField2<T> + ?Sized>(
    field: &V,
    segment: [[T; 2]; 2],
    t0: T,
    t1: T,
) -> T {
    let [p, q] = segment;
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let len = dx.hypot(dy);
    let n = [dy / len, -dx / len];
    let (ts, wt) = gauss3_on(t0, t1);
    let (ss, ws) = gauss3_on(T::zero(), T::one());
    let mut acc = T::zero();
    for a in 0..3 {
        for b in 0..3 {
            let x = p[0] + dx * ss[b];
            let y = p[1] + dy * ss[b];
            let u = field.velocity(ts[a], x, y);
            acc = acc + wt[a] * ws[b] * (u[0] * n[0] + u[1] * n[1]);
        }
    }
    acc
}

/// Time-and-face average of velocity component `axis` over the axis-aligned
/// face `{coord[axis] = c} × [lo1, hi1] × [lo2, hi2]` of a 3D box.
pub fn face_average_velocity3<T: Scalar, V: VelocityField3<T> + ?Sized>(
    field: &V,
    axis: usize,
    c: T,
    span1: [T; 2],
    span2: [T; 2],
    t0: T,
    t1: T,
) -> T {
    let (ts, wt) = gauss3_on(t0, t1);
    let (s1, w1) = gauss3_on(span1[0], span1[1]);
    let (s2, w2) = gauss3_on(span2[0], span2[1]);
    let mut acc = T::zero();
    for a in 0..3 {
        for b in 0..3 {
            for d in 0..3 {
                let p = match axis {
                    0 => [c, s1[b], s2[d]],
                    1 => [s1[b], c, s2[d]],
                    _ => [s1[b], s2[d], c],
                };
                let u = field.velocity(ts[a], p[0], p[1], p[2]);
                acc = acc + wt[a] * w1[b] * w2[d] * u[axis];
            }
        }
    }
    acc
}
