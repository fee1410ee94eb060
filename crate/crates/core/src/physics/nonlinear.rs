use std::sync::Arc;

use crate::mesh::Rect;
use crate::{Error, Result, Scalar};

/// Box of `(t, x, y, z)` over which Lipschitz bounds and split monotonicity
/// are established.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRegion<T> {
    pub domain: Rect<T>,
    pub t: [T; 2],
    pub z: [T; 2],
}

/// Fully nonlinear flux `F(t, x, y, z) = (F1, F2)`.
pub trait NonlinearFlux<T: Scalar>: Send + Sync {
    fn f1(&self, t: T, x: T, y: T, z: T) -> T;

    fn f2(&self, t: T, x: T, y: T, z: T) -> T;

    /// `∂x F1 + ∂y F2` at fixed `z`.
    fn div_x(&self, t: T, x: T, y: T, z: T) -> T;

    /// Upper bounds of `|∂z F1|` and `|∂z F2|` over `region`.
    fn lipschitz_components(&self, region: &SampleRegion<T>) -> (T, T);

    fn lipschitz_z(&self, region: &SampleRegion<T>) -> T {
        let (a, b) = self.lipschitz_components(region);
        a.max(b)
    }
}

/// `F = (sin((x - t) z), cos((y - t) z))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ex3Flux;

impl<T: Scalar> NonlinearFlux<T> for Ex3Flux {
    fn f1(&self, t: T, x: T, _: T, z: T) -> T {
        ((x - t) * z).sin()
    }

    fn f2(&self, t: T, _: T, y: T, z: T) -> T {
        ((y - t) * z).cos()
    }

    fn div_x(&self, t: T, x: T, y: T, z: T) -> T {
        z * ((x - t) * z).cos() - z * ((y - t) * z).sin()
    }

    fn lipschitz_components(&self, r: &SampleRegion<T>) -> (T, T) {
        // |∂z F1| <= sup |x - t|, interval bound over the box
        let span = |lo: T, hi: T| (lo - r.t[1]).abs().max((hi - r.t[0]).abs());
        (span(r.domain.x0, r.domain.x1), span(r.domain.y0, r.domain.y1))
    }
}

/// `F = (u z, v z)`: linear transport written as a nonlinear flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearTransportFlux<T>(pub [T; 2]);

impl<T: Scalar> NonlinearFlux<T> for LinearTransportFlux<T> {
    fn f1(&self, _: T, _: T, _: T, z: T) -> T {
        self.0[0] * z
    }

    fn f2(&self, _: T, _: T, _: T, z: T) -> T {
        self.0[1] * z
    }

    fn div_x(&self, _: T, _: T, _: T, _: T) -> T {
        T::zero()
    }

    fn lipschitz_components(&self, _: &SampleRegion<T>) -> (T, T) {
        (self.0[0].abs(), self.0[1].abs())
    }
}

/// Monotone splitting `F1 = a + b`, `F2 = c + d` with
/// `a = (F1 + M_x z)/2`, `b = (F1 - M_x z)/2`, `c = (F2 + M_y z)/2`, `d = (F2 - M_y z)/2`.
#[derive(Clone)]
pub struct SplitFlux<T> {
    flux: Arc<dyn NonlinearFlux<T>>,
    m: [T; 2],
}

impl<T: Scalar> SplitFlux<T> {
    pub fn flux(&self) -> &dyn NonlinearFlux<T> {
        self.flux.as_ref()
    }

    pub fn m(&self) -> [T; 2] {
        self.m
    }

    #[inline]
    pub fn a(&self, t: T, x: T, y: T, z: T) -> T {
        (self.flux.f1(t, x, y, z) + self.m[0] * z) * T::half()
    }

    #[inline]
    pub fn b(&self, t: T, x: T, y: T, z: T) -> T {
        (self.flux.f1(t, x, y, z) - self.m[0] * z) * T::half()
    }

    #[inline]
    pub fn c(&self, t: T, x: T, y: T, z: T) -> T {
        (self.flux.f2(t, x, y, z) + self.m[1] * z) * T::half()
    }

    #[inline]
    pub fn d(&self, t: T, x: T, y: T, z: T) -> T {
        (self.flux.f2(t, x, y, z) - self.m[1] * z) * T::half()
    }
}

/// Split with a single `M` for both components.
pub fn make_split<T: Scalar>(
    flux: Arc<dyn NonlinearFlux<T>>,
    m: T,
    region: &SampleRegion<T>,
) -> Result<SplitFlux<T>> {
    make_split_per_component(flux, m, m, region)
}

/// Split with separate constants for the x and y components. Fails when
/// either constant is below the component's Lipschitz bound or when a
/// sampled difference quotient in `z` has the wrong sign.
pub fn make_split_per_component<T: Scalar>(
    flux: Arc<dyn NonlinearFlux<T>>,
    m_x: T,
    m_y: T,
    region: &SampleRegion<T>,
) -> Result<SplitFlux<T>> {
    let (lx, ly) = flux.lipschitz_components(region);
    let slack = T::lit(1e-12);
    if m_x < lx * (T::one() - slack) || m_y < ly * (T::one() - slack) {
        return Err(Error::NonMonotoneSplit(format!(
            "M = ({m_x}, {m_y}) is below the Lipschitz bound ({lx}, {ly})"
        )));
    }
    let split = SplitFlux { flux, m: [m_x, m_y] };
    check_monotone(&split, region, 50)?;
    Ok(split)
}

fn lin<T: Scalar>(r: [T; 2], k: usize, n: usize) -> T {
    r[0] + (r[1] - r[0]) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1)
}

/// Sampled check that `a, c` are nondecreasing and `b, d` nonincreasing in `z`.
fn check_monotone<T: Scalar>(s: &SplitFlux<T>, r: &SampleRegion<T>, n: usize) -> Result<()> {
    let d = r.domain;
    for kt in 0..3 {
        let t = lin(r.t, kt, 3);
        for kx in 0..n {
            let x = lin([d.x0, d.x1], kx, n);
            let y = lin([d.y0, d.y1], kx, n);
            for kz in 0..n - 1 {
                let (z0, z1) = (lin(r.z, kz, n), lin(r.z, kz + 1, n));
                let checks = [
                    ("a", s.a(t, x, y, z1) - s.a(t, x, y, z0)),
                    ("b", s.b(t, x, y, z0) - s.b(t, x, y, z1)),
                    ("c", s.c(t, x, y, z1) - s.c(t, x, y, z0)),
                    ("d", s.d(t, x, y, z0) - s.d(t, x, y, z1)),
                ];
                let tol = T::lit(1e-12) * (T::one() + z0.abs() + z1.abs());
                for (name, inc) in checks {
                    if inc < -tol {
                        return Err(Error::NonMonotoneSplit(format!(
                            "{name} has the wrong monotonicity at t={t}, x={x}, y={y}, z in [{z0}, {z1}]"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
