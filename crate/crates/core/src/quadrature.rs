//! Fixed low-order quadrature rules used for face, cell and time averages.
//!
//! All rules return *averages*: weights sum to one.

use crate::Scalar;

/// Three-point Gauss–Legendre nodes on `[-1, 1]` and averaging weights.
pub fn gauss3<T: Scalar>() -> ([T; 3], [T; 3]) {
    let r = T::lit((3.0f64 / 5.0).sqrt());
    (
        [-r, T::zero(), r],
        [T::lit(5.0 / 18.0), T::lit(8.0 / 18.0), T::lit(5.0 / 18.0)],
    )
}

/// Gauss nodes mapped to `[a, b]` together with averaging weights.
pub fn gauss3_on<T: Scalar>(a: T, b: T) -> ([T; 3], [T; 3]) {
    let (x, w) = gauss3::<T>();
    let mid = (a + b) * T::half();
    let half = (b - a) * T::half();
    ([mid + half * x[0], mid + half * x[1], mid + half * x[2]], w)
}

/// Average of `f` over `[a, b]` by three-point Gauss.
pub fn average_1d<T: Scalar>(a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
    let (x, w) = gauss3_on(a, b);
    w[0] * f(x[0]) + w[1] * f(x[1]) + w[2] * f(x[2])
}

/// Average of `f` over the rectangle `[x0, x1] × [y0, y1]` (tensor Gauss, 9 points).
pub fn average_rect<T: Scalar>(x0: T, x1: T, y0: T, y1: T, mut f: impl FnMut(T, T) -> T) -> T {
    let (xs, wx) = gauss3_on(x0, x1);
    let (ys, wy) = gauss3_on(y0, y1);
    let mut acc = T::zero();
    for a in 0..3 {
        for b in 0..3 {
            acc = acc + wx[a] * wy[b] * f(xs[a], ys[b]);
        }
    }
    acc
}

/// Strang–Fix six-point rule on the reference triangle, exact for degree 4.
/// Barycentric coordinates and averaging weights.
pub fn triangle6<T: Scalar>() -> [([T; 3], T); 6] {
    let a = 0.445_948_490_915_965;
    let b = 0.091_576_213_509_771;
    let wa = 0.223_381_589_678_011;
    let wb = 0.109_951_743_655_322;
    let p = |l0: f64, l1: f64, w: f64| ([T::lit(l0), T::lit(l1), T::lit(1.0 - l0 - l1)], T::lit(w));
    [
        p(a, a, wa),
        p(1.0 - 2.0 * a, a, wa),
        p(a, 1.0 - 2.0 * a, wa),
        p(b, b, wb),
        p(1.0 - 2.0 * b, b, wb),
        p(b, 1.0 - 2.0 * b, wb),
    ]
}

/// Integral (not average) of `f` over a triangle.
pub fn integrate_triangle<T: Scalar>(p: [[T; 2]; 3], mut f: impl FnMut(T, T) -> T) -> T {
    let area = ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
        - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
        .abs()
        * T::half();
    let mut acc = T::zero();
    for (l, w) in triangle6::<T>() {
        let x = l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0];
        let y = l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1];
        acc = acc + w * f(x, y);
    }
    acc * area
}

/// Average of `f` over a simple polygon that is star-shaped with respect to
/// its vertex centroid (fan triangulation).
pub fn average_polygon<T: Scalar>(poly: &[[T; 2]], mut f: impl FnMut(T, T) -> T) -> T {
    let n = poly.len();
    if n == 3 {
        let tri = [poly[0], poly[1], poly[2]];
        let a = ((tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1])
            - (tri[2][0] - tri[0][0]) * (tri[1][1] - tri[0][1]))
            .abs()
            * T::half();
        return integrate_triangle(tri, &mut f) / a;
    }
    let inv_n = T::one() / T::from_usize_lossy(n);
    let c = [
        poly.iter().map(|p| p[0]).sum::<T>() * inv_n,
        poly.iter().map(|p| p[1]).sum::<T>() * inv_n,
    ];
    let mut integral = T::zero();
    let mut area = T::zero();
    for k in 0..n {
        let tri = [c, poly[k], poly[(k + 1) % n]];
        let a = ((tri[1][0] - c[0]) * (tri[2][1] - c[1]) - (tri[2][0] - c[0]) * (tri[1][1] - c[1]))
            * T::half();
        if a == T::zero() {
            continue;
        }
        integral = integral + integrate_triangle(tri, &mut f);
        area = area + a.abs();
    }
    integral / area
}
