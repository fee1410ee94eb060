use super::Rect;
use crate::{Error, Result, Scalar};

fn validate_edges<T: Scalar>(name: &str, edges: &[T]) -> Result<Vec<T>> {
    if edges.len() < 2 {
        return Err(Error::InvalidPartition(format!(
            "{name}: need at least 2 edge coordinates, got {}",
            edges.len()
        )));
    }
    if let Some(bad) = edges.iter().position(|e| !e.is_finite()) {
        return Err(Error::InvalidPartition(format!("{name}[{bad}] is not finite")));
    }
    for (i, w) in edges.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::InvalidPartition(format!(
                "{name} not strictly increasing at index {}: {} >= {}",
                i + 1,
                w[0],
                w[1]
            )));
        }
    }
    Ok(edges.windows(2).map(|w| w[1] - w[0]).collect())
}

fn uniform_edges<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let nn = T::from_usize_lossy(n);
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * T::from_usize_lossy(i) / nn
            }
        })
        .collect()
}

fn cells_for<T: Scalar>(len: T, h: T) -> Result<usize> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::InvalidMeshParameters(format!("cell size {h} must be positive")));
    }
    let n = (len / h).round().to_usize().unwrap_or(0).max(1);
    Ok(n)
}

fn max_of<T: Scalar>(v: &[T]) -> T {
    v.iter().copied().fold(T::neg_infinity(), T::max)
}

fn min_of<T: Scalar>(v: &[T]) -> T {
    v.iter().copied().fold(T::infinity(), T::min)
}

/// Tensor-product grid `X_k × Y_h` with cells
/// `K_ij = (x_{i-1/2}, x_{i+1/2}) × (y_{j-1/2}, y_{j+1/2})`.
///
/// Cell `(i, j)` is stored at linear index `j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid2D<T> {
    x_edges: Vec<T>,
    y_edges: Vec<T>,
    k: Vec<T>,
    h: Vec<T>,
}

impl<T: Scalar> CartesianGrid2D<T> {
    pub fn new(x_edges: &[T], y_edges: &[T]) -> Result<Self> {
        let k = validate_edges("x_edges", x_edges)?;
        let h = validate_edges("y_edges", y_edges)?;
        Ok(Self {
            x_edges: x_edges.to_vec(),
            y_edges: y_edges.to_vec(),
            k,
            h,
        })
    }

    pub fn uniform(domain: Rect<T>, nx: usize, ny: usize) -> Result<Self> {
        if !domain.is_valid() || nx == 0 || ny == 0 {
            return Err(Error::InvalidPartition(format!(
                "uniform grid needs a nonempty domain and nx, ny >= 1 (got {nx} x {ny})"
            )));
        }
        Self::new(
            &uniform_edges(domain.x0, domain.x1, nx),
            &uniform_edges(domain.y0, domain.y1, ny),
        )
    }

    /// Uniform grid whose cell size is the closest fit to `h` in each direction.
    pub fn uniform_with_size(domain: Rect<T>, h: T) -> Result<Self> {
        let nx = cells_for(domain.width(), h)?;
        let ny = cells_for(domain.height(), h)?;
        Self::uniform(domain, nx, ny)
    }

    pub fn nx(&self) -> usize {
        self.k.len()
    }

    pub fn ny(&self) -> usize {
        self.h.len()
    }

    pub fn cell_count(&self) -> usize {
        self.nx() * self.ny()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    pub fn x_edges(&self) -> &[T] {
        &self.x_edges
    }

    pub fn y_edges(&self) -> &[T] {
        &self.y_edges
    }

    /// Widths `k_i` in x.
    pub fn widths_x(&self) -> &[T] {
        &self.k
    }

    /// Widths `h_j` in y.
    pub fn widths_y(&self) -> &[T] {
        &self.h
    }

    #[inline]
    pub fn k(&self, i: usize) -> T {
        self.k[i]
    }

    #[inline]
    pub fn h(&self, j: usize) -> T {
        self.h[j]
    }

    #[inline]
    pub fn area(&self, i: usize, j: usize) -> T {
        self.k[i] * self.h[j]
    }

    pub fn center(&self, i: usize, j: usize) -> [T; 2] {
        [
            (self.x_edges[i] + self.x_edges[i + 1]) * T::half(),
            (self.y_edges[j] + self.y_edges[j + 1]) * T::half(),
        ]
    }

    /// `[x_{i-1/2}, x_{i+1/2}, y_{j-1/2}, y_{j+1/2}]`
    pub fn cell_bounds(&self, i: usize, j: usize) -> [T; 4] {
        [self.x_edges[i], self.x_edges[i + 1], self.y_edges[j], self.y_edges[j + 1]]
    }

    pub fn domain(&self) -> Rect<T> {
        Rect::new(
            self.x_edges[0],
            *self.x_edges.last().unwrap(),
            self.y_edges[0],
            *self.y_edges.last().unwrap(),
        )
    }

    /// `h_max = max_{i,j}(k_i, h_j)`
    pub fn h_max(&self) -> T {
        max_of(&self.k).max(max_of(&self.h))
    }

    /// `max_{i,j}(1/k_i + 1/h_j)`, the geometric factor of the CFL bound.
    pub fn max_inverse_width_sum(&self) -> T {
        T::one() / min_of(&self.k) + T::one() / min_of(&self.h)
    }

    /// Smallest `c̃` with `1/c̃ <= h_j/k_i <= c̃` for every index pair.
    pub fn admissibility_constant(&self) -> T {
        let (kmin, kmax) = (min_of(&self.k), max_of(&self.k));
        let (hmin, hmax) = (min_of(&self.h), max_of(&self.h));
        (hmax / kmin).max(kmax / hmin)
    }

    pub fn total_area(&self) -> T {
        let sx: T = self.k.iter().copied().sum();
        let sy: T = self.h.iter().copied().sum();
        sx * sy
    }
}

/// Three-dimensional tensor grid `X_k × Y_h × Z_l`.
///
/// Cell `(i, j, m)` is stored at `(m * ny + j) * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid3D<T> {
    x_edges: Vec<T>,
    y_edges: Vec<T>,
    z_edges: Vec<T>,
    k: Vec<T>,
    h: Vec<T>,
    l: Vec<T>,
}

impl<T: Scalar> CartesianGrid3D<T> {
    pub fn new(x_edges: &[T], y_edges: &[T], z_edges: &[T]) -> Result<Self> {
        Ok(Self {
            k: validate_edges("x_edges", x_edges)?,
            h: validate_edges("y_edges", y_edges)?,
            l: validate_edges("z_edges", z_edges)?,
            x_edges: x_edges.to_vec(),
            y_edges: y_edges.to_vec(),
            z_edges: z_edges.to_vec(),
        })
    }

    /// Extrudes a 2D grid along z.
    pub fn extrude(base: &CartesianGrid2D<T>, z_edges: &[T]) -> Result<Self> {
        Self::new(base.x_edges(), base.y_edges(), z_edges)
    }

    pub fn nx(&self) -> usize {
        self.k.len()
    }
    pub fn ny(&self) -> usize {
        self.h.len()
    }
    pub fn nz(&self) -> usize {
        self.l.len()
    }
    pub fn cell_count(&self) -> usize {
        self.nx() * self.ny() * self.nz()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, m: usize) -> usize {
        (m * self.ny() + j) * self.nx() + i
    }

    pub fn x_edges(&self) -> &[T] {
        &self.x_edges
    }
    pub fn y_edges(&self) -> &[T] {
        &self.y_edges
    }
    pub fn z_edges(&self) -> &[T] {
        &self.z_edges
    }
    pub fn widths_x(&self) -> &[T] {
        &self.k
    }
    pub fn widths_y(&self) -> &[T] {
        &self.h
    }
    pub fn widths_z(&self) -> &[T] {
        &self.l
    }

    #[inline]
    pub fn volume(&self, i: usize, j: usize, m: usize) -> T {
        self.k[i] * self.h[j] * self.l[m]
    }

    pub fn total_volume(&self) -> T {
        let sx: T = self.k.iter().copied().sum();
        let sy: T = self.h.iter().copied().sum();
        let sz: T = self.l.iter().copied().sum();
        sx * sy * sz
    }

    pub fn h_max(&self) -> T {
        max_of(&self.k).max(max_of(&self.h)).max(max_of(&self.l))
    }

    /// `max(1/k_i + 1/h_j + 1/l_m)`
    pub fn max_inverse_width_sum(&self) -> T {
        T::one() / min_of(&self.k) + T::one() / min_of(&self.h) + T::one() / min_of(&self.l)
    }

    /// Smallest `c̃` with `1/c̃ <= h_j/k_i + k_i/l_m + l_m/h_j <= c̃` over all triples.
    pub fn admissibility_constant(&self) -> T {
        let mut smax = T::neg_infinity();
        let mut smin = T::infinity();
        for &k in &self.k {
            for &h in &self.h {
                for &l in &self.l {
                    let s = h / k + k / l + l / h;
                    smax = smax.max(s);
                    smin = smin.min(s);
                }
            }
        }
        smax.max(T::one() / smin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_unit_grid() {
        let g = CartesianGrid2D::new(&[-1.0, 0.0, 1.0], &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!((g.nx(), g.ny()), (2, 2));
        assert!(g.widths_x().iter().chain(g.widths_y()).all(|&w| w == 1.0));
        assert_eq!(g.admissibility_constant(), 1.0);
    }

    #[test]
    fn uniform_half_spacing_on_biunit_square() {
        let g = CartesianGrid2D::uniform_with_size(Rect::square(-1.0, 1.0), 0.5).unwrap();
        assert_eq!((g.nx(), g.ny()), (4, 4));
        assert_eq!(g.h_max(), 0.5);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(matches!(
            CartesianGrid2D::new(&[0.0, 1.0, 1.0], &[0.0, 1.0]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            CartesianGrid2D::new(&[0.0], &[0.0, 1.0]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(CartesianGrid2D::new(&[0.0, 2.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(CartesianGrid2D::new(&[0.0, f64::NAN], &[0.0, 1.0]).is_err());
        assert!(CartesianGrid3D::new(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn admissibility_of_two_wide_cells() {
        let g = CartesianGrid2D::new(&[0.0, 1.0, 3.0], &[0.0, 1.0]).unwrap();
        assert_eq!(g.widths_x(), &[1.0, 2.0]);
        assert_eq!(g.admissibility_constant(), 2.0);
    }

    #[test]
    fn uniform_cube_admissibility() {
        let e = [0.0f64, 0.5, 1.0];
        let g = CartesianGrid3D::new(&e, &e, &e).unwrap();
        assert_eq!(g.admissibility_constant(), 3.0);
        assert!((g.total_volume() - 1.0).abs() < 1e-15);
    }

    fn increasing(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.05f64..2.0, n..n + 6).prop_flat_map(|gaps| {
            (-3.0f64..3.0).prop_map(move |start| {
                let mut out = vec![start];
                for g in &gaps {
                    let last = *out.last().unwrap();
                    out.push(last + g);
                }
                out
            })
        })
    }

    proptest! {
        #[test]
        fn widths_are_successive_differences(xe in increasing(1), ye in increasing(1)) {
            let g = CartesianGrid2D::new(&xe, &ye).unwrap();
            for i in 0..xe.len() - 1 {
                prop_assert_eq!(g.k(i), xe[i + 1] - xe[i]);
            }
            for j in 0..ye.len() - 1 {
                prop_assert_eq!(g.h(j), ye[j + 1] - ye[j]);
            }
            let total: f64 = (0..g.nx()).flat_map(|i| (0..g.ny()).map(move |j| (i, j)))
                .map(|(i, j)| g.area(i, j)).sum();
            let dom = g.domain().area();
            prop_assert!((total - dom).abs() <= 1e-12 * dom);
            let hmax = g.widths_x().iter().chain(g.widths_y()).copied().fold(0.0, f64::max);
            prop_assert_eq!(g.h_max(), hmax);
        }

        #[test]
        fn admissibility_matches_exhaustive_scan(xe in increasing(1), ye in increasing(1), scale in 0.1f64..10.0) {
            let g = CartesianGrid2D::new(&xe, &ye).unwrap();
            let mut brute = 0.0f64;
            for &k in g.widths_x() {
                for &h in g.widths_y() {
                    brute = brute.max(h / k).max(k / h);
                }
            }
            prop_assert!((g.admissibility_constant() - brute).abs() <= 1e-12 * brute);
            let xs: Vec<f64> = xe.iter().map(|v| v * scale).collect();
            let ys: Vec<f64> = ye.iter().map(|v| v * scale).collect();
            let scaled = CartesianGrid2D::new(&xs, &ys).unwrap();
            prop_assert!((scaled.admissibility_constant() - brute).abs() <= 1e-9 * brute);
        }

        #[test]
        fn admissibility_3d_matches_scan(xe in increasing(1), ye in increasing(1), ze in increasing(1)) {
            let g = CartesianGrid3D::new(&xe, &ye, &ze).unwrap();
            let mut smax = f64::NEG_INFINITY;
            let mut smin = f64::INFINITY;
            for &k in g.widths_x() { for &h in g.widths_y() { for &l in g.widths_z() {
                let s = h / k + k / l + l / h;
                smax = smax.max(s);
                smin = smin.min(s);
            }}}
            prop_assert_eq!(g.admissibility_constant(), smax.max(1.0 / smin));
            let mut vol = 0.0;
            for m in 0..g.nz() { for j in 0..g.ny() { for i in 0..g.nx() {
                vol += g.volume(i, j, m);
            }}}
            prop_assert!((vol - g.total_volume()).abs() <= 1e-12 * g.total_volume());
        }
    }
}
