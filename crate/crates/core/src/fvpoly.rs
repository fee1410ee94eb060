//! Upwind finite-volume scheme on general polygonal meshes:
//!
//! ```text
//! α^{n+1}_K = α_K - (δ/|K|) Σ_{e ⊂ ∂K} |e| (V_e⁺ g(α_K, α_L) - V_e⁻ g(α_L, α_K))
//! ```
//!
//! with `V_e` the edge/time average of `u·n_e` (outward from `K`).

use std::sync::Arc;

use rayon::prelude::*;

use crate::fv2d::{adjusted_steps, check_interval, time_level, BoundaryClosure, RunOutput, TraceEntry};
use crate::mesh::PolygonalMesh;
use crate::metrics;
use crate::physics::{face_average_velocity, NumericalFlux, SourceTerm, SpaceTimeField, VelocityField2};
use crate::quadrature::{average_polygon, gauss3_on};
use crate::{Error, Result, Scalar};

/// One state per cell of a polygonal mesh.
#[derive(Debug, Clone)]
pub struct PolyField<T: Scalar> {
    mesh: Arc<PolygonalMesh<T>>,
    values: Vec<T>,
    time: T,
}

impl<T: Scalar> PolyField<T> {
    pub fn new(mesh: Arc<PolygonalMesh<T>>, values: Vec<T>, time: T) -> Result<Self> {
        if values.len() != mesh.cell_count() {
            return Err(Error::DimensionMismatch {
                expected: mesh.cell_count(),
                found: values.len(),
            });
        }
        if let Some(c) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("cell {c} holds a non-finite value")));
        }
        Ok(Self { mesh, values, time })
    }

    pub fn mesh(&self) -> &PolygonalMesh<T> {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<PolygonalMesh<T>> {
        &self.mesh
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn areas(&self) -> Vec<T> {
        self.mesh.cells().iter().map(|c| c.area).collect()
    }

    /// Edge-weighted jump sum over interior edges.
    pub fn bv(&self) -> T {
        metrics::bv_poly(&self.mesh, &self.values)
    }

    pub fn mass(&self) -> T {
        metrics::mass(&self.areas(), &self.values)
    }

    pub fn linf(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// `α⁰_K = ⨏_K α0`.
pub fn project_initial_poly<T: Scalar, F: SpaceTimeField<T> + ?Sized>(
    alpha0: &F,
    mesh: Arc<PolygonalMesh<T>>,
) -> PolyField<T> {
    let values = (0..mesh.cell_count())
        .map(|c| alpha0.polygon_average(T::zero(), &mesh.cell_polygon(c)))
        .collect();
    PolyField {
        mesh,
        values,
        time: T::zero(),
    }
}

#[derive(Clone)]
pub struct PolyScheme<T: Scalar> {
    pub flux: Arc<dyn NumericalFlux<T>>,
    pub velocity: Arc<dyn VelocityField2<T>>,
    pub source: Option<Arc<dyn SourceTerm<T>>>,
    pub boundary: BoundaryClosure<T>,
    pub delta: T,
}

impl<T: Scalar> PolyScheme<T> {
    /// Checks the monotonicity bound of the first step `[0, δ]`.
    pub fn new(
        mesh: &PolygonalMesh<T>,
        flux: Arc<dyn NumericalFlux<T>>,
        velocity: Arc<dyn VelocityField2<T>>,
        delta: T,
    ) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::InvalidTimeInterval {
                t0: 0.0,
                t1: delta.as_f64(),
            });
        }
        let s = Self {
            flux,
            velocity,
            source: None,
            boundary: BoundaryClosure::ZeroFlux,
            delta,
        };
        let v = s.edge_velocities(mesh, T::zero(), delta);
        check_cells(delta, max_timestep_poly(mesh, s.flux.as_ref(), &v))?;
        Ok(s)
    }

    pub fn with_source(mut self, source: Arc<dyn SourceTerm<T>>) -> Self {
        self.source = Some(source);
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryClosure<T>) -> Self {
        self.boundary = boundary;
        self
    }

    /// `V_e` along each edge's normal; zero on the boundary under the
    /// zero-flux closure.
    pub fn edge_velocities(&self, mesh: &PolygonalMesh<T>, t0: T, t1: T) -> Vec<T> {
        let closed = matches!(self.boundary, BoundaryClosure::ZeroFlux);
        let vel = self.velocity.as_ref();
        (0..mesh.edges().len())
            .into_par_iter()
            .map(|e| {
                if closed && mesh.edges()[e].is_boundary() {
                    T::zero()
                } else {
                    face_average_velocity(vel, mesh.edge_endpoints(e), t0, t1)
                }
            })
            .collect()
    }
}

/// Largest `δ` for which every cell update is a convex combination:
/// `δ/|K| Σ_e |e| (V⁺ Lip₁(g) + V⁻ Lip₂(g)) <= 1` with `V` outward from `K`.
pub fn max_timestep_poly<T: Scalar>(mesh: &PolygonalMesh<T>, flux: &dyn NumericalFlux<T>, edge_velocity: &[T]) -> T {
    let (l1, l2) = flux.lipschitz_per_arg();
    mesh.cells()
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let rate: T = cell
                .edges
                .iter()
                .map(|&e| {
                    let edge = &mesh.edges()[e];
                    let v = edge_velocity[e] * edge.orientation(c);
                    edge.length * (v.pos() * l1 + v.neg_part() * l2)
                })
                .sum();
            if rate > T::zero() {
                cell.area / rate
            } else {
                T::infinity()
            }
        })
        .fold(T::infinity(), T::min)
}

fn check_cells<T: Scalar>(delta: T, limit: T) -> Result<()> {
    crate::fv2d::check_cfl(delta, limit)
}

#[inline]
fn edge_flux<T: Scalar>(g: &dyn NumericalFlux<T>, v: T, left: T, right: T) -> T {
    let mut f = T::zero();
    if v > T::zero() {
        f = f + v * g.eval(left, right);
    }
    if v < T::zero() {
        f = f + v * g.eval(right, left);
    }
    f
}

fn poly_source_increment<T: Scalar>(source: &dyn SourceTerm<T>, poly: &[[T; 2]], z: T, t0: T, t1: T) -> T {
    let (ts, wt) = gauss3_on(t0, t1);
    let mut acc = T::zero();
    for a in 0..3 {
        acc = acc + wt[a] * average_polygon(poly, |x, y| source.eval(ts[a], x, y, z));
    }
    (t1 - t0) * acc
}

pub fn step_poly<T: Scalar>(state: &PolyField<T>, scheme: &PolyScheme<T>, t0: T, t1: T) -> Result<PolyField<T>> {
    let delta = check_interval(t0, t1)?;
    let mesh = state.mesh();
    let vel = scheme.edge_velocities(mesh, t0, t1);
    let g = scheme.flux.as_ref();
    check_cells(delta, max_timestep_poly(mesh, g, &vel))?;
    let alpha = &state.values;
    // left-to-right flux times length for every edge
    let flux: Vec<T> = mesh
        .edges()
        .par_iter()
        .enumerate()
        .map(|(e, edge)| {
            let a = alpha[edge.left];
            let b = match (edge.right, &scheme.boundary) {
                (Some(r), _) => alpha[r],
                (None, BoundaryClosure::ZeroFlux) => return T::zero(),
                (None, BoundaryClosure::Ghost(field)) => {
                    let [p, q] = mesh.edge_endpoints(e);
                    field.segment_average(t0, p, q)
                }
            };
            edge.length * edge_flux(g, vel[e], a, b)
        })
        .collect();
    let values: Vec<T> = mesh
        .cells()
        .par_iter()
        .enumerate()
        .map(|(c, cell)| {
            let out: T = cell.edges.iter().map(|&e| flux[e] * mesh.edges()[e].orientation(c)).sum();
            let a = alpha[c];
            let mut next = a - delta * out / cell.area;
            if let Some(src) = &scheme.source {
                next = next + poly_source_increment(src.as_ref(), &mesh.cell_polygon(c), a, t0, t1);
            }
            next
        })
        .collect();
    Ok(PolyField {
        mesh: state.mesh.clone(),
        values,
        time: t1,
    })
}

pub fn run_poly<T: Scalar>(
    initial: &PolyField<T>,
    scheme: &PolyScheme<T>,
    final_time: T,
) -> Result<RunOutput<T, PolyField<T>>> {
    let t_start = initial.time();
    let (steps, delta) = adjusted_steps(final_time - t_start, scheme.delta);
    let areas = initial.areas();
    let entry = |n, f: &PolyField<T>, bt| TraceEntry {
        step: n,
        time: f.time(),
        bv: f.bv(),
        linf: f.linf(),
        mass: metrics::mass(&areas, f.values()),
        bv_time: bt,
    };
    let mut field = initial.clone();
    let mut bv_time = T::zero();
    let mut trace = vec![entry(0, &field, bv_time)];
    for n in 0..steps {
        let t0 = time_level(t_start, final_time, n, steps);
        let t1 = time_level(t_start, final_time, n + 1, steps);
        let next = step_poly(&field, scheme, t0, t1)?;
        bv_time = bv_time + metrics::bv_time(&areas, &[field.values, next.values.clone()]);
        field = next;
        trace.push(entry(n + 1, &field, bv_time));
    }
    Ok(RunOutput {
        field,
        trace,
        steps,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv2d::{self, DiscreteField2D, SchemeConfig};
    use crate::mesh::{as_polygonal, build_family, CartesianGrid2D, MeshFamily, Rect};
    use crate::physics::{BuiltinFlux, ConstantVelocity, Ex1Velocity, Ex2Velocity, Godunov, StepSum};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn godunov(f: BuiltinFlux) -> Arc<dyn NumericalFlux<f64>> {
        Arc::new(Godunov(f))
    }

    #[test]
    fn cartesian_mesh_reproduces_planar_scheme() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fronts = StepSum::axis_steps(&[(0.5, -0.25)], &[(0.5, 0.1)], [1.0, 1.0]);
        let closures: [BoundaryClosure<f64>; 2] = [BoundaryClosure::ZeroFlux, BoundaryClosure::Ghost(Arc::new(fronts))];
        for (flux, closure) in [BuiltinFlux::Linear, BuiltinFlux::Sinusoidal].into_iter().zip(closures) {
            let mut edges = |n: usize| {
                let mut e = vec![-1.0];
                for _ in 0..n {
                    let l = *e.last().unwrap();
                    e.push(l + rng.gen_range(0.1..0.5));
                }
                e
            };
            let (xe, ye) = (edges(7), edges(5));
            let grid = Arc::new(CartesianGrid2D::new(&xe, &ye).unwrap());
            let mesh = Arc::new(as_polygonal(&grid));
            let g = godunov(flux);
            let vel: Arc<dyn VelocityField2<f64>> = Arc::new(Ex1Velocity);
            let delta = fv2d::max_timestep(&grid, g.lipschitz(), vel.sup_bound(3.0));
            let cfg = SchemeConfig::new(&grid, g.clone(), vel.clone(), delta, 3.0).unwrap().with_boundary(closure.clone());
            let ps = PolyScheme::new(&mesh, g, vel, delta).unwrap().with_boundary(closure);
            let vals: Vec<f64> = (0..grid.cell_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut a = DiscreteField2D::new(grid, vals.clone(), 1.0).unwrap();
            let mut b = PolyField::new(mesh, vals, 1.0).unwrap();
            for n in 0..30 {
                let (t0, t1) = (1.0 + n as f64 * delta, 1.0 + (n + 1) as f64 * delta);
                a = fv2d::step(&a, &cfg, t0, t1).unwrap();
                b = step_poly(&b, &ps, t0, t1).unwrap();
            }
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn zero_velocity_is_identity() {
        let mesh = Arc::new(build_family(MeshFamily::Hexagonal, Rect::square(0.0, 1.0), 0.2, 0).unwrap());
        let s = PolyScheme::new(&mesh, godunov(BuiltinFlux::Sinusoidal), Arc::new(ConstantVelocity([0.0, 0.0])), 1.0).unwrap();
        let vals: Vec<f64> = (0..mesh.cell_count()).map(|c| (c as f64).sin()).collect();
        let f = PolyField::new(mesh, vals.clone(), 0.0).unwrap();
        assert_eq!(step_poly(&f, &s, 0.0, 1.0).unwrap().values(), &vals[..]);
        let out = run_poly(&f, &s, 0.0).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.field.values(), &vals[..]);
    }

    #[test]
    fn mass_is_conserved_on_every_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for fam in MeshFamily::ALL {
            let mesh = Arc::new(build_family(fam, Rect::square(-1.0, 1.0), 0.2, 5).unwrap());
            let vel: Arc<dyn VelocityField2<f64>> = Arc::new(Ex2Velocity);
            let g = godunov(BuiltinFlux::Sinusoidal);
            let probe = PolyScheme::new(&mesh, g.clone(), vel.clone(), 1e-6).unwrap();
            let delta = 0.9 * max_timestep_poly(&mesh, g.as_ref(), &probe.edge_velocities(&mesh, 0.0, 1.0)).min(0.05);
            let s = PolyScheme::new(&mesh, g, vel, delta).unwrap();
            let vals: Vec<f64> = (0..mesh.cell_count()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let f = PolyField::new(mesh, vals, 0.0).unwrap();
            let out = run_poly(&f, &s, 100.0 * delta).unwrap();
            let m0 = f.mass();
            assert!((out.field.mass() - m0).abs() <= 1e-12 * m0, "{fam}");
        }
    }

    #[test]
    fn local_max_principle_for_constant_velocity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for fam in MeshFamily::ALL {
            let mesh = Arc::new(build_family(fam, Rect::square(-1.0, 1.0), 0.25, 9).unwrap());
            let vel: Arc<dyn VelocityField2<f64>> = Arc::new(ConstantVelocity([0.6, -0.3]));
            let g = godunov(BuiltinFlux::Linear);
            let probe = PolyScheme::new(&mesh, g.clone(), vel.clone(), 1e-6).unwrap();
            let delta = max_timestep_poly(&mesh, g.as_ref(), &probe.edge_velocities(&mesh, 0.0, 1.0));
            let s = PolyScheme::new(&mesh, g, vel, delta).unwrap();
            let vals: Vec<f64> = (0..mesh.cell_count()).map(|_| rng.gen_range(-2.0..3.0)).collect();
            let f = PolyField::new(mesh.clone(), vals.clone(), 0.0).unwrap();
            let next = step_poly(&f, &s, 0.0, delta).unwrap();
            // the closed boundary breaks discrete incompressibility, so only
            // cells without boundary edges obey the local bound
            for (c, cell) in mesh.cells().iter().enumerate() {
                if cell.edges.iter().any(|&e| mesh.edges()[e].is_boundary()) {
                    continue;
                }
                let mut lo = vals[c];
                let mut hi = vals[c];
                for &e in &cell.edges {
                    if let Some(n) = mesh.edges()[e].neighbor(c) {
                        lo = lo.min(vals[n]);
                        hi = hi.max(vals[n]);
                    }
                }
                let v = next.values()[c];
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "{fam} cell {c}");
            }
        }
    }

    #[test]
    fn too_large_step_is_refused() {
        let mesh = as_polygonal(&CartesianGrid2D::uniform(Rect::square(0.0, 1.0), 4, 4).unwrap());
        let r = PolyScheme::new(&mesh, godunov(BuiltinFlux::Linear), Arc::new(ConstantVelocity([1.0, 1.0])), 0.13);
        assert!(matches!(r, Err(Error::CflViolation { .. })));
        // outflow through two sides of a 1/4 square: limit 1/8
        assert!(PolyScheme::new(&mesh, godunov(BuiltinFlux::Linear), Arc::new(ConstantVelocity([1.0, 1.0])), 0.125).is_ok());
    }

    #[test]
    fn front_on_staggered_bricks() {
        let case = crate::physics::CaseName::Despres.build::<f64>();
        let crate::physics::Case::Transport(tc) = case else { unreachable!() };
        let mesh = Arc::new(build_family(MeshFamily::Staggered, tc.domain, 0.1, 0).unwrap());
        let s = PolyScheme::new(&mesh, godunov(tc.flux), tc.velocity.clone(), 0.1)
            .unwrap()
            .with_boundary(BoundaryClosure::Ghost(tc.exact.clone().unwrap()));
        let f0 = project_initial_poly(tc.initial.as_ref(), mesh);
        let out = run_poly(&f0, &s, 0.25).unwrap();
        assert_eq!(out.steps, 3);
        let (lo, hi) = out.field.values().iter().fold((1.0f64, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
        // the front moved right by about T
        let m = out.field.mass();
        assert!((m - 2.0 * (1.0 - 0.5 - 0.25)).abs() < 0.05, "{m}");
    }
}
