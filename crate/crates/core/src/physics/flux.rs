use crate::Scalar;

/// Scalar flux `f` with a global Lipschitz bound.
pub trait FluxFunction<T: Scalar>: Send + Sync {
    fn eval(&self, s: T) -> T;

    fn derivative(&self, s: T) -> T;

    fn lipschitz(&self) -> T;

    /// `(min, max)` of `f` over `[lo, hi]`.
    fn extrema(&self, lo: T, hi: T) -> (T, T);

    /// True when `f` is nondecreasing everywhere.
    fn is_nondecreasing(&self) -> bool {
        false
    }

    fn tag(&self) -> &'static str {
        "custom"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinFlux {
    /// `f(s) = s`
    Linear,
    /// `f(s) = sin(2πs)`
    Sinusoidal,
}

impl<T: Scalar> FluxFunction<T> for BuiltinFlux {
    #[inline]
    fn eval(&self, s: T) -> T {
        match self {
            BuiltinFlux::Linear => s,
            BuiltinFlux::Sinusoidal => (T::TAU() * s).sin(),
        }
    }

    fn derivative(&self, s: T) -> T {
        match self {
            BuiltinFlux::Linear => T::one(),
            BuiltinFlux::Sinusoidal => T::TAU() * (T::TAU() * s).cos(),
        }
    }

    fn lipschitz(&self) -> T {
        match self {
            BuiltinFlux::Linear => T::one(),
            BuiltinFlux::Sinusoidal => T::TAU(),
        }
    }

    fn extrema(&self, lo: T, hi: T) -> (T, T) {
        let (fa, fb) = (self.eval(lo), self.eval(hi));
        let (mut mn, mut mx) = (fa.min(fb), fa.max(fb));
        if let BuiltinFlux::Sinusoidal = self {
            // maxima at 1/4 + k, minima at 3/4 + k
            let has = |c: T| (lo - c).ceil() <= (hi - c).floor();
            if has(T::lit(0.25)) {
                mx = T::one();
            }
            if has(T::lit(0.75)) {
                mn = -T::one();
            }
        }
        (mn, mx)
    }

    fn is_nondecreasing(&self) -> bool {
        matches!(self, BuiltinFlux::Linear)
    }

    fn tag(&self) -> &'static str {
        match self {
            BuiltinFlux::Linear => "linear",
            BuiltinFlux::Sinusoidal => "sinusoidal",
        }
    }
}

/// User flux whose extrema are found by dense sampling plus endpoints.
pub struct SampledFlux<T, F> {
    f: F,
    df: Box<dyn Fn(T) -> T + Send + Sync>,
    lip: T,
    samples: usize,
}

impl<T: Scalar, F: Fn(T) -> T + Send + Sync> SampledFlux<T, F> {
    pub fn new(f: F, df: impl Fn(T) -> T + Send + Sync + 'static, lipschitz: T, samples: usize) -> Self {
        Self {
            f,
            df: Box::new(df),
            lip: lipschitz,
            samples: samples.max(2),
        }
    }
}

impl<T: Scalar, F: Fn(T) -> T + Send + Sync> FluxFunction<T> for SampledFlux<T, F> {
    fn eval(&self, s: T) -> T {
        (self.f)(s)
    }

    fn derivative(&self, s: T) -> T {
        (self.df)(s)
    }

    fn lipschitz(&self) -> T {
        self.lip
    }

    fn extrema(&self, lo: T, hi: T) -> (T, T) {
        let n = T::from_usize_lossy(self.samples);
        (0..=self.samples).fold((T::infinity(), T::neg_infinity()), |(mn, mx), k| {
            let s = if k == self.samples {
                hi
            } else {
                lo + (hi - lo) * T::from_usize_lossy(k) / n
            };
            let v = (self.f)(s);
            (mn.min(v), mx.max(v))
        })
    }
}

/// Two-point monotone numerical flux `g(a, b)`.
pub trait NumericalFlux<T: Scalar>: Send + Sync {
    fn eval(&self, a: T, b: T) -> T;

    /// The underlying flux `f(s) = g(s, s)`.
    fn consistent(&self, s: T) -> T;

    fn lipschitz(&self) -> T;

    /// Lipschitz constants of `g` in its first and second argument.
    fn lipschitz_per_arg(&self) -> (T, T) {
        (self.lipschitz(), self.lipschitz())
    }
}

/// Godunov flux of `f`.
pub fn godunov<T: Scalar, F: FluxFunction<T> + ?Sized>(f: &F, a: T, b: T) -> T {
    if a == b {
        f.eval(a)
    } else if b < a {
        f.extrema(b, a).1
    } else {
        f.extrema(a, b).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Godunov<F>(pub F);

impl<T: Scalar, F: FluxFunction<T>> NumericalFlux<T> for Godunov<F> {
    #[inline]
    fn eval(&self, a: T, b: T) -> T {
        if self.0.is_nondecreasing() {
            return self.0.eval(a);
        }
        godunov(&self.0, a, b)
    }

    fn consistent(&self, s: T) -> T {
        self.0.eval(s)
    }

    fn lipschitz(&self) -> T {
        self.0.lipschitz()
    }

    fn lipschitz_per_arg(&self) -> (T, T) {
        let l = self.0.lipschitz();
        if self.0.is_nondecreasing() {
            (l, T::zero())
        } else {
            (l, l)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const SIN: BuiltinFlux = BuiltinFlux::Sinusoidal;

    fn dense_extrema(lo: f64, hi: f64) -> (f64, f64) {
        let n = 20_000;
        (0..=n)
            .map(|k| (2.0 * PI * (lo + (hi - lo) * k as f64 / n as f64)).sin())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    }

    #[test]
    fn linear_godunov_is_upwind() {
        assert_eq!(godunov(&BuiltinFlux::Linear, 1.0, 0.0), 1.0);
        assert_eq!(Godunov(BuiltinFlux::Linear).eval(-0.3, 2.0), -0.3);
    }

    #[test]
    fn sinusoidal_consistency_example() {
        assert_eq!(godunov(&SIN, 0.3, 0.3), (0.6 * PI).sin());
    }

    #[test]
    fn sinusoidal_minimum_at_endpoint() {
        let g = godunov(&SIN, 0.1, 0.6);
        assert_eq!(g, (1.2 * PI).sin());
        let (mn, _) = dense_extrema(0.1, 0.6);
        assert!((g - mn).abs() < 1e-8);
    }

    #[test]
    fn sinusoidal_interior_extrema() {
        assert_eq!(godunov(&SIN, 0.3, 0.2), 1.0);
        assert_eq!(godunov(&SIN, 0.7, 0.8), -1.0);
        assert_eq!(godunov(&SIN, -0.3, -0.2), -1.0);
    }

    #[test]
    fn sampled_flux_tracks_builtin() {
        let sf = SampledFlux::new(|s: f64| (2.0 * PI * s).sin(), |s: f64| 2.0 * PI * (2.0 * PI * s).cos(), 2.0 * PI, 4000);
        for (a, b) in [(0.1, 0.6), (0.9, -0.4), (0.3, 0.35)] {
            assert!((godunov(&sf, a, b) - godunov(&SIN, a, b)).abs() < 1e-5);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn consistency(a in -2.0f64..2.0) {
            for f in [BuiltinFlux::Linear, SIN] {
                let g = Godunov(f);
                prop_assert!((g.eval(a, a) - FluxFunction::<f64>::eval(&f, a)).abs() <= 1e-14);
            }
        }

        #[test]
        fn monotone_in_each_argument(a in -2.0f64..2.0, b in -2.0f64..2.0, da in 0.0f64..1.0, db in 0.0f64..1.0) {
            for f in [BuiltinFlux::Linear, SIN] {
                let g = Godunov(f);
                prop_assert!(g.eval(a + da, b) >= g.eval(a, b));
                prop_assert!(g.eval(a, b + db) <= g.eval(a, b));
            }
        }

        #[test]
        fn lipschitz_bounds_hold(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
            for f in [BuiltinFlux::Linear, SIN] {
                let g = Godunov(f);
                let l: f64 = g.lipschitz();
                let (la, lb): (f64, f64) = g.lipschitz_per_arg();
                prop_assert!((g.eval(a, c) - g.eval(b, c)).abs() <= la * (a - b).abs() + 1e-12);
                prop_assert!((g.eval(c, a) - g.eval(c, b)).abs() <= lb * (a - b).abs() + 1e-12);
                prop_assert!((f.eval(a) - f.eval(b)).abs() <= l * (a - b).abs() + 1e-12);
            }
        }

        #[test]
        fn analytic_extrema_match_dense_scan(lo in -1.5f64..1.5, w in 0.0f64..1.2) {
            let (mn, mx) = FluxFunction::<f64>::extrema(&SIN, lo, lo + w);
            let (dmn, dmx) = dense_extrema(lo, lo + w);
            prop_assert!(mn <= dmn + 1e-12 && (mn - dmn).abs() < 1e-6);
            prop_assert!(mx >= dmx - 1e-12 && (mx - dmx).abs() < 1e-6);
        }
    }
}
