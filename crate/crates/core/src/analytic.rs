//! Closed-form lifted surfaces, approximate defect profiles and the
//! initialization fields used by the canned experiments.
//!
//! Lifted surfaces have the form `y(x) = (x_λ, H(x))` with `x_λ = λ^{-1/2} x`,
//! so `I[y] = λ⁻¹ Id + ∇H ⊗ ∇H`. Every profile below exposes `H` and its
//! exact gradient, which makes the metric residual cheap to sample.

use crate::energy::first_form;
use crate::error::{Error, Result};
use crate::material::{metric_distance, metric_of, Director, Sym2};
use crate::mesh::geom::Point;
use std::fmt;
use std::str::FromStr;

fn check_cooled(lambda: f64) -> Result<f64> {
    if lambda > 1.0 && lambda.is_finite() {
        Ok((lambda.powi(3) - 1.0).sqrt())
    } else {
        Err(Error::invalid(format!("lifted surfaces need lambda > 1, got {lambda}")))
    }
}

fn check_anchor(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("anchor radius must be positive, got {a}")))
    }
}

fn check_right_half(x: Point) -> Result<()> {
    if x[0] > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("profile defined for x1 > 0 only, got {x:?}")))
    }
}

/// `v(x) = (a/2 log|x|² + a − a log a, a arctan(x2/x1))`, defined for `x1 > 0`.
pub fn v_map(a: f64, x: Point) -> Result<Point> {
    check_anchor(a)?;
    check_right_half(x)?;
    let c = a - a * a.ln();
    Ok([0.5 * a * (x[0] * x[0] + x[1] * x[1]).ln() + c, a * (x[1] / x[0]).atan()])
}

/// `∫₀ᵗ √(s² + c²) ds` in closed form.
pub fn sqrt_integral(t: f64, c: f64) -> f64 {
    let c = c.abs();
    let r = t.hypot(c);
    if c == 0.0 {
        return 0.5 * t * t.abs();
    }
    0.5 * (t * r + c * c * (t / c).asinh())
}

/// Rotation `R1 = [[μ1, −μ2], [μ2, μ1]]` with `μ = x/|x|`, applied to `w`.
fn rotate_polar(x: Point, w: [f64; 2]) -> [f64; 2] {
    let r = x[0].hypot(x[1]);
    let (c, s) = (x[0] / r, x[1] / r);
    [c * w[0] - s * w[1], s * w[0] + c * w[1]]
}

/// `φ₂(v(x))`.
pub fn degree2_profile(a: f64, lambda: f64, x: Point) -> Result<f64> {
    let k = check_cooled(lambda)?;
    let w = v_map(a, x)?;
    Ok(k / (2.0 * a) * (w[0] * w[0] + w[1] * w[1]))
}

/// `φ_{3/2}(x) = √(λ³−1) (1 − (1/a) ∫₀^{|x2|} √(s² + x1²) ds)` for `x1 > 0`.
pub fn phi_three_half(a: f64, lambda: f64, x: Point) -> Result<f64> {
    let k = check_cooled(lambda)?;
    check_anchor(a)?;
    check_right_half(x)?;
    Ok(three_half_unchecked(k, a, x))
}

// The integrand only sees x1², so this also serves points where v(x) has a
// negative first component.
fn three_half_unchecked(k: f64, a: f64, w: Point) -> f64 {
    k * (1.0 - sqrt_integral(w[1].abs(), w[0]) / a)
}

/// `φ_{3/2}(v(x))`.
pub fn degree_3half_profile(a: f64, lambda: f64, x: Point) -> Result<f64> {
    let k = check_cooled(lambda)?;
    Ok(three_half_unchecked(k, a, v_map(a, x)?))
}

/// `√(λ³−1)(1 − (a/2) arctan(|x2|/x1)²)`, the profile obtained by dropping
/// `x1` from the integrand of `φ_{3/2}` before composing with `v`. Its level
/// sets are the rays `|x2|/x1 = const`.
pub fn degree_3half_heuristic(a: f64, lambda: f64, x: Point) -> Result<f64> {
    let k = check_cooled(lambda)?;
    check_anchor(a)?;
    check_right_half(x)?;
    Ok(k * (1.0 - 0.5 * a * (x[1].abs() / x[0]).atan().powi(2)))
}

/// Lifted surfaces over the reference plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// Exact cone for the radial director.
    Cone,
    /// Exact surface for the piecewise degree-1/2 director.
    Half,
    /// Approximate degree-2 profile anchored at `(a, 0)`.
    Degree2 { a: f64 },
    /// Approximate degree-3/2 profile anchored at `(a, 0)`, right half-plane.
    ThreeHalf { a: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedSurface {
    pub profile: Profile,
    pub lambda: f64,
}

impl LiftedSurface {
    pub fn new(profile: Profile, lambda: f64) -> Result<Self> {
        check_cooled(lambda)?;
        if let Profile::Degree2 { a } | Profile::ThreeHalf { a } = profile {
            check_anchor(a)?;
        }
        Ok(LiftedSurface { profile, lambda })
    }

    fn scale(&self) -> f64 {
        self.lambda.powf(-0.5)
    }

    /// Director whose target metric the surface realizes (exactly or approximately).
    pub fn director(&self) -> Director {
        match self.profile {
            Profile::Cone => Director::Defect {
                degree: crate::material::Degree::integer(1),
                alpha: 0.0,
            },
            Profile::Half => Director::Half,
            Profile::Degree2 { .. } => Director::Defect {
                degree: crate::material::Degree::integer(2),
                alpha: 0.0,
            },
            Profile::ThreeHalf { .. } => Director::ThreeHalf,
        }
    }

    /// Height `H(x)`.
    pub fn height(&self, x: Point) -> Result<f64> {
        let k = (self.lambda.powi(3) - 1.0).sqrt();
        let z = [self.scale() * x[0], self.scale() * x[1]];
        match self.profile {
            Profile::Cone => Ok(k * (1.0 - z[0].hypot(z[1]))),
            Profile::Half => Ok(if z[0] >= 0.0 {
                k * (1.0 - z[1].abs())
            } else {
                k * (1.0 - z[0].hypot(z[1]))
            }),
            Profile::Degree2 { a } => degree2_profile(a, self.lambda, z),
            Profile::ThreeHalf { a } => degree_3half_profile(a, self.lambda, z),
        }
    }

    /// Exact gradient of `H`. Undefined on the kinks, where either one-sided
    /// value is returned.
    pub fn height_gradient(&self, x: Point) -> Result<[f64; 2]> {
        let k = (self.lambda.powi(3) - 1.0).sqrt();
        let s = self.scale();
        let z = [s * x[0], s * x[1]];
        let r = z[0].hypot(z[1]);
        let radial = || -> Result<[f64; 2]> {
            if r == 0.0 {
                return Err(Error::SingularPoint(x));
            }
            Ok([-k * s * z[0] / r, -k * s * z[1] / r])
        };
        match self.profile {
            Profile::Cone => radial(),
            Profile::Half => {
                if z[0] >= 0.0 {
                    Ok([0.0, -k * s * z[1].signum()])
                } else {
                    radial()
                }
            }
            Profile::Degree2 { a } => {
                // ∇v(z)ᵀ w = (a/|z|) R1(z) w and ∇φ₂(w) = (k/a) w.
                let w = v_map(a, z)?;
                let g = rotate_polar(z, w);
                Ok([s * k / r * g[0], s * k / r * g[1]])
            }
            Profile::ThreeHalf { a } => {
                let w = v_map(a, z)?;
                let t = w[1].abs();
                let d1 = if w[0] == 0.0 { 0.0 } else { w[0] * (t / w[0].abs()).asinh() };
                let dphi = [
                    -k / a * d1,
                    -k / a * w[0].hypot(w[1]) * w[1].signum(),
                ];
                let g = rotate_polar(z, dphi);
                Ok([s * a / r * g[0], s * a / r * g[1]])
            }
        }
    }

    pub fn eval(&self, x: Point) -> Result<[f64; 3]> {
        let s = self.scale();
        Ok([s * x[0], s * x[1], self.height(x)?])
    }

    /// `∇y` as a 3×2 matrix.
    pub fn deformation_gradient(&self, x: Point) -> Result<[[f64; 2]; 3]> {
        let s = self.scale();
        let g = self.height_gradient(x)?;
        Ok([[s, 0.0], [0.0, s], g])
    }

    pub fn first_form(&self, x: Point) -> Result<Sym2> {
        Ok(first_form(&self.deformation_gradient(x)?))
    }

    pub fn target_metric(&self, x: Point) -> Result<Sym2> {
        Ok(metric_of(self.director().eval(x)?, self.lambda))
    }

    /// Entrywise l1 norm of `I[y](x) − g(x)`.
    pub fn metric_residual(&self, x: Point) -> Result<f64> {
        Ok(metric_distance(&self.first_form(x)?, &self.target_metric(x)?))
    }

    /// Reference point where an approximate profile is exact, `x_λ = (a, 0)`.
    pub fn anchor(&self) -> Option<Point> {
        match self.profile {
            Profile::Degree2 { a } | Profile::ThreeHalf { a } => Some([a * self.lambda.sqrt(), 0.0]),
            Profile::Cone | Profile::Half => None,
        }
    }
}

/// `(x_λ, √(λ³−1)(1 − |x_λ|))`.
pub fn cone_solution(lambda: f64, x: Point) -> Result<[f64; 3]> {
    LiftedSurface::new(Profile::Cone, lambda)?.eval(x)
}

pub fn degree_half_solution(lambda: f64, x: Point) -> Result<[f64; 3]> {
    LiftedSurface::new(Profile::Half, lambda)?.eval(x)
}

/// Lifted surface `(λx, φ(λx))` for a heated sheet, `λ < 1`.
pub fn heated_lift(lambda: f64, phi: impl Fn(Point) -> f64, x: Point) -> [f64; 3] {
    let z = [lambda * x[0], lambda * x[1]];
    [z[0], z[1], phi(z)]
}

/// Largest violation of `|∇φ(λx) · m(x)| = 0` and `|∇φ(λx)| = √(λ⁻³ − 1)`
/// over `points`, with `∇φ` from central differences of step `fd`.
///
/// When both vanish, [`heated_lift`] realizes the target metric of `director`.
pub fn heated_profile_defect(
    lambda: f64,
    phi: impl Fn(Point) -> f64,
    director: &Director,
    points: &[Point],
    fd: f64,
) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(format!("heated lifted surfaces need 0 < lambda < 1, got {lambda}")));
    }
    let target = (lambda.powi(-3) - 1.0).sqrt();
    let mut worst: f64 = 0.0;
    for &x in points {
        let z = [lambda * x[0], lambda * x[1]];
        let g = [
            (phi([z[0] + fd, z[1]]) - phi([z[0] - fd, z[1]])) / (2.0 * fd),
            (phi([z[0], z[1] + fd]) - phi([z[0], z[1] - fd])) / (2.0 * fd),
        ];
        let m = director.eval(x)?;
        let along = (g[0] * m[0] + g[1] * m[1]).abs();
        let size = (g[0].hypot(g[1]) - target).abs();
        worst = worst.max(along).max(size);
    }
    Ok(worst)
}

/// Initial deformations of the form `(x, A · b(x))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitShape {
    Flat,
    /// `1 − |x|²` on the unit disc.
    DiscBump,
    /// `x1(1 − x1) x2(2 − x2)` on `[0,1]×[0,2]`.
    TableA,
    /// `x1(1 − x1) x2(1 − x2)`.
    TableB,
    /// `x1(x1 − √3)(x2 + x1/√3 − 1)(x2 + x1/√3 − 2)` on the cube rhombus.
    CubeRhombus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Initialization {
    pub shape: InitShape,
    pub amplitude: f64,
}

impl InitShape {
    pub fn default_amplitude(self) -> f64 {
        match self {
            InitShape::Flat => 0.0,
            InitShape::DiscBump => 0.05,
            InitShape::TableA | InitShape::TableB | InitShape::CubeRhombus => 0.8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitShape::Flat => "flat",
            InitShape::DiscBump => "disc_bump",
            InitShape::TableA => "table_a",
            InitShape::TableB => "table_b",
            InitShape::CubeRhombus => "cube_rhombus",
        }
    }

    fn bump(self, x: Point) -> f64 {
        let [x1, x2] = x;
        match self {
            InitShape::Flat => 0.0,
            InitShape::DiscBump => 1.0 - x1 * x1 - x2 * x2,
            InitShape::TableA => x1 * (1.0 - x1) * x2 * (2.0 - x2),
            InitShape::TableB => x1 * (1.0 - x1) * x2 * (1.0 - x2),
            InitShape::CubeRhombus => {
                let r3 = 3f64.sqrt();
                let u = x2 + x1 / r3;
                x1 * (x1 - r3) * (u - 1.0) * (u - 2.0)
            }
        }
    }
}

impl Initialization {
    pub fn new(shape: InitShape) -> Self {
        Initialization {
            shape,
            amplitude: shape.default_amplitude(),
        }
    }

    pub fn with_amplitude(shape: InitShape, amplitude: f64) -> Self {
        Initialization { shape, amplitude }
    }

    /// Looks up a field by name; `custom_amplitude` is the disc bump with a
    /// caller-chosen amplitude.
    pub fn from_name(name: &str, amplitude: Option<f64>) -> Result<Self> {
        let shape = match name {
            "custom_amplitude" => {
                let a = amplitude.ok_or_else(|| Error::invalid("custom_amplitude needs an amplitude"))?;
                return Ok(Self::with_amplitude(InitShape::DiscBump, a));
            }
            other => other.parse::<InitShape>()?,
        };
        Ok(match amplitude {
            Some(a) => Self::with_amplitude(shape, a),
            None => Self::new(shape),
        })
    }

    pub fn eval(&self, x: Point) -> [f64; 3] {
        [x[0], x[1], self.amplitude * self.shape.bump(x)]
    }
}

impl fmt::Display for InitShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "flat" => InitShape::Flat,
            "disc_bump" => InitShape::DiscBump,
            "table_a" => InitShape::TableA,
            "table_b" => InitShape::TableB,
            "cube_rhombus" => InitShape::CubeRhombus,
            other => return Err(Error::invalid(format!("unknown initialization '{other}'"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::RHOMBUS;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LAMBDA: f64 = 1.259_921_049_894_873_2; // 2^{1/3}

    fn random_points(n: usize, seed: u64, ok: impl Fn(Point) -> bool) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < n {
            let p = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            if ok(p) {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn cone_apex_and_height_factor() {
        let y = cone_solution(LAMBDA, [0.0, 0.0]).unwrap();
        assert_eq!(&y[..2], &[0.0, 0.0]);
        assert!((y[2] - 1.0).abs() < 1e-14);
        assert!(cone_solution(0.9, [0.1, 0.0]).is_err());
    }

    #[test]
    fn cone_and_half_are_isometric() {
        for profile in [Profile::Cone, Profile::Half] {
            for lambda in [1.1, LAMBDA, 1.7] {
                let s = LiftedSurface::new(profile, lambda).unwrap();
                let pts = random_points(1000, 7, |p| p[0].abs() > 1e-6 && p[1].abs() > 1e-6);
                for p in pts {
                    assert!(s.metric_residual(p).unwrap() <= 1e-10, "{profile:?} at {p:?}");
                }
            }
        }
    }

    #[test]
    fn half_matches_cone_on_the_left_and_is_continuous() {
        let cone = LiftedSurface::new(Profile::Cone, LAMBDA).unwrap();
        let half = LiftedSurface::new(Profile::Half, LAMBDA).unwrap();
        for p in random_points(200, 3, |p| p[0] < 0.0) {
            assert_eq!(cone.eval(p).unwrap(), half.eval(p).unwrap());
        }
        for x2 in [-0.7, -0.2, 0.3, 0.9] {
            let l = half.height([-1e-15, x2]).unwrap();
            let r = half.height([0.0, x2]).unwrap();
            assert!((l - r).abs() < 1e-14);
        }
    }

    #[test]
    fn height_gradients_match_finite_differences() {
        let surfaces = [
            LiftedSurface::new(Profile::Cone, 1.3).unwrap(),
            LiftedSurface::new(Profile::Degree2 { a: 0.75 }, 1.1).unwrap(),
            LiftedSurface::new(Profile::ThreeHalf { a: 0.75 }, 1.1).unwrap(),
        ];
        let e = 1e-6;
        for s in surfaces {
            for p in random_points(50, 11, |p| p[0] > 0.2 && p[1].abs() > 0.05) {
                let g = s.height_gradient(p).unwrap();
                let fd = [
                    (s.height([p[0] + e, p[1]]).unwrap() - s.height([p[0] - e, p[1]]).unwrap()) / (2.0 * e),
                    (s.height([p[0], p[1] + e]).unwrap() - s.height([p[0], p[1] - e]).unwrap()) / (2.0 * e),
                ];
                for k in 0..2 {
                    assert!((g[k] - fd[k]).abs() < 1e-7, "{:?} at {p:?}: {g:?} vs {fd:?}", s.profile);
                }
            }
        }
    }

    #[test]
    fn v_map_fixes_anchor_with_identity_gradient() {
        let a = 0.75;
        let x = [a, 0.0];
        let v = v_map(a, x).unwrap();
        assert!((v[0] - a).abs() < 1e-15 && v[1].abs() < 1e-15);
        let e = 1e-6;
        let col = |d: Point| {
            let p = v_map(a, [x[0] + d[0], x[1] + d[1]]).unwrap();
            let m = v_map(a, [x[0] - d[0], x[1] - d[1]]).unwrap();
            [(p[0] - m[0]) / (2.0 * e), (p[1] - m[1]) / (2.0 * e)]
        };
        let (c0, c1) = (col([e, 0.0]), col([0.0, e]));
        assert!((c0[0] - 1.0).abs() < 1e-6 && c0[1].abs() < 1e-6);
        assert!(c1[0].abs() < 1e-6 && (c1[1] - 1.0).abs() < 1e-6);
        assert!(v_map(a, [-0.1, 0.2]).is_err());
    }

    #[test]
    fn v_map_is_second_order_near_anchor() {
        let a = 0.75;
        let dir = [0.6, -0.8];
        let err = |r: f64| {
            let x = [a + r * dir[0], r * dir[1]];
            let v = v_map(a, x).unwrap();
            (v[0] - x[0]).hypot(v[1] - x[1])
        };
        for r in [0.04, 0.02, 0.01] {
            let ratio = err(r) / err(r / 2.0);
            assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio} at {r}");
        }
    }

    #[test]
    fn degree2_anchor_height_and_symmetry() {
        let (a, lambda) = (0.75, 1.1);
        let s = LiftedSurface::new(Profile::Degree2 { a }, lambda).unwrap();
        let x = s.anchor().unwrap();
        let expected = (lambda.powi(3) - 1.0).sqrt() * a / 2.0;
        assert!((s.height(x).unwrap() - expected).abs() < 1e-14);
        for p in random_points(100, 5, |p| p[0] > 0.05) {
            let q = [p[0], -p[1]];
            assert!((degree2_profile(a, lambda, p).unwrap() - degree2_profile(a, lambda, q).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn sqrt_integral_matches_quadrature() {
        // Composite Simpson with 20000 panels as an independent oracle.
        let simpson = |t: f64, c: f64| {
            let n = 20_000;
            let h = t / n as f64;
            let f = |s: f64| (s * s + c * c).sqrt();
            let mut acc = f(0.0) + f(t);
            for i in 1..n {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
            }
            acc * h / 3.0
        };
        for (t, c) in [(0.3, 0.5), (1.2, 0.1), (0.7, 2.0), (0.5, 1e-3)] {
            assert!((sqrt_integral(t, c) - simpson(t, c)).abs() < 1e-10, "t={t} c={c}");
        }
        assert_eq!(sqrt_integral(0.0, 0.4), 0.0);
    }

    #[test]
    fn three_half_on_axis_is_the_plateau() {
        let lambda = 1.1;
        let h = degree_3half_profile(0.75, lambda, [0.9, 0.0]).unwrap();
        assert!((h - (lambda.powi(3) - 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn three_half_contours_pinch_toward_origin() {
        let (a, lambda) = (0.75, 1.1);
        for c in [0.3, 1.0, 2.5] {
            let h1 = degree_3half_heuristic(a, lambda, [1e-3, c * 1e-3]).unwrap();
            let h2 = degree_3half_heuristic(a, lambda, [0.4, c * 0.4]).unwrap();
            assert!((h1 - h2).abs() < 1e-15);
        }
        // The composed profile falls off monotonically with the ray slope.
        for r in [0.05, 0.2, 0.6] {
            let mut prev = f64::INFINITY;
            for c in [0.0, 0.2, 0.5, 1.0, 2.0] {
                let x = [r / (1.0f64 + c * c).sqrt(), c * r / (1.0f64 + c * c).sqrt()];
                let h = degree_3half_profile(a, lambda, x).unwrap();
                assert!(h < prev || c == 0.0, "r={r} c={c}");
                prev = h;
            }
        }
    }

    #[test]
    fn heated_cone_satisfies_gradient_constraint() {
        let lambda = (1.1f64 / 2.0).cbrt();
        let k = (lambda.powi(-3) - 1.0).sqrt();
        let phi = |z: Point| k * z[0].hypot(z[1]);
        let azimuthal = Director::Defect {
            degree: crate::material::Degree::integer(1),
            alpha: std::f64::consts::FRAC_PI_2,
        };
        let pts = random_points(100, 9, |p| p[0].hypot(p[1]) > 0.1);
        assert!(heated_profile_defect(lambda, phi, &azimuthal, &pts, 1e-6).unwrap() < 1e-8);
        let y = heated_lift(lambda, phi, [0.5, 0.0]);
        assert!((y[2] - k * lambda * 0.5).abs() < 1e-15);
    }

    #[test]
    fn initialization_fields() {
        let disc = Initialization::new(InitShape::DiscBump);
        assert_eq!(disc.eval([0.0, 0.0]), [0.0, 0.0, 0.05]);
        let table = Initialization::new(InitShape::TableA);
        for p in [[0.0, 0.7], [1.0, 1.3], [0.4, 0.0], [0.6, 2.0]] {
            assert_eq!(table.eval(p)[2], 0.0);
        }
        let cube = Initialization::new(InitShape::CubeRhombus);
        for p in RHOMBUS {
            assert!(cube.eval(p)[2].abs() < 1e-14, "{p:?}");
        }
        let custom = Initialization::from_name("custom_amplitude", Some(0.2)).unwrap();
        assert!((custom.eval([0.0, 0.0])[2] - 0.2).abs() < 1e-15);
        assert!(Initialization::from_name("custom_amplitude", None).is_err());
        assert!(Initialization::from_name("saddle", None).is_err());
        assert_eq!("table_b".parse::<InitShape>().unwrap(), InitShape::TableB);
    }
}
