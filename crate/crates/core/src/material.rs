//! Director programs, actuation parameters and the induced target metric.
//!
//! All material data is sampled once per element at its barycenter, so the
//! energy integrand is constant on every element.

use crate::error::{Error, Result};
use crate::mesh::geom::{self, Point};
use crate::mesh::{CreaseSet, EdgeTopology, Mesh};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Symmetric 2×2 matrix stored row-major.
pub type Sym2 = [[f64; 2]; 2];

/// Actuation parameter `((s + 1) / (s0 + 1))^(1/3)`.
pub fn lambda_of(s: f64, s0: f64) -> Result<f64> {
    check_order(s, "s")?;
    check_order(s0, "s0")?;
    Ok(((s + 1.0) / (s0 + 1.0)).cbrt())
}

pub(crate) fn check_order(v: f64, name: &str) -> Result<()> {
    if v.is_finite() && v > -1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {v} is outside (-1, inf)")))
    }
}

/// Target metric `λ² m⊗m + λ⁻¹ m⊥⊗m⊥`.
/// Entrywise l1 distance `Σ |a_ij − b_ij|`.
pub fn metric_distance(a: &Sym2, b: &Sym2) -> f64 {
    let mut acc = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            acc += (a[r][c] - b[r][c]).abs();
        }
    }
    acc
}

pub fn metric_of(m: [f64; 2], lambda: f64) -> Sym2 {
    let a = lambda * lambda;
    let b = 1.0 / lambda;
    let (c, s) = (m[0], m[1]);
    let off = (a - b) * c * s;
    [[a * c * c + b * s * s, off], [off, a * s * s + b * c * c]]
}

/// Defect degree as a reduced fraction `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Degree {
    pub num: i32,
    pub den: u32,
}

impl Degree {
    pub fn new(num: i32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("defect degree with zero denominator"));
        }
        let g = gcd(num.unsigned_abs(), den);
        Ok(Degree {
            num: num / g as i32,
            den: den / g,
        })
    }

    pub const fn integer(n: i32) -> Self {
        Degree { num: n, den: 1 }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Degree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("cannot parse defect degree {s:?}"));
        match s.trim().split_once('/') {
            Some((n, d)) => Degree::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Degree::integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

/// Blueprinted director field.
#[derive(Clone, Debug, PartialEq)]
pub enum Director {
    /// Constant unit vector.
    Constant([f64; 2]),
    /// `(cos(n(θ + α)), sin(n(θ + α)))` with `θ = atan2(x2, x1)`; the branch
    /// cut lies on the negative x1-axis.
    Defect { degree: Degree, alpha: f64 },
    /// Piecewise degree-1/2 field: `sign(x2) e2` for `x1 ≥ 0`, `x/|x|` otherwise.
    Half,
    /// `R1(x) m_half(x)` where `R1` rotates by the polar angle of `x`.
    ThreeHalf,
}

/// Director with a point defect of the given degree at the origin.
pub fn defect_director(degree: Degree, alpha: f64) -> Director {
    Director::Defect { degree, alpha }
}

impl Director {
    /// Unit director at `x`. Defect fields fail at the origin.
    pub fn eval(&self, x: Point) -> Result<[f64; 2]> {
        match *self {
            Director::Constant(m) => Ok(m),
            Director::Defect { degree, alpha } => {
                let r = geom::norm(x);
                if r == 0.0 {
                    return Err(Error::SingularPoint(x));
                }
                let theta = x[1].atan2(x[0]);
                let phi = f64::from(degree.num) * (theta + alpha) / f64::from(degree.den);
                Ok([phi.cos(), phi.sin()])
            }
            Director::Half => half(x),
            Director::ThreeHalf => {
                let h = half(x)?;
                let r = geom::norm(x);
                let (c, s) = (x[0] / r, x[1] / r);
                Ok([c * h[0] - s * h[1], s * h[0] + c * h[1]])
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Director::Constant(m) => {
                let n = geom::norm(m);
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid(format!("director {m:?} is not a unit vector")));
                }
            }
            Director::Defect { alpha, .. } => {
                if !alpha.is_finite() {
                    return Err(Error::invalid("defect rotation angle is not finite"));
                }
            }
            Director::Half | Director::ThreeHalf => {}
        }
        Ok(())
    }
}

fn half(x: Point) -> Result<[f64; 2]> {
    let r = geom::norm(x);
    if r == 0.0 {
        return Err(Error::SingularPoint(x));
    }
    if x[0] >= 0.0 {
        // On the positive x1-axis itself we pick +e2.
        Ok([0.0, if x[1] < 0.0 { -1.0 } else { 1.0 }])
    } else {
        Ok([x[0] / r, x[1] / r])
    }
}

/// Unit vector at angle `deg` degrees.
pub fn unit_at_degrees(deg: f64) -> [f64; 2] {
    let t = deg * PI / 180.0;
    [t.cos(), t.sin()]
}

/// One material region. A region without a polygon covers everything not
/// claimed by an earlier region.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub polygon: Option<Vec<Point>>,
    pub director: Director,
    pub s: f64,
    pub s0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialProgram {
    /// Looked up in order; the first region containing the barycenter wins.
    pub regions: Vec<Region>,
}

impl MaterialProgram {
    pub fn uniform(director: Director, s: f64, s0: f64) -> Result<Self> {
        Self::new(vec![Region {
            polygon: None,
            director,
            s,
            s0,
        }])
    }

    pub fn new(regions: Vec<Region>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::invalid("material program has no regions"));
        }
        for (i, r) in regions.iter().enumerate() {
            check_order(r.s, &format!("region {i} s"))?;
            check_order(r.s0, &format!("region {i} s0"))?;
            r.director.validate()?;
            if let Some(p) = &r.polygon {
                if p.len() < 3 {
                    return Err(Error::invalid(format!("region {i} polygon has fewer than 3 vertices")));
                }
            }
        }
        Ok(MaterialProgram { regions })
    }

    /// Element-wise program from polygons with constant directors.
    pub fn piecewise(regions: Vec<(Vec<Point>, [f64; 2], f64, f64)>) -> Result<Self> {
        Self::new(
            regions
                .into_iter()
                .map(|(poly, m, s, s0)| Region {
                    polygon: Some(poly),
                    director: Director::Constant(m),
                    s,
                    s0,
                })
                .collect(),
        )
    }

    fn region_of(&self, p: Point, tol: f64) -> Option<usize> {
        self.regions.iter().position(|r| match &r.polygon {
            Some(poly) => geom::point_in_polygon(p, poly, tol),
            None => true,
        })
    }

    /// Samples the program at every element barycenter.
    pub fn sample(&self, mesh: &Mesh) -> Result<ElementMaterial> {
        let ne = mesh.num_elements();
        let mut out = ElementMaterial {
            m: Vec::with_capacity(ne),
            s: Vec::with_capacity(ne),
            s0: Vec::with_capacity(ne),
            lambda: Vec::with_capacity(ne),
            region: Vec::with_capacity(ne),
        };
        let tol = 1e-12 * mesh.h;
        for t in 0..ne {
            let b = mesh.barycenter(t);
            let k = self.region_of(b, tol).ok_or(Error::NoRegion { element: t })?;
            let r = &self.regions[k];
            out.m.push(r.director.eval(b)?);
            out.s.push(r.s);
            out.s0.push(r.s0);
            out.lambda.push(lambda_of(r.s, r.s0)?);
            out.region.push(k);
        }
        Ok(out)
    }
}

/// Per-element material constants.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementMaterial {
    pub m: Vec<[f64; 2]>,
    pub s: Vec<f64>,
    pub s0: Vec<f64>,
    pub lambda: Vec<f64>,
    pub region: Vec<usize>,
}

impl ElementMaterial {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn target_metric(&self) -> TargetMetric {
        TargetMetric {
            g: self.m.iter().zip(&self.lambda).map(|(&m, &l)| metric_of(m, l)).collect(),
            lambda: self.lambda.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetMetric {
    pub g: Vec<Sym2>,
    pub lambda: Vec<f64>,
}

pub fn target_metric(program: &MaterialProgram, mesh: &Mesh) -> Result<TargetMetric> {
    Ok(program.sample(mesh)?.target_metric())
}

/// Nonnegative regularization weight per interior edge.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizationWeights {
    pub weights: Vec<f64>,
}

/// `base_cr` on every interior edge except creases, which get zero.
pub fn regularization_weights(
    topology: &EdgeTopology,
    creases: &CreaseSet,
    base_cr: f64,
) -> Result<RegularizationWeights> {
    if !(base_cr >= 0.0) || !base_cr.is_finite() {
        return Err(Error::invalid(format!("regularization weight {base_cr} must be nonnegative")));
    }
    if creases.tagged.len() != topology.num_interior() {
        return Err(Error::invalid("crease set does not match the edge topology"));
    }
    Ok(RegularizationWeights {
        weights: creases
            .tagged
            .iter()
            .map(|&c| if c { 0.0 } else { base_cr })
            .collect(),
    })
}

/// Compatibility data for one crease edge.
#[derive(Clone, Debug, PartialEq)]
pub struct CreaseCompatibility {
    pub edge: usize,
    /// `|m·t|` on the two adjacent elements.
    pub tangential: [f64; 2],
    pub lambda: [f64; 2],
    pub compatible: bool,
}

/// Checks `|m⁺·t| = |m⁻·t|` and continuity of λ on every crease edge.
///
/// This is advisory: incompatible programs are legitimate inputs.
pub fn crease_compatibility(
    mesh: &Mesh,
    topology: &EdgeTopology,
    creases: &CreaseSet,
    material: &ElementMaterial,
    tol: f64,
) -> Vec<CreaseCompatibility> {
    creases
        .edges
        .iter()
        .map(|&i| {
            let e = &topology.edges[i];
            let d = geom::sub(mesh.vertices[e.vertices[1]], mesh.vertices[e.vertices[0]]);
            let t = [d[0] / e.length, d[1] / e.length];
            let [a, b] = e.elements;
            let tangential = [geom::dot(material.m[a], t).abs(), geom::dot(material.m[b], t).abs()];
            let lambda = [material.lambda[a], material.lambda[b]];
            CreaseCompatibility {
                edge: i,
                tangential,
                lambda,
                compatible: (tangential[0] - tangential[1]).abs() <= tol
                    && (lambda[0] - lambda[1]).abs() <= tol,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_edge_topology, fit_creases, generate_square_mesh, DiagonalPattern, Rect};

    #[test]
    fn lambda_values() {
        assert_eq!(lambda_of(0.3, 0.3).unwrap(), 1.0);
        assert!((lambda_of(0.1, 1.0).unwrap() - 0.819_321_7).abs() < 1e-6);
        assert!((lambda_of(-1.0 / 3.0, 1.0).unwrap() - (1.0f64 / 3.0).cbrt()).abs() < 1e-15);
        assert!(lambda_of(-1.0, 0.0).is_err());
        assert!(lambda_of(0.0, -1.5).is_err());
    }

    #[test]
    fn director_examples() {
        let d = defect_director(Degree::integer(1), 0.0);
        assert_eq!(d.eval([1.0, 0.0]).unwrap(), [1.0, 0.0]);
        let m = defect_director(Degree::integer(2), 0.0).eval([0.0, 1.0]).unwrap();
        assert!((m[0] + 1.0).abs() < 1e-15 && m[1].abs() < 1e-15);
        let m = defect_director(Degree::integer(1), PI / 2.0).eval([1.0, 0.0]).unwrap();
        assert!(m[0].abs() < 1e-15 && (m[1] - 1.0).abs() < 1e-15);
        assert!(matches!(d.eval([0.0, 0.0]), Err(Error::SingularPoint(_))));
        assert!(Director::Half.eval([0.0, 0.0]).is_err());
    }

    #[test]
    fn half_and_three_half() {
        assert_eq!(Director::Half.eval([0.5, -0.1]).unwrap(), [0.0, -1.0]);
        let m = Director::Half.eval([-3.0, 4.0]).unwrap();
        assert!((m[0] + 0.6).abs() < 1e-15 && (m[1] - 0.8).abs() < 1e-15);
        // On the positive x2 axis, R1 is a quarter turn and m_half = e2.
        let m = Director::ThreeHalf.eval([0.0, 2.0]).unwrap();
        assert!((m[0] + 1.0).abs() < 1e-15 && m[1].abs() < 1e-15);
    }

    #[test]
    fn degree_parsing() {
        assert_eq!("3/2".parse::<Degree>().unwrap(), Degree { num: 3, den: 2 });
        assert_eq!("-5".parse::<Degree>().unwrap(), Degree::integer(-5));
        assert_eq!(Degree::new(4, 2).unwrap(), Degree::integer(2));
        assert_eq!(Degree::new(-2, 4).unwrap().to_string(), "-1/2");
        assert!("1/0".parse::<Degree>().is_err());
        assert!("x".parse::<Degree>().is_err());
    }

    #[test]
    fn metric_diag() {
        let g = metric_of([1.0, 0.0], 0.8);
        assert!((g[0][0] - 0.64).abs() < 1e-15 && (g[1][1] - 1.25).abs() < 1e-15);
        assert_eq!(g[0][1], 0.0);
    }

    #[test]
    fn piecewise_lookup_and_missing_region() {
        let mesh = generate_square_mesh(4, 4, Rect::UNIT, DiagonalPattern::Single).unwrap();
        let left = vec![[0.0, 0.0], [0.5, 0.0], [0.5, 1.0], [0.0, 1.0]];
        let right = vec![[0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 1.0]];
        let p = MaterialProgram::piecewise(vec![
            (left.clone(), [1.0, 0.0], 1.0, 1.0),
            (right, [0.0, 1.0], 0.1, 1.0),
        ])
        .unwrap();
        let mat = p.sample(&mesh).unwrap();
        for t in 0..mesh.num_elements() {
            let expect = if mesh.barycenter(t)[0] < 0.5 { 1.0 } else { lambda_of(0.1, 1.0).unwrap() };
            assert_eq!(mat.lambda[t], expect);
        }
        let only_left = MaterialProgram::piecewise(vec![(left, [1.0, 0.0], 1.0, 1.0)]).unwrap();
        assert!(matches!(only_left.sample(&mesh), Err(Error::NoRegion { .. })));
    }

    #[test]
    fn rejects_bad_programs() {
        assert!(MaterialProgram::uniform(Director::Constant([1.0, 1.0]), 0.0, 0.0).is_err());
        assert!(MaterialProgram::uniform(Director::Constant([1.0, 0.0]), -1.0, 0.0).is_err());
        assert!(MaterialProgram::new(vec![]).is_err());
    }

    #[test]
    fn weights_zero_on_creases() {
        let mesh = generate_square_mesh(4, 4, Rect::UNIT, DiagonalPattern::Single).unwrap();
        let topo = build_edge_topology(&mesh).unwrap();
        let c = fit_creases(&mesh, &topo, &[[[0.5, 0.0], [0.5, 1.0]]]).unwrap();
        let w = regularization_weights(&topo, &c, 100.0).unwrap();
        assert_eq!(w.weights.len(), topo.num_interior());
        for (i, &x) in w.weights.iter().enumerate() {
            assert_eq!(x, if c.tagged[i] { 0.0 } else { 100.0 });
        }
        assert!(regularization_weights(&topo, &c, -1.0).is_err());
    }
}
