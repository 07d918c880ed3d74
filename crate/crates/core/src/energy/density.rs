//! Pointwise stretching density, its derivatives in F, and the 3D
//! neo-classical density used to cross-check it.

use crate::error::{Error, Result};
use crate::material::{check_order, Sym2};
use nalgebra::{Matrix3, SymmetricEigen};

/// 3×2 deformation gradient, row-major. Flattened index of `F[i][j]` is `2i + j`.
pub type Mat32 = [[f64; 2]; 3];
/// 3×3 matrix, row-major.
pub type Mat3 = [[f64; 3]; 3];
/// Second derivative of the density on flattened 3×2 directions.
pub type Hess6 = [[f64; 6]; 6];

/// Degeneracy guard on `det I(F)` and `m·I(F)m`.
pub const EPS_DET: f64 = 1e-12;

/// First fundamental form `FᵀF`.
pub fn first_form(f: &Mat32) -> Sym2 {
    let mut g = [[0.0; 2]; 2];
    for row in f {
        g[0][0] += row[0] * row[0];
        g[0][1] += row[0] * row[1];
        g[1][1] += row[1] * row[1];
    }
    g[1][0] = g[0][1];
    g
}

fn det2(a: &Sym2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn quad(a: &Sym2, m: [f64; 2]) -> f64 {
    m[0] * (a[0][0] * m[0] + a[0][1] * m[1]) + m[1] * (a[1][0] * m[0] + a[1][1] * m[1])
}

/// Material constants of one element, with λ and `1/(s+1)` cached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Actuation {
    pub m: [f64; 2],
    pub s: f64,
    pub s0: f64,
    pub lambda: f64,
    k: f64,
}

impl Actuation {
    pub fn new(m: [f64; 2], s: f64, s0: f64) -> Result<Self> {
        check_order(s, "s")?;
        check_order(s0, "s0")?;
        Ok(Actuation {
            m,
            s,
            s0,
            lambda: ((s + 1.0) / (s0 + 1.0)).cbrt(),
            k: 1.0 / (s + 1.0),
        })
    }

    fn invariants(&self, f: &Mat32) -> Result<(Sym2, f64, f64)> {
        let i = first_form(f);
        let j = det2(&i);
        let c = quad(&i, self.m);
        if !(j > EPS_DET && c > EPS_DET) {
            return Err(Error::Degenerate {
                element: None,
                det: j,
                cm: c,
            });
        }
        Ok((i, j, c))
    }

    pub fn density(&self, f: &Mat32) -> Result<f64> {
        let (i, j, c) = self.invariants(f)?;
        let tr = i[0][0] + i[1][1];
        Ok(self.lambda * (1.0 / j + self.k * (tr + self.s0 * c + self.s * j / c)) - 3.0)
    }

    /// `S = a_J adj(I) + k Id + a_C m⊗m`, so that `∂W/∂F = 2λ F S`.
    fn stress_factor(&self, i: &Sym2, j: f64, c: f64) -> (Sym2, Sym2, f64, f64) {
        let adj = [[i[1][1], -i[0][1]], [-i[1][0], i[0][0]]];
        let a_j = -1.0 / (j * j) + self.k * self.s / c;
        let a_c = self.k * (self.s0 - self.s * j / (c * c));
        let m = self.m;
        let mut s = [[0.0; 2]; 2];
        for p in 0..2 {
            for q in 0..2 {
                s[p][q] = a_j * adj[p][q] + a_c * m[p] * m[q];
            }
            s[p][p] += self.k;
        }
        (s, adj, a_j, a_c)
    }

    pub fn gradient(&self, f: &Mat32) -> Result<Mat32> {
        Ok(self.density_and_gradient(f)?.1)
    }

    pub fn density_and_gradient(&self, f: &Mat32) -> Result<(f64, Mat32)> {
        let (i, j, c) = self.invariants(f)?;
        let tr = i[0][0] + i[1][1];
        let w = self.lambda * (1.0 / j + self.k * (tr + self.s0 * c + self.s * j / c)) - 3.0;
        let (s, ..) = self.stress_factor(&i, j, c);
        let two_l = 2.0 * self.lambda;
        let mut p = [[0.0; 2]; 3];
        for r in 0..3 {
            for q in 0..2 {
                p[r][q] = two_l * (f[r][0] * s[0][q] + f[r][1] * s[1][q]);
            }
        }
        Ok((w, p))
    }

    /// Symmetric Hessian `∂²W/∂F²` on flattened directions.
    pub fn hessian(&self, f: &Mat32) -> Result<Hess6> {
        let (i, j, c) = self.invariants(f)?;
        let (s, adj, a_j, _) = self.stress_factor(&i, j, c);
        let (k, sp, m) = (self.k, self.s, self.m);
        let two_l = 2.0 * self.lambda;
        let (j2, c2) = (j * j, c * c);
        let mut h = [[0.0; 6]; 6];
        for col in 0..6 {
            let (dr, dq) = (col / 2, col % 2);
            // dF = e_dr ⊗ e_dq, so dI = e_dq ⊗ F[dr] + F[dr] ⊗ e_dq.
            let fr = f[dr];
            let mut di = [[0.0; 2]; 2];
            for p in 0..2 {
                di[dq][p] += fr[p];
                di[p][dq] += fr[p];
            }
            let d_j = adj[0][0] * di[0][0] + 2.0 * adj[0][1] * di[0][1] + adj[1][1] * di[1][1];
            let d_c = quad(&di, m);
            let da_j = 2.0 * d_j / (j2 * j) - k * sp * d_c / c2;
            let da_c = k * (-sp * d_j / c2 + 2.0 * sp * j * d_c / (c2 * c));
            let tr_di = di[0][0] + di[1][1];
            let mut ds = [[0.0; 2]; 2];
            for p in 0..2 {
                for q in 0..2 {
                    ds[p][q] = da_j * adj[p][q] - a_j * di[p][q] + da_c * m[p] * m[q];
                }
                ds[p][p] += a_j * tr_di;
            }
            for r in 0..3 {
                for q in 0..2 {
                    let mut v = f[r][0] * ds[0][q] + f[r][1] * ds[1][q];
                    if r == dr {
                        v += s[dq][q];
                    }
                    h[2 * r + q][col] = two_l * v;
                }
            }
        }
        for a in 0..6 {
            for b in 0..a {
                let v = 0.5 * (h[a][b] + h[b][a]);
                h[a][b] = v;
                h[b][a] = v;
            }
        }
        Ok(h)
    }
}

/// Stretching density `λ[1/J + (tr I + s0 C_m + s J/C_m)/(s+1)] − 3`.
pub fn wstr_density(f: &Mat32, m: [f64; 2], s: f64, s0: f64) -> Result<f64> {
    Actuation::new(m, s, s0)?.density(f)
}

/// `∂W_str/∂F` as a 3×2 matrix.
pub fn wstr_gradient(f: &Mat32, m: [f64; 2], s: f64, s0: f64) -> Result<Mat32> {
    Actuation::new(m, s, s0)?.gradient(f)
}

pub fn wstr_hessian(f: &Mat32, m: [f64; 2], s: f64, s0: f64) -> Result<Hess6> {
    Actuation::new(m, s, s0)?.hessian(f)
}

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Neo-classical density with the deformed director eliminated:
/// `λ(tr C + s0/(s+1) m·Cm − s/(s+1) m·C²m / m·Cm) − 3` with `C = FᵀF`.
pub fn w3d_density(f3: &Mat3, m3: [f64; 3], s: f64, s0: f64) -> Result<f64> {
    check_order(s, "s")?;
    check_order(s0, "s0")?;
    let lambda = ((s + 1.0) / (s0 + 1.0)).cbrt();
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|r| f3[r][i] * f3[r][j]).sum();
        }
    }
    let cm: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| c[i][j] * m3[j]).sum());
    let mcm: f64 = (0..3).map(|i| m3[i] * cm[i]).sum();
    if !(mcm > EPS_DET) {
        return Err(Error::Degenerate {
            element: None,
            det: f64::NAN,
            cm: mcm,
        });
    }
    let mc2m: f64 = cm.iter().map(|v| v * v).sum();
    let tr = c[0][0] + c[1][1] + c[2][2];
    Ok(lambda * (tr + s0 / (s + 1.0) * mcm - s / (s + 1.0) * mc2m / mcm) - 3.0)
}

/// `b(F) = (F1 × F2)/|F1 × F2|²` for the columns `F1`, `F2`.
pub fn normal_extension(f: &Mat32) -> Result<[f64; 3]> {
    let n = cross([f[0][0], f[1][0], f[2][0]], [f[0][1], f[1][1], f[2][1]]);
    let n2: f64 = n.iter().map(|v| v * v).sum();
    if !(n2 > EPS_DET) {
        return Err(Error::Degenerate {
            element: None,
            det: n2,
            cm: f64::NAN,
        });
    }
    Ok([n[0] / n2, n[1] / n2, n[2] / n2])
}

/// The 3×3 matrix `[F, b(F)]`.
pub fn extend_gradient(f: &Mat32) -> Result<Mat3> {
    let b = normal_extension(f)?;
    Ok(std::array::from_fn(|r| [f[r][0], f[r][1], b[r]]))
}

/// Step-length tensors `L_m` (reference) and `L_n` (deformed).
#[derive(Clone, Debug, PartialEq)]
pub struct StepLengthTensors {
    pub lm: Mat3,
    pub ln: Mat3,
}

fn uniaxial(scale: f64, a: f64, d: [f64; 3]) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| scale * (f64::from(u8::from(i == j)) + a * d[i] * d[j]))
    })
}

/// `L_m = (s0+1)^(-1/3)(Id + s0 m⊗m)` and `L_n = (s+1)^(-1/3)(Id + s n⊗n)`.
pub fn step_length_tensors(m3: [f64; 3], n3: [f64; 3], s: f64, s0: f64) -> Result<StepLengthTensors> {
    check_order(s, "s")?;
    check_order(s0, "s0")?;
    Ok(StepLengthTensors {
        lm: uniaxial((s0 + 1.0).powf(-1.0 / 3.0), s0, m3),
        ln: uniaxial((s + 1.0).powf(-1.0 / 3.0), s, n3),
    })
}

/// `L_n^{-1/2} [F, b(F)] L_m^{1/2}` with `n = Fm/|Fm|`, whose squared
/// distance to SO(3) bounds the stretching density from both sides.
pub fn reference_strain(f: &Mat32, m: [f64; 2], s: f64, s0: f64) -> Result<Mat3> {
    check_order(s, "s")?;
    check_order(s0, "s0")?;
    let fb = extend_gradient(f)?;
    let fm: [f64; 3] = std::array::from_fn(|r| f[r][0] * m[0] + f[r][1] * m[1]);
    let len = fm.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n = [fm[0] / len, fm[1] / len, fm[2] / len];
    let m3 = [m[0], m[1], 0.0];
    let ln_inv_half = uniaxial((s + 1.0).powf(1.0 / 6.0), 1.0 / (s + 1.0).sqrt() - 1.0, n);
    let lm_half = uniaxial((s0 + 1.0).powf(-1.0 / 6.0), (s0 + 1.0).sqrt() - 1.0, m3);
    Ok(mat3_mul(&mat3_mul(&ln_inv_half, &fb), &lm_half))
}

/// Frobenius distance from `a` to SO(3).
///
/// The singular values come from the symmetric eigendecomposition of `AᵀA`;
/// for `det A < 0` the nearest rotation flips the smallest one.
pub fn so3_distance(a: &Mat3) -> f64 {
    let m = Matrix3::from_fn(|i, j| a[i][j]);
    let eig = SymmetricEigen::new(m.transpose() * m).eigenvalues;
    let mut sv: Vec<f64> = eig.iter().map(|&e| e.max(0.0).sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let sign = if m.determinant() < 0.0 { -1.0 } else { 1.0 };
    ((sv[0] - 1.0).powi(2) + (sv[1] - 1.0).powi(2) + (sv[2] - sign).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{metric_distance, metric_of};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_f(rng: &mut ChaCha8Rng) -> Mat32 {
        loop {
            let f: Mat32 = std::array::from_fn(|_| [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)]);
            let i = first_form(&f);
            if det2(&i) > 0.05 {
                return f;
            }
        }
    }

    fn sqrt_metric(g: &Sym2) -> Mat32 {
        // Square root of a 2×2 SPD matrix padded with a zero row.
        let tr = g[0][0] + g[1][1];
        let sd = det2(g).sqrt();
        let t = (tr + 2.0 * sd).sqrt();
        [
            [(g[0][0] + sd) / t, g[0][1] / t],
            [g[1][0] / t, (g[1][1] + sd) / t],
            [0.0, 0.0],
        ]
    }

    #[test]
    fn identity_cases() {
        let f = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        assert_eq!(wstr_density(&f, [1.0, 0.0], 0.0, 0.0).unwrap(), 0.0);
        let l = (1.1f64 / 2.0).cbrt();
        let w = wstr_density(&f, [1.0, 0.0], 0.1, 1.0).unwrap();
        assert!((w - (l * (1.0 + 3.1 / 1.1) - 3.0)).abs() < 1e-14);
        assert!((w - 0.1283).abs() < 1e-4);
    }

    #[test]
    fn vanishes_on_target_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let t: f64 = rng.random_range(0.0..6.3);
            let m = [t.cos(), t.sin()];
            let s: f64 = rng.random_range(-0.6..2.0);
            let a = Actuation::new(m, s, 1.0).unwrap();
            let f = sqrt_metric(&metric_of(m, a.lambda));
            assert!(a.density(&f).unwrap().abs() < 1e-13);
            let p = a.gradient(&f).unwrap();
            assert!(p.iter().flatten().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn near_zero_density_means_near_target_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let t: f64 = rng.random_range(0.0..6.3);
            let m = [t.cos(), t.sin()];
            let a = Actuation::new(m, rng.random_range(-0.6..2.0), rng.random_range(-0.6..2.0)).unwrap();
            let g = metric_of(m, a.lambda);
            let mut f = sqrt_metric(&g);
            let eps: f64 = if rng.random_bool(0.5) { 1e-8 } else { 1e-2 };
            for row in f.iter_mut() {
                for v in row.iter_mut() {
                    *v += eps * rng.random_range(-1.0..1.0);
                }
            }
            if a.density(&f).unwrap() <= 1e-12 {
                assert!(metric_distance(&first_form(&f), &g) <= 1e-6);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let f = random_f(&mut rng);
            let t: f64 = rng.random_range(0.0..6.3);
            let a = Actuation::new([t.cos(), t.sin()], rng.random_range(-0.5..1.5), rng.random_range(-0.5..1.5)).unwrap();
            let p = a.gradient(&f).unwrap();
            let h = a.hessian(&f).unwrap();
            let eps = 1e-6;
            for q in 0..6 {
                let mut fp = f;
                let mut fm = f;
                fp[q / 2][q % 2] += eps;
                fm[q / 2][q % 2] -= eps;
                let fd = (a.density(&fp).unwrap() - a.density(&fm).unwrap()) / (2.0 * eps);
                assert!((fd - p[q / 2][q % 2]).abs() < 1e-6 * (1.0 + fd.abs()));
                let (gp, gm) = (a.gradient(&fp).unwrap(), a.gradient(&fm).unwrap());
                for r in 0..6 {
                    let fd = (gp[r / 2][r % 2] - gm[r / 2][r % 2]) / (2.0 * eps);
                    assert!((fd - h[r][q]).abs() < 1e-5 * (1.0 + fd.abs()));
                }
            }
        }
    }

    #[test]
    fn degenerate_gradient_rejected() {
        let f = [[1.0, 2.0], [0.0, 0.0], [0.0, 0.0]];
        assert!(matches!(
            wstr_density(&f, [1.0, 0.0], 0.1, 1.0),
            Err(Error::Degenerate { element: None, .. })
        ));
    }

    #[test]
    fn w3d_identity_and_extension() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(w3d_density(&id, [1.0, 0.0, 0.0], 0.0, 0.0).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f = random_f(&mut rng);
            let m = [0.6, 0.8];
            let lhs = wstr_density(&f, m, 0.3, -0.2).unwrap();
            let rhs = w3d_density(&extend_gradient(&f).unwrap(), [0.6, 0.8, 0.0], 0.3, -0.2).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn so3_distance_cases() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(so3_distance(&id) < 1e-15);
        let two = [[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]];
        assert!((so3_distance(&two) - 3f64.sqrt()).abs() < 1e-14);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        assert!(so3_distance(&rot) < 1e-14);
        // A reflection is at distance 2 from SO(3).
        let refl = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!((so3_distance(&refl) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn step_length_tensor_is_spd() {
        let t = step_length_tensors([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.1, 1.0).unwrap();
        let l = Matrix3::from_fn(|i, j| t.lm[i][j]);
        assert!(l.cholesky().is_some());
        assert!((t.lm[0][0] - 2.0 * 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
    }
}
