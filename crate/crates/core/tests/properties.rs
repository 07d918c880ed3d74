use lcn_core::energy::{interpolate, wstr_density, wstr_gradient, Mat32};
use lcn_core::material::{lambda_of, metric_of, Director, MaterialProgram};
use lcn_core::mesh::{build_edge_topology, generate_square_mesh, CreaseSet, DiagonalPattern, Rect};
use lcn_core::EnergyModel;
use proptest::prelude::*;

/// Rotation of R³ from a unit quaternion built out of four unconstrained numbers.
fn rotation(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
}

fn quaternion() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter("nonzero", |q| q.iter().map(|v| v * v).sum::<f64>() > 0.05)
}

fn full_rank() -> impl Strategy<Value = Mat32> {
    prop::array::uniform3(prop::array::uniform2(-2.0f64..2.0)).prop_filter("rank 2", |f| {
        let i00: f64 = f.iter().map(|r| r[0] * r[0]).sum();
        let i11: f64 = f.iter().map(|r| r[1] * r[1]).sum();
        let i01: f64 = f.iter().map(|r| r[0] * r[1]).sum();
        i00 * i11 - i01 * i01 > 0.05
    })
}

fn order() -> impl Strategy<Value = f64> {
    -0.8f64..3.0
}

fn director() -> impl Strategy<Value = [f64; 2]> {
    (0.0f64..std::f64::consts::TAU).prop_map(|t| [t.cos(), t.sin()])
}

proptest! {
    #[test]
    fn density_is_nonnegative(f in full_rank(), m in director(), s in order(), s0 in order()) {
        prop_assert!(wstr_density(&f, m, s, s0).unwrap() >= -1e-12);
    }

    #[test]
    fn density_is_frame_indifferent(f in full_rank(), q in quaternion(), m in director(), s in order(), s0 in order()) {
        let r = rotation(q);
        let cols: [[f64; 3]; 2] = std::array::from_fn(|j| apply(&r, [f[0][j], f[1][j], f[2][j]]));
        let rf: Mat32 = std::array::from_fn(|i| [cols[0][i], cols[1][i]]);
        let a = wstr_density(&f, m, s, s0).unwrap();
        let b = wstr_density(&rf, m, s, s0).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn director_enters_as_a_line_field(f in full_rank(), m in director(), s in order(), s0 in order()) {
        let a = wstr_density(&f, m, s, s0).unwrap();
        let b = wstr_density(&f, [-m[0], -m[1]], s, s0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        let ga = wstr_gradient(&f, m, s, s0).unwrap();
        let gb = wstr_gradient(&f, [-m[0], -m[1]], s, s0).unwrap();
        for (x, y) in ga.iter().flatten().zip(gb.iter().flatten()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn target_metric_has_the_programmed_spectrum(m in director(), s in order(), s0 in order()) {
        let l = lambda_of(s, s0).unwrap();
        let g = metric_of(m, l);
        let gm = [g[0][0] * m[0] + g[0][1] * m[1], g[1][0] * m[0] + g[1][1] * m[1]];
        prop_assert!((gm[0] - l * l * m[0]).abs() < 1e-12 && (gm[1] - l * l * m[1]).abs() < 1e-12);
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        prop_assert!((det - l).abs() < 1e-12 * l);
        prop_assert_eq!(g[0][1], g[1][0]);
    }

    #[test]
    fn discrete_energy_and_metric_defect_ignore_rigid_motions(
        q in quaternion(),
        shift in prop::array::uniform3(-5.0f64..5.0),
        amp in 0.0f64..0.3,
        m in director(),
    ) {
        let mesh = generate_square_mesh(6, 6, Rect::new(0.0, 0.0, 1.0, 1.0), DiagonalPattern::CrissCross).unwrap();
        let topo = build_edge_topology(&mesh).unwrap();
        let creases = CreaseSet::empty(&mesh, &topo);
        let program = MaterialProgram::uniform(Director::Constant(m), 0.1, 1.0).unwrap();
        let model = EnergyModel::from_program(mesh, topo, &creases, &program, 1.0).unwrap();
        let y = interpolate(model.mesh(), |x| [x[0], x[1], amp * (3.0 * x[0]).sin() * x[1]]);
        let r = rotation(q);
        let moved: Vec<[f64; 3]> = y
            .iter()
            .map(|&p| {
                let v = apply(&r, p);
                [v[0] + shift[0], v[1] + shift[1], v[2] + shift[2]]
            })
            .collect();
        let (a, b) = (y.as_flattened(), moved.as_flattened());
        let (ea, eb) = (model.energy(a).unwrap(), model.energy(b).unwrap());
        prop_assert!((ea.total - eb.total).abs() < 1e-10);
        prop_assert!((model.metric_defect(a) - model.metric_defect(b)).abs() < 1e-10);
    }
}
