use lcn_core::analytic::{degree_3half_heuristic, InitShape, Initialization, LiftedSurface, Profile};
use lcn_core::io::export_obj;
use lcn_core::mesh::{generate_square_mesh, DiagonalPattern, Rect};
use lcn_core::{Error, Result};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const NAMES: &[&str] = &[
    "cone",
    "half",
    "degree2",
    "three_half",
    "three_half_heuristic",
    "disc_bump",
    "table_a",
    "table_b",
    "cube_rhombus",
];

pub struct ProfileArgs {
    pub lambda: f64,
    pub a: f64,
    pub amplitude: Option<f64>,
    pub n: usize,
    pub bounds: Option<[f64; 4]>,
}

enum Sampler {
    Surface(LiftedSurface),
    Heuristic { a: f64, lambda: f64 },
    Init(Initialization),
}

impl Sampler {
    fn eval(&self, x: [f64; 2]) -> Result<([f64; 3], Option<f64>)> {
        match self {
            Sampler::Surface(s) => Ok((s.eval(x)?, s.metric_residual(x).ok())),
            Sampler::Heuristic { a, lambda } => {
                let k = lambda.powf(-0.5);
                let z = [k * x[0], k * x[1]];
                Ok(([z[0], z[1], degree_3half_heuristic(*a, *lambda, z)?], None))
            }
            Sampler::Init(i) => Ok((i.eval(x), None)),
        }
    }
}

fn sampler(name: &str, args: &ProfileArgs) -> Result<(Sampler, [f64; 4])> {
    let surface = |p: Profile| LiftedSurface::new(p, args.lambda).map(Sampler::Surface);
    // Approximate profiles are sampled in a box around their anchor point.
    let ax = args.a * args.lambda.sqrt();
    let around_anchor = [0.5 * ax, -0.5 * ax, 1.5 * ax, 0.5 * ax];
    Ok(match name {
        "cone" => (surface(Profile::Cone)?, [-1.0, -1.0, 1.0, 1.0]),
        "half" => (surface(Profile::Half)?, [-1.0, -1.0, 1.0, 1.0]),
        "degree2" => (surface(Profile::Degree2 { a: args.a })?, around_anchor),
        "three_half" => (surface(Profile::ThreeHalf { a: args.a })?, around_anchor),
        "three_half_heuristic" => {
            LiftedSurface::new(Profile::ThreeHalf { a: args.a }, args.lambda)?;
            (
                Sampler::Heuristic {
                    a: args.a,
                    lambda: args.lambda,
                },
                around_anchor,
            )
        }
        other => {
            let shape: InitShape = other.parse()?;
            let bounds = match shape {
                InitShape::TableA => [0.0, 0.0, 1.0, 2.0],
                InitShape::TableB | InitShape::Flat => [0.0, 0.0, 1.0, 1.0],
                InitShape::CubeRhombus => [0.0, 0.0, 3f64.sqrt(), 2.0],
                InitShape::DiscBump => [-1.0, -1.0, 1.0, 1.0],
            };
            let init = match args.amplitude {
                Some(a) => Initialization::with_amplitude(shape, a),
                None => Initialization::new(shape),
            };
            (Sampler::Init(init), bounds)
        }
    })
}

/// Samples the named profile on an `n × n` lattice and writes
/// `<name>.csv` and `<name>.obj` into `dir`.
pub fn sample_profile(name: &str, args: &ProfileArgs, dir: &Path) -> Result<Vec<PathBuf>> {
    let (sampler, default_bounds) = sampler(name, args)?;
    let [x0, y0, x1, y1] = args.bounds.unwrap_or(default_bounds);
    let mesh = generate_square_mesh(args.n, args.n, Rect::new(x0, y0, x1, y1), DiagonalPattern::CrissCross)?;
    let mut points = Vec::with_capacity(mesh.num_vertices());
    let mut residuals = Vec::with_capacity(mesh.num_vertices());
    for &x in &mesh.vertices {
        let (y, r) = sampler
            .eval(x)
            .map_err(|e| Error::InvalidArgument(format!("{name} at {x:?}: {e}")))?;
        points.push(y);
        residuals.push(r);
    }
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    let mut w = BufWriter::new(File::create(&csv)?);
    writeln!(w, "x1,x2,y1,y2,y3,metric_residual")?;
    for ((x, y), r) in mesh.vertices.iter().zip(&points).zip(&residuals) {
        let r = r.map(|v| format!("{v:.17e}")).unwrap_or_default();
        writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{r}", x[0], x[1], y[0], y[1], y[2])?;
    }
    w.flush()?;
    let obj = dir.join(format!("{name}.obj"));
    let mut w = BufWriter::new(File::create(&obj)?);
    export_obj(&mut w, &mesh, &points, true)?;
    w.flush()?;
    Ok(vec![csv, obj])
}
