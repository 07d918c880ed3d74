//! Planar geometry helpers shared by the mesh and material code.

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Twice the signed area of the triangle `abc`.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

pub fn signed_area(t: &[Point; 3]) -> f64 {
    0.5 * orient(t[0], t[1], t[2])
}

pub fn centroid(t: &[Point; 3]) -> Point {
    [
        (t[0][0] + t[1][0] + t[2][0]) / 3.0,
        (t[0][1] + t[1][1] + t[2][1]) / 3.0,
    ]
}

/// Longest edge length.
pub fn diameter(t: &[Point; 3]) -> f64 {
    dist(t[0], t[1]).max(dist(t[1], t[2])).max(dist(t[2], t[0]))
}

/// Ratio of circumradius to inradius; 2 for an equilateral triangle.
pub fn radius_ratio(t: &[Point; 3]) -> f64 {
    let a = dist(t[1], t[2]);
    let b = dist(t[2], t[0]);
    let c = dist(t[0], t[1]);
    let area = signed_area(t).abs();
    let s = 0.5 * (a + b + c);
    a * b * c * s / (4.0 * area * area)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Point inside or on the boundary of a counterclockwise triangle.
pub fn point_in_triangle(p: Point, t: &[Point; 3]) -> bool {
    orient(t[0], t[1], p) >= 0.0 && orient(t[1], t[2], p) >= 0.0 && orient(t[2], t[0], p) >= 0.0
}

/// Euclidean distance between a segment and a (closed, ccw) triangle.
pub fn segment_triangle_distance(a: Point, b: Point, t: &[Point; 3]) -> f64 {
    if point_in_triangle(a, t) || point_in_triangle(b, t) {
        return 0.0;
    }
    let mut d = f64::INFINITY;
    for i in 0..3 {
        let (p, q) = (t[i], t[(i + 1) % 3]);
        if segments_intersect(a, b, p, q) {
            return 0.0;
        }
        d = d
            .min(point_segment_distance(p, a, b))
            .min(point_segment_distance(a, p, q))
            .min(point_segment_distance(b, p, q));
    }
    d
}

/// Even-odd test with boundary points counted as inside (within `tol`).
pub fn point_in_polygon(p: Point, poly: &[Point], tol: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        if point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= tol {
            return true;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi[1] > p[1]) != (pj[1] > p[1]) {
            let x = pj[0] + (p[1] - pj[1]) * (pi[0] - pj[0]) / (pi[1] - pj[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| cross(poly[i], poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}
