//! Small fixed-size vector helpers. Points are stored with three
//! components; 2D meshes keep `z = 0`.

pub type Point = [f64; 3];

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Unsigned angle between two vectors in `[0, π]`, computed with `atan2`
/// so that it stays accurate near `0` and `π`.
pub fn angle_between(a: &Point, b: &Point) -> f64 {
    norm(&cross(a, b)).atan2(dot(a, b))
}

/// Signed measure of the simplex spanned by `pts` (area in 2D, volume in 3D).
pub fn signed_measure(dim: usize, pts: &[Point]) -> f64 {
    let e1 = sub(&pts[1], &pts[0]);
    let e2 = sub(&pts[2], &pts[0]);
    match dim {
        2 => 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]),
        3 => {
            let e3 = sub(&pts[3], &pts[0]);
            dot(&e1, &cross(&e2, &e3)) / 6.0
        }
        _ => unreachable!("dimension validated at construction"),
    }
}
