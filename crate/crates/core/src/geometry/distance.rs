//! Separation distances between spheres, capsules, and oriented boxes.
//!
//! Each primitive is a core shape (point, segment, box) inflated by a radius,
//! so the signed separation is the core distance minus both radii. Overlapping
//! cores report a core distance of zero.

use super::{Primitive, Shape, Transform, Vec3};

#[derive(Clone, Copy, Debug)]
enum Core {
    Point(Vec3),
    Segment(Vec3, Vec3),
    Box { pose: Transform, half: Vec3 },
}

fn core_of(p: &Primitive) -> (Core, f64) {
    match p.shape {
        Shape::Sphere { radius } => (Core::Point(p.pose.translation()), radius),
        Shape::Capsule { radius, length } => {
            let h = Vec3::new(0.0, 0.0, 0.5 * length);
            (
                Core::Segment(p.pose.transform_point(&-h), p.pose.transform_point(&h)),
                radius,
            )
        }
        Shape::Box { size } => (
            Core::Box {
                pose: p.pose,
                half: size * 0.5,
            },
            0.0,
        ),
    }
}

/// Signed separation between two primitives; `≤ 0` on contact or overlap.
pub fn primitive_pair_distance(a: &Primitive, b: &Primitive) -> f64 {
    let (ca, ra) = core_of(a);
    let (cb, rb) = core_of(b);
    core_distance(&ca, &cb) - ra - rb
}

fn core_distance(a: &Core, b: &Core) -> f64 {
    use Core::*;
    match (a, b) {
        (Point(p), Point(q)) => (p - q).norm(),
        (Point(p), Segment(s0, s1)) | (Segment(s0, s1), Point(p)) => (closest_point_on_segment(p, s0, s1) - p).norm(),
        (Segment(a0, a1), Segment(b0, b1)) => segment_segment_distance(a0, a1, b0, b1),
        (Point(p), Box { pose, half }) | (Box { pose, half }, Point(p)) => {
            point_box_distance(&pose.inverse_transform_point(p), half)
        }
        (Segment(s0, s1), Box { pose, half }) | (Box { pose, half }, Segment(s0, s1)) => segment_box_distance(
            &pose.inverse_transform_point(s0),
            &pose.inverse_transform_point(s1),
            half,
        ),
        (Box { .. }, Box { .. }) => gjk::distance(a, b),
    }
}

pub fn closest_point_on_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
    a + d * t
}

/// Distance between segments `[p1, q1]` and `[p2, q2]`.
pub fn segment_segment_distance(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    const EPS: f64 = 1e-18;

    let (s, t) = if a <= EPS && e <= EPS {
        (0.0, 0.0)
    } else if a <= EPS {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= EPS {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s = if denom > EPS * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

/// Distance from `p` (box frame) to the axis-aligned box `[-half, half]`.
pub fn point_box_distance(p: &Vec3, half: &Vec3) -> f64 {
    let mut sq = 0.0;
    for i in 0..3 {
        let excess = p[i].abs() - half[i];
        if excess > 0.0 {
            sq += excess * excess;
        }
    }
    sq.sqrt()
}

/// Distance from segment `[p0, p1]` (box frame) to the box `[-half, half]`.
///
/// The squared distance along the segment is a convex piecewise quadratic
/// whose pieces change only where a coordinate crosses a slab face; each
/// piece is minimized in closed form.
pub fn segment_box_distance(p0: &Vec3, p1: &Vec3, half: &Vec3) -> f64 {
    let d = p1 - p0;
    let mut breaks: [f64; 8] = [0.0; 8];
    breaks[0] = 0.0;
    let mut nb = 1;
    for i in 0..3 {
        if d[i] != 0.0 {
            for bound in [-half[i], half[i]] {
                let t = (bound - p0[i]) / d[i];
                if t > 0.0 && t < 1.0 {
                    breaks[nb] = t;
                    nb += 1;
                }
            }
        }
    }
    breaks[nb] = 1.0;
    nb += 1;
    let breaks = &mut breaks[..nb];
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut best = f64::INFINITY;
    for w in breaks.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let mid = 0.5 * (ta + tb);
        // f(t) = Σ_active (p0_i + t d_i − c_i)² = qa t² + qb t + qc
        let (mut qa, mut qb, mut qc) = (0.0, 0.0, 0.0);
        for i in 0..3 {
            let x = p0[i] + mid * d[i];
            let face = if x > half[i] {
                half[i]
            } else if x < -half[i] {
                -half[i]
            } else {
                continue;
            };
            let off = p0[i] - face;
            qa += d[i] * d[i];
            qb += 2.0 * d[i] * off;
            qc += off * off;
        }
        let t = if qa > 0.0 { (-qb / (2.0 * qa)).clamp(ta, tb) } else { ta };
        let f = (qa * t + qb) * t + qc;
        best = best.min(f.max(0.0));
        if best == 0.0 {
            break;
        }
    }
    best.sqrt()
}

mod gjk {
    //! Gilbert–Johnson–Keerthi distance for the box–box case.
    use super::{Core, Vec3};

    fn support(core: &Core, dir: &Vec3) -> Vec3 {
        match core {
            Core::Point(p) => *p,
            Core::Segment(a, b) => {
                if a.dot(dir) >= b.dot(dir) {
                    *a
                } else {
                    *b
                }
            }
            Core::Box { pose, half } => {
                let local = pose.rotation().inverse_transform_vector(dir);
                let corner = Vec3::new(
                    half.x.copysign(local.x),
                    half.y.copysign(local.y),
                    half.z.copysign(local.z),
                );
                pose.transform_point(&corner)
            }
        }
    }

    fn minkowski_support(a: &Core, b: &Core, dir: &Vec3) -> Vec3 {
        support(a, dir) - support(b, &-dir)
    }

    /// Closest point to the origin on the convex hull of `pts` (≤ 4 points),
    /// returned with the indices of the supporting subset.
    fn closest_on_simplex(pts: &[Vec3]) -> (Vec3, Vec<usize>) {
        let n = pts.len();
        let mut best: Option<(f64, Vec3, Vec<usize>)> = None;
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if let Some(v) = affine_closest(pts, &idx) {
                let d2 = v.norm_squared();
                if best.as_ref().is_none_or(|(b, _, _)| d2 < *b) {
                    best = Some((d2, v, idx));
                }
            }
        }
        let (_, v, idx) = best.expect("single vertices are always feasible");
        (v, idx)
    }

    /// Closest point to the origin in the affine hull of the chosen points,
    /// if it lies inside their convex hull.
    fn affine_closest(pts: &[Vec3], idx: &[usize]) -> Option<Vec3> {
        let p0 = pts[idx[0]];
        let k = idx.len() - 1;
        if k == 0 {
            return Some(p0);
        }
        let edges: Vec<Vec3> = idx[1..].iter().map(|&i| pts[i] - p0).collect();
        // Normal equations (EᵀE) μ = −Eᵀ p0.
        let mut m = nalgebra::DMatrix::<f64>::zeros(k, k);
        let mut rhs = nalgebra::DVector::<f64>::zeros(k);
        for r in 0..k {
            for c in 0..k {
                m[(r, c)] = edges[r].dot(&edges[c]);
            }
            rhs[r] = -edges[r].dot(&p0);
        }
        let scale = m.diagonal().max();
        if m.determinant().abs() <= 1e-14 * scale.powi(k as i32) {
            return None;
        }
        let mu = m.lu().solve(&rhs)?;
        let lambda0 = 1.0 - mu.sum();
        const TOL: f64 = -1e-12;
        if lambda0 < TOL || mu.iter().any(|&x| x < TOL) {
            return None;
        }
        let mut v = p0;
        for (e, &w) in edges.iter().zip(mu.iter()) {
            v += e * w;
        }
        Some(v)
    }

    pub(super) fn distance(a: &Core, b: &Core) -> f64 {
        let mut simplex: Vec<Vec3> = vec![minkowski_support(a, b, &Vec3::x())];
        let mut v = simplex[0];
        for _ in 0..128 {
            let vv = v.norm_squared();
            if vv <= 1e-24 {
                return 0.0;
            }
            let w = minkowski_support(a, b, &-v);
            if vv - v.dot(&w) <= 1e-12 * vv.max(1e-12) {
                break;
            }
            simplex.push(w);
            let (nv, keep) = closest_on_simplex(&simplex);
            simplex = keep.iter().map(|&i| simplex[i]).collect();
            if simplex.len() == 4 {
                return 0.0;
            }
            if nv.norm_squared() >= vv {
                break;
            }
            v = nv;
        }
        v.norm()
    }
}
