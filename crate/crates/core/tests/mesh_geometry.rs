use std::collections::VecDeque;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cutstokes::assembly::Discretization;
use cutstokes::geometry::quadrature::{boundary_quadrature, interface_quadrature, polygon_area, subpolygon_quadrature};
use cutstokes::geometry::{classify, intersect_triangle, CutCase, LevelSet, Side, SNAP_TOLERANCE};
use cutstokes::mesh::{build_structured_mesh, face_path_bfs, uniform_refine, Point, Rect, TriMesh};

const AREA_TOL: f64 = 1e-12;
const ROUNDOFF: f64 = 1e-14;

fn unit() -> Rect {
    Rect::new(0.0, 0.0, 1.0, 1.0).unwrap()
}

/// Face-graph distances from `start` by a plain queue search.
fn distances(mesh: &TriMesh, start: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; mesh.n_triangles()];
    d[start] = 0;
    let mut q = VecDeque::from([start]);
    while let Some(t) = q.pop_front() {
        for f in &mesh.triangle_faces[t] {
            if let Some(m) = mesh.faces[*f].other(t) {
                if d[m] == usize::MAX {
                    d[m] = d[t] + 1;
                    q.push_back(m);
                }
            }
        }
    }
    d
}

fn centroid(mesh: &TriMesh, t: usize) -> Point {
    let p = mesh.points(t);
    [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
}

/// Five-point Gauss-Legendre on [0, 1], exact to degree 9.
fn gl5() -> [(f64, f64); 5] {
    let a = 1.0 / 3.0 * (5.0f64 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt();
    let b = 1.0 / 3.0 * (5.0f64 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt();
    let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
    [(-b, wb), (-a, wa), (0.0, 128.0 / 225.0), (a, wa), (b, wb)].map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
}

/// `∫ x^i y^j` over a counter-clockwise polygon by the divergence theorem.
fn green_monomial(poly: &[Point], i: i32, j: i32) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        let dy = b[1] - a[1];
        for (t, w) in gl5() {
            let x = a[0] + t * (b[0] - a[0]);
            let y = a[1] + t * dy;
            s += w * x.powi(i + 1) * y.powi(j) / (i + 1) as f64 * dy;
        }
    }
    s
}

#[test]
fn four_by_four_mesh_size() {
    let m = build_structured_mesh(unit(), 4, 4).unwrap();
    assert_eq!((m.n_triangles(), m.n_vertices(), m.faces.len()), (32, 25, 56));
    assert_eq!(m.faces.iter().filter(|f| f.is_boundary()).count(), 16);
    assert!((m.h_max - 2f64.sqrt() / 4.0).abs() < ROUNDOFF);
    assert!(m.check_invariants().is_ok());
}

#[test]
fn too_few_cells_rejected() {
    assert!(build_structured_mesh(unit(), 1, 1).is_err());
    assert!(build_structured_mesh(unit(), 1, 4).is_err());
    assert!(Rect::new(0.0, 0.0, 0.0, 1.0).is_err());
}

#[test]
fn no_triangle_has_two_boundary_faces() {
    for (nx, ny) in [(2, 2), (3, 5), (8, 8), (17, 6)] {
        let m = build_structured_mesh(unit(), nx, ny).unwrap();
        assert!((0..m.n_triangles()).all(|t| m.boundary_faces(t).count() < 2), "{nx}x{ny}");
    }
}

#[test]
fn refinement_counts() {
    let m = build_structured_mesh(unit(), 4, 4).unwrap();
    let (r, map) = uniform_refine(&m).unwrap();
    assert_eq!((r.n_triangles(), r.n_vertices()), (128, 81));
    assert!(r.check_invariants().is_ok());
    assert!((r.h_max - 0.5 * m.h_max).abs() < ROUNDOFF);
    for (p, kids) in map.children.iter().enumerate() {
        for &k in kids {
            assert!((r.area(k) - m.area(p) / 4.0).abs() < ROUNDOFF);
            assert_eq!(map.parent[k], p);
        }
    }
}

#[test]
fn bfs_left_half_from_right_corner() {
    let m = build_structured_mesh(unit(), 4, 4).unwrap();
    let start = (0..m.n_triangles())
        .max_by(|&a, &b| centroid(&m, a)[0].partial_cmp(&centroid(&m, b)[0]).unwrap())
        .unwrap();
    let left = |t: usize| centroid(&m, t)[0] < 0.5;
    let (target, path) = face_path_bfs(&m, start, left).unwrap();
    let d = distances(&m, start);
    let best = (0..m.n_triangles()).filter(|&t| left(t)).map(|t| d[t]).min().unwrap();
    assert_eq!(path.len(), best);
    assert!(left(target));
    assert_eq!(d[target], best);
}

#[test]
fn bfs_one_step() {
    let m = build_structured_mesh(unit(), 4, 4).unwrap();
    let (t, f) = m.neighbours(5).next().unwrap();
    let (target, path) = face_path_bfs(&m, 5, |k| k == t).unwrap();
    assert_eq!((target, path), (t, vec![f]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mesh_areas_sum_to_domain(nx in 2usize..20, ny in 2usize..20, x0 in -2.0f64..2.0, y0 in -2.0f64..2.0,
                                w in 0.1f64..5.0, h in 0.1f64..5.0) {
        let dom = Rect::new(x0, y0, x0 + w, y0 + h).unwrap();
        let m = build_structured_mesh(dom, nx, ny).unwrap();
        let total: f64 = (0..m.n_triangles()).map(|t| m.area(t)).sum();
        prop_assert!((total - dom.area()).abs() <= AREA_TOL * dom.area());
        prop_assert!((0..m.n_triangles()).all(|t| m.area(t) > 0.0));
    }

    #[test]
    fn bfs_matches_exhaustive_search(nx in 2usize..=10, ny in 2usize..=10, seed in any::<u64>(), density in 0.02f64..0.5) {
        let m = build_structured_mesh(unit(), nx, ny).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let adm: Vec<bool> = (0..m.n_triangles()).map(|_| rng.random_bool(density)).collect();
        prop_assume!(adm.iter().any(|&a| a));
        let start = rng.random_range(0..m.n_triangles());
        let (target, path) = face_path_bfs(&m, start, |t| adm[t]).unwrap();
        let d = distances(&m, start);
        let best = (0..m.n_triangles()).filter(|&t| adm[t]).min_by_key(|&t| (d[t], t)).unwrap();
        prop_assert_eq!(target, best);
        prop_assert_eq!(path.len(), d[best]);
        let mut cur = start;
        for f in path {
            cur = m.faces[f].other(cur).unwrap();
        }
        prop_assert_eq!(cur, target);
    }

    #[test]
    fn cut_parts_partition_the_triangle(
        p in prop::array::uniform3(prop::array::uniform2(-1.0f64..1.0)),
        c in -1.0f64..1.0, kind in 0u8..3, r in 0.2f64..1.5,
    ) {
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        prop_assume!(area.abs() > 1e-3);
        let tri = if area > 0.0 { p } else { [p[0], p[2], p[1]] };
        let phi = match kind {
            0 => LevelSet::VerticalLine { x: c },
            1 => LevelSet::HorizontalLine { y: c },
            _ => LevelSet::Circle { center: [c, 0.3], radius: r },
        };
        let Ok(ce) = intersect_triangle(&tri, &phi, SNAP_TOLERANCE) else { return Ok(()) };
        let parts = [polygon_area(&ce.subpolygons[0]), polygon_area(&ce.subpolygons[1])];
        prop_assert!(parts[0] >= 0.0 && parts[1] >= 0.0);
        prop_assert!((parts[0] + parts[1] - area.abs()).abs() <= AREA_TOL * area.abs());
        let h2 = ce.h * ce.h;
        prop_assert!((ce.alpha[0] + ce.alpha[1] - area.abs() / h2).abs() <= AREA_TOL * area.abs() / h2);
        if ce.is_cut() {
            prop_assert!(ce.alpha[0] > 0.0 && ce.alpha[1] > 0.0);
            let [a, b] = ce.segment.unwrap();
            let n = ce.segment_normal.unwrap();
            prop_assert!(((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-12);
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let step = 1e-3 * ce.h;
            // towards side two the level set grows, unless the element does
            // not resolve the interface (an edge crossed twice flips the chord)
            let resolved = (0..3).all(|k| !phi.crosses_twice(tri[k], tri[(k + 1) % 3]));
            prop_assert!(!resolved || phi.value([mid[0] + step * n[0], mid[1] + step * n[1]]) > phi.value([mid[0] - step * n[0], mid[1] - step * n[1]]));
        }
    }

    #[test]
    fn cut_quadrature_is_exact(
        p in prop::array::uniform3(prop::array::uniform2(-1.0f64..1.0)),
        c in -0.5f64..0.5, i in 0i32..=4, j in 0i32..=4,
    ) {
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        prop_assume!(area.abs() > 1e-2 && i + j <= 4);
        let tri = if area > 0.0 { p } else { [p[0], p[2], p[1]] };
        let ce = intersect_triangle(&tri, &LevelSet::VerticalLine { x: c }, SNAP_TOLERANCE).unwrap();
        for poly in &ce.subpolygons {
            let rule = subpolygon_quadrature(poly, 4).unwrap();
            let a = polygon_area(poly);
            if rule.is_empty() {
                continue;
            }
            prop_assert!(rule.weights.iter().all(|&w| w > 0.0));
            prop_assert!((rule.measure() - a).abs() <= AREA_TOL * area.abs());
            let q = rule.integrate(|x| x[0].powi(i) * x[1].powi(j));
            let exact = green_monomial(poly, i, j);
            prop_assert!((q - exact).abs() <= 1e-12 * area.abs().max(exact.abs()), "{} vs {}", q, exact);
        }
    }
}

#[test]
fn quarter_cut_of_unit_triangle() {
    let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let ce = intersect_triangle(&tri, &LevelSet::VerticalLine { x: 0.25 }, SNAP_TOLERANCE).unwrap();
    assert_eq!(ce.case, CutCase::Cut);
    let mut seg = ce.segment.unwrap().to_vec();
    seg.sort_by(|a, b| a[1].partial_cmp(&b[1]).unwrap());
    assert!((seg[0][0] - 0.25).abs() < ROUNDOFF && seg[0][1].abs() < ROUNDOFF);
    assert!((seg[1][0] - 0.25).abs() < ROUNDOFF && (seg[1][1] - 0.75).abs() < ROUNDOFF);
    assert!((polygon_area(&ce.subpolygons[0]) - 0.21875).abs() < ROUNDOFF);
    assert!((polygon_area(&ce.subpolygons[1]) - 0.28125).abs() < ROUNDOFF);
    // ∫ x over x < 1/4 is ∫_0^{1/4} x (1 - x) dx = 5/192
    let rule = subpolygon_quadrature(&ce.subpolygons[0], 2).unwrap();
    assert!((rule.integrate(|x| x[0]) - 5.0 / 192.0).abs() < ROUNDOFF);
    assert!((rule.measure() - 0.21875).abs() < ROUNDOFF);
}

#[test]
fn unit_triangle_far_line_and_edge_line() {
    let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let ce = intersect_triangle(&tri, &LevelSet::VerticalLine { x: 2.0 }, SNAP_TOLERANCE).unwrap();
    assert_eq!(ce.case, CutCase::Interior(Side::One));
    assert!((ce.alpha[0] - 0.5 / 2.0).abs() < ROUNDOFF && ce.alpha[1] == 0.0);
    let ce = intersect_triangle(&tri, &LevelSet::VerticalLine { x: 0.0 }, SNAP_TOLERANCE).unwrap();
    assert!(matches!(ce.case, CutCase::EdgeAligned { side: Side::Two, .. }));
}

#[test]
fn line_rules() {
    let r = interface_quadrature([[0.0, 0.0], [0.6, 0.45]], 3);
    assert!((r.measure() - 0.75).abs() < ROUNDOFF);
    // two points integrate cubics in the arclength
    let s = |x: Point| (x[0] * x[0] + x[1] * x[1]).sqrt();
    assert!((r.integrate(|x| s(x).powi(3)) - 0.75f64.powi(4) / 4.0).abs() < ROUNDOFF);
    // constant prescribed curvature over a chord
    let ck = interface_quadrature([[0.5, 0.0], [0.0, 0.5]], 3);
    assert!((ck.integrate(|_| 2.0) - 2.0 * 0.5 * 2f64.sqrt()).abs() < ROUNDOFF);

    let phi = LevelSet::VerticalLine { x: 0.03 };
    let (r1, r2) = boundary_quadrature([0.0, 0.0], [0.1, 0.0], &phi, 3);
    assert!((r1.measure() - 0.03).abs() < ROUNDOFF && (r2.measure() - 0.07).abs() < ROUNDOFF);
    let (r1, r2) = boundary_quadrature([0.0, 0.0], [0.1, 0.0], &LevelSet::VerticalLine { x: 0.05 }, 3);
    assert!((r1.measure() - r2.measure()).abs() < ROUNDOFF);
    let (r1, r2) = boundary_quadrature([0.0, 0.0], [0.1, 0.0], &LevelSet::VerticalLine { x: -1.0 }, 3);
    assert!(r1.is_empty() && (r2.measure() - 0.1).abs() < ROUNDOFF);
}

#[test]
fn aligned_line_gives_only_edges() {
    let m = build_structured_mesh(unit(), 8, 8).unwrap();
    let cls = classify(&m, &LevelSet::VerticalLine { x: 0.5 }).unwrap();
    assert!(!cls.k_gamma.is_empty());
    assert!(cls.k_gamma.iter().all(|&t| matches!(cls.element(t).case, CutCase::EdgeAligned { .. })));
    // each chord owned once
    assert_eq!(cls.interface.len(), 8);
}

#[test]
fn interface_outside_domain() {
    let m = build_structured_mesh(unit(), 6, 6).unwrap();
    let cls = classify(&m, &LevelSet::Circle { center: [3.0, 3.0], radius: 0.5 }).unwrap();
    assert!(cls.k_gamma.is_empty() && cls.interface.is_empty());
    assert!(cls.in_side[1].iter().all(|&b| b) && cls.in_side[0].iter().all(|&b| !b));
}

#[test]
fn circle_chords_approach_circumference() {
    let r = 0.3;
    let mut last = 0.0;
    for n in [8, 16, 32, 64] {
        let m = build_structured_mesh(unit(), n, n).unwrap();
        let cls = classify(&m, &LevelSet::Circle { center: [0.5, 0.5], radius: r }).unwrap();
        let total: f64 = cls.interface.iter().map(|s| s.length).sum();
        let h = m.h_max;
        // a chord of length l under the arc loses at most l^3 / (24 r^2)
        assert!(total <= 2.0 * std::f64::consts::PI * r + ROUNDOFF);
        assert!(total >= 2.0 * std::f64::consts::PI * r * (1.0 - h * h / (24.0 * r * r)), "n={n}");
        assert!(total > last);
        last = total;
    }
}

#[test]
fn ghost_face_sets_differ_between_meshes() {
    let d = Discretization::new(unit(), 5, 5, LevelSet::Circle { center: [0.5, 0.5], radius: 0.3 }).unwrap();
    for i in 0..2 {
        assert_ne!(d.pressure_cls.faces_gamma[i].len(), d.velocity_cls.faces_gamma[i].len());
        for &f in &d.velocity_cls.faces_gamma[i] {
            assert!(!d.velocity_mesh.faces[f].is_boundary());
        }
    }
}

#[test]
fn global_partition_random_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let phi = LevelSet::Circle {
        center: [rng.random_range(0.4..0.6), rng.random_range(0.4..0.6)],
        radius: rng.random_range(0.2..0.3),
    };
    let m = build_structured_mesh(unit(), 24, 24).unwrap();
    let cls = classify(&m, &phi).unwrap();
    let mut sides = [0.0; 2];
    for t in 0..m.n_triangles() {
        for i in 0..2 {
            sides[i] += polygon_area(&cls.element(t).subpolygons[i]);
        }
    }
    assert!((sides[0] + sides[1] - 1.0).abs() < AREA_TOL);
    // side-one area against sampling; the chords cut off at most
    // perimeter * sagitta of the disc
    let n = 200_000;
    let hits = (0..n).filter(|_| phi.value([rng.random(), rng.random()]) < 0.0).count() as f64 / n as f64;
    let LevelSet::Circle { radius, .. } = phi else { unreachable!() };
    let sagitta = m.h_max * m.h_max / (8.0 * radius);
    let tol = 5.0 * (hits * (1.0 - hits) / n as f64).sqrt() + 2.0 * std::f64::consts::PI * radius * sagitta;
    assert!((sides[0] - hits).abs() < tol, "{} vs {hits}", sides[0]);
}
