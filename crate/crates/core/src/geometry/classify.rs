use std::collections::{BTreeMap, BTreeSet};

use super::{cut_with_values, CutCase, CutElement, LevelSet, Side, SNAP_TOLERANCE};
use crate::error::{Error, Result};
use crate::mesh::{dist, face_path_bfs, Point, TriMesh};

/// A piece of the discrete interface together with the triangles that
/// provide the side-one and side-two traces on it.
///
/// For a cut triangle both entries of `elements` are that triangle. On a
/// mesh edge lying on the interface they are the two neighbours, and the
/// side-two triangle `owner` carries the segment.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSegment {
    pub elements: [usize; 2],
    pub owner: usize,
    pub points: [Point; 2],
    /// Chord normal from side one into side two.
    pub normal: Point,
    pub length: f64,
}

impl InterfaceSegment {
    pub fn is_edge(&self) -> bool {
        self.elements[0] != self.elements[1]
    }
}

#[derive(Debug, Clone)]
pub struct CutClassification {
    pub elements: Vec<CutElement>,
    /// Level-set values at mesh vertices after snapping.
    pub vertex_values: Vec<f64>,
    /// Triangles meeting the interface along a segment (cut or edge-aligned).
    pub k_gamma: Vec<usize>,
    /// Uncut triangles with at least two faces shared with `k_gamma`.
    pub k_tilde: Vec<usize>,
    /// Triangles with a boundary face.
    pub k_boundary: Vec<usize>,
    /// `in_side[i][t]`: triangle `t` carries side-`i` degrees of freedom.
    pub in_side: [Vec<bool>; 2],
    /// Triangles inside side `i` and not in `k_tilde`.
    pub omega: [Vec<bool>; 2],
    /// Ghost-penalty faces per side (sorted face indices).
    pub faces_gamma: [Vec<usize>; 2],
    /// For each interface triangle and side: the nearest triangle entirely
    /// in that side and the faces crossed to reach it.
    pub closest_interior: BTreeMap<usize, [(usize, Vec<usize>); 2]>,
    /// How many cut boundary triangles map to each interior triangle.
    pub n_ki: [BTreeMap<usize, usize>; 2],
    pub max_n: usize,
    pub c_q: f64,
    pub interface: Vec<InterfaceSegment>,
    /// Non-fatal geometric notes (e.g. edges the interface crosses twice).
    pub warnings: Vec<String>,
}

impl CutClassification {
    pub fn element(&self, t: usize) -> &CutElement {
        &self.elements[t]
    }

    pub fn is_boundary(&self, t: usize) -> bool {
        self.k_boundary.binary_search(&t).is_ok()
    }

    /// Strictly inside side `i`, including edge-aligned triangles.
    pub fn is_inside(&self, t: usize, side: Side) -> bool {
        match self.elements[t].case {
            CutCase::Interior(s) => s == side,
            CutCase::EdgeAligned { side: s, .. } => s == side,
            CutCase::Cut => false,
        }
    }

    /// Faces crossed on the way from cut boundary triangles to their
    /// interior neighbours, for side `i`.
    pub fn boundary_path_faces(&self, side: Side, mesh: &TriMesh) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (&t, paths) in &self.closest_interior {
            if self.elements[t].is_cut() && mesh.boundary_faces(t).next().is_some() {
                out.extend(paths[side.index()].1.iter().copied());
            }
        }
        out
    }
}

/// Classify all triangles of `mesh` against `phi`.
pub fn classify(mesh: &TriMesh, phi: &LevelSet) -> Result<CutClassification> {
    let nt = mesh.n_triangles();
    let tol = SNAP_TOLERANCE * mesh.h_min;
    let vertex_values: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|&x| {
            let v = phi.value(x);
            if v.abs() < tol {
                0.0
            } else {
                v
            }
        })
        .collect();

    let mut elements = Vec::with_capacity(nt);
    for t in 0..nt {
        let tri = mesh.triangles[t];
        let s = [vertex_values[tri[0]], vertex_values[tri[1]], vertex_values[tri[2]]];
        let mut ce = cut_with_values(&mesh.points(t), s, phi, Some(t))?;
        let bl: f64 = mesh.boundary_faces(t).map(|f| mesh.face_length(f)).sum();
        ce.gamma_boundary = bl / ce.h;
        elements.push(ce);
    }

    let mut warnings = Vec::new();
    for (f, face) in mesh.faces.iter().enumerate() {
        let (a, b) = (mesh.vertices[face.vertices[0]], mesh.vertices[face.vertices[1]]);
        if phi.crosses_twice(a, b) {
            warnings.push(format!("interface crosses face {f} twice between its end points"));
        }
    }

    let k_gamma: Vec<usize> = (0..nt).filter(|&t| elements[t].on_interface()).collect();
    let in_gamma = {
        let mut v = vec![false; nt];
        for &t in &k_gamma {
            v[t] = true;
        }
        v
    };
    let k_tilde: Vec<usize> = (0..nt)
        .filter(|&t| !in_gamma[t])
        .filter(|&t| mesh.neighbours(t).filter(|&(n, _)| in_gamma[n]).count() >= 2)
        .collect();
    let k_boundary: Vec<usize> = (0..nt)
        .filter(|&t| mesh.boundary_faces(t).next().is_some())
        .collect();

    let in_side = [Side::One, Side::Two].map(|side| {
        (0..nt)
            .map(|t| match elements[t].case {
                CutCase::Interior(s) => s == side,
                _ => true,
            })
            .collect::<Vec<bool>>()
    });
    let mut omega = [vec![false; nt], vec![false; nt]];
    for side in Side::BOTH {
        for t in 0..nt {
            let inside = match elements[t].case {
                CutCase::Interior(s) | CutCase::EdgeAligned { side: s, .. } => s == side,
                CutCase::Cut => false,
            };
            omega[side.index()][t] = inside;
        }
        for &t in &k_tilde {
            omega[side.index()][t] = false;
        }
    }

    // ghost-penalty faces
    let mut patch_faces = BTreeSet::new();
    for &t in k_gamma.iter().chain(&k_tilde) {
        patch_faces.extend(mesh.triangle_faces[t].iter().copied());
    }
    let mut faces_gamma = [Vec::new(), Vec::new()];
    for &f in &patch_faces {
        let face = &mesh.faces[f];
        if face.is_boundary() {
            continue;
        }
        let (va, vb) = (vertex_values[face.vertices[0]], vertex_values[face.vertices[1]]);
        let on_gamma = va == 0.0 && vb == 0.0;
        if va < 0.0 || vb < 0.0 || on_gamma {
            faces_gamma[0].push(f);
        }
        if va > 0.0 || vb > 0.0 || on_gamma {
            faces_gamma[1].push(f);
        }
    }

    // nearest interior triangles
    let mut closest_interior = BTreeMap::new();
    for &t in &k_gamma {
        let mut paths: [(usize, Vec<usize>); 2] = Default::default();
        for side in Side::BOTH {
            let admissible = |m: usize| match elements[m].case {
                CutCase::Interior(s) | CutCase::EdgeAligned { side: s, .. } => s == side,
                CutCase::Cut => false,
            };
            paths[side.index()] = face_path_bfs(mesh, t, admissible).map_err(|_| {
                Error::assumption(
                    format!("no triangle entirely in side {} is reachable", side.index() + 1),
                    Some(t),
                )
            })?;
        }
        closest_interior.insert(t, paths);
    }

    let mut n_ki: [BTreeMap<usize, usize>; 2] = Default::default();
    let mut c_q = 1.0f64;
    for (&t, paths) in &closest_interior {
        let boundary = mesh.boundary_faces(t).next().is_some();
        for side in Side::BOTH {
            let (target, ref faces) = paths[side.index()];
            let inside = match elements[t].case {
                CutCase::EdgeAligned { side: s, .. } => s == side,
                _ => false,
            };
            if boundary && !inside {
                *n_ki[side.index()].entry(target).or_insert(0) += 1;
            }
            c_q = c_q.max(mesh.area(t) / mesh.area(target));
            for &f in faces {
                c_q = c_q.max(mesh.area(t) / (mesh.face_length(f) * mesh.h_max));
            }
        }
    }
    let max_n = n_ki.iter().flat_map(|m| m.values().copied()).max().unwrap_or(0);

    // interface pieces
    let mut interface = Vec::new();
    for &t in &k_gamma {
        let ce = &elements[t];
        if ce.is_cut() {
            let pts = ce.segment.expect("cut triangles have a chord");
            interface.push(InterfaceSegment {
                elements: [t, t],
                owner: t,
                points: pts,
                normal: ce.segment_normal.expect("chord normal"),
                length: dist(pts[0], pts[1]),
            });
        }
    }
    for (f, face) in mesh.faces.iter().enumerate() {
        let (va, vb) = (vertex_values[face.vertices[0]], vertex_values[face.vertices[1]]);
        if va != 0.0 || vb != 0.0 {
            continue;
        }
        let Some(other) = face.elements.1 else {
            warnings.push(format!("boundary face {f} lies on the interface"));
            continue;
        };
        let pair = [face.elements.0, other];
        let side_of = |t: usize| match elements[t].case {
            CutCase::EdgeAligned { side, .. } => Some(side),
            _ => None,
        };
        match (side_of(pair[0]), side_of(pair[1])) {
            (Some(s0), Some(s1)) if s0 != s1 => {
                let (t1, t2) = if s0 == Side::One { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
                let ce = &elements[t2];
                let pts = ce.segment.expect("edge-aligned triangles have a segment");
                interface.push(InterfaceSegment {
                    elements: [t1, t2],
                    owner: t2,
                    points: pts,
                    normal: ce.segment_normal.expect("segment normal"),
                    length: dist(pts[0], pts[1]),
                });
            }
            _ => warnings.push(format!("interface touches face {f} without separating sides")),
        }
    }
    interface.sort_by_key(|s| (s.owner, s.elements[0]));

    Ok(CutClassification {
        elements,
        vertex_values,
        k_gamma,
        k_tilde,
        k_boundary,
        in_side,
        omega,
        faces_gamma,
        closest_interior,
        n_ki,
        max_n,
        c_q,
        interface,
        warnings,
    })
}

/// One failed geometric assumption.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub element: usize,
    pub what: String,
}

/// Everything [`check_assumptions`] found.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssumptionReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl AssumptionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every triangle instead of stopping at the first failure like
/// [`classify`] does.
pub fn check_assumptions(mesh: &TriMesh, phi: &LevelSet) -> AssumptionReport {
    let mut report = AssumptionReport::default();
    for t in 0..mesh.n_triangles() {
        if mesh.boundary_faces(t).count() >= 2 {
            report.violations.push(Violation {
                element: t,
                what: "two edges on the boundary".into(),
            });
        }
    }
    match classify(mesh, phi) {
        Ok(cls) => report.warnings = cls.warnings,
        Err(_) => {
            let tol = SNAP_TOLERANCE * mesh.h_min;
            let values: Vec<f64> = mesh
                .vertices
                .iter()
                .map(|&x| {
                    let v = phi.value(x);
                    if v.abs() < tol {
                        0.0
                    } else {
                        v
                    }
                })
                .collect();
            let mut elements = Vec::with_capacity(mesh.n_triangles());
            for (t, tri) in mesh.triangles.iter().enumerate() {
                let s = tri.map(|v| values[v]);
                match cut_with_values(&mesh.points(t), s, phi, Some(t)) {
                    Ok(ce) => elements.push(Some(ce)),
                    Err(e) => {
                        report.violations.push(Violation {
                            element: t,
                            what: e.to_string(),
                        });
                        elements.push(None);
                    }
                }
            }
            for t in 0..elements.len() {
                let Some(ce) = &elements[t] else { continue };
                if !ce.on_interface() {
                    continue;
                }
                for side in Side::BOTH {
                    let admissible = |m: usize| match elements[m].as_ref().map(|e| e.case) {
                        Some(CutCase::Interior(s)) | Some(CutCase::EdgeAligned { side: s, .. }) => s == side,
                        _ => false,
                    };
                    if face_path_bfs(mesh, t, admissible).is_err() {
                        report.violations.push(Violation {
                            element: t,
                            what: format!("no triangle entirely in side {} is reachable", side.index() + 1),
                        });
                    }
                }
            }
        }
    }
    report
}
