//! Triangular meshes of rectangles, uniform refinement and face-path search.

use std::collections::HashMap;

use crate::error::{Error, Result};

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
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Signed area of a triangle (positive when counter-clockwise).
#[inline]
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

/// Longest edge of a triangle.
pub fn diameter(p: &[Point; 3]) -> f64 {
    dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let all_finite = [x0, y0, x1, y1].iter().all(|v| v.is_finite());
        if !all_finite || x1 <= x0 || y1 <= y0 {
            return Err(Error::invalid(format!(
                "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// An edge shared by one (boundary) or two triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub elements: (usize, Option<usize>),
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.elements.1.is_none()
    }

    /// The neighbour across this face, seen from `element`.
    pub fn other(&self, element: usize) -> Option<usize> {
        match self.elements {
            (a, Some(b)) if a == element => Some(b),
            (a, Some(b)) if b == element => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub faces: Vec<Face>,
    /// `triangle_faces[t][k]` is the face joining local vertices `k` and `k+1`.
    pub triangle_faces: Vec<[usize; 3]>,
    pub h_max: f64,
    pub h_min: f64,
    pub domain: Rect,
    /// Cell widths `(h_x, h_y)` of the underlying structured grid.
    pub spacing: [f64; 2],
}

impl TriMesh {
    pub(crate) fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        domain: Rect,
        spacing: [f64; 2],
    ) -> Result<Self> {
        let mut faces: Vec<Face> = Vec::with_capacity(triangles.len() * 2);
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangle_faces = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let f = match lookup.get(&key) {
                    Some(&f) => {
                        let face: &mut Face = &mut faces[f];
                        if face.elements.1.is_some() {
                            return Err(Error::invalid(format!(
                                "edge {key:?} shared by more than two triangles"
                            )));
                        }
                        face.elements.1 = Some(t);
                        f
                    }
                    None => {
                        faces.push(Face {
                            vertices: [key.0, key.1],
                            elements: (t, None),
                        });
                        lookup.insert(key, faces.len() - 1);
                        faces.len() - 1
                    }
                };
                local[k] = f;
            }
            triangle_faces.push(local);
        }
        let mut h_max = 0.0f64;
        let mut h_min = f64::INFINITY;
        for tri in &triangles {
            let h = diameter(&[vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
            h_max = h_max.max(h);
            h_min = h_min.min(h);
        }
        let mesh = TriMesh {
            vertices,
            triangles,
            faces,
            triangle_faces,
            h_max,
            h_min,
            domain,
            spacing,
        };
        mesh.check_invariants()?;
        Ok(mesh)
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn points(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    pub fn area(&self, t: usize) -> f64 {
        let p = self.points(t);
        signed_area(p[0], p[1], p[2])
    }

    pub fn diameter(&self, t: usize) -> f64 {
        diameter(&self.points(t))
    }

    pub fn face_length(&self, f: usize) -> f64 {
        let [a, b] = self.faces[f].vertices;
        dist(self.vertices[a], self.vertices[b])
    }

    /// Unit normal of a face; for boundary faces it points out of the domain.
    pub fn face_normal(&self, f: usize) -> Point {
        let face = &self.faces[f];
        let a = self.vertices[face.vertices[0]];
        let b = self.vertices[face.vertices[1]];
        let t = sub(b, a);
        let len = norm(t);
        let mut n = [t[1] / len, -t[0] / len];
        // orient away from the first neighbour
        let tri = self.triangles[face.elements.0];
        let opposite = tri
            .iter()
            .copied()
            .find(|v| !face.vertices.contains(v))
            .expect("triangle has a vertex off the face");
        if dot(n, sub(self.vertices[opposite], a)) > 0.0 {
            n = [-n[0], -n[1]];
        }
        n
    }

    pub fn boundary_faces(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.triangle_faces[t]
            .iter()
            .copied()
            .filter(move |&f| self.faces[f].is_boundary())
    }

    /// Neighbours across faces, paired with the shared face.
    pub fn neighbours(&self, t: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.triangle_faces[t]
            .iter()
            .filter_map(move |&f| self.faces[f].other(t).map(|n| (n, f)))
    }

    /// Structural checks: orientation, face multiplicity and the rule that no
    /// triangle has two boundary faces.
    pub fn check_invariants(&self) -> Result<()> {
        let scale = self.h_min * self.h_min;
        for t in 0..self.n_triangles() {
            if self.area(t) <= 1e-14 * scale {
                return Err(Error::invalid(format!(
                    "triangle {t} is not counter-clockwise or is degenerate"
                )));
            }
            if self.boundary_faces(t).count() > 1 {
                return Err(Error::assumption(
                    "triangle has more than one boundary face",
                    Some(t),
                ));
            }
        }
        Ok(())
    }

    /// Index of a triangle containing `x` (boundary points included).
    pub fn locate(&self, x: Point) -> Option<usize> {
        let tol = 1e-12;
        (0..self.n_triangles()).find(|&t| {
            let l = barycentric(&self.points(t), x);
            l.iter().all(|&v| v >= -tol)
        })
    }
}

/// Barycentric coordinates of `x` in triangle `p`.
pub fn barycentric(p: &[Point; 3], x: Point) -> [f64; 3] {
    let area = signed_area(p[0], p[1], p[2]);
    let l0 = signed_area(x, p[1], p[2]) / area;
    let l1 = signed_area(p[0], x, p[2]) / area;
    [l0, l1, 1.0 - l0 - l1]
}

/// Structured triangulation of `domain` with `nx * ny` cells, each split
/// along its "/" diagonal. The two corner cells whose diagonal would give a
/// triangle with two boundary faces are split along "\" instead.
pub fn build_structured_mesh(domain: Rect, nx: usize, ny: usize) -> Result<TriMesh> {
    if nx < 2 || ny < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 cells per direction, got {nx} x {ny}"
        )));
    }
    let hx = domain.width() / nx as f64;
    let hy = domain.height() / ny as f64;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = if i == nx { domain.x1 } else { domain.x0 + i as f64 * hx };
            let y = if j == ny { domain.y1 } else { domain.y0 + j as f64 * hy };
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            let flip = (i == nx - 1 && j == 0) || (i == 0 && j == ny - 1);
            if flip {
                triangles.push([v00, v10, v01]);
                triangles.push([v10, v11, v01]);
            } else {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
    }
    TriMesh::from_parts(vertices, triangles, domain, [hx, hy])
}

/// Parent/child bookkeeping between a mesh and its uniform refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementMap {
    /// Children of coarse triangle `p` are `children[p]`.
    pub children: Vec<[usize; 4]>,
    pub parent: Vec<usize>,
    /// Coarse vertex `k` is fine vertex `vertex_embedding[k]`.
    pub vertex_embedding: Vec<usize>,
}

/// Split every triangle into four through its edge midpoints.
pub fn uniform_refine(mesh: &TriMesh) -> Result<(TriMesh, RefinementMap)> {
    let nv = mesh.n_vertices();
    let mut vertices = mesh.vertices.clone();
    for face in &mesh.faces {
        let a = mesh.vertices[face.vertices[0]];
        let b = mesh.vertices[face.vertices[1]];
        vertices.push(lerp(a, b, 0.5));
    }
    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    let mut children = Vec::with_capacity(mesh.n_triangles());
    let mut parent = Vec::with_capacity(4 * mesh.n_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = *tri;
        let f = mesh.triangle_faces[t];
        let (m_ab, m_bc, m_ca) = (nv + f[0], nv + f[1], nv + f[2]);
        let base = triangles.len();
        triangles.push([a, m_ab, m_ca]);
        triangles.push([m_ab, b, m_bc]);
        triangles.push([m_ca, m_bc, c]);
        triangles.push([m_ab, m_bc, m_ca]);
        children.push([base, base + 1, base + 2, base + 3]);
        parent.extend([t; 4]);
    }
    let spacing = [mesh.spacing[0] / 2.0, mesh.spacing[1] / 2.0];
    let fine = TriMesh::from_parts(vertices, triangles, mesh.domain, spacing)?;
    let map = RefinementMap {
        children,
        parent,
        vertex_embedding: (0..nv).collect(),
    };
    Ok((fine, map))
}

/// Shortest face-connected path from `start` to an admissible triangle.
///
/// Returns the target and the faces crossed in order. Among targets at the
/// same distance the lowest triangle index wins. `start` itself counts when
/// admissible (empty path).
pub fn face_path_bfs(
    mesh: &TriMesh,
    start: usize,
    admissible: impl Fn(usize) -> bool,
) -> Result<(usize, Vec<usize>)> {
    let n = mesh.n_triangles();
    if start >= n {
        return Err(Error::invalid(format!("triangle {start} out of range")));
    }
    if admissible(start) {
        return Ok((start, Vec::new()));
    }
    // (parent triangle, face crossed)
    let mut came_from: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut level = vec![start];
    while !level.is_empty() {
        let mut next = Vec::new();
        for &t in &level {
            let mut nbrs: Vec<(usize, usize)> = mesh.neighbours(t).collect();
            nbrs.sort_unstable();
            for (m, f) in nbrs {
                if !seen[m] {
                    seen[m] = true;
                    came_from[m] = Some((t, f));
                    next.push(m);
                }
            }
        }
        next.sort_unstable();
        if let Some(&target) = next.iter().find(|&&m| admissible(m)) {
            let mut path = Vec::new();
            let mut cur = target;
            while let Some((prev, f)) = came_from[cur] {
                path.push(f);
                cur = prev;
            }
            path.reverse();
            return Ok((target, path));
        }
        level = next;
    }
    Err(Error::assumption(
        "no admissible triangle reachable through faces",
        Some(start),
    ))
}
