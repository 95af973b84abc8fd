//! CSV tables and legacy-VTK field files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::geometry::Side;
use crate::solver::Solution;
use crate::spaces::FieldPair;
use crate::verification::{ErrorReport, SweepRow};

pub const CSV_HEADER: &str = "h_x,err_p_L2,err_u_L2,err_u_H1,err_u_inf,err_p_inf,cond,infsup";

/// Six significant digits.
pub fn format_sig6(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.5e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Error table; absent values are empty fields.
pub fn write_csv(rows: &[ErrorReport], path: &Path) -> Result<()> {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    let opt = |v: Option<f64>| v.map(format_sig6).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            format_sig6(r.h_x),
            format_sig6(r.err_p_l2),
            format_sig6(r.err_u_l2),
            format_sig6(r.err_u_h1),
            format_sig6(r.err_u_inf),
            format_sig6(r.err_p_inf),
            opt(r.cond),
            opt(r.infsup)
        );
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut s = String::from("delta,position,eps_u,eps_p,cond\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            format_sig6(r.delta),
            format_sig6(r.position),
            format_sig6(r.eps_u),
            format_sig6(r.eps_p),
            format_sig6(r.cond)
        );
    }
    fs::write(path, s)?;
    Ok(())
}

/// Paths written by [`write_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkFiles {
    /// Pressure on the coarse mesh, per side.
    pub pressure: [PathBuf; 2],
    /// Velocity on the refined mesh, per side.
    pub velocity: [PathBuf; 2],
}

impl VtkFiles {
    pub fn all(&self) -> impl Iterator<Item = &PathBuf> {
        self.pressure.iter().chain(self.velocity.iter())
    }
}

/// One legacy-ASCII unstructured grid over the triangles carrying `side`.
fn side_grid(field: &FieldPair, side: Side, name: &str, shift: f64) -> String {
    let dofs = &field.dofs;
    let mesh = &dofs.mesh;
    let i = side.index();
    // local point numbering follows the side's dof order
    let mut points: Vec<(usize, usize)> = dofs.vertex_dof[i]
        .iter()
        .enumerate()
        .filter_map(|(v, d)| d.map(|d| (d, v)))
        .collect();
    points.sort_unstable();
    let mut local = vec![usize::MAX; mesh.n_vertices()];
    for (k, &(_, v)) in points.iter().enumerate() {
        local[v] = k;
    }
    let cells: Vec<[usize; 3]> = (0..mesh.n_triangles())
        .filter(|&t| dofs.in_side[i][t])
        .map(|t| mesh.triangles[t].map(|v| local[v]))
        .collect();

    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "cutstokes {name} side {}", i + 1);
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for &(_, v) in &points {
        let [x, y] = mesh.vertices[v];
        let _ = writeln!(s, "{x:e} {y:e} 0");
    }
    let _ = writeln!(s, "CELLS {} {}", cells.len(), 4 * cells.len());
    for c in &cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for _ in &cells {
        let _ = writeln!(s, "5");
    }
    let _ = writeln!(s, "POINT_DATA {}", points.len());
    let c = &field.coefficients;
    if dofs.components == 1 {
        let _ = writeln!(s, "SCALARS {name} double 1");
        let _ = writeln!(s, "LOOKUP_TABLE default");
        for &(d, _) in &points {
            let _ = writeln!(s, "{:e}", c[d] + shift);
        }
    } else {
        let _ = writeln!(s, "VECTORS {name} double");
        for &(d, _) in &points {
            let _ = writeln!(s, "{:e} {:e} 0", c[d], c[d + 1]);
        }
    }
    s
}

/// Write `<stem>_pressure_side{1,2}.vtk` and `<stem>_velocity_side{1,2}.vtk`
/// into `dir`. `shift` is added to the pressure.
pub fn write_vtk(sol: &Solution, shift: f64, dir: &Path, stem: &str) -> Result<VtkFiles> {
    let path = |what: &str, side: Side| dir.join(format!("{stem}_{what}_side{}.vtk", side.index() + 1));
    let files = VtkFiles {
        pressure: Side::BOTH.map(|s| path("pressure", s)),
        velocity: Side::BOTH.map(|s| path("velocity", s)),
    };
    for side in Side::BOTH {
        fs::write(&files.pressure[side.index()], side_grid(&sol.p, side, "pressure", shift))?;
        fs::write(&files.velocity[side.index()], side_grid(&sol.u, side, "velocity", 0.0))?;
    }
    Ok(files)
}
