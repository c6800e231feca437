//! Plain text exports of meshes and geometry fields.

use std::fmt::Write as _;

use super::geometry::GeometryField;
use super::mesh::TriMesh;

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// `V F` header, then vertex coordinates, then simplex vertex indices.
pub fn mesh_to_text(mesh: &TriMesh) -> String {
    let ambient = mesh.dim + 1;
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mesh.vertices.len(), mesh.simplices.len());
    for v in &mesh.vertices {
        let row: Vec<String> = v[..ambient].iter().map(|&c| fmt17(c)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    for s in 0..mesh.simplices.len() {
        let row: Vec<String> = mesh.simplex(s).iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn field_to_csv(field: &GeometryField) -> String {
    let ambient = field.dim() + 1;
    let mut header: Vec<String> = (1..=ambient).map(|i| format!("x{i}")).collect();
    header.extend((1..=ambient).map(|i| format!("N{i}")));
    header.extend(["nH", "A2", "h", "phi"].map(String::from));
    let mut out = header.join(",");
    out.push('\n');
    for k in 0..field.len() {
        let mut row: Vec<String> = field.position[k][..ambient].iter().map(|&c| fmt17(c)).collect();
        row.extend(field.normal[k][..ambient].iter().map(|&c| fmt17(c)));
        row.extend([field.nh[k], field.a2[k], field.h[k], field.phi[k]].map(fmt17));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Density;
    use crate::surface::{geometry_vertical, triangulate_vertical, Grid, VerticalGraph};

    #[test]
    fn exports_have_expected_shape() {
        let g = Grid::interval(0.0, 1.0, 6).unwrap();
        let graph = VerticalGraph::from_fn(g, |q| q[0] * q[0]).unwrap();
        let mesh = triangulate_vertical(&graph).unwrap();
        let text = mesh_to_text(&mesh);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "6 5");
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[7], "0 1");
        let csv = field_to_csv(&geometry_vertical(&graph, &Density::constant(2)).unwrap());
        assert!(csv.starts_with("x1,x2,N1,N2,nH,A2,h,phi\n"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let v = 0.1 + 0.2;
        assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
    }
}
