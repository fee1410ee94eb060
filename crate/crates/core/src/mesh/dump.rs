//! Plain-text mesh dump.
//!
//! ```text
//! # comment lines start with '#'
//! family <name>
//! domain <x0> <x1> <y0> <y1>
//! vertices <N>
//! <id> <x> <y>
//! cells <M>
//! <id> <area> <cx> <cy> <n> <v_1> ... <v_n>
//! edges <E>
//! <id> <v0> <v1> <left> <right|-> <length> <nx> <ny>
//! ```
//!
//! Cell vertex loops are counterclockwise; `right` is `-` on the boundary.
//! Numbers use Rust's shortest round-trip formatting, so a dump reads back
//! bit-identically.

use std::io::{BufRead, Write};

use super::{MeshFamily, PolygonalMesh, Rect};
use crate::{Error, Result, Scalar};

pub fn write_mesh_dump<T: Scalar, W: Write>(mesh: &PolygonalMesh<T>, mut w: W) -> Result<()> {
    let d = mesh.domain();
    writeln!(w, "# polygonal mesh dump")?;
    writeln!(w, "family {}", mesh.family())?;
    writeln!(w, "domain {:e} {:e} {:e} {:e}", d.x0, d.x1, d.y0, d.y1)?;
    writeln!(w, "vertices {}", mesh.vertices().len())?;
    writeln!(w, "# id x y")?;
    for (k, v) in mesh.vertices().iter().enumerate() {
        writeln!(w, "{k} {:e} {:e}", v[0], v[1])?;
    }
    writeln!(w, "cells {}", mesh.cell_count())?;
    writeln!(w, "# id area cx cy n v_1 .. v_n")?;
    for (k, c) in mesh.cells().iter().enumerate() {
        write!(w, "{k} {:e} {:e} {:e} {}", c.area, c.centroid[0], c.centroid[1], c.vertices.len())?;
        for v in &c.vertices {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "edges {}", mesh.edges().len())?;
    writeln!(w, "# id v0 v1 left right length nx ny")?;
    for (k, e) in mesh.edges().iter().enumerate() {
        let right = e.right.map_or_else(|| "-".to_string(), |r| r.to_string());
        writeln!(
            w,
            "{k} {} {} {} {right} {:e} {:e} {:e}",
            e.vertices[0], e.vertices[1], e.left, e.length, e.normal[0], e.normal[1]
        )?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: Scalar>(tok: Option<&str>, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing number"))?;
    tok.parse::<f64>()
        .map(T::lit)
        .map_err(|e| parse_err(line, format!("'{tok}': {e}")))
}

fn int(tok: Option<&str>, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing integer"))?;
    tok.parse::<usize>()
        .map_err(|e| parse_err(line, format!("'{tok}': {e}")))
}

/// Reads a dump back. Edges are rebuilt from the cell loops; cell areas and
/// centroids are taken from the file.
pub fn read_mesh_dump<T: Scalar, R: BufRead>(r: R) -> Result<PolygonalMesh<T>> {
    let mut family = None;
    let mut domain = None;
    let mut vertices: Vec<[T; 2]> = Vec::new();
    let mut loops: Vec<Vec<usize>> = Vec::new();
    let mut geometry: Vec<(T, [T; 2])> = Vec::new();
    let mut section = "";
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let head = tok.next().unwrap();
        match head {
            "family" => {
                let name = tok.next().ok_or_else(|| parse_err(lineno, "missing family"))?;
                family = Some(name.parse::<MeshFamily>()?);
            }
            "domain" => {
                domain = Some(Rect::new(
                    num(tok.next(), lineno)?,
                    num(tok.next(), lineno)?,
                    num(tok.next(), lineno)?,
                    num(tok.next(), lineno)?,
                ));
            }
            "vertices" => section = "vertices",
            "cells" => section = "cells",
            "edges" => section = "edges",
            _ => match section {
                "vertices" => vertices.push([num(tok.next(), lineno)?, num(tok.next(), lineno)?]),
                "cells" => {
                    let area = num(tok.next(), lineno)?;
                    let c = [num(tok.next(), lineno)?, num(tok.next(), lineno)?];
                    geometry.push((area, c));
                    let k = int(tok.next(), lineno)?;
                    let lp = (0..k).map(|_| int(tok.next(), lineno)).collect::<Result<Vec<_>>>()?;
                    loops.push(lp);
                }
                "edges" => {}
                _ => return Err(parse_err(lineno, format!("unexpected line '{line}'"))),
            },
        }
    }
    let family = family.ok_or_else(|| parse_err(0, "no family line"))?;
    let domain = domain.ok_or_else(|| parse_err(0, "no domain line"))?;
    let mut mesh = PolygonalMesh::from_loops(vertices, loops, family, domain)?;
    for (c, (area, centroid)) in geometry.into_iter().enumerate() {
        mesh.set_cell_geometry(c, area, centroid);
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_family;

    #[test]
    fn dump_round_trips() {
        for fam in MeshFamily::ALL {
            let m = build_family(fam, Rect::new(-1.0, 1.0, -0.5, 1.5), 0.3, 5).unwrap();
            let mut buf = Vec::new();
            write_mesh_dump(&m, &mut buf).unwrap();
            let back: PolygonalMesh<f64> = read_mesh_dump(buf.as_slice()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn sections_are_present() {
        let m = build_family(MeshFamily::Triangular, Rect::square(0.0, 1.0), 0.5, 0).unwrap();
        let mut buf = Vec::new();
        write_mesh_dump(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("vertices 9\n"));
        assert!(text.contains("cells 8\n"));
        assert!(text.contains("edges 16\n"));
    }
}
