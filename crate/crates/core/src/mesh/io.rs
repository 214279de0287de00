//! Plain-text mesh format.
//!
//! ```text
//! NV NT
//! x y boundary_flag      (NV lines, flag 0 or 1)
//! v1 v2 v3               (NT lines, 1-based vertex ids)
//! ```

use std::io::{BufRead, Write};

use super::{Mesh, Point2};
use crate::{Error, Result};

pub fn read_mesh<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut text = String::new();
    for line in reader.lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty mesh file".into() })?;
    let counts = fields::<usize>(header, ln, 2)?;
    let (nv, nt) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    let mut flags = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing vertex lines".into() })?;
        let f = fields::<f64>(l, ln, 3)?;
        let flag = match f[2] {
            x if x == 0.0 => false,
            x if x == 1.0 => true,
            _ => return Err(Error::Parse { line: ln, msg: "boundary flag must be 0 or 1".into() }),
        };
        vertices.push(Point2::new(f[0], f[1]));
        flags.push(flag);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing triangle lines".into() })?;
        let v = fields::<usize>(l, ln, 3)?;
        if v.iter().any(|&i| i == 0 || i > nv) {
            return Err(Error::Parse { line: ln, msg: format!("vertex id out of range 1..={nv}") });
        }
        triangles.push([v[0] - 1, v[1] - 1, v[2] - 1]);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse { line: ln, msg: "trailing content".into() });
    }
    Mesh::with_boundary_flags(vertices, triangles, Some(flags))
}

pub fn write_mesh<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", mesh.num_vertices(), mesh.num_triangles())?;
    for (i, p) in mesh.vertices().iter().enumerate() {
        writeln!(w, "{:?} {:?} {}", p.x, p.y, u8::from(mesh.is_boundary_vertex(i)))?;
    }
    for t in mesh.triangles() {
        writeln!(w, "{} {} {}", t.v[0] + 1, t.v[1] + 1, t.v[2] + 1)?;
    }
    Ok(())
}

fn fields<T: std::str::FromStr>(line: &str, ln: usize, n: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != n {
        return Err(Error::Parse { line: ln, msg: format!("expected {n} fields, found {}", parts.len()) });
    }
    parts
        .iter()
        .map(|s| s.parse::<T>().map_err(|_| Error::Parse { line: ln, msg: format!("cannot parse '{s}'") }))
        .collect()
}
