//! The `gpdmod 1` and `gpdbif 1` text formats.
//!
//! ```text
//! gpdmod 1
//! field 2
//! grid 1 1
//! dim 0 0 1
//! dim 1 0 1
//! mapx 0 0
//! 1
//! ```
//!
//! Matrix rows are target-indexed: a `mapx x y` block has `dim(x+1,y)` rows
//! of `dim(x,y)` residues. Omitted dims are zero and omitted maps are zero.

use std::fmt::{self, Write as _};

use gpd_core::complexes::{Bifiltration, Simplex};
use gpd_core::linalg::Matrix;
use gpd_core::{Field, Grid, GridModule, Point};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormatError {
    Syntax { line: usize, message: String },
    Invalid(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            FormatError::Invalid(message) => f.write_str(message),
        }
    }
}

impl std::error::Error for FormatError {}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn number<T: std::str::FromStr>(line: usize, token: &str) -> Result<T, FormatError> {
    token
        .parse()
        .map_err(|_| syntax(line, format!("expected a number, found `{token}`")))
}

fn expect_header<'a>(it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>, magic: &str) -> Result<(), FormatError> {
    match it.next() {
        Some((_, t)) if t == [magic, "1"] => Ok(()),
        Some((line, _)) => Err(syntax(line, format!("expected header `{magic} 1`"))),
        None => Err(syntax(1, format!("empty file, expected header `{magic} 1`"))),
    }
}

fn grid_line(line: usize, t: &[&str]) -> Result<Grid, FormatError> {
    if t.len() != 3 {
        return Err(syntax(line, "expected `grid <m> <n>`"));
    }
    Ok(Grid::new(number(line, t[1])?, number(line, t[2])?))
}

enum Axis {
    X,
    Y,
}

struct MapBlock {
    line: usize,
    axis: Axis,
    at: Point,
    rows: Vec<(usize, Vec<i64>)>,
}

/// Parses a module and checks shapes and commutativity.
pub fn parse_module(text: &str) -> Result<GridModule, FormatError> {
    let mut it = lines(text);
    expect_header(&mut it, "gpdmod")?;
    let mut field = None;
    let mut grid = None;
    let mut dims: Vec<(usize, Point, usize)> = Vec::new();
    let mut blocks: Vec<MapBlock> = Vec::new();
    for (line, t) in it {
        match t[0] {
            "field" if t.len() == 2 => {
                let p: u32 = number(line, t[1])?;
                field = Some(Field::new(p).map_err(|e| syntax(line, e.to_string()))?);
            }
            "grid" => grid = Some(grid_line(line, &t)?),
            "dim" if t.len() == 4 => {
                let at = Point::new(number(line, t[1])?, number(line, t[2])?);
                dims.push((line, at, number(line, t[3])?));
            }
            "mapx" | "mapy" if t.len() == 3 => {
                let axis = if t[0] == "mapx" { Axis::X } else { Axis::Y };
                let at = Point::new(number(line, t[1])?, number(line, t[2])?);
                blocks.push(MapBlock {
                    line,
                    axis,
                    at,
                    rows: Vec::new(),
                });
            }
            first if first.starts_with(|c: char| c.is_ascii_digit() || c == '-') => {
                let block = blocks
                    .last_mut()
                    .ok_or_else(|| syntax(line, "matrix row outside a map block"))?;
                let row = t.iter().map(|tok| number(line, tok)).collect::<Result<Vec<i64>, _>>()?;
                block.rows.push((line, row));
            }
            other => return Err(syntax(line, format!("unrecognized line starting with `{other}`"))),
        }
    }
    let field = field.unwrap_or(Field::GF2);
    let grid = grid.ok_or_else(|| syntax(1, "missing `grid <m> <n>` line"))?;

    let mut dim_table = vec![0usize; grid.len()];
    let mut seen = vec![false; grid.len()];
    for (line, at, d) in dims {
        let i = grid.check(at).map_err(|e| syntax(line, e.to_string()))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(syntax(line, format!("dim at {at:?} given twice")));
        }
        dim_table[i] = d;
    }
    let mut module = GridModule::with_dims(grid, field, dim_table).map_err(|e| FormatError::Invalid(e.to_string()))?;
    let mut seen_x = vec![false; grid.len()];
    let mut seen_y = vec![false; grid.len()];
    for block in blocks {
        let line = block.line;
        let p = block.at;
        let (target, seen) = match block.axis {
            Axis::X => (p.offset(1, 0), &mut seen_x),
            Axis::Y => (p.offset(0, 1), &mut seen_y),
        };
        let i = grid.check(p).map_err(|e| syntax(line, e.to_string()))?;
        grid.check(target)
            .map_err(|_| syntax(line, format!("map from {p:?} leaves the grid")))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(syntax(line, format!("map at {p:?} given twice")));
        }
        let (rows, cols) = (module.dim(target), module.dim(p));
        if block.rows.len() != rows {
            return Err(syntax(
                line,
                format!("expected {rows} matrix rows, found {}", block.rows.len()),
            ));
        }
        let mut m = Matrix::zeros(rows, cols);
        for (r, (row_line, row)) in block.rows.iter().enumerate() {
            if row.len() != cols {
                return Err(syntax(
                    *row_line,
                    format!("expected {cols} entries, found {}", row.len()),
                ));
            }
            for (c, &v) in row.iter().enumerate() {
                if v < 0 || v >= i64::from(field.modulus()) {
                    return Err(syntax(
                        *row_line,
                        format!("entry {v} is not a residue mod {}", field.modulus()),
                    ));
                }
                m.set(r, c, v as u16);
            }
        }
        match block.axis {
            Axis::X => module.set_map_x(p, m),
            Axis::Y => module.set_map_y(p, m),
        }
    }
    let violations = module.validate();
    if let Some(first) = violations.first() {
        return Err(FormatError::Invalid(format!(
            "module fails validation with {} violation(s); first: {first}",
            violations.len()
        )));
    }
    Ok(module)
}

fn write_matrix(out: &mut String, m: &Matrix) {
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u16::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// Canonical text: nonzero dims, then nonempty maps, in point order.
pub fn print_module(m: &GridModule) -> String {
    let g = m.grid();
    let mut out = String::new();
    let _ = writeln!(out, "gpdmod 1\nfield {}\ngrid {} {}", m.field().modulus(), g.m, g.n);
    for p in g.points() {
        if m.dim(p) > 0 {
            let _ = writeln!(out, "dim {} {} {}", p.x, p.y, m.dim(p));
        }
    }
    for p in g.points() {
        if (p.x as usize) < g.m && m.dim(p) > 0 && m.dim(p.offset(1, 0)) > 0 {
            let _ = writeln!(out, "mapx {} {}", p.x, p.y);
            write_matrix(&mut out, m.map_x(p));
        }
    }
    for p in g.points() {
        if (p.y as usize) < g.n && m.dim(p) > 0 && m.dim(p.offset(0, 1)) > 0 {
            let _ = writeln!(out, "mapy {} {}", p.x, p.y);
            write_matrix(&mut out, m.map_y(p));
        }
    }
    out
}

/// Parses a bifiltration; validity is checked separately.
pub fn parse_bifiltration(text: &str) -> Result<Bifiltration, FormatError> {
    let mut it = lines(text);
    expect_header(&mut it, "gpdbif")?;
    let mut grid = None;
    let mut simplices = Vec::new();
    for (line, t) in it {
        match t[0] {
            "grid" => grid = Some(grid_line(line, &t)?),
            "simplex" => {
                let colon = t
                    .iter()
                    .position(|&tok| tok == ":")
                    .ok_or_else(|| syntax(line, "expected `simplex <v0> ... : <gx> <gy>`"))?;
                let vertices = t[1..colon]
                    .iter()
                    .map(|tok| number(line, tok))
                    .collect::<Result<Vec<u32>, _>>()?;
                let grade = &t[colon + 1..];
                if vertices.is_empty() || grade.len() != 2 {
                    return Err(syntax(line, "expected `simplex <v0> ... : <gx> <gy>`"));
                }
                if vertices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(syntax(line, "vertex ids must be sorted and distinct"));
                }
                let grade = Point::new(number(line, grade[0])?, number(line, grade[1])?);
                simplices.push(Simplex { vertices, grade });
            }
            other => return Err(syntax(line, format!("unrecognized line starting with `{other}`"))),
        }
    }
    let grid = grid.ok_or_else(|| syntax(1, "missing `grid <m> <n>` line"))?;
    Ok(Bifiltration::new(grid, simplices))
}

pub fn print_bifiltration(b: &Bifiltration) -> String {
    let g = b.grid();
    let mut out = format!("gpdbif 1\ngrid {} {}\n", g.m, g.n);
    for s in b.simplices() {
        let vs: Vec<String> = s.vertices.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "simplex {} : {} {}", vs.join(" "), s.grade.x, s.grade.y);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_module() {
        let text = "gpdmod 1\n# unit bar\nfield 2\ngrid 1 0\ndim 0 0 1\ndim 1 0 1\nmapx 0 0\n1\n";
        let m = parse_module(text).unwrap();
        assert_eq!(m.dims(), [1, 1]);
        assert_eq!(print_module(&m), text.replace("# unit bar\n", ""));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let bad = "gpdmod 1\ngrid 1 0\ndim 0 0 1\ndim 1 0 1\nmapx 0 0\n1 1\n";
        assert_eq!(
            parse_module(bad),
            Err(FormatError::Syntax {
                line: 6,
                message: "expected 1 entries, found 2".into()
            })
        );
        assert!(matches!(
            parse_module("gpdmod 2\n"),
            Err(FormatError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_module("gpdmod 1\nfield 4\ngrid 0 0\n"),
            Err(FormatError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_module("gpdmod 1\ngrid 0 0\ndim 1 0 1\n"),
            Err(FormatError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn non_commuting_square_is_invalid() {
        let text = "gpdmod 1\ngrid 1 1\ndim 0 0 1\ndim 1 0 1\ndim 0 1 1\ndim 1 1 1\nmapx 0 0\n1\nmapx 0 1\n1\nmapy 0 0\n1\nmapy 1 0\n0\n";
        assert!(matches!(parse_module(text), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn bifiltration_round_trip() {
        let text = "gpdbif 1\ngrid 1 1\nsimplex 0 : 0 0\nsimplex 1 : 0 0\nsimplex 0 1 : 1 1\n";
        let b = parse_bifiltration(text).unwrap();
        assert_eq!(b.simplices().len(), 3);
        assert_eq!(print_bifiltration(&b), text);
        assert!(parse_bifiltration("gpdbif 1\ngrid 1 1\nsimplex 1 0 : 0 0\n").is_err());
    }
}
