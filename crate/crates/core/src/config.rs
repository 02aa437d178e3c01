//! Line-based config files holding a manifold block and named symbol, gauge
//! and volume-form blocks.
//!
//! ```text
//! # comment
//! [manifold]
//! dim = 3
//! grid = 32
//! q_ref = 0, 0, 0, 1          # 4D only
//!
//! [symbol twisted]
//! E1 = [["0", "exp(i*x3)"], ["exp(-i*x3)", "0"]]
//! E2 = [["0", "-i*exp(i*x3)"], ["i*exp(-i*x3)", "0"]]
//! E3 = [["1", "0"], ["0", "-1"]]
//! F  = [["0", "0"], ["0", "0"]]   # optional, defaults to zero
//!
//! [gauge twist]
//! group = u                    # gl | sl | u | su
//! R = [["exp(-i*x3)", "0"], ["0", "1"]]
//!
//! [volume c1]
//! c = "exp(i*x1)"
//! ```
//!
//! A matrix value may continue over several lines until its brackets balance.
//! Expression strings may not contain `"`.

use crate::builtins;
use crate::chart::Chart;
use crate::equivalence::{GaugeMap, Group, VolumeForm};
use crate::error::{Error, Result};
use crate::expr::{parse_expression, MatrixExpr};
use crate::symbol::FullSymbol;
use std::fmt::Write as _;

pub type MatrixText = [[String; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    pub dim: usize,
    pub grid: usize,
    pub q_ref: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub name: String,
    pub e: Vec<MatrixText>,
    pub f: Option<MatrixText>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeBlock {
    pub name: String,
    pub group: Group,
    pub r: MatrixText,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeBlock {
    pub name: String,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    pub manifold: Manifold,
    pub symbols: Vec<SymbolBlock>,
    pub gauges: Vec<GaugeBlock>,
    pub volumes: Vec<VolumeBlock>,
}

enum Section {
    None,
    Manifold,
    Symbol(usize),
    Gauge(usize),
    Volume(usize),
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn bracket_balance(s: &str) -> i32 {
    let mut in_str = false;
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '"' => in_str = !in_str,
            '[' if !in_str => depth += 1,
            ']' if !in_str => depth -= 1,
            _ => {}
        }
    }
    depth
}

fn check_expr(text: &str, line: usize) -> Result<()> {
    parse_expression(text)
        .map(|_| ())
        .map_err(|e| err(line, format!("in \"{text}\": {e}")))
}

struct Tokens<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl Tokens<'_> {
    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(err(
                self.line,
                format!("expected `{}` at column {}", c as char, self.pos + 1),
            ))
        }
    }
    fn string(&mut self) -> Result<String> {
        self.expect(b'"')?;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != b'"' {
            self.pos += 1;
        }
        if self.pos >= self.s.len() {
            return Err(err(self.line, "unterminated string"));
        }
        let text = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        self.pos += 1;
        Ok(text)
    }
    fn end(&mut self) -> Result<()> {
        self.skip();
        if self.pos != self.s.len() {
            return Err(err(
                self.line,
                format!("unexpected trailing input at column {}", self.pos + 1),
            ));
        }
        Ok(())
    }
}

fn parse_matrix(value: &str, line: usize) -> Result<MatrixText> {
    let mut t = Tokens {
        s: value.as_bytes(),
        pos: 0,
        line,
    };
    t.expect(b'[')?;
    let mut rows: Vec<[String; 2]> = Vec::new();
    for r in 0..2 {
        if r == 1 {
            t.expect(b',')?;
        }
        t.expect(b'[')?;
        let a = t.string()?;
        t.expect(b',')?;
        let b = t.string()?;
        t.expect(b']')?;
        rows.push([a, b]);
    }
    t.expect(b']')?;
    t.end()?;
    for s in rows.iter().flatten() {
        check_expr(s, line)?;
    }
    let [r0, r1]: [[String; 2]; 2] = rows.try_into().expect("two rows");
    Ok([r0, r1])
}

fn parse_string(value: &str, line: usize) -> Result<String> {
    let mut t = Tokens {
        s: value.as_bytes(),
        pos: 0,
        line,
    };
    let s = t.string()?;
    t.end()?;
    check_expr(&s, line)?;
    Ok(s)
}

fn parse_usize(value: &str, line: usize) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| err(line, format!("expected an integer, got `{}`", value.trim())))
}

fn parse_vector(value: &str, line: usize) -> Result<Vec<f64>> {
    let v = value.trim().trim_start_matches('[').trim_end_matches(']');
    v.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| err(line, format!("expected a number, got `{}`", x.trim())))
        })
        .collect()
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
}

impl ConfigDocument {
    pub fn new(manifold: Manifold) -> Self {
        ConfigDocument {
            manifold,
            symbols: vec![],
            gauges: vec![],
            volumes: vec![],
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut manifold: Option<(usize, Option<usize>, Option<usize>, Option<[f64; 4]>)> = None;
        let mut doc = ConfigDocument::new(Manifold {
            dim: 0,
            grid: 0,
            q_ref: None,
        });
        let mut section = Section::None;
        let lines: Vec<&str> = text.lines().collect();
        let mut i = 0;
        while i < lines.len() {
            let lineno = i + 1;
            let mut content = strip_comment(lines[i]).trim().to_string();
            i += 1;
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') && !content.contains('=') {
                let inner = content
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| err(lineno, "malformed section header"))?
                    .trim()
                    .to_string();
                let mut parts = inner.split_whitespace();
                let kind = parts.next().unwrap_or("");
                let name = parts.next();
                if parts.next().is_some() {
                    return Err(err(lineno, "section header has too many words"));
                }
                section = match (kind, name) {
                    ("manifold", None) => {
                        if manifold.is_some() {
                            return Err(err(lineno, "duplicate [manifold] block"));
                        }
                        manifold = Some((lineno, None, None, None));
                        Section::Manifold
                    }
                    ("symbol" | "gauge" | "volume", Some(n)) => {
                        if !valid_name(n) {
                            return Err(err(lineno, format!("invalid name `{n}`")));
                        }
                        let taken = match kind {
                            "symbol" => doc.symbols.iter().any(|s| s.name == n),
                            "gauge" => doc.gauges.iter().any(|s| s.name == n),
                            _ => doc.volumes.iter().any(|s| s.name == n),
                        };
                        if taken {
                            return Err(err(lineno, format!("duplicate {kind} name `{n}`")));
                        }
                        match kind {
                            "symbol" => {
                                doc.symbols.push(SymbolBlock {
                                    name: n.into(),
                                    e: vec![],
                                    f: None,
                                });
                                Section::Symbol(doc.symbols.len() - 1)
                            }
                            "gauge" => {
                                doc.gauges.push(GaugeBlock {
                                    name: n.into(),
                                    group: Group::GL,
                                    r: Default::default(),
                                });
                                Section::Gauge(doc.gauges.len() - 1)
                            }
                            _ => {
                                doc.volumes.push(VolumeBlock {
                                    name: n.into(),
                                    c: String::new(),
                                });
                                Section::Volume(doc.volumes.len() - 1)
                            }
                        }
                    }
                    _ => return Err(err(lineno, format!("unknown section `[{inner}]`"))),
                };
                continue;
            }
            let eq = content
                .find('=')
                .ok_or_else(|| err(lineno, "expected `key = value`"))?;
            let key = content[..eq].trim().to_string();
            let mut value = content[eq + 1..].trim().to_string();
            if value.starts_with('[') {
                while bracket_balance(&value) > 0 && i < lines.len() {
                    value.push(' ');
                    value.push_str(strip_comment(lines[i]).trim());
                    i += 1;
                }
            }
            content.clear();
            match &mut section {
                Section::None => return Err(err(lineno, "entry outside of any block")),
                Section::Manifold => {
                    let m = manifold.as_mut().expect("set with section");
                    match key.as_str() {
                        "dim" => m.1 = Some(parse_usize(&value, lineno)?),
                        "grid" => m.2 = Some(parse_usize(&value, lineno)?),
                        "q_ref" => {
                            let v = parse_vector(&value, lineno)?;
                            if v.len() != 4 {
                                return Err(err(lineno, "q_ref needs four components"));
                            }
                            m.3 = Some([v[0], v[1], v[2], v[3]]);
                        }
                        _ => return Err(err(lineno, format!("unknown manifold key `{key}`"))),
                    }
                }
                Section::Symbol(k) => {
                    let block = &mut doc.symbols[*k];
                    if key == "F" {
                        block.f = Some(parse_matrix(&value, lineno)?);
                    } else if let Some(idx) =
                        key.strip_prefix('E').and_then(|s| s.parse::<usize>().ok())
                    {
                        if idx != block.e.len() + 1 {
                            return Err(err(
                                lineno,
                                format!("expected E{} next, got {key}", block.e.len() + 1),
                            ));
                        }
                        block.e.push(parse_matrix(&value, lineno)?);
                    } else {
                        return Err(err(lineno, format!("unknown symbol key `{key}`")));
                    }
                }
                Section::Gauge(k) => match key.as_str() {
                    "group" => {
                        doc.gauges[*k].group = value
                            .trim()
                            .parse()
                            .map_err(|_| err(lineno, format!("unknown group `{}`", value.trim())))?
                    }
                    "R" => doc.gauges[*k].r = parse_matrix(&value, lineno)?,
                    _ => return Err(err(lineno, format!("unknown gauge key `{key}`"))),
                },
                Section::Volume(k) => match key.as_str() {
                    "c" => doc.volumes[*k].c = parse_string(&value, lineno)?,
                    _ => return Err(err(lineno, format!("unknown volume key `{key}`"))),
                },
            }
        }
        let (line, dim, grid, q_ref) =
            manifold.ok_or_else(|| err(0, "missing [manifold] block"))?;
        let dim = dim.ok_or_else(|| err(line, "manifold block needs `dim`"))?;
        let grid = grid.ok_or_else(|| err(line, "manifold block needs `grid`"))?;
        Chart::new(dim, grid, q_ref).map_err(|e| err(line, e.to_string()))?;
        doc.manifold = Manifold { dim, grid, q_ref };
        for s in &doc.symbols {
            if s.e.len() != dim {
                return Err(err(
                    0,
                    format!(
                        "symbol `{}` has {} fields, expected {dim}",
                        s.name,
                        s.e.len()
                    ),
                ));
            }
        }
        for g in &doc.gauges {
            if g.r[0][0].is_empty() {
                return Err(err(0, format!("gauge `{}` has no `R`", g.name)));
            }
        }
        for v in &doc.volumes {
            if v.c.is_empty() {
                return Err(err(0, format!("volume `{}` has no `c`", v.name)));
            }
        }
        Ok(doc)
    }

    pub fn chart(&self) -> Result<Chart> {
        Chart::new(self.manifold.dim, self.manifold.grid, self.manifold.q_ref)
    }

    /// A symbol block by name, falling back to the built-ins.
    pub fn symbol(&self, name: &str, chart: &Chart) -> Result<FullSymbol> {
        match self.symbols.iter().find(|s| s.name == name) {
            Some(b) => {
                let e: Result<Vec<MatrixExpr>> = b.e.iter().map(matrix_expr).collect();
                let f =
                    b.f.as_ref()
                        .map(matrix_expr)
                        .transpose()?
                        .unwrap_or_else(MatrixExpr::zero);
                FullSymbol::from_canonical(e?, f, chart)
            }
            None => builtins::builtin(name, chart),
        }
    }

    pub fn gauge(&self, name: &str, chart: &Chart) -> Result<GaugeMap> {
        let b = self
            .gauges
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| Error::UnknownName(name.into()))?;
        GaugeMap::new(matrix_expr(&b.r)?, b.group, chart)
    }

    pub fn volume(&self, name: &str) -> Result<VolumeForm> {
        let b = self
            .volumes
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| Error::UnknownName(name.into()))?;
        Ok(VolumeForm(parse_expression(&b.c)?))
    }

    /// Adds an expression-backed symbol as a block.
    pub fn push_symbol(&mut self, name: &str, s: &FullSymbol) -> Result<()> {
        let (e, f) = s
            .expressions()
            .ok_or_else(|| Error::InvalidSymbol("symbol has no expression form".into()))?;
        self.symbols.push(SymbolBlock {
            name: name.into(),
            e: e.iter().map(MatrixExpr::to_strings).collect(),
            f: Some(f.to_strings()),
        });
        Ok(())
    }

    pub fn render(&self) -> String {
        let m = |t: &MatrixText| {
            format!(
                "[[\"{}\", \"{}\"], [\"{}\", \"{}\"]]",
                t[0][0], t[0][1], t[1][0], t[1][1]
            )
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "[manifold]\ndim = {}\ngrid = {}",
            self.manifold.dim, self.manifold.grid
        );
        if let Some(q) = self.manifold.q_ref {
            let _ = writeln!(out, "q_ref = {}, {}, {}, {}", q[0], q[1], q[2], q[3]);
        }
        for s in &self.symbols {
            let _ = writeln!(out, "\n[symbol {}]", s.name);
            for (k, e) in s.e.iter().enumerate() {
                let _ = writeln!(out, "E{} = {}", k + 1, m(e));
            }
            if let Some(f) = &s.f {
                let _ = writeln!(out, "F = {}", m(f));
            }
        }
        for g in &self.gauges {
            let _ = writeln!(
                out,
                "\n[gauge {}]\ngroup = {}\nR = {}",
                g.name,
                g.group,
                m(&g.r)
            );
        }
        for v in &self.volumes {
            let _ = writeln!(out, "\n[volume {}]\nc = \"{}\"", v.name, v.c);
        }
        out
    }
}

fn matrix_expr(t: &MatrixText) -> Result<MatrixExpr> {
    MatrixExpr::parse([[&t[0][0], &t[0][1]], [&t[1][0], &t[1][1]]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Point;

    const SAMPLE: &str = r#"
# twisted pair
[manifold]
dim = 3
grid = 8

[symbol tw]
E1 = [["0", "exp(i*x3)"], ["exp(-i*x3)", "0"]]
E2 = [["0", "-i*exp(i*x3)"],
      ["i*exp(-i*x3)", "0"]]
E3 = [["1", "0"], ["0", "-1"]]  # diagonal

[gauge twist]
group = u
R = [["exp(-i*x3)", "0"], ["0", "1"]]

[volume v]
c = "exp(i*x1)"
"#;

    #[test]
    fn parses_sample() {
        let doc = ConfigDocument::parse(SAMPLE).unwrap();
        assert_eq!(
            doc.manifold,
            Manifold {
                dim: 3,
                grid: 8,
                q_ref: None
            }
        );
        let c = doc.chart().unwrap();
        let tw = doc.symbol("tw", &c).unwrap();
        let builtin = doc.symbol("twisted3", &c).unwrap();
        let x = Point::new(&[0.1, 0.2, 0.3]);
        assert_eq!(tw.jet(&x).unwrap(), builtin.jet(&x).unwrap());
        assert_eq!(doc.gauge("twist", &c).unwrap().group(), Group::U);
        assert!(doc.volume("v").is_ok());
    }

    #[test]
    fn render_round_trip() {
        let doc = ConfigDocument::parse(SAMPLE).unwrap();
        let again = ConfigDocument::parse(&doc.render()).unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn errors_carry_lines() {
        let bad =
            "[manifold]\ndim = 3\ngrid = 8\n[symbol a]\nE1 = [[\"x1 +\", \"0\"], [\"0\", \"0\"]]\n";
        match ConfigDocument::parse(bad) {
            Err(Error::Config { line: 5, message }) => assert!(message.contains("position")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ConfigDocument::parse("dim = 3"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(matches!(
            ConfigDocument::parse("[manifold]\ndim = 5\ngrid = 8\n"),
            Err(Error::Config { line: 1, .. })
        ));
        let dup = "[manifold]\ndim = 3\ngrid = 8\n[symbol a]\n[symbol a]\n";
        assert!(matches!(
            ConfigDocument::parse(dup),
            Err(Error::Config { line: 5, .. })
        ));
        let arity =
            "[manifold]\ndim = 3\ngrid = 8\n[symbol a]\nE1 = [[\"1\",\"0\"],[\"0\",\"1\"]]\n";
        assert!(matches!(
            ConfigDocument::parse(arity),
            Err(Error::Config { .. })
        ));
    }
}
