//! Text forms of weights, bodies, test functions, grids and matrix files.
//!
//! Weights: `power:p=1.5`, `gaussian`, `cauchy:a=2,b=2`, `const:c=0`,
//! `logpert:alpha=0.5,base=power:p=2`, `sum:(power:p=1)+(cauchy:a=3,b=2)`.
//! Every weight label produced by the core parses back to the same weight.
//!
//! Bodies: `ball`, `disk`, `square`, `diamond`, `hexagon`, `ellipse`,
//! `ellipsoid:c11,c12,c22`, `axes:1,0.5`, `lq:q=1[,scale=1]`, `polygon:FILE`,
//! `image:t=0.3,a=FILE[,(inner)]`, `dilate:c=2,(inner)`,
//! `comb:l=0.5,(left),(right)`, and `rn` for the whole space.
//!
//! Functions: `linear:e1`, `linear:1,0`, `bl-extremal`, `poincare-extremal`,
//! `radial:p=2`, `gauge2[:(body)]`, `const:c=1`, `poly:1@2,0;0.5@0,2`,
//! `random:odd,5`, `none`. Bases for the sharpness check: `basis:odd,3`.

use std::path::Path;

use logconcave_core::bodies::{Polygon, SymmetricBody};
use logconcave_core::linalg::Matrix;
use logconcave_core::rng::SeededRng;
use logconcave_core::testfns::{random_polynomial, Parity, TestFunction};
use logconcave_core::{num, RadialWeight};

use crate::error::{LabError, Result};

/// Splits at commas that are not inside parentheses.
fn split_top(text: &str, sep: char) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(LabError::parse(text, "unbalanced parentheses"));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(LabError::parse(text, "unbalanced parentheses"));
    }
    parts.push(&text[start..]);
    Ok(parts)
}

/// Strips one pair of enclosing parentheses, if present.
fn unwrap_parens(text: &str) -> &str {
    let t = text.trim();
    if !(t.starts_with('(') && t.ends_with(')')) {
        return t;
    }
    // Only when the outer pair matches, as in `(a)`, not `(a)+(b)`.
    let mut depth = 0i32;
    for (i, c) in t.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && i + 1 < t.len() {
            return t;
        }
    }
    &t[1..t.len() - 1]
}

fn head(text: &str) -> (&str, &str) {
    match text.split_once(':') {
        Some((h, rest)) => (h.trim(), rest.trim()),
        None => (text.trim(), ""),
    }
}

fn number(text: &str, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| LabError::parse(text, format!("`{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(LabError::parse(text, format!("`{field}` is not finite")));
    }
    Ok(v)
}

/// `key=value` pairs of an argument list, in order.
fn key_values<'a>(text: &str, args: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    if args.is_empty() {
        return Ok(Vec::new());
    }
    split_top(args, ',')?
        .into_iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| LabError::parse(text, format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

struct Args<'a> {
    text: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn new(text: &'a str, args: &'a str, allowed: &[&str]) -> Result<Self> {
        let pairs = key_values(text, args)?;
        for (k, _) in &pairs {
            if !allowed.contains(k) {
                return Err(LabError::parse(text, format!("unknown key `{k}`")));
            }
        }
        Ok(Self { text, pairs })
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn num(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| number(self.text, v)).transpose()
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.num(key)?.ok_or_else(|| LabError::parse(self.text, format!("missing `{key}`")))
    }
}

pub fn parse_weight(text: &str) -> Result<RadialWeight> {
    let t = unwrap_parens(text);
    let (name, args) = head(t);
    let w = match name {
        "gaussian" if args.is_empty() => RadialWeight::gaussian(),
        "power" => RadialWeight::power(Args::new(t, args, &["p"])?.required("p")?)?,
        "cauchy" => {
            let a = Args::new(t, args, &["a", "b"])?;
            RadialWeight::cauchy(a.required("a")?, a.num("b")?.unwrap_or(2.0))?
        }
        "const" => RadialWeight::constant(Args::new(t, args, &["c"])?.num("c")?.unwrap_or(0.0))?,
        "logpert" => {
            // `base` comes last and takes the rest, commas included.
            let (before, base) = args.split_once("base=").ok_or_else(|| LabError::parse(t, "missing `base`"))?;
            let a = Args::new(t, before.trim_end().trim_end_matches(','), &["alpha"])?;
            RadialWeight::log_perturbed(a.required("alpha")?, parse_weight(base)?)?
        }
        "sum" => {
            let parts = split_top(args, '+')?;
            if parts.len() != 2 {
                return Err(LabError::parse(t, "a sum has exactly two parenthesized terms"));
            }
            RadialWeight::sum(parse_weight(parts[0])?, parse_weight(parts[1])?)
        }
        _ => return Err(LabError::parse(t, format!("unknown weight `{name}`"))),
    };
    Ok(w)
}

fn read_text(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

/// Whitespace-separated numbers, one line per row; `#` starts a comment.
pub fn parse_matrix_text(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        rows.push(line.split_whitespace().map(|f| number(line, f)).collect::<Result<_>>()?);
    }
    if rows.is_empty() {
        return Err(LabError::parse(text, "empty matrix"));
    }
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    Ok(Matrix::from_rows(&refs)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    parse_matrix_text(&std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?)
}

/// `x y` per line, counterclockwise, upper half of the vertex cycle.
pub fn parse_polygon_text(text: &str) -> Result<Polygon> {
    let m = parse_matrix_text(text)?;
    if m.cols() != 2 {
        return Err(LabError::parse(text, "polygon lines hold exactly two coordinates"));
    }
    let half = (0..m.rows()).map(|i| [m[(i, 0)], m[(i, 1)]]).collect();
    Ok(Polygon::from_half(half)?)
}

/// Parses a body in dimension `dim`; `rn` yields `None`.
pub fn parse_body(text: &str, dim: usize) -> Result<Option<SymmetricBody>> {
    let t = unwrap_parens(text);
    let (name, args) = head(t);
    let planar = |b: SymmetricBody| {
        if dim == 2 {
            Ok(b)
        } else {
            Err(LabError::parse(t, format!("`{name}` is planar but the dimension is {dim}")))
        }
    };
    let fixed = ["rn", "ball", "disk", "square", "diamond", "hexagon", "ellipse"];
    if fixed.contains(&name) && !args.is_empty() {
        return Err(LabError::parse(t, format!("`{name}` takes no arguments")));
    }
    let body = match name {
        "rn" => return Ok(None),
        "ball" | "disk" => SymmetricBody::ball(dim)?,
        "square" => planar(SymmetricBody::square())?,
        "diamond" => planar(SymmetricBody::diamond())?,
        "hexagon" => planar(SymmetricBody::hexagon())?,
        "ellipse" => planar(SymmetricBody::ellipse())?,
        "ellipsoid" => {
            let c: Vec<f64> = split_top(args, ',')?.iter().map(|f| number(t, f)).collect::<Result<_>>()?;
            if c.len() != dim * (dim + 1) / 2 {
                return Err(LabError::parse(
                    t,
                    format!("expected {} upper-triangular entries", dim * (dim + 1) / 2),
                ));
            }
            let mut m = Matrix::zeros(dim, dim);
            let mut k = 0;
            for i in 0..dim {
                for j in i..dim {
                    m[(i, j)] = c[k];
                    m[(j, i)] = c[k];
                    k += 1;
                }
            }
            SymmetricBody::ellipsoid(m)?
        }
        "axes" => {
            let a: Vec<f64> = split_top(args, ',')?.iter().map(|f| number(t, f)).collect::<Result<_>>()?;
            if a.len() != dim {
                return Err(LabError::parse(t, format!("expected {dim} semi-axes")));
            }
            SymmetricBody::ellipsoid_axes(&a)?
        }
        "lq" => {
            let a = Args::new(t, args, &["q", "scale"])?;
            SymmetricBody::lq_ball(dim, a.required("q")?, a.num("scale")?.unwrap_or(1.0))?
        }
        "polygon" => planar(SymmetricBody::polygon(parse_polygon_text(&read_text(args)?)?))?,
        "image" | "dilate" | "comb" => {
            let parts = split_top(args, ',')?;
            let (kv, bodies): (Vec<&str>, Vec<&str>) = parts.into_iter().partition(|p| !p.trim_start().starts_with('('));
            let joined = kv.join(",");
            let a = Args::new(t, &joined, &["t", "a", "c", "l"])?;
            let mut inner = bodies
                .iter()
                .map(|b| parse_body(b, dim)?.ok_or_else(|| LabError::parse(t, "the whole space cannot be transformed")))
                .collect::<Result<Vec<_>>>()?;
            match name {
                "image" => {
                    let path = a.raw("a").ok_or_else(|| LabError::parse(t, "missing `a`"))?;
                    let k = match inner.len() {
                        0 => SymmetricBody::ball(dim)?,
                        1 => inner.remove(0),
                        _ => return Err(LabError::parse(t, "an image has one inner body")),
                    };
                    SymmetricBody::exp_image(&read_matrix(path)?, a.required("t")?, k)?
                }
                "dilate" if inner.len() == 1 => SymmetricBody::dilate(a.required("c")?, inner.remove(0))?,
                "comb" if inner.len() == 2 => {
                    let right = inner.remove(1);
                    SymmetricBody::minkowski_comb(a.required("l")?, inner.remove(0), right)?
                }
                _ => return Err(LabError::parse(t, "wrong number of parenthesized bodies")),
            }
        }
        _ => return Err(LabError::parse(t, format!("unknown body `{name}`"))),
    };
    if body.dim() != dim {
        return Err(LabError::parse(t, format!("body has dimension {}, expected {dim}", body.dim())));
    }
    Ok(Some(body))
}

/// `a:b:k`: `k` equally spaced points from `a` to `b`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(LabError::parse(text, "grids are written a:b:k"));
    }
    let (a, b) = (number(text, parts[0])?, number(text, parts[1])?);
    let k: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| LabError::parse(text, "the point count must be a non-negative integer"))?;
    if k < 2 || b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
        return Err(LabError::parse(text, "grids need a < b and at least two points"));
    }
    Ok(num::linspace(a, b, k))
}

/// Everything a function spec may refer to.
pub struct FnContext<'a> {
    pub dim: usize,
    pub weight: &'a RadialWeight,
    pub body: Option<&'a SymmetricBody>,
    pub matrix: &'a Matrix,
    pub seed: u64,
}

fn parity(text: &str, field: &str) -> Result<Parity> {
    match field.trim() {
        "odd" => Ok(Parity::Odd),
        "even" => Ok(Parity::Even),
        _ => Err(LabError::parse(text, "parity is `odd` or `even`")),
    }
}

fn degree(text: &str, field: &str) -> Result<u32> {
    field
        .trim()
        .parse()
        .map_err(|_| LabError::parse(text, "degree must be a non-negative integer"))
}

/// Parses a test function; `none` yields `None`.
pub fn parse_function(text: &str, ctx: &FnContext) -> Result<Option<TestFunction>> {
    let t = text.trim();
    let (name, args) = head(t);
    let n = ctx.dim;
    let f = match name {
        "none" => return Ok(None),
        "linear" => {
            let theta: Vec<f64> = match args.strip_prefix('e') {
                Some(idx) => {
                    let i: usize = idx.parse().map_err(|_| LabError::parse(t, "expected e<index>"))?;
                    if i == 0 || i > n {
                        return Err(LabError::parse(t, format!("index must lie in 1..={n}")));
                    }
                    (0..n).map(|k| if k + 1 == i { 1.0 } else { 0.0 }).collect()
                }
                None => split_top(args, ',')?.iter().map(|f| number(t, f)).collect::<Result<_>>()?,
            };
            if theta.len() != n {
                return Err(LabError::parse(t, format!("direction must have {n} components")));
            }
            TestFunction::linear(&theta)?
        }
        "bl-extremal" => TestFunction::bl_extremal(ctx.weight, ctx.matrix)?,
        "poincare-extremal" => TestFunction::poincare_extremal(ctx.weight, n),
        "radial" => TestFunction::radial_power(n, Args::new(t, args, &["p"])?.required("p")?)?,
        "const" => TestFunction::constant(n, Args::new(t, args, &["c"])?.num("c")?.unwrap_or(0.0)),
        "gauge2" => {
            let body = if args.is_empty() {
                ctx.body
                    .cloned()
                    .ok_or_else(|| LabError::parse(t, "gauge2 without a body argument needs --body"))?
            } else {
                parse_body(args, n)?.ok_or_else(|| LabError::parse(t, "the whole space has no gauge"))?
            };
            TestFunction::gauge_squared(&body)
        }
        "poly" => {
            let mut terms = Vec::new();
            for term in args.split(';') {
                let (c, e) = term
                    .split_once('@')
                    .ok_or_else(|| LabError::parse(t, "terms are written coeff@e1,e2,..."))?;
                let e: Vec<u32> = e.split(',').map(|k| degree(t, k)).collect::<Result<_>>()?;
                terms.push((number(t, c)?, e));
            }
            TestFunction::polynomial(n, &terms, false)?
        }
        "random" => {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 2 {
                return Err(LabError::parse(t, "expected random:<parity>,<degree>"));
            }
            let mut rng = SeededRng::new(ctx.seed);
            random_polynomial(&mut rng, parity(t, parts[0])?, degree(t, parts[1])?, n, false)?
        }
        _ => return Err(LabError::parse(t, format!("unknown function `{name}`"))),
    };
    if f.dim() != n {
        return Err(LabError::parse(t, format!("function has dimension {}, expected {n}", f.dim())));
    }
    Ok(Some(f))
}

/// `basis:<parity>,<degree>`.
pub fn parse_basis(text: &str) -> Result<(Parity, u32)> {
    let t = text.trim();
    let args = t
        .strip_prefix("basis:")
        .ok_or_else(|| LabError::parse(t, "expected basis:<parity>,<degree>"))?;
    let (p, d) = args
        .split_once(',')
        .ok_or_else(|| LabError::parse(t, "expected basis:<parity>,<degree>"))?;
    Ok((parity(t, p)?, degree(t, d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx<'a>(w: &'a RadialWeight, m: &'a Matrix, body: Option<&'a SymmetricBody>) -> FnContext<'a> {
        FnContext {
            dim: 2,
            weight: w,
            body,
            matrix: m,
            seed: 1,
        }
    }

    #[test]
    fn weights() {
        assert_eq!(parse_weight("power:p=1.5").unwrap().as_power(), Some(1.5));
        assert_eq!(parse_weight("gaussian").unwrap().as_power(), Some(2.0));
        assert_eq!(parse_weight("cauchy:a=3,b=2").unwrap().as_cauchy(), Some((3.0, 2.0)));
        assert_eq!(parse_weight("cauchy:a=3").unwrap().as_cauchy(), Some((3.0, 2.0)));
        let lp = parse_weight("logpert:alpha=0.5,base=power:p=2").unwrap();
        assert_eq!(lp.label(), "logpert:alpha=0.5,base=power:p=2");
        let s = parse_weight("sum:(power:p=1)+(cauchy:a=3,b=2)").unwrap();
        assert!((s.eval(2.0) - (2.0 + 3.0 * 5f64.ln())).abs() < 1e-12);
        let nested = parse_weight("logpert:alpha=1,base=(sum:(power:p=2)+(const:c=1))").unwrap();
        assert!((nested.eval(1.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn weight_errors() {
        for bad in [
            "power",
            "power:q=1",
            "power:p=x",
            "power:p=-1",
            "cauchy:b=2",
            "sum:(power:p=1)",
            "beta:a=1",
            "power:p=inf",
            "sum:(power:p=1)+(gaussian",
        ] {
            assert!(parse_weight(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn bodies() {
        let sq = parse_body("square", 2).unwrap().unwrap();
        assert!((sq.gauge(&[0.5, -0.25]) - 0.5).abs() < 1e-15);
        assert!(parse_body("rn", 2).unwrap().is_none());
        assert!((parse_body("ball", 3).unwrap().unwrap().gauge(&[0.0, 0.0, 2.0]) - 2.0).abs() < 1e-15);
        let e = parse_body("ellipsoid:4,0,1", 2).unwrap().unwrap();
        assert!((e.gauge(&[0.5, 0.0]) - 1.0).abs() < 1e-12);
        let l1 = parse_body("lq:q=1", 2).unwrap().unwrap();
        assert!((l1.gauge(&[0.5, 0.5]) - 1.0).abs() < 1e-12);
        let d = parse_body("dilate:c=2,(hexagon)", 2).unwrap().unwrap();
        assert!((d.support(&[1.0, 0.0]) - 2.0 * SymmetricBody::hexagon().support(&[1.0, 0.0])).abs() < 1e-12);
        let c = parse_body("comb:l=0.5,(square),(diamond)", 2).unwrap().unwrap();
        assert!(c.as_polygon().is_some());
        assert!((c.support(&[1.0, 0.0]) - 1.0).abs() < 1e-12);
        let a = parse_body("axes:2,1", 2).unwrap().unwrap();
        assert!((a.radial(&[1.0, 0.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn body_files() {
        let dir = tempfile::tempdir().unwrap();
        let poly = dir.path().join("hex.txt");
        std::fs::write(&poly, "# upper half\n1 0\n0.5 0.8660254037844386\n-0.5 0.8660254037844386\n").unwrap();
        let b = parse_body(&format!("polygon:{}", poly.display()), 2).unwrap().unwrap();
        assert!((b.support(&[1.0, 0.0]) - 1.0).abs() < 1e-12);
        let mat = dir.path().join("a.txt");
        std::fs::write(&mat, "1 0\n0 -1\n").unwrap();
        let img = parse_body(&format!("image:t=0.5,a={},(square)", mat.display()), 2)
            .unwrap()
            .unwrap();
        assert!((img.support(&[1.0, 0.0]) - 0.5f64.exp()).abs() < 1e-12);
        let img = parse_body(&format!("image:t=0.5,a={}", mat.display()), 2).unwrap().unwrap();
        assert!((img.radial(&[0.0, 1.0]) - (-0.5f64).exp()).abs() < 1e-12);
        assert!(matches!(parse_body("polygon:/nonexistent/p.txt", 2), Err(LabError::Io { .. })));
    }

    #[test]
    fn body_errors() {
        for bad in [
            "square:x=1",
            "blob",
            "ellipsoid:1,0",
            "ellipsoid:1,2,1",
            "lq:q=0.5",
            "comb:l=0.5,(square)",
            "dilate:c=2",
            "comb:l=2,(square),(diamond)",
        ] {
            assert!(parse_body(bad, 2).is_err(), "{bad}");
        }
        assert!(parse_body("square", 3).is_err());
        assert!(parse_body("ellipsoid:1,0,1", 3).is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("-1:1:21").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!((g[0], g[10], g[20]), (-1.0, 0.0, 1.0));
        for bad in ["1:0:5", "0:1", "0:1:1", "a:1:5", "0:1:-3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn matrices() {
        let m = parse_matrix_text("0 1 # swap\n1 0\n").unwrap();
        assert_eq!(m.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert!(parse_matrix_text("1 2\n3\n").is_err());
        assert!(parse_matrix_text("\n# nothing\n").is_err());
        assert!(parse_matrix_text("1 x\n").is_err());
    }

    #[test]
    fn functions() {
        let w = RadialWeight::gaussian();
        let id = Matrix::identity(2);
        let sq = SymmetricBody::square();
        let c = ctx(&w, &id, Some(&sq));
        let f = parse_function("linear:e2", &c).unwrap().unwrap();
        assert_eq!((f.value(&[3.0, 4.0]), f.parity()), (4.0, Parity::Odd));
        let f = parse_function("linear:1,1", &c).unwrap().unwrap();
        assert_eq!(f.value(&[3.0, 4.0]), 7.0);
        let f = parse_function("bl-extremal", &c).unwrap().unwrap();
        assert!((f.value(&[3.0, 4.0]) - 25.0).abs() < 1e-12);
        let f = parse_function("poly:1@2,0;0.5@0,2", &c).unwrap().unwrap();
        assert_eq!((f.value(&[2.0, 2.0]), f.parity()), (6.0, Parity::Even));
        let f = parse_function("gauge2", &c).unwrap().unwrap();
        assert_eq!(f.value(&[0.5, -2.0]), 4.0);
        let f = parse_function("gauge2:(diamond)", &c).unwrap().unwrap();
        assert_eq!(f.value(&[0.5, -0.5]), 1.0);
        let f = parse_function("radial:p=2", &c).unwrap().unwrap();
        assert_eq!(f.value(&[3.0, 4.0]), 25.0);
        assert!(parse_function("none", &c).unwrap().is_none());
        let a = parse_function("random:odd,5", &c).unwrap().unwrap();
        let b = parse_function("random:odd,5", &c).unwrap().unwrap();
        assert_eq!(a.value(&[0.3, 0.7]), b.value(&[0.3, 0.7]));
        assert_eq!(a.parity(), Parity::Odd);
        for bad in [
            "linear:e3",
            "linear:e0",
            "linear:1,2,3",
            "poly:1@2",
            "random:both,3",
            "radial:p=0",
            "sine",
        ] {
            assert!(parse_function(bad, &c).is_err(), "{bad}");
        }
        let none = ctx(&w, &id, None);
        assert!(parse_function("gauge2", &none).is_err());
    }

    #[test]
    fn bases() {
        assert_eq!(parse_basis("basis:odd,3").unwrap(), (Parity::Odd, 3));
        assert_eq!(parse_basis("basis:even,4").unwrap(), (Parity::Even, 4));
        assert!(parse_basis("basis:odd").is_err());
        assert!(parse_basis("odd,3").is_err());
    }

    fn weight_strategy() -> impl Strategy<Value = RadialWeight> {
        let leaf = prop_oneof![
            (0.1f64..5.0).prop_map(|p| RadialWeight::power(p).unwrap()),
            (0.1f64..5.0, 0.0f64..4.0).prop_map(|(a, b)| RadialWeight::cauchy(a, b).unwrap()),
            (-3.0f64..3.0).prop_map(|c| RadialWeight::constant(c).unwrap()),
        ];
        leaf.prop_recursive(3, 8, 2, |inner| {
            prop_oneof![
                (0.0f64..2.0, inner.clone()).prop_map(|(a, w)| RadialWeight::log_perturbed(a, w).unwrap()),
                (inner.clone(), inner).prop_map(|(l, r)| RadialWeight::sum(l, r)),
            ]
        })
    }

    proptest! {
        #[test]
        fn weight_labels_round_trip(w in weight_strategy(), t in 0.1f64..10.0) {
            let back = parse_weight(w.label()).unwrap();
            prop_assert_eq!(back.label(), w.label());
            prop_assert_eq!(back.eval(t), w.eval(t));
        }
    }
}
