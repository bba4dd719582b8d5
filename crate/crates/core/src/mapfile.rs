//! Plain-text map format.
//!
//! ```text
//! # comment
//! attach = 0
//! line:
//!   0 -> L 0
//!   1 -> L 1
//! branch:
//!   0 -> L 0
//!   1 -> B 1 1
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pamap::PAMap;
use crate::rational::{parse_rational, Rational};
use crate::space::{parse_point, Point, Sigma};

enum Section {
    None,
    Line,
    Branch,
}

/// Parses a map file and validates the result.
pub fn parse_map(text: &str) -> Result<PAMap> {
    let mut attach: Option<Rational> = None;
    let mut section = Section::None;
    let mut line: Vec<(Rational, Point, usize)> = Vec::new();
    let mut branch: Vec<(Rational, Point, usize)> = Vec::new();
    let err = |line: usize, message: String| Error::Parse { line, message };

    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("attach") {
            let value = rest
                .trim()
                .strip_prefix('=')
                .ok_or_else(|| err(n, "expected `attach = <rational>`".into()))?;
            attach = Some(parse_rational(value).map_err(|e| err(n, e))?);
            continue;
        }
        match content {
            "line:" => {
                section = Section::Line;
                continue;
            }
            "branch:" => {
                section = Section::Branch;
                continue;
            }
            _ => {}
        }
        let (lhs, rhs) = content
            .split_once("->")
            .ok_or_else(|| err(n, format!("expected `<coordinate> -> <point>`, got `{content}`")))?;
        let at = parse_rational(lhs).map_err(|e| err(n, e))?;
        let parsed = parse_point(rhs.trim()).map_err(|e| err(n, e))?;
        // The attachment offset only affects canonical form; resolved below.
        let target = match section {
            Section::Line => &mut line,
            Section::Branch => &mut branch,
            Section::None => return Err(err(n, "entry outside a `line:` or `branch:` block".into())),
        };
        let pt = match parsed.0 {
            'L' => Point::Line(parsed.1[0].clone()),
            _ => Point::Branch {
                copy: crate::rational::floor_i64(&parsed.1[0]),
                height: parsed.1[1].clone(),
            },
        };
        target.push((at, pt, n));
    }

    let attach = attach.unwrap_or_default();
    let sigma = Sigma::new(attach.clone()).map_err(|e| err(0, e.to_string()))?;
    let check = |v: &[(Rational, Point, usize)]| -> Result<()> {
        for (_, p, n) in v {
            if let Point::Branch { height, .. } = p {
                if height < &Rational::default() || height > &crate::rational::one() {
                    return Err(err(*n, format!("height {height} outside [0, 1]")));
                }
            }
        }
        Ok(())
    };
    check(&line)?;
    check(&branch)?;
    let strip = |v: Vec<(Rational, Point, usize)>| -> Vec<(Rational, Point)> {
        v.into_iter().map(|(a, p, _)| (a, sigma.canonicalize(p))).collect()
    };
    PAMap::new(attach, strip(line), strip(branch))
}

/// Renders a map in the format accepted by [`parse_map`].
pub fn format_map(m: &PAMap) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "attach = {}", m.sigma().attach());
    s.push_str("line:\n");
    for b in m.line_breaks() {
        let _ = writeln!(s, "  {} -> {}", b.at, b.image);
    }
    s.push_str("branch:\n");
    for b in m.branch_breaks() {
        let _ = writeln!(s, "  {} -> {}", b.at, b.image);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sigma_example, SIGMA_EXAMPLE};

    #[test]
    fn roundtrip() {
        let m = parse_map(SIGMA_EXAMPLE).unwrap();
        assert_eq!(m, sigma_example());
        assert_eq!(parse_map(&format_map(&m)).unwrap(), m);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_map("attach = 0\nline:\n 0 -> L 0\n 1 => L 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = parse_map("attach = 0\n0 -> L 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_map("line:\n 0 -> B 0 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn invalid_maps_are_rejected() {
        let text = "line:\n 0 -> L 0\n 1 -> L 2\nbranch:\n 0 -> L 0\n 1 -> B 0 1\n";
        assert!(matches!(parse_map(text), Err(Error::InvalidMap(_))));
    }
}
