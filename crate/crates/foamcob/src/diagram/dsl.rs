//! Line-oriented text form.
//!
//! ```text
//! ring Q
//! bottom 1 u; 1 v        # optional, for open diagrams
//! cup_w 1@1
//! gate 1 u [5]@1; id 2 v@2
//! cap_w 1@1
//! skip                   # a slice of identities
//! ```
//!
//! A header followed by `;` on the same line switches that line to compact
//! form, where every `;`-separated item is its own slice:
//! `ring Q; cup_w 1@1; cap_w 1@1;`.

use super::types::{Dir, Placed, Slice, SlicedDiagram, Strand, Tile};
use super::{validate_diagram, DiagramError, DiagramResult};
use crate::exactalg::{Matrix, RingSpec};

struct Line<'a> {
    no: usize,
    col: usize,
    text: &'a str,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> DiagramError {
    DiagramError::Syntax { line, col, msg: msg.into() }
}

/// Splits at `;` outside square brackets, keeping byte offsets.
fn split_top(s: &str) -> Vec<(usize, &str)> {
    let mut out = vec![];
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ';' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

fn trim_at(col: usize, s: &str) -> (usize, &str) {
    let lead = s.len() - s.trim_start().len();
    (col + s[..lead].chars().count(), s.trim())
}

fn logical_lines(text: &str) -> Vec<Line<'_>> {
    let mut out = vec![];
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let (col, t) = trim_at(1, body);
        if t.is_empty() {
            continue;
        }
        if !seen_header {
            seen_header = true;
            let parts = split_top(body);
            if t.starts_with("ring") && parts.len() > 1 {
                for (off, part) in parts {
                    let (c, p) = trim_at(1 + body[..off].chars().count(), part);
                    if !p.is_empty() {
                        out.push(Line { no, col: c, text: p });
                    }
                }
                continue;
            }
        }
        out.push(Line { no, col, text: t });
    }
    out
}

#[derive(Debug)]
enum Tok<'a> {
    Word(&'a str),
    Bracket(&'a str),
}

fn tokenize(line: usize, col: usize, s: &str) -> DiagramResult<Vec<(usize, Tok<'_>)>> {
    let mut out = vec![];
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (b, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let here = col + k;
        if c == '[' {
            let mut j = k;
            while j < chars.len() && chars[j].1 != ']' {
                j += 1;
            }
            if j == chars.len() {
                return Err(syntax(line, here, "unclosed `[`"));
            }
            let e = chars[j].0 + 1;
            out.push((here, Tok::Bracket(&s[b..e])));
            k = j + 1;
        } else {
            let mut j = k;
            while j < chars.len() && !chars[j].1.is_whitespace() && chars[j].1 != '[' {
                j += 1;
            }
            let e = if j < chars.len() { chars[j].0 } else { s.len() };
            out.push((here, Tok::Word(&s[b..e])));
            k = j;
        }
    }
    Ok(out)
}

struct Args<'a> {
    line: usize,
    end_col: usize,
    toks: std::vec::IntoIter<(usize, Tok<'a>)>,
}

impl<'a> Args<'a> {
    fn count(&mut self) -> DiagramResult<usize> {
        match self.toks.next() {
            Some((c, Tok::Word(w))) => w.parse().map_err(|_| syntax(self.line, c, format!("expected a rank, found `{w}`"))),
            Some((c, _)) => Err(syntax(self.line, c, "expected a rank")),
            None => Err(syntax(self.line, self.end_col, "missing rank")),
        }
    }

    fn dir(&mut self) -> DiagramResult<Dir> {
        match self.toks.next() {
            Some((c, Tok::Word(w))) => {
                Dir::from_letter(w).ok_or_else(|| syntax(self.line, c, format!("expected u or v, found `{w}`")))
            }
            Some((c, _)) => Err(syntax(self.line, c, "expected u or v")),
            None => Err(syntax(self.line, self.end_col, "missing direction")),
        }
    }

    fn matrix(&mut self, ring: RingSpec, optional: bool) -> DiagramResult<Option<Matrix>> {
        match self.toks.next() {
            Some((c, Tok::Bracket(b))) => Matrix::parse_literal(ring, b)
                .map(Some)
                .map_err(|e| syntax(self.line, c, e.to_string())),
            Some((c, Tok::Word(w))) => Err(syntax(self.line, c, format!("expected a matrix, found `{w}`"))),
            None if optional => Ok(None),
            None => Err(syntax(self.line, self.end_col, "missing matrix")),
        }
    }

    fn finish(mut self) -> DiagramResult<()> {
        match self.toks.next() {
            Some((c, _)) => Err(syntax(self.line, c, "unexpected extra argument")),
            None => Ok(()),
        }
    }
}

fn parse_tile(ring: RingSpec, line: usize, col: usize, item: &str) -> DiagramResult<Placed> {
    let at = item.rfind('@').ok_or_else(|| syntax(line, col + item.chars().count(), "missing `@<pos>`"))?;
    let pos_col = col + item[..at].chars().count() + 1;
    let pos_text = item[at + 1..].trim();
    let pos: usize = pos_text
        .parse()
        .ok()
        .filter(|&p| p >= 1)
        .ok_or_else(|| syntax(line, pos_col, format!("position must be a positive integer, found `{pos_text}`")))?;
    let mut toks = tokenize(line, col, &item[..at])?.into_iter();
    let name = match toks.next() {
        Some((_, Tok::Word(w))) => w,
        _ => return Err(syntax(line, col, "missing tile name")),
    };
    let mut a = Args { line, end_col: pos_col - 1, toks };
    let identity = |n| Matrix::identity(ring, n);
    let tile = match name {
        "id" => Tile::Id { rank: a.count()?, dir: a.dir()? },
        "gate" => {
            let rank = a.count()?;
            let dir = a.dir()?;
            Tile::Gate { rank, dir, m: a.matrix(ring, false)?.unwrap() }
        }
        "cup_e" => Tile::CupE { rank: a.count()? },
        "cup_w" => Tile::CupW { rank: a.count()? },
        "cap_e" => Tile::CapE { rank: a.count()? },
        "cap_w" => Tile::CapW { rank: a.count()? },
        "join" | "fork" => {
            let r1 = a.count()?;
            let r2 = a.count()?;
            let dir = a.dir()?;
            let iso = a.matrix(ring, true)?.unwrap_or_else(|| identity(r1 + r2));
            if name == "join" {
                Tile::Join { r1, r2, dir, iso }
            } else {
                Tile::Fork { r1, r2, dir, iso }
            }
        }
        "cross" => Tile::Cross { r1: a.count()?, r2: a.count()?, dir: a.dir()? },
        other => return Err(syntax(line, col, format!("unknown tile `{other}`"))),
    };
    a.finish()?;
    Ok(Placed::new(pos - 1, tile))
}

/// Parses and validates a diagram.
pub fn parse_diagram(text: &str) -> DiagramResult<SlicedDiagram> {
    let lines = logical_lines(text);
    let mut it = lines.iter().peekable();
    let head = it.next().ok_or_else(|| syntax(1, 1, "empty input; expected `ring <spec>`"))?;
    let spec = head
        .text
        .strip_prefix("ring")
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| syntax(head.no, head.col, "expected `ring <spec>`"))?;
    let ring: RingSpec = spec.trim().parse().map_err(|e: crate::exactalg::ExactError| {
        syntax(head.no, head.col + 5, e.to_string())
    })?;
    let mut d = SlicedDiagram::new(ring);
    if let Some(l) = it.peek() {
        if let Some(rest) = l.text.strip_prefix("bottom") {
            let base = l.col + 6;
            for (off, part) in split_top(rest) {
                let (c, p) = trim_at(base + rest[..off].chars().count(), part);
                if p.is_empty() {
                    continue;
                }
                let mut a = Args { line: l.no, end_col: c + p.chars().count(), toks: tokenize(l.no, c, p)?.into_iter() };
                let s = Strand::new(a.count()?, a.dir()?);
                a.finish()?;
                d.bottom.push(s);
            }
            it.next();
        }
    }
    for l in it {
        if l.text == "skip" {
            d.slices.push(Slice::default());
            continue;
        }
        let mut slice = Slice::default();
        for (off, part) in split_top(l.text) {
            let (c, p) = trim_at(l.col + l.text[..off].chars().count(), part);
            if !p.is_empty() {
                slice.tiles.push(parse_tile(ring, l.no, c, p)?);
            }
        }
        d.slices.push(slice);
    }
    let diags = validate_diagram(&d);
    if let Some(first) = diags.first() {
        return Err(match first.slice {
            Some(slice) => DiagramError::Semantic { slice, msg: first.message.clone() },
            None => DiagramError::Invalid(diags),
        });
    }
    Ok(d)
}

fn tile_text(t: &Tile) -> String {
    let opt_iso = |iso: &Matrix| if iso.is_identity() { String::new() } else { format!(" {}", iso.to_literal()) };
    match t {
        Tile::Id { rank, dir } => format!("id {rank} {}", dir.letter()),
        Tile::Gate { rank, dir, m } => format!("gate {rank} {} {}", dir.letter(), m.to_literal()),
        Tile::CupE { rank } | Tile::CupW { rank } | Tile::CapE { rank } | Tile::CapW { rank } => {
            format!("{} {rank}", t.name())
        }
        Tile::Join { r1, r2, dir, iso } | Tile::Fork { r1, r2, dir, iso } => {
            format!("{} {r1} {r2} {}{}", t.name(), dir.letter(), opt_iso(iso))
        }
        Tile::Cross { r1, r2, dir } => format!("cross {r1} {r2} {}", dir.letter()),
    }
}

/// Canonical text; `parse_diagram` inverts it exactly.
pub fn serialize_diagram(d: &SlicedDiagram) -> String {
    let mut s = format!("ring {}\n", d.ring);
    if !d.bottom.is_empty() {
        let b: Vec<String> = d.bottom.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("bottom {}\n", b.join("; ")));
    }
    for slice in &d.slices {
        if slice.tiles.is_empty() {
            s.push_str("skip\n");
            continue;
        }
        let tiles: Vec<String> = slice.tiles.iter().map(|p| format!("{}@{}", tile_text(&p.tile), p.pos + 1)).collect();
        s.push_str(&tiles.join("; "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_circle() {
        let d = parse_diagram("ring Q; cup_w 1@1; cap_w 1@1;").unwrap();
        assert_eq!(d.slices.len(), 2);
        assert!(d.is_closed());
        assert_eq!(serialize_diagram(&d), "ring Q\ncup_w 1@1\ncap_w 1@1\n");
    }

    #[test]
    fn gate_matrix() {
        let d = parse_diagram("ring Q\ncup_w 1@1\ngate 1 u [2]@1\ncap_w 1@1\n").unwrap();
        match &d.slices[1].tiles[0].tile {
            Tile::Gate { m, .. } => assert_eq!(m.get(0, 0).to_string(), "2"),
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn semantic_error_names_slice() {
        let e = parse_diagram("ring Q\ncup_w 1@1\ncap_w 1@2\n").unwrap_err();
        assert!(matches!(e, DiagramError::Semantic { slice: 1, .. }), "{e}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_diagram("ring Q\ncup_w x@1\n").unwrap_err();
        assert_eq!(e, DiagramError::Syntax { line: 2, col: 7, msg: "expected a rank, found `x`".into() });
        assert!(matches!(parse_diagram("ring Q\nfoo 1@1"), Err(DiagramError::Syntax { line: 2, .. })));
        assert!(matches!(parse_diagram("ring Q\ncup_w 1@0"), Err(DiagramError::Syntax { .. })));
        assert!(matches!(parse_diagram("ring Q\ngate 1 u [1@1"), Err(DiagramError::Syntax { .. })));
        assert!(matches!(parse_diagram("cup_w 1@1"), Err(DiagramError::Syntax { line: 1, .. })));
    }

    #[test]
    fn canonical_round_trip() {
        let text = "ring Fp:7\nbottom 2 u; 1 v\nfork 1 1 u [0,1;1,0]@1; id 1 v@2\nskip\njoin 1 1 u@1\n";
        let d = parse_diagram(text).unwrap();
        assert_eq!(serialize_diagram(&d), text);
        let t2 = "ring Q\ncup_w 2@1\ngate 2 u [1/2,0;0,-3]@1\ncross 1 1 u@1; cap_e 0@3\n";
        assert!(parse_diagram(t2).is_err());
    }
}
