//! JSON mirror of the text form. Positions are 1-based in both.

use serde_json::{json, Map, Value as Json};

use super::types::{Dir, Placed, Slice, SlicedDiagram, Strand, Tile};
use super::{ensure_valid, DiagramError, DiagramResult};
use crate::exactalg::{Matrix, RingSpec};

fn dir_json(d: Dir) -> Json {
    json!(d.letter())
}

fn tile_json(pl: &Placed) -> Json {
    let mut o = Map::new();
    o.insert("tile".into(), json!(pl.tile.name()));
    match &pl.tile {
        Tile::Id { rank, dir } => {
            o.insert("rank".into(), json!(rank));
            o.insert("dir".into(), dir_json(*dir));
        }
        Tile::Gate { rank, dir, m } => {
            o.insert("rank".into(), json!(rank));
            o.insert("dir".into(), dir_json(*dir));
            o.insert("matrix".into(), m.to_json());
        }
        Tile::CupE { rank } | Tile::CupW { rank } | Tile::CapE { rank } | Tile::CapW { rank } => {
            o.insert("rank".into(), json!(rank));
        }
        Tile::Join { r1, r2, dir, iso } | Tile::Fork { r1, r2, dir, iso } => {
            o.insert("r1".into(), json!(r1));
            o.insert("r2".into(), json!(r2));
            o.insert("dir".into(), dir_json(*dir));
            o.insert("iso".into(), iso.to_json());
        }
        Tile::Cross { r1, r2, dir } => {
            o.insert("r1".into(), json!(r1));
            o.insert("r2".into(), json!(r2));
            o.insert("dir".into(), dir_json(*dir));
        }
    }
    o.insert("pos".into(), json!(pl.pos + 1));
    Json::Object(o)
}

pub fn diagram_to_json(d: &SlicedDiagram) -> Json {
    let bottom: Vec<Json> = d.bottom.iter().map(|s| json!({"rank": s.rank, "dir": s.dir.letter()})).collect();
    let slices: Vec<Json> = d.slices.iter().map(|s| Json::Array(s.tiles.iter().map(tile_json).collect())).collect();
    json!({ "ring": d.ring.to_string(), "bottom": bottom, "slices": slices })
}

fn bad(msg: impl Into<String>) -> DiagramError {
    DiagramError::Json(msg.into())
}

fn field<'a>(o: &'a Json, k: &str, at: &str) -> DiagramResult<&'a Json> {
    o.get(k).ok_or_else(|| bad(format!("{at}: missing `{k}`")))
}

fn count(o: &Json, k: &str, at: &str) -> DiagramResult<usize> {
    field(o, k, at)?.as_u64().map(|v| v as usize).ok_or_else(|| bad(format!("{at}: `{k}` must be a count")))
}

fn dir(o: &Json, at: &str) -> DiagramResult<Dir> {
    field(o, "dir", at)?.as_str().and_then(Dir::from_letter).ok_or_else(|| bad(format!("{at}: `dir` must be u or v")))
}

fn matrix(ring: RingSpec, o: &Json, k: &str, at: &str) -> DiagramResult<Matrix> {
    Matrix::from_json(ring, field(o, k, at)?).map_err(|e| bad(format!("{at}: {e}")))
}

fn tile_from(ring: RingSpec, o: &Json, at: &str) -> DiagramResult<Placed> {
    let name = field(o, "tile", at)?.as_str().ok_or_else(|| bad(format!("{at}: `tile` must be a string")))?;
    let pos = count(o, "pos", at)?;
    if pos == 0 {
        return Err(bad(format!("{at}: `pos` is 1-based")));
    }
    let rank = || count(o, "rank", at);
    let pair = || Ok::<_, DiagramError>((count(o, "r1", at)?, count(o, "r2", at)?));
    let iso = |n: usize| match o.get("iso") {
        Some(_) => matrix(ring, o, "iso", at),
        None => Ok(Matrix::identity(ring, n)),
    };
    let tile = match name {
        "id" => Tile::Id { rank: rank()?, dir: dir(o, at)? },
        "gate" => Tile::Gate { rank: rank()?, dir: dir(o, at)?, m: matrix(ring, o, "matrix", at)? },
        "cup_e" => Tile::CupE { rank: rank()? },
        "cup_w" => Tile::CupW { rank: rank()? },
        "cap_e" => Tile::CapE { rank: rank()? },
        "cap_w" => Tile::CapW { rank: rank()? },
        "join" => {
            let (r1, r2) = pair()?;
            Tile::Join { r1, r2, dir: dir(o, at)?, iso: iso(r1 + r2)? }
        }
        "fork" => {
            let (r1, r2) = pair()?;
            Tile::Fork { r1, r2, dir: dir(o, at)?, iso: iso(r1 + r2)? }
        }
        "cross" => {
            let (r1, r2) = pair()?;
            Tile::Cross { r1, r2, dir: dir(o, at)? }
        }
        other => return Err(bad(format!("{at}: unknown tile `{other}`"))),
    };
    Ok(Placed::new(pos - 1, tile))
}

/// Reads and validates a diagram.
pub fn diagram_from_json(v: &Json) -> DiagramResult<SlicedDiagram> {
    let ring: RingSpec = field(v, "ring", "diagram")?
        .as_str()
        .ok_or_else(|| bad("`ring` must be a string"))?
        .parse()
        .map_err(|e: crate::exactalg::ExactError| bad(e.to_string()))?;
    let mut d = SlicedDiagram::new(ring);
    if let Some(b) = v.get("bottom") {
        for (i, s) in b.as_array().ok_or_else(|| bad("`bottom` must be an array"))?.iter().enumerate() {
            let at = format!("bottom[{i}]");
            d.bottom.push(Strand::new(count(s, "rank", &at)?, dir(s, &at)?));
        }
    }
    let slices = field(v, "slices", "diagram")?.as_array().ok_or_else(|| bad("`slices` must be an array"))?;
    for (k, s) in slices.iter().enumerate() {
        let tiles = s.as_array().ok_or_else(|| bad(format!("slice {k} must be an array")))?;
        let tiles = tiles
            .iter()
            .enumerate()
            .map(|(t, o)| tile_from(ring, o, &format!("slice {k} tile {t}")))
            .collect::<DiagramResult<Vec<_>>>()?;
        d.slices.push(Slice { tiles });
    }
    ensure_valid(&d)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;

    #[test]
    fn round_trip() {
        let text = "ring Zmod:12\nbottom 2 u\nfork 1 1 u [5,0;0,7]@1\ncross 1 1 u@1\njoin 1 1 u@1\nskip\n";
        let d = parse_diagram(text).unwrap();
        let j = diagram_to_json(&d);
        assert_eq!(j["slices"][0][0]["pos"], 1);
        let back = diagram_from_json(&j).unwrap();
        assert_eq!(back, d);
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(serde_json::to_string(&diagram_to_json(&back)).unwrap(), s);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(diagram_from_json(&json!({"ring": "Q"})).is_err());
        let j = json!({"ring": "Q", "slices": [[{"tile": "cap_w", "rank": 1, "pos": 1}]]});
        assert!(matches!(diagram_from_json(&j), Err(DiagramError::Invalid(_))));
    }
}
