//! Static SVG diagnostics: a Tutte embedding of the base 1-skeleton with
//! layers for the branch set, G₀, minimal cycles and the fiber product.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::Cover;
use crate::error::{pre, Result};
use crate::graphs::{build_fiber_product, build_g0, build_g0_tilde, find_minimal_cycles};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Base,
    Cover,
    G0,
    Cycles,
    Fiber,
}

impl Layer {
    pub fn parse(s: &str) -> Option<Layer> {
        Some(match s {
            "base" => Layer::Base,
            "cover" => Layer::Cover,
            "G0" | "g0" => Layer::G0,
            "cycles" => Layer::Cycles,
            "fiber" => Layer::Fiber,
            _ => return None,
        })
    }
}

/// Seed from TOOL_SEED, 0 when unset or unparsable.
pub fn layout_seed() -> u64 {
    std::env::var("TOOL_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

const SIZE: f64 = 800.0;

/// Tutte embedding: the vertices of one face (chosen by the seed) are pinned
/// to a regular polygon and every other vertex sits at the average of its
/// neighbours (Gauss–Seidel until the largest move is below 1e-9).
pub fn tutte_layout(c: &Cover, seed: u64) -> Vec<(f64, f64)> {
    let b = &c.base;
    let n = b.verts.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer = rng.gen_range(0..b.faces.len());
    let ring = &b.face_verts[outer];
    let mut pos = vec![(0.0, 0.0); n];
    let mut pinned = vec![false; n];
    let r = SIZE * 0.45;
    for (i, &v) in ring.iter().enumerate() {
        let t = std::f64::consts::TAU * i as f64 / ring.len() as f64;
        pos[v] = (SIZE / 2.0 + r * t.cos(), SIZE / 2.0 - r * t.sin());
        pinned[v] = true;
    }
    for v in 0..n {
        if !pinned[v] {
            pos[v] = (SIZE / 2.0, SIZE / 2.0);
        }
    }
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| b.vertex_edges(v).iter().map(|&e| b.other_end(e, v)).collect()).collect();
    for _ in 0..100_000 {
        let mut moved: f64 = 0.0;
        for v in 0..n {
            if pinned[v] || nbrs[v].is_empty() {
                continue;
            }
            let k = nbrs[v].len() as f64;
            let x = nbrs[v].iter().map(|&u| pos[u].0).sum::<f64>() / k;
            let y = nbrs[v].iter().map(|&u| pos[u].1).sum::<f64>() / k;
            moved = moved.max((x - pos[v].0).abs() + (y - pos[v].1).abs());
            pos[v] = (x, y);
        }
        if moved < 1e-9 {
            break;
        }
    }
    pos
}

fn style() -> &'static str {
    "<style>.edge{stroke:#999;stroke-width:1}.vertex{fill:#333}.branch{fill:#c22}\
     .g0{stroke:#16a;stroke-width:3}.g0v{fill:#16a}.cycle{fill:#fc3;fill-opacity:0.6;stroke:#b80}\
     .fiber{stroke:#195;stroke-width:3}text{font:9px sans-serif}</style>"
}

/// Deterministic for a given seed: coordinates are printed with two decimals.
pub fn render_svg(c: &Cover, layer: Layer, seed: u64) -> Result<String> {
    let b = &c.base;
    if b.faces.is_empty() {
        return pre("nothing to draw");
    }
    let pos = tutte_layout(c, seed);
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">{}",
        style()
    );
    let p = |v: usize| format!("{:.2},{:.2}", pos[v].0, pos[v].1);
    if layer == Layer::Cycles {
        for cyc in find_minimal_cycles(c, &build_g0(c)) {
            let f = b.face(&cyc.cell)?;
            let pts: Vec<String> = b.face_verts[f].iter().map(|&v| p(v)).collect();
            let _ = write!(s, "<polygon class=\"cycle\" data-id=\"{}\" points=\"{}\"/>", cyc.cell, pts.join(" "));
        }
    }
    for e in 0..b.edges.len() {
        let [u, v] = b.edge_ends[e];
        let _ = write!(s, "<line class=\"edge\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", pos[u].0, pos[u].1, pos[v].0, pos[v].1);
    }
    let highlight: Vec<usize> = match layer {
        Layer::G0 => build_g0(c).edges.iter().map(|(id, _)| b.edge(id)).collect::<Result<_>>()?,
        Layer::Fiber => {
            let fp = build_fiber_product(c);
            let gt = build_g0_tilde(c, &fp)?;
            let mut es: Vec<usize> = gt
                .edge_cells
                .iter()
                .filter(|&&i| !fp.edges[i].diagonal)
                .map(|&i| b.edge(&fp.edges[i].base))
                .collect::<Result<_>>()?;
            es.sort();
            es.dedup();
            es
        }
        _ => vec![],
    };
    let class = if layer == Layer::Fiber { "fiber" } else { "g0" };
    for e in highlight {
        let [u, v] = b.edge_ends[e];
        let _ = write!(
            s,
            "<line class=\"{class}\" data-id=\"{}\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
            b.edges[e], pos[u].0, pos[u].1, pos[v].0, pos[v].1
        );
    }
    let g0v: Vec<bool> = (0..b.verts.len()).map(|v| !c.branch[v]).collect();
    for v in 0..b.verts.len() {
        let class = match layer {
            Layer::Cover if c.branch[v] => "vertex branch",
            Layer::G0 if g0v[v] => "vertex g0v",
            _ => "vertex",
        };
        let _ = write!(s, "<circle class=\"{class}\" data-id=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>", b.verts[v], pos[v].0, pos[v].1);
        if layer == Layer::Cover {
            let _ = write!(s, "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>", pos[v].0 + 4.0, pos[v].1 - 4.0, c.vlifts[v].len());
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{cube2, cube_o1};

    fn count(s: &str, needle: &str) -> usize {
        s.matches(needle).count()
    }

    #[test]
    fn cube2_base_has_48_vertices() {
        let c = Cover::new(&cube2(1, 0).unwrap().section).unwrap();
        let s = render_svg(&c, Layer::Base, 0).unwrap();
        assert_eq!(count(&s, "<circle class=\"vertex"), 48);
        let g0 = render_svg(&c, Layer::G0, 0).unwrap();
        assert_eq!(count(&g0, "class=\"g0\""), 0);
        assert_eq!(count(&g0, "vertex g0v"), 0);
    }

    #[test]
    fn planted_cycle_is_highlighted() {
        let c = Cover::new(&cube_o1("planted", 1, 0).unwrap().section).unwrap();
        let s = render_svg(&c, Layer::Cycles, 0).unwrap();
        assert_eq!(count(&s, "class=\"cycle\""), 1);
    }

    #[test]
    fn stable_for_a_seed() {
        let c = Cover::new(&cube_o1("petrie", 1, 0).unwrap().section).unwrap();
        for layer in [Layer::Base, Layer::Cover, Layer::G0, Layer::Cycles, Layer::Fiber] {
            assert_eq!(render_svg(&c, layer, 5).unwrap(), render_svg(&c, layer, 5).unwrap());
        }
    }
}
