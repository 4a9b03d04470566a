//! Synthetic graph generators.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

const REGULAR_ATTEMPTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Points7,
    Points27,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// 5-point grid, `w x h` vertices.
    Grid2D(usize, usize),
    Stencil3D(usize, usize, usize, Stencil),
    Ring(usize),
    Path(usize),
    /// `n` vertices of degree `deg`, connected.
    RandomRegular { n: usize, deg: usize, seed: u64 },
    /// Preferential attachment: each new vertex links to `attach` earlier ones.
    ScaleFree { n: usize, attach: usize, seed: u64 },
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Grid2D(w, h) => write!(f, "grid2d:{w}x{h}"),
            Self::Stencil3D(x, y, z, Stencil::Points7) => write!(f, "stencil7:{x}x{y}x{z}"),
            Self::Stencil3D(x, y, z, Stencil::Points27) => write!(f, "stencil27:{x}x{y}x{z}"),
            Self::Ring(n) => write!(f, "ring:{n}"),
            Self::Path(n) => write!(f, "path:{n}"),
            Self::RandomRegular { n, deg, seed } => write!(f, "regular:{n}x{deg}@{seed}"),
            Self::ScaleFree { n, attach, seed } => write!(f, "scalefree:{n}x{attach}@{seed}"),
        }
    }
}

fn bad(s: &str) -> Error {
    Error::InvalidArgument(format!(
        "bad generator '{s}'; expected e.g. grid2d:32x32, stencil7:20x20x20, ring:8, path:5, regular:1000x4@1, scalefree:1000x3@1"
    ))
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses the same form `Display` produces; the `@seed` suffix is optional.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').ok_or_else(|| bad(s))?;
        let (dims, seed) = match rest.split_once('@') {
            Some((d, sd)) => (d, sd.parse::<u64>().map_err(|_| bad(s))?),
            None => (rest, 0),
        };
        let nums = dims
            .split('x')
            .map(|t| t.parse::<usize>().map_err(|_| bad(s)))
            .collect::<Result<Vec<_>>>()?;
        let spec = match (name.to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("grid2d", &[w, h]) => Self::Grid2D(w, h),
            ("stencil7", &[x, y, z]) => Self::Stencil3D(x, y, z, Stencil::Points7),
            ("stencil27", &[x, y, z]) => Self::Stencil3D(x, y, z, Stencil::Points27),
            ("ring", &[n]) => Self::Ring(n),
            ("path", &[n]) => Self::Path(n),
            ("regular", &[n, deg]) => Self::RandomRegular { n, deg, seed },
            ("scalefree", &[n, attach]) => Self::ScaleFree { n, attach, seed },
            _ => return Err(bad(s)),
        };
        Ok(spec)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    match *spec {
        GeneratorSpec::Grid2D(w, h) => {
            nonzero(&[w, h])?;
            let id = |x: usize, y: usize| y * w + x;
            let mut edges = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    if x + 1 < w {
                        edges.push((id(x, y), id(x + 1, y)));
                    }
                    if y + 1 < h {
                        edges.push((id(x, y), id(x, y + 1)));
                    }
                }
            }
            Graph::from_edges(w * h, &edges)
        }
        GeneratorSpec::Stencil3D(nx, ny, nz, stencil) => {
            nonzero(&[nx, ny, nz])?;
            stencil_3d(nx, ny, nz, stencil)
        }
        GeneratorSpec::Ring(n) => {
            nonzero(&[n])?;
            let mut edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            if n > 2 {
                edges.push((n - 1, 0));
            }
            Graph::from_edges(n, &edges)
        }
        GeneratorSpec::Path(n) => {
            nonzero(&[n])?;
            let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            Graph::from_edges(n, &edges)
        }
        GeneratorSpec::RandomRegular { n, deg, seed } => random_regular(n, deg, seed),
        GeneratorSpec::ScaleFree { n, attach, seed } => scale_free(n, attach, seed),
    }
}

fn nonzero(dims: &[usize]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::EmptyGraph);
    }
    Ok(())
}

fn stencil_3d(nx: usize, ny: usize, nz: usize, stencil: Stencil) -> Result<Graph> {
    let id = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut edges = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                for dz in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let manhattan = dx.abs() + dy.abs() + dz.abs();
                            if manhattan == 0 || (stencil == Stencil::Points7 && manhattan > 1) {
                                continue;
                            }
                            let (ux, uy, uz) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
                            if ux < 0 || uy < 0 || uz < 0 || ux >= nx as i64 || uy >= ny as i64 || uz >= nz as i64 {
                                continue;
                            }
                            let (a, b) = (id(x, y, z), id(ux as usize, uy as usize, uz as usize));
                            if a < b {
                                edges.push((a, b));
                            }
                        }
                    }
                }
            }
        }
    }
    Graph::from_edges(nx * ny * nz, &edges)
}

/// Pairing model: shuffle `n * deg` stubs and pair them up, rejecting
/// loops, repeated edges and disconnected results.
fn random_regular(n: usize, deg: usize, seed: u64) -> Result<Graph> {
    nonzero(&[n, deg])?;
    if deg >= n || (n * deg) % 2 == 1 {
        return Err(Error::InvalidArgument(format!("no simple {deg}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, deg)).collect();
    'attempt: for _ in 0..REGULAR_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(stubs.len() / 2);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        let g = Graph::from_edges(n, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::InvalidArgument(format!(
        "failed to sample a connected {deg}-regular graph on {n} vertices"
    )))
}

/// Barabasi-Albert growth from a clique on `attach + 1` vertices.
fn scale_free(n: usize, attach: usize, seed: u64) -> Result<Graph> {
    nonzero(&[n, attach])?;
    if n <= attach {
        return Err(Error::InvalidArgument(format!("scale-free graph needs more than {attach} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = attach + 1;
    let mut edges = Vec::new();
    // every edge endpoint once; sampling from it is degree-proportional
    let mut ends = Vec::new();
    for u in 0..core {
        for v in u + 1..core {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    for v in core..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(attach);
        while chosen.len() < attach {
            let u = ends[rng.gen_range(0..ends.len())];
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for u in chosen {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    Graph::from_edges(n, &edges)
}
