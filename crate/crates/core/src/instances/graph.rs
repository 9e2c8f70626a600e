use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Weighted undirected graph stored as a symmetric sparse adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds from undirected edges; each `(u, v, w)` adds `w` to both
    /// `w_uv` and `w_vu`, so duplicates are summed.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) outside {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at {u}")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) has weight {w}")));
            }
            *acc.entry((u, v)).or_default() += w;
            *acc.entry((v, u)).or_default() += w;
        }
        let mut offsets = vec![0; n + 1];
        for &(u, _) in acc.keys() {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let (targets, weights) = acc.into_iter().map(|((_, v), w)| (v, w)).unzip();
        Ok(Self {
            n,
            offsets,
            targets,
            weights,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let r = self.offsets[i]..self.offsets[i + 1];
        match self.targets[r.clone()].binary_search(&j) {
            Ok(pos) => self.weights[r.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.neighbors(i).map(|(_, w)| w).sum()
    }

    /// Each undirected edge once, with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|u| self.neighbors(u).filter(move |(v, _)| *v > u).map(move |(v, w)| (u, v, w)))
            .collect()
    }

    /// Keeps only edges with both endpoints in `keep`.
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let mut offsets = vec![0; self.n + 1];
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        for u in 0..self.n {
            if keep[u] {
                for (v, w) in self.neighbors(u) {
                    if keep[v] {
                        targets.push(v);
                        weights.push(w);
                    }
                }
            }
            offsets[u + 1] = targets.len();
        }
        Graph {
            n: self.n,
            offsets,
            targets,
            weights,
        }
    }

    /// Entrywise sum of graphs on the same vertex set.
    pub fn sum(graphs: &[&Graph]) -> Result<Graph> {
        let n = graphs.first().map_or(0, |g| g.n);
        let mut edges = Vec::new();
        for g in graphs {
            if g.n != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.n });
            }
            edges.extend(g.edges());
        }
        Graph::from_edges(n, &edges)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        let mut out: Box<dyn Write> = if is_gzip(path) {
            Box::new(GzEncoder::new(BufWriter::new(file), Compression::default()))
        } else {
            Box::new(BufWriter::new(file))
        };
        writeln!(out, "# {} vertices, {} edges", self.n, self.edge_count())?;
        for (u, v, w) in self.edges() {
            writeln!(out, "{u} {v} {w}")?;
        }
        out.flush()?;
        Ok(())
    }
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

/// Reads `u v [w]` lines (0-indexed, default weight 1, `#` comments).
/// Files ending in `.gz` are decompressed.
pub fn load_edge_list(path: &Path) -> Result<Graph> {
    let file = File::open(path)?;
    let reader: Box<dyn Read> = if is_gzip(path) {
        Box::new(GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    let graph = parse_edge_list(BufReader::new(reader))?;
    log::info!(
        "loaded {}: {} vertices, {} edges",
        path.display(),
        graph.vertex_count(),
        graph.edge_count()
    );
    Ok(graph)
}

pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: lineno, message };
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(format!("expected `u v [w]`, got `{text}`")));
        }
        let vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(format!("bad vertex `{s}`")))
        };
        let u = vertex(fields[0])?;
        let v = vertex(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| parse_err(format!("bad weight `{s}`")))?,
            None => 1.0,
        };
        if u == v {
            return Err(parse_err(format!("self-loop at vertex {u}")));
        }
        if !(w >= 0.0) || !w.is_finite() {
            return Err(parse_err(format!("negative or invalid weight {w}")));
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    Graph::from_edges(n, &edges)
}

/// Erdős–Rényi graph with i.i.d. `Uniform[wmin, wmax]` weights.
pub fn gen_random_graph(n: usize, edge_prob: f64, weight_range: (f64, f64), seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidArgument(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let (lo, hi) = weight_range;
    if !(lo >= 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad weight range [{lo}, {hi}]")));
    }
    let mut rng = RngStream::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.uniform() < edge_prob {
                edges.push((u, v, rng.uniform_in(lo, hi)));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Graph> {
        parse_edge_list(s.as_bytes())
    }

    #[test]
    fn path_graph() {
        let g = parse("0 1\n1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            assert_eq!(g.weight(i, j), 1.0);
        }
        assert_eq!(g.weight(0, 2), 0.0);
    }

    #[test]
    fn empty_and_duplicates() {
        assert_eq!(parse("").unwrap().vertex_count(), 0);
        let g = parse("# comment\n0 1 2.5\n0 1 0.5").unwrap();
        assert_eq!(g.weight(0, 1), 3.0);
        assert_eq!(g.weight(1, 0), 3.0);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse("0 1\n2 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("0 1 -1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0 x"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn random_graphs() {
        assert_eq!(gen_random_graph(5, 0.0, (1.0, 1.0), 1).unwrap().edge_count(), 0);
        assert_eq!(gen_random_graph(3, 1.0, (1.0, 1.0), 1).unwrap().edge_count(), 3);
        let a = gen_random_graph(100, 0.1, (0.5, 1.5), 1).unwrap();
        let b = gen_random_graph(100, 0.1, (0.5, 1.5), 2).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, gen_random_graph(100, 0.1, (0.5, 1.5), 1).unwrap());
    }

    #[test]
    fn gzip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = gen_random_graph(30, 0.2, (0.0, 2.0), 4).unwrap();
        for name in ["g.txt", "g.txt.gz"] {
            let path = dir.path().join(name);
            g.write_edge_list(&path).unwrap();
            let back = load_edge_list(&path).unwrap();
            assert_eq!(back.edge_count(), g.edge_count());
            for (u, v, w) in g.edges() {
                assert!((back.weight(u, v) - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn induced_and_sum() {
        let g = parse("0 1\n1 2\n0 2 2").unwrap();
        let h = g.induced(&[true, false, true]);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.weight(2, 0), 2.0);
        let s = Graph::sum(&[&g, &h]).unwrap();
        assert_eq!(s.weight(0, 2), 4.0);
        assert_eq!(s.weight(0, 1), 1.0);
    }
}
