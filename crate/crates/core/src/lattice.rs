//! Qubit geometries for the kicked Ising circuits.
//!
//! A [`LatticeSpec`] carries the coupling graph with every bond tagged by the
//! colored layer it is executed in, the one-dimensional stripes along which the
//! quasiperiodic field is laid out, and (once assigned) the per-qubit field of
//! every stripe direction.
//!
//! Heavy-hex lattices are generated from a brick-wall honeycomb: degree-3
//! "corner" qubits sit on the honeycomb vertices and a "bridge" qubit sits on
//! every honeycomb side. Sides come in three orientations, and the two bonds of
//! a bridge carry the two colors of its orientation:
//!
//! ```text
//!   horizontal, even left corner   {R, G}
//!   vertical rung                  {G, B}
//!   horizontal, odd left corner    {R, B}
//! ```
//!
//! An α-stripe is a connected path of corners and the bridges carrying an
//! α-bond, i.e. a honeycomb zigzag line that skips the one orientation without
//! α. Every corner lies on one stripe per color, every bridge on two.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse golden ratio, the default incommensuration parameter.
pub fn inverse_golden_ratio() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeKind {
    Chain,
    HeavyHex,
}

/// Bond colors and stripe directions.
///
/// `Chain` is the pseudo-color keying the single stripe and field of a chain.
/// `Other(k)` appears only for imported graphs whose greedy coloring needs more
/// than three classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Chain,
    Even,
    Odd,
    Red,
    Green,
    Blue,
    Other(u8),
}

impl Color {
    /// Class index used by greedy coloring: 0, 1, 2 map to R, G, B.
    fn from_class(index: usize) -> Self {
        match index {
            0 => Color::Red,
            1 => Color::Green,
            2 => Color::Blue,
            k => Color::Other(k.min(u8::MAX as usize) as u8),
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Chain => f.write_str("chain"),
            Color::Even => f.write_str("even"),
            Color::Odd => f.write_str("odd"),
            Color::Red => f.write_str("R"),
            Color::Green => f.write_str("G"),
            Color::Blue => f.write_str("B"),
            Color::Other(k) => write!(f, "C{k}"),
        }
    }
}

impl FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "chain" => Color::Chain,
            "even" | "Even" => Color::Even,
            "odd" | "Odd" => Color::Odd,
            "R" | "r" | "red" => Color::Red,
            "G" | "g" | "green" => Color::Green,
            "B" | "b" | "blue" => Color::Blue,
            other => {
                let k = other
                    .strip_prefix('C')
                    .and_then(|k| k.parse::<u8>().ok())
                    .ok_or_else(|| Error::Coloring(format!("unknown color tag {other:?}")))?;
                Color::Other(k)
            }
        })
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An undirected bond `(a, b)` with `a < b`, executed in the layer of `color`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, Color)", into = "(usize, usize, Color)")]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub color: Color,
}

impl Edge {
    pub fn new(a: usize, b: usize, color: Color) -> Self {
        Edge { a: a.min(b), b: a.max(b), color }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.a, self.b)
    }
}

impl From<(usize, usize, Color)> for Edge {
    fn from((a, b, color): (usize, usize, Color)) -> Self {
        Edge::new(a, b, color)
    }
}

impl From<Edge> for (usize, usize, Color) {
    fn from(e: Edge) -> Self {
        (e.a, e.b, e.color)
    }
}

/// Quasiperiodic potential `h_p = (W/2) cos(2π β p + ω₀)` along a stripe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpFieldParams {
    pub w: f64,
    pub beta: f64,
    pub omega0: f64,
}

impl QpFieldParams {
    pub fn new(w: f64) -> Self {
        QpFieldParams { w, beta: inverse_golden_ratio(), omega0: 0.0 }
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    /// Field at intra-stripe position `p`.
    pub fn field_at(&self, p: usize) -> f64 {
        0.5 * self.w * (2.0 * PI * self.beta * p as f64 + self.omega0).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    #[serde(rename = "N")]
    pub num_qubits: usize,
    pub edges: Vec<Edge>,
    pub stripes: BTreeMap<Color, Vec<Vec<usize>>>,
    /// Per-direction field of every qubit (zero for qubits off that direction's stripes).
    #[serde(default)]
    pub fields: BTreeMap<Color, Vec<f64>>,
    /// Set when stripes could not be derived and fell back to per-qubit singletons.
    #[serde(default)]
    pub degenerate_stripes: bool,
}

/// `n`-qubit open chain with parity-colored bonds and a single stripe.
pub fn build_chain(n: usize) -> Result<LatticeSpec> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("a chain needs at least 2 qubits, got {n}")));
    }
    let edges = (0..n - 1)
        .map(|j| Edge::new(j, j + 1, if j % 2 == 0 { Color::Even } else { Color::Odd }))
        .collect();
    let mut stripes = BTreeMap::new();
    stripes.insert(Color::Chain, vec![(0..n).collect()]);
    Ok(LatticeSpec {
        kind: LatticeKind::Chain,
        num_qubits: n,
        edges,
        stripes,
        fields: BTreeMap::new(),
        degenerate_stripes: false,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orientation {
    HorizontalEven,
    Vertical,
    HorizontalOdd,
}

/// Heavy-hex lattice of `rows` × `cols` hexagons in brick-wall arrangement.
///
/// `rows = 7, cols = 3` gives 144 qubits and 164 bonds split 54 R / 55 G / 55 B.
pub fn build_heavy_hex(rows: usize, cols: usize) -> Result<LatticeSpec> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSize(format!(
            "heavy-hex needs at least one hexagon, got {rows}x{cols}"
        )));
    }
    // Honeycomb vertices (x, y) on rows+1 lines of 2*cols+2 sites; rungs join
    // lines where x + y is even.
    let width = 2 * cols + 2;
    let mut alive = vec![vec![true; width]; rows + 1];
    let mut sides: Vec<((usize, usize), (usize, usize), Orientation)> = Vec::new();
    for y in 0..=rows {
        for x in 0..width - 1 {
            let o = if (x + y) % 2 == 0 { Orientation::HorizontalEven } else { Orientation::HorizontalOdd };
            sides.push(((x, y), (x + 1, y), o));
        }
        if y < rows {
            for x in (0..width).filter(|x| (x + y) % 2 == 0) {
                sides.push(((x, y), (x, y + 1), Orientation::Vertical));
            }
        }
    }
    // Trim dangling vertices left at the ends of the boundary lines.
    loop {
        let mut degree = vec![vec![0usize; width]; rows + 1];
        for &((x0, y0), (x1, y1), _) in &sides {
            if alive[y0][x0] && alive[y1][x1] {
                degree[y0][x0] += 1;
                degree[y1][x1] += 1;
            }
        }
        let mut changed = false;
        for y in 0..=rows {
            for x in 0..width {
                if alive[y][x] && degree[y][x] <= 1 {
                    alive[y][x] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    sides.retain(|&((x0, y0), (x1, y1), _)| alive[y0][x0] && alive[y1][x1]);

    // Row-major numbering on the doubled grid: corner (x, y) -> (2x, 2y),
    // bridges at side midpoints.
    let mut coords: Vec<(usize, usize)> = Vec::new();
    for y in 0..=rows {
        for x in 0..width {
            if alive[y][x] {
                coords.push((2 * y, 2 * x));
            }
        }
    }
    for &((x0, y0), (x1, y1), _) in &sides {
        coords.push((y0 + y1, x0 + x1));
    }
    coords.sort_unstable();
    let index: BTreeMap<(usize, usize), usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut edges = Vec::with_capacity(2 * sides.len());
    for &((x0, y0), (x1, y1), orientation) in &sides {
        let bridge = index[&(y0 + y1, x0 + x1)];
        for (x, y) in [(x0, y0), (x1, y1)] {
            let corner = index[&(2 * y, 2 * x)];
            let sublattice_a = (x + y) % 2 == 0;
            let color = match (orientation, sublattice_a) {
                (Orientation::HorizontalEven, true) => Color::Red,
                (Orientation::HorizontalEven, false) => Color::Green,
                (Orientation::Vertical, true) => Color::Green,
                (Orientation::Vertical, false) => Color::Blue,
                (Orientation::HorizontalOdd, true) => Color::Blue,
                (Orientation::HorizontalOdd, false) => Color::Red,
            };
            edges.push(Edge::new(corner, bridge, color));
        }
    }
    edges.sort_by_key(|e| (e.a, e.b));

    let num_qubits = coords.len();
    let (stripes, degenerate) = derive_stripes(num_qubits, &edges);
    debug_assert!(!degenerate, "generated heavy-hex must have proper stripes");
    let lattice = LatticeSpec {
        kind: LatticeKind::HeavyHex,
        num_qubits,
        edges,
        stripes,
        fields: BTreeMap::new(),
        degenerate_stripes: degenerate,
    };
    lattice.validate()?;
    Ok(lattice)
}

/// Imports an arbitrary coupling map.
///
/// Without a coloring the edges are split greedily into matchings (edges in
/// sorted order, each placed in the first class where neither endpoint is
/// taken). Stripes follow the heavy-hex rule when the colored graph admits it
/// and otherwise degenerate to singletons with `degenerate_stripes` set.
pub fn load_coupling_map(
    edge_list: &[(usize, usize)],
    coloring: Option<&BTreeMap<(usize, usize), Color>>,
) -> Result<LatticeSpec> {
    if edge_list.is_empty() {
        return Err(Error::InvalidGraph("empty edge list".into()));
    }
    let mut seen = BTreeSet::new();
    for &(a, b) in edge_list {
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop on qubit {a}")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
        }
    }
    let num_qubits = seen.iter().map(|&(_, b)| b).max().unwrap_or(0) + 1;

    let mut edges: Vec<Edge> = match coloring {
        Some(map) => {
            let normalized: BTreeMap<(usize, usize), Color> =
                map.iter().map(|(&(a, b), &c)| ((a.min(b), a.max(b)), c)).collect();
            if let Some(extra) = normalized.keys().find(|k| !seen.contains(k)) {
                return Err(Error::Coloring(format!("coloring names edge {extra:?} absent from the edge list")));
            }
            seen.iter()
                .map(|&(a, b)| {
                    normalized
                        .get(&(a, b))
                        .map(|&c| Edge::new(a, b, c))
                        .ok_or_else(|| Error::Coloring(format!("edge ({a}, {b}) has no color")))
                })
                .collect::<Result<_>>()?
        }
        None => greedy_matching_coloring(&seen),
    };
    edges.sort_by_key(|e| (e.a, e.b));
    check_matchings(&edges)?;

    let (stripes, degenerate) = derive_stripes(num_qubits, &edges);
    let lattice = LatticeSpec {
        kind: LatticeKind::HeavyHex,
        num_qubits,
        edges,
        stripes,
        fields: BTreeMap::new(),
        degenerate_stripes: degenerate,
    };
    lattice.validate()?;
    Ok(lattice)
}

fn greedy_matching_coloring(pairs: &BTreeSet<(usize, usize)>) -> Vec<Edge> {
    let mut used: Vec<BTreeSet<usize>> = Vec::new();
    let mut edges = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        let class = match used.iter().position(|q| !q.contains(&a) && !q.contains(&b)) {
            Some(k) => k,
            None => {
                used.push(BTreeSet::new());
                used.len() - 1
            }
        };
        used[class].insert(a);
        used[class].insert(b);
        edges.push(Edge::new(a, b, Color::from_class(class)));
    }
    edges
}

fn check_matchings(edges: &[Edge]) -> Result<()> {
    let mut touched: BTreeMap<Color, BTreeSet<usize>> = BTreeMap::new();
    for e in edges {
        let class = touched.entry(e.color).or_default();
        for q in [e.a, e.b] {
            if !class.insert(q) {
                return Err(Error::Coloring(format!("qubit {q} appears twice in color class {}", e.color)));
            }
        }
    }
    Ok(())
}

fn adjacency(num_qubits: usize, edges: &[Edge]) -> Vec<Vec<(usize, Color)>> {
    let mut adj = vec![Vec::new(); num_qubits];
    for e in edges {
        adj[e.a].push((e.b, e.color));
        adj[e.b].push((e.a, e.color));
    }
    adj
}

/// Stripes from a colored heavy-hex-like graph, or singletons when the graph
/// does not admit them. Returns `(stripes, degenerate)`.
fn derive_stripes(num_qubits: usize, edges: &[Edge]) -> (BTreeMap<Color, Vec<Vec<usize>>>, bool) {
    match heavy_hex_stripes(num_qubits, edges) {
        Some(stripes) => (stripes, false),
        None => {
            let mut stripes = BTreeMap::new();
            stripes.insert(Color::Red, (0..num_qubits).map(|q| vec![q]).collect());
            (stripes, true)
        }
    }
}

fn heavy_hex_stripes(num_qubits: usize, edges: &[Edge]) -> Option<BTreeMap<Color, Vec<Vec<usize>>>> {
    let colors: BTreeSet<Color> = edges.iter().map(|e| e.color).collect();
    if colors.len() > 3 || colors.iter().any(|c| !matches!(c, Color::Red | Color::Green | Color::Blue)) {
        return None;
    }
    let adj = adjacency(num_qubits, edges);
    if adj.iter().any(|n| n.len() > 3) {
        return None;
    }

    // Bipartition each component; corners are the side holding degree-3
    // qubits, or the side of the lowest index when there are none.
    let mut side = vec![usize::MAX; num_qubits];
    let mut is_corner = vec![false; num_qubits];
    for start in 0..num_qubits {
        if side[start] != usize::MAX {
            continue;
        }
        let mut component = vec![start];
        side[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            for &(r, _) in &adj[q] {
                if side[r] == usize::MAX {
                    side[r] = 1 - side[q];
                    component.push(r);
                    queue.push_back(r);
                } else if side[r] == side[q] {
                    return None;
                }
            }
        }
        let heavy: BTreeSet<usize> = component.iter().filter(|&&q| adj[q].len() == 3).map(|&q| side[q]).collect();
        let corner_side = match heavy.len() {
            0 => side[*component.iter().min().unwrap()],
            1 => *heavy.iter().next().unwrap(),
            _ => return None,
        };
        for &q in &component {
            is_corner[q] = side[q] == corner_side;
        }
    }

    let mut stripes = BTreeMap::new();
    for &color in &colors {
        let member: Vec<bool> = (0..num_qubits)
            .map(|q| is_corner[q] || adj[q].iter().any(|&(_, c)| c == color))
            .collect();
        let sub: Vec<Vec<usize>> = (0..num_qubits)
            .map(|q| {
                if !member[q] {
                    return Vec::new();
                }
                adj[q].iter().map(|&(r, _)| r).filter(|&r| member[r]).collect()
            })
            .collect();
        if sub.iter().any(|n| n.len() > 2) {
            return None;
        }
        let mut visited = vec![false; num_qubits];
        let mut paths = Vec::new();
        // Walk from every path endpoint (degree <= 1) in increasing order so
        // each stripe starts at its lower-index end.
        for q in 0..num_qubits {
            if !member[q] || visited[q] || sub[q].len() > 1 {
                continue;
            }
            let mut path = vec![q];
            visited[q] = true;
            let mut prev = usize::MAX;
            let mut cur = q;
            while let Some(&next) = sub[cur].iter().find(|&&r| r != prev && !visited[r]) {
                visited[next] = true;
                path.push(next);
                prev = cur;
                cur = next;
            }
            let (first, last) = (path[0], *path.last().unwrap());
            if last < first {
                path.reverse();
            }
            paths.push(path);
        }
        if (0..num_qubits).any(|q| member[q] && !visited[q]) {
            // Remaining members lie on cycles.
            return None;
        }
        paths.sort_by_key(|p| *p.iter().min().unwrap());
        stripes.insert(color, paths);
    }
    Some(stripes)
}

impl LatticeSpec {
    /// Edges grouped by color, each class in ascending `(a, b)` order.
    pub fn color_classes(&self) -> BTreeMap<Color, Vec<(usize, usize)>> {
        let mut classes: BTreeMap<Color, Vec<(usize, usize)>> = BTreeMap::new();
        for e in &self.edges {
            classes.entry(e.color).or_default().push(e.pair());
        }
        for class in classes.values_mut() {
            class.sort_unstable();
        }
        classes
    }

    pub fn has_fields(&self) -> bool {
        !self.fields.is_empty()
    }

    /// Qubits covered by the stripes of `color`, in stripe order.
    pub fn stripe_members(&self, color: Color) -> Vec<usize> {
        self.stripes.get(&color).map(|s| s.iter().flatten().copied().collect()).unwrap_or_default()
    }

    /// Total longitudinal field of each qubit summed over directions.
    pub fn total_fields(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.num_qubits];
        for f in self.fields.values() {
            for (t, v) in total.iter_mut().zip(f) {
                *t += v;
            }
        }
        total
    }

    /// Same field parameters along every stripe direction.
    pub fn assign_qp_fields(&self, params: &QpFieldParams) -> LatticeSpec {
        let per_color = self.stripes.keys().map(|&c| (c, *params)).collect();
        self.assign_qp_fields_per_color(&per_color)
    }

    /// Direction-resolved field parameters; directions missing from `params`
    /// receive no field.
    pub fn assign_qp_fields_per_color(&self, params: &BTreeMap<Color, QpFieldParams>) -> LatticeSpec {
        let mut fields = BTreeMap::new();
        for (&color, stripes) in &self.stripes {
            let Some(p) = params.get(&color) else { continue };
            let mut values = vec![0.0; self.num_qubits];
            for stripe in stripes {
                for (pos, &q) in stripe.iter().enumerate() {
                    values[q] = p.field_at(pos);
                }
            }
            fields.insert(color, values);
        }
        LatticeSpec { fields, ..self.clone() }
    }

    /// Checks the partition, matching, stripe and field-shape invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            if e.a >= n || e.b >= n {
                return Err(Error::InvalidGraph(format!("edge ({}, {}) exceeds N = {n}", e.a, e.b)));
            }
            if e.a == e.b {
                return Err(Error::InvalidGraph(format!("self-loop on qubit {}", e.a)));
            }
            if !pairs.insert(e.pair()) {
                return Err(Error::InvalidGraph(format!("edge {:?} listed twice", e.pair())));
            }
        }
        check_matchings(&self.edges)?;

        for (color, stripes) in &self.stripes {
            let mut covered = BTreeSet::new();
            for stripe in stripes {
                for w in stripe.windows(2) {
                    if !pairs.contains(&(w[0].min(w[1]), w[0].max(w[1]))) {
                        return Err(Error::InvalidGraph(format!(
                            "stripe {color} steps between non-adjacent qubits {} and {}",
                            w[0], w[1]
                        )));
                    }
                }
                for &q in stripe {
                    if q >= n {
                        return Err(Error::InvalidGraph(format!("stripe qubit {q} exceeds N = {n}")));
                    }
                    if !covered.insert(q) {
                        return Err(Error::InvalidGraph(format!("qubit {q} repeats within {color} stripes")));
                    }
                }
            }
        }
        for (color, values) in &self.fields {
            if values.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: values.len() });
            }
            let covered: BTreeSet<usize> = self.stripe_members(*color).into_iter().collect();
            if let Some(q) = (0..n).find(|q| !covered.contains(q) && values[*q] != 0.0) {
                return Err(Error::InvalidGraph(format!("qubit {q} has a {color} field but lies on no {color} stripe")));
            }
        }
        Ok(())
    }

    /// Pretty JSON with deterministic key order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<LatticeSpec> {
        let lattice: LatticeSpec =
            serde_json::from_str(text).map_err(|e| Error::parse("<lattice>", e))?;
        lattice.validate()?;
        Ok(lattice)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<LatticeSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str::<LatticeSpec>(&text)
            .map_err(|e| Error::parse(path, e))
            .and_then(|l| l.validate().map(|_| l))
    }
}

/// Coupling map file: `{"edges": [[a, b], ...], "coloring": [[a, b, "R"], ...]}`
/// with `coloring` optional.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingMapFile {
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub coloring: Option<Vec<Edge>>,
}

impl CouplingMapFile {
    pub fn read(path: &Path) -> Result<CouplingMapFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn to_lattice(&self) -> Result<LatticeSpec> {
        let coloring: Option<BTreeMap<(usize, usize), Color>> =
            self.coloring.as_ref().map(|c| c.iter().map(|e| (e.pair(), e.color)).collect());
        load_coupling_map(&self.edges, coloring.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1c_coloring() -> BTreeMap<(usize, usize), Color> {
        let mut m = BTreeMap::new();
        for p in [(1, 2), (4, 5), (6, 7), (0, 11)] {
            m.insert(p, Color::Red);
        }
        for p in [(0, 1), (2, 3), (7, 8), (9, 10)] {
            m.insert(p, Color::Green);
        }
        for p in [(3, 4), (5, 6), (8, 9), (10, 11)] {
            m.insert(p, Color::Blue);
        }
        m
    }

    #[test]
    fn chain_parity_coloring() {
        let l = build_chain(5).unwrap();
        let got: Vec<_> = l.edges.iter().map(|e| (e.a, e.b, e.color)).collect();
        assert_eq!(
            got,
            vec![(0, 1, Color::Even), (1, 2, Color::Odd), (2, 3, Color::Even), (3, 4, Color::Odd)]
        );
        let two = build_chain(2).unwrap();
        assert_eq!(two.edges, vec![Edge::new(0, 1, Color::Even)]);
        assert_eq!(two.stripes[&Color::Chain], vec![vec![0, 1]]);
    }

    #[test]
    fn chain_129_counts() {
        let l = build_chain(129).unwrap();
        let classes = l.color_classes();
        assert_eq!(l.edges.len(), 128);
        assert_eq!(classes[&Color::Even].len(), 64);
        assert_eq!(classes[&Color::Odd].len(), 64);
        assert_eq!(l.stripes[&Color::Chain][0].len(), 129);
    }

    #[test]
    fn chain_too_small() {
        assert!(matches!(build_chain(1), Err(Error::InvalidSize(_))));
        assert!(matches!(build_chain(0), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn chain_fields() {
        let l = build_chain(4).unwrap().assign_qp_fields(&QpFieldParams::new(2.0));
        let h = &l.fields[&Color::Chain];
        assert!((h[0] - 1.0).abs() < 1e-15);
        assert!((h[1] - (-0.737_368_878_078_319_9)).abs() < 1e-12, "{}", h[1]);
    }

    #[test]
    fn path_greedy_coloring() {
        let l = load_coupling_map(&[(0, 1), (1, 2)], None).unwrap();
        let classes = l.color_classes();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[&Color::Red], vec![(0, 1)]);
        assert_eq!(classes[&Color::Green], vec![(1, 2)]);
    }

    #[test]
    fn shared_qubit_coloring_rejected() {
        let mut c = BTreeMap::new();
        c.insert((0, 1), Color::Red);
        c.insert((1, 2), Color::Red);
        assert!(matches!(load_coupling_map(&[(0, 1), (1, 2)], Some(&c)), Err(Error::Coloring(_))));
    }

    #[test]
    fn non_simple_graph_rejected() {
        assert!(matches!(load_coupling_map(&[(0, 1), (1, 0)], None), Err(Error::InvalidGraph(_))));
        assert!(matches!(load_coupling_map(&[(2, 2)], None), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn fig1c_hexagon_accepted_verbatim() {
        let edges: Vec<_> = (0..12).map(|i| (i, (i + 1) % 12)).collect();
        let coloring = fig1c_coloring();
        let l = load_coupling_map(&edges, Some(&coloring)).unwrap();
        for e in &l.edges {
            assert_eq!(coloring[&e.pair()], e.color);
        }
        assert!(!l.degenerate_stripes);
        // Corners are the even qubits; each color has two 5-qubit stripes.
        assert_eq!(l.stripes[&Color::Red], vec![vec![2, 1, 0, 11, 10], vec![4, 5, 6, 7, 8]]);
        assert_eq!(l.stripes[&Color::Green], vec![vec![0, 1, 2, 3, 4], vec![6, 7, 8, 9, 10]]);
        assert_eq!(l.stripes[&Color::Blue], vec![vec![0, 11, 10, 9, 8], vec![2, 3, 4, 5, 6]]);
    }

    #[test]
    fn non_heavy_hex_degenerates() {
        // Triangle: not bipartite.
        let l = load_coupling_map(&[(0, 1), (1, 2), (0, 2)], None).unwrap();
        assert!(l.degenerate_stripes);
        assert_eq!(l.stripes[&Color::Red], vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn heavy_hex_size_validation() {
        assert!(build_heavy_hex(0, 3).is_err());
        assert!(build_heavy_hex(2, 0).is_err());
    }

    #[test]
    fn json_round_trip_is_stable() {
        let l = build_heavy_hex(2, 2).unwrap().assign_qp_fields(&QpFieldParams::new(3.0));
        let text = l.to_json();
        let back = LatticeSpec::from_json(&text).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.to_json(), text);
    }
}
