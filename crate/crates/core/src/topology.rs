//! The unit kagome cell: a 12-site star of corner-sharing triangles.
//!
//! Six inner sites (even labels) form a hexagon; six outer tips (odd labels)
//! sit on the surrounding ring. Every other module consumes this graph.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Number of cavities in the cell.
pub const N_SITES: usize = 12;
/// Number of nearest-neighbor couplings.
pub const N_BONDS: usize = 18;

/// A cavity label in 1..=12.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Site(u8);

impl Site {
    pub fn new(label: usize) -> Result<Self> {
        if (1..=N_SITES).contains(&label) {
            Ok(Site(label as u8))
        } else {
            Err(Error::Argument(format!("site label {label} outside 1..=12")))
        }
    }

    /// 1-based label as drawn on the cell.
    pub fn label(self) -> usize {
        self.0 as usize
    }

    /// 0-based index for array storage.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = Site> {
        (1..=N_SITES).map(|k| Site(k as u8))
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unordered pair of coupled sites, stored as (low, high).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Bond(Site, Site);

impl Bond {
    pub fn new(a: Site, b: Site) -> Result<Self> {
        if a == b {
            return Err(Error::Argument(format!("bond ({a}, {b}) is a self-loop")));
        }
        Ok(if a < b { Bond(a, b) } else { Bond(b, a) })
    }

    pub fn from_labels(a: usize, b: usize) -> Result<Self> {
        Bond::new(Site::new(a)?, Site::new(b)?)
    }

    pub fn endpoints(self) -> (Site, Site) {
        (self.0, self.1)
    }

    pub fn contains(self, s: Site) -> bool {
        self.0 == s || self.1 == s
    }

    pub fn other(self, s: Site) -> Option<Site> {
        if self.0 == s {
            Some(self.1)
        } else if self.1 == s {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Bond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Whether a site is on the inner hexagon or an outer tip.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SiteRole {
    Inner,
    Outer,
}

/// A failed structural invariant, reported as data.
#[derive(Clone, Debug)]
pub struct Violation {
    pub invariant: &'static str,
    pub sites: Vec<Site>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

/// The cell graph with roles, plot coordinates and its 6-fold rotation map.
#[derive(Clone, Debug)]
pub struct KagomeTopology {
    bonds: Vec<Bond>,
    roles: [SiteRole; N_SITES],
    coordinates: [(f64, f64); N_SITES],
    rotation: [Site; N_SITES],
    neighbors: [Vec<Site>; N_SITES],
}

impl KagomeTopology {
    /// Assemble a topology from explicit parts (used to probe broken cells).
    pub fn from_parts(bonds: Vec<Bond>, roles: [SiteRole; N_SITES], rotation: [Site; N_SITES]) -> Self {
        let mut neighbors: [Vec<Site>; N_SITES] = Default::default();
        for b in &bonds {
            let (p, q) = b.endpoints();
            neighbors[p.index()].push(q);
            neighbors[q.index()].push(p);
        }
        for n in &mut neighbors {
            n.sort();
            n.dedup();
        }
        KagomeTopology { bonds, roles, coordinates: default_coordinates(), rotation, neighbors }
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn role(&self, s: Site) -> SiteRole {
        self.roles[s.index()]
    }

    pub fn inner_sites(&self) -> impl Iterator<Item = Site> + '_ {
        Site::all().filter(|&s| self.role(s) == SiteRole::Inner)
    }

    pub fn outer_sites(&self) -> impl Iterator<Item = Site> + '_ {
        Site::all().filter(|&s| self.role(s) == SiteRole::Outer)
    }

    /// Neighbors of `s`, sorted ascending by label.
    pub fn neighbors(&self, s: Site) -> &[Site] {
        &self.neighbors[s.index()]
    }

    pub fn degree(&self, s: Site) -> usize {
        self.neighbors(s).len()
    }

    pub fn coordinates(&self, s: Site) -> (f64, f64) {
        self.coordinates[s.index()]
    }

    /// The 6-fold cell rotation (shift by two positions around the star).
    pub fn rotate(&self, s: Site) -> Site {
        self.rotation[s.index()]
    }

    /// The reflection fixing sites 1 and 7 (k ↦ 14 − k for k ≥ 2).
    pub fn reflect(&self, s: Site) -> Site {
        match s.label() {
            1 => s,
            k => Site::new(14 - k).expect("reflection stays in range"),
        }
    }

    pub fn has_bond(&self, a: Site, b: Site) -> bool {
        Bond::new(a, b).map(|bond| self.bonds.contains(&bond)).unwrap_or(false)
    }

    /// 0/1 adjacency matrix in site-label order.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let mut a = Array2::zeros((N_SITES, N_SITES));
        for b in &self.bonds {
            let (p, q) = b.endpoints();
            a[[p.index(), q.index()]] = 1.0;
            a[[q.index(), p.index()]] = 1.0;
        }
        a
    }

    /// All 3-cliques, each sorted ascending.
    pub fn triangles(&self) -> Vec<[Site; 3]> {
        let mut out = Vec::new();
        for a in Site::all() {
            for &b in self.neighbors(a).iter().filter(|&&b| b > a) {
                for &c in self.neighbors(b).iter().filter(|&&c| c > b) {
                    if self.has_bond(a, c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let mut seen = [false; N_SITES];
        let mut stack = vec![Site::new(1).unwrap()];
        seen[0] = true;
        while let Some(s) = stack.pop() {
            for &n in self.neighbors(s) {
                if !seen[n.index()] {
                    seen[n.index()] = true;
                    stack.push(n);
                }
            }
        }
        seen.iter().all(|&v| v)
    }

    /// Plain-text edge list, one "k k'" pair per line.
    pub fn edge_list(&self) -> String {
        let mut lines: Vec<String> = self.bonds.iter().map(|b| format!("{} {}", b.0, b.1)).collect();
        lines.sort();
        lines.join("\n") + "\n"
    }

    /// Uniform coupling map over all bonds.
    pub fn uniform_couplings(&self, kappa: f64) -> BTreeMap<Bond, f64> {
        self.bonds.iter().map(|&b| (b, kappa)).collect()
    }
}

fn default_coordinates() -> [(f64, f64); N_SITES] {
    let mut coords = [(0.0f64, 0.0f64); N_SITES];
    // Inner site 2j at angle π/2 − (j−1)·π/3 on the unit circle; outer tips at
    // the vector sum of their two inner neighbors (twice the edge midpoint).
    for j in 0..6 {
        let phi = std::f64::consts::FRAC_PI_2 - (j as f64) * std::f64::consts::FRAC_PI_3;
        coords[2 * j + 1] = (phi.cos(), phi.sin()); // site 2j+2
    }
    for j in 0..6 {
        let p = coords[(2 * j + 1) % N_SITES]; // inner 2j+2
        let q = coords[(2 * j + 3) % N_SITES]; // inner 2j+4 (wraps to site 2)
        // Tip between them: site 2j+3 (wraps to site 1 for j = 5).
        let tip = (2 * j + 2) % N_SITES;
        coords[tip] = (p.0 + q.0, p.1 + q.1);
    }
    coords
}

/// Build the fixed 12-site cell: the outer ring (k, k mod 12 + 1) plus the
/// inner hexagon chords (2,4), (4,6), (6,8), (8,10), (10,12), (12,2).
pub fn build_unit_cell() -> KagomeTopology {
    let mut bonds = Vec::with_capacity(N_BONDS);
    for k in 1..=N_SITES {
        bonds.push(Bond::from_labels(k, k % N_SITES + 1).unwrap());
    }
    for j in 0..6 {
        let a = 2 * j + 2;
        let b = if a == 12 { 2 } else { a + 2 };
        bonds.push(Bond::from_labels(a, b).unwrap());
    }
    bonds.sort();
    let mut roles = [SiteRole::Outer; N_SITES];
    for s in Site::all() {
        if s.label() % 2 == 0 {
            roles[s.index()] = SiteRole::Inner;
        }
    }
    let mut rotation = [Site::new(1).unwrap(); N_SITES];
    for s in Site::all() {
        rotation[s.index()] = Site::new((s.label() + 1) % N_SITES + 1).unwrap();
    }
    KagomeTopology::from_parts(bonds, roles, rotation)
}

/// Check every structural invariant; an empty list means the cell is sound.
pub fn validate(topology: &KagomeTopology) -> Vec<Violation> {
    let mut violations = Vec::new();

    let inner: Vec<Site> = topology.inner_sites().collect();
    let outer: Vec<Site> = topology.outer_sites().collect();
    if inner.len() != 6 || outer.len() != 6 || inner.iter().any(|s| s.label() % 2 != 0) {
        violations.push(Violation {
            invariant: "roles",
            sites: Site::all().collect(),
            detail: format!("expected 6 inner (even) / 6 outer (odd), found {} inner, {} outer", inner.len(), outer.len()),
        });
    }

    let bad_degree: Vec<Site> = Site::all()
        .filter(|&s| {
            let want = match topology.role(s) {
                SiteRole::Inner => 4,
                SiteRole::Outer => 2,
            };
            topology.degree(s) != want
        })
        .collect();
    if !bad_degree.is_empty() {
        let detail = bad_degree
            .iter()
            .map(|&s| format!("site {} has degree {}", s, topology.degree(s)))
            .collect::<Vec<_>>()
            .join("; ");
        violations.push(Violation { invariant: "degrees", sites: bad_degree, detail });
    }

    if topology.bonds().len() != N_BONDS {
        violations.push(Violation {
            invariant: "bond-count",
            sites: vec![],
            detail: format!("expected {} bonds, found {}", N_BONDS, topology.bonds().len()),
        });
    }

    let triangles = topology.triangles();
    if triangles.len() != 6 {
        violations.push(Violation {
            invariant: "triangle-count",
            sites: triangles.iter().flatten().copied().collect(),
            detail: format!("expected 6 triangles, found {}", triangles.len()),
        });
    }
    for t in &triangles {
        let outer_count = t.iter().filter(|&&s| topology.role(s) == SiteRole::Outer).count();
        if outer_count != 1 {
            violations.push(Violation {
                invariant: "triangle-roles",
                sites: t.to_vec(),
                detail: format!("triangle [{} {} {}] has {} outer sites, expected 1", t[0], t[1], t[2], outer_count),
            });
        }
    }

    if !topology.is_connected() {
        violations.push(Violation { invariant: "connectivity", sites: vec![], detail: "graph is disconnected".into() });
    }

    for b in topology.bonds() {
        let (p, q) = b.endpoints();
        let (rp, rq) = (topology.rotate(p), topology.rotate(q));
        if !topology.has_bond(rp, rq) {
            violations.push(Violation {
                invariant: "rotation-bonds",
                sites: vec![p, q],
                detail: format!("bond {} maps to missing bond ({}, {})", b, rp, rq),
            });
        }
    }
    for s in Site::all() {
        if topology.role(topology.rotate(s)) != topology.role(s) {
            violations.push(Violation {
                invariant: "rotation-roles",
                sites: vec![s],
                detail: format!("rotation changes role of site {}", s),
            });
        }
        let mut t = s;
        for _ in 0..6 {
            t = topology.rotate(t);
        }
        if t != s {
            violations.push(Violation {
                invariant: "rotation-order",
                sites: vec![s],
                detail: format!("rotation^6 moves site {} to {}", s, t),
            });
        }
    }
    let mut s = Site::new(1).unwrap();
    for _ in 0..3 {
        s = topology.rotate(s);
    }
    if s.label() != 7 {
        violations.push(Violation {
            invariant: "rotation-antipode",
            sites: vec![Site::new(1).unwrap()],
            detail: format!("rotation^3 maps site 1 to {}, expected 7", s),
        });
    }

    violations
}
