use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::lattice_point_strings;
use crate::normality::is_integrally_closed;
use crate::point::LatticePoint;
use crate::polytope::{Fingerprint, LatticePolytope};

use super::homology::{homology, Homology};
use super::jumps::enumerate_jumps_down;

/// The coordinate box `[lo, hi]^d` standing in for a neighborhood of the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtlasBox {
    pub lo: i64,
    pub hi: i64,
}

impl AtlasBox {
    /// `[0, r]^d`.
    pub fn corner(r: i64) -> Self {
        AtlasBox { lo: 0, hi: r }
    }

    /// `[-r, r]^d`.
    pub fn centered(r: i64) -> Self {
        AtlasBox { lo: -r, hi: r }
    }

    fn points(&self, d: usize) -> Vec<LatticePoint> {
        let side = (self.lo..=self.hi).collect::<Vec<_>>();
        let mut out = vec![Vec::new()];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    side.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(LatticePoint::from).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtlasOptions {
    /// Maximum number of convex lattice sets visited.
    pub element_cap: usize,
    /// Maximum number of chains in the order complex.
    pub simplex_cap: usize,
}

impl Default for AtlasOptions {
    fn default() -> Self {
        AtlasOptions {
            element_cap: 20_000,
            simplex_cap: 2_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Atlas {
    pub dim: usize,
    pub region: AtlasBox,
    /// Integrally closed polytopes with vertices in the box, sorted by vertex set.
    pub elements: Vec<LatticePolytope>,
    /// `(i, j)`: `elements[j]` covers `elements[i]` by one lattice point.
    pub hasse_edges: Vec<(usize, usize)>,
    /// Number of `k`-simplices of the order complex.
    pub simplex_counts: Vec<usize>,
    pub homology: Homology,
    /// Groups of element indices sharing a fingerprint.
    pub fingerprint_collisions: Vec<Vec<usize>>,
}

impl Atlas {
    pub fn betti(&self) -> &[usize] {
        &self.homology.betti
    }

    /// Elements with no upward Hasse edge inside the box.
    pub fn maximal_in_box(&self) -> Vec<usize> {
        let has_up: BTreeSet<usize> = self.hasse_edges.iter().map(|&(i, _)| i).collect();
        (0..self.elements.len()).filter(|i| !has_up.contains(i)).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "box": [self.region.lo.to_string(), self.region.hi.to_string()],
            "elements": self.elements.iter().map(|p| {
                p.vertices().iter().map(lattice_point_strings).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "hasse_edges": self.hasse_edges,
            "simplex_counts": self.simplex_counts,
            "betti": self.homology.betti,
            "torsion": self.homology.torsion.iter().map(|t| t.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "fingerprint_collisions": self.fingerprint_collisions,
        })
    }
}

/// All integrally closed lattice polytopes with vertices in `region^d`, their
/// elementary relations, and the homology of the order complex.
pub fn build_atlas(d: usize, region: AtlasBox, opts: AtlasOptions) -> Result<Atlas> {
    if d == 0 || region.lo > region.hi {
        return Err(Error::InvalidArgument("empty atlas region".into()));
    }
    let pts = region.points(d);
    // every lattice polytope is reached by adding its vertices one at a time
    let mut seen: BTreeMap<Vec<LatticePoint>, LatticePolytope> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for z in &pts {
        let p = LatticePolytope::convex_hull(vec![z.clone()])?;
        seen.insert(p.vertices().to_vec(), p.clone());
        queue.push_back(p);
    }
    while let Some(p) = queue.pop_front() {
        for z in &pts {
            if p.contains(z) {
                continue;
            }
            let q = p.with_point(z)?;
            if seen.contains_key(q.vertices()) {
                continue;
            }
            if seen.len() >= opts.element_cap {
                return Err(Error::CapExceeded {
                    what: "atlas elements",
                    size: seen.len() as u128 + 1,
                    cap: opts.element_cap as u128,
                });
            }
            seen.insert(q.vertices().to_vec(), q.clone());
            queue.push_back(q);
        }
    }
    let elements: Vec<LatticePolytope> = seen.into_values().filter(is_integrally_closed).collect();
    let index: HashMap<&[LatticePoint], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, p)| (p.vertices(), i))
        .collect();
    let mut hasse_edges = Vec::new();
    for (j, q) in elements.iter().enumerate() {
        for step in enumerate_jumps_down(q)? {
            if let Some(&i) = index.get(step.base.vertices()) {
                hasse_edges.push((i, j));
            }
        }
    }
    hasse_edges.sort_unstable();

    let simplices = order_complex(elements.len(), &hasse_edges, opts.simplex_cap)?;
    let simplex_counts = simplices.iter().map(Vec::len).collect();
    let homology = homology(&simplices);

    let mut classes: BTreeMap<Fingerprint, Vec<usize>> = BTreeMap::new();
    for (i, p) in elements.iter().enumerate() {
        classes.entry(p.fingerprint()).or_default().push(i);
    }
    let fingerprint_collisions = classes.into_values().filter(|g| g.len() > 1).collect();

    Ok(Atlas {
        dim: d,
        region,
        elements,
        hasse_edges,
        simplex_counts,
        homology,
        fingerprint_collisions,
    })
}

/// Chains of the partial order generated by `edges`, grouped by length.
fn order_complex(n: usize, edges: &[(usize, usize)], cap: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in edges {
        up[i].push(j);
    }
    // strict upper sets by memoized search; edges strictly increase the lattice point count
    let mut above: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    fn fill(i: usize, up: &[Vec<usize>], above: &mut Vec<Option<BTreeSet<usize>>>) {
        if above[i].is_some() {
            return;
        }
        let mut s = BTreeSet::new();
        for &j in &up[i] {
            fill(j, up, above);
            s.insert(j);
            s.extend(above[j].as_ref().expect("filled").iter().copied());
        }
        above[i] = Some(s);
    }
    for i in 0..n {
        fill(i, &up, &mut above);
    }
    let above: Vec<Vec<usize>> = above.into_iter().map(|s| s.expect("filled").into_iter().collect()).collect();
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut total = 0usize;
    let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while let Some(chain) = stack.pop() {
        total += 1;
        if total > cap {
            return Err(Error::CapExceeded {
                what: "order complex simplices",
                size: total as u128,
                cap: cap as u128,
            });
        }
        let last = *chain.last().expect("nonempty");
        for &j in &above[last] {
            let mut next = chain.clone();
            next.push(j);
            stack.push(next);
        }
        let k = chain.len() - 1;
        if levels.len() <= k {
            levels.resize(k + 1, Vec::new());
        }
        let mut s = chain;
        s.sort_unstable();
        levels[k].push(s);
    }
    for l in levels.iter_mut() {
        l.sort();
    }
    Ok(levels)
}
