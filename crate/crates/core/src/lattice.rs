//! Lattice geometry: site coordinates, boson placement and the length scale L.
//!
//! Sites live on the integer grid `[0, side)^d`. The `n` bosons occupy a
//! regular sublattice of spacing `2L`, one ancilla sits in the cell adjacent
//! to each occupied site, and the remaining grid cells supply the ordinary
//! sites. Distances are Euclidean; hopping adjacency is unit Manhattan
//! distance.

use std::fmt::Write as _;

use crate::{Error, Result};

/// Geometry of a d-dimensional lattice with `n` bosons placed on it.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub c1: f64,
    /// Ordinary site count, `round(c1 * n^beta)`.
    pub m: usize,
    /// Side length of the enclosing grid.
    pub side: usize,
    /// Integer coordinates of the `m` ordinary sites.
    pub coords: Vec<Vec<i64>>,
    /// Coordinates of the `n` ancilla sites (not counted among the `m`).
    pub ancilla_coords: Vec<Vec<i64>>,
    /// Indices (into `coords`) of the initially occupied sites, increasing.
    pub occupied: Vec<usize>,
    /// Half the minimum spacing between occupied sites, as realized on the grid.
    pub length_scale: f64,
}

impl LatticeSpec {
    /// Number of ordinary sites.
    pub fn num_sites(&self) -> usize {
        self.m
    }

    /// Euclidean distance between ordinary sites `i` and `j`.
    pub fn site_distance(&self, i: usize, j: usize) -> Result<f64> {
        let a = self
            .coords
            .get(i)
            .ok_or(Error::SiteOutOfRange { index: i, m: self.m })?;
        let b = self
            .coords
            .get(j)
            .ok_or(Error::SiteOutOfRange { index: j, m: self.m })?;
        Ok(euclidean(a, b))
    }

    /// True when `i` and `j` are at unit Manhattan distance (hopping allowed).
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        if i >= self.m || j >= self.m {
            return false;
        }
        manhattan(&self.coords[i], &self.coords[j]) == 1
    }

    /// A bare 1-D chain of `m` sites with bosons at the given positions.
    ///
    /// Used for experiments that pin the boson separation independently of
    /// the `(n, beta, c1)` density relation. No ancillas.
    pub fn chain(m: usize, occupied_positions: &[usize]) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadLattice("chain needs at least one site".into()));
        }
        let mut occ: Vec<usize> = occupied_positions.to_vec();
        occ.sort_unstable();
        occ.dedup();
        if occ.len() != occupied_positions.len() {
            return Err(Error::BadLattice("duplicate occupied positions".into()));
        }
        if occ.iter().any(|&p| p >= m) {
            return Err(Error::BadLattice("occupied position outside chain".into()));
        }
        if occ.is_empty() {
            return Err(Error::BadLattice("chain needs at least one boson".into()));
        }
        let coords: Vec<Vec<i64>> = (0..m).map(|x| vec![x as i64]).collect();
        let length_scale = realized_length_scale(&coords, &occ, m);
        let n = occ.len();
        Ok(LatticeSpec {
            d: 1,
            n,
            beta: 1.0,
            c1: m as f64 / n as f64,
            m,
            side: m,
            coords,
            ancilla_coords: Vec::new(),
            occupied: occ,
            length_scale,
        })
    }

    /// Plain-text serialization: key-value header plus one coordinate tuple
    /// per line (ordinary sites, then ancillas prefixed with `ancilla`).
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "d {}", self.d).unwrap();
        writeln!(out, "n {}", self.n).unwrap();
        writeln!(out, "beta {}", self.beta).unwrap();
        writeln!(out, "c1 {}", self.c1).unwrap();
        writeln!(out, "m {}", self.m).unwrap();
        writeln!(out, "side {}", self.side).unwrap();
        for c in &self.coords {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            writeln!(out, "site {}", parts.join(" ")).unwrap();
        }
        for c in &self.ancilla_coords {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            writeln!(out, "ancilla {}", parts.join(" ")).unwrap();
        }
        out
    }
}

/// Occupation-number configuration of `n` bosons on `m` sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub occ: Vec<u32>,
}

impl Configuration {
    pub fn new(occ: Vec<u32>) -> Self {
        Configuration { occ }
    }

    /// Total boson number.
    pub fn total(&self) -> u32 {
        self.occ.iter().sum()
    }

    /// Nondecreasing list of occupied site indices with multiplicity.
    pub fn site_list(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (site, &k) in self.occ.iter().enumerate() {
            for _ in 0..k {
                out.push(site);
            }
        }
        out
    }

    /// Product of factorials of the occupation numbers, exact.
    pub fn occupation_factorial(&self) -> u64 {
        self.occ
            .iter()
            .map(|&k| (1..=k as u64).product::<u64>())
            .product()
    }

    /// Hyphen-joined occupation numbers, the CSV serialization.
    pub fn to_key(&self) -> String {
        let parts: Vec<String> = self.occ.iter().map(|x| x.to_string()).collect();
        parts.join("-")
    }
}

/// Build the regular lattice for `n` bosons with sparsity exponent `beta`
/// and density constant `c1` in `d` dimensions.
pub fn build_lattice(n: usize, beta: f64, c1: f64, d: usize) -> Result<LatticeSpec> {
    if !(1..=3).contains(&d) {
        return Err(Error::BadDimension(d));
    }
    if n == 0 {
        return Err(Error::BadLattice("need at least one boson".into()));
    }
    if !(c1 > 0.0) || !(beta >= 1.0) {
        return Err(Error::BadLattice(format!(
            "require c1 > 0 and beta >= 1, got c1 = {c1}, beta = {beta}"
        )));
    }
    let m = (c1 * (n as f64).powf(beta)).round() as usize;
    if m < n {
        return Err(Error::BadLattice(format!(
            "c1 * n^beta = {m} is smaller than n = {n}"
        )));
    }
    let total = m + n;
    let side = int_root_ceil(total, d);
    if total > side.pow(d as u32) as usize {
        return Err(Error::BadLattice(format!(
            "m + n = {total} does not fit in side^d = {}",
            side.pow(d as u32)
        )));
    }

    // Target spacing 2L = ((m+n)/n)^{1/d}, rounded down to the grid.
    let spacing = ((total as f64) / (n as f64)).powf(1.0 / d as f64).floor() as i64;
    let spacing = spacing.max(1);

    // Occupied sublattice: first n points of a k^d grid of pitch `spacing`.
    let k = int_root_ceil(n, d) as i64;
    let mut occupied_coords: Vec<Vec<i64>> = Vec::with_capacity(n);
    'outer: for idx in 0..k.pow(d as u32) {
        let mut point = Vec::with_capacity(d);
        let mut rem = idx;
        for _ in 0..d {
            point.push((rem % k) * spacing);
            rem /= k;
        }
        point.reverse();
        if point.iter().any(|&x| x >= side as i64) {
            continue;
        }
        occupied_coords.push(point);
        if occupied_coords.len() == n {
            break 'outer;
        }
    }
    if occupied_coords.len() < n {
        return Err(Error::BadLattice(format!(
            "occupied sublattice of spacing {spacing} does not fit in side {side}"
        )));
    }

    // One ancilla per boson. In d >= 2 each sits in a cell adjacent to its
    // occupied site (removing isolated cells keeps the grid connected); on a
    // line any interior ancilla would sever the hopping graph, so for d = 1
    // the ancillas take the last free cells of the grid instead.
    let mut ancilla_coords: Vec<Vec<i64>> = Vec::with_capacity(n);
    if d == 1 {
        let mut cell = side as i64 - 1;
        while ancilla_coords.len() < n && cell >= 0 {
            let cand = vec![cell];
            if !occupied_coords.contains(&cand) {
                ancilla_coords.push(cand);
            }
            cell -= 1;
        }
        if ancilla_coords.len() < n {
            return Err(Error::BadLattice(
                "no free cells for ancilla placement".into(),
            ));
        }
    }
    for oc in occupied_coords.iter().filter(|_| d > 1) {
        let mut placed = false;
        for axis in 0..d {
            for step in [1i64, -1] {
                let mut cand = oc.clone();
                cand[axis] += step;
                if cand.iter().any(|&x| x < 0 || x >= side as i64) {
                    continue;
                }
                if occupied_coords.contains(&cand) || ancilla_coords.contains(&cand) {
                    continue;
                }
                ancilla_coords.push(cand);
                placed = true;
                break;
            }
            if placed {
                break;
            }
        }
        if !placed {
            return Err(Error::BadLattice(
                "no free adjacent cell for ancilla placement".into(),
            ));
        }
    }

    // Ordinary sites: lattice points in lexicographic order, skipping ancilla
    // cells, always keeping the occupied sites, filling up to m.
    let mut coords: Vec<Vec<i64>> = Vec::with_capacity(m);
    let mut occupied: Vec<usize> = Vec::with_capacity(n);
    let mut extras = m - n;
    let side_i = side as i64;
    'fill: for idx in 0..(side_i.pow(d as u32)) {
        let mut point = Vec::with_capacity(d);
        let mut rem = idx;
        for _ in 0..d {
            point.push(rem % side_i);
            rem /= side_i;
        }
        point.reverse();
        if ancilla_coords.contains(&point) {
            continue;
        }
        if occupied_coords.contains(&point) {
            occupied.push(coords.len());
            coords.push(point);
        } else if extras > 0 {
            extras -= 1;
            coords.push(point);
        }
        if coords.len() == m && occupied.len() == n {
            break 'fill;
        }
    }
    if coords.len() != m || occupied.len() != n {
        return Err(Error::BadLattice(format!(
            "could not place {m} sites and {n} bosons in side^d = {}",
            side_i.pow(d as u32)
        )));
    }

    let length_scale = realized_length_scale(&coords, &occupied, side);
    Ok(LatticeSpec {
        d,
        n,
        beta,
        c1,
        m,
        side,
        coords,
        ancilla_coords,
        occupied,
        length_scale,
    })
}

/// Half the minimum pairwise distance over occupied sites (side/2 for n = 1).
pub fn min_spacing(spec: &LatticeSpec) -> f64 {
    spec.length_scale
}

/// One boson on each initially occupied site.
pub fn initial_configuration(spec: &LatticeSpec) -> Configuration {
    let mut occ = vec![0u32; spec.m];
    for &site in &spec.occupied {
        occ[site] = 1;
    }
    Configuration::new(occ)
}

fn realized_length_scale(coords: &[Vec<i64>], occupied: &[usize], side: usize) -> f64 {
    if occupied.len() < 2 {
        return side as f64 / 2.0;
    }
    let mut min_dist = f64::INFINITY;
    for (a, &i) in occupied.iter().enumerate() {
        for &j in &occupied[a + 1..] {
            let dist = euclidean(&coords[i], &coords[j]);
            if dist < min_dist {
                min_dist = dist;
            }
        }
    }
    min_dist / 2.0
}

fn euclidean(a: &[i64], b: &[i64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| ((x - y) as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn manhattan(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Smallest `s` with `s^d >= total`.
fn int_root_ceil(total: usize, d: usize) -> usize {
    let mut s = (total as f64).powf(1.0 / d as f64).floor() as usize;
    while (s as u64).pow(d as u32) < total as u64 {
        s += 1;
    }
    s
}
