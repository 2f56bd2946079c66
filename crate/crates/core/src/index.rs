//! Nearest-neighbour queries on PSU(2) under [`metric_d`](crate::quat::metric_d).
//!
//! Both sign representatives of every point are stored in a uniform grid over
//! `[-1, 1]^4`; the chord `|x - p|` to the closer representative equals
//! `√2 · metric_d(x, p)`, so a Euclidean search answers the projective query.

use rustc_hash::FxHashMap;

use crate::quat::{metric_d, Psu2Point};

/// Below this many points queries scan linearly.
const LINEAR_LIMIT: usize = 256;

#[derive(Clone, Debug)]
pub struct SphereIndex {
    points: Vec<Psu2Point>,
    grid: Option<Grid>,
}

#[derive(Clone, Debug)]
struct Grid {
    cell: f64,
    cells_per_axis: i64,
    /// Signed copies sorted by cell, with the id of the original point.
    coords: Vec<[f64; 4]>,
    ids: Vec<u32>,
    ranges: FxHashMap<u64, (u32, u32)>,
}

impl Grid {
    fn cell_of(&self, v: &[f64; 4]) -> [i64; 4] {
        v.map(|x| (((x + 1.0) / self.cell).floor() as i64).clamp(0, self.cells_per_axis - 1))
    }

    fn key(c: &[i64; 4]) -> u64 {
        c.iter().fold(0u64, |acc, &x| acc << 16 | x as u64)
    }

    fn in_range(&self, c: &[i64; 4]) -> bool {
        c.iter().all(|&x| (0..self.cells_per_axis).contains(&x))
    }

    fn visit_cell(&self, c: &[i64; 4], mut f: impl FnMut(usize)) {
        if !self.in_range(c) {
            return;
        }
        if let Some(&(lo, hi)) = self.ranges.get(&Self::key(c)) {
            (lo as usize..hi as usize).for_each(&mut f);
        }
    }

    /// Visits every cell at Chebyshev distance exactly `r` from `c`.
    fn visit_shell(&self, c: &[i64; 4], r: i64, mut f: impl FnMut(usize)) {
        let lim = self.cells_per_axis;
        if r == 0 {
            self.visit_cell(c, f);
            return;
        }
        let span = |i: usize| (c[i] - r).max(0)..=(c[i] + r).min(lim - 1);
        for x0 in span(0) {
            for x1 in span(1) {
                for x2 in span(2) {
                    let inner = (x0 - c[0]).abs() < r
                        && (x1 - c[1]).abs() < r
                        && (x2 - c[2]).abs() < r;
                    if inner {
                        for x3 in [c[3] - r, c[3] + r] {
                            self.visit_cell(&[x0, x1, x2, x3], &mut f);
                        }
                    } else {
                        for x3 in span(3) {
                            self.visit_cell(&[x0, x1, x2, x3], &mut f);
                        }
                    }
                }
            }
        }
    }
}

fn chord2(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl SphereIndex {
    pub fn new(points: Vec<Psu2Point>) -> Self {
        let grid = (points.len() > LINEAR_LIMIT).then(|| Self::build_grid(&points));
        SphereIndex { points, grid }
    }

    fn build_grid(points: &[Psu2Point]) -> Grid {
        // 2N copies on a 3-sphere of area 2π²: typical spacing ρ with (4/3)πρ³ = π²/N
        let rho = (3.0 * std::f64::consts::PI / (4.0 * points.len() as f64)).cbrt();
        let cell = (1.5 * rho).clamp(2.0 / 60000.0, 0.5);
        let cells_per_axis = (2.0 / cell).ceil() as i64;
        let mut grid = Grid {
            cell,
            cells_per_axis,
            coords: Vec::new(),
            ids: Vec::new(),
            ranges: FxHashMap::default(),
        };
        let mut entries: Vec<(u64, u32, [f64; 4])> = Vec::with_capacity(2 * points.len());
        for (id, p) in points.iter().enumerate() {
            let v = p.coords();
            for s in [v, v.map(|x| -x)] {
                entries.push((Grid::key(&grid.cell_of(&s)), id as u32, s));
            }
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut start = 0usize;
        for i in 0..entries.len() {
            if i + 1 == entries.len() || entries[i + 1].0 != entries[i].0 {
                grid.ranges.insert(entries[i].0, (start as u32, i as u32 + 1));
                start = i + 1;
            }
        }
        grid.coords = entries.iter().map(|e| e.2).collect();
        grid.ids = entries.iter().map(|e| e.1).collect();
        grid
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Psu2Point] {
        &self.points
    }

    /// Index and distance of the nearest point, ties broken by lower index.
    /// `None` for an empty index.
    pub fn nearest(&self, x: &Psu2Point) -> Option<(usize, f64)> {
        let grid = match &self.grid {
            None => {
                let mut best: Option<(usize, f64)> = None;
                for (i, p) in self.points.iter().enumerate() {
                    let d = metric_d(x, p);
                    if best.is_none_or(|(_, b)| d < b) {
                        best = Some((i, d));
                    }
                }
                return best;
            }
            Some(g) => g,
        };
        let q = x.coords();
        let c = grid.cell_of(&q);
        let mut best = (u32::MAX, f64::INFINITY);
        let mut r = 0;
        loop {
            grid.visit_shell(&c, r, |k| {
                let d2 = chord2(&q, &grid.coords[k]);
                let id = grid.ids[k];
                if d2 < best.1 || (d2 == best.1 && id < best.0) {
                    best = (id, d2);
                }
            });
            // any point outside the scanned block is at least r·cell away
            if best.1.sqrt() <= r as f64 * grid.cell || r > grid.cells_per_axis {
                break;
            }
            r += 1;
        }
        let id = best.0 as usize;
        Some((id, metric_d(x, &self.points[id])))
    }

    /// Indices and distances of all points with `metric_d(x, p) <= radius`,
    /// sorted by index.
    pub fn within(&self, x: &Psu2Point, radius: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        match &self.grid {
            None => {
                for (i, p) in self.points.iter().enumerate() {
                    let d = metric_d(x, p);
                    if d <= radius {
                        out.push((i, d));
                    }
                }
            }
            Some(grid) => {
                let q = x.coords();
                let c = grid.cell_of(&q);
                let chord = radius * std::f64::consts::SQRT_2;
                let reach = (chord / grid.cell).ceil() as i64 + 1;
                let mut seen = Vec::new();
                for r in 0..=reach.min(grid.cells_per_axis) {
                    grid.visit_shell(&c, r, |k| {
                        if chord2(&q, &grid.coords[k]) <= chord * chord * (1.0 + 1e-12) + 1e-300 {
                            seen.push(grid.ids[k] as usize);
                        }
                    });
                }
                seen.sort_unstable();
                seen.dedup();
                for i in seen {
                    let d = metric_d(x, &self.points[i]);
                    if d <= radius {
                        out.push((i, d));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::sample_haar;

    #[test]
    fn matches_linear_scan() {
        let pts = sample_haar(5000, 1);
        let idx = SphereIndex::new(pts.clone());
        for x in sample_haar(300, 2) {
            let (i, d) = idx.nearest(&x).unwrap();
            let best = pts.iter().map(|p| metric_d(&x, p)).fold(f64::INFINITY, f64::min);
            assert_eq!(d, best);
            assert_eq!(metric_d(&x, &pts[i]), best);
            let near: Vec<usize> = idx.within(&x, 0.2).into_iter().map(|e| e.0).collect();
            let brute: Vec<usize> = (0..pts.len()).filter(|&k| metric_d(&x, &pts[k]) <= 0.2).collect();
            assert_eq!(near, brute);
        }
    }

    #[test]
    fn small_and_empty() {
        assert!(SphereIndex::new(vec![]).nearest(&Psu2Point::IDENTITY).is_none());
        let idx = SphereIndex::new(vec![Psu2Point::IDENTITY]);
        assert_eq!(idx.nearest(&Psu2Point::IDENTITY), Some((0, 0.0)));
    }
}
