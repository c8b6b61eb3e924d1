//! Grid geometry shared by the world and belief maps: cell indexing,
//! 8-neighborhoods, ray traversal and PGM encoding.

use crate::real::Real;

/// Tri-state occupancy classification of a map cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    Unknown,
    Free,
    Occupied,
}

/// Rectangular grid layout: `cols × rows` cells of side `resolution` meters,
/// origin at world (0, 0), x along columns and y along rows. Cells are indexed
/// row-major: `idx = row * cols + col`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeom<F> {
    pub cols: usize,
    pub rows: usize,
    pub resolution: F,
}

impl<F: Real> GridGeom<F> {
    pub fn new(width_m: F, height_m: F, resolution: F) -> Self {
        let cols = (width_m / resolution).ceil().to_usize().unwrap().max(1);
        let rows = (height_m / resolution).ceil().to_usize().unwrap().max(1);
        Self { cols, rows, resolution }
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.cols && row < self.rows);
        row * self.cols + col
    }

    pub fn col_row(&self, idx: usize) -> (usize, usize) {
        (idx % self.cols, idx / self.cols)
    }

    pub fn contains_point(&self, x: F, y: F) -> bool {
        x >= F::zero()
            && y >= F::zero()
            && x < F::of_usize(self.cols) * self.resolution
            && y < F::of_usize(self.rows) * self.resolution
    }

    /// Cell containing a world point. Returns `None` outside the grid.
    pub fn cell_at(&self, x: F, y: F) -> Option<usize> {
        if !self.contains_point(x, y) {
            return None;
        }
        let col = (x / self.resolution).floor().to_usize().unwrap().min(self.cols - 1);
        let row = (y / self.resolution).floor().to_usize().unwrap().min(self.rows - 1);
        Some(self.index(col, row))
    }

    /// World coordinates of a cell center.
    pub fn cell_center(&self, idx: usize) -> (F, F) {
        let (col, row) = self.col_row(idx);
        let half = F::of(0.5);
        (
            (F::of_usize(col) + half) * self.resolution,
            (F::of_usize(row) + half) * self.resolution,
        )
    }

    /// Euclidean distance between two cell centers, in meters.
    pub fn cell_distance(&self, a: usize, b: usize) -> F {
        let (ax, ay) = self.cell_center(a);
        let (bx, by) = self.cell_center(b);
        ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
    }

    /// Indices of the up-to-8 neighbors of a cell.
    pub fn neighbors8(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (col, row) = self.col_row(idx);
        NEIGHBOR_OFFSETS.iter().filter_map(move |&(dc, dr)| {
            let nc = col as isize + dc;
            let nr = row as isize + dr;
            if nc >= 0 && nr >= 0 && (nc as usize) < self.cols && (nr as usize) < self.rows {
                Some(self.index(nc as usize, nr as usize))
            } else {
                None
            }
        })
    }

    /// Walk the cells pierced by a ray from `(x, y)` toward `angle`, up to
    /// `range` meters, in traversal order. `visit` returns `false` to stop the
    /// ray early (occlusion). Uses the standard voxel-traversal DDA, so every
    /// crossed cell is reported exactly once.
    pub fn cast_ray(&self, x: F, y: F, angle: F, range: F, mut visit: impl FnMut(usize) -> bool) {
        let Some(start) = self.cell_at(x, y) else { return };
        if !visit(start) {
            return;
        }
        let (mut col, mut row) = self.col_row(start);
        let dx = angle.cos();
        let dy = angle.sin();
        let res = self.resolution;
        let eps = F::of(1e-12);

        let step_c: isize = if dx > F::zero() { 1 } else { -1 };
        let step_r: isize = if dy > F::zero() { 1 } else { -1 };
        // Distance along the ray to the first column/row boundary, then the
        // fixed stride between successive boundaries.
        let mut t_max_x = if dx.abs() < eps {
            F::infinity()
        } else {
            let next = if dx > F::zero() {
                F::of_usize(col + 1) * res
            } else {
                F::of_usize(col) * res
            };
            (next - x) / dx
        };
        let mut t_max_y = if dy.abs() < eps {
            F::infinity()
        } else {
            let next = if dy > F::zero() {
                F::of_usize(row + 1) * res
            } else {
                F::of_usize(row) * res
            };
            (next - y) / dy
        };
        let t_delta_x = if dx.abs() < eps { F::infinity() } else { res / dx.abs() };
        let t_delta_y = if dy.abs() < eps { F::infinity() } else { res / dy.abs() };

        loop {
            let t_next = t_max_x.min(t_max_y);
            if t_next > range {
                return;
            }
            if t_max_x <= t_max_y {
                let nc = col as isize + step_c;
                if nc < 0 || nc as usize >= self.cols {
                    return;
                }
                col = nc as usize;
                t_max_x += t_delta_x;
            } else {
                let nr = row as isize + step_r;
                if nr < 0 || nr as usize >= self.rows {
                    return;
                }
                row = nr as usize;
                t_max_y += t_delta_y;
            }
            if !visit(self.index(col, row)) {
                return;
            }
        }
    }
}

const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// 8-connected flood fill from `seeds` over cells where `passable` holds.
/// Returns the reachable mask.
pub fn flood_fill<F: Real>(
    geom: &GridGeom<F>,
    seeds: impl IntoIterator<Item = usize>,
    passable: impl Fn(usize) -> bool,
) -> Vec<bool> {
    let mut reached = vec![false; geom.cell_count()];
    let mut stack: Vec<usize> = seeds.into_iter().filter(|&s| passable(s)).collect();
    for &s in &stack {
        reached[s] = true;
    }
    while let Some(idx) = stack.pop() {
        for n in geom.neighbors8(idx) {
            if !reached[n] && passable(n) {
                reached[n] = true;
                stack.push(n);
            }
        }
    }
    reached
}

/// Encode a grid of gray levels as binary PGM (P5), one byte per cell,
/// top row first.
pub fn encode_pgm(cols: usize, rows: usize, levels: &[u8]) -> Vec<u8> {
    assert_eq!(levels.len(), cols * rows);
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend_from_slice(levels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> GridGeom<f64> {
        GridGeom::new(10.0, 5.0, 0.5)
    }

    #[test]
    fn cell_roundtrip() {
        let g = geom();
        assert_eq!(g.cols, 20);
        assert_eq!(g.rows, 10);
        let idx = g.cell_at(3.1, 2.9).unwrap();
        let (cx, cy) = g.cell_center(idx);
        assert_eq!(g.cell_at(cx, cy).unwrap(), idx);
        assert!(g.cell_at(-0.1, 1.0).is_none());
        assert!(g.cell_at(10.0, 1.0).is_none());
    }

    #[test]
    fn ray_straight_east_visits_row() {
        let g = geom();
        let mut cells = Vec::new();
        g.cast_ray(0.25, 0.25, 0.0, 2.0, |c| {
            cells.push(c);
            true
        });
        // start cell plus cells entered strictly within 2 m
        let expected: Vec<usize> = (0..=4).map(|c| g.index(c, 0)).collect();
        assert_eq!(cells, expected);
    }

    #[test]
    fn ray_stops_when_visit_rejects() {
        let g = geom();
        let mut n = 0;
        g.cast_ray(0.25, 0.25, 0.0, 100.0, |_| {
            n += 1;
            n < 3
        });
        assert_eq!(n, 3);
    }

    #[test]
    fn ray_diagonal_supercover_is_contiguous() {
        let g = geom();
        let mut cells = Vec::new();
        g.cast_ray(0.25, 0.25, std::f64::consts::FRAC_PI_4, 3.0, |c| {
            cells.push(c);
            true
        });
        for w in cells.windows(2) {
            let (c0, r0) = g.col_row(w[0]);
            let (c1, r1) = g.col_row(w[1]);
            // DDA steps one axis at a time
            assert_eq!((c1 - c0) + (r1 - r0), 1);
        }
        assert!(cells.len() >= 8);
    }

    #[test]
    fn flood_fill_respects_walls() {
        let g = GridGeom::new(3.0, 1.0, 1.0);
        // wall in the middle column
        let passable = |idx: usize| idx != 1;
        let reached = flood_fill(&g, [0], passable);
        assert_eq!(reached, vec![true, false, false]);
    }
}
