//! Per-robot belief maps: deterministic sensing, Shannon map entropy,
//! frontier detection and belief merging.

use thiserror::Error;

use crate::grid::{encode_pgm, CellState, GridGeom};
use crate::real::Real;
use crate::worldgen::GroundTruthGrid;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("pose ({x}, {y}) is outside the map")]
    OutOfBounds { x: f64, y: f64 },
    #[error("cannot sense from inside an occupied cell")]
    SensingFromObstacle,
    #[error("belief grids have mismatching geometry")]
    GeometryMismatch,
    #[error("invalid sensor: {0}")]
    InvalidSensor(String),
}

/// Planar robot pose; yaw is normalized to [−π, π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<F> {
    pub x: F,
    pub y: F,
    pub yaw: F,
}

impl<F: Real> Pose<F> {
    pub fn new(x: F, y: F, yaw: F) -> Self {
        Self { x, y, yaw: normalize_angle(yaw) }
    }

    pub fn distance(&self, other: &Pose<F>) -> F {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn xy(&self) -> [F; 2] {
        [self.x, self.y]
    }
}

/// Wrap an angle into [−π, π).
pub fn normalize_angle<F: Real>(a: F) -> F {
    let pi = F::of(std::f64::consts::PI);
    let two_pi = pi + pi;
    let mut a = (a + pi) % two_pi;
    if a < F::zero() {
        a += two_pi;
    }
    a - pi
}

/// Deterministic, noise-free range sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel<F> {
    pub range_m: F,
    pub fov_rad: F,
    pub ray_count: usize,
}

impl<F: Real> SensorModel<F> {
    /// Ray count defaults to 360 for a full circle, scaled proportionally for
    /// narrower fields of view (not below the minimum of 8).
    pub fn new(range_m: F, fov_rad: F) -> Result<Self, MappingError> {
        let two_pi = F::of(std::f64::consts::TAU);
        let rays = (F::of(360.0) * fov_rad / two_pi).round().to_usize().unwrap_or(0).max(8);
        Self::with_rays(range_m, fov_rad, rays)
    }

    pub fn with_rays(range_m: F, fov_rad: F, ray_count: usize) -> Result<Self, MappingError> {
        let two_pi = F::of(std::f64::consts::TAU);
        if !(range_m > F::zero()) {
            return Err(MappingError::InvalidSensor("range must be positive".into()));
        }
        if !(fov_rad > F::zero() && fov_rad <= two_pi + F::of(1e-9)) {
            return Err(MappingError::InvalidSensor("fov must be in (0, 2π]".into()));
        }
        if ray_count < 8 {
            return Err(MappingError::InvalidSensor("ray count must be at least 8".into()));
        }
        Ok(Self { range_m, fov_rad: fov_rad.min(two_pi), ray_count })
    }

    /// Ray headings for a sweep centered on `yaw` (midpoint rule, so a full
    /// circle has no duplicated boundary ray).
    pub fn ray_angles(&self, yaw: F) -> impl Iterator<Item = F> + '_ {
        let n = self.ray_count;
        let start = yaw - self.fov_rad / F::of(2.0);
        let step = self.fov_rad / F::of_usize(n);
        (0..n).map(move |k| start + (F::of_usize(k) + F::of(0.5)) * step)
    }
}

/// A robot's evolving tri-state occupancy belief. Occupancy probability is
/// determined by the cell state: Unknown ↔ 0.5, Free ↔ 0, Occupied ↔ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefGrid<F> {
    geom: GridGeom<F>,
    cells: Vec<CellState>,
}

impl<F: Real> BeliefGrid<F> {
    pub fn new_unknown(geom: GridGeom<F>) -> Self {
        let cells = vec![CellState::Unknown; geom.cell_count()];
        Self { geom, cells }
    }

    pub fn geom(&self) -> &GridGeom<F> {
        &self.geom
    }

    pub fn state(&self, idx: usize) -> CellState {
        self.cells[idx]
    }

    pub fn states(&self) -> &[CellState] {
        &self.cells
    }

    pub fn occupancy_prob(&self, idx: usize) -> F {
        match self.cells[idx] {
            CellState::Unknown => F::of(0.5),
            CellState::Free => F::zero(),
            CellState::Occupied => F::one(),
        }
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != CellState::Unknown).count()
    }

    /// Rebuild a belief from explicit states (replay and tests).
    pub fn from_states(geom: GridGeom<F>, cells: Vec<CellState>) -> Result<Self, MappingError> {
        if cells.len() != geom.cell_count() {
            return Err(MappingError::GeometryMismatch);
        }
        Ok(Self { geom, cells })
    }

    /// Monotone write: only Unknown cells accept a new state.
    pub fn observe(&mut self, idx: usize, state: CellState) {
        if self.cells[idx] == CellState::Unknown {
            self.cells[idx] = state;
        }
    }

    /// P5 PGM bytes: 255 = Free, 0 = Occupied, 128 = Unknown.
    pub fn to_pgm(&self) -> Vec<u8> {
        let levels: Vec<u8> = self
            .cells
            .iter()
            .map(|c| match c {
                CellState::Unknown => 128,
                CellState::Free => 255,
                CellState::Occupied => 0,
            })
            .collect();
        encode_pgm(self.geom.cols, self.geom.rows, &levels)
    }
}

/// Free cells bordering unknown space, with their world positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontierSet<F> {
    pub cells: Vec<usize>,
    pub positions: Vec<[F; 2]>,
}

impl<F> FrontierSet<F> {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Sweep the sensor from `pose` against the true world and return the updated
/// belief. Rays march until the first occupied world cell or the range limit;
/// traversed cells become Free, the hit cell becomes Occupied. Updates are
/// monotone, so sensing twice from the same pose changes nothing.
pub fn sense<F: Real>(
    world: &GroundTruthGrid<F>,
    belief: &BeliefGrid<F>,
    pose: &Pose<F>,
    sensor: &SensorModel<F>,
) -> Result<BeliefGrid<F>, MappingError> {
    let mut out = belief.clone();
    sense_into(world, &mut out, pose, sensor)?;
    Ok(out)
}

pub(crate) fn sense_into<F: Real>(
    world: &GroundTruthGrid<F>,
    belief: &mut BeliefGrid<F>,
    pose: &Pose<F>,
    sensor: &SensorModel<F>,
) -> Result<(), MappingError> {
    let geom = world.geom();
    let Some(pose_cell) = geom.cell_at(pose.x, pose.y) else {
        return Err(MappingError::OutOfBounds {
            x: pose.x.to_f64_lossy(),
            y: pose.y.to_f64_lossy(),
        });
    };
    if world.state(pose_cell) == CellState::Occupied {
        return Err(MappingError::SensingFromObstacle);
    }
    for angle in sensor.ray_angles(pose.yaw) {
        geom.cast_ray(pose.x, pose.y, angle, sensor.range_m, |idx| {
            if world.state(idx) == CellState::Occupied {
                belief.observe(idx, CellState::Occupied);
                false
            } else {
                belief.observe(idx, CellState::Free);
                true
            }
        });
    }
    Ok(())
}

/// Shannon entropy of the belief in bits: −Σ p log₂ p + (1−p) log₂(1−p),
/// with 0·log 0 = 0. Each Unknown cell contributes exactly one bit.
pub fn entropy<F: Real>(belief: &BeliefGrid<F>) -> F {
    let mut bits = F::zero();
    for idx in 0..belief.geom().cell_count() {
        let p = belief.occupancy_prob(idx);
        let q = F::one() - p;
        let mut h = F::zero();
        if p > F::zero() {
            h -= p * p.log2();
        }
        if q > F::zero() {
            h -= q * q.log2();
        }
        bits += h;
    }
    bits
}

/// All Free cells 8-adjacent to at least one Unknown cell, in row-major order.
pub fn detect_frontiers<F: Real>(belief: &BeliefGrid<F>) -> FrontierSet<F> {
    let geom = belief.geom();
    let mut cells = Vec::new();
    let mut positions = Vec::new();
    for idx in 0..geom.cell_count() {
        if belief.state(idx) != CellState::Free {
            continue;
        }
        if geom.neighbors8(idx).any(|n| belief.state(n) == CellState::Unknown) {
            cells.push(idx);
            let (x, y) = geom.cell_center(idx);
            positions.push([x, y]);
        }
    }
    FrontierSet { cells, positions }
}

/// Combine two beliefs cell-by-cell: any observation beats Unknown and
/// Occupied beats Free, which makes the merge commutative, associative and
/// idempotent.
pub fn merge_beliefs<F: Real>(
    a: &BeliefGrid<F>,
    b: &BeliefGrid<F>,
) -> Result<BeliefGrid<F>, MappingError> {
    if a.geom != b.geom {
        return Err(MappingError::GeometryMismatch);
    }
    let mut out = a.clone();
    for (cell, &other) in out.cells.iter_mut().zip(&b.cells) {
        *cell = merge_cell(*cell, other);
    }
    Ok(out)
}

fn merge_cell(a: CellState, b: CellState) -> CellState {
    use CellState::*;
    match (a, b) {
        (Occupied, _) | (_, Occupied) => Occupied,
        (Free, _) | (_, Free) => Free,
        _ => Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldgen::{generate_world, WorldSpec};
    use approx::assert_relative_eq;

    fn empty_world(side: f64) -> GroundTruthGrid<f64> {
        let spec = WorldSpec {
            width_m: side,
            height_m: side,
            resolution_m: 0.5,
            tree_density: 0.0,
            tree_radius_range: [0.2, 0.5],
            seed: 1,
            density_patches: Vec::new(),
        };
        generate_world(&spec).unwrap()
    }

    fn full_sensor(range: f64) -> SensorModel<f64> {
        SensorModel::new(range, std::f64::consts::TAU).unwrap()
    }

    #[test]
    fn full_circle_sensor_saturates_empty_world() {
        let world = empty_world(6.0);
        let belief = BeliefGrid::new_unknown(world.geom().clone());
        let pose = Pose::new(3.0, 3.0, 0.0);
        // range covers the whole grid diagonal
        let sensed = sense(&world, &belief, &pose, &full_sensor(10.0)).unwrap();
        assert!(sensed.states().iter().all(|&c| c == CellState::Free));
    }

    fn world_with_occupied(side: f64, occupied: &[usize]) -> GroundTruthGrid<f64> {
        let spec = WorldSpec {
            width_m: side,
            height_m: side,
            resolution_m: 0.5,
            tree_density: 0.0,
            tree_radius_range: [0.2, 0.5],
            seed: 1,
            density_patches: Vec::new(),
        };
        let geom = spec.geom();
        let mut cells = vec![CellState::Free; geom.cell_count()];
        for &idx in occupied {
            cells[idx] = CellState::Occupied;
        }
        GroundTruthGrid::from_cells(spec, cells).unwrap()
    }

    #[test]
    fn wall_occludes_far_cells() {
        // vertical wall at x ≈ 6 m spanning all rows
        let geom = GridGeom::new(10.0, 10.0, 0.5);
        let wall_col = 12;
        let wall: Vec<usize> = (0..geom.rows).map(|row| geom.index(wall_col, row)).collect();
        let world = world_with_occupied(10.0, &wall);
        let belief = BeliefGrid::new_unknown(geom.clone());
        let pose = Pose::new(1.25, 5.25, 0.0);
        let sensed = sense(&world, &belief, &pose, &full_sensor(20.0)).unwrap();
        // every cell strictly beyond the wall on the pose's row is unobserved
        let row = 10;
        for col in wall_col + 1..geom.cols {
            assert_eq!(sensed.state(geom.index(col, row)), CellState::Unknown);
        }
        // the wall cell on that row was hit
        assert_eq!(sensed.state(geom.index(wall_col, row)), CellState::Occupied);
    }

    #[test]
    fn sensing_is_idempotent() {
        let world = empty_world(8.0);
        let belief = BeliefGrid::new_unknown(world.geom().clone());
        let pose = Pose::new(4.0, 4.0, 1.0);
        let sensor = full_sensor(3.0);
        let once = sense(&world, &belief, &pose, &sensor).unwrap();
        let twice = sense(&world, &once, &pose, &sensor).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn sensing_from_obstacle_is_an_error() {
        let geom = GridGeom::new(4.0, 4.0, 0.5);
        let idx = geom.cell_at(2.0, 2.0).unwrap();
        let world = world_with_occupied(4.0, &[idx]);
        let belief = BeliefGrid::new_unknown(world.geom().clone());
        let pose = Pose::new(2.0, 2.0, 0.0);
        assert!(matches!(
            sense(&world, &belief, &pose, &full_sensor(2.0)),
            Err(MappingError::SensingFromObstacle)
        ));
        let outside = Pose::new(-1.0, 2.0, 0.0);
        assert!(matches!(
            sense(&world, &belief, &outside, &full_sensor(2.0)),
            Err(MappingError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn entropy_counts_unknown_cells() {
        let geom = GridGeom::new(4.0, 4.0, 1.0);
        let mut belief = BeliefGrid::new_unknown(geom);
        assert_relative_eq!(entropy(&belief), 16.0);
        for idx in 0..13 {
            belief.observe(idx, CellState::Free);
        }
        assert_relative_eq!(entropy(&belief), 3.0);
        for idx in 13..16 {
            belief.observe(idx, CellState::Occupied);
        }
        assert_relative_eq!(entropy(&belief), 0.0);
    }

    #[test]
    fn frontier_edge_cases() {
        let geom = GridGeom::new(3.0, 3.0, 1.0);
        // fully observed → empty set
        let mut belief = BeliefGrid::new_unknown(geom.clone());
        for idx in 0..9 {
            belief.observe(idx, CellState::Free);
        }
        assert!(detect_frontiers(&belief).is_empty());
        // single free cell surrounded by unknown → that cell
        let mut belief = BeliefGrid::new_unknown(geom.clone());
        belief.observe(4, CellState::Free);
        let f = detect_frontiers(&belief);
        assert_eq!(f.cells, vec![4]);
        assert_eq!(f.positions, vec![[1.5, 1.5]]);
    }

    #[test]
    fn merge_rules() {
        let geom = GridGeom::new(2.0, 1.0, 1.0);
        let mut a = BeliefGrid::new_unknown(geom.clone());
        a.observe(0, CellState::Free);
        let unknown = BeliefGrid::new_unknown(geom.clone());
        // identity and idempotence
        assert_eq!(merge_beliefs(&a, &unknown).unwrap(), a);
        assert_eq!(merge_beliefs(&a, &a).unwrap(), a);
        // occupied wins conflicts
        let mut b = BeliefGrid::new_unknown(geom.clone());
        b.observe(0, CellState::Occupied);
        let merged = merge_beliefs(&a, &b).unwrap();
        assert_eq!(merged.state(0), CellState::Occupied);
        // geometry mismatch
        let other = BeliefGrid::new_unknown(GridGeom::new(3.0, 1.0, 1.0));
        assert!(matches!(merge_beliefs(&a, &other), Err(MappingError::GeometryMismatch)));
    }

    #[test]
    fn sensed_cells_match_world_truth() {
        let spec = WorldSpec {
            width_m: 20.0,
            height_m: 20.0,
            resolution_m: 0.5,
            tree_density: 0.15,
            tree_radius_range: [0.2, 0.5],
            seed: 33,
            density_patches: Vec::new(),
        };
        let world = generate_world(&spec).unwrap();
        let poses = crate::worldgen::spawn_poses(&world, 1, 5).unwrap();
        let belief = BeliefGrid::new_unknown(world.geom().clone());
        let sensed = sense(&world, &belief, &poses[0], &full_sensor(6.0)).unwrap();
        for idx in 0..world.geom().cell_count() {
            match sensed.state(idx) {
                CellState::Free => assert_eq!(world.state(idx), CellState::Free),
                CellState::Occupied => assert_eq!(world.state(idx), CellState::Occupied),
                CellState::Unknown => {}
            }
        }
    }
}
