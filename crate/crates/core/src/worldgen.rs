//! Reproducible forest-like world generation: seeded tree placement at target
//! densities, protected spawn area, and collision-free robot spawn poses.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{encode_pgm, CellState, GridGeom};
use crate::mapping::Pose;
use crate::numeric::derive_seed;
use crate::real::Real;

/// Robot body radius in meters; spawn poses keep 2× this clearance apart.
pub const ROBOT_RADIUS_M: f64 = 0.3;

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum WorldGenError {
    #[error("invalid world spec: {0}")]
    InvalidSpec(String),
    #[error("could not place tree {tree} of {total} after {attempts} attempts; density unsatisfiable")]
    UnsatisfiableDensity { tree: usize, total: usize, attempts: usize },
    #[error("spawn failed: {0}")]
    Spawn(String),
}

/// Axis-aligned rectangle in world meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectM<F> {
    pub x0: F,
    pub y0: F,
    pub x1: F,
    pub y1: F,
}

impl<F: Real> RectM<F> {
    pub fn area(&self) -> F {
        (self.x1 - self.x0).max(F::zero()) * (self.y1 - self.y0).max(F::zero())
    }

    pub fn contains(&self, x: F, y: F) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

/// Density override applied inside a rectangle, for mixed-density worlds.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPatch<F> {
    pub rect: RectM<F>,
    pub tree_density: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldSpec<F> {
    pub width_m: F,
    pub height_m: F,
    pub resolution_m: F,
    /// Trees per square meter outside any density patch.
    pub tree_density: F,
    /// Uniform sampling range for tree disc radii, meters.
    pub tree_radius_range: [F; 2],
    pub seed: u64,
    pub density_patches: Vec<DensityPatch<F>>,
}

impl<F: Real> WorldSpec<F> {
    pub fn validate(&self) -> Result<(), WorldGenError> {
        let bad = |m: &str| Err(WorldGenError::InvalidSpec(m.to_string()));
        if !(self.width_m > F::zero() && self.height_m > F::zero()) {
            return bad("width and height must be positive");
        }
        if !(self.resolution_m > F::zero()) {
            return bad("resolution must be positive");
        }
        if self.tree_density < F::zero() {
            return bad("tree density must be non-negative");
        }
        let [rmin, rmax] = self.tree_radius_range;
        if !(rmin >= F::zero() && rmin <= rmax) {
            return bad("tree radius range must satisfy 0 <= min <= max");
        }
        for p in &self.density_patches {
            if p.tree_density < F::zero() {
                return bad("patch density must be non-negative");
            }
            if !(p.rect.x0 < p.rect.x1 && p.rect.y0 < p.rect.y1) {
                return bad("patch rectangle must have positive extent");
            }
        }
        Ok(())
    }

    pub fn geom(&self) -> GridGeom<F> {
        GridGeom::new(self.width_m, self.height_m, self.resolution_m)
    }

    /// Central square kept clear of trees so that spawning always has room.
    pub fn spawn_zone(&self) -> RectM<F> {
        let side = F::of(4.0).min(self.width_m / F::of(2.0)).min(self.height_m / F::of(2.0));
        let cx = self.width_m / F::of(2.0);
        let cy = self.height_m / F::of(2.0);
        let h = side / F::of(2.0);
        RectM { x0: cx - h, y0: cy - h, x1: cx + h, y1: cy + h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tree<F> {
    pub x: F,
    pub y: F,
    pub radius: F,
}

/// Hidden true occupancy of the world. Only the sensor model reads it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthGrid<F> {
    geom: GridGeom<F>,
    cells: Vec<CellState>,
    trees: Vec<Tree<F>>,
    spec: WorldSpec<F>,
}

impl<F: Real> GroundTruthGrid<F> {
    /// Build a world from explicit cell states (map ingestion and tests).
    /// The tree list is left empty.
    pub fn from_cells(spec: WorldSpec<F>, cells: Vec<CellState>) -> Result<Self, WorldGenError> {
        spec.validate()?;
        let geom = spec.geom();
        if cells.len() != geom.cell_count() {
            return Err(WorldGenError::InvalidSpec(format!(
                "expected {} cells, got {}",
                geom.cell_count(),
                cells.len()
            )));
        }
        if cells.iter().any(|&c| c == CellState::Unknown) {
            return Err(WorldGenError::InvalidSpec(
                "ground truth cells must be Free or Occupied".into(),
            ));
        }
        Ok(Self { geom, cells, trees: Vec::new(), spec })
    }

    pub fn geom(&self) -> &GridGeom<F> {
        &self.geom
    }

    pub fn spec(&self) -> &WorldSpec<F> {
        &self.spec
    }

    pub fn trees(&self) -> &[Tree<F>] {
        &self.trees
    }

    pub fn state(&self, idx: usize) -> CellState {
        self.cells[idx]
    }

    pub fn is_free(&self, idx: usize) -> bool {
        self.cells[idx] == CellState::Free
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == CellState::Occupied).count()
    }

    /// P5 PGM bytes: 255 = Free, 0 = Occupied.
    pub fn to_pgm(&self) -> Vec<u8> {
        let levels: Vec<u8> = self
            .cells
            .iter()
            .map(|c| if *c == CellState::Occupied { 0 } else { 255 })
            .collect();
        encode_pgm(self.geom.cols, self.geom.rows, &levels)
    }
}

fn disc_intersects_rect<F: Real>(x: F, y: F, r: F, rect: &RectM<F>) -> bool {
    let nx = x.max(rect.x0).min(rect.x1);
    let ny = y.max(rect.y0).min(rect.y1);
    let dx = x - nx;
    let dy = y - ny;
    dx * dx + dy * dy < r * r
}

/// Generate the ground-truth forest for `spec`. Deterministic per seed.
///
/// Tree centers are sampled uniformly per density region (`round(density ×
/// area)` of them); a placement is rejected if its disc would intersect the
/// protected spawn zone. Trees may overlap each other. A cell is Occupied
/// when its center lies inside some tree disc.
pub fn generate_world<F: Real>(spec: &WorldSpec<F>) -> Result<GroundTruthGrid<F>, WorldGenError> {
    spec.validate()?;
    let geom = spec.geom();
    let spawn_zone = spec.spawn_zone();
    let world_rect =
        RectM { x0: F::zero(), y0: F::zero(), x1: spec.width_m, y1: spec.height_m };

    // Region list: each patch, then the remainder of the world at the base
    // density. Patch areas are clipped conceptually by sampling inside the
    // patch rect; the remainder rejects points inside any patch.
    let mut patch_area = F::zero();
    for p in &spec.density_patches {
        patch_area += p.rect.area();
    }
    let remainder_area = (world_rect.area() - patch_area).max(F::zero());

    let mut trees: Vec<Tree<F>> = Vec::new();
    let mut place_region =
        |region: usize, density: F, area: F, sample_ok: &dyn Fn(F, F) -> bool| -> Result<(), WorldGenError> {
            let count = (density * area).to_f64_lossy().round() as usize;
            if count == 0 {
                return Ok(());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &[region as u64]));
            let [rmin, rmax] = spec.tree_radius_range;
            for t in 0..count {
                let mut placed = false;
                for _ in 0..MAX_PLACEMENT_ATTEMPTS {
                    let x = F::of(rng.gen::<f64>()) * spec.width_m;
                    let y = F::of(rng.gen::<f64>()) * spec.height_m;
                    if !sample_ok(x, y) {
                        continue;
                    }
                    let radius = rmin + F::of(rng.gen::<f64>()) * (rmax - rmin);
                    if disc_intersects_rect(x, y, radius, &spawn_zone) {
                        continue;
                    }
                    trees.push(Tree { x, y, radius });
                    placed = true;
                    break;
                }
                if !placed {
                    return Err(WorldGenError::UnsatisfiableDensity {
                        tree: t,
                        total: count,
                        attempts: MAX_PLACEMENT_ATTEMPTS,
                    });
                }
            }
            Ok(())
        };

    for (i, patch) in spec.density_patches.iter().enumerate() {
        let rect = patch.rect;
        place_region(i, patch.tree_density, rect.area(), &move |x, y| rect.contains(x, y))?;
    }
    let patches = spec.density_patches.clone();
    place_region(spec.density_patches.len(), spec.tree_density, remainder_area, &move |x, y| {
        patches.iter().all(|p| !p.rect.contains(x, y))
    })?;

    let mut cells = vec![CellState::Free; geom.cell_count()];
    for tree in &trees {
        // only rasterize the tree's bounding box
        let r = tree.radius;
        let c0 = ((tree.x - r) / geom.resolution).floor().to_isize().unwrap().max(0) as usize;
        let r0 = ((tree.y - r) / geom.resolution).floor().to_isize().unwrap().max(0) as usize;
        let c1 = (((tree.x + r) / geom.resolution).ceil().to_usize().unwrap()).min(geom.cols);
        let r1 = (((tree.y + r) / geom.resolution).ceil().to_usize().unwrap()).min(geom.rows);
        for row in r0..r1 {
            for col in c0..c1 {
                let idx = geom.index(col, row);
                let (cx, cy) = geom.cell_center(idx);
                let dx = cx - tree.x;
                let dy = cy - tree.y;
                if dx * dx + dy * dy <= r * r {
                    cells[idx] = CellState::Occupied;
                }
            }
        }
    }

    Ok(GroundTruthGrid { geom, cells, trees, spec: spec.clone() })
}

/// Pick `n_r` collision-free spawn poses near the world center, deterministic
/// per seed. Poses sit on Free cell centers with pairwise clearance of at
/// least `2 × ROBOT_RADIUS_M`.
pub fn spawn_poses<F: Real>(
    grid: &GroundTruthGrid<F>,
    n_r: usize,
    seed: u64,
) -> Result<Vec<Pose<F>>, WorldGenError> {
    if n_r == 0 {
        return Ok(Vec::new());
    }
    let geom = grid.geom();
    let cx = grid.spec.width_m / F::of(2.0);
    let cy = grid.spec.height_m / F::of(2.0);
    let mut candidates: Vec<(F, usize)> = (0..geom.cell_count())
        .filter(|&i| grid.is_free(i))
        .map(|i| {
            let (x, y) = geom.cell_center(i);
            ((x - cx).powi(2) + (y - cy).powi(2), i)
        })
        .collect();
    if candidates.len() < n_r {
        return Err(WorldGenError::Spawn(format!(
            "{} free cells available for {} robots",
            candidates.len(),
            n_r
        )));
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x5b]));
    // Shuffle a center-biased window so different seeds spread differently
    // while staying together as a team.
    let window = (n_r * 4).max(16).min(candidates.len());
    let mut pool: Vec<usize> = candidates.iter().take(window).map(|&(_, i)| i).collect();
    for i in (1..pool.len()).rev() {
        let j = rng.gen_range(0..=i);
        pool.swap(i, j);
    }
    pool.extend(candidates.iter().skip(window).map(|&(_, i)| i));

    let clearance = F::of(2.0 * ROBOT_RADIUS_M);
    let mut chosen: Vec<usize> = Vec::with_capacity(n_r);
    for idx in pool {
        if chosen.iter().all(|&c| geom.cell_distance(c, idx) >= clearance) {
            chosen.push(idx);
            if chosen.len() == n_r {
                break;
            }
        }
    }
    if chosen.len() < n_r {
        return Err(WorldGenError::Spawn(format!(
            "only {} poses satisfy the clearance constraint for {} robots",
            chosen.len(),
            n_r
        )));
    }
    Ok(chosen
        .into_iter()
        .map(|idx| {
            let (x, y) = geom.cell_center(idx);
            let yaw = F::of((rng.gen::<f64>() * 2.0 - 1.0) * std::f64::consts::PI);
            Pose::new(x, y, yaw)
        })
        .collect())
}

/// Quadrant density patches used for the mixed-density preset.
pub fn mixed_density_patches<F: Real>(width_m: F, height_m: F) -> Vec<DensityPatch<F>> {
    let hx = width_m / F::of(2.0);
    let hy = height_m / F::of(2.0);
    let d = |x0, y0, x1, y1, density: f64| DensityPatch {
        rect: RectM { x0, y0, x1, y1 },
        tree_density: F::of(density),
    };
    vec![
        d(F::zero(), F::zero(), hx, hy, 0.1),
        d(hx, F::zero(), width_m, hy, 0.15),
        d(F::zero(), hy, hx, height_m, 0.2),
        d(hx, hy, width_m, height_m, 0.15),
    ]
}
