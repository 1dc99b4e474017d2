//! Junction and slot parameterization, grid-cell coordinate mapping, and
//! angle encoding shared by the rest of the pipeline.
//!
//! Conventions used everywhere downstream: pixel coordinates are continuous
//! with the origin at the top-left corner, `x` growing along columns and `y`
//! along rows. Grid cells are addressed as `(row, col)` where `row` is
//! derived from `y` and `col` from `x`. Angles live in `[0, 2π)` and are
//! normalized at every construction site.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("point ({x}, {y}) outside image bounds [0, {size})")]
    OutOfBounds { x: f64, y: f64, size: u32 },
    #[error("cell ({row}, {col}) outside grid of size {g}")]
    InvalidCell { row: usize, col: usize, g: usize },
    #[error("cannot decode an angle from the zero vector")]
    ZeroVector,
    #[error("entrance junctions are coincident")]
    CoincidentJunctions,
    #[error("image size {image_size} not divisible by grid size {g}")]
    BadGrid { image_size: u32, g: usize },
}

/// 2D point in continuous pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    /// Rotates the point by `phi` radians about `center`.
    pub fn rotate_about(&self, center: Point, phi: f64) -> Point {
        let (s, c) = phi.sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        Point::new(center.x + c * dx - s * dy, center.y + s * dx + c * dy)
    }
}

/// Junction shape class: `T` for interior separators, `L` for row ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JunctionShape {
    T,
    L,
}

impl JunctionShape {
    pub const ALL: [JunctionShape; 2] = [JunctionShape::T, JunctionShape::L];

    pub fn index(self) -> usize {
        match self {
            JunctionShape::T => 0,
            JunctionShape::L => 1,
        }
    }
}

/// A parking-slot corner: position in pixels, rotation angle in `[0, 2π)`,
/// and shape class. The angle points along the slot's side line, away from
/// the entrance line into the slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub position: Point,
    pub angle: f64,
    pub shape: JunctionShape,
}

impl Junction {
    pub fn new(position: Point, angle: f64, shape: JunctionShape) -> Self {
        Self {
            position,
            angle: normalize_angle(angle),
            shape,
        }
    }

    /// Unit vector of the junction's rotational position.
    pub fn direction(&self) -> (f64, f64) {
        (self.angle.cos(), self.angle.sin())
    }
}

/// Normalizes an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can return TAU when the argument is a tiny negative number.
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Square image partitioned into `g × g` cells of `cell_size` pixels each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub image_size: u32,
    pub g: usize,
}

impl GridSpec {
    pub fn new(image_size: u32, g: usize) -> Result<Self, GeometryError> {
        if g < 2 || image_size as usize % g != 0 {
            return Err(GeometryError::BadGrid { image_size, g });
        }
        Ok(Self { image_size, g })
    }

    pub fn cell_size(&self) -> f64 {
        self.image_size as f64 / self.g as f64
    }

    pub fn cell_count(&self) -> usize {
        self.g * self.g
    }
}

/// Grid cell address, `(row, col)` with `row` from `y` and `col` from `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Flat index in row-major order.
    pub fn flat(&self, grid: &GridSpec) -> usize {
        self.row * grid.g + self.col
    }

    pub fn from_flat(index: usize, grid: &GridSpec) -> Self {
        Self {
            row: index / grid.g,
            col: index % grid.g,
        }
    }
}

/// Maps a pixel point to its grid cell and the relative `(x, y)` offset
/// inside that cell, both components in `[0, 1)`.
pub fn to_cell(point: Point, grid: &GridSpec) -> Result<(Cell, (f64, f64)), GeometryError> {
    let size = grid.image_size as f64;
    if !(point.x >= 0.0 && point.x < size && point.y >= 0.0 && point.y < size) {
        return Err(GeometryError::OutOfBounds {
            x: point.x,
            y: point.y,
            size: grid.image_size,
        });
    }
    let cell = grid.cell_size();
    let col = (point.x / cell).floor() as usize;
    let row = (point.y / cell).floor() as usize;
    let rel_x = point.x / cell - col as f64;
    let rel_y = point.y / cell - row as f64;
    Ok((Cell::new(row, col), (rel_x, rel_y)))
}

/// Inverse of [`to_cell`]: reconstructs the pixel point from a cell address
/// and the relative offset.
pub fn from_cell(cell: Cell, rel: (f64, f64), grid: &GridSpec) -> Result<Point, GeometryError> {
    if cell.row >= grid.g || cell.col >= grid.g {
        return Err(GeometryError::InvalidCell {
            row: cell.row,
            col: cell.col,
            g: grid.g,
        });
    }
    let size = grid.cell_size();
    Ok(Point::new(
        (cell.col as f64 + rel.0) * size,
        (cell.row as f64 + rel.1) * size,
    ))
}

/// Encodes an angle as its `(cos, sin)` pair on the unit circle.
pub fn encode_angle(angle: f64) -> (f64, f64) {
    (angle.cos(), angle.sin())
}

/// Recovers an angle in `[0, 2π)` from a (not necessarily normalized)
/// `(cos, sin)` pair. Fails on the zero vector.
pub fn decode_angle(c: f64, s: f64) -> Result<f64, GeometryError> {
    let norm = (c * c + s * s).sqrt();
    if norm < 1e-12 {
        return Err(GeometryError::ZeroVector);
    }
    Ok(normalize_angle((s / norm).atan2(c / norm)))
}

/// Per-cell identification class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellClass {
    Junction,
    Background,
}

impl CellClass {
    pub const ALL: [CellClass; 2] = [CellClass::Junction, CellClass::Background];

    pub fn index(self) -> usize {
        match self {
            CellClass::Junction => 0,
            CellClass::Background => 1,
        }
    }
}

/// Ground-truth label of one grid cell. `shape`, `rel` and `angle` are only
/// meaningful for junction cells; `shape` is `Some` iff the cell is a
/// junction cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellLabel {
    pub cell: Cell,
    pub rel: (f64, f64),
    pub angle: f64,
    pub identification: CellClass,
    pub shape: Option<JunctionShape>,
}

impl CellLabel {
    pub fn background(cell: Cell) -> Self {
        Self {
            cell,
            rel: (0.0, 0.0),
            angle: 0.0,
            identification: CellClass::Background,
            shape: None,
        }
    }

    pub fn junction(cell: Cell, rel: (f64, f64), angle: f64, shape: JunctionShape) -> Self {
        Self {
            cell,
            rel,
            angle: normalize_angle(angle),
            identification: CellClass::Junction,
            shape: Some(shape),
        }
    }

    pub fn is_junction(&self) -> bool {
        self.identification == CellClass::Junction
    }
}

/// Builds the per-cell label map for a set of junctions, one label per grid
/// cell in row-major order. When two junctions fall into the same cell the
/// one closer to the cell center wins (ties broken by list order).
pub fn grid_labels(junctions: &[Junction], grid: &GridSpec) -> Vec<CellLabel> {
    let mut labels: Vec<CellLabel> = (0..grid.cell_count())
        .map(|i| CellLabel::background(Cell::from_flat(i, grid)))
        .collect();
    let mut center_dist = vec![f64::INFINITY; grid.cell_count()];
    for j in junctions {
        let Ok((cell, rel)) = to_cell(j.position, grid) else {
            continue;
        };
        let idx = cell.flat(grid);
        let d = (rel.0 - 0.5).powi(2) + (rel.1 - 0.5).powi(2);
        if d < center_dist[idx] {
            center_dist[idx] = d;
            labels[idx] = CellLabel::junction(cell, rel, j.angle, j.shape);
        }
    }
    labels
}

/// A parking slot: the ordered entrance junction pair, the side-line depth,
/// and the four corner points (entrance pair first, then the deep corners in
/// reverse order so the polygon is a simple quadrilateral).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSpec {
    pub entrance: (usize, usize),
    pub depth: f64,
    pub polygon: [Point; 4],
}

/// Assembles the slot polygon spanned by two entrance junctions and the
/// side-line depth. The deep side is the one the junction angles point to.
pub fn entrance_and_sides(
    j1: &Junction,
    j2: &Junction,
    depth: f64,
) -> Result<[Point; 4], GeometryError> {
    let p1 = j1.position;
    let p2 = j2.position;
    let len = p1.distance(&p2);
    if len < 1e-9 {
        return Err(GeometryError::CoincidentJunctions);
    }
    let ux = (p2.x - p1.x) / len;
    let uy = (p2.y - p1.y) / len;
    // Left-hand normal of the entrance direction; flipped if the junction
    // angles point the other way.
    let (mut nx, mut ny) = (-uy, ux);
    let (d1x, d1y) = j1.direction();
    let (d2x, d2y) = j2.direction();
    let mut side = (d1x + d2x) * nx + (d1y + d2y) * ny;
    if side.abs() < 1e-12 {
        side = d1x * nx + d1y * ny;
    }
    if side < 0.0 {
        nx = -nx;
        ny = -ny;
    }
    Ok([
        p1,
        p2,
        Point::new(p2.x + depth * nx, p2.y + depth * ny),
        Point::new(p1.x + depth * nx, p1.y + depth * ny),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn grid_512() -> GridSpec {
        GridSpec::new(512, 16).unwrap()
    }

    #[test]
    fn cell_size_matches_grid_parameters() {
        assert_eq!(grid_512().cell_size(), 32.0);
        assert_eq!(GridSpec::new(128, 8).unwrap().cell_size(), 16.0);
    }

    #[test]
    fn grid_rejects_indivisible_or_tiny() {
        assert!(GridSpec::new(100, 16).is_err());
        assert!(GridSpec::new(512, 1).is_err());
    }

    #[test]
    fn to_cell_origin() {
        let (cell, rel) = to_cell(Point::new(0.0, 0.0), &grid_512()).unwrap();
        assert_eq!(cell, Cell::new(0, 0));
        assert_eq!(rel, (0.0, 0.0));
    }

    #[test]
    fn to_cell_interior_point() {
        // Direct arithmetic: 100/32 = 3.125, 200/32 = 6.25.
        let (cell, rel) = to_cell(Point::new(100.0, 200.0), &grid_512()).unwrap();
        assert_eq!(cell, Cell::new(6, 3));
        assert_eq!(rel, (0.125, 0.25));
    }

    #[test]
    fn to_cell_rejects_out_of_bounds() {
        assert!(to_cell(Point::new(-1.0, 0.0), &grid_512()).is_err());
        assert!(to_cell(Point::new(0.0, 512.0), &grid_512()).is_err());
    }

    #[test]
    fn from_cell_inverts_the_arithmetic() {
        let p = from_cell(Cell::new(6, 3), (0.125, 0.25), &grid_512()).unwrap();
        assert_eq!(p, Point::new(100.0, 200.0));
        let origin = from_cell(Cell::new(0, 0), (0.0, 0.0), &grid_512()).unwrap();
        assert_eq!(origin, Point::new(0.0, 0.0));
    }

    #[test]
    fn from_cell_rejects_invalid_cell() {
        assert!(from_cell(Cell::new(16, 0), (0.0, 0.0), &grid_512()).is_err());
    }

    proptest! {
        #[test]
        fn cell_roundtrip_is_exact(x in 0.0f64..512.0, y in 0.0f64..512.0) {
            let grid = grid_512();
            let p = Point::new(x, y);
            let (cell, rel) = to_cell(p, &grid).unwrap();
            prop_assert!(rel.0 >= 0.0 && rel.0 < 1.0);
            prop_assert!(rel.1 >= 0.0 && rel.1 < 1.0);
            let back = from_cell(cell, rel, &grid).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn angle_roundtrip(theta in 0.0f64..TAU) {
            let (c, s) = encode_angle(theta);
            prop_assert!((c * c + s * s - 1.0).abs() < 1e-12);
            let back = decode_angle(c, s).unwrap();
            prop_assert!((back - theta).abs() < 1e-9 || (back - theta).abs() > TAU - 1e-9);
        }
    }

    #[test]
    fn angle_encoding_examples() {
        assert_eq!(encode_angle(0.0), (1.0, 0.0));
        let (c, s) = encode_angle(FRAC_PI_2);
        assert!(c.abs() < 1e-15);
        assert!((s - 1.0).abs() < 1e-15);
        let theta = 5.0;
        let (c, s) = encode_angle(theta);
        assert!((decode_angle(c, s).unwrap() - theta).abs() < 1e-12);
    }

    #[test]
    fn decode_normalizes_input() {
        // (3, 4) has norm 5; same angle as (0.6, 0.8).
        let a = decode_angle(3.0, 4.0).unwrap();
        let b = decode_angle(0.6, 0.8).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn decode_rejects_zero_vector() {
        assert_eq!(decode_angle(0.0, 0.0), Err(GeometryError::ZeroVector));
    }

    #[test]
    fn normalize_angle_wraps() {
        assert!((normalize_angle(7.0) - (7.0 - TAU)).abs() < 1e-12);
        assert!((normalize_angle(-1.0) - (TAU - 1.0)).abs() < 1e-12);
        assert_eq!(normalize_angle(0.0), 0.0);
    }

    #[test]
    fn entrance_axis_aligned() {
        let j1 = Junction::new(Point::new(0.0, 0.0), FRAC_PI_2, JunctionShape::L);
        let j2 = Junction::new(Point::new(64.0, 0.0), FRAC_PI_2, JunctionShape::L);
        let poly = entrance_and_sides(&j1, &j2, 128.0).unwrap();
        let expect = [
            Point::new(0.0, 0.0),
            Point::new(64.0, 0.0),
            Point::new(64.0, 128.0),
            Point::new(0.0, 128.0),
        ];
        for (p, e) in poly.iter().zip(expect.iter()) {
            assert!(p.distance(e) < 1e-9, "{p:?} vs {e:?}");
        }
    }

    #[test]
    fn entrance_rejects_coincident() {
        let j = Junction::new(Point::new(5.0, 5.0), 0.0, JunctionShape::T);
        assert_eq!(
            entrance_and_sides(&j, &j.clone(), 10.0),
            Err(GeometryError::CoincidentJunctions)
        );
    }

    #[test]
    fn entrance_is_rotation_equivariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        use rand::Rng;
        use rand::SeedableRng;
        for _ in 0..200 {
            let p1 = Point::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            let p2 = Point::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            if p1.distance(&p2) < 1.0 {
                continue;
            }
            let base = rng.gen_range(0.0..TAU);
            let depth = rng.gen_range(5.0..50.0);
            let j1 = Junction::new(p1, base, JunctionShape::T);
            let j2 = Junction::new(p2, base, JunctionShape::T);
            let poly = entrance_and_sides(&j1, &j2, depth).unwrap();

            let phi = rng.gen_range(0.0..TAU);
            let center = Point::new(10.0, -3.0);
            let r1 = Junction::new(p1.rotate_about(center, phi), base + phi, JunctionShape::T);
            let r2 = Junction::new(p2.rotate_about(center, phi), base + phi, JunctionShape::T);
            let rotated = entrance_and_sides(&r1, &r2, depth).unwrap();
            for (p, q) in poly.iter().zip(rotated.iter()) {
                let expect = p.rotate_about(center, phi);
                assert!(expect.distance(q) < 1e-9, "{expect:?} vs {q:?}");
            }
        }
    }

    #[test]
    fn entrance_matches_line_equation_oracle() {
        // Independent construction: intersect the side lines (through each
        // junction along its angle) with the line parallel to the entrance
        // at distance `depth` on the angle side.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p1 = Point::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0));
            let p2 = Point::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0));
            if p1.distance(&p2) < 1.0 {
                continue;
            }
            let depth = rng.gen_range(10.0..60.0);
            let len = p1.distance(&p2);
            let u = ((p2.x - p1.x) / len, (p2.y - p1.y) / len);
            // Perpendicular side direction, fixed to one side.
            let n = (-u.1, u.0);
            let angle = n.1.atan2(n.0);
            let j1 = Junction::new(p1, angle, JunctionShape::L);
            let j2 = Junction::new(p2, angle, JunctionShape::L);
            let poly = entrance_and_sides(&j1, &j2, depth).unwrap();

            // Oracle: corners are p_i + depth * n exactly, because the side
            // lines are perpendicular to the entrance.
            let c2 = Point::new(p2.x + depth * n.0, p2.y + depth * n.1);
            let c1 = Point::new(p1.x + depth * n.0, p1.y + depth * n.1);
            assert!(poly[2].distance(&c2) < 1e-9);
            assert!(poly[3].distance(&c1) < 1e-9);
        }
    }

    #[test]
    fn grid_labels_assigns_and_resolves_collisions() {
        let grid = GridSpec::new(128, 8).unwrap();
        let j_far = Junction::new(Point::new(17.0, 17.0), 0.0, JunctionShape::T);
        let j_near = Junction::new(Point::new(24.0, 24.0), 1.0, JunctionShape::L);
        let labels = grid_labels(&[j_far, j_near], &grid);
        let idx = Cell::new(1, 1).flat(&grid);
        // Both land in cell (1,1); the one closer to the 8px cell center wins.
        assert_eq!(labels[idx].shape, Some(JunctionShape::L));
        assert_eq!(
            labels.iter().filter(|l| l.is_junction()).count(),
            1,
            "one junction label for one occupied cell"
        );
        assert!(labels[Cell::new(0, 0).flat(&grid)].identification == CellClass::Background);
    }

    #[test]
    fn pi_rotation_maps_positions_and_angles() {
        let center = Point::new(64.0, 64.0);
        let j = Junction::new(Point::new(96.0, 64.0), 0.0, JunctionShape::T);
        let r = Junction::new(
            j.position.rotate_about(center, PI),
            j.angle + PI,
            JunctionShape::T,
        );
        assert!(r.position.distance(&Point::new(32.0, 64.0)) < 1e-9);
        assert!((r.angle - PI).abs() < 1e-12);
    }
}
