use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::geometry::{Point2, Rect};

/// Placement and size of a regular 2D grid in the world frame.
///
/// Cell `(ix, iy)` covers `[origin.x + ix*res, origin.x + (ix+1)*res)` and the
/// same along y. Cell centers sit half a cell inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point2,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(origin: Point2, resolution: f64, width: usize, height: usize) -> Result<Self, GridError> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(GridError::InvalidResolution(resolution));
        }
        if width == 0 || height == 0 {
            return Err(GridError::EmptyGrid { width, height });
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(GridError::InvalidOrigin);
        }
        Ok(GridSpec { origin, resolution, width, height })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    #[inline]
    pub fn in_bounds(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.width && (iy as usize) < self.height
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    pub fn cell_rect(&self, ix: usize, iy: usize) -> Rect {
        self.cell_rect_signed(ix as i64, iy as i64)
    }

    /// Cell square for signed coordinates, which may lie outside the grid.
    pub fn cell_rect_signed(&self, ix: i64, iy: i64) -> Rect {
        let min = Point2::new(self.origin.x + ix as f64 * self.resolution, self.origin.y + iy as f64 * self.resolution);
        Rect { min, max: Point2::new(min.x + self.resolution, min.y + self.resolution) }
    }

    pub fn cell_center_signed(&self, ix: i64, iy: i64) -> Point2 {
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// Signed range of cells whose squares touch `rect`, not clipped to the grid.
    pub fn covering_range(&self, rect: &Rect) -> ((i64, i64), (i64, i64)) {
        let (x0, y0) = self.cell_coords(rect.min);
        let (x1, y1) = self.cell_coords(rect.max);
        ((x0, y0), (x1, y1))
    }

    /// Signed cell coordinates of a world point; may lie outside the grid.
    pub fn cell_coords(&self, p: Point2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let (ix, iy) = self.cell_coords(p);
        self.in_bounds(ix, iy).then_some((ix as usize, iy as usize))
    }

    pub fn extent(&self) -> Rect {
        Rect {
            min: self.origin,
            max: Point2::new(
                self.origin.x + self.width as f64 * self.resolution,
                self.origin.y + self.height as f64 * self.resolution,
            ),
        }
    }

    /// Same origin, cells `factor` times larger. Partial coverage at the far
    /// edges rounds up.
    pub fn coarsen(&self, factor: usize) -> GridSpec {
        GridSpec {
            origin: self.origin,
            resolution: self.resolution * factor as f64,
            width: self.width.div_ceil(factor),
            height: self.height.div_ceil(factor),
        }
    }

    /// Inclusive index range of cells whose centers may lie in `rect`, clipped.
    pub fn index_range(&self, rect: &Rect) -> Option<((usize, usize), (usize, usize))> {
        let lo_x = ((rect.min.x - self.origin.x) / self.resolution - 0.5).ceil() as i64;
        let lo_y = ((rect.min.y - self.origin.y) / self.resolution - 0.5).ceil() as i64;
        let hi_x = ((rect.max.x - self.origin.x) / self.resolution - 0.5).floor() as i64;
        let hi_y = ((rect.max.y - self.origin.y) / self.resolution - 0.5).floor() as i64;
        let lo_x = lo_x.max(0);
        let lo_y = lo_y.max(0);
        let hi_x = hi_x.min(self.width as i64 - 1);
        let hi_y = hi_y.min(self.height as i64 - 1);
        (lo_x <= hi_x && lo_y <= hi_y).then_some(((lo_x as usize, lo_y as usize), (hi_x as usize, hi_y as usize)))
    }
}

/// Dense row-major grid of values.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    spec: GridSpec,
    cells: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(spec: GridSpec, value: T) -> Self {
        Grid { cells: vec![value; spec.len()], spec }
    }
}

impl<T> Grid<T> {
    pub fn from_cells(spec: GridSpec, cells: Vec<T>) -> Result<Self, GridError> {
        if cells.len() != spec.len() {
            return Err(GridError::CellCount { expected: spec.len(), found: cells.len() });
        }
        Ok(Grid { spec, cells })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [T] {
        &mut self.cells
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> &T {
        &self.cells[self.spec.index(ix, iy)]
    }

    #[inline]
    pub fn get_signed(&self, ix: i64, iy: i64) -> Option<&T> {
        self.spec.in_bounds(ix, iy).then(|| &self.cells[self.spec.index(ix as usize, iy as usize)])
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, value: T) {
        let i = self.spec.index(ix, iy);
        self.cells[i] = value;
    }

    pub fn at(&self, p: Point2) -> Option<&T> {
        self.spec.cell_of(p).map(|(ix, iy)| self.get(ix, iy))
    }
}
