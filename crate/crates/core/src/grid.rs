//! Partition of the image into square elemental regions (SERs).

use crate::color::{Lab, LabImage};
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Label of an SER that belongs to no region yet.
pub const UNLABELED: u32 = 0;

/// One square elemental region. SERs on the right and bottom edges may be
/// narrower than the nominal side when the image size is not a multiple of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ser {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
    /// Mean Lab color over the SER's pixels.
    pub mean: Lab,
    /// Mean enhanced gradient over the SER's pixels.
    pub eg_mean: f64,
}

impl Ser {
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y0..self.y0 + self.height).flat_map(move |y| (self.x0..self.x0 + self.width).map(move |x| (x, y)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerGrid {
    width: usize,
    height: usize,
    side: usize,
    cols: usize,
    rows: usize,
    sers: Vec<Ser>,
    /// Region label per SER, [`UNLABELED`] when unassigned.
    pub labels: Vec<u32>,
}

impl SerGrid {
    /// Tile a `width x height` image with `side x side` SERs, keeping partial
    /// SERs at the right and bottom edges.
    pub fn new(width: usize, height: usize, side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::param("ser_side", "must be at least 1"));
        }
        if width < side || height < side {
            return Err(Error::ImageTooSmall { width, height, side });
        }
        let cols = width.div_ceil(side);
        let rows = height.div_ceil(side);
        let mut sers = Vec::with_capacity(cols * rows);
        for r in 0..rows {
            for c in 0..cols {
                let x0 = c * side;
                let y0 = r * side;
                sers.push(Ser {
                    x0,
                    y0,
                    width: side.min(width - x0),
                    height: side.min(height - y0),
                    mean: Lab::default(),
                    eg_mean: 0.0,
                });
            }
        }
        Ok(Self {
            width,
            height,
            side,
            cols,
            rows,
            sers,
            labels: vec![UNLABELED; cols * rows],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.sers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sers.is_empty()
    }

    pub fn sers(&self) -> &[Ser] {
        &self.sers
    }

    pub fn ser(&self, id: usize) -> &Ser {
        &self.sers[id]
    }

    /// SER index containing pixel `(x, y)`.
    pub fn ser_of_pixel(&self, x: usize, y: usize) -> usize {
        (y / self.side) * self.cols + x / self.side
    }

    /// 4-neighbors of an SER index, in up, left, right, down order.
    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = usize> {
        neighbors4(id, self.cols, self.rows)
    }

    /// Fill per-SER mean color and mean enhanced gradient. Returns the mean
    /// enhanced gradient over all pixels of the image.
    pub fn compute_stats(&mut self, lab: &LabImage, eg: &ScalarField) -> Result<f64> {
        let dims = (self.width, self.height);
        for actual in [(lab.width(), lab.height()), (eg.width(), eg.height())] {
            if actual != dims {
                return Err(Error::DimensionMismatch { expected: dims, actual });
            }
        }
        let mut eg_total = 0.0;
        for ser in &mut self.sers {
            let mut sum = [0.0f64; 3];
            let mut eg_sum = 0.0;
            for (x, y) in ser.pixels() {
                let p = lab.get(x, y);
                sum[0] += p.l;
                sum[1] += p.a;
                sum[2] += p.b;
                eg_sum += eg.get(x, y);
            }
            let n = ser.pixel_count() as f64;
            ser.mean = Lab::new(sum[0] / n, sum[1] / n, sum[2] / n);
            ser.eg_mean = eg_sum / n;
            eg_total += eg_sum;
        }
        Ok(eg_total / (self.width * self.height) as f64)
    }
}

/// 4-neighbors of cell `id` on a `cols x rows` lattice, up, left, right, down.
pub(crate) fn neighbors4(id: usize, cols: usize, rows: usize) -> impl Iterator<Item = usize> {
    let (c, r) = (id % cols, id / cols);
    let up = (r > 0).then(|| id - cols);
    let left = (c > 0).then(|| id - 1);
    let right = (c + 1 < cols).then(|| id + 1);
    let down = (r + 1 < rows).then(|| id + cols);
    [up, left, right, down].into_iter().flatten()
}
