use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial layout of the cells.
///
/// `WellMixed` is the single-cell model driven by the interaction fraction
/// `mu`. `Line` and `Grid` use the lattice fractions `q1`, `q2`; a `Line` of
/// one cell has no neighbours and therefore no migration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Lattice {
    WellMixed,
    Line { cells: usize },
    Grid { nx: usize, ny: usize },
}

/// Neighbour direction. In 1-D only `West` (cell ℓ−1) and `East` (ℓ+1) exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    West,
    East,
    South,
    North,
}

const LINE_DIRS: [Direction; 2] = [Direction::West, Direction::East];
const GRID_DIRS: [Direction; 4] = [Direction::West, Direction::East, Direction::South, Direction::North];

impl Lattice {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Lattice::WellMixed => Ok(()),
            Lattice::Line { cells } if cells >= 1 => Ok(()),
            Lattice::Grid { nx, ny } if nx >= 1 && ny >= 1 => Ok(()),
            other => Err(Error::InvalidDimension(format!("{other:?} has no cells"))),
        }
    }

    pub fn n_cells(&self) -> usize {
        match *self {
            Lattice::WellMixed => 1,
            Lattice::Line { cells } => cells,
            Lattice::Grid { nx, ny } => nx * ny,
        }
    }

    pub fn is_well_mixed(&self) -> bool {
        matches!(self, Lattice::WellMixed)
    }

    /// Migration directions, in channel-block order.
    pub fn directions(&self) -> &'static [Direction] {
        match self {
            Lattice::WellMixed => &[],
            Lattice::Line { .. } => &LINE_DIRS,
            Lattice::Grid { .. } => &GRID_DIRS,
        }
    }

    /// Number of event families per cell: five local events plus four
    /// exchange events per direction.
    pub fn events_per_cell(&self) -> usize {
        5 + 4 * self.directions().len()
    }

    pub fn n_channels(&self) -> usize {
        self.events_per_cell() * self.n_cells()
    }

    /// Neighbour of `cell` in `dir`, or `None` outside the lattice (a ghost
    /// cell with no components).
    pub fn neighbor(&self, cell: usize, dir: Direction) -> Option<usize> {
        match *self {
            Lattice::WellMixed => None,
            Lattice::Line { cells } => match dir {
                Direction::West => cell.checked_sub(1),
                Direction::East => (cell + 1 < cells).then_some(cell + 1),
                _ => None,
            },
            Lattice::Grid { nx, ny } => {
                let (x, y) = (cell % nx, cell / nx);
                match dir {
                    Direction::West => (x > 0).then(|| cell - 1),
                    Direction::East => (x + 1 < nx).then(|| cell + 1),
                    Direction::South => (y > 0).then(|| cell - nx),
                    Direction::North => (y + 1 < ny).then(|| cell + nx),
                }
            }
        }
    }

    /// Grid coordinates `(x, y)` of a cell (`y = 0` off the grid layout).
    pub fn coords(&self, cell: usize) -> (usize, usize) {
        match *self {
            Lattice::Grid { nx, .. } => (cell % nx, cell / nx),
            _ => (cell, 0),
        }
    }
}

/// Component counts of one cell: predators `a`, prey `b`, empty sites `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Cell {
    pub a: u32,
    pub b: u32,
    pub e: u32,
}

impl Cell {
    pub fn new(a: u32, b: u32, e: u32) -> Self {
        Self { a, b, e }
    }

    pub fn total(&self) -> u64 {
        self.a as u64 + self.b as u64 + self.e as u64
    }

    pub fn get(&self, species: usize) -> u32 {
        match species {
            0 => self.a,
            1 => self.b,
            _ => self.e,
        }
    }

    pub fn get_mut(&mut self, species: usize) -> &mut u32 {
        match species {
            0 => &mut self.a,
            1 => &mut self.b,
            _ => &mut self.e,
        }
    }
}

/// Integer state of the whole lattice. Every cell holds exactly `capacity`
/// components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeState {
    lattice: Lattice,
    capacity: u32,
    cells: Vec<Cell>,
}

impl LatticeState {
    pub fn new(lattice: Lattice, capacity: u32, cells: Vec<Cell>) -> Result<Self> {
        lattice.validate()?;
        if cells.len() != lattice.n_cells() {
            return Err(Error::InvalidDimension(format!(
                "{} cells given for a lattice of {}",
                cells.len(),
                lattice.n_cells()
            )));
        }
        let s = Self { lattice, capacity, cells };
        s.check()?;
        Ok(s)
    }

    /// Well-mixed state with `a` predators and `b` prey among `n` components.
    pub fn well_mixed(n: u32, a: u32, b: u32) -> Result<Self> {
        let e = n.checked_sub(a).and_then(|r| r.checked_sub(b)).ok_or_else(|| {
            Error::InvalidState(format!("a + b = {} exceeds n = {n}", a as u64 + b as u64))
        })?;
        Self::new(Lattice::WellMixed, n, vec![Cell::new(a, b, e)])
    }

    /// Every cell holds `a` predators and `b` prey.
    pub fn uniform(lattice: Lattice, capacity: u32, a: u32, b: u32) -> Result<Self> {
        lattice.validate()?;
        let e = capacity.checked_sub(a).and_then(|r| r.checked_sub(b)).ok_or_else(|| {
            Error::InvalidState(format!("a + b exceeds capacity {capacity}"))
        })?;
        Self::new(lattice, capacity, vec![Cell::new(a, b, e); lattice.n_cells()])
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [Cell] {
        &mut self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Densities `(f, g) = (A/Nc, B/Nc)` of a cell.
    pub fn densities(&self, i: usize) -> (f64, f64) {
        let c = self.cells[i];
        let n = self.capacity as f64;
        (c.a as f64 / n, c.b as f64 / n)
    }

    /// Count of column `col = species * Mc + cell` in the flattened state.
    pub fn column(&self, col: usize) -> u32 {
        let mc = self.cells.len();
        self.cells[col % mc].get(col / mc)
    }

    /// Checks the per-cell conservation law.
    pub fn check(&self) -> Result<()> {
        for (i, c) in self.cells.iter().enumerate() {
            if c.total() != self.capacity as u64 {
                return Err(Error::InvalidState(format!(
                    "cell {i}: A + B + E = {} but capacity is {}",
                    c.total(),
                    self.capacity
                )));
            }
        }
        Ok(())
    }

    pub fn is_extinct(&self) -> bool {
        self.cells.iter().all(|c| c.a == 0 && c.b == 0)
    }
}
