use crate::error::{Error, Result};
use crate::model::lattice::{Lattice, LatticeState};

/// Change vectors of the five local events on (A, B, E): prey birth,
/// predator birth by predation, predation without birth, predator death,
/// prey death.
pub const LOCAL_EVENTS: [[i8; 3]; 5] = [
    [0, 1, -1],
    [1, -1, 0],
    [0, -1, 1],
    [-1, 0, 1],
    [0, -1, 1],
];

/// Species factor of the four exchange events with a neighbour: predator
/// leaves, predator arrives, prey leaves, prey arrives.
pub const EXCHANGE_EVENTS: [[i8; 3]; 4] = [[1, 0, -1], [-1, 0, 1], [0, 1, -1], [0, -1, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub col: usize,
    pub delta: i8,
}

/// Sparse stoichiometry matrix.
///
/// Row `j * Mc + l` is event family `j` anchored at cell `l`; column
/// `s * Mc + l` is species `s` (0 = A, 1 = B, 2 = E) of cell `l`. Exchange
/// blocks are Kronecker products of [`EXCHANGE_EVENTS`] with a neighbour
/// difference matrix whose row `l` holds −1 at `l` and +1 at the neighbour,
/// and is zero when the neighbour lies outside the lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoichiometryMatrix {
    n_cols: usize,
    offsets: Vec<usize>,
    entries: Vec<Entry>,
}

impl StoichiometryMatrix {
    pub fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[Entry] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        self.row(i).iter().map(|e| e.delta as i64).sum()
    }

    /// Dense copy, for inspection of small lattices.
    pub fn to_dense(&self) -> Vec<Vec<i8>> {
        (0..self.n_rows())
            .map(|i| {
                let mut r = vec![0i8; self.n_cols];
                for e in self.row(i) {
                    r[e.col] += e.delta;
                }
                r
            })
            .collect()
    }

    /// Adds row `i` to `state` in place. On failure the state is untouched.
    pub fn apply_row(&self, state: &mut LatticeState, i: usize) -> Result<()> {
        if i >= self.n_rows() {
            return Err(Error::InvalidConfig(format!("event row {i} out of range")));
        }
        let mc = state.n_cells();
        if mc * 3 != self.n_cols {
            return Err(Error::InvalidDimension(format!(
                "matrix has {} columns but state has {} cells",
                self.n_cols, mc
            )));
        }
        for e in self.row(i) {
            let v = state.column(e.col) as i64 + e.delta as i64;
            if v < 0 {
                return Err(Error::InfeasibleEvent { row: i });
            }
        }
        let cells = state.cells_mut();
        for e in self.row(i) {
            let c = cells[e.col % mc].get_mut(e.col / mc);
            *c = (*c as i64 + e.delta as i64) as u32;
        }
        Ok(())
    }
}

/// Builds the stoichiometry matrix for any lattice.
pub fn build_stoichiometry(lattice: Lattice) -> Result<StoichiometryMatrix> {
    lattice.validate()?;
    let mc = lattice.n_cells();
    let mut offsets = vec![0];
    let mut entries = Vec::new();
    let mut push_kron = |factor: &[[i8; 3]], diff_row: &dyn Fn(usize) -> Vec<(usize, i8)>| {
        for f in factor {
            for l in 0..mc {
                let d = diff_row(l);
                for (s, &v) in f.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    for &(k, m) in &d {
                        entries.push(Entry { col: s * mc + k, delta: v * m });
                    }
                }
                offsets.push(entries.len());
            }
        }
    };
    push_kron(&LOCAL_EVENTS, &|l| vec![(l, 1)]);
    for &dir in lattice.directions() {
        push_kron(&EXCHANGE_EVENTS, &|l| match lattice.neighbor(l, dir) {
            Some(nb) => vec![(l, -1), (nb, 1)],
            None => Vec::new(),
        });
    }
    Ok(StoichiometryMatrix { n_cols: 3 * mc, offsets, entries })
}

/// The 5×3 matrix of the well-mixed model.
pub fn build_stoichiometry_homogeneous() -> StoichiometryMatrix {
    build_stoichiometry(Lattice::WellMixed).expect("well-mixed lattice is always valid")
}

/// The (13·Mc)×(3·Mc) matrix of a 1-D lattice of `mc` cells.
pub fn build_stoichiometry_heterogeneous(mc: usize) -> Result<StoichiometryMatrix> {
    if mc == 0 {
        return Err(Error::InvalidDimension("Mc must be at least 1".into()));
    }
    build_stoichiometry(Lattice::Line { cells: mc })
}

/// Returns `state + V[row]`.
pub fn apply_event(state: &LatticeState, v: &StoichiometryMatrix, row: usize) -> Result<LatticeState> {
    let mut next = state.clone();
    v.apply_row(&mut next, row)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::lattice::Cell;

    /// Dense Kronecker product, independent of the sparse builder.
    fn kron(a: &[Vec<i8>], b: &[Vec<i8>]) -> Vec<Vec<i8>> {
        let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
        let mut out = vec![vec![0i8; ca * cb]; ra * rb];
        for i in 0..ra {
            for j in 0..ca {
                for k in 0..rb {
                    for l in 0..cb {
                        out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    fn dense_reference(mc: usize) -> Vec<Vec<i8>> {
        let vhat: Vec<Vec<i8>> = LOCAL_EVENTS.iter().map(|r| r.to_vec()).collect();
        let vm: Vec<Vec<i8>> = EXCHANGE_EVENTS.iter().map(|r| r.to_vec()).collect();
        let eye: Vec<Vec<i8>> = (0..mc).map(|i| (0..mc).map(|j| (i == j) as i8).collect()).collect();
        let mut m_minus = vec![vec![0i8; mc]; mc];
        let mut m_plus = vec![vec![0i8; mc]; mc];
        for l in 1..mc {
            m_minus[l][l - 1] = 1;
            m_minus[l][l] = -1;
        }
        for l in 0..mc.saturating_sub(1) {
            m_plus[l][l] = -1;
            m_plus[l][l + 1] = 1;
        }
        let mut out = kron(&vhat, &eye);
        out.extend(kron(&vm, &m_minus));
        out.extend(kron(&vm, &m_plus));
        out
    }

    #[test]
    fn homogeneous_matrix() {
        let v = build_stoichiometry_homogeneous();
        let d = v.to_dense();
        assert_eq!(d.len(), 5);
        assert_eq!(d[0], vec![0, 1, -1]);
        assert_eq!(d[1], vec![1, -1, 0]);
        let s = LatticeState::well_mixed(3, 1, 1).unwrap();
        let next = apply_event(&s, &v, 1).unwrap();
        assert_eq!(next.cell(0), Cell::new(2, 0, 1));
    }

    #[test]
    fn matches_dense_kronecker_construction() {
        for mc in [1, 2, 3, 5] {
            let v = build_stoichiometry_heterogeneous(mc).unwrap();
            assert_eq!(v.n_rows(), 13 * mc);
            assert_eq!(v.n_cols(), 3 * mc);
            assert_eq!(v.to_dense(), dense_reference(mc), "Mc = {mc}");
        }
    }

    #[test]
    fn single_cell_has_zero_exchange_rows() {
        let v = build_stoichiometry_heterogeneous(1).unwrap();
        for i in 5..13 {
            assert!(v.row(i).is_empty());
        }
    }

    #[test]
    fn zero_cells_rejected() {
        assert!(matches!(build_stoichiometry_heterogeneous(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn infeasible_event_rejected() {
        let v = build_stoichiometry_homogeneous();
        let s = LatticeState::well_mixed(3, 0, 1).unwrap();
        assert!(matches!(apply_event(&s, &v, 3), Err(Error::InfeasibleEvent { row: 3 })));
    }

    #[test]
    fn prey_exchange_moves_one_prey_east() {
        let mc = 2;
        let v = build_stoichiometry_heterogeneous(mc).unwrap();
        let lat = Lattice::Line { cells: mc };
        let s = LatticeState::new(lat, 4, vec![Cell::new(0, 3, 1), Cell::new(0, 1, 3)]).unwrap();
        // family 11 = prey leaves towards the east neighbour, anchored at cell 0
        let next = apply_event(&s, &v, 11 * mc).unwrap();
        assert_eq!(next.cell(0), Cell::new(0, 2, 2));
        assert_eq!(next.cell(1), Cell::new(0, 2, 2));
    }

    #[test]
    fn grid_rows_conserve_and_count() {
        let v = build_stoichiometry(Lattice::Grid { nx: 3, ny: 2 }).unwrap();
        assert_eq!(v.n_rows(), 21 * 6);
        for i in 0..v.n_rows() {
            assert_eq!(v.row_sum(i), 0);
        }
    }
}
