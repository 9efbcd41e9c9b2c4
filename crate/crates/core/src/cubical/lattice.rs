use crate::malliavin::Configuration;
use crate::{Error, Result};

pub const MAX_DIMENSION: usize = 6;
/// Upper bound on `n^d`, the number of top cells.
pub const MAX_TOP_CELLS: usize = 1 << 26;

/// Which cells of the lattice a configuration switches on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CubicalModel {
    /// Each top cube is kept with its closure.
    Voxel,
    /// All cells below the top dimension are present; top cubes are kept
    /// independently.
    Plaquette,
}

impl std::str::FromStr for CubicalModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "voxel" => Ok(Self::Voxel),
            "plaquette" => Ok(Self::Plaquette),
            other => Err(Error::Validation(format!("unknown cubical model {other:?}"))),
        }
    }
}

/// Open cell `z + (0,1)^S`: base point `z` (packed) and direction set `S`
/// as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub base: usize,
    pub dirs: u8,
}

impl CellId {
    pub fn dim(&self) -> usize {
        self.dirs.count_ones() as usize
    }
}

/// The `d`-dimensional `n`-periodic cubical lattice. Top cell `k` is the
/// cube with packed base point `k = Σ z_i n^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalLattice {
    d: usize,
    n: usize,
    cells: usize,
    /// Faces of the top cube at the origin: direction set, base offset in
    /// `{0,1}^d`, and the offsets in `{−1,0,1}^d` of the other top cubes
    /// containing that face.
    faces: Vec<Face>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Face {
    pub dirs: u8,
    pub offset: [i8; MAX_DIMENSION],
    pub others: Vec<[i8; MAX_DIMENSION]>,
}

impl CubicalLattice {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()));
        }
        if n < 3 {
            return Err(Error::Validation(format!("side length must be at least 3, got {n}")));
        }
        if d > MAX_DIMENSION {
            return Err(Error::Capacity(format!("dimension {d} exceeds {MAX_DIMENSION}")));
        }
        let cells = (n as u64).checked_pow(d as u32).filter(|&c| c <= MAX_TOP_CELLS as u64);
        let Some(cells) = cells else {
            return Err(Error::Capacity(format!(
                "n^d = {n}^{d} top cells exceed {MAX_TOP_CELLS}; use a smaller n"
            )));
        };
        let full = (1u8 << d) - 1;
        let mut faces = Vec::new();
        for dirs in 0..=full {
            let comp = full & !dirs;
            for eps in subsets(comp) {
                let mut offset = [0i8; MAX_DIMENSION];
                for (i, o) in offset.iter_mut().enumerate().take(d) {
                    *o = (eps >> i & 1) as i8;
                }
                let mut others = Vec::new();
                for back in subsets(comp) {
                    let mut off = offset;
                    for (i, o) in off.iter_mut().enumerate().take(d) {
                        *o -= (back >> i & 1) as i8;
                    }
                    if off.iter().any(|&x| x != 0) {
                        others.push(off);
                    }
                }
                faces.push(Face {
                    dirs,
                    offset,
                    others,
                });
            }
        }
        Ok(Self {
            d,
            n,
            cells: cells as usize,
            faces,
        })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.n
    }

    /// `n^d`, the number of top cells and of coordinates.
    pub fn top_cells(&self) -> usize {
        self.cells
    }

    /// `N_δ = C(d, δ) n^d`.
    pub fn cell_count(&self, delta: usize) -> usize {
        crate::util::binomial_u64(self.d as u64, delta as u64) as usize * self.cells
    }

    pub fn coords(&self, z: usize) -> [usize; MAX_DIMENSION] {
        let mut c = [0; MAX_DIMENSION];
        let mut z = z;
        for x in c.iter_mut().take(self.d) {
            *x = z % self.n;
            z /= self.n;
        }
        c
    }

    pub fn pack(&self, c: &[usize]) -> usize {
        c.iter().take(self.d).rev().fold(0, |acc, &x| acc * self.n + x % self.n)
    }

    /// `z + offset` with wrap-around.
    pub fn shift(&self, z: usize, offset: &[i8]) -> usize {
        let n = self.n as i64;
        let mut c = self.coords(z);
        for (x, &o) in c.iter_mut().zip(offset).take(self.d) {
            *x = (*x as i64 + o as i64).rem_euclid(n) as usize;
        }
        self.pack(&c)
    }

    /// Every open cell exactly once: `2^d n^d` ids.
    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        let full = (1u8 << self.d) - 1;
        (0..=full).flat_map(move |dirs| (0..self.cells).map(move |base| CellId { base, dirs }))
    }

    /// The `2^{d−dim}` top cubes whose closure contains `cell`.
    pub fn incident_top_cells(&self, cell: CellId) -> Vec<usize> {
        let full = (1u8 << self.d) - 1;
        subsets(full & !cell.dirs)
            .map(|back| {
                let mut off = [0i8; MAX_DIMENSION];
                for (i, o) in off.iter_mut().enumerate().take(self.d) {
                    *o = -((back >> i & 1) as i8);
                }
                self.shift(cell.base, &off)
            })
            .collect()
    }

    pub(crate) fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Top cubes sharing at least one face with `k`, other than `k`.
    pub fn neighbours(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = neighbour_offsets(self.d)
            .iter()
            .map(|off| self.shift(k, off))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn check_sample(&self, kept: &Configuration) -> Result<()> {
        if kept.len() != self.cells {
            return Err(Error::Validation(format!(
                "sample has {} bits, lattice has {} top cells",
                kept.len(),
                self.cells
            )));
        }
        Ok(())
    }
}

/// The `3^d − 1` offsets in `{−1, 0, 1}^d ∖ {0}`.
pub(crate) fn neighbour_offsets(d: usize) -> Vec<[i8; MAX_DIMENSION]> {
    let total = 3usize.pow(d as u32);
    (0..total)
        .filter(|&t| t != (total - 1) / 2)
        .map(|mut t| {
            let mut off = [0i8; MAX_DIMENSION];
            for o in off.iter_mut().take(d) {
                *o = (t % 3) as i8 - 1;
                t /= 3;
            }
            off
        })
        .collect()
}

fn subsets(mask: u8) -> impl Iterator<Item = u8> {
    // Enumerate submasks in increasing order.
    (0..=mask).filter(move |s| s & !mask == 0)
}

/// Whether `cell` belongs to the complex defined by the kept top cells.
pub fn cell_present(lattice: &CubicalLattice, kept: &Configuration, cell: CellId, model: CubicalModel) -> bool {
    match model {
        CubicalModel::Voxel => lattice
            .incident_top_cells(cell)
            .iter()
            .any(|&k| kept.is_plus(k)),
        CubicalModel::Plaquette => cell.dim() < lattice.dimension() || kept.is_plus(cell.base),
    }
}

/// Present cells per dimension.
pub fn cell_census(lattice: &CubicalLattice, kept: &Configuration, model: CubicalModel) -> Result<Vec<u64>> {
    lattice.check_sample(kept)?;
    let mut counts = vec![0u64; lattice.dimension() + 1];
    for cell in lattice.cells() {
        if cell_present(lattice, kept, cell, model) {
            counts[cell.dim()] += 1;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        assert!(CubicalLattice::new(2, 2).is_err());
        assert!(CubicalLattice::new(7, 3).unwrap_err().is_capacity());
        let l = CubicalLattice::new(3, 4).unwrap();
        assert_eq!(l.top_cells(), 64);
        assert_eq!(l.cells().count(), 8 * 64);
        assert_eq!(l.faces().len(), 27);
        assert_eq!(l.neighbours(0).len(), 26);
        for z in 0..64 {
            assert_eq!(l.pack(&l.coords(z)), z);
        }
    }

    #[test]
    fn incidence() {
        let l = CubicalLattice::new(2, 4).unwrap();
        assert_eq!(l.incident_top_cells(CellId { base: 5, dirs: 3 }), vec![5]);
        let mut v = l.incident_top_cells(CellId { base: 0, dirs: 0 });
        v.sort_unstable();
        assert_eq!(v, vec![0, 3, 12, 15]);
        let l1 = CubicalLattice::new(1, 3).unwrap();
        let mut v = l1.incident_top_cells(CellId { base: 0, dirs: 0 });
        v.sort_unstable();
        assert_eq!(v, vec![0, 2]);
        for cell in l.cells() {
            let mut tops = l.incident_top_cells(cell);
            tops.sort_unstable();
            tops.dedup();
            assert_eq!(tops.len(), 1 << (2 - cell.dim()));
        }
    }

    #[test]
    fn presence() {
        let l = CubicalLattice::new(2, 4).unwrap();
        let empty = Configuration::all_minus(16);
        assert_eq!(cell_census(&l, &empty, CubicalModel::Voxel).unwrap(), vec![0, 0, 0]);
        assert_eq!(cell_census(&l, &empty, CubicalModel::Plaquette).unwrap(), vec![16, 32, 0]);
        let one = empty.with(6, true);
        assert_eq!(cell_census(&l, &one, CubicalModel::Voxel).unwrap(), vec![4, 4, 1]);
        let full = Configuration::all_plus(16);
        assert_eq!(cell_census(&l, &full, CubicalModel::Voxel).unwrap(), vec![16, 32, 16]);
    }
}
