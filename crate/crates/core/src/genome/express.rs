use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Channel, Genome};
use crate::error::{Error, Result};

/// Lower end of the congenital stiffness range (Pa).
pub const STIFFNESS_MIN: f64 = 1e4;
/// Upper end of the congenital stiffness range (Pa).
pub const STIFFNESS_MAX: f64 = 1e10;
/// Development gains lie in `[-GAIN_LIMIT, GAIN_LIMIT]`.
pub const GAIN_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl LatticeDims {
    pub const fn new(nx: usize, ny: usize, nz: usize) -> Self {
        LatticeDims { nx, ny, nz }
    }

    pub const fn cube(n: usize) -> Self {
        LatticeDims { nx: n, ny: n, nz: n }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index; ordering of indices is lexicographic in `(x, y, z)`.
    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.ny + y) * self.nz + z
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let z = index % self.nz;
        let rest = index / self.nz;
        [rest / self.ny, rest % self.ny, z]
    }

    /// Indices of the face neighbours of `index` that lie inside the lattice.
    pub fn face_neighbors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let [x, y, z] = self.coords(index);
        let dims = [self.nx, self.ny, self.nz];
        let c = [x, y, z];
        (0..3).flat_map(move |axis| {
            [-1isize, 1].into_iter().filter_map(move |d| {
                let mut p = c;
                let v = p[axis] as isize + d;
                if v < 0 || v as usize >= dims[axis] {
                    return None;
                }
                p[axis] = v as usize;
                Some(self.index(p[0], p[1], p[2]))
            })
        })
    }
}

impl std::fmt::Display for LatticeDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Lattice index scaled to `[-1, 1]`; a single-cell axis maps to 0.
pub fn lattice_coordinate(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        2.0 * i as f64 / (n - 1) as f64 - 1.0
    }
}

/// Log-linear stiffness map: output -1 gives 1e4 Pa, +1 gives 1e10 Pa.
pub fn map_stiffness(o: f64) -> f64 {
    10f64.powf(4.0 + 3.0 * (o + 1.0))
}

pub fn map_gain(o: f64) -> f64 {
    GAIN_LIMIT * o
}

pub fn map_phase(o: f64) -> f64 {
    PI * o
}

/// Expressed body: a dense lattice with a presence mask and per-voxel
/// material fields.
///
/// Field values are defined at every lattice point, but only present voxels
/// are meaningful.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phenotype {
    pub dims: LatticeDims,
    pub present: Vec<bool>,
    /// Congenital Young's modulus (Pa).
    pub stiffness: Vec<f64>,
    /// Development gain.
    pub gain: Vec<f64>,
    /// Actuation phase offset (radians).
    pub phase: Vec<f64>,
}

impl Phenotype {
    /// Builds and validates a phenotype: at least one voxel, a single
    /// face-connected component and all fields inside their ranges.
    pub fn new(
        dims: LatticeDims,
        present: Vec<bool>,
        stiffness: Vec<f64>,
        gain: Vec<f64>,
        phase: Vec<f64>,
    ) -> Result<Self> {
        let n = dims.len();
        if [present.len(), stiffness.len(), gain.len(), phase.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::InvalidInput(format!(
                "phenotype fields must all have {n} entries for a {dims} lattice"
            )));
        }
        let p = Phenotype { dims, present, stiffness, gain, phase };
        p.validate()?;
        Ok(p)
    }

    /// Uniform material everywhere.
    pub fn uniform(
        dims: LatticeDims,
        present: Vec<bool>,
        stiffness: f64,
        gain: f64,
        phase: f64,
    ) -> Result<Self> {
        let n = dims.len();
        Phenotype::new(dims, present, vec![stiffness; n], vec![gain; n], vec![phase; n])
    }

    pub fn validate(&self) -> Result<()> {
        let comps = components(self.dims, &self.present);
        match comps.len() {
            0 => return Err(Error::EmptyGeometry),
            1 => {}
            c => return Err(Error::DisconnectedGeometry { components: c }),
        }
        for i in self.voxels() {
            let k = self.stiffness[i];
            if !(STIFFNESS_MIN..=STIFFNESS_MAX).contains(&k) {
                return Err(Error::StiffnessOutOfRange {
                    k,
                    k_min: STIFFNESS_MIN,
                    k_max: STIFFNESS_MAX,
                });
            }
            if !(-GAIN_LIMIT..=GAIN_LIMIT).contains(&self.gain[i]) {
                return Err(Error::InvalidInput(format!(
                    "gain {} at voxel {i} outside [-10, 10]",
                    self.gain[i]
                )));
            }
            if !(-PI..=PI).contains(&self.phase[i]) {
                return Err(Error::InvalidInput(format!(
                    "phase {} at voxel {i} outside [-pi, pi]",
                    self.phase[i]
                )));
            }
        }
        Ok(())
    }

    /// Indices of present voxels in ascending order.
    pub fn voxels(&self) -> impl Iterator<Item = usize> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| p.then_some(i))
    }

    pub fn voxel_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    /// Lattice coordinates of the present voxels, in index order.
    pub fn voxel_coords(&self) -> Vec<[usize; 3]> {
        self.voxels().map(|i| self.dims.coords(i)).collect()
    }
}

/// Face-connected components of a presence mask.
///
/// Components are returned in order of their lowest voxel index, each as a
/// sorted list of indices.
pub fn components(dims: LatticeDims, present: &[bool]) -> Vec<Vec<usize>> {
    let mut label = vec![false; present.len()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..present.len() {
        if !present[start] || label[start] {
            continue;
        }
        let mut comp = Vec::new();
        label[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            comp.push(i);
            for j in dims.face_neighbors(i) {
                if present[j] && !label[j] {
                    label[j] = true;
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Queries all four networks at every lattice point.
///
/// A voxel is present where the geometry network outputs a positive value;
/// only the largest face-connected component survives (ties go to the
/// component holding the lowest index).
pub fn express(genome: &Genome, dims: LatticeDims) -> Result<Phenotype> {
    if dims.is_empty() {
        return Err(Error::InvalidInput("lattice has a zero dimension".into()));
    }
    let n = dims.len();
    let mut raw_present = vec![false; n];
    let mut stiffness = vec![0.0; n];
    let mut gain = vec![0.0; n];
    let mut phase = vec![0.0; n];
    let mut scratch = Vec::new();

    for x in 0..dims.nx {
        let sx = lattice_coordinate(x, dims.nx);
        for y in 0..dims.ny {
            let sy = lattice_coordinate(y, dims.ny);
            for z in 0..dims.nz {
                let sz = lattice_coordinate(z, dims.nz);
                let r = (sx * sx + sy * sy + sz * sz).sqrt();
                let i = dims.index(x, y, z);
                let mut query = |ch: Channel| {
                    genome.network(ch).evaluate_with(&mut scratch, sx, sy, sz, r)
                };
                raw_present[i] = query(Channel::Geometry) > 0.0;
                stiffness[i] = map_stiffness(query(Channel::Stiffness));
                gain[i] = map_gain(query(Channel::Gain));
                phase[i] = map_phase(query(Channel::Phase));
            }
        }
    }

    let comps = components(dims, &raw_present);
    let mut best: Option<&Vec<usize>> = None;
    for c in &comps {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    let best = best.ok_or(Error::EmptyGeometry)?;
    let mut present = vec![false; n];
    for &i in best {
        present[i] = true;
    }
    Ok(Phenotype { dims, present, stiffness, gain, phase })
}
