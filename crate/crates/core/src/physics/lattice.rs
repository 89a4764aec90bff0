use glam::DVec3;

use super::{LatticeConfig, SimState};
use crate::error::{Error, Result};
use crate::genome::{components, LatticeDims, Phenotype};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpringKind {
    /// Joins face-adjacent voxels; rest length one edge.
    Face,
    /// Joins edge-adjacent voxels; rest length `sqrt(2)` edges.
    Shear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spring {
    /// Body-local voxel indices, `a < b`.
    pub a: usize,
    pub b: usize,
    pub kind: SpringKind,
}

impl Spring {
    /// Rest length in voxel edges before actuation.
    pub fn rest_factor(&self) -> f64 {
        match self.kind {
            SpringKind::Face => 1.0,
            SpringKind::Shear => std::f64::consts::SQRT_2,
        }
    }
}

/// Immutable description of a robot body: which voxels exist, how they are
/// wired and their genetically specified material fields.
///
/// Body-local voxel `i` corresponds to lattice index `lattice_index[i]`;
/// body order follows ascending lattice index.
#[derive(Debug, Clone)]
pub struct Body {
    pub dims: LatticeDims,
    pub lattice_index: Vec<usize>,
    pub lattice_coords: Vec<[usize; 3]>,
    /// Mass of every voxel (kg).
    pub mass: f64,
    /// Face springs first, then shear springs.
    pub springs: Vec<Spring>,
    pub face_spring_count: usize,
    /// Number of face springs incident on each voxel.
    pub face_degree: Vec<u32>,
    pub k_congenital: Vec<f64>,
    pub gain: Vec<f64>,
    pub phase: Vec<f64>,
}

impl Body {
    pub fn len(&self) -> usize {
        self.lattice_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice_index.is_empty()
    }

    /// Spring stiffness (N/m) for the given per-voxel moduli:
    /// `ratio * 2 Ea Eb / (Ea + Eb) * L`, moduli capped at
    /// `max_dynamic_modulus`.
    #[inline]
    pub fn spring_stiffness(&self, spring: &Spring, moduli: &[f64], config: &LatticeConfig) -> f64 {
        let ea = moduli[spring.a].min(config.max_dynamic_modulus);
        let eb = moduli[spring.b].min(config.max_dynamic_modulus);
        let series = 2.0 * ea * eb / (ea + eb) * config.voxel_edge_length;
        match spring.kind {
            SpringKind::Face => series,
            SpringKind::Shear => config.shear_stiffness_ratio * series,
        }
    }
}

/// Builds the spring network for a phenotype and its initial state: masses at
/// rest on the ground, horizontally centred on the lattice centre, stiffness
/// at its congenital value.
pub fn build_lattice(phenotype: &Phenotype, config: &LatticeConfig) -> Result<(Body, SimState)> {
    config.validate()?;
    let dims = phenotype.dims;
    if phenotype.present.len() != dims.len() {
        return Err(Error::InvalidInput("presence mask does not match lattice dims".into()));
    }
    let comps = components(dims, &phenotype.present);
    match comps.len() {
        0 => return Err(Error::EmptyGeometry),
        1 => {}
        n => return Err(Error::DisconnectedGeometry { components: n }),
    }

    let lattice_index = phenotype.voxels().collect::<Vec<_>>();
    let lattice_coords: Vec<[usize; 3]> = lattice_index.iter().map(|&i| dims.coords(i)).collect();
    let mut local = vec![usize::MAX; dims.len()];
    for (body_i, &lat_i) in lattice_index.iter().enumerate() {
        local[lat_i] = body_i;
    }
    let lookup = |c: [isize; 3]| -> Option<usize> {
        if c.iter().any(|&v| v < 0) {
            return None;
        }
        let (x, y, z) = (c[0] as usize, c[1] as usize, c[2] as usize);
        if x >= dims.nx || y >= dims.ny || z >= dims.nz {
            return None;
        }
        let l = local[dims.index(x, y, z)];
        (l != usize::MAX).then_some(l)
    };

    const FACE: [[isize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    const SHEAR: [[isize; 3]; 6] = [
        [1, 1, 0],
        [1, -1, 0],
        [1, 0, 1],
        [1, 0, -1],
        [0, 1, 1],
        [0, 1, -1],
    ];
    let mut springs = Vec::new();
    let mut face_degree = vec![0u32; lattice_index.len()];
    for (a, c) in lattice_coords.iter().enumerate() {
        let c = [c[0] as isize, c[1] as isize, c[2] as isize];
        for off in FACE {
            if let Some(b) = lookup([c[0] + off[0], c[1] + off[1], c[2] + off[2]]) {
                springs.push(Spring { a: a.min(b), b: a.max(b), kind: SpringKind::Face });
                face_degree[a] += 1;
                face_degree[b] += 1;
            }
        }
        if config.shear_stiffness_ratio > 0.0 {
            for off in SHEAR {
                if let Some(b) = lookup([c[0] + off[0], c[1] + off[1], c[2] + off[2]]) {
                    springs.push(Spring { a: a.min(b), b: a.max(b), kind: SpringKind::Shear });
                }
            }
        }
    }

    springs.sort_by_key(|s| s.kind);
    let face_spring_count = springs.iter().filter(|s| s.kind == SpringKind::Face).count();

    let pick = |field: &[f64]| lattice_index.iter().map(|&i| field[i]).collect::<Vec<_>>();
    let k_congenital: Vec<f64> = pick(&phenotype.stiffness)
        .into_iter()
        .map(|k| k.clamp(config.k_min, config.k_max))
        .collect();
    let body = Body {
        dims,
        mass: config.voxel_mass(),
        springs,
        face_spring_count,
        face_degree,
        k_congenital: k_congenital.clone(),
        gain: pick(&phenotype.gain),
        phase: pick(&phenotype.phase),
        lattice_coords,
        lattice_index,
    };

    let l = config.voxel_edge_length;
    let cx = (dims.nx as f64 - 1.0) / 2.0;
    let cy = (dims.ny as f64 - 1.0) / 2.0;
    let z_min = body.lattice_coords.iter().map(|c| c[2]).min().expect("non-empty");
    let positions = body
        .lattice_coords
        .iter()
        .map(|c| {
            DVec3::new(
                (c[0] as f64 - cx) * l,
                (c[1] as f64 - cy) * l,
                (c[2] - z_min) as f64 * l + 0.5 * l,
            )
        })
        .collect();
    let state = SimState::at_rest(positions, k_congenital);
    Ok((body, state))
}
