#![allow(dead_code)]

use glam::DVec3;
use rand::Rng;
use voxelforge::genome::{LatticeDims, Phenotype};
use voxelforge::physics::{build_lattice, Body, SimState, Simulator, SpringKind};
use voxelforge::{DevelopmentRule, LatticeConfig, SeededRng};

pub fn solid(dims: LatticeDims, k: f64, gain: f64, phase: f64) -> Phenotype {
    Phenotype::uniform(dims, vec![true; dims.len()], k, gain, phase).unwrap()
}

pub fn lift(state: &mut SimState, dz: f64) {
    for p in &mut state.positions {
        p.z += dz;
    }
}

/// Two legs under a two-layer deck, front and back halves in antiphase.
pub fn gait(dims: LatticeDims) -> Phenotype {
    let n = dims.len();
    let mut present = vec![false; n];
    let mut phase = vec![0.0; n];
    for i in 0..n {
        let [x, _, z] = dims.coords(i);
        present[i] = z + 2 >= dims.nz || x == 0 || x >= 4;
        phase[i] = if 2 * x < dims.nx { 0.0 } else { std::f64::consts::PI };
    }
    Phenotype::new(dims, present, vec![1e7; n], vec![0.0; n], phase).unwrap()
}

pub fn random_phenotype(rng: &mut SeededRng, dims: LatticeDims) -> Phenotype {
    let n = dims.len();
    let stiffness = (0..n).map(|_| 10f64.powf(rng.random_range(4.0..10.0))).collect();
    let gain = (0..n).map(|_| rng.random_range(-10.0..=10.0)).collect();
    let phase = (0..n).map(|_| rng.random_range(-3.14..=3.14)).collect();
    Phenotype::new(dims, vec![true; n], stiffness, gain, phase).unwrap()
}

/// Spring plus gravitational potential, written from the model definition.
pub fn potential(body: &Body, positions: &[DVec3], moduli: &[f64], config: &LatticeConfig) -> f64 {
    let l = config.voxel_edge_length;
    let mut u = 0.0;
    for s in &body.springs {
        let ea = moduli[s.a].min(config.max_dynamic_modulus);
        let eb = moduli[s.b].min(config.max_dynamic_modulus);
        let (ratio, rest) = match s.kind {
            SpringKind::Face => (1.0, l),
            SpringKind::Shear => (config.shear_stiffness_ratio, l * 2f64.sqrt()),
        };
        let k = ratio * 2.0 * ea * eb / (ea + eb) * l;
        let stretch = positions[s.a].distance(positions[s.b]) - rest;
        u += 0.5 * k * stretch * stretch;
    }
    u + positions.iter().map(|p| body.mass * config.gravity * p.z).sum::<f64>()
}

/// Worst relative error, over `configs` random elevated and perturbed
/// bodies, between the simulator's net force and the central-difference
/// gradient of [`potential`].
pub fn worst_force_error(rng: &mut SeededRng, configs: usize) -> f64 {
    let config = LatticeConfig::default();
    let l = config.voxel_edge_length;
    let shapes = [LatticeDims::new(2, 1, 1), LatticeDims::new(2, 2, 1), LatticeDims::cube(2), LatticeDims::new(3, 2, 2)];
    let h = 1e-7;
    let mut worst: f64 = 0.0;
    for trial in 0..configs {
        let dims = shapes[trial % shapes.len()];
        let mut p = random_phenotype(rng, dims);
        for k in &mut p.stiffness {
            *k = 10f64.powf(rng.random_range(4.0..8.0));
        }
        let (body, mut state) = build_lattice(&p, &config).unwrap();
        lift(&mut state, 1.0);
        for pos in &mut state.positions {
            *pos += DVec3::new(
                rng.random_range(-0.2..0.2) * l,
                rng.random_range(-0.2..0.2) * l,
                rng.random_range(-0.2..0.2) * l,
            );
        }
        let moduli = state.stiffness.clone();
        let positions = state.positions.clone();
        let mut sim = Simulator::new(body.clone(), state, config.clone(), DevelopmentRule::None);
        let forces = sim.evaluate_forces().to_vec();

        let mut err_sq = 0.0;
        let mut norm_sq = 0.0;
        for i in 0..positions.len() {
            for axis in 0..3 {
                let mut plus = positions.clone();
                let mut minus = positions.clone();
                plus[i][axis] += h;
                minus[i][axis] -= h;
                let grad = (potential(&body, &plus, &moduli, &config) - potential(&body, &minus, &moduli, &config)) / (2.0 * h);
                let f = forces[i][axis];
                err_sq += (f + grad).powi(2);
                norm_sq += f * f;
            }
        }
        worst = worst.max((err_sq / norm_sq).sqrt());
    }
    worst
}

/// Settled 1 x 1 x n column of 1 MPa voxels.
pub fn settled_column(n: usize) -> (Simulator, LatticeConfig) {
    let config = LatticeConfig::default();
    let column = solid(LatticeDims::new(1, 1, n), 1e6, 0.0, 0.0);
    let mut sim = Simulator::from_phenotype(&column, &config, DevelopmentRule::None).unwrap();
    sim.advance(config.settle_duration).unwrap();
    sim.step().unwrap();
    (sim, config)
}

/// Largest rise of mechanical energy between consecutive 100-step windows of
/// an unactuated random body dropped from a fifth of a voxel, after 0.05 s
/// of contact transients. Non-positive means energy never rose.
pub fn worst_energy_rise(rng: &mut SeededRng, dims: LatticeDims, windows: usize) -> f64 {
    let config = LatticeConfig { actuation_amplitude: 0.0, ..Default::default() };
    let p = random_phenotype(rng, dims);
    let (body, mut state) = build_lattice(&p, &config).unwrap();
    lift(&mut state, 0.2 * config.voxel_edge_length);
    let mut sim = Simulator::new(body, state, config, DevelopmentRule::None);
    sim.advance(0.05).unwrap();
    let mut previous = sim.mechanical_energy();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..windows {
        for _ in 0..100 {
            sim.step().unwrap();
        }
        let energy = sim.mechanical_energy();
        worst = worst.max(energy - previous);
        previous = energy;
    }
    worst
}
