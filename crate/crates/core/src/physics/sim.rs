use std::time::Instant;

use glam::DVec3;
use serde::{Deserialize, Serialize};

use super::{build_lattice, Body, LatticeConfig};
use crate::development::{develop, xi_unchecked, DevelopmentRule};
use crate::error::Result;
use crate::genome::Phenotype;

/// Any voxel faster than this (m/s) is treated as a numerical blow-up.
pub const BLOWUP_SPEED: f64 = 100.0;

/// Dynamic state of a body.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub positions: Vec<DVec3>,
    pub velocities: Vec<DVec3>,
    /// Current Young's modulus of each voxel (Pa).
    pub stiffness: Vec<f64>,
    /// Filtered engineering stress (Pa).
    pub stress: Vec<f64>,
    /// Filtered pressure (Pa).
    pub pressure: Vec<f64>,
    /// Filtered stress at the last development update.
    pub prev_stress: Vec<f64>,
    /// Filtered pressure at the last development update.
    pub prev_pressure: Vec<f64>,
    pub t: f64,
}

impl SimState {
    pub(crate) fn at_rest(positions: Vec<DVec3>, stiffness: Vec<f64>) -> Self {
        let n = positions.len();
        SimState {
            velocities: vec![DVec3::ZERO; n],
            positions,
            stiffness,
            stress: vec![0.0; n],
            pressure: vec![0.0; n],
            prev_stress: vec![0.0; n],
            prev_pressure: vec![0.0; n],
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// All voxels share one mass, so this is the plain mean position.
    pub fn center_of_mass(&self) -> DVec3 {
        let sum = self.positions.iter().fold(DVec3::ZERO, |acc, p| acc + *p);
        sum / self.positions.len() as f64
    }
}

/// The simulation produced a non-finite or runaway state.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("simulation became unstable at t = {time} s")]
pub struct Unstable {
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub com: [f64; 3],
}

/// Per-voxel summary written to the final-state export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalVoxelState {
    pub index: [usize; 3],
    pub k_congenital: f64,
    pub k_final: f64,
    pub peak_stress: f64,
    pub peak_pressure: f64,
}

/// Outcome of [`simulate`].
///
/// Per-voxel vectors follow body order (ascending lattice index).
/// Equality ignores `wall_time`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    /// Horizontal centre-of-mass displacement in voxel lengths; 0 if unstable.
    pub displacement_xy: f64,
    pub trajectory: Vec<TrajectorySample>,
    pub lattice_coords: Vec<[usize; 3]>,
    pub congenital_stiffness: Vec<f64>,
    pub final_stiffness: Vec<f64>,
    pub peak_stress: Vec<f64>,
    pub peak_pressure: Vec<f64>,
    pub unstable: bool,
    pub steps: u64,
    pub wall_time: f64,
}

impl PartialEq for SimResult {
    fn eq(&self, other: &Self) -> bool {
        self.displacement_xy.to_bits() == other.displacement_xy.to_bits()
            && self.trajectory == other.trajectory
            && self.lattice_coords == other.lattice_coords
            && self.congenital_stiffness == other.congenital_stiffness
            && self.final_stiffness == other.final_stiffness
            && self.peak_stress == other.peak_stress
            && self.peak_pressure == other.peak_pressure
            && self.unstable == other.unstable
            && self.steps == other.steps
    }
}

impl SimResult {
    pub fn fitness(&self) -> f64 {
        if self.unstable {
            0.0
        } else {
            self.displacement_xy
        }
    }

    pub fn final_voxels(&self) -> Vec<FinalVoxelState> {
        (0..self.lattice_coords.len())
            .map(|i| FinalVoxelState {
                index: self.lattice_coords[i],
                k_congenital: self.congenital_stiffness[i],
                k_final: self.final_stiffness[i],
                peak_stress: self.peak_stress[i],
                peak_pressure: self.peak_pressure[i],
            })
            .collect()
    }
}

/// Per-spring constants in the layout the force loop reads.
#[derive(Debug, Clone, Copy)]
struct SpringParams {
    a: u32,
    b: u32,
    /// Half the unactuated rest length (m).
    half_rest: f64,
    k: f64,
    c: f64,
}

fn spring_params(body: &Body, moduli: &[f64], config: &LatticeConfig) -> Vec<SpringParams> {
    body.springs
        .iter()
        .map(|s| {
            let k = body.spring_stiffness(s, moduli, config);
            SpringParams {
                a: s.a as u32,
                b: s.b as u32,
                half_rest: 0.5 * s.rest_factor() * config.voxel_edge_length,
                k,
                c: damping(k, body.mass, config),
            }
        })
        .collect()
}

/// Critical damping of two equal masses joined by one spring, scaled by the
/// damping ratio.
#[inline]
fn damping(k: f64, mass: f64, config: &LatticeConfig) -> f64 {
    2.0 * config.damping_ratio * (k * 0.5 * mass).sqrt()
}

/// `amplitude * xi(k)`: the peak fractional length change of a voxel.
#[inline]
fn drive_amplitude(k: f64, config: &LatticeConfig) -> f64 {
    config.actuation_amplitude * xi_unchecked(k, config.k_min, config.k_max)
}

/// Force buffers filled by one evaluation of the force model.
#[derive(Debug, Clone, Default)]
struct Forces {
    total: Vec<DVec3>,
    /// Elastic axial force of every spring, tension positive (N).
    axial: Vec<f64>,
    /// Ground normal force on every voxel (N).
    normal: Vec<f64>,
    /// Sum of absolute face-spring loads per voxel.
    face_load: Vec<f64>,
    /// Sum of compressive face-spring loads per voxel.
    face_compression: Vec<f64>,
}

impl Forces {
    fn new(voxels: usize, springs: usize) -> Self {
        Forces {
            total: vec![DVec3::ZERO; voxels],
            axial: vec![0.0; springs],
            normal: vec![0.0; voxels],
            face_load: vec![0.0; voxels],
            face_compression: vec![0.0; voxels],
        }
    }
}

/// Stable timestep: `safety * 2 / omega_max`, with `omega_max` from the
/// stiffest spring (or the ground contact) acting on the lightest mass.
pub fn stable_dt(body: &Body, state: &SimState, config: &LatticeConfig) -> f64 {
    let k = stiffest(body, &state.stiffness, config);
    dt_for(k, body.mass, config)
}

fn dt_for(k: f64, mass: f64, config: &LatticeConfig) -> f64 {
    config.dt_safety_factor * 2.0 / (k / mass).sqrt()
}

fn stiffest(body: &Body, moduli: &[f64], config: &LatticeConfig) -> f64 {
    body.springs
        .iter()
        .map(|s| body.spring_stiffness(s, moduli, config))
        .fold(config.ground_stiffness, f64::max)
}

/// Raw (unfiltered) stress and pressure of every voxel in the given state,
/// with actuation off.
///
/// Stress is the mean absolute elastic axial load of the incident face
/// springs per unit face area. Pressure counts only compressive face-spring
/// loads and the ground normal force, averaged over the six faces.
pub fn compute_signals(body: &Body, state: &SimState, config: &LatticeConfig) -> (Vec<f64>, Vec<f64>) {
    let params = spring_params(body, &state.stiffness, config);
    let psi = vec![1.0; body.len()];
    let mut forces = Forces::new(body.len(), body.springs.len());
    let dt = stable_dt(body, state, config);
    accumulate_forces(body, state, config, &params, &psi, dt, &mut forces);
    let mut stress = vec![0.0; body.len()];
    let mut pressure = vec![0.0; body.len()];
    raw_signals(body, config, &forces, &mut stress, &mut pressure);
    (stress, pressure)
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

#[inline(always)]
fn spring_force(p: &SpringParams, pos: &[DVec3], vel: &[DVec3], psi: &[f64], total: &mut [DVec3]) -> f64 {
    let (a, b) = (p.a as usize, p.b as usize);
    let d = pos[b] - pos[a];
    let len = d.length();
    let rest = p.half_rest * (psi[a] + psi[b]);
    let elastic = p.k * (len - rest);
    if len > 0.0 {
        let u = d / len;
        let closing = (vel[b] - vel[a]).dot(u);
        let f = u * (elastic + p.c * closing);
        total[a] += f;
        total[b] -= f;
    }
    elastic
}

fn accumulate_forces(
    body: &Body,
    state: &SimState,
    config: &LatticeConfig,
    params: &[SpringParams],
    psi: &[f64],
    dt: f64,
    out: &mut Forces,
) {
    let l = config.voxel_edge_length;
    let m = body.mass;
    let weight = DVec3::new(0.0, 0.0, -m * config.gravity);
    let pos = &state.positions[..];
    let vel = &state.velocities[..];

    out.total.fill(weight);
    out.face_load.fill(0.0);
    out.face_compression.fill(0.0);

    let faces = body.face_spring_count;
    for (s, p) in params[..faces].iter().enumerate() {
        let elastic = spring_force(p, pos, vel, psi, &mut out.total);
        out.axial[s] = elastic;
        let load = elastic.abs();
        let compressive = (-elastic).max(0.0);
        out.face_load[p.a as usize] += load;
        out.face_load[p.b as usize] += load;
        out.face_compression[p.a as usize] += compressive;
        out.face_compression[p.b as usize] += compressive;
    }
    for (s, p) in params.iter().enumerate().skip(faces) {
        out.axial[s] = spring_force(p, pos, vel, psi, &mut out.total);
    }

    let kg = config.ground_stiffness;
    let cg = 2.0 * config.damping_ratio * (kg * m).sqrt();
    let mu = config.friction_coefficient;
    for i in 0..pos.len() {
        let penetration = 0.5 * l * psi[i] - pos[i].z;
        if penetration <= 0.0 {
            out.normal[i] = 0.0;
            continue;
        }
        let normal = (kg * penetration - cg * vel[i].z).max(0.0);
        out.normal[i] = normal;
        out.total[i].z += normal;

        // Coulomb friction with equal static and kinetic coefficients: the
        // friction impulse never exceeds what brings the predicted tangential
        // velocity to rest.
        let f = out.total[i];
        let vt_x = vel[i].x + dt * f.x / m;
        let vt_y = vel[i].y + dt * f.y / m;
        let speed = (vt_x * vt_x + vt_y * vt_y).sqrt();
        if speed > 0.0 {
            let magnitude = (mu * normal).min(m * speed / dt);
            out.total[i].x -= magnitude * vt_x / speed;
            out.total[i].y -= magnitude * vt_y / speed;
        }
    }
}

fn raw_signals(body: &Body, config: &LatticeConfig, forces: &Forces, stress: &mut [f64], pressure: &mut [f64]) {
    let area = config.voxel_edge_length * config.voxel_edge_length;
    let face_area_total = 6.0 * area;
    for i in 0..stress.len() {
        let degree = body.face_degree[i];
        stress[i] = if degree > 0 { forces.face_load[i] / degree as f64 / area } else { 0.0 };
        pressure[i] = (forces.face_compression[i] + forces.normal[i]) / face_area_total;
    }
}

/// Steps a single body through time.
///
/// The simulator starts in the settle phase: no oscillation and no
/// development. Over the first half of `settle_duration` each rest-length
/// multiplier is eased from 1 to its value at actuation time 0, so the drive
/// starts without a jump. [`start_actuation`](Self::start_actuation) switches
/// on the sinusoidal drive and the development rule.
#[derive(Debug, Clone)]
pub struct Simulator {
    body: Body,
    config: LatticeConfig,
    rule: DevelopmentRule,
    state: SimState,
    params: Vec<SpringParams>,
    sin_phase: Vec<f64>,
    cos_phase: Vec<f64>,
    /// `amplitude * xi(k)` of every voxel.
    drive: Vec<f64>,
    psi: Vec<f64>,
    changed: Vec<bool>,
    /// Timestep and signal-filter blend it was computed for.
    blend_cache: (f64, f64),
    forces: Forces,
    raw_stress: Vec<f64>,
    raw_pressure: Vec<f64>,
    peak_stress: Vec<f64>,
    peak_pressure: Vec<f64>,
    dt: f64,
    dt_reference_stiffness: f64,
    actuation_start: Option<f64>,
    next_development: f64,
    trajectory: Vec<TrajectorySample>,
    next_sample: f64,
    steps: u64,
}

impl Simulator {
    pub fn new(body: Body, state: SimState, config: LatticeConfig, rule: DevelopmentRule) -> Self {
        let n = body.len();
        let params = spring_params(&body, &state.stiffness, &config);
        let dt_reference_stiffness = params.iter().map(|p| p.k).fold(config.ground_stiffness, f64::max);
        let dt = dt_for(dt_reference_stiffness, body.mass, &config);
        let forces = Forces::new(n, body.springs.len());
        let drive = state.stiffness.iter().map(|&k| drive_amplitude(k, &config)).collect();
        let mut sim = Simulator {
            params,
            sin_phase: body.phase.iter().map(|p| p.sin()).collect(),
            cos_phase: body.phase.iter().map(|p| p.cos()).collect(),
            drive,
            psi: vec![1.0; n],
            changed: vec![false; n],
            blend_cache: (f64::NAN, 0.0),
            forces,
            raw_stress: vec![0.0; n],
            raw_pressure: vec![0.0; n],
            peak_stress: vec![0.0; n],
            peak_pressure: vec![0.0; n],
            dt,
            dt_reference_stiffness,
            actuation_start: None,
            next_development: 0.0,
            trajectory: Vec::new(),
            next_sample: state.t,
            steps: 0,
            body,
            config,
            rule,
            state,
        };
        sim.record_sample();
        sim
    }

    pub fn from_phenotype(phenotype: &Phenotype, config: &LatticeConfig, rule: DevelopmentRule) -> Result<Self> {
        let (body, state) = build_lattice(phenotype, config)?;
        Ok(Simulator::new(body, state, config.clone(), rule))
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn trajectory(&self) -> &[TrajectorySample] {
        &self.trajectory
    }

    pub fn is_actuating(&self) -> bool {
        self.actuation_start.is_some()
    }

    /// Current spring stiffnesses (N/m), in `body.springs` order.
    pub fn spring_stiffness(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.k).collect()
    }

    /// Rest-length multipliers used by the most recent step.
    pub fn rest_multipliers(&self) -> &[f64] {
        &self.psi
    }

    /// Elastic axial spring forces of the most recent step (tension positive).
    pub fn axial_forces(&self) -> &[f64] {
        &self.forces.axial
    }

    /// Ground normal forces of the most recent step.
    pub fn ground_normal_forces(&self) -> &[f64] {
        &self.forces.normal
    }

    /// Raw stress and pressure of the most recent step.
    pub fn raw_signals(&self) -> (&[f64], &[f64]) {
        (&self.raw_stress, &self.raw_pressure)
    }

    pub fn peak_signals(&self) -> (&[f64], &[f64]) {
        (&self.peak_stress, &self.peak_pressure)
    }

    /// Ends the settle phase. Actuation time is measured from this instant.
    pub fn start_actuation(&mut self) {
        self.actuation_start = Some(self.state.t);
        self.next_development = self.state.t;
    }

    /// Kinetic + elastic + ground-penalty + gravitational potential energy
    /// under the current rest lengths.
    pub fn mechanical_energy(&self) -> f64 {
        let m = self.body.mass;
        let l = self.config.voxel_edge_length;
        let pos = &self.state.positions;
        let kinetic: f64 = self.state.velocities.iter().map(|v| 0.5 * m * v.length_squared()).sum();
        let elastic: f64 = self
            .params
            .iter()
            .map(|p| {
                let (a, b) = (p.a as usize, p.b as usize);
                let rest = p.half_rest * (self.psi[a] + self.psi[b]);
                let stretch = (pos[b] - pos[a]).length() - rest;
                0.5 * p.k * stretch * stretch
            })
            .sum();
        let ground: f64 = pos
            .iter()
            .zip(&self.psi)
            .map(|(p, psi)| {
                let pen = (0.5 * l * psi - p.z).max(0.0);
                0.5 * self.config.ground_stiffness * pen * pen
            })
            .sum();
        let gravity: f64 = pos.iter().map(|p| m * self.config.gravity * p.z).sum();
        kinetic + elastic + ground + gravity
    }

    /// Sets every rest-length multiplier for the current time.
    fn update_rest_lengths(&mut self) {
        let cfg = &self.config;
        match self.actuation_start {
            Some(start) => {
                let ta = self.state.t - start;
                let (s, c) = (std::f64::consts::TAU * cfg.actuation_frequency * ta).sin_cos();
                for i in 0..self.psi.len() {
                    let wave = s * self.cos_phase[i] + c * self.sin_phase[i];
                    self.psi[i] = 1.0 + wave * self.drive[i];
                }
            }
            None => {
                // ease into the pose actuation starts from, so switching the
                // drive on does not step any rest length
                let ramp = cfg.settle_duration * 0.5;
                let w = if ramp > 0.0 { smoothstep(self.state.t / ramp) } else { 1.0 };
                for i in 0..self.psi.len() {
                    self.psi[i] = 1.0 + w * self.sin_phase[i] * self.drive[i];
                }
            }
        }
    }

    /// Evaluates the force model in the current state, without stepping.
    /// Returns the net force on every voxel.
    pub fn evaluate_forces(&mut self) -> &[DVec3] {
        self.update_rest_lengths();
        accumulate_forces(&self.body, &self.state, &self.config, &self.params, &self.psi, self.dt, &mut self.forces);
        &self.forces.total
    }

    /// Advances by one step of the current stable timestep.
    pub fn step(&mut self) -> std::result::Result<(), Unstable> {
        self.step_by(self.dt)
    }

    /// Advances by `h` seconds, which should not exceed [`dt`](Self::dt).
    pub fn step_by(&mut self, h: f64) -> std::result::Result<(), Unstable> {
        // (a) rest lengths from the current stiffness
        self.update_rest_lengths();
        let cfg = &self.config;

        // (b) forces and semi-implicit Euler
        accumulate_forces(&self.body, &self.state, cfg, &self.params, &self.psi, h, &mut self.forces);
        let inv_m = 1.0 / self.body.mass;
        let max_speed_sq = BLOWUP_SPEED * BLOWUP_SPEED;
        let mut finite = true;
        for i in 0..self.state.positions.len() {
            let v = self.state.velocities[i] + self.forces.total[i] * (h * inv_m);
            self.state.velocities[i] = v;
            self.state.positions[i] += v * h;
            let speed_sq = v.length_squared();
            finite &= speed_sq <= max_speed_sq && self.state.positions[i].is_finite();
        }
        if !finite {
            return Err(Unstable { time: self.state.t });
        }

        // (c) interoceptive signals, exponentially smoothed
        raw_signals(&self.body, cfg, &self.forces, &mut self.raw_stress, &mut self.raw_pressure);
        if self.blend_cache.0 != h {
            let tau = cfg.signal_filter_time_constant;
            let blend = if tau > 0.0 { 1.0 - (-h / tau).exp() } else { 1.0 };
            self.blend_cache = (h, blend);
        }
        let blend = self.blend_cache.1;
        for i in 0..self.raw_stress.len() {
            self.state.stress[i] += blend * (self.raw_stress[i] - self.state.stress[i]);
            self.state.pressure[i] += blend * (self.raw_pressure[i] - self.state.pressure[i]);
        }

        // (d) development
        match self.actuation_start {
            None => {
                self.state.prev_stress.copy_from_slice(&self.state.stress);
                self.state.prev_pressure.copy_from_slice(&self.state.pressure);
            }
            Some(_) => {
                for i in 0..self.state.stress.len() {
                    self.peak_stress[i] = self.peak_stress[i].max(self.state.stress[i]);
                    self.peak_pressure[i] = self.peak_pressure[i].max(self.state.pressure[i]);
                }
                if self.rule != DevelopmentRule::None && self.state.t + h >= self.next_development {
                    self.develop();
                    self.next_development += self.config.development_interval;
                }
            }
        }

        // (e) clock
        self.state.t += h;
        self.steps += 1;
        if self.state.t >= self.next_sample {
            self.record_sample();
        }
        Ok(())
    }

    fn develop(&mut self) {
        let cfg = &self.config;
        let st = &mut self.state;
        let (signal, prev) = match self.rule {
            DevelopmentRule::None => return,
            DevelopmentRule::Stress => (&st.stress, &mut st.prev_stress),
            DevelopmentRule::Pressure => (&st.pressure, &mut st.prev_pressure),
        };
        let cap = cfg.max_dynamic_modulus;
        let mut any_changed = false;
        for i in 0..signal.len() {
            let delta = signal[i] - prev[i];
            let old = st.stiffness[i];
            let new = develop(old, self.body.gain[i], delta, self.rule, cfg.k_min, cfg.k_max);
            prev[i] = signal[i];
            if new != old {
                st.stiffness[i] = new;
                self.drive[i] = drive_amplitude(new, cfg);
            }
            // springs only see moduli up to the cap
            self.changed[i] = new.min(cap) != old.min(cap);
            any_changed |= self.changed[i];
        }
        // keep the inactive signal's reference current as well
        match self.rule {
            DevelopmentRule::Stress => st.prev_pressure.copy_from_slice(&st.pressure),
            DevelopmentRule::Pressure => st.prev_stress.copy_from_slice(&st.stress),
            DevelopmentRule::None => {}
        }
        if !any_changed {
            return;
        }

        let mut stiffest = cfg.ground_stiffness;
        for (p, spring) in self.params.iter_mut().zip(&self.body.springs) {
            if self.changed[spring.a] || self.changed[spring.b] {
                p.k = self.body.spring_stiffness(spring, &st.stiffness, cfg);
                p.c = damping(p.k, self.body.mass, cfg);
            }
            stiffest = stiffest.max(p.k);
        }
        let reference = self.dt_reference_stiffness;
        if stiffest > 2.0 * reference || stiffest < 0.5 * reference {
            self.dt = dt_for(stiffest, self.body.mass, cfg);
            self.dt_reference_stiffness = stiffest;
        }
    }

    fn record_sample(&mut self) {
        let com = self.state.center_of_mass();
        self.trajectory.push(TrajectorySample { t: self.state.t, com: com.to_array() });
        self.next_sample += self.config.trajectory_interval;
    }

    /// Advances by `duration` seconds; the last step is shortened so the
    /// clock lands on the end time.
    pub fn advance(&mut self, duration: f64) -> std::result::Result<(), Unstable> {
        let end = self.state.t + duration;
        loop {
            let remaining = end - self.state.t;
            if remaining <= 1e-12 * end.abs().max(1.0) {
                break;
            }
            self.step_by(self.dt.min(remaining))?;
        }
        Ok(())
    }

    /// Builds a [`SimResult`] from the current state.
    fn finish(&self, displacement_xy: f64, unstable: bool, started: Instant) -> SimResult {
        let mut trajectory = self.trajectory.clone();
        let com = self.state.center_of_mass().to_array();
        if trajectory.last().is_none_or(|s| s.t != self.state.t) && com.iter().all(|c| c.is_finite()) {
            trajectory.push(TrajectorySample { t: self.state.t, com });
        }
        SimResult {
            displacement_xy,
            trajectory,
            lattice_coords: self.body.lattice_coords.clone(),
            congenital_stiffness: self.body.k_congenital.clone(),
            final_stiffness: self.state.stiffness.clone(),
            peak_stress: self.peak_stress.clone(),
            peak_pressure: self.peak_pressure.clone(),
            unstable,
            steps: self.steps,
            wall_time: started.elapsed().as_secs_f64(),
        }
    }
}

/// Settles the body under gravity, records the starting centre of mass, then
/// actuates (with development) for `sim_cycles` periods.
///
/// Fitness is the horizontal centre-of-mass displacement in voxel lengths.
/// A numerical blow-up is not an error: the result is flagged `unstable`
/// and scores 0.
pub fn simulate(phenotype: &Phenotype, config: &LatticeConfig, rule: DevelopmentRule) -> Result<SimResult> {
    let started = Instant::now();
    let mut sim = Simulator::from_phenotype(phenotype, config, rule)?;
    let run = |sim: &mut Simulator| -> std::result::Result<f64, Unstable> {
        sim.advance(config.settle_duration)?;
        let start = sim.state().center_of_mass();
        sim.start_actuation();
        sim.advance(config.actuation_duration())?;
        let end = sim.state().center_of_mass();
        let dx = end.x - start.x;
        let dy = end.y - start.y;
        Ok((dx * dx + dy * dy).sqrt() / config.voxel_edge_length)
    };
    Ok(match run(&mut sim) {
        Ok(d) => sim.finish(d, false, started),
        Err(err) => {
            log::debug!("{err}");
            sim.finish(0.0, true, started)
        }
    })
}
