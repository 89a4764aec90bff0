use proptest::prelude::*;
use rand::SeedableRng;
use voxelforge::analysis::ReportRow;
use voxelforge::config::RunConfig;
use voxelforge::evolution::GenerationRecord;
use voxelforge::persist;
use voxelforge::physics::{FinalVoxelState, TrajectorySample};
use voxelforge::{DevelopmentRule, Genome, GenomeId, SeededRng};

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL
}

fn record() -> impl Strategy<Value = GenerationRecord> {
    (0usize..10_000, finite(), finite(), finite(), any::<u32>(), any::<u64>()).prop_map(
        |(generation, best_fitness, mean_fitness, median_fitness, best_age, id)| GenerationRecord {
            generation,
            best_fitness,
            mean_fitness,
            median_fitness,
            best_age,
            best_id: GenomeId(id),
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_round_trips(records in prop::collection::vec(record(), 0..30)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(persist::LOG_FILE);
        persist::write_log(&path, &records).unwrap();
        prop_assert_eq!(persist::read_log(&path).unwrap(), records);
    }

    #[test]
    fn report_round_trips(rows in prop::collection::vec((".{0,12}", "[a-z_]{1,12}", finite()), 0..30)) {
        let rows: Vec<ReportRow> = rows.into_iter().map(|(id, metric, v)| ReportRow::new(id, metric, v)).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(persist::REPORT_FILE);
        persist::write_report(&path, &rows).unwrap();
        prop_assert_eq!(persist::read_report(&path).unwrap(), rows);
    }

    #[test]
    fn trajectory_keeps_six_significant_digits(samples in prop::collection::vec(prop::array::uniform4(-1e3f64..1e3), 1..30)) {
        let samples: Vec<TrajectorySample> =
            samples.into_iter().map(|[t, x, y, z]| TrajectorySample { t: t.abs(), com: [x, y, z] }).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(persist::TRAJECTORY_FILE);
        persist::write_trajectory(&path, &samples).unwrap();
        let back = persist::read_trajectory(&path).unwrap();
        prop_assert_eq!(back.len(), samples.len());
        for (a, b) in samples.iter().zip(&back) {
            for (u, v) in [a.t, a.com[0], a.com[1], a.com[2]].into_iter().zip([b.t, b.com[0], b.com[1], b.com[2]]) {
                prop_assert!((u - v).abs() <= 5e-6 * u.abs(), "{} vs {}", u, v);
                prop_assert_eq!(persist::six_significant(u), persist::six_significant(v));
            }
        }
    }

    #[test]
    fn genomes_round_trip_bit_exactly(seed in any::<u64>(), mutations in 0u64..15) {
        let mut rng = SeededRng::seed_from_u64(seed);
        let mut genome = Genome::random(&mut rng, GenomeId(0));
        for i in 0..mutations {
            genome = genome.mutate(&mut rng, GenomeId(i + 1));
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(persist::champion_file_name(3, genome.id));
        persist::write_genome(&path, &genome).unwrap();
        let back = persist::read_genome(&path).unwrap();
        prop_assert_eq!(back.to_json(), genome.to_json());
        prop_assert_eq!(back, genome);
    }

    #[test]
    fn final_state_round_trips(voxels in prop::collection::vec((prop::array::uniform3(0usize..10), 4.0f64..10.0, 4.0f64..10.0, finite(), finite()), 1..20)) {
        let state = persist::FinalState {
            displacement_xy: 1.25,
            unstable: false,
            voxels: voxels
                .into_iter()
                .map(|(index, a, b, s, p)| FinalVoxelState {
                    index,
                    k_congenital: 10f64.powf(a),
                    k_final: 10f64.powf(b),
                    peak_stress: s.abs(),
                    peak_pressure: p.abs(),
                })
                .collect(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(persist::FINAL_STATE_FILE);
        state.write(&path).unwrap();
        prop_assert_eq!(persist::FinalState::read(&path).unwrap(), state);
    }
}

#[test]
fn config_round_trips_through_json() {
    let mut config = RunConfig::default();
    config.development_rule = DevelopmentRule::Pressure;
    config.lattice_dims = [4, 5, 6];
    config.friction_coefficient = 0.3;
    assert_eq!(RunConfig::from_json(&config.to_json()).unwrap(), config);
}

#[test]
fn runs_are_found_recursively_in_sorted_order() {
    let dir = tempfile::tempdir().unwrap();
    for rel in ["b/run", "a", "a/nested/deeper"] {
        let d = dir.path().join(rel);
        std::fs::create_dir_all(&d).unwrap();
        std::fs::write(d.join(persist::MANIFEST_FILE), "{}").unwrap();
    }
    std::fs::create_dir_all(dir.path().join("empty")).unwrap();
    let found = persist::find_runs(dir.path()).unwrap();
    let rel: Vec<_> = found.iter().map(|p| p.strip_prefix(dir.path()).unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(rel, ["a", "a/nested/deeper", "b/run"]);
}
