use privplan::experiment::sample_query;
use privplan::scene::load_scene_file;
use privplan::{
    build_roadmap, builtin_scenario, load_roadmap, privacy_violated, save_roadmap, scene_to_json, BuiltinScenario,
    Error, RoadmapParams,
};

#[test]
fn bundled_scenarios_admit_valid_configurations() {
    for which in BuiltinScenario::ALL {
        let b = builtin_scenario(which);
        let (start, goal) = sample_query(&b.scene, &b.query_sampler, b.defaults.resolution, 1).unwrap();
        assert_eq!(start.dim(), b.scene.robot.dof());
        assert_ne!(start, goal);
    }
}

#[test]
fn bundled_scenarios_contain_both_kinds_of_configuration() {
    for which in BuiltinScenario::ALL {
        let b = builtin_scenario(which);
        let (mut seen_violating, mut seen_clean) = (false, false);
        for seed in 0..200 {
            let (q, _) = sample_query(&b.scene, &b.query_sampler, 0.05, seed).unwrap();
            if privacy_violated(&b.scene, &q).unwrap() {
                seen_violating = true;
            } else {
                seen_clean = true;
            }
        }
        assert!(seen_violating && seen_clean, "{}", which.name());
    }
}

#[test]
fn roadmaps_build_deterministically() {
    let b = builtin_scenario(BuiltinScenario::Manip3);
    let params = RoadmapParams {
        samples: 150,
        ..RoadmapParams::new(150, b.defaults.conn_radius, 5)
    };
    let first = build_roadmap(&b.scene, &params).unwrap();
    let second = build_roadmap(&b.scene, &params).unwrap();
    assert_eq!(first, second);
    assert!(!first.edges().is_empty());
    for e in first.edges() {
        assert!(e.i < e.j);
        assert!(e.violating_length <= e.base_length);
    }
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    for which in BuiltinScenario::ALL {
        let b = builtin_scenario(which);
        let scene_path = dir.path().join(format!("{}.json", which.name()));
        std::fs::write(&scene_path, scene_to_json(&b.scene)).unwrap();
        assert_eq!(load_scene_file(&scene_path).unwrap().scene, b.scene);

        let roadmap = build_roadmap(&b.scene, &RoadmapParams::new(60, b.defaults.conn_radius, 9)).unwrap();
        let rm_path = dir.path().join(format!("{}.roadmap", which.name()));
        save_roadmap(&roadmap, &rm_path).unwrap();
        assert_eq!(load_roadmap(&rm_path).unwrap(), roadmap);
    }
}

#[test]
fn truncated_roadmap_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let b = builtin_scenario(BuiltinScenario::Nav9);
    let roadmap = build_roadmap(&b.scene, &RoadmapParams::new(40, 2.0, 1)).unwrap();
    let path = dir.path().join("r.roadmap");
    save_roadmap(&roadmap, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 7]).unwrap();
    assert!(matches!(load_roadmap(&path), Err(Error::Checksum)));
}

#[test]
fn missing_files_are_io_errors() {
    let err = load_scene_file("/nonexistent/scene.json").unwrap_err();
    assert!(err.is_io());
    assert!(load_roadmap("/nonexistent/r.roadmap").unwrap_err().is_io());
}
