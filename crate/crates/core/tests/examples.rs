//! Every example doubles as a test: each one asserts what it prints.

#[allow(dead_code)]
#[path = "../examples/affine_subspaces.rs"]
mod affine_subspaces;

#[allow(dead_code)]
#[path = "../examples/accelerated_symmetric_map.rs"]
mod accelerated_symmetric_map;

#[allow(dead_code)]
#[path = "../examples/averaged_cim.rs"]
mod averaged_cim;

#[allow(dead_code)]
#[path = "../examples/circumcenter_basics.rs"]
mod circumcenter_basics;

#[allow(dead_code)]
#[path = "../examples/crm_vs_map.rs"]
mod crm_vs_map;

#[allow(dead_code)]
#[path = "../examples/douglas_rachford.rs"]
mod douglas_rachford;

#[allow(dead_code)]
#[path = "../examples/experiment_config.rs"]
mod experiment_config;

#[allow(dead_code)]
#[path = "../examples/friedrichs_angles.rs"]
mod friedrichs_angles;

#[allow(dead_code)]
#[path = "../examples/reflector_fixed_points.rs"]
mod reflector_fixed_points;

#[test]
fn example_affine_subspaces() {
    affine_subspaces::run_example().unwrap();
}

#[test]
fn example_accelerated_symmetric_map() {
    accelerated_symmetric_map::run_example().unwrap();
}

#[test]
fn example_averaged_cim() {
    averaged_cim::run_example().unwrap();
}

#[test]
fn example_circumcenter_basics() {
    circumcenter_basics::run_example().unwrap();
}

#[test]
fn example_crm_vs_map() {
    crm_vs_map::run_example().unwrap();
}

#[test]
fn example_douglas_rachford() {
    douglas_rachford::run_example().unwrap();
}

#[test]
fn example_experiment_config() {
    experiment_config::run_example().unwrap();
}

#[test]
fn example_friedrichs_angles() {
    friedrichs_angles::run_example().unwrap();
}

#[test]
fn example_reflector_fixed_points() {
    reflector_fixed_points::run_example().unwrap();
}
