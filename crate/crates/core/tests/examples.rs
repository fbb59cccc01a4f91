mod equilibrium_thresholds {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/equilibrium_thresholds.rs"
    ));
}

#[test]
fn equilibrium_thresholds_runs() {
    equilibrium_thresholds::run_example().expect("equilibrium_thresholds example should run");
}

mod dispersion_relation {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/dispersion_relation.rs"
    ));
}

#[test]
fn dispersion_relation_runs() {
    dispersion_relation::run_example().expect("dispersion_relation example should run");
}

mod bifurcation_map {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/bifurcation_map.rs"
    ));
}

#[test]
fn bifurcation_map_runs() {
    bifurcation_map::run_example().expect("bifurcation_map example should run");
}

mod turing_pattern {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/turing_pattern.rs"
    ));
}

#[test]
fn turing_pattern_runs() {
    turing_pattern::run_example().expect("turing_pattern example should run");
}

mod linear_growth {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/linear_growth.rs"
    ));
}

#[test]
fn linear_growth_runs() {
    linear_growth::run_example().expect("linear_growth example should run");
}

mod turning_operators {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/turning_operators.rs"
    ));
}

#[test]
fn turning_operators_runs() {
    turning_operators::run_example().expect("turning_operators example should run");
}

mod kinetic_limit {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/kinetic_limit.rs"
    ));
}

#[test]
fn kinetic_limit_runs() {
    kinetic_limit::run_example().expect("kinetic_limit example should run");
}

mod homogeneous_ode {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/homogeneous_ode.rs"
    ));
}

#[test]
fn homogeneous_ode_runs() {
    homogeneous_ode::run_example().expect("homogeneous_ode example should run");
}

mod population_oracles {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/population_oracles.rs"
    ));
}

#[test]
fn population_oracles_runs() {
    population_oracles::run_example().expect("population_oracles example should run");
}

mod config_driven_runs {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/config_driven_runs.rs"
    ));
}

#[test]
fn config_driven_runs_runs() {
    config_driven_runs::run_example().expect("config_driven_runs example should run");
}
