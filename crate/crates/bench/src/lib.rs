//! Benchmark fixtures shared by the `benches/` targets.

use lhp_core::ModelConfig;

/// The configurations timed by every sampling benchmark: one per λ-class and regime.
pub fn fixtures() -> Vec<(&'static str, ModelConfig)> {
    vec![
        ("d2_geodesic_R6", ModelConfig::new(2, 0.0, 6.0).unwrap()),
        ("d2_horocycle_R6", ModelConfig::new(2, 1.0, 6.0).unwrap()),
        ("d3_equidistant_R4", ModelConfig::new(3, 0.5, 4.0).unwrap()),
        ("d4_geodesic_R3", ModelConfig::new(4, 0.0, 3.0).unwrap()),
    ]
}
