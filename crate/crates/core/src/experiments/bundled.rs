//! Device models and benchmark circuits shipped with the crate.

use super::Benchmark;
use crate::device::DeviceModel;

/// 7-qubit T-shaped device with one strongly coupled CX pair.
pub const CASABLANCA_LIKE: &str = include_str!("../../data/devices/casablanca_like.json");
/// 9-qubit device for the injection experiment.
pub const INJECT9: &str = include_str!("../../data/devices/inject9.json");

pub const BUNDLED_DEVICES: [(&str, &str); 2] = [("casablanca-like", CASABLANCA_LIKE), ("inject9", INJECT9)];

const SUITE: [(&str, &str); 4] = [
    ("bell2", include_str!("../../data/benchmarks/bell2.qasm")),
    ("cswap", include_str!("../../data/benchmarks/cswap.qasm")),
    ("swap_0_6", include_str!("../../data/benchmarks/swap_0_6.qasm")),
    ("swap_1_4", include_str!("../../data/benchmarks/swap_1_4.qasm")),
];

/// Bundled device by name.
pub fn bundled_device(name: &str) -> Option<DeviceModel> {
    BUNDLED_DEVICES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| DeviceModel::from_json(json).expect("bundled devices are valid"))
}

/// The comparison suite for the casablanca-like device, sorted by name.
pub fn bundled_suite() -> Vec<Benchmark> {
    SUITE
        .iter()
        .map(|(name, text)| Benchmark::from_qasm(*name, text).expect("bundled benchmarks parse"))
        .collect()
}
