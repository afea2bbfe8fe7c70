#![allow(dead_code)]

use nrpos_core::integrals::IntegralTable;
use nrpos_core::model::{table_for_config, Instance};
use nrpos_core::scenario::ScenarioConfig;

pub fn small_config(anchors: usize, users: usize, numerologies: u32, comb: usize) -> ScenarioConfig {
    let mut c =
        ScenarioConfig { anchors, users, numerology_count: numerologies, comb_size: comb, ..Default::default() };
    c.irs.elements_h = 2;
    c.irs.elements_v = 2;
    c
}

pub fn setup(config: &ScenarioConfig, seeds: impl IntoIterator<Item = u64>) -> (IntegralTable, Vec<Instance>) {
    let table = table_for_config(config).unwrap();
    let inst = seeds.into_iter().map(|s| Instance::generate(config, s, &table.numerologies).unwrap()).collect();
    (table, inst)
}
