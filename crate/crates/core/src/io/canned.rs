//! Experiment configurations shipped with the library.

use super::config::{parse_config, ExperimentConfig};
use crate::error::{Error, Result};

/// `(name, toml)` for every built-in experiment.
pub const CANNED: &[(&str, &str)] = &[
    ("defect_n1_2", include_str!("../../experiments/defect_n1_2.toml")),
    ("defect_n1_anticone", include_str!("../../experiments/defect_n1_anticone.toml")),
    ("defect_n1_cone", include_str!("../../experiments/defect_n1_cone.toml")),
    ("defect_n2", include_str!("../../experiments/defect_n2.toml")),
    ("defect_n3", include_str!("../../experiments/defect_n3.toml")),
    ("defect_n3_2", include_str!("../../experiments/defect_n3_2.toml")),
    ("defect_n5", include_str!("../../experiments/defect_n5.toml")),
    ("defect_n5_cr02", include_str!("../../experiments/defect_n5_cr02.toml")),
    ("defect_n5_cr100", include_str!("../../experiments/defect_n5_cr100.toml")),
    ("defect_nm1", include_str!("../../experiments/defect_nm1.toml")),
    ("defect_nm5", include_str!("../../experiments/defect_nm5.toml")),
    ("folding_cube", include_str!("../../experiments/folding_cube.toml")),
    ("folding_table_case1", include_str!("../../experiments/folding_table_case1.toml")),
    ("folding_table_case2", include_str!("../../experiments/folding_table_case2.toml")),
    ("lifted_m", include_str!("../../experiments/lifted_m.toml")),
    ("lifted_square", include_str!("../../experiments/lifted_square.toml")),
    ("lifted_square_cr0", include_str!("../../experiments/lifted_square_cr0.toml")),
    ("lifted_square_cr1", include_str!("../../experiments/lifted_square_cr1.toml")),
    ("lifted_square_cuts", include_str!("../../experiments/lifted_square_cuts.toml")),
    ("lifted_square_no_creases_03", include_str!("../../experiments/lifted_square_no_creases_03.toml")),
    ("lifted_square_no_creases_05", include_str!("../../experiments/lifted_square_no_creases_05.toml")),
    ("lifted_square_no_creases_07", include_str!("../../experiments/lifted_square_no_creases_07.toml")),
    ("lifted_square_no_cut", include_str!("../../experiments/lifted_square_no_cut.toml")),
    ("lifted_square_one_cut", include_str!("../../experiments/lifted_square_one_cut.toml")),
];

pub fn canned_names() -> impl Iterator<Item = &'static str> {
    CANNED.iter().map(|(n, _)| *n)
}

pub fn canned_config(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = CANNED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::invalid(format!("no built-in experiment named {name:?}")))?;
    parse_config(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_canned_config_parses_and_is_named_after_its_file() {
        for (name, _) in CANNED {
            let cfg = canned_config(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name, *name);
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(canned_config("nope").is_err());
    }
}
