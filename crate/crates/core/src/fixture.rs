//! Bundled combustion-engine case base: one target with an imprecise
//! temperature and an uncertain pressure reading, and three solved cases.

use crate::case_model::CaseBase;
use crate::codec::decode_case_base;

pub const DOCUMENT: &str = include_str!("../fixtures/engine_case_base.json");

pub fn case_base() -> CaseBase {
    decode_case_base(DOCUMENT).expect("bundled case base is valid")
}
