//! Bundled calibration files, compiled into the library so tests and
//! examples work regardless of the working directory.

use crate::params::{params_from_str, Params};

/// Text of the full-horizon (100 period) calibration file.
pub const DICE2016_TEXT: &str = include_str!("../data/dice2016.params");

/// Text of the desk-scale (20 period) calibration file.
pub const DESK_TEXT: &str = include_str!("../data/desk.params");

/// Full-horizon calibration (t_max = 100).
pub fn dice2016() -> Params {
    params_from_str(DICE2016_TEXT).expect("bundled dice2016.params must parse")
}

/// Desk-scale calibration (t_max = 20) for fast oracle tests.
pub fn desk() -> Params {
    params_from_str(DESK_TEXT).expect("bundled desk.params must parse")
}
