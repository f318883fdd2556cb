//! CGLMP Bell tests on Talbot-encoded photon pairs: the matrix route, the
//! full field simulation and dimension scans.

pub mod analytic;
pub mod cglmp;
pub mod field;
pub mod scan;

pub use analytic::{bell_analytic, joint_prob_analytic, joint_prob_gate};
pub use cglmp::{cglmp_I, no_signaling_violation, BellResult, Convention, JointTable, MeasurementSettings, TABLE_TOL};
pub use field::{bell_field, ideal_biphoton, joint_prob_field, FieldRouteConfig, FieldTable};
pub use scan::{
    bell_for_model, bell_scan, best_dimension, write_scan_csv, FieldGeometry, Route, ScanModel, ScanRow, ScanSpec,
    SCAN_CSV_HEADER,
};
