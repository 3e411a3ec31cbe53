//! Small constructors shared by unit tests.

use crate::data::Panel;

/// One date, one cell per asset.
pub fn row_panel(values: &[f64]) -> Panel {
    Panel::from_values(1, values.len(), values.to_vec()).unwrap()
}

/// One asset, one cell per date.
pub fn column_panel(values: &[f64]) -> Panel {
    Panel::from_values(values.len(), 1, values.to_vec()).unwrap()
}
