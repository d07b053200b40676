//! Fixtures shared by the benches.

use tevp_core::charfn::CharacteristicContext;
use tevp_core::{liouville_transform, nsbf, LiouvilleData, NamedIndex, RefractiveIndexModel};

pub fn data(id: NamedIndex) -> (RefractiveIndexModel, LiouvilleData) {
    let m = RefractiveIndexModel::named(id);
    let d = liouville_transform(&m, tevp_core::liouville::DEFAULT_GRID_SIZE).expect("transform");
    (m, d)
}

pub fn context(id: NamedIndex, strip: f64) -> CharacteristicContext {
    let (m, d) = data(id);
    let (_, _, t) = nsbf::select_truncation(&d, nsbf::MAX_TRUNCATION).expect("table");
    CharacteristicContext::from_table(t, m.n_at_1(), m.dn_at_1())
        .expect("context")
        .with_strip_bound(strip)
}
