//! JSON has no infinities or NaN; serde_json writes them as `null`. These
//! read `null` back as NaN so stored reports stay parseable.

use serde::{Deserialize, Deserializer};

pub(crate) fn nullable<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::NAN))
}

pub(crate) fn nullable_vec<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
    Ok(Vec::<Option<f64>>::deserialize(de)?.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
}
