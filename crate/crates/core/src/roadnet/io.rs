use std::path::Path;

use super::RoadNetwork;
use crate::error::{Error, Result};

impl RoadNetwork {
    /// Parses and validates a road network document.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let net: RoadNetwork = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::json(format!("road network at `{path}`"), e.into_inner())
        })?;
        net.validate()?;
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("road network serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{GeoOrigin, Lane};

    #[test]
    fn sample_records_are_nine_field_arrays() {
        let lane = Lane::from_polyline("a", 3.5, &[[0.0, 0.0], [1.0, 0.0]], 0.9, 1.0).unwrap();
        let net = RoadNetwork::new(GeoOrigin { lat: 1.0, lon: 2.0 }, vec![lane], vec![], vec![]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&net.to_json()).unwrap();
        let s = &v["lanes"][0]["samples"][1];
        assert_eq!(s.as_array().unwrap().len(), 9);
        assert_eq!(s[0], 1.0);
        assert_eq!(s[8], 0.9);
        for key in ["origin", "lanes", "junctions", "obstacles"] {
            assert!(v.get(key).is_some());
        }
    }

    #[test]
    fn invalid_documents_are_rejected() {
        let bad = r#"{"origin":{"lat":0,"lon":0},"lanes":[{"id":"a","width":3.5,"samples":[[0,0,0,0,0,0,0,0,1]]}]}"#;
        assert!(RoadNetwork::from_json(bad).is_err());
        let unknown = r#"{"origin":{"lat":0,"lon":0},"lanes":[],"extra":1}"#;
        let err = RoadNetwork::from_json(unknown).unwrap_err().to_string();
        assert!(err.contains("extra"), "{err}");
    }
}
