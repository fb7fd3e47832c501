//! Multi-source map construction: OSM subset parsing, draft lane network,
//! inclinometer/GPS fusion for vertical geometry, and DBSCAN junction
//! inference.

mod dbscan;
mod draft;
mod junctions;
mod osm;
mod sensor;
mod topology;

pub use dbscan::{dbscan, ClusterLabeling, Label};
pub use draft::{build_draft_network, DraftDefaults};
pub use junctions::{infer_junctions, DEFAULT_JUNCTION_EPS, DEFAULT_JUNCTION_MIN_PTS, MAX_TURN};
pub use osm::{parse_osm_subset, OsmDraft, OsmWay};
pub use sensor::{fuse_sensor_profile, moving_average, FusionConfig, SensorProfile, SensorRecord, SENSOR_CSV_HEADER};
pub use topology::{validate_topology, ValidationReport};
