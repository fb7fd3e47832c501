//! Reader for the OSM XML subset: `<node>`, `<way>`, `<nd>` and `<tag>`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsmWay {
    pub id: i64,
    pub nodes: Vec<i64>,
    pub tags: BTreeMap<String, String>,
}

impl OsmWay {
    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags.get(key).map(String::as_str)
    }

    pub fn is_oneway(&self) -> bool {
        matches!(self.tag("oneway"), Some("yes" | "true" | "1"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OsmDraft {
    /// Node id to (lat, lon) in degrees.
    pub nodes: BTreeMap<i64, (f64, f64)>,
    pub ways: Vec<OsmWay>,
}

pub fn parse_osm_subset(document: &str) -> Result<OsmDraft> {
    let doc = roxmltree::Document::parse(document).map_err(|e| Error::Parse {
        line: e.pos().row as usize,
        message: e.to_string(),
    })?;
    let line_of = |n: roxmltree::Node| doc.text_pos_at(n.range().start).row as usize;

    let mut draft = OsmDraft::default();
    let mut ways = Vec::new();
    for el in doc.descendants().filter(|n| n.is_element()) {
        match el.tag_name().name() {
            "node" => {
                let id = attr_num::<i64>(el, "id", line_of(el))?;
                let lat = attr_num::<f64>(el, "lat", line_of(el))?;
                let lon = attr_num::<f64>(el, "lon", line_of(el))?;
                draft.nodes.insert(id, (lat, lon));
            }
            "way" => {
                let id = attr_num::<i64>(el, "id", line_of(el))?;
                let mut nodes = Vec::new();
                let mut tags = BTreeMap::new();
                for child in el.children().filter(|n| n.is_element()) {
                    match child.tag_name().name() {
                        "nd" => nodes.push(attr_num::<i64>(child, "ref", line_of(child))?),
                        "tag" => {
                            let k = attr_str(child, "k", line_of(child))?;
                            let v = attr_str(child, "v", line_of(child))?;
                            tags.insert(k.to_string(), v.to_string());
                        }
                        _ => {}
                    }
                }
                ways.push((OsmWay { id, nodes, tags }, line_of(el)));
            }
            _ => {}
        }
    }

    for (way, line) in ways {
        if !way.tags.contains_key("highway") {
            continue;
        }
        if let Some(missing) = way.nodes.iter().find(|r| !draft.nodes.contains_key(r)) {
            return Err(Error::Validation(format!(
                "way {} (line {line}) references undeclared node {missing}",
                way.id
            )));
        }
        if way.nodes.len() < 2 {
            return Err(Error::Validation(format!(
                "way {} (line {line}) has fewer than 2 nodes",
                way.id
            )));
        }
        draft.ways.push(way);
    }
    Ok(draft)
}

fn attr_str<'a>(node: roxmltree::Node<'a, '_>, name: &str, line: usize) -> Result<&'a str> {
    node.attribute(name).ok_or_else(|| Error::Parse {
        line,
        message: format!("<{}> is missing attribute `{name}`", node.tag_name().name()),
    })
}

fn attr_num<T: std::str::FromStr>(node: roxmltree::Node, name: &str, line: usize) -> Result<T> {
    let raw = attr_str(node, name, line)?;
    raw.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("attribute `{name}` has invalid value `{raw}`"),
    })
}
