//! Internet map: cities with access bandwidth and inter-city latency edges,
//! read from GraphML.
//!
//! Node attributes: `country` (two-letter code), `bandwidth_up` and
//! `bandwidth_down` (bits/s). Edge attributes: `latency` (microseconds) and
//! `packet_loss` (fraction). Packet loss is forced to zero on load.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct City {
    pub id: String,
    pub country: String,
    pub bandwidth_up: u64,
    pub bandwidth_down: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapEdge {
    pub a: String,
    pub b: String,
    pub latency_us: u64,
    pub packet_loss: f64,
}

#[derive(Clone, Debug, Default)]
pub struct InternetMap {
    /// Where the map came from; recorded in generated configs.
    pub source: String,
    cities: Vec<City>,
    edges: Vec<MapEdge>,
    index: HashMap<String, usize>,
    by_country: BTreeMap<String, Vec<usize>>,
    latency: HashMap<(usize, usize), u64>,
}

impl InternetMap {
    pub fn new(source: impl Into<String>, cities: Vec<City>, edges: Vec<MapEdge>) -> Result<Self> {
        let mut map = InternetMap {
            source: source.into(),
            ..Default::default()
        };
        for city in cities {
            if map.index.contains_key(&city.id) {
                return Err(Error::Schema(format!("map: duplicate city {:?}", city.id)));
            }
            let i = map.cities.len();
            map.index.insert(city.id.clone(), i);
            map.by_country.entry(city.country.clone()).or_default().push(i);
            map.cities.push(city);
        }
        for mut edge in edges {
            let (Some(&a), Some(&b)) = (map.index.get(&edge.a), map.index.get(&edge.b)) else {
                return Err(Error::Schema(format!(
                    "map: edge {}-{} references an unknown city",
                    edge.a, edge.b
                )));
            };
            edge.packet_loss = 0.0;
            map.latency.insert((a.min(b), a.max(b)), edge.latency_us);
            map.edges.push(edge);
        }
        Ok(map)
    }

    pub fn cities(&self) -> &[City] {
        &self.cities
    }

    pub fn edges(&self) -> &[MapEdge] {
        &self.edges
    }

    pub fn city(&self, id: &str) -> Option<&City> {
        self.index.get(id).map(|&i| &self.cities[i])
    }

    pub fn city_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Indices of cities in `country`, empty if none.
    pub fn cities_in(&self, country: &str) -> &[usize] {
        self.by_country.get(country).map_or(&[], Vec::as_slice)
    }

    /// One-way latency between two cities by index, if an edge exists.
    pub fn latency_us(&self, a: usize, b: usize) -> Option<u64> {
        self.latency.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn to_graphml(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        for (id, target, name, ty) in [
            ("d0", "node", "country", "string"),
            ("d1", "node", "bandwidth_up", "long"),
            ("d2", "node", "bandwidth_down", "long"),
            ("d3", "edge", "latency", "long"),
            ("d4", "edge", "packet_loss", "double"),
        ] {
            let _ = writeln!(
                out,
                "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>"
            );
        }
        out.push_str("  <graph edgedefault=\"undirected\">\n");
        for c in &self.cities {
            let _ = writeln!(
                out,
                "    <node id=\"{}\"><data key=\"d0\">{}</data><data key=\"d1\">{}</data><data key=\"d2\">{}</data></node>",
                c.id, c.country, c.bandwidth_up, c.bandwidth_down
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "    <edge source=\"{}\" target=\"{}\"><data key=\"d3\">{}</data><data key=\"d4\">{}</data></edge>",
                e.a, e.b, e.latency_us, e.packet_loss
            );
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

pub fn load_map(path: &Path) -> Result<InternetMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graphml(&text, &path.display().to_string())
}

enum Item {
    Node(String),
    Edge(String, String),
}

fn attr(e: &BytesStart<'_>, name: &str, context: &str) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|err| Error::parse(context, err))?;
        if a.key.as_ref() == name.as_bytes() {
            let v = a.unescape_value().map_err(|err| Error::parse(context, err))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required(e: &BytesStart<'_>, name: &str, context: &str) -> Result<String> {
    attr(e, name, context)?.ok_or_else(|| {
        Error::Schema(format!(
            "{context}: <{}> missing attribute {name}",
            String::from_utf8_lossy(e.name().as_ref())
        ))
    })
}

type Attrs = HashMap<String, String>;

fn finish(
    current: &mut Option<(Item, Attrs)>,
    nodes: &mut Vec<(String, Attrs)>,
    edges: &mut Vec<(String, String, Attrs)>,
) {
    if let Some((item, attrs)) = current.take() {
        match item {
            Item::Node(id) => nodes.push((id, attrs)),
            Item::Edge(a, b) => edges.push((a, b, attrs)),
        }
    }
}

pub fn parse_graphml(text: &str, context: &str) -> Result<InternetMap> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    // key id -> attribute name
    let mut keys: HashMap<String, String> = HashMap::new();
    let mut current: Option<(Item, Attrs)> = None;
    let mut data_key: Option<String> = None;
    let mut nodes: Vec<(String, Attrs)> = Vec::new();
    let mut edges: Vec<(String, String, Attrs)> = Vec::new();
    let mut saw_graphml = false;
    let mut depth = 0usize;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| Error::parse(format!("{context} at byte {}", reader.buffer_position()), e))?;
        let self_closing = matches!(event, Event::Empty(_));
        match &event {
            Event::Start(_) => depth += 1,
            Event::End(_) => depth = depth.saturating_sub(1),
            _ => {}
        }
        match event {
            Event::Start(e) | Event::Empty(e) => {
                match e.name().as_ref() {
                    b"graphml" => saw_graphml = true,
                    b"key" => {
                        let id = required(&e, "id", context)?;
                        let name = required(&e, "attr.name", context)?;
                        keys.insert(id, name);
                    }
                    b"node" => {
                        current = Some((Item::Node(required(&e, "id", context)?), HashMap::new()));
                    }
                    b"edge" => {
                        let s = required(&e, "source", context)?;
                        let t = required(&e, "target", context)?;
                        current = Some((Item::Edge(s, t), HashMap::new()));
                    }
                    b"data" => data_key = Some(required(&e, "key", context)?),
                    _ => {}
                }
                if self_closing && matches!(e.name().as_ref(), b"node" | b"edge") {
                    finish(&mut current, &mut nodes, &mut edges);
                }
            }
            Event::Text(t) => {
                if let (Some(key), Some((_, attrs))) = (&data_key, current.as_mut()) {
                    let name = keys.get(key).cloned().unwrap_or_else(|| key.clone());
                    let value = t.unescape().map_err(|e| Error::parse(context, e))?;
                    attrs.insert(name, value.into_owned());
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"data" => data_key = None,
                b"node" | b"edge" => finish(&mut current, &mut nodes, &mut edges),
                _ => {}
            },
            Event::Eof if depth > 0 => {
                return Err(Error::parse(context, "unexpected end of document"));
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_graphml {
        return Err(Error::Schema(format!("{context}: not a graphml document")));
    }

    let field = |attrs: &HashMap<String, String>, name: &str, what: &str| -> Result<String> {
        attrs
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Schema(format!("{context}: {what} missing attribute {name}")))
    };
    let number = |s: String, name: &str, what: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Schema(format!("{context}: {what} has non-numeric {name} {s:?}")))
    };

    let mut cities = Vec::with_capacity(nodes.len());
    for (id, attrs) in nodes {
        let what = format!("node {id}");
        let country = field(&attrs, "country", &what)?.to_ascii_lowercase();
        let up = number(field(&attrs, "bandwidth_up", &what)?, "bandwidth_up", &what)?;
        let down = number(field(&attrs, "bandwidth_down", &what)?, "bandwidth_down", &what)?;
        if up <= 0.0 || down <= 0.0 {
            return Err(Error::Schema(format!("{context}: {what} has nonpositive bandwidth")));
        }
        cities.push(City {
            id,
            country,
            bandwidth_up: up as u64,
            bandwidth_down: down as u64,
        });
    }
    let mut map_edges = Vec::with_capacity(edges.len());
    for (a, b, attrs) in edges {
        let what = format!("edge {a}-{b}");
        let latency = number(field(&attrs, "latency", &what)?, "latency", &what)?;
        if latency < 0.0 {
            return Err(Error::Schema(format!("{context}: {what} has negative latency")));
        }
        let packet_loss = match attrs.get("packet_loss") {
            Some(v) => number(v.clone(), "packet_loss", &what)?,
            None => 0.0,
        };
        map_edges.push(MapEdge {
            a,
            b,
            latency_us: latency.round() as u64,
            packet_loss,
        });
    }
    InternetMap::new(context, cities, map_edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_CITIES: &str = r#"<?xml version="1.0"?>
<graphml>
  <key id="c" for="node" attr.name="country" attr.type="string"/>
  <key id="u" for="node" attr.name="bandwidth_up" attr.type="long"/>
  <key id="d" for="node" attr.name="bandwidth_down" attr.type="long"/>
  <key id="l" for="edge" attr.name="latency" attr.type="long"/>
  <key id="p" for="edge" attr.name="packet_loss" attr.type="double"/>
  <graph edgedefault="undirected">
    <node id="nyc"><data key="c">US</data><data key="u">1000000000</data><data key="d">1000000000</data></node>
    <node id="ber"><data key="c">de</data><data key="u">500000000</data><data key="d">800000000</data></node>
    <edge source="nyc" target="ber"><data key="l">45000</data><data key="p">0.01</data></edge>
  </graph>
</graphml>"#;

    #[test]
    fn loads_cities_and_edges_with_zero_loss() {
        let map = parse_graphml(TWO_CITIES, "test").unwrap();
        assert_eq!(map.cities().len(), 2);
        assert_eq!(map.edges().len(), 1);
        assert_eq!(map.edges()[0].packet_loss, 0.0);
        assert_eq!(map.city("nyc").unwrap().country, "us");
        assert_eq!(map.latency_us(0, 1), Some(45_000));
        assert_eq!(map.latency_us(1, 0), Some(45_000));
        assert_eq!(map.latency_us(0, 0), None);
    }

    #[test]
    fn missing_bandwidth_is_a_schema_error() {
        let text = TWO_CITIES.replace(r#"<data key="u">500000000</data>"#, "");
        match parse_graphml(&text, "test") {
            Err(Error::Schema(msg)) => assert!(msg.contains("bandwidth_up"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_xml_is_a_parse_error() {
        let text = &TWO_CITIES[..TWO_CITIES.len() - 40];
        assert!(parse_graphml(text, "test").is_err());
        assert!(parse_graphml("<graphml><node id='a'></edge></graphml>", "t").is_err());
    }

    #[test]
    fn graphml_round_trip() {
        let map = parse_graphml(TWO_CITIES, "test").unwrap();
        let again = parse_graphml(&map.to_graphml(), "again").unwrap();
        assert_eq!(again.cities(), map.cities());
        assert_eq!(again.edges(), map.edges());
    }
}
