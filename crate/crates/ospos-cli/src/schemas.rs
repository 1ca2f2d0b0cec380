//! The JSON schemas shipped with the binary: input object shapes shared by
//! all subcommands and one report schema per subcommand. `--schema` prints
//! the whole bundle keyed by name.

use serde_json::Value;

pub const MATRIX: &str = include_str!("../schemas/matrix.json");
pub const TOLERANCES: &str = include_str!("../schemas/tolerances.json");
pub const SUBSPACE: &str = include_str!("../schemas/subspace.json");
pub const REFLECTION: &str = include_str!("../schemas/reflection.json");
pub const TRIPLE: &str = include_str!("../schemas/triple.json");
pub const ERROR: &str = include_str!("../schemas/error.json");
pub const REPORT_GEOMETRY: &str = include_str!("../schemas/report-geometry.json");
pub const REPORT_RENORM: &str = include_str!("../schemas/report-renorm.json");
pub const REPORT_MARKOV: &str = include_str!("../schemas/report-markov.json");
pub const REPORT_TWOBLOCK: &str = include_str!("../schemas/report-twoblock.json");
pub const REPORT_COVARIANCE: &str = include_str!("../schemas/report-covariance.json");
pub const REPORT_HS: &str = include_str!("../schemas/report-hs.json");

pub const ALL: [(&str, &str); 12] = [
    ("matrix", MATRIX),
    ("tolerances", TOLERANCES),
    ("subspace", SUBSPACE),
    ("reflection", REFLECTION),
    ("triple", TRIPLE),
    ("error", ERROR),
    ("report-geometry", REPORT_GEOMETRY),
    ("report-renorm", REPORT_RENORM),
    ("report-markov", REPORT_MARKOV),
    ("report-twoblock", REPORT_TWOBLOCK),
    ("report-covariance", REPORT_COVARIANCE),
    ("report-hs", REPORT_HS),
];

/// All schemas as one JSON object keyed by schema name.
pub fn bundle() -> Value {
    let mut map = serde_json::Map::new();
    for (name, text) in ALL {
        let parsed: Value = serde_json::from_str(text)
            .unwrap_or_else(|e| panic!("schema {name} does not parse: {e}"));
        map.insert(name.to_string(), parsed);
    }
    Value::Object(map)
}
