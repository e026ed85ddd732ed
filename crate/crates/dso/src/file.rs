//! JSON scenario documents.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use dso_core::casestudy::{self, MILEAGE_TO_CAPACITY};
use dso_core::model::{
    validate_scenario, Aggregator, AggregatorKind, Branch, Bus, DdgagConfig, DemandBlock, DragConfig, EsagConfig,
    EvcsConfig, Horizon, Network, OfferPrices, RegulationSignal, Scenario, ValidationReport, WholesalePrices,
};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("unsupported format version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("offers given for unknown aggregator `{0}`")]
    OrphanOffers(String),
    #[error("no offers for aggregator `{0}`")]
    MissingOffers(String),
    #[error("scenario is invalid:\n{0}")]
    Validation(ValidationReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonFile {
    pub steps: Vec<u32>,
    pub step_hours: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<Vec<f64>>,
    pub cap_up: Vec<f64>,
    pub cap_dn: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mil_up: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mil_dn: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalFile {
    pub mu_up: Vec<f64>,
    pub mu_dn: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_up: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_dn: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusFile {
    pub id: u32,
    pub p_load: Vec<f64>,
    pub q_load: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchFile {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    pub r: f64,
    pub x: f64,
    pub pl_max: f64,
    pub ql_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub substation: u32,
    pub s_base: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub v_substation: f64,
    pub buses: Vec<BusFile>,
    pub branches: Vec<BranchFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub p_max: f64,
    pub price: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum AggregatorFile {
    Drag { id: String, bus: u32, blocks: Vec<BlockFile>, cap_up_max: f64, cap_dn_max: f64, tan_phi: f64 },
    Esag { id: String, bus: u32, eta_ch: f64, eta_di: f64, e_min: f64, e_max: f64, e_init: f64, dr_max: f64, cr_max: f64 },
    Evcs { id: String, bus: u32, availability: Vec<u32>, er_max: f64, err_max: f64, cl_max: f64, e_init: f64, gamma_ch: f64 },
    Ddgag { id: String, bus: u32, p_min: f64, p_max: f64, ru: f64, rd: f64, tan_phi: f64 },
}

impl AggregatorFile {
    fn id(&self) -> &str {
        match self {
            AggregatorFile::Drag { id, .. }
            | AggregatorFile::Esag { id, .. }
            | AggregatorFile::Evcs { id, .. }
            | AggregatorFile::Ddgag { id, .. } => id,
        }
    }
}

/// On-disk form of a [`Scenario`]. Offers are keyed by aggregator id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default)]
    pub assumptions: Vec<String>,
    pub horizon: HorizonFile,
    pub wholesale: PriceFile,
    pub regulation_signal: SignalFile,
    pub network: NetworkFile,
    pub aggregators: Vec<AggregatorFile>,
    pub offers: BTreeMap<String, PriceFile>,
}

/// A scenario together with the assumptions that went into it, including
/// defaults filled in while loading.
#[derive(Clone, Debug, PartialEq)]
pub struct Loaded {
    pub scenario: Scenario,
    pub assumptions: Vec<String>,
}

fn mileage_default(cap: &[f64]) -> Vec<f64> {
    cap.iter().map(|c| c * MILEAGE_TO_CAPACITY).collect()
}

fn prices(p: &PriceFile, what: &str, notes: &mut Vec<String>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut mil = |given: &Option<Vec<f64>>, cap: &[f64], field: &str| match given {
        Some(v) => v.clone(),
        None => {
            notes.push(format!("{what}.{field} not given; set to capacity price / 20"));
            mileage_default(cap)
        }
    };
    let up = mil(&p.mil_up, &p.cap_up, "mil_up");
    let dn = mil(&p.mil_dn, &p.cap_dn, "mil_dn");
    (p.energy.clone().unwrap_or_default(), up, dn)
}

impl ScenarioFile {
    /// Convert to the model, filling absent optional fields. Each default
    /// applied is appended to the returned assumptions.
    pub fn into_loaded(self) -> Result<Loaded, LoadError> {
        if self.version != FORMAT_VERSION {
            return Err(LoadError::Version(self.version));
        }
        let mut notes = self.assumptions.clone();
        let t = self.horizon.steps.len();

        let (energy, mil_up, mil_dn) = prices(&self.wholesale, "wholesale", &mut notes);
        let wholesale = WholesalePrices {
            energy,
            cap_up: self.wholesale.cap_up.clone(),
            cap_dn: self.wholesale.cap_dn.clone(),
            mil_up,
            mil_dn,
        };

        let sig = &self.regulation_signal;
        let mut ratio = |v: &Option<Vec<f64>>, field: &str| match v {
            Some(v) => v.clone(),
            None => {
                notes.push(format!("regulation_signal.{field} not given; set to 1"));
                vec![1.0; t]
            }
        };
        let s_up = ratio(&sig.s_up, "s_up");
        let s_dn = ratio(&sig.s_dn, "s_dn");
        let regulation = RegulationSignal { mu_up: sig.mu_up.clone(), mu_dn: sig.mu_dn.clone(), s_up, s_dn };

        let net = &self.network;
        let network = Network {
            buses: net.buses.iter().map(|b| Bus { id: b.id, p_load: b.p_load.clone(), q_load: b.q_load.clone() }).collect(),
            branches: net
                .branches
                .iter()
                .map(|b| Branch { id: b.id, from: b.from, to: b.to, r: b.r, x: b.x, pl_max: b.pl_max, ql_max: b.ql_max })
                .collect(),
            substation: net.substation,
            v_min: net.v_min,
            v_max: net.v_max,
            v_substation: net.v_substation,
            s_base: net.s_base,
        };

        if let Some(id) = self.offers.keys().find(|id| !self.aggregators.iter().any(|a| a.id() == id.as_str())) {
            return Err(LoadError::OrphanOffers(id.clone()));
        }
        let mut aggregators = Vec::with_capacity(self.aggregators.len());
        for a in &self.aggregators {
            let o = self.offers.get(a.id()).ok_or_else(|| LoadError::MissingOffers(a.id().into()))?;
            let (energy, mil_up, mil_dn) = prices(o, &format!("offers.{}", a.id()), &mut notes);
            let offers = OfferPrices { energy, cap_up: o.cap_up.clone(), cap_dn: o.cap_dn.clone(), mil_up, mil_dn };
            let (id, bus, kind) = match a.clone() {
                AggregatorFile::Drag { id, bus, blocks, cap_up_max, cap_dn_max, tan_phi } => {
                    let blocks = blocks.into_iter().map(|b| DemandBlock { p_max: b.p_max, price: b.price }).collect();
                    (id, bus, AggregatorKind::Drag(DragConfig { blocks, cap_up_max, cap_dn_max, tan_phi }))
                }
                AggregatorFile::Esag { id, bus, eta_ch, eta_di, e_min, e_max, e_init, dr_max, cr_max } => {
                    (id, bus, AggregatorKind::Esag(EsagConfig { eta_ch, eta_di, e_min, e_max, e_init, dr_max, cr_max }))
                }
                AggregatorFile::Evcs { id, bus, availability, er_max, err_max, cl_max, e_init, gamma_ch } => (
                    id,
                    bus,
                    AggregatorKind::Evcs(EvcsConfig { availability, er_max, err_max, cl_max, e_init, gamma_ch }),
                ),
                AggregatorFile::Ddgag { id, bus, p_min, p_max, ru, rd, tan_phi } => {
                    (id, bus, AggregatorKind::Ddgag(DdgagConfig { p_min, p_max, ru, rd, tan_phi }))
                }
            };
            aggregators.push(Aggregator { id, bus, offers, kind });
        }

        let scenario = Scenario {
            horizon: Horizon { steps: self.horizon.steps, step_hours: self.horizon.step_hours },
            wholesale,
            regulation,
            network,
            aggregators,
        };
        Ok(Loaded { scenario, assumptions: notes })
    }

    /// Document for `s`. Every optional field is written out.
    pub fn from_scenario(s: &Scenario, assumptions: &[String]) -> Self {
        let w = &s.wholesale;
        let price = |energy: &[f64], cap_up: &[f64], cap_dn: &[f64], mil_up: &[f64], mil_dn: &[f64], has_energy: bool| PriceFile {
            energy: has_energy.then(|| energy.to_vec()),
            cap_up: cap_up.to_vec(),
            cap_dn: cap_dn.to_vec(),
            mil_up: Some(mil_up.to_vec()),
            mil_dn: Some(mil_dn.to_vec()),
        };
        let net = &s.network;
        ScenarioFile {
            version: FORMAT_VERSION,
            assumptions: assumptions.to_vec(),
            horizon: HorizonFile { steps: s.horizon.steps.clone(), step_hours: s.horizon.step_hours },
            wholesale: price(&w.energy, &w.cap_up, &w.cap_dn, &w.mil_up, &w.mil_dn, true),
            regulation_signal: SignalFile {
                mu_up: s.regulation.mu_up.clone(),
                mu_dn: s.regulation.mu_dn.clone(),
                s_up: Some(s.regulation.s_up.clone()),
                s_dn: Some(s.regulation.s_dn.clone()),
            },
            network: NetworkFile {
                substation: net.substation,
                s_base: net.s_base,
                v_min: net.v_min,
                v_max: net.v_max,
                v_substation: net.v_substation,
                buses: net.buses.iter().map(|b| BusFile { id: b.id, p_load: b.p_load.clone(), q_load: b.q_load.clone() }).collect(),
                branches: net
                    .branches
                    .iter()
                    .map(|b| BranchFile { id: b.id, from: b.from, to: b.to, r: b.r, x: b.x, pl_max: b.pl_max, ql_max: b.ql_max })
                    .collect(),
            },
            aggregators: s
                .aggregators
                .iter()
                .map(|a| {
                    let (id, bus) = (a.id.clone(), a.bus);
                    match &a.kind {
                        AggregatorKind::Drag(d) => AggregatorFile::Drag {
                            id,
                            bus,
                            blocks: d.blocks.iter().map(|b| BlockFile { p_max: b.p_max, price: b.price.clone() }).collect(),
                            cap_up_max: d.cap_up_max,
                            cap_dn_max: d.cap_dn_max,
                            tan_phi: d.tan_phi,
                        },
                        AggregatorKind::Esag(e) => AggregatorFile::Esag {
                            id,
                            bus,
                            eta_ch: e.eta_ch,
                            eta_di: e.eta_di,
                            e_min: e.e_min,
                            e_max: e.e_max,
                            e_init: e.e_init,
                            dr_max: e.dr_max,
                            cr_max: e.cr_max,
                        },
                        AggregatorKind::Evcs(e) => AggregatorFile::Evcs {
                            id,
                            bus,
                            availability: e.availability.clone(),
                            er_max: e.er_max,
                            err_max: e.err_max,
                            cl_max: e.cl_max,
                            e_init: e.e_init,
                            gamma_ch: e.gamma_ch,
                        },
                        AggregatorKind::Ddgag(d) => AggregatorFile::Ddgag {
                            id,
                            bus,
                            p_min: d.p_min,
                            p_max: d.p_max,
                            ru: d.ru,
                            rd: d.rd,
                            tan_phi: d.tan_phi,
                        },
                    }
                })
                .collect(),
            offers: s
                .aggregators
                .iter()
                .map(|a| {
                    let o = &a.offers;
                    let has_energy = !matches!(a.kind, AggregatorKind::Drag(_));
                    (a.id.clone(), price(&o.energy, &o.cap_up, &o.cap_dn, &o.mil_up, &o.mil_dn, has_energy))
                })
                .collect(),
        }
    }
}

/// Parse and convert a document without validating the scenario.
pub fn parse_scenario(text: &str) -> Result<Loaded, LoadError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            serde_json::error::Category::Data => LoadError::Schema { line, column, message },
            _ => LoadError::Parse { line, column, message },
        }
    })?;
    file.into_loaded()
}

/// Parse, convert and validate.
pub fn scenario_from_str(text: &str) -> Result<Loaded, LoadError> {
    let loaded = parse_scenario(text)?;
    let report = validate_scenario(&loaded.scenario);
    if !report.is_empty() {
        return Err(LoadError::Validation(report));
    }
    Ok(loaded)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Loaded, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    scenario_from_str(&text)
}

/// Pretty JSON with a trailing newline.
pub fn scenario_to_string(s: &Scenario, assumptions: &[String]) -> String {
    let mut out = serde_json::to_string_pretty(&ScenarioFile::from_scenario(s, assumptions)).expect("scenario serializes");
    out.push('\n');
    out
}

pub fn save_scenario(path: impl AsRef<Path>, s: &Scenario, assumptions: &[String]) -> std::io::Result<()> {
    fs::write(path, scenario_to_string(s, assumptions))
}

/// The built-in case study with its assumptions.
pub fn bundled() -> Loaded {
    Loaded {
        scenario: casestudy::bundled_case_study(),
        assumptions: casestudy::ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled_text() -> String {
        let b = bundled();
        scenario_to_string(&b.scenario, &b.assumptions)
    }

    #[test]
    fn round_trip_is_exact() {
        let b = bundled();
        let back = scenario_from_str(&bundled_text()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn mileage_defaults_are_recorded() {
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        let offers = doc["offers"]["esag-1"].as_object_mut().unwrap();
        offers.remove("mil_up");
        offers.remove("mil_dn");
        let loaded = scenario_from_str(&doc.to_string()).unwrap();
        let esag = loaded.scenario.aggregator("esag-1").unwrap();
        assert_eq!(esag.offers.mil_up[6], 25.0 / 20.0);
        assert_eq!(loaded.scenario, bundled().scenario);
        assert!(loaded.assumptions.iter().any(|a| a.contains("offers.esag-1.mil_up")));
        assert!(loaded.assumptions.iter().any(|a| a.contains("offers.esag-1.mil_dn")));
    }

    #[test]
    fn truncated_file_reports_location() {
        let text = bundled_text();
        let cut = &text[..text.len() / 2];
        match scenario_from_str(cut) {
            Err(LoadError::Parse { line, column, .. }) => assert!(line > 1 && column >= 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_field_is_schema_error() {
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        doc["network"]["colour"] = "blue".into();
        assert!(matches!(scenario_from_str(&doc.to_string()), Err(LoadError::Schema { .. })));
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        doc["aggregators"][1]["capacity"] = 3.into();
        assert!(matches!(scenario_from_str(&doc.to_string()), Err(LoadError::Schema { .. })));
    }

    #[test]
    fn wrong_type_is_schema_error() {
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        doc["horizon"]["steps"] = "all day".into();
        assert!(matches!(scenario_from_str(&doc.to_string()), Err(LoadError::Schema { .. })));
    }

    #[test]
    fn version_checked() {
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        doc["version"] = 7.into();
        assert!(matches!(scenario_from_str(&doc.to_string()), Err(LoadError::Version(7))));
    }

    #[test]
    fn offers_must_match_aggregators() {
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        let o = doc["offers"]["esag-1"].clone();
        doc["offers"]["ghost"] = o;
        assert!(matches!(scenario_from_str(&doc.to_string()), Err(LoadError::OrphanOffers(id)) if id == "ghost"));
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        doc["offers"].as_object_mut().unwrap().remove("evcs-1");
        assert!(matches!(scenario_from_str(&doc.to_string()), Err(LoadError::MissingOffers(id)) if id == "evcs-1"));
    }

    #[test]
    fn invalid_scenario_is_validation_error() {
        let mut doc: serde_json::Value = serde_json::from_str(&bundled_text()).unwrap();
        doc["wholesale"]["energy"].as_array_mut().unwrap().pop();
        match scenario_from_str(&doc.to_string()) {
            Err(LoadError::Validation(r)) => assert!(r.has(dso_core::model::ViolationCode::SeriesLength)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_scenario("/nonexistent/x.json"), Err(LoadError::Io { .. })));
    }
}
