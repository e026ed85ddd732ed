//! Scenario data: horizon, prices, regulation signal, distribution network
//! and the four aggregator families.
//!
//! Power is in MW (MVAr for reactive), energy in MWh, prices in $/MWh for
//! energy and $/MW per hour for regulation capacity and mileage. Voltages,
//! impedances and regulation scores are per unit.

mod units;
mod validate;

use alloc::string::String;
use alloc::vec::Vec;
use sha2::{Digest, Sha256};

pub use units::{from_per_unit, per_unit_view, scale_power, UnitsError};
pub use validate::{is_acyclic_and_connected, is_radial_by_count, validate_scenario, ValidationReport, Violation, ViolationCode};

#[derive(Clone, Debug, PartialEq)]
pub struct Horizon {
    /// Hour labels, contiguous and increasing (e.g. 1..=24).
    pub steps: Vec<u32>,
    pub step_hours: f64,
}

impl Horizon {
    pub fn hourly(first: u32, count: u32) -> Self {
        Horizon { steps: (first..first + count).collect(), step_hours: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Position of hour label `hour` in the horizon.
    pub fn index_of(&self, hour: u32) -> Option<usize> {
        self.steps.iter().position(|&h| h == hour)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct WholesalePrices {
    pub energy: Vec<f64>,
    pub cap_up: Vec<f64>,
    pub cap_dn: Vec<f64>,
    pub mil_up: Vec<f64>,
    pub mil_dn: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct RegulationSignal {
    /// Performance scores, per unit.
    pub mu_up: Vec<f64>,
    pub mu_dn: Vec<f64>,
    /// Expected mileage per MW of capacity.
    pub s_up: Vec<f64>,
    pub s_dn: Vec<f64>,
}

impl RegulationSignal {
    /// Deployed fraction `S * mu` for up and down regulation at step `t`.
    pub fn mileage_factors(&self, t: usize) -> (f64, f64) {
        (self.s_up[t] * self.mu_up[t], self.s_dn[t] * self.mu_dn[t])
    }
}

/// Per-step offer prices of one aggregator. `energy` is empty for demand
/// response aggregators, whose energy bids sit on their demand blocks.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OfferPrices {
    pub energy: Vec<f64>,
    pub cap_up: Vec<f64>,
    pub cap_dn: Vec<f64>,
    pub mil_up: Vec<f64>,
    pub mil_dn: Vec<f64>,
}

/// One step of a stepwise demand bid.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandBlock {
    pub p_max: f64,
    /// Utility price per step, $/MWh.
    pub price: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DragConfig {
    pub blocks: Vec<DemandBlock>,
    pub cap_up_max: f64,
    pub cap_dn_max: f64,
    pub tan_phi: f64,
}

impl DragConfig {
    pub fn total_p_max(&self) -> f64 {
        self.blocks.iter().map(|b| b.p_max).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EsagConfig {
    pub eta_ch: f64,
    pub eta_di: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub e_init: f64,
    pub dr_max: f64,
    pub cr_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvcsConfig {
    /// Hour labels when vehicles are plugged in.
    pub availability: Vec<u32>,
    pub er_max: f64,
    pub err_max: f64,
    pub cl_max: f64,
    pub e_init: f64,
    pub gamma_ch: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DdgagConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub ru: f64,
    pub rd: f64,
    pub tan_phi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AggregatorKind {
    Drag(DragConfig),
    Esag(EsagConfig),
    Evcs(EvcsConfig),
    Ddgag(DdgagConfig),
}

/// Family tag without the configuration payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AggregatorClass {
    Drag,
    Esag,
    Evcs,
    Ddgag,
}

impl AggregatorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregatorClass::Drag => "drag",
            AggregatorClass::Esag => "esag",
            AggregatorClass::Evcs => "evcs",
            AggregatorClass::Ddgag => "ddgag",
        }
    }
}

impl AggregatorKind {
    pub fn class(&self) -> AggregatorClass {
        match self {
            AggregatorKind::Drag(_) => AggregatorClass::Drag,
            AggregatorKind::Esag(_) => AggregatorClass::Esag,
            AggregatorKind::Evcs(_) => AggregatorClass::Evcs,
            AggregatorKind::Ddgag(_) => AggregatorClass::Ddgag,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregator {
    pub id: String,
    pub bus: u32,
    pub offers: OfferPrices,
    pub kind: AggregatorKind,
}

impl Aggregator {
    pub fn class(&self) -> AggregatorClass {
        self.kind.class()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bus {
    pub id: u32,
    /// Inelastic active load per step, MW.
    pub p_load: Vec<f64>,
    /// Inelastic reactive load per step, MVAr.
    pub q_load: Vec<f64>,
}

/// A line; positive flow runs from `from` to `to`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    pub r: f64,
    pub x: f64,
    pub pl_max: f64,
    pub ql_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub substation: u32,
    pub v_min: f64,
    pub v_max: f64,
    pub v_substation: f64,
    /// MVA base used to convert flows for the voltage-drop rows.
    pub s_base: f64,
}

impl Network {
    pub fn bus_index(&self, id: u32) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    /// Branch-bus incidence: `+1` at the sending bus, `-1` at the receiving bus.
    pub fn incidence(&self) -> Vec<Vec<i8>> {
        let mut a = alloc::vec![alloc::vec![0i8; self.buses.len()]; self.branches.len()];
        for (j, br) in self.branches.iter().enumerate() {
            if let (Some(f), Some(t)) = (self.bus_index(br.from), self.bus_index(br.to)) {
                a[j][f] += 1;
                a[j][t] -= 1;
            }
        }
        a
    }

    /// Symmetric bus adjacency.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.buses.len();
        let mut c = alloc::vec![alloc::vec![0u8; n]; n];
        for br in &self.branches {
            if let (Some(f), Some(t)) = (self.bus_index(br.from), self.bus_index(br.to)) {
                c[f][t] = 1;
                c[t][f] = 1;
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub horizon: Horizon,
    pub wholesale: WholesalePrices,
    pub regulation: RegulationSignal,
    pub network: Network,
    pub aggregators: Vec<Aggregator>,
}

impl Scenario {
    pub fn aggregator(&self, id: &str) -> Option<&Aggregator> {
        self.aggregators.iter().find(|a| a.id == id)
    }

    pub fn aggregator_index(&self, id: &str) -> Option<usize> {
        self.aggregators.iter().position(|a| a.id == id)
    }

    /// SHA-256 over a canonical binary encoding of every field.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Canon(Sha256::new());
        h.u32s(&self.horizon.steps);
        h.f(self.horizon.step_hours);
        let w = &self.wholesale;
        for s in [&w.energy, &w.cap_up, &w.cap_dn, &w.mil_up, &w.mil_dn] {
            h.fs(s);
        }
        let r = &self.regulation;
        for s in [&r.mu_up, &r.mu_dn, &r.s_up, &r.s_dn] {
            h.fs(s);
        }
        let n = &self.network;
        h.len(n.buses.len());
        for b in &n.buses {
            h.u32s(&[b.id]);
            h.fs(&b.p_load);
            h.fs(&b.q_load);
        }
        h.len(n.branches.len());
        for b in &n.branches {
            h.u32s(&[b.id, b.from, b.to]);
            for v in [b.r, b.x, b.pl_max, b.ql_max] {
                h.f(v);
            }
        }
        h.u32s(&[n.substation]);
        for v in [n.v_min, n.v_max, n.v_substation, n.s_base] {
            h.f(v);
        }
        h.len(self.aggregators.len());
        for a in &self.aggregators {
            h.bytes(a.id.as_bytes());
            h.u32s(&[a.bus]);
            let o = &a.offers;
            for s in [&o.energy, &o.cap_up, &o.cap_dn, &o.mil_up, &o.mil_dn] {
                h.fs(s);
            }
            match &a.kind {
                AggregatorKind::Drag(d) => {
                    h.bytes(b"drag");
                    h.len(d.blocks.len());
                    for b in &d.blocks {
                        h.f(b.p_max);
                        h.fs(&b.price);
                    }
                    for v in [d.cap_up_max, d.cap_dn_max, d.tan_phi] {
                        h.f(v);
                    }
                }
                AggregatorKind::Esag(e) => {
                    h.bytes(b"esag");
                    for v in [e.eta_ch, e.eta_di, e.e_min, e.e_max, e.e_init, e.dr_max, e.cr_max] {
                        h.f(v);
                    }
                }
                AggregatorKind::Evcs(e) => {
                    h.bytes(b"evcs");
                    h.u32s(&e.availability);
                    for v in [e.er_max, e.err_max, e.cl_max, e.e_init, e.gamma_ch] {
                        h.f(v);
                    }
                }
                AggregatorKind::Ddgag(d) => {
                    h.bytes(b"ddgag");
                    for v in [d.p_min, d.p_max, d.ru, d.rd, d.tan_phi] {
                        h.f(v);
                    }
                }
            }
        }
        h.0.finalize().into()
    }

    pub fn fingerprint_hex(&self) -> String {
        use core::fmt::Write;
        let mut s = String::with_capacity(64);
        for b in self.fingerprint() {
            let _ = write!(s, "{b:02x}");
        }
        s
    }
}

struct Canon(Sha256);

impl Canon {
    fn len(&mut self, n: usize) {
        self.0.update((n as u64).to_le_bytes());
    }
    fn f(&mut self, v: f64) {
        self.0.update(v.to_bits().to_le_bytes());
    }
    fn fs(&mut self, vs: &[f64]) {
        self.len(vs.len());
        for &v in vs {
            self.f(v);
        }
    }
    fn u32s(&mut self, vs: &[u32]) {
        self.len(vs.len());
        for &v in vs {
            self.0.update(v.to_le_bytes());
        }
    }
    fn bytes(&mut self, b: &[u8]) {
        self.len(b.len());
        self.0.update(b);
    }
}
