//! The 24-hour, five-bus case study with one aggregator of each family.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{
    Aggregator, AggregatorKind, Branch, Bus, DdgagConfig, DemandBlock, DragConfig, EsagConfig, EvcsConfig, Horizon,
    Network, OfferPrices, RegulationSignal, Scenario, WholesalePrices,
};

/// Hourly prices and regulation scores. Columns: hour, wholesale energy,
/// wholesale capacity, ESAG energy, ESAG capacity, DDGAG energy, DDGAG
/// capacity, EVCS energy, EVCS capacity, DRAG energy, DRAG capacity,
/// score up, score down.
pub const HOURLY: [[f64; 13]; 24] = [
    [1.0, 24.3, 14.7, 25.0, 23.0, 28.0, 27.0, 29.0, 30.5, 29.0, 30.0, 0.45, 0.42],
    [2.0, 23.7, 17.3, 25.0, 23.0, 28.0, 27.0, 29.0, 30.5, 29.0, 30.0, 0.45, 0.42],
    [3.0, 23.0, 16.6, 25.0, 23.0, 28.0, 27.0, 29.0, 30.5, 29.0, 30.0, 0.45, 0.42],
    [4.0, 23.0, 16.6, 25.0, 23.0, 28.0, 27.0, 29.0, 30.5, 29.0, 30.0, 0.45, 0.42],
    [5.0, 23.7, 17.3, 25.0, 23.0, 28.0, 27.0, 29.0, 30.5, 29.0, 30.0, 0.45, 0.42],
    [6.0, 25.9, 22.7, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.48, 0.48],
    [7.0, 29.4, 30.4, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.48, 0.48],
    [8.0, 30.7, 33.6, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.48, 0.48],
    [9.0, 30.1, 33.6, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.48, 0.48],
    [10.0, 29.1, 31.4, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.48, 0.48],
    [11.0, 28.8, 30.4, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.48, 0.48],
    [12.0, 28.2, 24.3, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.48, 0.48],
    [13.0, 27.5, 24.3, 27.0, 24.0, 28.5, 27.5, 29.0, 30.5, 29.0, 30.0, 0.5, 0.51],
    [14.0, 27.2, 24.3, 27.0, 24.0, 28.5, 27.5, 29.0, 30.5, 29.0, 30.0, 0.5, 0.51],
    [15.0, 27.2, 24.3, 27.0, 24.0, 28.5, 27.5, 29.0, 30.5, 29.0, 30.0, 0.5, 0.51],
    [16.0, 27.5, 24.3, 27.0, 24.0, 28.5, 27.5, 29.0, 30.5, 29.0, 30.0, 0.5, 0.51],
    [17.0, 28.2, 28.2, 30.0, 27.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.5, 0.51],
    [18.0, 30.4, 28.8, 30.0, 27.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.5, 0.51],
    [19.0, 32.0, 33.6, 30.0, 27.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.5, 0.51],
    [20.0, 32.0, 33.6, 30.0, 27.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.5, 0.5],
    [21.0, 31.0, 32.0, 30.0, 27.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.5, 0.5],
    [22.0, 29.4, 32.0, 28.0, 25.0, 29.0, 28.0, 29.5, 31.0, 30.0, 31.0, 0.5, 0.5],
    [23.0, 27.5, 25.6, 28.0, 25.0, 28.0, 27.0, 29.0, 30.5, 29.0, 30.0, 0.42, 0.45],
    [24.0, 25.3, 22.4, 28.0, 25.0, 28.0, 27.0, 29.0, 30.5, 29.0, 30.0, 0.42, 0.45],
];

/// Ratio of mileage price to capacity price used when mileage prices are not given.
pub const MILEAGE_TO_CAPACITY: f64 = 1.0 / 20.0;

/// Data the case study leaves open, as filled in here.
pub const ASSUMPTIONS: &[&str] = &[
    "Hourly regulation columns are performance scores mu_up / mu_dn; mileage ratios S_up = S_dn = 1.",
    "Mileage prices (wholesale and offers) are capacity prices divided by 20.",
    "Capacity-down prices equal capacity-up prices; mileage-down equals mileage-up.",
    "Energy prices are read as $/MWh with one-hour steps.",
    "Radial feeder 1-2, 2-3, 2-4, 4-5 with the substation on bus 1.",
    "DRAG on bus 2, ESAG on bus 3, EVCS on bus 4, DDGAG on bus 5.",
    "Branch impedances r = x = 0.01 p.u. on a 10 MVA base; flow limits 20 MW / 20 MVAr.",
    "Voltage limits 0.95-1.05 p.u.; substation voltage held at 1.0 p.u.",
    "No inelastic load on any bus.",
    "DRAG bids a single 10 MW block at its hourly energy price; tan(phi) = 0.33 for DRAG and DDGAG.",
    "EVCS charging efficiency 1, CL_max = 10 MWh.",
];

fn column(c: usize) -> Vec<f64> {
    HOURLY.iter().map(|row| row[c]).collect()
}

fn mileage(cap: &[f64]) -> Vec<f64> {
    cap.iter().map(|c| c * MILEAGE_TO_CAPACITY).collect()
}

fn offers(energy: Option<usize>, cap: usize) -> OfferPrices {
    let c = column(cap);
    OfferPrices {
        energy: energy.map(column).unwrap_or_default(),
        cap_up: c.clone(),
        cap_dn: c.clone(),
        mil_up: mileage(&c),
        mil_dn: mileage(&c),
    }
}

fn agg(id: &str, bus: u32, offers: OfferPrices, kind: AggregatorKind) -> Aggregator {
    Aggregator { id: String::from(id), bus, offers, kind }
}

/// The case-study scenario in natural units (MW, MWh, $).
pub fn bundled_case_study() -> Scenario {
    let t = HOURLY.len();
    let cap = column(2);
    let wholesale = WholesalePrices {
        energy: column(1),
        cap_up: cap.clone(),
        cap_dn: cap.clone(),
        mil_up: mileage(&cap),
        mil_dn: mileage(&cap),
    };
    let regulation = RegulationSignal {
        mu_up: column(11),
        mu_dn: column(12),
        s_up: vec![1.0; t],
        s_dn: vec![1.0; t],
    };
    let buses = (1..=5).map(|id| Bus { id, p_load: vec![0.0; t], q_load: vec![0.0; t] }).collect();
    let branches = [(1, 2), (2, 3), (2, 4), (4, 5)]
        .iter()
        .zip(1..)
        .map(|(&(from, to), id)| Branch { id, from, to, r: 0.01, x: 0.01, pl_max: 20.0, ql_max: 20.0 })
        .collect();
    let network = Network {
        buses,
        branches,
        substation: 1,
        v_min: 0.95,
        v_max: 1.05,
        v_substation: 1.0,
        s_base: 10.0,
    };
    let aggregators = vec![
        agg(
            "drag-1",
            2,
            offers(None, 10),
            AggregatorKind::Drag(DragConfig {
                blocks: vec![DemandBlock { p_max: 10.0, price: column(9) }],
                cap_up_max: 1.0,
                cap_dn_max: 1.0,
                tan_phi: 0.33,
            }),
        ),
        agg(
            "esag-1",
            3,
            offers(Some(3), 4),
            AggregatorKind::Esag(EsagConfig {
                eta_ch: 1.0,
                eta_di: 1.0,
                e_min: 2.0,
                e_max: 10.0,
                e_init: 8.0,
                dr_max: 5.0,
                cr_max: 5.0,
            }),
        ),
        agg(
            "evcs-1",
            4,
            offers(Some(7), 8),
            AggregatorKind::Evcs(EvcsConfig {
                availability: (16..=24).collect(),
                er_max: 5.0,
                err_max: 0.5,
                cl_max: 10.0,
                e_init: 2.0,
                gamma_ch: 1.0,
            }),
        ),
        agg(
            "ddgag-1",
            5,
            offers(Some(5), 6),
            AggregatorKind::Ddgag(DdgagConfig { p_min: 0.0, p_max: 5.0, ru: 1.0, rd: 1.0, tan_phi: 0.33 }),
        ),
    ];
    Scenario { horizon: Horizon::hourly(1, t as u32), wholesale, regulation, network, aggregators }
}
