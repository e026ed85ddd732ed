use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{AggregatorKind, Network, Scenario};

/// Machine-readable violation codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    HorizonEmpty,
    HorizonNotContiguous,
    StepHoursInvalid,
    SeriesLength,
    PriceNotFinite,
    RegulationPriceNegative,
    MuOutOfRange,
    MileageRatioNegative,
    DuplicateAggregatorId,
    UnknownBus,
    DragEnergyOfferPresent,
    DragBlockNegative,
    DragBlockPricesIncreasing,
    DragCapNegative,
    EsagEfficiencyOutOfRange,
    EsagEnergyBounds,
    EsagInitOutOfRange,
    EsagRateNonPositive,
    EvcsAvailabilityEmpty,
    EvcsAvailabilityNotContiguous,
    EvcsInitOutOfRange,
    EvcsRateNegative,
    EvcsEfficiencyOutOfRange,
    DdgagLimits,
    DdgagRampNegative,
    NotFinite,
    DuplicateBus,
    DuplicateBranch,
    BranchSelfLoop,
    BranchLimitNegative,
    SubstationMissing,
    NetworkNotRadial,
    NetworkDisconnected,
    NetworkCycle,
    VoltageBounds,
    BaseNonPositive,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        use ViolationCode::*;
        match self {
            HorizonEmpty => "HORIZON_EMPTY",
            HorizonNotContiguous => "HORIZON_NOT_CONTIGUOUS",
            StepHoursInvalid => "STEP_HOURS_INVALID",
            SeriesLength => "SERIES_LENGTH",
            PriceNotFinite => "PRICE_NOT_FINITE",
            RegulationPriceNegative => "REGULATION_PRICE_NEGATIVE",
            MuOutOfRange => "MU_OUT_OF_RANGE",
            MileageRatioNegative => "MILEAGE_RATIO_NEGATIVE",
            DuplicateAggregatorId => "DUPLICATE_AGGREGATOR_ID",
            UnknownBus => "UNKNOWN_BUS",
            DragEnergyOfferPresent => "DRAG_ENERGY_OFFER_PRESENT",
            DragBlockNegative => "DRAG_BLOCK_NEGATIVE",
            DragBlockPricesIncreasing => "DRAG_BLOCK_PRICES_INCREASING",
            DragCapNegative => "DRAG_CAP_NEGATIVE",
            EsagEfficiencyOutOfRange => "ESAG_EFFICIENCY_OUT_OF_RANGE",
            EsagEnergyBounds => "ESAG_ENERGY_BOUNDS",
            EsagInitOutOfRange => "ESAG_INIT_OUT_OF_RANGE",
            EsagRateNonPositive => "ESAG_RATE_NONPOSITIVE",
            EvcsAvailabilityEmpty => "EVCS_AVAILABILITY_EMPTY",
            EvcsAvailabilityNotContiguous => "EVCS_AVAILABILITY_NOT_CONTIGUOUS",
            EvcsInitOutOfRange => "EVCS_INIT_OUT_OF_RANGE",
            EvcsRateNegative => "EVCS_RATE_NEGATIVE",
            EvcsEfficiencyOutOfRange => "EVCS_EFFICIENCY_OUT_OF_RANGE",
            DdgagLimits => "DDGAG_LIMITS",
            DdgagRampNegative => "DDGAG_RAMP_NEGATIVE",
            NotFinite => "NOT_FINITE",
            DuplicateBus => "DUPLICATE_BUS",
            DuplicateBranch => "DUPLICATE_BRANCH",
            BranchSelfLoop => "BRANCH_SELF_LOOP",
            BranchLimitNegative => "BRANCH_LIMIT_NEGATIVE",
            SubstationMissing => "SUBSTATION_MISSING",
            NetworkNotRadial => "NETWORK_NOT_RADIAL",
            NetworkDisconnected => "NETWORK_DISCONNECTED",
            NetworkCycle => "NETWORK_CYCLE",
            VoltageBounds => "VOLTAGE_BOUNDS",
            BaseNonPositive => "BASE_NONPOSITIVE",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, message: String) {
        self.violations.push(Violation { code, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn contiguous(hours: &[u32]) -> bool {
    hours.windows(2).all(|w| w[1] == w[0] + 1)
}

/// `|J| == |N| - 1`, which is equivalent to radiality on connected graphs.
pub fn is_radial_by_count(net: &Network) -> bool {
    !net.buses.is_empty() && net.branches.len() + 1 == net.buses.len()
}

/// Union-find check: no branch closes a loop and all buses end up in one tree.
pub fn is_acyclic_and_connected(net: &Network) -> bool {
    let (cycle, components) = cycle_and_components(net);
    !cycle && components == 1
}

fn cycle_and_components(net: &Network) -> (bool, usize) {
    let n = net.buses.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut components = n;
    let mut cycle = false;
    for br in &net.branches {
        let (Some(f), Some(t)) = (net.bus_index(br.from), net.bus_index(br.to)) else {
            continue;
        };
        let (a, b) = (find(&mut parent, f), find(&mut parent, t));
        if a == b {
            cycle = true;
        } else {
            parent[a] = b;
            components -= 1;
        }
    }
    (cycle, components)
}

struct Checker<'a> {
    report: ValidationReport,
    steps: usize,
    s: &'a Scenario,
}

impl Checker<'_> {
    fn series(&mut self, what: &str, v: &[f64], expected: usize) {
        if v.len() != expected {
            self.report.push(
                ViolationCode::SeriesLength,
                format!("{what} has {} entries, expected {expected}", v.len()),
            );
        }
    }

    fn prices(&mut self, what: &str, v: &[f64], regulation: bool) {
        if v.iter().any(|p| !p.is_finite()) {
            self.report.push(ViolationCode::PriceNotFinite, format!("{what} contains a non-finite price"));
        } else if regulation && v.iter().any(|&p| p < 0.0) {
            self.report.push(ViolationCode::RegulationPriceNegative, format!("{what} contains a negative price"));
        }
    }

    fn finite(&mut self, what: &str, vals: &[f64]) -> bool {
        if vals.iter().all(|v| v.is_finite()) {
            true
        } else {
            self.report.push(ViolationCode::NotFinite, format!("{what} has a non-finite parameter"));
            false
        }
    }
}

/// Check every scenario invariant. Violations are returned as data.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let t = s.horizon.len();
    let mut c = Checker { report: ValidationReport::default(), steps: t, s };
    use ViolationCode as V;

    if s.horizon.is_empty() {
        c.report.push(V::HorizonEmpty, "horizon has no steps".into());
    } else if !contiguous(&s.horizon.steps) {
        c.report.push(V::HorizonNotContiguous, "horizon hours must be contiguous and increasing".into());
    }
    if !(s.horizon.step_hours > 0.0 && s.horizon.step_hours.is_finite()) {
        c.report.push(V::StepHoursInvalid, format!("step duration {} h is not positive", s.horizon.step_hours));
    }

    let w = &s.wholesale;
    for (name, v, reg) in [
        ("wholesale.energy", &w.energy, false),
        ("wholesale.cap_up", &w.cap_up, true),
        ("wholesale.cap_dn", &w.cap_dn, true),
        ("wholesale.mil_up", &w.mil_up, true),
        ("wholesale.mil_dn", &w.mil_dn, true),
    ] {
        c.series(name, v, t);
        c.prices(name, v, reg);
    }

    let r = &s.regulation;
    for (name, v) in [("regulation.mu_up", &r.mu_up), ("regulation.mu_dn", &r.mu_dn)] {
        c.series(name, v, t);
        if v.iter().any(|m| !(0.0..=1.0).contains(m)) {
            c.report.push(V::MuOutOfRange, format!("{name} must lie in [0, 1]"));
        }
    }
    for (name, v) in [("regulation.s_up", &r.s_up), ("regulation.s_dn", &r.s_dn)] {
        c.series(name, v, t);
        if v.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            c.report.push(V::MileageRatioNegative, format!("{name} must be non-negative"));
        }
    }

    validate_network(&mut c);

    let mut ids = BTreeSet::new();
    for a in &s.aggregators {
        let id = a.id.as_str();
        if !ids.insert(id) {
            c.report.push(V::DuplicateAggregatorId, format!("aggregator id `{id}` is used twice"));
        }
        if s.network.bus_index(a.bus).is_none() {
            c.report.push(V::UnknownBus, format!("aggregator `{id}` sits on unknown bus {}", a.bus));
        }
        let o = &a.offers;
        let is_drag = matches!(a.kind, AggregatorKind::Drag(_));
        if is_drag {
            if !o.energy.is_empty() {
                c.report.push(
                    V::DragEnergyOfferPresent,
                    format!("`{id}`: demand response energy bids belong on its demand blocks"),
                );
            }
        } else {
            c.series(&format!("{id}.offers.energy"), &o.energy, t);
            c.prices(&format!("{id}.offers.energy"), &o.energy, false);
        }
        for (name, v) in [("cap_up", &o.cap_up), ("cap_dn", &o.cap_dn), ("mil_up", &o.mil_up), ("mil_dn", &o.mil_dn)] {
            let what = format!("{id}.offers.{name}");
            c.series(&what, v, t);
            c.prices(&what, v, true);
        }
        match &a.kind {
            AggregatorKind::Drag(d) => {
                c.finite(id, &[d.cap_up_max, d.cap_dn_max, d.tan_phi]);
                for (k, b) in d.blocks.iter().enumerate() {
                    c.series(&format!("{id}.blocks[{k}].price"), &b.price, t);
                    c.prices(&format!("{id}.blocks[{k}].price"), &b.price, false);
                    if !(b.p_max >= 0.0 && b.p_max.is_finite()) {
                        c.report.push(V::DragBlockNegative, format!("`{id}` block {k} has negative size"));
                    }
                }
                let increasing = d.blocks.windows(2).any(|w| {
                    w[0].price.iter().zip(&w[1].price).any(|(a, b)| b > a)
                });
                if increasing {
                    c.report.push(
                        V::DragBlockPricesIncreasing,
                        format!("`{id}` block prices must be non-increasing in block order"),
                    );
                }
                if d.cap_up_max < 0.0 || d.cap_dn_max < 0.0 {
                    c.report.push(V::DragCapNegative, format!("`{id}` regulation maxima must be non-negative"));
                }
            }
            AggregatorKind::Esag(e) => {
                if !c.finite(id, &[e.eta_ch, e.eta_di, e.e_min, e.e_max, e.e_init, e.dr_max, e.cr_max]) {
                    continue;
                }
                if !(e.eta_ch > 0.0 && e.eta_ch <= 1.0 && e.eta_di > 0.0 && e.eta_di <= 1.0) {
                    c.report.push(V::EsagEfficiencyOutOfRange, format!("`{id}` efficiencies must lie in (0, 1]"));
                }
                if e.e_min > e.e_max {
                    c.report.push(V::EsagEnergyBounds, format!("`{id}` has E_min {} above E_max {}", e.e_min, e.e_max));
                } else if e.e_init < e.e_min || e.e_init > e.e_max {
                    c.report.push(
                        V::EsagInitOutOfRange,
                        format!("`{id}` initial energy {} outside [{}, {}]", e.e_init, e.e_min, e.e_max),
                    );
                }
                if !(e.dr_max > 0.0 && e.cr_max > 0.0) {
                    c.report.push(V::EsagRateNonPositive, format!("`{id}` charge/discharge rates must be positive"));
                }
            }
            AggregatorKind::Evcs(e) => {
                if !c.finite(id, &[e.er_max, e.err_max, e.cl_max, e.e_init, e.gamma_ch]) {
                    continue;
                }
                if e.availability.is_empty() {
                    c.report.push(V::EvcsAvailabilityEmpty, format!("`{id}` has no available hours"));
                } else if !contiguous(&e.availability)
                    || e.availability.iter().any(|h| s.horizon.index_of(*h).is_none())
                {
                    c.report.push(
                        V::EvcsAvailabilityNotContiguous,
                        format!("`{id}` availability must be a contiguous run of horizon hours"),
                    );
                }
                if e.e_init < 0.0 || e.e_init > e.cl_max {
                    c.report.push(
                        V::EvcsInitOutOfRange,
                        format!("`{id}` initial charge {} outside [0, {}]", e.e_init, e.cl_max),
                    );
                }
                if e.er_max < 0.0 || e.err_max < 0.0 {
                    c.report.push(V::EvcsRateNegative, format!("`{id}` rates must be non-negative"));
                }
                if !(e.gamma_ch > 0.0 && e.gamma_ch <= 1.0) {
                    c.report.push(V::EvcsEfficiencyOutOfRange, format!("`{id}` charging efficiency must lie in (0, 1]"));
                }
            }
            AggregatorKind::Ddgag(d) => {
                if !c.finite(id, &[d.p_min, d.p_max, d.ru, d.rd, d.tan_phi]) {
                    continue;
                }
                if !(0.0 <= d.p_min && d.p_min <= d.p_max) {
                    c.report.push(V::DdgagLimits, format!("`{id}` needs 0 <= P_min <= P_max"));
                }
                if d.ru < 0.0 || d.rd < 0.0 {
                    c.report.push(V::DdgagRampNegative, format!("`{id}` ramp limits must be non-negative"));
                }
            }
        }
    }
    c.report
}

fn validate_network(c: &mut Checker<'_>) {
    use ViolationCode as V;
    let net = &c.s.network;
    let t = c.steps;

    let mut seen = BTreeSet::new();
    for b in &net.buses {
        if !seen.insert(b.id) {
            c.report.push(V::DuplicateBus, format!("bus {} is defined twice", b.id));
        }
        c.series(&format!("bus {}.p_load", b.id), &b.p_load, t);
        c.series(&format!("bus {}.q_load", b.id), &b.q_load, t);
        let loads_finite = b.p_load.iter().chain(&b.q_load).all(|v| v.is_finite());
        if !loads_finite {
            c.report.push(V::NotFinite, format!("bus {} has a non-finite load", b.id));
        }
    }
    if net.bus_index(net.substation).is_none() {
        c.report.push(V::SubstationMissing, format!("substation bus {} does not exist", net.substation));
    }

    let mut pairs = BTreeSet::new();
    let mut ids = BTreeSet::new();
    let mut endpoints_ok = true;
    for br in &net.branches {
        if !ids.insert(br.id) {
            c.report.push(V::DuplicateBranch, format!("branch id {} is used twice", br.id));
        }
        if br.from == br.to {
            c.report.push(V::BranchSelfLoop, format!("branch {} connects bus {} to itself", br.id, br.from));
        }
        let key = (br.from.min(br.to), br.from.max(br.to));
        if br.from != br.to && !pairs.insert(key) {
            c.report.push(V::DuplicateBranch, format!("buses {} and {} are joined twice", key.0, key.1));
        }
        for bus in [br.from, br.to] {
            if net.bus_index(bus).is_none() {
                endpoints_ok = false;
                c.report.push(V::UnknownBus, format!("branch {} references unknown bus {bus}", br.id));
            }
        }
        if !(br.pl_max >= 0.0 && br.ql_max >= 0.0) {
            c.report.push(V::BranchLimitNegative, format!("branch {} limits must be non-negative", br.id));
        }
        if ![br.r, br.x, br.pl_max, br.ql_max].iter().all(|v| v.is_finite()) {
            c.report.push(V::NotFinite, format!("branch {} has a non-finite parameter", br.id));
        }
    }

    if !is_radial_by_count(net) {
        c.report.push(
            V::NetworkNotRadial,
            format!("{} branches over {} buses; a radial feeder needs |N| - 1", net.branches.len(), net.buses.len()),
        );
    }
    if endpoints_ok && !net.buses.is_empty() {
        let (cycle, components) = cycle_and_components(net);
        if cycle {
            c.report.push(V::NetworkCycle, "branches form a loop".into());
        }
        if components != 1 {
            c.report.push(V::NetworkDisconnected, format!("network splits into {components} islands"));
        }
    }

    let v_ok = net.v_min.is_finite()
        && net.v_max.is_finite()
        && 0.0 < net.v_min
        && net.v_min <= net.v_max
        && (net.v_min..=net.v_max).contains(&net.v_substation);
    if !v_ok {
        c.report.push(
            V::VoltageBounds,
            format!("need 0 < V_min <= V_sub <= V_max, got {} / {} / {}", net.v_min, net.v_substation, net.v_max),
        );
    }
    if !(net.s_base > 0.0 && net.s_base.is_finite()) {
        c.report.push(V::BaseNonPositive, format!("power base {} must be positive", net.s_base));
    }
}
