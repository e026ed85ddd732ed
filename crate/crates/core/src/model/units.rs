use super::{AggregatorKind, OfferPrices, Scenario, WholesalePrices};

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum UnitsError {
    #[error("power base must be positive and finite, got {0}")]
    ZeroBase(f64),
}

fn scale(v: &mut [f64], k: f64) {
    v.iter_mut().for_each(|x| *x *= k);
}

fn scale_prices(w: &mut WholesalePrices, k: f64) {
    for s in [&mut w.energy, &mut w.cap_up, &mut w.cap_dn, &mut w.mil_up, &mut w.mil_dn] {
        scale(s, k);
    }
}

fn scale_offers(o: &mut OfferPrices, k: f64) {
    for s in [&mut o.energy, &mut o.cap_up, &mut o.cap_dn, &mut o.mil_up, &mut o.mil_dn] {
        scale(s, k);
    }
}

/// Multiply every power and energy quantity by `factor` and every price by
/// `1 / factor`, so that costs in $ are unchanged. The network base follows
/// the quantities, keeping voltage drops unchanged.
pub fn scale_power(s: &Scenario, factor: f64) -> Scenario {
    let mut out = s.clone();
    let inv = 1.0 / factor;
    scale_prices(&mut out.wholesale, inv);
    let net = &mut out.network;
    net.s_base *= factor;
    for b in &mut net.buses {
        scale(&mut b.p_load, factor);
        scale(&mut b.q_load, factor);
    }
    for br in &mut net.branches {
        br.pl_max *= factor;
        br.ql_max *= factor;
    }
    for a in &mut out.aggregators {
        scale_offers(&mut a.offers, inv);
        match &mut a.kind {
            AggregatorKind::Drag(d) => {
                for b in &mut d.blocks {
                    b.p_max *= factor;
                    scale(&mut b.price, inv);
                }
                d.cap_up_max *= factor;
                d.cap_dn_max *= factor;
            }
            AggregatorKind::Esag(e) => {
                for v in [&mut e.e_min, &mut e.e_max, &mut e.e_init, &mut e.dr_max, &mut e.cr_max] {
                    *v *= factor;
                }
            }
            AggregatorKind::Evcs(e) => {
                for v in [&mut e.er_max, &mut e.err_max, &mut e.cl_max, &mut e.e_init] {
                    *v *= factor;
                }
            }
            AggregatorKind::Ddgag(d) => {
                for v in [&mut d.p_min, &mut d.p_max, &mut d.ru, &mut d.rd] {
                    *v *= factor;
                }
            }
        }
    }
    out
}

/// Express `s` on its own power base; the result has `s_base == 1`.
pub fn per_unit_view(s: &Scenario) -> Result<Scenario, UnitsError> {
    let base = s.network.s_base;
    if !(base > 0.0 && base.is_finite()) {
        return Err(UnitsError::ZeroBase(base));
    }
    if base == 1.0 {
        return Ok(s.clone());
    }
    Ok(scale_power(s, 1.0 / base))
}

/// Undo [`per_unit_view`] for a scenario whose original base was `base`.
pub fn from_per_unit(s: &Scenario, base: f64) -> Result<Scenario, UnitsError> {
    if !(base > 0.0 && base.is_finite()) {
        return Err(UnitsError::ZeroBase(base));
    }
    Ok(scale_power(s, base / s.network.s_base))
}
