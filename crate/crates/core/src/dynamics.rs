//! Deterministic forward simulation of the climate-economy recursion,
//! with optional right-hand-side perturbations to the emission balance
//! and the consumption split.

use crate::error::SimError;
use crate::params::Params;

/// Decision variables: per-period savings rate and abatement rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub s: Vec<f64>,
    pub mu: Vec<f64>,
}

impl Controls {
    pub fn new(s: Vec<f64>, mu: Vec<f64>) -> Controls {
        Controls { s, mu }
    }

    /// Check the box bounds 0 <= s <= 1, 0 <= mu <= pi35.
    pub fn check_bounds(&self, p: &Params) -> Result<(), SimError> {
        // a hair of slack so points produced by projection arithmetic
        // never trip the check
        const EPS: f64 = 1e-12;
        for t in 0..p.t_max {
            let s = self.s.get(t).copied().unwrap_or(f64::NAN);
            if !(s >= -EPS && s <= 1.0 + EPS) {
                return Err(SimError::ControlsOutOfBounds {
                    name: "s",
                    period: t + 1,
                    value: s,
                });
            }
            let mu = self.mu.get(t).copied().unwrap_or(f64::NAN);
            if !(mu >= -EPS && mu <= p.pi35[t] + EPS) {
                return Err(SimError::ControlsOutOfBounds {
                    name: "mu",
                    period: t + 1,
                    value: mu,
                });
            }
        }
        if self.s.len() != p.t_max || self.mu.len() != p.t_max {
            return Err(SimError::ControlsOutOfBounds {
                name: "length",
                period: 0,
                value: self.s.len().min(self.mu.len()) as f64,
            });
        }
        Ok(())
    }
}

/// Which equation's right-hand side a perturbation enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbTarget {
    /// Emission balance: E(t) gains `amount` native emission units.
    EmissionsEq,
    /// Consumption split: C(t) gains `amount` native consumption units
    /// after the savings split, so investment does not feel it.
    ConsumptionEq,
}

/// A fixed addition to one equation's right-hand side at one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub target: PerturbTarget,
    /// 1-based period index.
    pub period: usize,
    pub amount: f64,
}

impl Perturbation {
    pub fn check(&self, p: &Params) -> Result<(), SimError> {
        if self.period < 1 || self.period > p.t_max {
            return Err(SimError::PerturbationOutOfHorizon {
                period: self.period,
                t_max: p.t_max,
            });
        }
        if !self.amount.is_finite() {
            return Err(SimError::NonFinitePerturbation);
        }
        Ok(())
    }
}

/// Accumulate perturbations into dense per-period addition vectors
/// (emissions, consumption).
pub fn rhs_additions(
    p: &Params,
    perturbations: &[Perturbation],
) -> Result<(Vec<f64>, Vec<f64>), SimError> {
    let mut a_e = vec![0.0; p.t_max];
    let mut a_c = vec![0.0; p.t_max];
    for pert in perturbations {
        pert.check(p)?;
        match pert.target {
            PerturbTarget::EmissionsEq => a_e[pert.period - 1] += pert.amount,
            PerturbTarget::ConsumptionEq => a_c[pert.period - 1] += pert.amount,
        }
    }
    Ok((a_e, a_c))
}

/// Every state and derived series of one simulation, plus welfare.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Gross production before damages and abatement (internal series,
    /// kept because the reverse sweep reuses it).
    pub g: Vec<f64>,
    pub omega: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Net output.
    pub q: Vec<f64>,
    /// Investment.
    pub inv: Vec<f64>,
    /// Total consumption.
    pub cons: Vec<f64>,
    /// Per-capita consumption.
    pub c: Vec<f64>,
    pub k: Vec<f64>,
    pub e_ind: Vec<f64>,
    pub e: Vec<f64>,
    pub m_at: Vec<f64>,
    pub m_up: Vec<f64>,
    pub m_lo: Vec<f64>,
    pub f: Vec<f64>,
    pub t_at: Vec<f64>,
    pub t_lo: Vec<f64>,
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    pub w: f64,
}

/// Damage fraction of gross output at a given surface temperature.
pub fn damage_fraction(t_at: f64, p: &Params) -> f64 {
    p.pi8 * t_at + p.pi9 * t_at * t_at
}

/// Abatement cost fraction of gross output at abatement rate `mu`
/// in 1-based period `t`.
pub fn abatement_fraction(mu: f64, t: usize, p: &Params) -> f64 {
    p.pi10[t - 1] * mu.powf(p.pi11)
}

/// One step of the 3-box carbon exchange with emissions `e` entering
/// the atmosphere box.
pub fn carbon_step(m_at: f64, m_up: f64, m_lo: f64, e: f64, p: &Params) -> (f64, f64, f64) {
    (
        e + p.pi21 * m_at + p.pi22 * m_up,
        p.pi23 * m_at + p.pi24 * m_up + p.pi25 * m_lo,
        p.pi26 * m_up + p.pi27 * m_lo,
    )
}

/// One step of the 2-box temperature recursion driven by atmospheric
/// carbon. Returns (forcing, t_at', t_lo').
pub fn temperature_step(
    t_at: f64,
    t_lo: f64,
    m_at: f64,
    t: usize,
    p: &Params,
) -> Result<(f64, f64, f64), SimError> {
    if !(m_at > 0.0) {
        return Err(SimError::Domain {
            period: t,
            quantity: "M_AT",
            value: m_at,
        });
    }
    let f = p.pi28 * (m_at / p.pi29).log2() + p.pi30[t - 1];
    let t_at_new = t_at + p.pi31 * (f - p.pi32 * t_at - p.pi33 * (t_at - t_lo));
    let t_lo_new = t_lo + p.pi34 * (t_at - t_lo);
    Ok((f, t_at_new, t_lo_new))
}

/// Run the full forward recursion.
///
/// Within a period: production uses last period's capital, damages use
/// last period's surface temperature; the capital update happens before
/// the emission equation, which therefore sees this period's capital;
/// emissions enter the atmosphere box the same period.
pub fn simulate(
    p: &Params,
    u: &Controls,
    perturbations: &[Perturbation],
) -> Result<Trajectory, SimError> {
    u.check_bounds(p)?;
    let (a_e, a_c) = rhs_additions(p, perturbations)?;
    simulate_rhs(p, u, &a_e, &a_c)
}

/// As [`simulate`] but with the perturbations already accumulated into
/// dense addition vectors (the optimizer's hot path).
pub fn simulate_rhs(
    p: &Params,
    u: &Controls,
    a_e: &[f64],
    a_c: &[f64],
) -> Result<Trajectory, SimError> {
    let n = p.t_max;
    let mut tr = Trajectory {
        g: vec![0.0; n],
        omega: vec![0.0; n],
        lambda: vec![0.0; n],
        q: vec![0.0; n],
        inv: vec![0.0; n],
        cons: vec![0.0; n],
        c: vec![0.0; n],
        k: vec![0.0; n],
        e_ind: vec![0.0; n],
        e: vec![0.0; n],
        m_at: vec![0.0; n],
        m_up: vec![0.0; n],
        m_lo: vec![0.0; n],
        f: vec![0.0; n],
        t_at: vec![0.0; n],
        t_lo: vec![0.0; n],
        u: vec![0.0; n],
        r: vec![0.0; n],
        w: 0.0,
    };
    let (mut k, mut m_at, mut m_up, mut m_lo, mut t_at, mut t_lo) =
        (p.k0, p.m_at0, p.m_up0, p.m_lo0, p.t_at0, p.t_lo0);
    let mut w = 0.0;
    for i in 0..n {
        let period = i + 1;
        let g = p.pi4[i] * k.powf(p.pi5) * p.pi6[i].powf(p.pi7);
        let om = damage_fraction(t_at, p);
        let lam = abatement_fraction(u.mu[i], period, p);
        let q = (1.0 - lam) * g / (1.0 + om);
        let inv = u.s[i] * q;
        let cons = (1.0 - u.s[i]) * q + a_c[i];
        if !(cons > 0.0) {
            return Err(SimError::Domain {
                period,
                quantity: "C",
                value: cons,
            });
        }
        let c = cons / p.pi12[i];
        let k_new = inv - p.pi13 * k;
        if !(k_new > 0.0) {
            return Err(SimError::Domain {
                period,
                quantity: "K",
                value: k_new,
            });
        }
        let e_ind =
            p.pi14[i] * (1.0 - u.mu[i]) * p.pi15[i] * k_new.powf(p.pi16) * p.pi17[i].powf(p.pi18);
        let e = e_ind + p.pi20[i] + a_e[i];
        let (m_at_new, m_up_new, m_lo_new) = carbon_step(m_at, m_up, m_lo, e, p);
        let (f, t_at_new, t_lo_new) = temperature_step(t_at, t_lo, m_at_new, period, p)?;
        let util = p.pi1[i] * c.powf(p.pi2) / p.pi2;
        let disc = p.pi3.powf(-(period as f64));
        w += util * disc;

        tr.g[i] = g;
        tr.omega[i] = om;
        tr.lambda[i] = lam;
        tr.q[i] = q;
        tr.inv[i] = inv;
        tr.cons[i] = cons;
        tr.c[i] = c;
        tr.k[i] = k_new;
        tr.e_ind[i] = e_ind;
        tr.e[i] = e;
        tr.m_at[i] = m_at_new;
        tr.m_up[i] = m_up_new;
        tr.m_lo[i] = m_lo_new;
        tr.f[i] = f;
        tr.t_at[i] = t_at_new;
        tr.t_lo[i] = t_lo_new;
        tr.u[i] = util;
        tr.r[i] = disc;

        k = k_new;
        m_at = m_at_new;
        m_up = m_up_new;
        m_lo = m_lo_new;
        t_at = t_at_new;
        t_lo = t_lo_new;
    }
    tr.w = w;
    Ok(tr)
}

/// Discounted utility sum of a finished trajectory.
pub fn welfare(tr: &Trajectory) -> f64 {
    tr.u.iter().zip(&tr.r).map(|(u, r)| u * r).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    fn flat_controls(p: &Params, s: f64, mu: f64) -> Controls {
        Controls::new(vec![s; p.t_max], vec![mu; p.t_max])
    }

    #[test]
    fn damage_fraction_cases() {
        let p = testdata::dice2016();
        assert_eq!(damage_fraction(0.0, &p), 0.0);
        let mut q = p.clone();
        q.pi8 = 0.0;
        assert_eq!(damage_fraction(2.0, &q), 4.0 * q.pi9);
        // hand evaluation with bundled constants at 1 degree
        assert_eq!(damage_fraction(1.0, &p), p.pi8 + p.pi9);
        assert_eq!(damage_fraction(1.0, &p), 0.00236);
    }

    #[test]
    fn abatement_fraction_cases() {
        let p = testdata::dice2016();
        assert_eq!(abatement_fraction(0.0, 1, &p), 0.0);
        assert_eq!(abatement_fraction(1.0, 1, &p), p.pi10[0]);
        // hand evaluation: pi10(1) * 0.5^2.6
        assert_eq!(abatement_fraction(0.5, 1, &p), 0.012222957984271369);
    }

    #[test]
    fn carbon_step_identity_and_conservation() {
        let p = testdata::dice2016();
        let mut q = p.clone();
        q.pi21 = 1.0;
        q.pi24 = 1.0;
        q.pi27 = 1.0;
        for coeff in [
            &mut q.pi22, &mut q.pi23, &mut q.pi25, &mut q.pi26,
        ] {
            *coeff = 0.0;
        }
        assert_eq!(carbon_step(3.0, 2.0, 1.0, 0.0, &q), (3.0, 2.0, 1.0));

        // conservation-flagged coefficients keep total mass constant
        let (mut a, mut b, mut c) = (p.m_at0, p.m_up0, p.m_lo0);
        let total = a + b + c;
        for _ in 0..200 {
            (a, b, c) = carbon_step(a, b, c, 0.0, &p);
        }
        assert!(((a + b + c) - total).abs() / total < 1e-9);
    }

    #[test]
    fn carbon_step_from_bundled_initial_state() {
        // hand evaluation from the bundled initial boxes with e = 50
        let p = testdata::dice2016();
        let (m_at, m_up, m_lo) = carbon_step(p.m_at0, p.m_up0, p.m_lo0, 50.0, &p);
        assert_eq!(m_at, 3125.9206400000003);
        assert_eq!(m_up, 1727.7465823255814);
        assert_eq!(m_lo, 6381.2987776744185);
    }

    #[test]
    fn temperature_step_cases() {
        let p = testdata::dice2016();
        let mut q = p.clone();
        q.pi30[0] = 0.0;
        let (f, t_at, t_lo) = temperature_step(0.0, 0.0, q.pi29, 1, &q).unwrap();
        assert_eq!((f, t_at, t_lo), (0.0, 0.0, 0.0));
        let (f, _, _) = temperature_step(0.0, 0.0, 2.0 * q.pi29, 1, &q).unwrap();
        assert_eq!(f, q.pi28);

        // hand evaluation from bundled initial state after the first
        // carbon step with e = 50
        let (f, t_at, t_lo) =
            temperature_step(p.t_at0, p.t_lo0, 3125.9206400000003, 1, &p).unwrap();
        assert_eq!(f, 2.4738626483210138);
        assert_eq!(t_at, 0.9897223700336812);
        assert_eq!(t_lo, 0.027880000000000002);

        assert!(matches!(
            temperature_step(0.0, 0.0, 0.0, 3, &p),
            Err(SimError::Domain { period: 3, quantity: "M_AT", .. })
        ));
    }

    #[test]
    fn simulate_desk_fixed_controls() {
        let p = testdata::desk();
        let u = flat_controls(&p, 0.2, 0.0);
        let tr = simulate(&p, &u, &[]).unwrap();
        assert!(tr.lambda.iter().all(|&l| l == 0.0));
        assert!(tr.e_ind.iter().all(|&e| e > 0.0));
        // independently summed welfare at these controls
        assert_eq!(tr.w, -158.8971460257157);
        assert_eq!(welfare(&tr), tr.w);
        // spot values along the trajectory
        assert_eq!(tr.q[0], 104.99838922199663);
        assert_eq!(tr.k[4], 75.77743848286879);
        assert_eq!(tr.m_at[4], 3946.1411005303676);
        assert_eq!(tr.t_at[4], 1.7353721364857089);
    }

    #[test]
    fn perturbation_locality() {
        let p = testdata::desk();
        let u = flat_controls(&p, 0.2, 0.1);
        let base = simulate(&p, &u, &[]).unwrap();
        let a = 7.5;
        let pert = Perturbation {
            target: PerturbTarget::EmissionsEq,
            period: 3,
            amount: a,
        };
        let bumped = simulate(&p, &u, &[pert]).unwrap();
        for i in 0..2 {
            assert_eq!(base.e[i], bumped.e[i]);
            assert_eq!(base.t_at[i], bumped.t_at[i]);
            assert_eq!(base.c[i], bumped.c[i]);
        }
        assert_eq!(bumped.e[2], base.e[2] + a);
    }

    #[test]
    fn consumption_perturbation_skips_investment() {
        let p = testdata::desk();
        let u = flat_controls(&p, 0.25, 0.05);
        let base = simulate(&p, &u, &[]).unwrap();
        let pert = Perturbation {
            target: PerturbTarget::ConsumptionEq,
            period: 2,
            amount: 0.5,
        };
        let bumped = simulate(&p, &u, &[pert]).unwrap();
        assert_eq!(bumped.cons[1], base.cons[1] + 0.5);
        assert_eq!(bumped.inv, base.inv);
        assert_eq!(bumped.k, base.k);
    }

    #[test]
    fn perturbation_validation() {
        let p = testdata::desk();
        let bad = Perturbation {
            target: PerturbTarget::EmissionsEq,
            period: 21,
            amount: 1.0,
        };
        assert!(matches!(
            bad.check(&p),
            Err(SimError::PerturbationOutOfHorizon { period: 21, t_max: 20 })
        ));
        let nan = Perturbation {
            target: PerturbTarget::ConsumptionEq,
            period: 1,
            amount: f64::NAN,
        };
        assert!(matches!(nan.check(&p), Err(SimError::NonFinitePerturbation)));
    }

    #[test]
    fn controls_out_of_bounds_rejected() {
        let p = testdata::desk();
        let mut u = flat_controls(&p, 0.2, 0.0);
        u.s[5] = 1.4;
        assert!(matches!(
            simulate(&p, &u, &[]),
            Err(SimError::ControlsOutOfBounds { name: "s", period: 6, .. })
        ));
    }

    #[test]
    fn monotone_damage_in_temperature() {
        // with all else fixed, a hotter period-1 initial state weakly
        // lowers period-1 net output
        let p = testdata::desk();
        let u = flat_controls(&p, 0.2, 0.0);
        let q_cool = simulate(&p, &u, &[]).unwrap().q[0];
        let mut hot = p.clone();
        hot.t_at0 = p.t_at0 + 1.0;
        let q_hot = simulate(&hot, &u, &[]).unwrap().q[0];
        assert!(q_hot < q_cool);
    }
}
