use thermolimit::ensemble::least_squares_slope;
use thermolimit::hilbert::{trace_distance, StateVector};
use thermolimit::strongcoupling::{
    averaged_coherences, offdiagonal_norm, tau_m, time_averaged_rho, AnalyticDynamics, ExactDynamics,
    StrongCouplingModel,
};

use super::require;
use crate::config::{OperatorSpec, Theorem2Params};
use crate::table::{Column, ColumnKind::*, ResultTable};
use crate::{config_err, RunError};

const EXPERIMENT: &str = "theorem2-decoherence";
const COMMUTING_TOL: f64 = 1e-10;
const CONVERGENCE_FACTOR: f64 = 0.25;
const CLOSED_FORM_TOL: f64 = 1e-6;

pub struct Plan {
    ladder: Vec<StrongCouplingModel>,
    psi0: StateVector,
    times: Vec<f64>,
    commuting: Vec<StrongCouplingModel>,
    commuting_psi0: StateVector,
    commuting_times: Vec<f64>,
    averaging: StrongCouplingModel,
    window: f64,
    samples: usize,
}

fn build(h_s: &OperatorSpec, v0: &OperatorSpec, p: &Theorem2Params, g: f64) -> Result<StrongCouplingModel, RunError> {
    let a_values = match &p.a_values {
        Some(a) => a.clone(),
        None => vec![p.a_bar; p.n],
    };
    let mut model =
        StrongCouplingModel::new(h_s.build().map_err(config_err)?, v0.build().map_err(config_err)?, a_values, g)?;
    if let Some(h) = &p.h_bath {
        model = model.with_bath_hamiltonian(h.build().map_err(config_err)?)?;
    }
    model.v0_spectrum()?;
    Ok(model)
}

/// Everything the exact path will need, checked before any evolution.
fn check_exact(model: &StrongCouplingModel, psi0: &StateVector) -> Result<(), RunError> {
    match model.exact_dim() {
        Some(d) if d <= thermolimit::strongcoupling::EXACT_DIM_CAP => {}
        d => {
            return Err(thermolimit::Error::TooLarge {
                dim: d.unwrap_or(usize::MAX),
                cap: thermolimit::strongcoupling::EXACT_DIM_CAP,
            }
            .into())
        }
    }
    thermolimit::strongcoupling::bath_state(model)?;
    require(psi0.dim() == model.system_dim(), || {
        format!("initial state has dimension {}, system has {}", psi0.dim(), model.system_dim())
    })
}

impl Plan {
    pub fn new(p: &Theorem2Params) -> Result<Self, RunError> {
        require(!p.g_values.is_empty(), || "theorem2.g_values is empty".into())?;
        require(p.g_values.iter().all(|g| g.is_finite() && *g > 0.0), || "theorem2.g_values must be positive".into())?;
        let psi0 = p.psi0.build().map_err(config_err)?;
        let ladder = p.g_values.iter().map(|&g| build(&p.h_s, &p.v0, p, g)).collect::<Result<Vec<_>, _>>()?;
        for m in &ladder {
            check_exact(m, &psi0)?;
            tau_m(m)?;
        }
        let times = p.times.points().map_err(config_err)?;

        let c = &p.commuting;
        require(c.g_values.iter().all(|g| g.is_finite() && *g >= 0.0), || {
            "theorem2.commuting.g_values must be non-negative".into()
        })?;
        let commuting_psi0 = c.psi0.build().map_err(config_err)?;
        let commuting = c
            .g_values
            .iter()
            .map(|&g| build(&c.h_s, &c.v0, &Theorem2Params { h_bath: None, ..p.clone() }, g))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(m) = commuting.first() {
            let comm = m.h_s().commutator(m.v0())?.max_abs();
            require(comm <= 1e-12, || format!("commuting stage needs [H_S, V_0] = 0, got norm {comm:e}"))?;
        }
        for m in &commuting {
            check_exact(m, &commuting_psi0)?;
        }
        let commuting_times = c.times.points().map_err(config_err)?;

        let a = &p.averaging;
        require(a.g.is_finite() && a.g > 0.0, || "theorem2.averaging.g must be positive".into())?;
        require(a.window_tau.is_finite() && a.window_tau > 0.0, || {
            "theorem2.averaging.window_tau must be positive".into()
        })?;
        require(a.samples >= 2, || "theorem2.averaging.samples must be at least 2".into())?;
        let averaging = build(&p.h_s, &p.v0, p, a.g)?;
        let window = a.window_tau * tau_m(&averaging)?;

        Ok(Self {
            ladder,
            psi0,
            times,
            commuting,
            commuting_psi0,
            commuting_times,
            averaging,
            window,
            samples: a.samples,
        })
    }

    pub fn execute(&self) -> Result<Vec<ResultTable>, RunError> {
        let (decoherence, maxima) = self.decoherence()?;
        Ok(vec![decoherence, self.convergence(&maxima)?, self.commuting()?, self.averaging()?])
    }

    /// Per-time table for every coupling on the ladder, plus the worst trace
    /// distance of each coupling.
    fn decoherence(&self) -> Result<(ResultTable, Vec<f64>), RunError> {
        let mut table = ResultTable::new(
            EXPERIMENT,
            "decoherence",
            vec![
                Column::new("g", Real),
                Column::new("t", Real),
                Column::new("trace_distance", Real),
                Column::new("offdiagonal_norm", Real),
                Column::new("tau_m", Real),
                Column::new("averaged_offdiag", Real),
            ],
        );
        let mut maxima = Vec::with_capacity(self.ladder.len());
        for model in &self.ladder {
            let exact = ExactDynamics::new(model)?;
            let analytic = AnalyticDynamics::new(model)?;
            let basis = model.v0_spectrum()?;
            let tau = tau_m(model)?;
            let series = self.times.iter().map(|&t| exact.rho(&self.psi0, t)).collect::<Result<Vec<_>, _>>()?;
            let mut worst = 0.0f64;
            for (k, (&t, rho)) in self.times.iter().zip(&series).enumerate() {
                let d = trace_distance(rho, &analytic.rho(&self.psi0, t)?)?;
                worst = worst.max(d);
                let averaged = if k == 0 { rho.clone() } else { time_averaged_rho(&series[..=k])? };
                table.push(vec![
                    model.g().into(),
                    t.into(),
                    d.into(),
                    offdiagonal_norm(rho, &basis)?.into(),
                    tau.into(),
                    offdiagonal_norm(&averaged, &basis)?.into(),
                ])?;
            }
            maxima.push(worst);
        }
        Ok((table, maxima))
    }

    fn convergence(&self, maxima: &[f64]) -> Result<ResultTable, RunError> {
        let gs: Vec<f64> = self.ladder.iter().map(|m| m.g()).collect();
        let slope = if gs.len() >= 2 {
            let xs: Vec<f64> = gs.iter().map(|g| g.ln()).collect();
            let ys: Vec<f64> = maxima.iter().map(|d| d.ln()).collect();
            least_squares_slope(&xs, &ys)
        } else {
            f64::NAN
        };
        let mut table = ResultTable::new(
            EXPERIMENT,
            "convergence",
            vec![
                Column::new("g", Real),
                Column::new("max_trace_distance", Real),
                Column::new("relative_to_first", Real),
                Column::new("slope", Real),
                Column::new("pass", Bool),
            ],
        );
        let first = maxima[0];
        for (k, (&g, &d)) in gs.iter().zip(maxima).enumerate() {
            let monotone = k == 0 || d <= maxima[k - 1];
            let last_ok = k + 1 < gs.len() || k == 0 || d <= CONVERGENCE_FACTOR * first;
            table.push(vec![g.into(), d.into(), (d / first).into(), slope.into(), (monotone && last_ok).into()])?;
        }
        Ok(table)
    }

    fn commuting(&self) -> Result<ResultTable, RunError> {
        let mut table = ResultTable::new(
            EXPERIMENT,
            "commuting",
            vec![
                Column::new("g", Real),
                Column::new("t", Real),
                Column::new("trace_distance", Real),
                Column::new("pass", Bool),
            ],
        );
        for model in &self.commuting {
            let exact = ExactDynamics::new(model)?;
            let analytic = AnalyticDynamics::new(model)?;
            for &t in &self.commuting_times {
                let d = trace_distance(&exact.rho(&self.commuting_psi0, t)?, &analytic.rho(&self.commuting_psi0, t)?)?;
                table.push(vec![model.g().into(), t.into(), d.into(), (d <= COMMUTING_TOL).into()])?;
            }
        }
        Ok(table)
    }

    fn averaging(&self) -> Result<ResultTable, RunError> {
        let mut table = ResultTable::new(
            EXPERIMENT,
            "averaging",
            vec![
                Column::new("m", Integer),
                Column::new("n", Integer),
                Column::new("omega", Real),
                Column::new("window", Real),
                Column::new("initial_magnitude", Real),
                Column::new("averaged_magnitude", Real),
                Column::new("closed_form", Real),
                Column::new("bound", Real),
                Column::new("pass", Bool),
            ],
        );
        for c in averaged_coherences(&self.averaging, &self.psi0, self.window, self.samples)? {
            let pass =
                (c.averaged_magnitude - c.closed_form).abs() <= CLOSED_FORM_TOL && c.averaged_magnitude <= c.bound;
            table.push(vec![
                c.m.into(),
                c.n.into(),
                c.omega.into(),
                self.window.into(),
                c.initial_magnitude.into(),
                c.averaged_magnitude.into(),
                c.closed_form.into(),
                c.bound.into(),
                pass.into(),
            ])?;
        }
        Ok(table)
    }
}
