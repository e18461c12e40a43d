use num_complex::Complex64;
use thermolimit::catdynamics::{
    analytic_evolve, fidelity_sweep, interference_metrics, phase_gap, separation_ratio, wigner, Axis, CatModel,
    CatParams, BRUTE_FORCE_CUTOFF_CAP,
};

use super::require;
use crate::config::{AxisSpec, Theorem3Params};
use crate::table::{Column, ColumnKind::*, ResultTable};
use crate::{config_err, RunError};

const EXPERIMENT: &str = "theorem3-cat";
const FIDELITY_TOL: f64 = 1e-6;
const HOMOGENEITY_TOL: f64 = 1e-12;
const WIGNER_POINT_CAP: usize = 1 << 20;

struct WignerPlan {
    model: CatModel,
    t: f64,
    x: Axis,
    p: Axis,
}

pub struct Plan {
    models: Vec<CatModel>,
    times: Vec<f64>,
    homogeneity: Vec<CatModel>,
    homogeneity_t: f64,
    wigner: Option<WignerPlan>,
}

fn axis(spec: AxisSpec) -> Result<Axis, RunError> {
    Ok(Axis::new(spec.min, spec.max, spec.count)?)
}

impl Plan {
    pub fn new(p: &Theorem3Params) -> Result<Self, RunError> {
        let params = |n: usize, cutoff: Option<usize>| CatParams {
            omega: p.omega,
            gamma: Complex64::new(p.gamma.re, p.gamma.im),
            alpha: p.alpha,
            phi: p.phi,
            n,
            a_bar: p.a_bar,
            cutoff,
        };
        require(!p.n_values.is_empty(), || "theorem3.n_values is empty".into())?;
        let models = p.n_values.iter().map(|&n| CatModel::new(params(n, p.cutoff))).collect::<Result<Vec<_>, _>>()?;
        for m in &models {
            if m.cutoff() > BRUTE_FORCE_CUTOFF_CAP {
                return Err(thermolimit::Error::TooLarge { dim: m.cutoff(), cap: BRUTE_FORCE_CUTOFF_CAP }.into());
            }
        }
        let times = p.times.points().map_err(config_err)?;

        require(p.homogeneity_n.len() >= 2, || "theorem3.homogeneity_n needs at least two sizes".into())?;
        require(p.homogeneity_t.is_finite(), || "theorem3.homogeneity_t must be finite".into())?;
        // Only closed forms are evaluated here, so the cutoff rule is enough.
        let homogeneity =
            p.homogeneity_n.iter().map(|&n| CatModel::new(params(n, None))).collect::<Result<Vec<_>, _>>()?;
        for m in &homogeneity {
            separation_ratio(m, p.homogeneity_t)?;
        }

        let wigner = match p.wigner {
            None => None,
            Some(w) => {
                require(w.t.is_finite(), || "theorem3.wigner.t must be finite".into())?;
                let (x, p_axis) = (axis(w.x)?, axis(w.p)?);
                let points = x.count.saturating_mul(p_axis.count);
                if points > WIGNER_POINT_CAP {
                    return Err(thermolimit::Error::TooLarge { dim: points, cap: WIGNER_POINT_CAP }.into());
                }
                Some(WignerPlan { model: CatModel::new(params(w.n, p.cutoff))?, t: w.t, x, p: p_axis })
            }
        };

        Ok(Self { models, times, homogeneity, homogeneity_t: p.homogeneity_t, wigner })
    }

    pub fn execute(&self) -> Result<Vec<ResultTable>, RunError> {
        let mut tables = vec![self.fidelity()?, self.homogeneity()?];
        if let Some(w) = &self.wigner {
            tables.push(self.wigner(w)?);
        }
        Ok(tables)
    }

    fn fidelity(&self) -> Result<ResultTable, RunError> {
        let mut table = ResultTable::new(
            EXPERIMENT,
            "fidelity",
            vec![
                Column::new("n", Integer),
                Column::new("t", Real),
                Column::new("overlap_analytic_vs_brute", Real),
                Column::new("phase_gap", Real),
                Column::new("separation_ratio", Real),
                Column::new("fringe_visibility", Real),
                Column::new("pass", Bool),
            ],
        );
        let rows = fidelity_sweep(&self.models, &self.times)?;
        for (row, model) in rows.iter().zip(self.models.iter().flat_map(|m| self.times.iter().map(move |_| m))) {
            let metrics = interference_metrics(model, row.t)?;
            table.push(vec![
                row.n.into(),
                row.t.into(),
                row.overlap.into(),
                metrics.phase_gap.into(),
                metrics.separation_ratio.into(),
                metrics.fringe_visibility.into(),
                (row.overlap >= 1.0 - FIDELITY_TOL).into(),
            ])?;
        }
        Ok(table)
    }

    fn homogeneity(&self) -> Result<ResultTable, RunError> {
        let mut table = ResultTable::new(
            EXPERIMENT,
            "homogeneity",
            vec![
                Column::new("n", Integer),
                Column::new("t", Real),
                Column::new("phase_gap", Real),
                Column::new("separation_ratio", Real),
                Column::new("n_ratio", Real),
                Column::new("phase_gap_ratio", Real),
                Column::new("separation_ratio_ratio", Real),
                Column::new("pass", Bool),
            ],
        );
        let t = self.homogeneity_t;
        let mut previous: Option<(f64, f64, f64)> = None;
        for model in &self.homogeneity {
            let n = model.n() as f64;
            let gap = phase_gap(model, t);
            let sep = separation_ratio(model, t)?;
            let (n_ratio, gap_ratio, sep_ratio, pass) = match previous {
                None => (1.0, 1.0, 1.0, true),
                Some((n0, gap0, sep0)) => {
                    let (nr, gr, sr) = (n / n0, gap / gap0, sep / sep0);
                    // The gap grows like N and the separation ratio like 1/N.
                    let pass = (gr / nr - 1.0).abs() <= HOMOGENEITY_TOL && (sr * nr - 1.0).abs() <= HOMOGENEITY_TOL;
                    (nr, gr, sr, pass)
                }
            };
            previous = Some((n, gap, sep));
            table.push(vec![
                model.n().into(),
                t.into(),
                gap.into(),
                sep.into(),
                n_ratio.into(),
                gap_ratio.into(),
                sep_ratio.into(),
                pass.into(),
            ])?;
        }
        Ok(table)
    }

    fn wigner(&self, w: &WignerPlan) -> Result<ResultTable, RunError> {
        let state = analytic_evolve(&w.model, w.t)?.state;
        let grid = wigner(&state, w.x, w.p)?;
        let mut table = ResultTable::new(
            EXPERIMENT,
            "wigner",
            vec![Column::new("x", Real), Column::new("p", Real), Column::new("w", Real)],
        );
        for (ix, &x) in w.x.points().iter().enumerate() {
            for (ip, &p) in w.p.points().iter().enumerate() {
                table.push(vec![x.into(), p.into(), grid.value(ix, ip).into()])?;
            }
        }
        Ok(table)
    }
}
