use thermolimit::ensemble::{
    collective_stats_factorized, scaling_study, BruteForceEnsemble, EnsembleSpec, SubsystemSpec, BRUTE_FORCE_DIM_CAP,
    DEGENERATE_VARIANCE,
};

use super::{require, Sampler};
use crate::config::Theorem1Params;
use crate::table::{Column, ColumnKind::*, ResultTable};
use crate::{config_err, RunError};

const EXPERIMENT: &str = "theorem1-scaling";
const SLOPE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-10;

pub struct Plan {
    template: SubsystemSpec,
    n_values: Vec<usize>,
    t: f64,
    oracles: Vec<(String, EnsembleSpec)>,
    oracle_times: Vec<f64>,
}

impl Plan {
    pub fn new(p: &Theorem1Params, seed: u64) -> Result<Self, RunError> {
        let template = SubsystemSpec::new(
            p.h.build().map_err(config_err)?,
            p.a.build().map_err(config_err)?,
            p.psi0.build().map_err(config_err)?,
        )?;
        require(p.n_values.len() >= 2, || "theorem1.n_values needs at least two sizes".into())?;
        require(p.n_values.iter().all(|&n| n >= 1), || "theorem1.n_values must be positive".into())?;
        require(p.t.is_finite(), || "theorem1.t must be finite".into())?;
        let variance = template.moments(p.t)?.variance;
        if variance < DEGENERATE_VARIANCE {
            return Err(thermolimit::Error::DegenerateVariance { variance }.into());
        }

        let mut oracles = Vec::new();
        for &n in &p.oracle_sizes {
            let spec = EnsembleSpec::replicated(template.clone(), n)?;
            check_cap(&spec)?;
            oracles.push((format!("replicated-{n}"), spec));
        }
        let mut rng = Sampler::new(seed);
        for k in 0..p.random_ensembles {
            let count = rng.range(2, 5);
            let parts = (0..count)
                .map(|_| {
                    let d = rng.range(2, 3);
                    SubsystemSpec::new(rng.hermitian(d), rng.hermitian(d), rng.state(d))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let spec = EnsembleSpec::heterogeneous(parts)?;
            check_cap(&spec)?;
            oracles.push((format!("random-{k}"), spec));
        }
        let oracle_times = p.oracle_times.points().map_err(config_err)?;
        Ok(Self { template, n_values: p.n_values.clone(), t: p.t, oracles, oracle_times })
    }

    pub fn execute(&self) -> Result<Vec<ResultTable>, RunError> {
        Ok(vec![self.scaling()?, self.oracle()?])
    }

    fn scaling(&self) -> Result<ResultTable, RunError> {
        let study = scaling_study(&self.template, &self.n_values, self.t)?;
        let ratio_slope = study.ratio_slope.unwrap_or(f64::NAN);
        let pass = (study.sqrt_variance_slope - 0.5).abs() <= SLOPE_TOL
            && study.ratio_slope.is_none_or(|s| (s + 0.5).abs() <= SLOPE_TOL);
        let mut table = ResultTable::new(
            EXPERIMENT,
            "scaling",
            vec![
                Column::new("n", Integer),
                Column::new("t", Real),
                Column::new("mean", Real),
                Column::new("sqrt_variance", Real),
                Column::new("ratio", Real),
                Column::new("slope_sqrt_variance", Real),
                Column::new("slope_ratio", Real),
                Column::new("pass", Bool),
            ],
        );
        for row in &study.rows {
            table.push(vec![
                row.n.into(),
                study.t.into(),
                row.mean.into(),
                row.sqrt_variance.into(),
                row.ratio.into(),
                study.sqrt_variance_slope.into(),
                ratio_slope.into(),
                pass.into(),
            ])?;
        }
        Ok(table)
    }

    fn oracle(&self) -> Result<ResultTable, RunError> {
        let mut table = ResultTable::new(
            EXPERIMENT,
            "oracle",
            vec![
                Column::new("ensemble", Text),
                Column::new("subsystems", Integer),
                Column::new("dim", Integer),
                Column::new("t", Real),
                Column::new("mean_factorized", Real),
                Column::new("mean_bruteforce", Real),
                Column::new("variance_factorized", Real),
                Column::new("variance_bruteforce", Real),
                Column::new("abs_error", Real),
                Column::new("pass", Bool),
            ],
        );
        for (label, spec) in &self.oracles {
            let brute = BruteForceEnsemble::new(spec)?.stats_on_grid(&self.oracle_times)?;
            for slow in brute {
                let fast = collective_stats_factorized(spec, slow.t)?;
                let err = (fast.mean - slow.mean).abs().max((fast.variance - slow.variance).abs());
                table.push(vec![
                    label.as_str().into(),
                    spec.len().into(),
                    spec.total_dim().unwrap_or(usize::MAX).into(),
                    slow.t.into(),
                    fast.mean.into(),
                    slow.mean.into(),
                    fast.variance.into(),
                    slow.variance.into(),
                    err.into(),
                    (err <= ORACLE_TOL).into(),
                ])?;
            }
        }
        Ok(table)
    }
}

fn check_cap(spec: &EnsembleSpec) -> Result<(), RunError> {
    match spec.total_dim() {
        Some(d) if d <= BRUTE_FORCE_DIM_CAP => Ok(()),
        d => Err(thermolimit::Error::TooLarge { dim: d.unwrap_or(usize::MAX), cap: BRUTE_FORCE_DIM_CAP }.into()),
    }
}
