use std::f64::consts::PI;

use rayon::prelude::*;

use super::{build_qaoa_circuit, maxcut_cost_operator, plan_qaoa_cuts, EdgeOrder, EdgePartition, Graph, QAOAParams, Result};
use crate::cutting::{estimate, CutMethod, ShotConfig};
use crate::rng::derive_seed;
use crate::sim::exact_expectation;

/// Exact `⟨f⟩` for the natural-order circuit.
pub fn exact_cost(graph: &Graph, params: &QAOAParams) -> Result<f64> {
    let c = build_qaoa_circuit(graph, params, EdgeOrder::Natural)?;
    Ok(exact_expectation(&c, &maxcut_cost_operator(graph)?)?)
}

/// Source of cost values during optimisation.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluator {
    Exact,
    /// Cut estimator on the partition-ordered circuit. All probes of one step
    /// share a seed derived from `seed` and the step index.
    CutEstimated {
        partition: EdgePartition,
        method: CutMethod,
        shots: u64,
        seed: u64,
        workers: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Best point of a `points × points` grid at depth one, repeated per layer.
    Grid { points: usize },
    /// `γ_ℓ` rising and `β_ℓ` falling linearly across the layers.
    Ramp,
    Fixed(QAOAParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub steps: usize,
    pub learning_rate: f64,
    /// Finite-difference step; defaults to `1e-3` for the exact evaluator and
    /// `0.05` for the cut estimator.
    pub h: Option<f64>,
    pub init: Init,
    pub max_halvings: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            steps: 100,
            learning_rate: 0.1,
            h: None,
            init: Init::Grid { points: 12 },
            max_halvings: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub params: QAOAParams,
    pub cost: f64,
    /// Cost before the first step and after every step (`steps + 1` entries).
    pub trace: Vec<f64>,
}

/// Dense `(γ, β) ∈ [0, π)²` grid at depth one followed by `zoom` rounds of
/// local refinement. Returns the best parameters and their exact cost.
pub fn grid_search_p1(graph: &Graph, points: usize, zoom: usize) -> Result<(QAOAParams, f64)> {
    let eval = |g: f64, b: f64| exact_cost(graph, &QAOAParams::new(vec![g], vec![b]).expect("depth one"));
    let step = PI / points as f64;
    let cells: Vec<(f64, f64)> = (0..points)
        .flat_map(|i| (0..points).map(move |j| (i as f64 * step, j as f64 * step)))
        .collect();
    let mut best = scan(&cells, &eval)?;
    let mut span = step;
    for _ in 0..zoom {
        let local: Vec<(f64, f64)> = (-5..=5)
            .flat_map(|i| (-5..=5).map(move |j| (i, j)))
            .map(|(i, j)| (best.0 + i as f64 * span / 5.0, best.1 + j as f64 * span / 5.0))
            .collect();
        best = scan(&local, &eval)?;
        span /= 5.0;
    }
    Ok((QAOAParams::new(vec![best.0], vec![best.1])?, best.2))
}

fn scan(cells: &[(f64, f64)], eval: &(impl Fn(f64, f64) -> Result<f64> + Sync)) -> Result<(f64, f64, f64)> {
    let costs: Vec<f64> = cells
        .par_iter()
        .map(|&(g, b)| eval(g, b))
        .collect::<Result<_>>()?;
    let (i, c) = costs
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &c)| if c < acc.1 { (i, c) } else { acc });
    Ok((cells[i].0, cells[i].1, c))
}

/// Gradient descent with central finite differences and backtracking: a step
/// is halved until the cost does not rise, or rejected after `max_halvings`.
pub fn optimize_params(graph: &Graph, p: usize, evaluator: &Evaluator, config: &OptimizerConfig) -> Result<OptimizeResult> {
    let cost_fn = CostFn::new(graph, p, evaluator)?;
    let h = config.h.unwrap_or(match evaluator {
        Evaluator::Exact => 1e-3,
        Evaluator::CutEstimated { .. } => 0.05,
    });
    let init = match &config.init {
        Init::Fixed(params) => {
            params.validate()?;
            params.clone()
        }
        Init::Ramp => QAOAParams::new(
            (0..p).map(|l| 0.8 * (l as f64 + 1.0) / p as f64).collect(),
            (0..p).map(|l| 0.8 * (1.0 - l as f64 / p as f64)).collect(),
        )?,
        Init::Grid { points } => {
            let (best, _) = grid_search_p1(graph, *points, 0)?;
            QAOAParams::new(vec![best.gammas[0]; p], vec![best.betas[0]; p])?
        }
    };
    let mut x = init.to_vec();
    let mut trace = vec![cost_fn.eval(&x, 0)?];
    let mut best = (x.clone(), trace[0]);
    for step in 0..config.steps {
        let stream = step as u64 + 1;
        let mut probes = vec![x.clone()];
        for i in 0..x.len() {
            for s in [h, -h] {
                let mut y = x.clone();
                y[i] += s;
                probes.push(y);
            }
        }
        let vals: Vec<f64> = probes
            .par_iter()
            .map(|y| cost_fn.eval(y, stream))
            .collect::<Result<_>>()?;
        let f0 = vals[0];
        let grad: Vec<f64> = (0..x.len())
            .map(|i| (vals[1 + 2 * i] - vals[2 + 2 * i]) / (2.0 * h))
            .collect();
        let mut lr = config.learning_rate;
        let mut accepted = f0;
        for _ in 0..=config.max_halvings {
            let cand: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - lr * g).collect();
            let fc = cost_fn.eval(&cand, stream)?;
            if fc <= f0 {
                x = cand;
                accepted = fc;
                break;
            }
            lr *= 0.5;
        }
        trace.push(accepted);
        if accepted < best.1 {
            best = (x.clone(), accepted);
        }
    }
    Ok(OptimizeResult {
        params: QAOAParams::from_vec(&best.0),
        cost: best.1,
        trace,
    })
}

struct CostFn<'a> {
    graph: &'a Graph,
    evaluator: &'a Evaluator,
    cut: Option<(crate::cutting::CutPlan, crate::sim::DiagonalObservable)>,
}

impl<'a> CostFn<'a> {
    fn new(graph: &'a Graph, p: usize, evaluator: &'a Evaluator) -> Result<CostFn<'a>> {
        let cut = match evaluator {
            Evaluator::Exact => None,
            Evaluator::CutEstimated { partition, method, .. } => {
                Some((plan_qaoa_cuts(graph, partition, p, *method)?, maxcut_cost_operator(graph)?))
            }
        };
        Ok(CostFn { graph, evaluator, cut })
    }

    fn eval(&self, x: &[f64], stream: u64) -> Result<f64> {
        let params = QAOAParams::from_vec(x);
        match (self.evaluator, &self.cut) {
            (
                Evaluator::CutEstimated {
                    partition,
                    shots,
                    seed,
                    workers,
                    ..
                },
                Some((plan, obs)),
            ) => {
                let c = build_qaoa_circuit(self.graph, &params, EdgeOrder::Partition(partition))?;
                let cfg = ShotConfig::new(*shots, derive_seed(*seed, stream)).workers(*workers);
                Ok(estimate(&c, plan, obs, cfg)?.mean)
            }
            _ => exact_cost(self.graph, &params),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_reaches_minus_one() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let (_, grid) = grid_search_p1(&g, 60, 3).unwrap();
        assert!((grid + 1.0).abs() < 1e-3);
        let cfg = OptimizerConfig {
            steps: 60,
            init: Init::Ramp,
            ..OptimizerConfig::default()
        };
        let res = optimize_params(&g, 1, &Evaluator::Exact, &cfg).unwrap();
        assert_eq!(res.trace.len(), 61);
        assert!((res.cost + 1.0).abs() < 1e-3, "{res:?}");
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
