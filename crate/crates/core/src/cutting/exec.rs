use rand::Rng;
use serde::{Deserialize, Serialize};

use super::shots::run_indexed;
use super::{CutError, CutMethod, CutPlan, Result};
use crate::clifford::{sample_uniform_clifford, tableau_to_unitary};
use crate::config::{SimLimits, OBSERVABLE_BOUND_TOL};
use crate::rng::StreamRng;
use crate::sim::{ChannelInstance, Circuit, CircuitOp, DiagonalObservable, Eigen, GateKind, Pauli, Statevector};

/// Shot count, master seed and worker threads for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
    pub workers: usize,
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64) -> ShotConfig {
        ShotConfig {
            shots,
            seed,
            workers: 1,
        }
    }

    pub fn workers(mut self, workers: usize) -> ShotConfig {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
    #[serde(rename = "bound")]
    pub per_shot_bound: f64,
}

impl Estimate {
    /// Mean and `stderr = s/√N` with the unbiased sample variance `s²`.
    pub fn from_values(values: &[f64], per_shot_bound: f64) -> Estimate {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
            shots: values.len() as u64,
            per_shot_bound,
        }
    }

    /// Sample variance of a single shot value.
    pub fn variance(&self) -> f64 {
        self.stderr * self.stderr * self.shots as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serialises")
    }
}

enum Step {
    Cut(usize),
    Gate {
        fragment: usize,
        kind: GateKind,
        wires: Vec<usize>,
    },
}

struct GroupWiring {
    k: usize,
    method: CutMethod,
    up: usize,
    down: usize,
    up_wires: Vec<usize>,
    down_wires: Vec<usize>,
}

/// Precomputed fragment-wise schedule for one circuit and plan.
struct Executor {
    /// Fragment states after the gates that precede their first cut event.
    prefix: Vec<Statevector>,
    steps: Vec<Step>,
    groups: Vec<GroupWiring>,
    readout: Vec<Vec<(usize, usize)>>,
    bound: f64,
}

impl Executor {
    fn new(circuit: &Circuit, plan: &CutPlan) -> Result<Executor> {
        let cap = SimLimits::DEFAULT.statevector_qubits;
        let n = circuit.num_qubits();
        let frags = plan.fragments();
        let mut local = vec![vec![usize::MAX; n]; frags.len()];
        for (f, frag) in frags.iter().enumerate() {
            if frag.support.len() > cap {
                return Err(CutError::FragmentTooWide {
                    fragment: f,
                    qubits: frag.support.len(),
                    cap,
                });
            }
            for (l, &w) in frag.support.iter().enumerate() {
                local[f][w] = l;
            }
        }

        let mut cuts_at: Vec<Vec<usize>> = vec![Vec::new(); circuit.len() + 1];
        for (gi, g) in plan.groups().iter().enumerate() {
            cuts_at[g.position].push(gi);
        }
        let mut steps = Vec::new();
        let mut owner = vec![None; n];
        for (i, op) in circuit.ops().iter().enumerate() {
            steps.extend(cuts_at[i].iter().map(|&g| Step::Cut(g)));
            if let (CircuitOp::Gate(g), Some(f)) = (op, plan.op_fragment()[i]) {
                for &w in &g.wires {
                    owner[w] = Some(f);
                }
                steps.push(Step::Gate {
                    fragment: f,
                    kind: g.kind,
                    wires: g.wires.iter().map(|&w| local[f][w]).collect(),
                });
            }
        }

        let groups = plan
            .groups()
            .iter()
            .zip(plan.group_ends())
            .map(|(g, &(up, down))| GroupWiring {
                k: g.wires.len(),
                method: g.method,
                up,
                down,
                up_wires: g.wires.iter().map(|&w| local[up][w]).collect(),
                down_wires: g.wires.iter().map(|&w| local[down][w]).collect(),
            })
            .collect();

        let mut prefix = frags
            .iter()
            .map(|f| Statevector::zero(f.support.len()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut touched = vec![false; frags.len()];
        steps.retain(|step| match step {
            Step::Cut(gi) => {
                let (up, down) = plan.group_ends()[*gi];
                touched[up] = true;
                touched[down] = true;
                true
            }
            Step::Gate {
                fragment,
                kind,
                wires,
            } if !touched[*fragment] => {
                prefix[*fragment].apply_kind(kind, wires);
                false
            }
            Step::Gate { .. } => true,
        });

        let mut readout = vec![Vec::new(); frags.len()];
        for (w, o) in owner.iter().enumerate() {
            if let Some(f) = *o {
                readout[f].push((local[f][w], w));
            }
        }
        Ok(Executor {
            prefix,
            steps,
            groups,
            readout,
            bound: plan.per_shot_bound(),
        })
    }

    fn draw_instance(g: &GroupWiring, rng: &mut StreamRng) -> Result<(ChannelInstance, f64)> {
        Ok(match g.method {
            CutMethod::Randomized => {
                let d = 1u64 << g.k;
                if rng.gen_range(0..2 * d + 1) < d {
                    (
                        ChannelInstance::Depolarize {
                            prepared: rng.gen_range(0..d),
                        },
                        -1.0,
                    )
                } else {
                    let t = sample_uniform_clifford(g.k, rng)?;
                    let unitary = tableau_to_unitary(&t)?;
                    (ChannelInstance::CliffordBasis { unitary }, 1.0)
                }
            }
            CutMethod::Pauli => {
                let terms = (0..g.k)
                    .map(|_| {
                        let t = rng.gen_range(0..8usize);
                        let e = if t % 2 == 0 { Eigen::Plus } else { Eigen::Minus };
                        (Pauli::ALL[t / 2], e)
                    })
                    .collect();
                (ChannelInstance::Pauli(terms), 1.0)
            }
        })
    }

    /// One shot: terminal bitstring and the signed product of group scales.
    fn shot(&self, rng: &mut StreamRng) -> Result<(u64, f64)> {
        let mut states = self.prefix.clone();
        let mut sign = 1.0;
        for step in &self.steps {
            match step {
                Step::Gate {
                    fragment,
                    kind,
                    wires,
                } => states[*fragment].apply_kind(kind, wires),
                Step::Cut(gi) => {
                    let g = &self.groups[*gi];
                    let (inst, s) = Self::draw_instance(g, rng)?;
                    let y = inst.measure_half(&mut states[g.up], &g.up_wires, rng)?;
                    inst.prepare_half(&mut states[g.down], &g.down_wires, y, rng)?;
                    sign *= s * inst.outcome_sign(y);
                }
            }
        }
        let mut bits = 0u64;
        for (f, owned) in self.readout.iter().enumerate() {
            if owned.is_empty() {
                continue;
            }
            let x = states[f].sample(rng);
            for &(l, w) in owned {
                bits |= ((x >> l) & 1) << w;
            }
        }
        Ok((bits, sign * self.bound))
    }
}

/// Monte Carlo estimate of `⟨f⟩` for the cut circuit. Shot `i` uses stream
/// `i` of the master seed, so the result does not depend on `workers`.
pub fn estimate(
    circuit: &Circuit,
    plan: &CutPlan,
    obs: &DiagonalObservable,
    cfg: ShotConfig,
) -> Result<Estimate> {
    let exec = Executor::new(circuit, plan)?;
    let bound = exec.bound;
    let values = run_indexed(cfg.shots, cfg.seed, cfg.workers, |_, rng| {
        let (x, w) = exec.shot(rng)?;
        let y = obs.evaluate(x) * w;
        if y.abs() > bound * (1.0 + OBSERVABLE_BOUND_TOL) {
            return Err(CutError::BoundViolated { value: y, bound });
        }
        Ok(y)
    })?;
    Ok(Estimate::from_values(&values, bound))
}

/// Terminal bitstrings of the cut circuit with signs and scales discarded.
pub fn sample_cut(circuit: &Circuit, plan: &CutPlan, cfg: ShotConfig) -> Result<Vec<u64>> {
    let exec = Executor::new(circuit, plan)?;
    run_indexed(cfg.shots, cfg.seed, cfg.workers, |_, rng| Ok(exec.shot(rng)?.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutting::plan_bipartition;

    #[test]
    fn bell_parity_randomized() {
        let mut c = Circuit::new(2);
        c.gate(GateKind::H, &[0]).unwrap().gate(GateKind::Cnot, &[0, 1]).unwrap();
        c.measure_all("terminal").unwrap();
        let plan = plan_bipartition(&c, &[0], &[0, 1], CutMethod::Randomized).unwrap();
        let obs = DiagonalObservable::z_parity(&[0, 1]);
        let est = estimate(&c, &plan, &obs, ShotConfig::new(20_000, 3)).unwrap();
        assert_eq!(est.per_shot_bound, 5.0);
        assert!((est.mean - 1.0).abs() < 4.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn uncut_plan_samples_the_circuit() {
        let mut c = Circuit::new(2);
        c.gate(GateKind::X, &[1]).unwrap();
        c.measure_all("terminal").unwrap();
        let plan = CutPlan::uncut(&c).unwrap();
        let xs = sample_cut(&c, &plan, ShotConfig::new(100, 0)).unwrap();
        assert!(xs.iter().all(|&x| x == 0b10));
    }

    #[test]
    fn estimate_json_fields() {
        let e = Estimate::from_values(&[1.0, -1.0, 1.0, 1.0], 5.0);
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        for key in ["mean", "stderr", "shots", "bound"] {
            assert!(v.get(key).is_some());
        }
        assert!((e.variance() - 1.0).abs() < 1e-12);
    }
}
