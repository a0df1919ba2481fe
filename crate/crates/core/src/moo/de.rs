use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use super::{Evaluation, ObjectiveAssembly};
use crate::designs::generate_lhs;
use crate::error::{invalid_arg, Result};
use crate::rng;

/// Differential weight.
pub const DE_F: f64 = 0.8;
/// Crossover probability.
pub const DE_CR: f64 = 0.9;

/// `min(10 k, 150)`.
pub fn population_size(k: usize) -> usize {
    (10 * k).min(150)
}

/// Best point found after one generation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub restart: usize,
    pub generation: usize,
    pub evaluations: usize,
    pub desirability: f64,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfillSuggestion {
    pub objective_names: Vec<String>,
    pub x_best: Vec<f64>,
    pub y_best: Vec<f64>,
    pub desirability_best: f64,
    /// Best-so-far across all restarts, one entry per generation.
    pub trace: Vec<TraceEntry>,
    /// Every evaluated candidate had desirability 0.
    pub flat_landscape: bool,
}

impl InfillSuggestion {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Console summary in the style of the reference printouts.
    pub fn to_text(&self) -> String {
        let label = self.objective_names.join(" + ");
        let fmt = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.8}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = format!(
            "Input values of the best point ({label}):\n[{}]\n",
            fmt(&self.x_best)
        );
        out.push_str(&format!("Best desirability ({label}): {:.4}\n", self.desirability_best));
        out.push_str(&format!(
            "Target values of the best point ({label}): [[{}]]\n",
            fmt(&self.y_best)
        ));
        if self.flat_landscape {
            out.push_str("Warning: desirability is 0 for every evaluated candidate\n");
        }
        out
    }
}

struct Member {
    x: Vec<f64>,
    eval: Evaluation,
}

/// Keeps `v` in `[low, high]` by mirroring at the violated bound.
fn reflect(v: f64, low: f64, high: f64) -> f64 {
    let r = if v < low {
        low + (low - v)
    } else if v > high {
        high - (v - high)
    } else {
        v
    };
    r.clamp(low, high)
}

struct Best {
    x: Vec<f64>,
    eval: Evaluation,
}

impl Best {
    fn offer(&mut self, x: &[f64], eval: &Evaluation) {
        if eval.desirability > self.eval.desirability {
            self.x = x.to_vec();
            self.eval = eval.clone();
        }
    }
}

/// Maximizes the overall desirability with DE/rand/1/bin (`F` = [`DE_F`],
/// `CR` = [`DE_CR`], population [`population_size`]) started from a Latin
/// hypercube. Trial vectors are reflected back into the bounds, the whole
/// generation is evaluated in parallel and then replaces parents whose
/// desirability is not higher. Each restart spends `budget` evaluations on
/// its own random stream; the best point over all restarts is returned.
pub fn optimize(
    assembly: &ObjectiveAssembly,
    budget: usize,
    seed: u64,
    restarts: usize,
) -> Result<InfillSuggestion> {
    let bounds = assembly.bounds();
    let k = bounds.k();
    let np = population_size(k);
    if budget < np {
        return Err(invalid_arg(format!(
            "budget {budget} is smaller than the population size {np}"
        )));
    }
    if restarts == 0 {
        return Err(invalid_arg("restarts must be at least 1"));
    }
    let (low, high) = (bounds.low(), bounds.high());
    let mut best: Option<Best> = None;
    let mut trace = Vec::new();

    for restart in 0..restarts {
        let mut rng = rng::stream(seed, restart as u64);
        let start = generate_lhs(np, k, rng.random(), false)?;
        let xs: Vec<Vec<f64>> = start
            .points()
            .rows()
            .into_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(j, u)| low[j] + u * (high[j] - low[j]))
                    .collect()
            })
            .collect();
        let evals = evaluate_all(assembly, &xs)?;
        let mut pop: Vec<Member> = xs
            .into_iter()
            .zip(evals)
            .map(|(x, eval)| Member { x, eval })
            .collect();
        let incumbent = best.get_or_insert_with(|| Best {
            x: pop[0].x.clone(),
            eval: pop[0].eval.clone(),
        });
        for m in &pop {
            incumbent.offer(&m.x, &m.eval);
        }
        let mut used = np;
        let mut generation = 0;
        trace.push(entry(restart, generation, used, incumbent));

        while used < budget {
            generation += 1;
            let m = np.min(budget - used);
            let trials: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    let (r1, r2, r3) = distinct_three(&mut rng, np, i);
                    let j_rand = rng.random_range(0..k);
                    (0..k)
                        .map(|j| {
                            if j == j_rand || rng.random::<f64>() < DE_CR {
                                let v = pop[r1].x[j] + DE_F * (pop[r2].x[j] - pop[r3].x[j]);
                                reflect(v, low[j], high[j])
                            } else {
                                pop[i].x[j]
                            }
                        })
                        .collect()
                })
                .collect();
            let evals = evaluate_all(assembly, &trials)?;
            for (i, (x, eval)) in trials.into_iter().zip(evals).enumerate() {
                incumbent.offer(&x, &eval);
                if eval.desirability >= pop[i].eval.desirability {
                    pop[i] = Member { x, eval };
                }
            }
            used += m;
            trace.push(entry(restart, generation, used, incumbent));
        }
    }

    let best = best.expect("at least one restart");
    let flat_landscape = best.eval.desirability == 0.0;
    if flat_landscape {
        log::warn!("overall desirability is 0 for every evaluated candidate");
    }
    Ok(InfillSuggestion {
        objective_names: assembly.objective_names().to_vec(),
        x_best: best.x,
        y_best: best.eval.objectives,
        desirability_best: best.eval.desirability,
        trace,
        flat_landscape,
    })
}

fn evaluate_all(assembly: &ObjectiveAssembly, xs: &[Vec<f64>]) -> Result<Vec<Evaluation>> {
    xs.par_iter().map(|x| assembly.evaluate(x)).collect()
}

fn entry(restart: usize, generation: usize, evaluations: usize, best: &Best) -> TraceEntry {
    TraceEntry {
        restart,
        generation,
        evaluations,
        desirability: best.eval.desirability,
        objectives: best.eval.objectives.clone(),
    }
}

fn distinct_three(rng: &mut rng::Rng, np: usize, exclude: usize) -> (usize, usize, usize) {
    let mut pick = |taken: &[usize]| loop {
        let r = rng.random_range(0..np);
        if r != exclude && !taken.contains(&r) {
            return r;
        }
    };
    let r1 = pick(&[]);
    let r2 = pick(&[r1]);
    let r3 = pick(&[r1, r2]);
    (r1, r2, r3)
}
