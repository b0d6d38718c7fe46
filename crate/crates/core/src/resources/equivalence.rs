use nalgebra::{DVector, Matrix2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::qmath::{c, wire_mask, PureState, Su2, C64};
use crate::seeding;

/// Fidelity at or above `1 − EQUIVALENCE_TOL` counts as equivalent.
pub const EQUIVALENCE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LuOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 2000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    /// No local unitaries were found; evidence, not proof.
    NotReached,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    /// Best `|⟨target|(⊗U)|source⟩|`, averaged over pairs for ensembles.
    pub max_fidelity: f64,
    pub verdict: Verdict,
    pub restarts: usize,
    /// Ascent steps taken by the winning restart.
    pub iterations: usize,
    /// One unitary per wire.
    pub unitaries: Vec<Su2>,
    /// The same unitaries as rotation vectors, `U = exp(i v·σ/2)`.
    pub angles: Vec<[f64; 3]>,
}

impl EquivalenceVerdict {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Hermitian Paulis.
fn sigmas() -> [Matrix2<C64>; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Matrix2::new(z, one, one, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(one, z, z, -one),
    ]
}

fn apply_1q(amps: &mut DVector<C64>, m: &Matrix2<C64>, mask: usize) {
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[(0, 0)] * a + m[(0, 1)] * b;
            amps[j] = m[(1, 0)] * a + m[(1, 1)] * b;
        }
    }
}

struct Objective {
    n: usize,
    pairs: Vec<(DVector<C64>, DVector<C64>)>,
}

impl Objective {
    /// Mean `|f_k|` and its gradient with respect to `U_m ← exp(iδ·σ/2) U_m`.
    fn eval(&self, us: &[Su2]) -> (f64, Vec<[f64; 3]>) {
        let sig = sigmas();
        let scale = 1.0 / self.pairs.len() as f64;
        let mut value = 0.0;
        let mut grad = vec![[0.0; 3]; self.n];
        for (source, target) in &self.pairs {
            let mut psi = source.clone();
            for (w, u) in us.iter().enumerate() {
                apply_1q(&mut psi, u.matrix(), wire_mask(w, self.n));
            }
            let f = target.dotc(&psi);
            let mag = f.norm();
            value += scale * mag;
            if mag < 1e-300 {
                continue;
            }
            for (w, g) in grad.iter_mut().enumerate() {
                for (a, s) in sig.iter().enumerate() {
                    let mut phi = psi.clone();
                    apply_1q(&mut phi, s, wire_mask(w, self.n));
                    let df = target.dotc(&phi) * c(0.0, 0.5);
                    g[a] += scale * (f.conj() * df).re / mag;
                }
            }
        }
        (value, grad)
    }

    /// Backtracking gradient ascent from `us`.
    fn ascend(&self, mut us: Vec<Su2>, iterations: usize) -> (f64, Vec<Su2>, usize) {
        let (mut value, mut grad) = self.eval(&us);
        let mut step = 1.0;
        let mut taken = 0;
        'outer: while taken < iterations {
            let g2: f64 = grad.iter().flatten().map(|x| x * x).sum();
            if g2.sqrt() < 1e-12 || value >= 1.0 - 1e-15 {
                break;
            }
            loop {
                let trial: Vec<Su2> = us
                    .iter()
                    .zip(&grad)
                    .map(|(u, g)| Su2::from_rotation_vector(g.map(|x| x * step)) * *u)
                    .collect();
                let (tv, tg) = self.eval(&trial);
                if tv >= value + 1e-4 * step * g2 {
                    us = trial;
                    value = tv;
                    grad = tg;
                    step = (step * 2.0).min(8.0);
                    break;
                }
                step *= 0.5;
                if step < 1e-14 {
                    break 'outer;
                }
            }
            taken += 1;
        }
        (value, us, taken)
    }
}

/// Searches for local unitaries, one per wire and common to every pair,
/// maximizing the mean of `|⟨target|(⊗U)|source⟩|`.
///
/// With several pairs this asks whether one network-independent local
/// operation relates each source to its target.
pub fn lu_equivalence_ensemble(pairs: &[(PureState, PureState)], opts: &LuOptions) -> Result<EquivalenceVerdict> {
    let Some(first) = pairs.first() else {
        return input("no state pairs given");
    };
    let n = first.0.n_qubits();
    if n == 0 {
        return input("states need at least one qubit");
    }
    if pairs.iter().any(|(s, t)| s.n_qubits() != n || t.n_qubits() != n) {
        return input("all states must have the same qubit count");
    }
    if opts.restarts == 0 {
        return input("at least one restart is required");
    }
    let objective = Objective {
        n,
        pairs: pairs
            .iter()
            .map(|(s, t)| (s.amplitudes().clone(), t.amplitudes().clone()))
            .collect(),
    };
    let runs: Vec<(f64, Vec<Su2>, usize)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                vec![Su2::identity(); n]
            } else {
                let mut rng = seeding::stream(opts.seed, r as u64);
                (0..n).map(|_| Su2::haar(&mut rng)).collect()
            };
            objective.ascend(start, opts.iterations)
        })
        .collect();
    let (value, unitaries, iterations) = runs
        .into_iter()
        .reduce(|best, run| if run.0 > best.0 { run } else { best })
        .expect("at least one restart");
    let max_fidelity = value.clamp(0.0, 1.0);
    Ok(EquivalenceVerdict {
        max_fidelity,
        verdict: if max_fidelity >= 1.0 - EQUIVALENCE_TOL {
            Verdict::Equivalent
        } else {
            Verdict::NotReached
        },
        restarts: opts.restarts,
        iterations,
        angles: unitaries.iter().map(Su2::log).collect(),
        unitaries,
    })
}

/// Whether `source` can be turned into `target` (up to phase) by one
/// SU(2) on each wire.
pub fn lu_equivalence(source: &PureState, target: &PureState, opts: &LuOptions) -> Result<EquivalenceVerdict> {
    lu_equivalence_ensemble(&[(source.clone(), target.clone())], opts)
}
