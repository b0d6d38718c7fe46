use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use super::pauli;
use crate::error::{input, Result};
use crate::qmath::{c, eigh_matrix, Operator, C64};

/// Eigenvalues closer than this belong to the same sector.
const CLUSTER_GAP: f64 = 1e-8;

/// Projector onto one `(J, λ)` block of `n` qubits.
#[derive(Clone, Debug, Serialize)]
pub struct IrrepProjector {
    pub n: usize,
    /// `2J`, so half-integer spins stay integral.
    pub two_j: usize,
    /// Copy index among blocks with the same `J`.
    pub lambda: usize,
    #[serde(skip)]
    pub projector: Operator,
}

impl IrrepProjector {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn label(&self) -> String {
        let j = if self.two_j.is_multiple_of(2) {
            format!("{}", self.two_j / 2)
        } else {
            format!("{}/2", self.two_j)
        };
        format!("J={j},lambda={}", self.lambda)
    }
}

/// `J² = Σ_a (Σ_{i∈wires} σ_a^{(i)}/2)²` on an `n`-qubit register.
pub(crate) fn casimir(wires: &[usize], n: usize) -> Operator {
    let mut total = Operator::zeros(n);
    for a in 1..=3 {
        let half = pauli(a).scale(c(0.5, 0.0));
        let ja = wires.iter().fold(Operator::zeros(n), |acc, &w| {
            acc.add(&Operator::embed(&half, &[w], n).expect("valid wire"))
        });
        total = total.add(&ja.compose(&ja));
    }
    total
}

/// Splits the column space of `basis` by the eigenvalues of `op`
/// restricted to it, ascending.
fn split(basis: &DMatrix<C64>, op: &Operator) -> Vec<(f64, DMatrix<C64>)> {
    let restricted = basis.adjoint() * op.matrix() * basis;
    let (vals, vecs) = eigh_matrix(&restricted);
    let mut out: Vec<(f64, DMatrix<C64>)> = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > CLUSTER_GAP {
            let cols = vecs.columns(start, i - start);
            out.push((vals[start], basis * cols));
            start = i;
        }
    }
    out
}

fn two_j_of(casimir_value: f64) -> usize {
    // J(J+1) = v  ⇒  2J = √(1+4v) − 1.
    ((1.0 + 4.0 * casimir_value).sqrt() - 1.0).round() as usize
}

/// Projectors onto every `(J, λ)` block of `n` qubits, `2 ≤ n ≤ 4`.
///
/// Sectors come from the spectrum of total `J²`. Copies of the same `J`
/// are told apart by sequential coupling, the eigenvalues of
/// `J²_{12}, J²_{123}, …` in ascending lexicographic order, and `λ`
/// counts them from 0. Output is ordered by `J`, then `λ`.
pub fn total_spin_projectors(n: usize) -> Result<Vec<IrrepProjector>> {
    static CACHE: [OnceLock<Vec<IrrepProjector>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(2..=4).contains(&n) {
        return input(format!("total-spin sectors are provided for 2 to 4 qubits, not {n}"));
    }
    Ok(CACHE[n - 2].get_or_init(|| build_projectors(n)).clone())
}

fn build_projectors(n: usize) -> Vec<IrrepProjector> {
    let all: Vec<usize> = (0..n).collect();
    let chain: Vec<Operator> = (2..n).map(|k| casimir(&all[..k], n)).collect();
    let identity = DMatrix::<C64>::identity(1 << n, 1 << n);
    let mut out = Vec::new();
    for (value, sector) in split(&identity, &casimir(&all, n)) {
        let two_j = two_j_of(value);
        let mut blocks = vec![sector];
        for op in &chain {
            blocks = blocks.iter().flat_map(|b| split(b, op).into_iter().map(|(_, v)| v)).collect();
        }
        for (lambda, v) in blocks.into_iter().enumerate() {
            out.push(IrrepProjector {
                n,
                two_j,
                lambda,
                projector: Operator::from_matrix_unchecked(&v * v.adjoint()),
            });
        }
    }
    out
}

/// Sum of all blocks with the given `2J`.
pub(crate) fn sector_sum(blocks: &[IrrepProjector], two_j: usize) -> Operator {
    let n = blocks[0].n;
    blocks
        .iter()
        .filter(|b| b.two_j == two_j)
        .fold(Operator::zeros(n), |acc, b| acc.add(&b.projector))
}
