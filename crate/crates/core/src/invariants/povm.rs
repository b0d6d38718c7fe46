use std::fmt;

use crate::error::{input, Result};
use crate::qmath::{Operator, PureState, Su2, STRUCT_TOL};

/// Finite measurement: positive operators summing to the identity.
///
/// Post-measurement states use the Lüders instrument, `√E` as Kraus operator.
#[derive(Clone)]
pub struct Povm {
    labels: Vec<String>,
    elements: Vec<Operator>,
    kraus: Vec<Operator>,
}

impl Povm {
    pub fn new(items: Vec<(String, Operator)>) -> Result<Self> {
        let Some(first) = items.first() else {
            return input("a POVM needs at least one element");
        };
        let n = first.1.n_qubits();
        let mut sum = Operator::zeros(n);
        for (label, e) in &items {
            if e.n_qubits() != n {
                return input(format!("element {label} acts on a different register"));
            }
            if !e.is_hermitian(STRUCT_TOL) {
                return input(format!("element {label} is not Hermitian"));
            }
            if e.eigh().0.first().is_some_and(|&l| l < -1e-10) {
                return input(format!("element {label} is not positive semidefinite"));
            }
            sum = sum.add(e);
        }
        let dev = sum.max_diff(&Operator::identity(n));
        if dev > STRUCT_TOL {
            return input(format!("elements do not sum to the identity (deviation {dev:e})"));
        }
        let kraus = items.iter().map(|(_, e)| e.psd_sqrt()).collect();
        let (labels, elements) = items.into_iter().unzip();
        Ok(Self {
            labels,
            elements,
            kraus,
        })
    }

    /// Projective measurement in the standard basis, labels are bit strings.
    pub fn standard_basis(n: usize) -> Self {
        let items = (0..1usize << n)
            .map(|i| {
                let label = format!("{i:0n$b}");
                (label, PureState::basis(n, i).projector())
            })
            .collect();
        Self::new(items).expect("standard basis is complete")
    }

    /// Two-outcome test `{|ψ⟩⟨ψ|, I − |ψ⟩⟨ψ|}` labeled `pass` and `fail`.
    pub fn projective_test(psi: &PureState) -> Self {
        let p = psi.projector();
        let rest = complement(psi.n_qubits(), &[&p]);
        // Orthogonal projectors are their own Lüders square roots.
        let elements = vec![p, rest];
        Self {
            labels: vec!["pass".into(), "fail".into()],
            kraus: elements.clone(),
            elements,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.elements[0].n_qubits()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn element(&self, label: &str) -> Option<&Operator> {
        self.index_of(label).map(|i| &self.elements[i])
    }

    pub(crate) fn kraus(&self, i: usize) -> &Operator {
        &self.kraus[i]
    }

    /// Born probabilities on a state over exactly this POVM's register.
    pub fn probabilities(&self, psi: &PureState) -> Result<Vec<f64>> {
        self.elements
            .iter()
            .map(|e| Ok(psi.expectation(e)?.re))
            .collect()
    }

    /// Largest deviation from completeness.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .elements
            .iter()
            .fold(Operator::zeros(self.n_qubits()), |acc, e| acc.add(e));
        sum.max_diff(&Operator::identity(self.n_qubits()))
    }

    /// Most negative eigenvalue across all elements (0 if none negative).
    pub fn min_eigenvalue(&self) -> f64 {
        self.elements
            .iter()
            .filter_map(|e| e.eigh().0.first().copied())
            .fold(0.0, f64::min)
    }

    /// `max_E ‖[E, U^{⊗n}]‖_max`.
    pub fn collective_commutator(&self, u: &Su2) -> f64 {
        let un = Operator::tensor_power(u, self.n_qubits());
        self.elements
            .iter()
            .map(|e| e.commutator_norm(&un))
            .fold(0.0, f64::max)
    }

    /// The same measurement with every element conjugated, `W E W†`.
    pub fn conjugated(&self, w: &Operator) -> Self {
        let conj = |e: &Operator| w.compose(e).compose(&w.adjoint());
        Self {
            labels: self.labels.clone(),
            elements: self.elements.iter().map(conj).collect(),
            kraus: self.kraus.iter().map(conj).collect(),
        }
    }

    /// Labeled matrices, for documentation.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (l, e) in self.labels.iter().zip(&self.elements) {
            out.push_str(&format!("E[{l}] (rank {}):\n{e:?}", e.rank(1e-9)));
        }
        out
    }
}

impl fmt::Debug for Povm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Povm")
            .field("qubits", &self.n_qubits())
            .field("labels", &self.labels)
            .finish()
    }
}

/// Projector onto the span of orthonormal `states`.
pub(crate) fn span_projector(states: &[PureState]) -> Operator {
    let n = states[0].n_qubits();
    states
        .iter()
        .fold(Operator::zeros(n), |acc, s| acc.add(&s.projector()))
}

/// `I − Σ parts`.
pub(crate) fn complement(n: usize, parts: &[&Operator]) -> Operator {
    parts.iter().fold(Operator::identity(n), |acc, p| acc.sub(p))
}
