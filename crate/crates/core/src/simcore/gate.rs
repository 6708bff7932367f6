use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Gate vocabulary shared by both neuron designs and the hardware basis.
///
/// Angles are in radians. `Measure` and `Reset` are non-unitary markers and
/// only the shot executor understands them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Gate {
    X { qubit: usize },
    Sx { qubit: usize },
    Id { qubit: usize },
    Rz { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    Cry { control: usize, target: usize, angle: f64 },
    Cy { control: usize, target: usize },
    Swap { a: usize, b: usize },
    Measure { qubit: usize, cbit: usize },
    Reset { qubit: usize },
}

/// How a unitary gate acts locally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateAction {
    Single { qubit: usize, matrix: Mat2 },
    Controlled { control: usize, target: usize, matrix: Mat2 },
    Swap { a: usize, b: usize },
}

pub fn ry_matrix(angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    [[ONE * c, ONE * -s], [ONE * s, ONE * c]]
}

pub fn rz_matrix(angle: f64) -> Mat2 {
    let half = angle / 2.0;
    [[Complex64::from_polar(1.0, -half), ZERO], [ZERO, Complex64::from_polar(1.0, half)]]
}

pub fn x_matrix() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn y_matrix() -> Mat2 {
    let i = Complex64::new(0.0, 1.0);
    [[ZERO, -i], [i, ZERO]]
}

pub fn z_matrix() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn sx_matrix() -> Mat2 {
    let p = Complex64::new(0.5, 0.5);
    let m = Complex64::new(0.5, -0.5);
    [[p, m], [m, p]]
}

pub fn identity_matrix() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

impl Gate {
    pub fn x(qubit: usize) -> Self {
        Gate::X { qubit }
    }
    pub fn sx(qubit: usize) -> Self {
        Gate::Sx { qubit }
    }
    pub fn id(qubit: usize) -> Self {
        Gate::Id { qubit }
    }
    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rz { qubit, angle }
    }
    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }
    pub fn cry(control: usize, target: usize, angle: f64) -> Self {
        Gate::Cry { control, target, angle }
    }
    pub fn cy(control: usize, target: usize) -> Self {
        Gate::Cy { control, target }
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate::Swap { a, b }
    }
    pub fn measure(qubit: usize, cbit: usize) -> Self {
        Gate::Measure { qubit, cbit }
    }
    pub fn reset(qubit: usize) -> Self {
        Gate::Reset { qubit }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X { .. } => "x",
            Gate::Sx { .. } => "sx",
            Gate::Id { .. } => "id",
            Gate::Rz { .. } => "rz",
            Gate::Ry { .. } => "ry",
            Gate::Cnot { .. } => "cx",
            Gate::Cry { .. } => "cry",
            Gate::Cy { .. } => "cy",
            Gate::Swap { .. } => "swap",
            Gate::Measure { .. } => "measure",
            Gate::Reset { .. } => "reset",
        }
    }

    /// Qubits touched, in (control, target) order for two-qubit gates.
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::X { qubit }
            | Gate::Sx { qubit }
            | Gate::Id { qubit }
            | Gate::Rz { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Measure { qubit, .. }
            | Gate::Reset { qubit } => ([qubit, qubit], 1),
            Gate::Cnot { control, target } | Gate::Cry { control, target, .. } | Gate::Cy { control, target } => {
                ([control, target], 2)
            }
            Gate::Swap { a, b } => ([a, b], 2),
        }
    }

    pub fn qubit_list(&self) -> Vec<usize> {
        let (q, k) = self.qubits();
        q[..k].to_vec()
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Measure { .. } | Gate::Reset { .. })
    }

    pub fn arity(&self) -> usize {
        self.qubits().1
    }

    /// Checks index ranges, distinct operands and finite angles.
    pub fn validate(&self, qubit_count: usize, cbit_count: usize) -> Result<()> {
        let (q, k) = self.qubits();
        for &qi in &q[..k] {
            if qi >= qubit_count {
                return Err(contract(format!("{self} references qubit {qi} but the circuit has {qubit_count}")));
            }
        }
        if k == 2 && q[0] == q[1] {
            return Err(contract(format!("{self} acts twice on qubit {}", q[0])));
        }
        match *self {
            Gate::Rz { angle, .. } | Gate::Ry { angle, .. } | Gate::Cry { angle, .. } if !angle.is_finite() => {
                Err(contract(format!("{self} has a non-finite angle")))
            }
            Gate::Measure { cbit, .. } if cbit >= cbit_count => {
                Err(contract(format!("{self} writes cbit {cbit} but the circuit has {cbit_count}")))
            }
            _ => Ok(()),
        }
    }

    /// Local action of a unitary gate; `None` for measure and reset.
    pub fn action(&self) -> Option<GateAction> {
        Some(match *self {
            Gate::X { qubit } => GateAction::Single { qubit, matrix: x_matrix() },
            Gate::Sx { qubit } => GateAction::Single { qubit, matrix: sx_matrix() },
            Gate::Id { qubit } => GateAction::Single { qubit, matrix: identity_matrix() },
            Gate::Rz { qubit, angle } => GateAction::Single { qubit, matrix: rz_matrix(angle) },
            Gate::Ry { qubit, angle } => GateAction::Single { qubit, matrix: ry_matrix(angle) },
            Gate::Cnot { control, target } => GateAction::Controlled { control, target, matrix: x_matrix() },
            Gate::Cry { control, target, angle } => {
                GateAction::Controlled { control, target, matrix: ry_matrix(angle) }
            }
            Gate::Cy { control, target } => GateAction::Controlled { control, target, matrix: y_matrix() },
            Gate::Swap { a, b } => GateAction::Swap { a, b },
            Gate::Measure { .. } | Gate::Reset { .. } => return None,
        })
    }

    /// The same gate with every qubit index passed through `f`.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::X { qubit } => Gate::X { qubit: f(qubit) },
            Gate::Sx { qubit } => Gate::Sx { qubit: f(qubit) },
            Gate::Id { qubit } => Gate::Id { qubit: f(qubit) },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: f(qubit), angle },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit: f(qubit), angle },
            Gate::Cnot { control, target } => Gate::Cnot { control: f(control), target: f(target) },
            Gate::Cry { control, target, angle } => Gate::Cry { control: f(control), target: f(target), angle },
            Gate::Cy { control, target } => Gate::Cy { control: f(control), target: f(target) },
            Gate::Swap { a, b } => Gate::Swap { a: f(a), b: f(b) },
            Gate::Measure { qubit, cbit } => Gate::Measure { qubit: f(qubit), cbit },
            Gate::Reset { qubit } => Gate::Reset { qubit: f(qubit) },
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rz { qubit, angle } | Gate::Ry { qubit, angle } => {
                write!(f, "{}({angle}) q{qubit}", self.name())
            }
            Gate::Cry { control, target, angle } => write!(f, "cry({angle}) q{control}, q{target}"),
            Gate::Measure { qubit, cbit } => write!(f, "measure q{qubit} -> c{cbit}"),
            _ => {
                let (q, k) = self.qubits();
                match k {
                    1 => write!(f, "{} q{}", self.name(), q[0]),
                    _ => write!(f, "{} q{}, q{}", self.name(), q[0], q[1]),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_operands() {
        assert!(Gate::cnot(1, 1).validate(2, 0).is_err());
        assert!(Gate::swap(0, 0).validate(2, 0).is_err());
        assert!(Gate::ry(2, 0.1).validate(2, 0).is_err());
        assert!(Gate::ry(0, f64::NAN).validate(1, 0).is_err());
        assert!(Gate::measure(0, 1).validate(1, 1).is_err());
        assert!(Gate::cry(0, 1, PI).validate(2, 0).is_ok());
    }

    #[test]
    fn sx_squares_to_x() {
        let s = sx_matrix();
        let mut sq = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                sq[i][j] = s[i][0] * s[0][j] + s[i][1] * s[1][j];
            }
        }
        assert_eq!(sq, x_matrix());
    }

    #[test]
    fn serde_shape() {
        let g = Gate::cry(0, 3, 0.5);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"op":"cry","control":0,"target":3,"angle":0.5}"#);
        assert_eq!(serde_json::from_str::<Gate>(&s).unwrap(), g);
    }
}
