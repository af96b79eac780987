//! Gates, the GHZ-like preparation circuit, the excited state family
//! supported on `|01>, |10>`, and the dissipative cascade
//! `|11> -> rho' -> |00>`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::qmat::{c, re, ComplexMatrix, DensityMatrix, Dim, C64, ALGEBRAIC_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    /// `diag(1, e^{i phi})`.
    U1(f64),
    /// Qubit 0 controls qubit 1.
    Cnot,
}

impl Gate {
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        gate(self)
    }
}

/// Unitary matrix of a gate; `Cnot` is 4x4, everything else 2x2.
pub fn gate(g: &Gate) -> Result<ComplexMatrix> {
    let o = re(0.0);
    let l = re(1.0);
    let rows: Vec<Vec<C64>> = match *g {
        Gate::H => {
            let h = re(FRAC_1_SQRT_2);
            vec![vec![h, h], vec![h, -h]]
        }
        Gate::X => vec![vec![o, l], vec![l, o]],
        Gate::Y => vec![vec![o, c(0.0, -1.0)], vec![c(0.0, 1.0), o]],
        Gate::Z => vec![vec![l, o], vec![o, -l]],
        Gate::S => vec![vec![l, o], vec![o, c(0.0, 1.0)]],
        Gate::Sdg => vec![vec![l, o], vec![o, c(0.0, -1.0)]],
        Gate::U1(phi) => {
            if !phi.is_finite() {
                return Err(invalid(format!("U1 angle must be finite, got {phi}")));
            }
            vec![vec![l, o], vec![o, C64::from_polar(1.0, phi)]]
        }
        Gate::Cnot => vec![
            vec![l, o, o, o],
            vec![o, l, o, o],
            vec![o, o, o, l],
            vec![o, o, l, o],
        ],
    };
    ComplexMatrix::from_rows(&rows)
}

impl FromStr for Gate {
    type Err = Error;

    /// Accepts `h, x, y, z, s, sdg, cnot` and `u1(<radians>)`, case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let g = match lower.as_str() {
            "h" => Gate::H,
            "x" => Gate::X,
            "y" => Gate::Y,
            "z" => Gate::Z,
            "s" => Gate::S,
            "sdg" => Gate::Sdg,
            "cnot" | "cx" => Gate::Cnot,
            other => {
                let arg = other
                    .strip_prefix("u1(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .ok_or_else(|| invalid(format!("unknown gate '{s}'")))?;
                let phi: f64 = arg
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("bad U1 angle in '{s}'")))?;
                Gate::U1(phi)
            }
        };
        if let Gate::U1(phi) = g {
            if !phi.is_finite() {
                return Err(invalid(format!("U1 angle must be finite, got {phi}")));
            }
        }
        Ok(g)
    }
}

/// `A|00> + B|01> + C|10> + D|11>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitPureState {
    amps: [C64; 4],
}

impl TwoQubitPureState {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        Self::from_amplitudes([a, b, c, d])
    }

    pub fn from_amplitudes(amps: [C64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > ALGEBRAIC_TOLERANCE {
            return Err(Error::NotAState(format!(
                "amplitudes have squared norm {norm}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    pub fn ground() -> Self {
        Self {
            amps: [re(1.0), re(0.0), re(0.0), re(0.0)],
        }
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        self.amps
    }

    /// Applies a 4x4 unitary. Unitarity is not checked; the result is
    /// re-normalization-checked.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != Dim::Four {
            return Err(invalid("two-qubit state needs a 4x4 operator"));
        }
        let mut out = [re(0.0); 4];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (0..4).map(|j| u[(i, j)] * self.amps[j]).sum();
        }
        Self::from_amplitudes(out)
    }

    /// Applies a single-qubit gate to `target`, or CNOT to the pair.
    pub fn apply_gate(&self, g: &Gate, target: usize) -> Result<Self> {
        let m = gate(g)?;
        let full = match m.dim() {
            Dim::Four => m,
            Dim::Two => ComplexMatrix::embed(&m, target)?,
        };
        self.apply(&full)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amps).expect("normalized by construction")
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for TwoQubitPureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = ["00", "01", "10", "11"];
        let mut first = true;
        for (z, l) in self.amps.iter().zip(labels) {
            if z.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({:.4}{:+.4}i)|{l}>", z.re, z.im)?;
            first = false;
        }
        Ok(())
    }
}

/// Runs `H(q0) -> U1(phi)(q0) -> CNOT(q0 -> q1)` on `|00>`.
pub fn prepare_ghz_like(phi: f64) -> Result<TwoQubitPureState> {
    TwoQubitPureState::ground()
        .apply_gate(&Gate::H, 0)?
        .apply_gate(&Gate::U1(phi), 0)?
        .apply_gate(&Gate::Cnot, 0)
}

/// `(|00> + e^{i phi}|11>)/sqrt(2)` written out directly.
pub fn ghz_closed_form(phi: f64) -> TwoQubitPureState {
    let h = FRAC_1_SQRT_2;
    TwoQubitPureState {
        amps: [re(h), re(0.0), re(0.0), C64::from_polar(h, phi)],
    }
}

/// Density matrix of the GHZ-like state.
pub fn ghz_density(phi: f64) -> Result<DensityMatrix> {
    Ok(prepare_ghz_like(phi)?.to_density())
}

/// U1 on qubit 0 of an arbitrary prepared state:
/// `(A, B, C, D) -> (A, B, C e^{i phi}, D e^{i phi})`.
pub fn apply_u1_phase(state: &TwoQubitPureState, phi: f64) -> Result<TwoQubitPureState> {
    state.apply_gate(&Gate::U1(phi), 0)
}

/// Parameters of the excited state supported on `|01>, |10>`: population `a`
/// on `|01>`, coherence `r e^{-i theta}` in the `<01|rho|10>` slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoPrimeParams {
    pub a: f64,
    pub r: f64,
    pub theta: f64,
}

impl RhoPrimeParams {
    pub fn new(a: f64, r: f64, theta: f64) -> Result<Self> {
        let p = Self { a, r, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, r, theta } = *self;
        if !(a.is_finite() && r.is_finite() && theta.is_finite()) {
            return Err(invalid("rho' parameters must be finite"));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(invalid(format!("population a = {a} outside [0, 1]")));
        }
        if r < 0.0 {
            return Err(invalid(format!("coherence magnitude r = {r} is negative")));
        }
        if r * r > a * (1.0 - a) + ALGEBRAIC_TOLERANCE {
            return Err(Error::NotAState(format!(
                "r^2 = {} exceeds a(1-a) = {}",
                r * r,
                a * (1.0 - a)
            )));
        }
        Ok(())
    }
}

pub fn build_rho_prime(p: &RhoPrimeParams) -> Result<DensityMatrix> {
    p.validate()?;
    let mut m = ComplexMatrix::zeros(Dim::Four);
    m[(1, 1)] = re(p.a);
    m[(2, 2)] = re(1.0 - p.a);
    m[(1, 2)] = C64::from_polar(p.r, -p.theta);
    m[(2, 1)] = C64::from_polar(p.r, p.theta);
    DensityMatrix::new(m)
}

/// Dimensionless decay products `gamma_0 t` (rho' -> |00>) and
/// `gamma_1 t` (|11> -> rho').
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationParams {
    pub gamma0_t: f64,
    pub gamma1_t: f64,
}

impl DissipationParams {
    pub fn new(gamma0_t: f64, gamma1_t: f64) -> Result<Self> {
        let p = Self { gamma0_t, gamma1_t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma0_t", self.gamma0_t), ("gamma1_t", self.gamma1_t)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// Populations `(c1, c2, c3)` of GHZ, rho' and `|00>` under two-step
    /// sequential decay.
    pub fn populations(&self) -> (f64, f64, f64) {
        let (x0, x1) = (self.gamma0_t, self.gamma1_t);
        let c1 = (-x1).exp();
        // x1/(x1-x0) (e^{-x0} - e^{-x1}) = x1 e^{-min} (1 - e^{-gap}) / gap
        let gap = (x1 - x0).abs();
        let ratio = if gap < 1e-8 {
            1.0 - 0.5 * gap
        } else {
            -(-gap).exp_m1() / gap
        };
        let c2 = (x1 * (-x0.min(x1)).exp() * ratio).clamp(0.0, 1.0 - c1);
        let c3 = (1.0 - c1 - c2).max(0.0);
        (c1, c2, c3)
    }
}

/// `c1 rho_GHZ(phi) + c2 rho'(1/2, 1/2, phi) + c3 |00><00|`.
pub fn dissipative_mixture(phi: f64, d: &DissipationParams) -> Result<DensityMatrix> {
    d.validate()?;
    let (c1, c2, c3) = d.populations();
    let ghz = ghz_density(phi)?;
    let excited = build_rho_prime(&RhoPrimeParams::new(0.5, 0.5, phi)?)?;
    let ground = DensityMatrix::basis(0)?;
    DensityMatrix::mixture(&[(c1, &ghz), (c2, &excited), (c3, &ground)])
}
