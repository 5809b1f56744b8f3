//! Statevectors, density matrices and spin measurements.
//!
//! Qubit `i` of a `K`-qubit register is bit `K - 1 - i` of the basis index,
//! so the basis index read in binary left to right lists qubits `0..K`. A bit
//! value of 0 is spin projection `+1/2` along Z.
//!
//! A spin measured along direction `n` with outcome `m` is described by the
//! projector `P(n, m) = (I + 2m n·σ) / 2`. Measuring every qubit of a register
//! along its own direction projects onto a product state, so the joint
//! outcome probability is the squared overlap with that product state.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, vec_norm, CMatrix, C64, ONE, ZERO};

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 16;

/// Tolerance for normalization and unitarity checks.
pub const STATE_TOLERANCE: f64 = 1e-9;

pub(crate) type Gate2 = [[C64; 2]; 2];

fn check_qubits(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Domain(format!(
            "number of qubits must be in 1..={MAX_QUBITS}, got {num_qubits}"
        )));
    }
    Ok(())
}

/// Normalized pure state of `K` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// The computational basis state `|k⟩`.
    pub fn basis(k: usize, num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        if k >= dim {
            return Err(Error::Domain(format!(
                "basis index {k} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps an amplitude vector, which must have power-of-two length and unit norm.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Domain(format!(
                "amplitude vector length {dim} is not a power of two >= 2"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::Validation(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Haar-random state drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(num_qubits)?;
        let amps = (0..1usize << num_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_register(other.num_qubits)?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Probabilities of the Z-basis outcomes.
    pub fn z_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Returns `u · |self⟩`. `u` must be unitary within [`STATE_TOLERANCE`].
    pub fn apply_unitary(&self, u: &CMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::Domain(format!(
                "{}x{} matrix applied to a {}-dimensional state",
                u.dim(),
                u.dim(),
                self.dim()
            )));
        }
        let err = u.max_unitarity_error();
        if err > STATE_TOLERANCE {
            return Err(Error::Validation(format!(
                "matrix is not unitary (max |UU† - I| entry {err:e})"
            )));
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: u.mul_vec(&self.amplitudes)?,
        })
    }

    /// Measures every qubit along +Z and returns the basis index together
    /// with the collapsed state.
    pub fn measure_z<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, PureState) {
        let k = sample_index(self.amplitudes.iter().map(|a| a.norm_sqr()), rng);
        let collapsed = Self::basis(k, self.num_qubits).expect("index within register");
        (k, collapsed)
    }

    fn bit_stride(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - 1 - qubit)
    }

    /// In-place single-qubit gate. The caller guarantees `m` is unitary.
    pub(crate) fn apply_1q(&mut self, qubit: usize, m: &Gate2) {
        let stride = self.bit_stride(qubit);
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + stride];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    /// In-place CNOT, `|a, b⟩ → |a, a ⊕ b⟩`.
    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = self.bit_stride(control);
        let tmask = self.bit_stride(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    fn check_same_register(&self, num_qubits: usize) -> Result<()> {
        if num_qubits != self.num_qubits {
            return Err(Error::Domain(format!(
                "register size mismatch: {} vs {num_qubits} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }
}

/// `|k⟩` for a `K`-qubit register.
pub fn basis_state(k: usize, num_qubits: usize) -> Result<PureState> {
    PureState::basis(k, num_qubits)
}

/// `u |state⟩`; see [`PureState::apply_unitary`].
pub fn apply_unitary(state: &PureState, u: &CMatrix) -> Result<PureState> {
    state.apply_unitary(u)
}

pub(crate) fn sample_index<R, I>(weights: I, rng: &mut R) -> usize
where
    R: Rng + ?Sized,
    I: IntoIterator<Item = f64>,
{
    let weights: Vec<f64> = weights.into_iter().collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last_nonzero = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_nonzero = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    // Rounding in the running subtraction can leave u marginally positive.
    last_nonzero
}

/// Spin projection along a measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    /// `m = +1/2`; bit value 0 along Z.
    Up,
    /// `m = -1/2`; bit value 1 along Z.
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn m(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Spin::Down
        } else {
            Spin::Up
        }
    }

    pub fn bit(self) -> bool {
        self == Spin::Down
    }
}

/// Measurement axis given by polar angle `theta ∈ [0, π]` and azimuth `phi ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinDirection {
    theta: f64,
    phi: f64,
}

impl SpinDirection {
    pub const PLUS_Z: Self = Self { theta: 0.0, phi: 0.0 };
    pub const MINUS_Z: Self = Self { theta: PI, phi: 0.0 };
    pub const PLUS_X: Self = Self {
        theta: PI / 2.0,
        phi: 0.0,
    };
    pub const PLUS_Y: Self = Self {
        theta: PI / 2.0,
        phi: PI / 2.0,
    };

    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(Error::Domain(format!(
                "direction angles out of range: theta={theta}, phi={phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Direction of a Cartesian vector, which must have unit length within 1e-12.
    pub fn from_vector(n: [f64; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !len.is_finite() || (len - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("direction vector has length {len}, not 1")));
        }
        let theta = n[2].clamp(-1.0, 1.0).acos();
        let mut phi = n[1].atan2(n[0]);
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    /// Uniform on the sphere: `cos θ` uniform in `[-1, 1]`, `φ` uniform in `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let cos_theta: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..TAU);
        Self {
            theta: cos_theta.acos(),
            phi,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Eigenvector of `n·σ` with eigenvalue `2m`.
    pub fn eigenvector(&self, spin: Spin) -> [C64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let phase = C64::from_polar(1.0, self.phi);
        match spin {
            Spin::Up => [C64::new(c, 0.0), phase * s],
            Spin::Down => [C64::new(s, 0.0), -phase * c],
        }
    }

    /// `P(n, m) = (I + 2m n·σ) / 2`.
    pub fn projector(&self, spin: Spin) -> CMatrix {
        let [x, y, z] = self.unit_vector();
        let s = 2.0 * spin.m();
        let rows = [
            vec![C64::new((1.0 + s * z) / 2.0, 0.0), C64::new(s * x / 2.0, -s * y / 2.0)],
            vec![C64::new(s * x / 2.0, s * y / 2.0), C64::new((1.0 - s * z) / 2.0, 0.0)],
        ];
        CMatrix::from_rows(&rows).expect("2x2")
    }
}

/// One joint spin measurement: an axis and an outcome per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    directions: Vec<SpinDirection>,
    outcomes: Vec<Spin>,
}

impl OutcomeRecord {
    pub fn new(directions: Vec<SpinDirection>, outcomes: Vec<Spin>) -> Result<Self> {
        if directions.len() != outcomes.len() || directions.is_empty() {
            return Err(Error::Domain(format!(
                "outcome record needs one outcome per direction ({} directions, {} outcomes)",
                directions.len(),
                outcomes.len()
            )));
        }
        Ok(Self {
            directions,
            outcomes,
        })
    }

    pub fn directions(&self) -> &[SpinDirection] {
        &self.directions
    }

    pub fn outcomes(&self) -> &[Spin] {
        &self.outcomes
    }

    pub fn num_qubits(&self) -> usize {
        self.directions.len()
    }

    /// Outcomes packed into an index, qubit 0 most significant, `Down` = 1.
    pub fn outcome_index(&self) -> usize {
        self.outcomes
            .iter()
            .fold(0, |acc, s| (acc << 1) | usize::from(s.bit()))
    }
}

/// Product state `⊗_i |n_i, m_i⟩`.
fn product_state(directions: &[SpinDirection], outcomes: &[Spin]) -> Vec<C64> {
    let mut amps = vec![ONE];
    for (dir, &spin) in directions.iter().zip(outcomes) {
        let e = dir.eigenvector(spin);
        amps = amps
            .iter()
            .flat_map(|&a| [a * e[0], a * e[1]])
            .collect();
    }
    amps
}

/// Amplitudes of `state` in the product basis defined by `directions`:
/// entry `j` is `⟨φ_j|Ψ⟩` where the bits of `j` select the outcome per qubit.
fn rotated_amplitudes(state: &PureState, directions: &[SpinDirection]) -> PureState {
    let mut rotated = state.clone();
    for (q, dir) in directions.iter().enumerate() {
        let up = dir.eigenvector(Spin::Up);
        let down = dir.eigenvector(Spin::Down);
        let bra = [[up[0].conj(), up[1].conj()], [down[0].conj(), down[1].conj()]];
        rotated.apply_1q(q, &bra);
    }
    rotated
}

/// `⟨Ψ| ⊗_i P(n_i, m_i) |Ψ⟩`.
pub fn outcome_probability(state: &PureState, record: &OutcomeRecord) -> Result<f64> {
    state.check_same_register(record.num_qubits())?;
    let phi = product_state(&record.directions, &record.outcomes);
    Ok(inner(&phi, state.amplitudes()).norm_sqr())
}

/// Measures each qubit along its direction. Returns the outcomes and the
/// normalized post-measurement state `P|Ψ⟩ / ‖P|Ψ⟩‖`.
pub fn measure_spins<R: Rng + ?Sized>(
    state: &PureState,
    directions: &[SpinDirection],
    rng: &mut R,
) -> Result<(OutcomeRecord, PureState)> {
    state.check_same_register(directions.len())?;
    let rotated = rotated_amplitudes(state, directions);
    let j = sample_index(rotated.amplitudes.iter().map(|a| a.norm_sqr()), rng);
    let k = state.num_qubits;
    let outcomes: Vec<Spin> = (0..k)
        .map(|q| Spin::from_bit(j >> (k - 1 - q) & 1 == 1))
        .collect();
    let overlap = rotated.amplitudes[j];
    // A branch is only sampled when its weight is positive.
    let phase = overlap / overlap.norm();
    let collapsed = product_state(directions, &outcomes)
        .into_iter()
        .map(|a| a * phase)
        .collect();
    let collapsed = PureState::normalized(collapsed)?;
    Ok((OutcomeRecord::new(directions.to_vec(), outcomes)?, collapsed))
}

/// Density matrix of `K` qubits. Raw tomographic reconstructions are allowed
/// to be non-physical, so only the shape is enforced on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        let dim = entries.dim();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Domain(format!(
                "density matrix dimension {dim} is not a power of two >= 2"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        Ok(Self {
            num_qubits,
            entries,
        })
    }

    /// `|Ψ⟩⟨Ψ|`.
    pub fn from_pure(state: &PureState) -> Self {
        let a = state.amplitudes();
        let n = a.len();
        let mut m = CMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = a[r] * a[c].conj();
            }
        }
        Self {
            num_qubits: state.num_qubits,
            entries: m,
        }
    }

    /// The maximally mixed state `I / 2^K`.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        Self::from_matrix(CMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.entries.max_hermitian_error() <= tol
    }

    /// `(ρ + ρ†) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            entries: self.entries.hermitian_part(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.frobenius_norm()
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.entries.sub(&other.entries)?.frobenius_norm())
    }
}

/// `√(Σ_ij |a − b|²_ij)`.
pub fn frobenius_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    a.frobenius_distance(b)
}

/// `√(Σ_ij |a|²_ij)`.
pub fn frobenius_norm(a: &DensityMatrix) -> f64 {
    a.frobenius_norm()
}

/// `|Ψ⟩⟨Ψ|`.
pub fn density_from_pure(state: &PureState) -> DensityMatrix {
    DensityMatrix::from_pure(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hadamard() -> CMatrix {
        let s = FRAC_1_SQRT_2;
        CMatrix::from_rows(&[vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]).unwrap()
    }

    #[test]
    fn basis_states() {
        assert_eq!(PureState::basis(0, 2).unwrap().amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
        let s = PureState::basis(2, 2).unwrap();
        assert_eq!(s.amplitudes()[2], ONE);
        assert_eq!(s.norm(), 1.0);
        assert_eq!(PureState::basis(5, 3).unwrap().amplitudes()[5], ONE);
        assert!(matches!(PureState::basis(4, 2), Err(Error::Domain(_))));
        assert!(PureState::basis(0, 0).is_err());
        assert!(PureState::basis(0, MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // |k=2⟩ at K=2 is qubit0 = 1, qubit1 = 0: an X on qubit 0 maps |0⟩ to it.
        let mut s = PureState::basis(0, 2).unwrap();
        s.apply_1q(0, &[[ZERO, ONE], [ONE, ZERO]]);
        assert_eq!(s, PureState::basis(2, 2).unwrap());
        // CNOT(0 -> 1) maps |10⟩ to |11⟩.
        s.apply_cnot(0, 1);
        assert_eq!(s, PureState::basis(3, 2).unwrap());
    }

    #[test]
    fn apply_unitary_examples() {
        let zero = PureState::basis(0, 1).unwrap();
        assert_eq!(zero.apply_unitary(&CMatrix::identity(2)).unwrap(), zero);
        let plus = zero.apply_unitary(&hadamard()).unwrap();
        for a in plus.amplitudes() {
            assert!((a - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
        assert!(matches!(
            zero.apply_unitary(&hadamard().scale(1.1)),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            zero.apply_unitary(&CMatrix::identity(4)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn from_amplitudes_rejects_bad_input() {
        assert!(PureState::from_amplitudes(vec![ONE, ONE]).is_err());
        assert!(PureState::from_amplitudes(vec![ONE, ZERO, ZERO]).is_err());
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn eigenstate_measurements_are_certain() {
        let zero = PureState::basis(0, 1).unwrap();
        let up = OutcomeRecord::new(vec![SpinDirection::PLUS_Z], vec![Spin::Up]).unwrap();
        let down = OutcomeRecord::new(vec![SpinDirection::PLUS_Z], vec![Spin::Down]).unwrap();
        assert!((outcome_probability(&zero, &up).unwrap() - 1.0).abs() < 1e-15);
        assert!(outcome_probability(&zero, &down).unwrap().abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (rec, collapsed) = measure_spins(&zero, &[SpinDirection::PLUS_Z], &mut rng).unwrap();
            assert_eq!(rec.outcomes(), &[Spin::Up]);
            assert!((collapsed.fidelity(&zero).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn x_measurement_of_zero_is_unbiased() {
        let zero = PureState::basis(0, 1).unwrap();
        for spin in Spin::BOTH {
            let rec = OutcomeRecord::new(vec![SpinDirection::PLUS_X], vec![spin]).unwrap();
            assert!((outcome_probability(&zero, &rec).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_matches_eigenvector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let dir = SpinDirection::random(&mut rng);
            for spin in Spin::BOTH {
                let e = dir.eigenvector(spin);
                let p = dir.projector(spin);
                for r in 0..2 {
                    for col in 0..2 {
                        assert!((p[(r, col)] - e[r] * e[col].conj()).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn from_vector_requires_unit_length() {
        let d = SpinDirection::from_vector([1.0, 0.0, 0.0]).unwrap();
        assert!((d.theta() - PI / 2.0).abs() < 1e-15);
        let d = SpinDirection::from_vector([0.0, -1.0, 0.0]).unwrap();
        assert!((d.phi() - 1.5 * PI).abs() < 1e-12);
        assert!(matches!(
            SpinDirection::from_vector([1.0, 1.0, 0.0]),
            Err(Error::Domain(_))
        ));
        assert!(SpinDirection::new(4.0, 0.0).is_err());
        assert!(SpinDirection::new(0.0, TAU).is_err());
    }

    #[test]
    fn record_length_mismatch() {
        assert!(OutcomeRecord::new(vec![SpinDirection::PLUS_Z], vec![]).is_err());
        let zero = PureState::basis(0, 2).unwrap();
        let rec = OutcomeRecord::new(vec![SpinDirection::PLUS_Z], vec![Spin::Up]).unwrap();
        assert!(matches!(outcome_probability(&zero, &rec), Err(Error::Domain(_))));
    }

    #[test]
    fn density_basics() {
        let zero = DensityMatrix::from_pure(&PureState::basis(0, 1).unwrap());
        let one = DensityMatrix::from_pure(&PureState::basis(1, 1).unwrap());
        assert_eq!(zero.frobenius_distance(&zero).unwrap(), 0.0);
        assert!((zero.frobenius_distance(&one).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(zero.frobenius_norm(), 1.0);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((mixed.frobenius_norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        let plus = PureState::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        let rho = density_from_pure(&plus);
        for v in rho.entries().as_slice() {
            assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        }
        let two_qubit = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(zero.frobenius_distance(&two_qubit), Err(Error::Domain(_))));
    }
}
