//! Elementary gate libraries and secret network keys.
//!
//! A [`NetworkKey`] is a sequence of gate ids from a [`GateLibrary`], applied
//! first to last. Alice and Bob share the key; the network it names is
//! applied to statevectors gate by gate without ever forming the full
//! `2^K × 2^K` matrix.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::qstate::{Gate2, PureState};

/// Largest register for which [`network_to_matrix`] builds a dense matrix.
pub const MATRIX_QUBIT_CAP: usize = 12;

const GATE_TOLERANCE: f64 = 1e-12;

/// What a library gate does.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Single {
        target: usize,
        matrix: Gate2,
        label: String,
    },
    /// `|a, b⟩ → |a, a ⊕ b⟩` with `a` on `control`.
    Cnot { control: usize, target: usize },
}

impl GateKind {
    pub fn label(&self) -> String {
        match self {
            GateKind::Single { label, .. } => label.clone(),
            GateKind::Cnot { control, target } => format!("CNOT{control},{target}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub id: usize,
    pub kind: GateKind,
    pub inverse_id: usize,
}

impl GateSpec {
    fn apply(&self, state: &mut PureState) {
        match &self.kind {
            GateKind::Single { target, matrix, .. } => state.apply_1q(*target, matrix),
            GateKind::Cnot { control, target } => state.apply_cnot(*control, *target),
        }
    }
}

/// The `L` elementary gates both parties' devices can run.
#[derive(Debug, Clone, PartialEq)]
pub struct GateLibrary {
    num_qubits: usize,
    gates: Vec<GateSpec>,
    fingerprint: u64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn gate_product(a: &Gate2, b: &Gate2) -> Gate2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (col, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][col] + a[r][1] * b[1][col];
        }
    }
    out
}

fn gate_adjoint(a: &Gate2) -> Gate2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn is_identity(a: &Gate2, tol: f64) -> bool {
    (a[0][0] - ONE).norm() <= tol
        && (a[1][1] - ONE).norm() <= tol
        && a[0][1].norm() <= tol
        && a[1][0].norm() <= tol
}

impl GateLibrary {
    /// Builds a library, checking ids, qubit indices, unitarity, and that
    /// `inverse_id` is a bijection whose gates undo each other.
    pub fn new(num_qubits: usize, gates: Vec<GateSpec>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > crate::qstate::MAX_QUBITS {
            return Err(Error::Domain(format!("unsupported register size {num_qubits}")));
        }
        let len = gates.len();
        if len == 0 || len > u16::MAX as usize {
            return Err(Error::Validation(format!("library size {len} outside 1..=65535")));
        }
        for (i, g) in gates.iter().enumerate() {
            if g.id != i {
                return Err(Error::Validation(format!("gate at position {i} has id {}", g.id)));
            }
            if g.inverse_id >= len {
                return Err(Error::Validation(format!("gate {i} names inverse {} >= L", g.inverse_id)));
            }
            match &g.kind {
                GateKind::Single { target, matrix, .. } => {
                    if *target >= num_qubits {
                        return Err(Error::Validation(format!("gate {i} targets qubit {target}")));
                    }
                    if !is_identity(&gate_product(&gate_adjoint(matrix), matrix), GATE_TOLERANCE) {
                        return Err(Error::Validation(format!("gate {i} is not unitary")));
                    }
                }
                GateKind::Cnot { control, target } => {
                    if *control >= num_qubits || *target >= num_qubits || control == target {
                        return Err(Error::Validation(format!(
                            "gate {i} has invalid CNOT qubits ({control}, {target})"
                        )));
                    }
                }
            }
        }
        for g in &gates {
            let inv = &gates[g.inverse_id];
            if inv.inverse_id != g.id {
                return Err(Error::Validation(format!(
                    "inverse map is not an involution at gate {}",
                    g.id
                )));
            }
            let undoes = match (&g.kind, &inv.kind) {
                (
                    GateKind::Single { target: t1, matrix: m1, .. },
                    GateKind::Single { target: t2, matrix: m2, .. },
                ) => t1 == t2 && is_identity(&gate_product(m2, m1), 1e-9),
                (
                    GateKind::Cnot { control: c1, target: t1 },
                    GateKind::Cnot { control: c2, target: t2 },
                ) => c1 == c2 && t1 == t2,
                _ => false,
            };
            if !undoes {
                return Err(Error::Validation(format!(
                    "gate {} is not undone by its inverse {}",
                    g.id, g.inverse_id
                )));
            }
        }
        let fingerprint = fingerprint(num_qubits, &gates);
        Ok(Self {
            num_qubits,
            gates,
            fingerprint,
        })
    }

    /// Clifford+T per qubit (H, S, S†, T, T†, X, Z) followed by CNOT on every
    /// ordered qubit pair: `L = 7K + K(K − 1)`.
    pub fn default_for(num_qubits: usize) -> Result<Self> {
        let s = FRAC_1_SQRT_2;
        let t = C64::from_polar(1.0, FRAC_PI_4);
        let singles: [(&str, Gate2, usize); 7] = [
            ("H", [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]], 0),
            ("S", [[ONE, ZERO], [ZERO, c(0.0, 1.0)]], 2),
            ("Sdg", [[ONE, ZERO], [ZERO, c(0.0, -1.0)]], 1),
            ("T", [[ONE, ZERO], [ZERO, t]], 4),
            ("Tdg", [[ONE, ZERO], [ZERO, t.conj()]], 3),
            ("X", [[ZERO, ONE], [ONE, ZERO]], 5),
            ("Z", [[ONE, ZERO], [ZERO, -ONE]], 6),
        ];
        let mut gates = Vec::new();
        for q in 0..num_qubits {
            for (name, matrix, inv) in &singles {
                let id = gates.len();
                gates.push(GateSpec {
                    id,
                    kind: GateKind::Single {
                        target: q,
                        matrix: *matrix,
                        label: format!("{name}{q}"),
                    },
                    inverse_id: 7 * q + inv,
                });
            }
        }
        for control in 0..num_qubits {
            for target in (0..num_qubits).filter(|&t| t != control) {
                let id = gates.len();
                gates.push(GateSpec {
                    id,
                    kind: GateKind::Cnot { control, target },
                    inverse_id: id,
                });
            }
        }
        Self::new(num_qubits, gates)
    }

    /// The first `len` gates, which must be closed under inversion.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.gates.len() {
            return Err(Error::Domain(format!(
                "cannot truncate a library of {} gates to {len}",
                self.gates.len()
            )));
        }
        if let Some(g) = self.gates[..len].iter().find(|g| g.inverse_id >= len) {
            return Err(Error::Validation(format!(
                "gate {} ({}) loses its inverse when truncating to {len} gates",
                g.id,
                g.kind.label()
            )));
        }
        Self::new(self.num_qubits, self.gates[..len].to_vec())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn gate(&self, id: usize) -> Option<&GateSpec> {
        self.gates.get(id)
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Bits per gate id in a serialized key, `ceil(log2 L)`.
    pub fn id_width(&self) -> u32 {
        let len = self.gates.len();
        if len <= 1 {
            0
        } else {
            usize::BITS - (len - 1).leading_zeros()
        }
    }

    fn check_key(&self, key: &NetworkKey) -> Result<()> {
        if key.library_fingerprint != self.fingerprint {
            return Err(Error::Key(format!(
                "key fingerprint {:016x} does not match library {:016x}",
                key.library_fingerprint, self.fingerprint
            )));
        }
        Ok(())
    }
}

/// First 8 bytes of SHA-256 over `K` and the gate labels, big-endian.
fn fingerprint(num_qubits: usize, gates: &[GateSpec]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update((num_qubits as u64).to_be_bytes());
    for g in gates {
        let label = g.kind.label();
        hasher.update((label.len() as u64).to_be_bytes());
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("sha256 is 32 bytes"))
}

/// A secret network: gate ids applied first to last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkKey {
    library_fingerprint: u64,
    sequence: Vec<usize>,
}

impl NetworkKey {
    pub fn new(library: &GateLibrary, sequence: Vec<usize>) -> Result<Self> {
        if sequence.is_empty() {
            return Err(Error::Key("a network key needs at least one gate".into()));
        }
        if let Some(bad) = sequence.iter().find(|&&id| id >= library.len()) {
            return Err(Error::Key(format!(
                "gate id {bad} out of range for a library of {} gates",
                library.len()
            )));
        }
        Ok(Self {
            library_fingerprint: library.fingerprint(),
            sequence,
        })
    }

    /// `M` independent uniform draws from `[0, L)`.
    ///
    /// Logs a warning when `M < K²`: a network that short cannot mix every
    /// qubit with every other one.
    pub fn random<R: Rng + ?Sized>(library: &GateLibrary, len: usize, rng: &mut R) -> Result<Self> {
        let k = library.num_qubits();
        if len < k * k {
            log::warn!("network length {len} is below K^2 = {} for K = {k}", k * k);
        }
        let sequence = (0..len).map(|_| rng.random_range(0..library.len())).collect();
        Self::new(library, sequence)
    }

    pub fn library_fingerprint(&self) -> u64 {
        self.library_fingerprint
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Reverse order, each gate replaced by its inverse.
    pub fn inverse(&self, library: &GateLibrary) -> Result<Self> {
        library.check_key(self)?;
        Ok(Self {
            library_fingerprint: self.library_fingerprint,
            sequence: self
                .sequence
                .iter()
                .rev()
                .map(|&id| library.gates[id].inverse_id)
                .collect(),
        })
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.library_fingerprint != next.library_fingerprint {
            return Err(Error::Key("cannot compose keys over different libraries".into()));
        }
        let mut sequence = self.sequence.clone();
        sequence.extend_from_slice(&next.sequence);
        Ok(Self {
            library_fingerprint: self.library_fingerprint,
            sequence,
        })
    }
}

impl fmt::Display for NetworkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.sequence.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", ids.join(","))
    }
}

/// Runs the network on `state`, one gate at a time.
pub fn apply_network(state: &PureState, library: &GateLibrary, key: &NetworkKey) -> Result<PureState> {
    library.check_key(key)?;
    if state.num_qubits() != library.num_qubits() {
        return Err(Error::Domain(format!(
            "{}-qubit state run through a {}-qubit library",
            state.num_qubits(),
            library.num_qubits()
        )));
    }
    let mut out = state.clone();
    for &id in &key.sequence {
        library.gates[id].apply(&mut out);
    }
    Ok(out)
}

/// The network undoing `key`: gates reversed, each replaced by its inverse.
pub fn inverse_key(library: &GateLibrary, key: &NetworkKey) -> Result<NetworkKey> {
    key.inverse(library)
}

/// Dense matrix of the network: column `k` is the image of `|k⟩`.
pub fn network_to_matrix(library: &GateLibrary, key: &NetworkKey) -> Result<CMatrix> {
    network_to_matrix_capped(library, key, MATRIX_QUBIT_CAP)
}

pub fn network_to_matrix_capped(library: &GateLibrary, key: &NetworkKey, cap: usize) -> Result<CMatrix> {
    let k = library.num_qubits();
    if k > cap {
        return Err(Error::Resource(format!(
            "dense {k}-qubit network matrix exceeds the cap of {cap} qubits"
        )));
    }
    library.check_key(key)?;
    let columns = (0..1usize << k)
        .map(|col| {
            let basis = PureState::basis(col, k)?;
            Ok(apply_network(&basis, library, key)?.amplitudes().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    CMatrix::from_columns(&columns)
}

/// Serialized key: a 16-bit `M`, a 16-bit `L`, then `M` fields of
/// `ceil(log2 L)` bits, all big-endian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyBits {
    bits: Vec<bool>,
}

impl KeyBits {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Length of the gate-id payload, excluding the 32-bit header.
    pub fn payload_len(&self) -> usize {
        self.bits.len().saturating_sub(32)
    }

    /// Lowercase hex, zero-padded to a whole number of bytes.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(8)
            .map(|chunk| {
                let byte = chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)));
                format!("{byte:02x}")
            })
            .collect()
    }

    /// Parses hex produced by [`to_hex`](Self::to_hex); the bit length is
    /// recovered from the header and padding must be zero.
    pub fn from_hex(hex: &str) -> Result<Self> {
        let hex = hex.trim();
        if hex.len() % 2 != 0 {
            return Err(Error::Format("odd number of hex digits".into()));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for i in (0..hex.len()).step_by(2) {
            let byte = u8::from_str_radix(&hex[i..i + 2], 16)
                .map_err(|e| Error::Format(format!("bad hex at offset {i}: {e}")))?;
            bits.extend((0..8).map(|j| byte >> (7 - j) & 1 == 1));
        }
        if bits.len() < 32 {
            return Err(Error::Format("key shorter than its 32-bit header".into()));
        }
        let m = read_field(&bits[..16]);
        let l = read_field(&bits[16..32]);
        let width = id_width_for(l as usize);
        let total = 32 + m as usize * width as usize;
        if total > bits.len() || bits.len() - total >= 8 {
            return Err(Error::Format(format!(
                "header announces {total} bits but {} hex digits were given",
                hex.len()
            )));
        }
        if bits[total..].iter().any(|&b| b) {
            return Err(Error::Format("nonzero padding bits".into()));
        }
        bits.truncate(total);
        Ok(Self { bits })
    }
}

fn id_width_for(len: usize) -> u32 {
    if len <= 1 {
        0
    } else {
        usize::BITS - (len - 1).leading_zeros()
    }
}

fn push_field(bits: &mut Vec<bool>, value: u64, width: u32) {
    bits.extend((0..width).rev().map(|i| value >> i & 1 == 1));
}

fn read_field(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

pub fn serialize_key(library: &GateLibrary, key: &NetworkKey) -> Result<KeyBits> {
    library.check_key(key)?;
    if key.len() > u16::MAX as usize {
        return Err(Error::Format(format!("key length {} does not fit the 16-bit header", key.len())));
    }
    let width = library.id_width();
    let mut bits = Vec::with_capacity(32 + key.len() * width as usize);
    push_field(&mut bits, key.len() as u64, 16);
    push_field(&mut bits, library.len() as u64, 16);
    for &id in &key.sequence {
        push_field(&mut bits, id as u64, width);
    }
    Ok(KeyBits { bits })
}

pub fn deserialize_key(library: &GateLibrary, bits: &KeyBits) -> Result<NetworkKey> {
    let bits = bits.bits();
    if bits.len() < 32 {
        return Err(Error::Format("key shorter than its 32-bit header".into()));
    }
    let m = read_field(&bits[..16]) as usize;
    let l = read_field(&bits[16..32]) as usize;
    if l != library.len() {
        return Err(Error::Format(format!(
            "key was written for a library of {l} gates, this one has {}",
            library.len()
        )));
    }
    let width = library.id_width() as usize;
    if bits.len() != 32 + m * width {
        return Err(Error::Format(format!(
            "expected {} bits for M = {m}, got {}",
            32 + m * width,
            bits.len()
        )));
    }
    let sequence: Vec<usize> = if width == 0 {
        vec![0; m]
    } else {
        bits[32..].chunks(width).map(|f| read_field(f) as usize).collect()
    };
    if let Some(bad) = sequence.iter().find(|&&id| id >= l) {
        return Err(Error::Format(format!("gate id {bad} out of range")));
    }
    NetworkKey::new(library, sequence).map_err(|e| Error::Format(e.to_string()))
}

const KEY_FILE_MAGIC: &str = "qucipher-key v1";

/// Two-line key file: a header naming `K`, `L`, `M` and the library
/// fingerprint, then the hex-encoded serialized key.
pub fn write_key_file(library: &GateLibrary, key: &NetworkKey) -> Result<String> {
    let bits = serialize_key(library, key)?;
    Ok(format!(
        "{KEY_FILE_MAGIC} K={} L={} M={} fp={:016x}\n{}\n",
        library.num_qubits(),
        library.len(),
        key.len(),
        library.fingerprint(),
        bits.to_hex()
    ))
}

pub fn read_key_file(library: &GateLibrary, text: &str) -> Result<NetworkKey> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty key file".into()))?;
    let body = lines.next().ok_or_else(|| Error::Format("key file has no key line".into()))?;
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Format("trailing content after key line".into()));
    }
    let fields = header
        .strip_prefix(KEY_FILE_MAGIC)
        .ok_or_else(|| Error::Format(format!("header does not start with `{KEY_FILE_MAGIC}`")))?;
    let mut k = None;
    let mut l = None;
    let mut m = None;
    let mut fp = None;
    for field in fields.split_whitespace() {
        let (name, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("malformed header field `{field}`")))?;
        let parse = |v: &str| {
            v.parse::<usize>()
                .map_err(|e| Error::Format(format!("bad {name} value `{v}`: {e}")))
        };
        match name {
            "K" => k = Some(parse(value)?),
            "L" => l = Some(parse(value)?),
            "M" => m = Some(parse(value)?),
            "fp" => {
                fp = Some(
                    u64::from_str_radix(value, 16)
                        .map_err(|e| Error::Format(format!("bad fingerprint `{value}`: {e}")))?,
                )
            }
            _ => return Err(Error::Format(format!("unknown header field `{name}`"))),
        }
    }
    let (k, l, m, fp) = match (k, l, m, fp) {
        (Some(k), Some(l), Some(m), Some(fp)) => (k, l, m, fp),
        _ => return Err(Error::Format("header must name K, L, M and fp".into())),
    };
    if k != library.num_qubits() || l != library.len() {
        return Err(Error::Format(format!(
            "key file is for K={k}, L={l}; library has K={}, L={}",
            library.num_qubits(),
            library.len()
        )));
    }
    if fp != library.fingerprint() {
        return Err(Error::Key(format!(
            "key file fingerprint {fp:016x} does not match library {:016x}",
            library.fingerprint()
        )));
    }
    let key = deserialize_key(library, &KeyBits::from_hex(body)?)?;
    if key.len() != m {
        return Err(Error::Format(format!("header says M={m}, key has {}", key.len())));
    }
    Ok(key)
}
