//! Signed n-qubit Pauli operators in the symplectic (x, z) bit-pair encoding.
//!
//! Per qubit the pair `(x, z)` decodes as `(0,0) = I`, `(1,0) = X`,
//! `(1,1) = Y`, `(0,1) = Z`. The leftmost letter of the text form is qubit 1
//! and is stored at bit index 0.
//!
//! Products accumulate a phase `i^k` qubit by qubit, anchored on
//! `X·Z = -iY`. Only Hermitian operators (phase ±1) are exposed as
//! [`SignedPauli`]; general phases live in [`PhasedPauli`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("empty Pauli string")]
    Empty,
    #[error("invalid character {found:?} at position {position}")]
    InvalidChar { position: usize, found: char },
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operators {left} and {right} anticommute; their product is not Hermitian")]
    Anticommuting { left: String, right: String },
}

/// A ±1 sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn from_negative(negative: bool) -> Self {
        if negative {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_negative(self.is_negative() != rhs.is_negative())
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        Sign::from_negative(!self.is_negative())
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.to_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_i8(v)
            .ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

/// An unsigned Pauli string on `n_qubits` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

impl PauliOp {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        PauliOp {
            n_qubits,
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    /// Builds an operator from per-qubit `(x, z)` bits, qubit 1 first.
    pub fn from_bits(x_bits: &[bool], z_bits: &[bool]) -> Result<Self, PauliError> {
        if x_bits.len() != z_bits.len() {
            return Err(PauliError::DimensionMismatch {
                left: x_bits.len(),
                right: z_bits.len(),
            });
        }
        let mut op = PauliOp::identity(x_bits.len());
        for (q, (&x, &z)) in x_bits.iter().zip(z_bits).enumerate() {
            op.set(q, x, z);
        }
        Ok(op)
    }

    /// Parses an unsigned string over `{I, X, Y, Z}`.
    pub fn parse(text: &str) -> Result<Self, PauliError> {
        let sp = SignedPauli::parse(text)?;
        match sp.sign {
            Sign::Plus if !text.starts_with(['-', '+', '\u{2212}']) => Ok(sp.op),
            _ => Err(PauliError::InvalidChar {
                position: 1,
                found: text.chars().next().unwrap_or('-'),
            }),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_bit(&self, qubit: usize) -> bool {
        self.x[qubit / WORD] >> (qubit % WORD) & 1 == 1
    }

    pub fn z_bit(&self, qubit: usize) -> bool {
        self.z[qubit / WORD] >> (qubit % WORD) & 1 == 1
    }

    pub fn x_bits(&self) -> Vec<bool> {
        (0..self.n_qubits).map(|q| self.x_bit(q)).collect()
    }

    pub fn z_bits(&self) -> Vec<bool> {
        (0..self.n_qubits).map(|q| self.z_bit(q)).collect()
    }

    fn set(&mut self, qubit: usize, x: bool, z: bool) {
        let (w, b) = (qubit / WORD, qubit % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | (u64::from(x) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | (u64::from(z) << b);
    }

    pub fn letter(&self, qubit: usize) -> char {
        match (self.x_bit(qubit), self.z_bit(qubit)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// True when every letter is `I` or `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Symplectic commutation test. Panics on a qubit-count mismatch; see
    /// [`commutes`] for the checked form.
    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let parity: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((x1, z1), (x2, z2))| ((x1 & z2) ^ (z1 & x2)).count_ones())
            .sum();
        parity.is_multiple_of(2)
    }

    /// Exponent `k` in `self · other = i^k (self ⊙ other)` where `⊙` is the
    /// xor of the bit pairs.
    fn product_phase(&self, other: &PauliOp) -> u8 {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
            plus += ((px & qy) | (py & qz) | (pz & qx)).count_ones();
            minus += ((py & qx) | (pz & qy) | (px & qz)).count_ones();
        }
        ((plus + 3 * minus) % 4) as u8
    }

    fn xor(&self, other: &PauliOp) -> PauliOp {
        PauliOp {
            n_qubits: self.n_qubits,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Returns the operator with qubits reordered so that new qubit `q` is
    /// old qubit `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> PauliOp {
        assert_eq!(perm.len(), self.n_qubits);
        let mut out = PauliOp::identity(self.n_qubits);
        for (q, &src) in perm.iter().enumerate() {
            out.set(q, self.x_bit(src), self.z_bit(src));
        }
        out
    }
}

impl Ord for PauliOp {
    /// Lexicographic on the text form with `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_qubits.cmp(&other.n_qubits).then_with(|| {
            (0..self.n_qubits)
                .map(|q| letter_rank(self.letter(q)).cmp(&letter_rank(other.letter(q))))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for PauliOp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn letter_rank(c: char) -> u8 {
    match c {
        'I' => 0,
        'X' => 1,
        'Y' => 2,
        _ => 3,
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PauliOp::parse(s)
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PauliOp::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A Hermitian Pauli operator `±P`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPauli {
    pub op: PauliOp,
    pub sign: Sign,
}

impl SignedPauli {
    pub fn new(sign: Sign, op: PauliOp) -> Self {
        SignedPauli { op, sign }
    }

    pub fn plus(op: PauliOp) -> Self {
        SignedPauli {
            op,
            sign: Sign::Plus,
        }
    }

    pub fn minus(op: PauliOp) -> Self {
        SignedPauli {
            op,
            sign: Sign::Minus,
        }
    }

    /// `-𝟙` on `n_qubits` qubits.
    pub fn minus_identity(n_qubits: usize) -> Self {
        SignedPauli::minus(PauliOp::identity(n_qubits))
    }

    /// Parses `[+|-]` followed by letters over `{I,X,Y,Z}`. Positions in
    /// errors are 1-based character offsets into `text`.
    pub fn parse(text: &str) -> Result<Self, PauliError> {
        let mut chars = text.chars().peekable();
        let mut sign = Sign::Plus;
        let mut position = 1;
        match chars.peek() {
            None => return Err(PauliError::Empty),
            Some('-') | Some('\u{2212}') => {
                sign = Sign::Minus;
                chars.next();
                position += 1;
            }
            Some('+') => {
                chars.next();
                position += 1;
            }
            _ => {}
        }
        let mut letters = Vec::new();
        for (offset, c) in chars.enumerate() {
            let bits = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                found => {
                    return Err(PauliError::InvalidChar {
                        position: position + offset,
                        found,
                    })
                }
            };
            letters.push(bits);
        }
        if letters.is_empty() {
            return Err(PauliError::Empty);
        }
        let mut op = PauliOp::identity(letters.len());
        for (q, (x, z)) in letters.into_iter().enumerate() {
            op.set(q, x, z);
        }
        Ok(SignedPauli { op, sign })
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits
    }

    /// Text form with an explicit leading `+` or `-`.
    pub fn to_explicit_string(&self) -> String {
        let s = if self.sign.is_negative() { '-' } else { '+' };
        format!("{s}{}", self.op)
    }
}

impl Neg for SignedPauli {
    type Output = SignedPauli;

    fn neg(self) -> SignedPauli {
        SignedPauli {
            op: self.op,
            sign: -self.sign,
        }
    }
}

impl Neg for &SignedPauli {
    type Output = SignedPauli;

    fn neg(self) -> SignedPauli {
        -self.clone()
    }
}

impl From<PauliOp> for SignedPauli {
    fn from(op: PauliOp) -> Self {
        SignedPauli::plus(op)
    }
}

impl fmt::Display for SignedPauli {
    /// Canonical form: `-` for negative operators, no prefix otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign.is_negative() {
            write!(f, "-")?;
        }
        write!(f, "{}", self.op)
    }
}

impl fmt::Debug for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_explicit_string())
    }
}

impl FromStr for SignedPauli {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SignedPauli::parse(s)
    }
}

/// A Pauli operator with a general phase `i^phase_exp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub op: PauliOp,
    pub phase_exp: u8,
}

impl PhasedPauli {
    /// The Hermitian form, when the phase is real.
    pub fn to_signed(&self) -> Option<SignedPauli> {
        match self.phase_exp % 4 {
            0 => Some(SignedPauli::plus(self.op.clone())),
            2 => Some(SignedPauli::minus(self.op.clone())),
            _ => None,
        }
    }
}

impl From<SignedPauli> for PhasedPauli {
    fn from(p: SignedPauli) -> Self {
        PhasedPauli {
            phase_exp: if p.sign.is_negative() { 2 } else { 0 },
            op: p.op,
        }
    }
}

impl Mul<&PhasedPauli> for &PhasedPauli {
    type Output = PhasedPauli;

    /// Panics on a qubit-count mismatch.
    fn mul(self, rhs: &PhasedPauli) -> PhasedPauli {
        assert_eq!(self.op.n_qubits, rhs.op.n_qubits, "qubit count mismatch");
        let k = self.phase_exp + rhs.phase_exp + self.op.product_phase(&rhs.op);
        PhasedPauli {
            op: self.op.xor(&rhs.op),
            phase_exp: k % 4,
        }
    }
}

fn check_dims(p: &PauliOp, q: &PauliOp) -> Result<(), PauliError> {
    if p.n_qubits != q.n_qubits {
        return Err(PauliError::DimensionMismatch {
            left: p.n_qubits,
            right: q.n_qubits,
        });
    }
    Ok(())
}

/// Whether `p` and `q` commute.
pub fn commutes(p: &PauliOp, q: &PauliOp) -> Result<bool, PauliError> {
    check_dims(p, q)?;
    Ok(p.commutes_with(q))
}

/// The exact product `p·q`, phase included.
pub fn multiply(p: &SignedPauli, q: &SignedPauli) -> Result<PhasedPauli, PauliError> {
    check_dims(&p.op, &q.op)?;
    Ok(&PhasedPauli::from(p.clone()) * &PhasedPauli::from(q.clone()))
}

/// The product of two commuting Hermitian Paulis, which is again Hermitian.
pub fn commuting_product(p: &SignedPauli, q: &SignedPauli) -> Result<SignedPauli, PauliError> {
    check_dims(&p.op, &q.op)?;
    if !p.op.commutes_with(&q.op) {
        return Err(PauliError::Anticommuting {
            left: p.to_string(),
            right: q.to_string(),
        });
    }
    let product = multiply(p, q)?;
    Ok(product
        .to_signed()
        .expect("commuting Hermitian Paulis have a real product"))
}
