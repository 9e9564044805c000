//! Pauli strings over up to 64 qubits in symplectic bitmask form.
//!
//! A [`PauliTerm`] stores an `x_mask` (qubits carrying X or Y), a `z_mask`
//! (qubits carrying Z or Y) and an exact phase from `{+1, +i, -1, -i}`. The
//! operator it denotes is `phase * ⊗_q σ(x_q, z_q)` with `σ(1, 1) = Y`.
//!
//! Qubit `q` is bit `q` of a configuration integer and `Z_q` has eigenvalue
//! `-1` on configurations whose bit `q` is set.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Computational-basis label; bit `q` is qubit `q`.
pub type Config = u64;

/// Coefficients with magnitude below this are dropped when a sum is folded.
pub const DROP_TOL: f64 = 1e-12;

/// Largest imaginary residue tolerated on a Hermitian sum's coefficients.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Tolerance on `|‖v‖² - 1|` for states fed to expectation routines.
pub const NORM_TOL: f64 = 1e-10;

/// A power of `i`, stored exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    /// `i^k` for any integer `k`.
    #[inline]
    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    #[inline]
    pub fn exponent(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    #[inline]
    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    #[inline]
    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    /// `self * z` without a complex multiplication.
    #[inline]
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self.0 {
            0 => z,
            1 => Complex64::new(-z.im, z.re),
            2 => -z,
            _ => Complex64::new(z.im, -z.re),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    #[inline]
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        self * Phase::MINUS_ONE
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > 64 {
        return Err(Error::InvalidQubitCount(n_qubits));
    }
    Ok(())
}

#[inline]
fn qubit_mask(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

#[inline]
fn popcount(v: u64) -> i64 {
    i64::from(v.count_ones())
}

/// A single Pauli string with an exact phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliTerm {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    phase: Phase,
}

impl PauliTerm {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, phase: Phase) -> Result<Self> {
        check_qubits(n_qubits)?;
        let full = qubit_mask(n_qubits);
        if x_mask & !full != 0 || z_mask & !full != 0 {
            return Err(Error::Inconsistent(format!(
                "masks {x_mask:#x}/{z_mask:#x} exceed {n_qubits} qubits"
            )));
        }
        Ok(Self {
            n_qubits,
            x_mask,
            z_mask,
            phase,
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0, 0, Phase::ONE)
    }

    /// Builds a term from `(qubit, 'X' | 'Y' | 'Z' | 'I')` factors.
    pub fn from_factors(n_qubits: usize, factors: &[(usize, char)]) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut term = Self::identity(n_qubits)?;
        for &(q, op) in factors {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    limit: n_qubits,
                });
            }
            let (x, z) = match op.to_ascii_uppercase() {
                'I' => continue,
                'X' => (1u64 << q, 0),
                'Y' => (1u64 << q, 1u64 << q),
                'Z' => (0, 1u64 << q),
                other => {
                    return Err(Error::InvalidArgument(format!("unknown Pauli factor '{other}'")))
                }
            };
            let factor = Self::new(n_qubits, x, z, Phase::ONE)?;
            term = term.multiply(&factor)?;
        }
        Ok(term)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Number of qubits acted on non-trivially.
    #[inline]
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Qubit indices acted on non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let m = self.x_mask | self.z_mask;
        (0..self.n_qubits).filter(|q| m >> q & 1 == 1).collect()
    }

    fn check_same(&self, other: &PauliTerm) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Product `self · other`.
    ///
    /// With `σ(x, z) = i^{x·z} X^x Z^z` and `Z^a X^b = (-1)^{a·b} X^b Z^a`, the
    /// product picks up `i^{|x1&z1| + |x2&z2| - |x&z|} (-1)^{|z1&x2|}`.
    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &PauliTerm) -> PauliTerm {
        let x = self.x_mask ^ other.x_mask;
        let z = self.z_mask ^ other.z_mask;
        let k = popcount(self.x_mask & self.z_mask) + popcount(other.x_mask & other.z_mask)
            + 2 * popcount(self.z_mask & other.x_mask)
            - popcount(x & z);
        PauliTerm {
            n_qubits: self.n_qubits,
            x_mask: x,
            z_mask: z,
            phase: self.phase * other.phase * Phase::from_exponent(k),
        }
    }

    /// True iff the symplectic inner product of the two masks is even.
    pub fn commutes(&self, other: &PauliTerm) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &PauliTerm) -> bool {
        ((self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones()).is_multiple_of(2)
    }

    /// `P|cfg⟩ = s|cfg ^ x_mask⟩`, returning `(cfg ^ x_mask, s)` with `|s| = 1`.
    pub fn apply_to_basis(&self, cfg: Config) -> Result<(Config, Complex64)> {
        if cfg & !qubit_mask(self.n_qubits) != 0 {
            return Err(Error::ConfigOutOfRange {
                cfg,
                n_qubits: self.n_qubits,
            });
        }
        let (out, phase) = self.act(cfg);
        Ok((out, phase.to_complex()))
    }

    /// Unchecked basis action with an exact phase.
    #[inline]
    pub fn act(&self, cfg: Config) -> (Config, Phase) {
        let k = popcount(self.x_mask & self.z_mask) + 2 * popcount(self.z_mask & cfg);
        (
            cfg ^ self.x_mask,
            self.phase * Phase::from_exponent(k),
        )
    }

    /// Renders the factors only, e.g. `X0 Y3 Z5`; the identity renders as `I`.
    pub fn label(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        let mut parts = Vec::with_capacity(self.weight() as usize);
        for q in 0..self.n_qubits {
            let x = self.x_mask >> q & 1 == 1;
            let z = self.z_mask >> q & 1 == 1;
            let c = match (x, z) {
                (true, true) => 'Y',
                (true, false) => 'X',
                (false, true) => 'Z',
                (false, false) => continue,
            };
            parts.push(format!("{c}{q}"));
        }
        parts.join(" ")
    }

    /// Parses a factor list such as `X0 Y3 Z5` (empty or `I` for identity).
    pub fn parse_label(n_qubits: usize, label: &str) -> Result<PauliTerm> {
        let mut factors = Vec::new();
        for tok in label.split_whitespace() {
            if tok.eq_ignore_ascii_case("I") {
                continue;
            }
            let mut chars = tok.chars();
            let op = chars.next().unwrap_or(' ');
            let q: usize = chars.as_str().parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad Pauli factor '{tok}'"),
            })?;
            factors.push((q, op));
        }
        let mut seen = 0u64;
        for &(q, _) in &factors {
            if q < 64 && seen >> q & 1 == 1 {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("qubit {q} repeated in '{label}'"),
                });
            }
            if q < 64 {
                seen |= 1 << q;
            }
        }
        Self::from_factors(n_qubits, &factors)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != Phase::ONE {
            write!(f, "({}) ", self.phase)?;
        }
        f.write_str(&self.label())
    }
}

/// Weighted sum of Pauli strings, deduplicated by `(x_mask, z_mask)`.
///
/// Stored terms always carry phase `+1`; phases live in the coefficients.
/// Terms are kept sorted by `(x_mask, z_mask)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(Complex64, PauliTerm)>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            terms: Vec::new(),
        })
    }

    /// `c · I`.
    pub fn constant(n_qubits: usize, c: f64) -> Result<Self> {
        Self::from_terms(
            n_qubits,
            [(Complex64::new(c, 0.0), PauliTerm::identity(n_qubits)?)],
        )
    }

    pub fn from_term(coeff: Complex64, term: PauliTerm) -> Self {
        let n = term.n_qubits;
        Self::fold(n, std::iter::once((coeff, term)))
    }

    /// Folds phases into coefficients, merges duplicates and drops
    /// coefficients below [`DROP_TOL`].
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliTerm)>,
    {
        check_qubits(n_qubits)?;
        let terms: Vec<_> = terms.into_iter().collect();
        for (_, t) in &terms {
            if t.n_qubits != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: t.n_qubits,
                });
            }
        }
        Ok(Self::fold(n_qubits, terms))
    }

    fn fold<I>(n_qubits: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Complex64, PauliTerm)>,
    {
        let mut acc: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for (c, t) in terms {
            *acc.entry((t.x_mask, t.z_mask)).or_default() += t.phase.apply(c);
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= DROP_TOL)
            .map(|((x, z), c)| {
                (
                    c,
                    PauliTerm {
                        n_qubits,
                        x_mask: x,
                        z_mask: z,
                        phase: Phase::ONE,
                    },
                )
            })
            .collect();
        Self { n_qubits, terms }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn terms(&self) -> &[(Complex64, PauliTerm)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity term (zero if absent).
    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(_, t)| t.is_identity())
            .map(|(c, _)| *c)
            .unwrap_or_default()
    }

    /// The non-identity terms.
    pub fn without_identity(&self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(_, t)| !t.is_identity())
                .copied()
                .collect(),
        }
    }

    /// Largest `|Im c|` over all coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_imag() <= HERMITIAN_TOL
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        let residue = self.max_imag();
        if residue > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residue));
        }
        Ok(())
    }

    fn check_same(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: n_qubits,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other.n_qubits)?;
        Ok(Self::fold(
            self.n_qubits,
            self.terms.iter().chain(other.terms.iter()).copied(),
        ))
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        Self::fold(
            self.n_qubits,
            self.terms.iter().map(|&(c, t)| (c * factor, t)),
        )
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other.n_qubits)?;
        let mut products = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ca, ta) in &self.terms {
            for &(cb, tb) in &other.terms {
                products.push((ca * cb, ta.mul_unchecked(&tb)));
            }
        }
        Ok(Self::fold(self.n_qubits, products))
    }

    /// Returns the operator `i[H, P]`.
    ///
    /// Terms commuting with `P` drop out; for an anticommuting term `t`,
    /// `i(tP - Pt) = 2i·tP`.
    pub fn commutator_i(&self, p: &PauliTerm) -> Result<PauliSum> {
        self.check_same(p.n_qubits)?;
        let two_i = Complex64::new(0.0, 2.0);
        Ok(Self::fold(
            self.n_qubits,
            self.terms
                .iter()
                .filter(|(_, t)| !t.commutes_unchecked(p))
                .map(|&(c, t)| (two_i * c, t.mul_unchecked(p))),
        ))
    }

    /// Returns `P H P` for a Hermitian Pauli `P` (phase `±1`).
    pub fn conjugate(&self, p: &PauliTerm) -> Result<PauliSum> {
        self.check_same(p.n_qubits)?;
        if !p.phase.is_real() {
            return Err(Error::InvalidArgument(format!(
                "conjugating Pauli must have phase ±1, found {}",
                p.phase
            )));
        }
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|&(c, t)| if t.commutes_unchecked(p) { (c, t) } else { (-c, t) })
                .collect(),
        })
    }

    /// `⟨bra|H|ket⟩` for basis configurations.
    pub fn matrix_element(&self, bra: Config, ket: Config) -> Complex64 {
        let flip = bra ^ ket;
        self.terms
            .iter()
            .filter(|(_, t)| t.x_mask == flip)
            .map(|&(c, t)| t.act(ket).1.apply(c))
            .sum()
    }

    /// Calls `f(out_cfg, amplitude)` for every term of `H|cfg⟩`.
    #[inline]
    pub fn for_each_image<F: FnMut(Config, Complex64)>(&self, cfg: Config, mut f: F) {
        for &(c, t) in &self.terms {
            let (out, ph) = t.act(cfg);
            f(out, ph.apply(c));
        }
    }

    /// Parses one `c * X0 Y3` line. The coefficient may be real or a
    /// parenthesised complex number such as `(0.5-0.25i)`.
    pub fn parse_line(n_qubits: usize, line: &str) -> Result<(Complex64, PauliTerm)> {
        let (coeff, label) = match line.split_once('*') {
            Some((c, l)) => (c.trim(), l.trim()),
            None => (line.trim(), ""),
        };
        let coeff = parse_complex(coeff).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("bad coefficient '{coeff}'"),
        })?;
        Ok((coeff, PauliTerm::parse_label(n_qubits, label)?))
    }
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let body = inner.strip_suffix('i').or_else(|| inner.strip_suffix('j'))?;
        // split at the sign of the imaginary part (skip exponent signs)
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
        let re = f64::from_str(&body[..split]).ok()?;
        let im = f64::from_str(&body[split..]).ok()?;
        Some(Complex64::new(re, im))
    } else {
        f64::from_str(s).ok().map(|re| Complex64::new(re, 0.0))
    }
}

impl fmt::Display for PauliSum {
    /// One `c * X0 Y3` line per term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (c, t)) in self.terms.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{} * {}", format_complex(*c), t.label())?;
        }
        Ok(())
    }
}

/// A state stored as a map from configuration to amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseStateVec {
    n_qubits: usize,
    entries: BTreeMap<Config, Complex64>,
}

impl SparseStateVec {
    pub fn new<I>(n_qubits: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Config, Complex64)>,
    {
        check_qubits(n_qubits)?;
        let full = qubit_mask(n_qubits);
        let mut map = BTreeMap::new();
        for (cfg, amp) in entries {
            if cfg & !full != 0 {
                return Err(Error::ConfigOutOfRange { cfg, n_qubits });
            }
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite amplitude at configuration {cfg}"
                )));
            }
            *map.entry(cfg).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(Self {
            n_qubits,
            entries: map,
        })
    }

    pub fn basis(n_qubits: usize, cfg: Config) -> Result<Self> {
        Self::new(n_qubits, [(cfg, Complex64::new(1.0, 0.0))])
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, cfg: Config) -> Complex64 {
        self.entries.get(&cfg).copied().unwrap_or_default()
    }

    /// Entries in ascending configuration order.
    pub fn iter(&self) -> impl Iterator<Item = (Config, Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(())
    }

    /// `P|v⟩`.
    pub fn apply_term(&self, p: &PauliTerm) -> Result<SparseStateVec> {
        if p.n_qubits != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: p.n_qubits,
            });
        }
        Ok(SparseStateVec {
            n_qubits: self.n_qubits,
            entries: self
                .entries
                .iter()
                .map(|(&cfg, &amp)| {
                    let (out, ph) = p.act(cfg);
                    (out, ph.apply(amp))
                })
                .collect(),
        })
    }
}

/// `⟨bra|H|ket⟩` for sparse vectors, applying each term of `H` to each
/// configuration of `ket` and pairing with `bra`.
pub fn sparse_transition(h: &PauliSum, bra: &SparseStateVec, ket: &SparseStateVec) -> Result<Complex64> {
    h.check_same(bra.n_qubits)?;
    h.check_same(ket.n_qubits)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (cfg, amp) in ket.iter() {
        h.for_each_image(cfg, |out, s| {
            if let Some(b) = bra.entries.get(&out) {
                acc += b.conj() * s * amp;
            }
        });
    }
    Ok(acc)
}

/// `⟨v|H|v⟩` for Hermitian `H` and normalized `v`.
pub fn sparse_expectation(h: &PauliSum, v: &SparseStateVec) -> Result<f64> {
    h.require_hermitian()?;
    v.require_normalized()?;
    let z = sparse_transition(h, v, v)?;
    let scale = h.terms.iter().map(|(c, _)| c.norm()).sum::<f64>().max(1.0);
    if z.im.abs() > 1e-10 * scale {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}
