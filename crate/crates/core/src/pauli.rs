//! Pauli strings, measurement bases and the hitting relation.
//!
//! Labels are stored as 2-bit codes (`I=0, X=1, Y=2, Z=3`), 32 per `u64`
//! word, so that a hit test over a whole string is a handful of word
//! operations.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const LABELS_PER_WORD: usize = 32;
const LOW_BITS: u64 = 0x5555_5555_5555_5555;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    /// The three measurable labels, in tie-break order.
    pub const MEASURABLE: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_code(code: u8) -> Pauli {
        match code & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Index into `MEASURABLE` (X→0, Y→1, Z→2). `None` for the identity.
    #[inline]
    pub fn measurable_index(self) -> Option<usize> {
        match self {
            Pauli::I => None,
            p => Some(p as usize - 1),
        }
    }

    /// Single-position hitting relation: `I` is hit by anything, otherwise
    /// the labels must agree.
    #[inline]
    pub fn is_hit_by(self, measured: Pauli) -> bool {
        self == Pauli::I || self == measured
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Fixed-length sequence of Pauli labels, bit-packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PackedLabels {
    len: usize,
    words: Vec<u64>,
}

impl PackedLabels {
    /// All-identity string of length `len`.
    pub fn identity(len: usize) -> Self {
        PackedLabels {
            len,
            words: vec![0; len.div_ceil(LABELS_PER_WORD)],
        }
    }

    pub fn from_labels(labels: &[Pauli]) -> Self {
        let mut packed = PackedLabels::identity(labels.len());
        for (k, &p) in labels.iter().enumerate() {
            packed.set(k, p);
        }
        packed
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, k: usize) -> Pauli {
        debug_assert!(k < self.len);
        let word = self.words[k / LABELS_PER_WORD];
        Pauli::from_code((word >> (2 * (k % LABELS_PER_WORD))) as u8)
    }

    #[inline]
    pub fn set(&mut self, k: usize, p: Pauli) {
        assert!(k < self.len, "label index {k} out of range {}", self.len);
        let shift = 2 * (k % LABELS_PER_WORD);
        let word = &mut self.words[k / LABELS_PER_WORD];
        *word = (*word & !(3u64 << shift)) | ((p.code() as u64) << shift);
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len).map(move |k| self.get(k))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// One bit per 2-bit lane set in the low position when the lane is non-I.
    #[inline]
    fn non_identity_lanes(word: u64) -> u64 {
        (word | (word >> 1)) & LOW_BITS
    }

    pub fn weight(&self) -> usize {
        self.words
            .iter()
            .map(|&w| Self::non_identity_lanes(w).count_ones() as usize)
            .sum()
    }

    /// Weight of the labels at 0-based positions `k..len`.
    pub fn weight_from(&self, k: usize) -> usize {
        if k >= self.len {
            return 0;
        }
        let first = k / LABELS_PER_WORD;
        let offset = k % LABELS_PER_WORD;
        let head = Self::non_identity_lanes(self.words[first]) >> (2 * offset);
        let tail: usize = self.words[first + 1..]
            .iter()
            .map(|&w| Self::non_identity_lanes(w).count_ones() as usize)
            .sum();
        head.count_ones() as usize + tail
    }

    /// `true` iff every non-I label of `self` equals the label of `other` at
    /// the same position. Lengths must match (checked by callers).
    #[inline]
    pub fn is_hit_by(&self, other: &PackedLabels) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(&o, &p)| {
            let lanes = Self::non_identity_lanes(o);
            (o ^ p) & (lanes | (lanes << 1)) == 0
        })
    }
}

impl fmt::Display for PackedLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.iter() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PackedLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

fn char_column(text: &str, byte_offset: usize) -> usize {
    text[..byte_offset].chars().count() + 1
}

/// Parse a bare label string. `allow_identity = false` rejects `I`.
/// Columns in errors are offset by `base_column - 1`.
fn parse_labels(token: &str, base_column: usize, allow_identity: bool) -> Result<PackedLabels> {
    if token.is_empty() {
        return Err(Error::parse(base_column, "empty Pauli string"));
    }
    let mut labels = Vec::with_capacity(token.len());
    for (i, c) in token.chars().enumerate() {
        let label = Pauli::from_char(c);
        match label {
            Some(Pauli::I) if !allow_identity => {
                return Err(Error::parse(
                    base_column + i,
                    "identity label 'I' is not a valid measurement setting",
                ))
            }
            Some(p) => labels.push(p),
            None => {
                let expected = if allow_identity { "I, X, Y or Z" } else { "X, Y or Z" };
                return Err(Error::parse(
                    base_column + i,
                    format!("illegal character {c:?}, expected {expected}"),
                ));
            }
        }
    }
    Ok(PackedLabels::from_labels(&labels))
}

/// Byte offset and text of every whitespace-separated token.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

/// A Pauli string over `{I,X,Y,Z}` with a real coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliObservable {
    labels: PackedLabels,
    coefficient: f64,
}

impl PauliObservable {
    pub fn new(labels: &[Pauli], coefficient: f64) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Domain("observable must act on at least one qubit".into()));
        }
        Ok(PauliObservable {
            labels: PackedLabels::from_labels(labels),
            coefficient,
        })
    }

    pub fn from_packed(labels: PackedLabels, coefficient: f64) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Domain("observable must act on at least one qubit".into()));
        }
        Ok(PauliObservable { labels, coefficient })
    }

    pub fn identity(n: usize, coefficient: f64) -> Result<Self> {
        Self::from_packed(PackedLabels::identity(n), coefficient)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn with_coefficient(mut self, coefficient: f64) -> Self {
        self.coefficient = coefficient;
        self
    }

    #[inline]
    pub fn labels(&self) -> &PackedLabels {
        &self.labels
    }

    #[inline]
    pub fn label(&self, k: usize) -> Pauli {
        self.labels.get(k)
    }

    /// Number of non-identity labels.
    pub fn weight(&self) -> usize {
        self.labels.weight()
    }

    /// Weight of the suffix that follows the first `k` positions, i.e. of the
    /// 0-based labels `k..n`. `suffix_weight(0)` is the full weight and
    /// `suffix_weight(n)` is zero.
    pub fn suffix_weight(&self, k: usize) -> Result<usize> {
        if k > self.num_qubits() {
            return Err(Error::Index {
                index: k,
                max: self.num_qubits(),
            });
        }
        Ok(self.labels.weight_from(k))
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Whether measuring in `basis` hits this observable.
    pub fn is_hit_by(&self, basis: &MeasurementBasis) -> Result<bool> {
        Error::check_len(self.num_qubits(), basis.num_qubits())?;
        Ok(self.labels.is_hit_by(&basis.labels))
    }

    /// Render as `"coefficient labels"`; inverse of [`parse_pauli`].
    pub fn render(&self) -> String {
        format!("{} {}", self.coefficient, self.labels)
    }
}

impl fmt::Display for PauliObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coefficient, self.labels)
    }
}

impl FromStr for PauliObservable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pauli(s)
    }
}

/// `hits(o, p)`: `p` hits `o` iff `o[k] = I` or `o[k] = p[k]` at every `k`.
pub fn hits(o: &PauliObservable, p: &MeasurementBasis) -> Result<bool> {
    o.is_hit_by(p)
}

/// Parse `[coefficient] pauli_string`. The coefficient defaults to 1.0.
pub fn parse_pauli(text: &str) -> Result<PauliObservable> {
    let toks = tokens(text);
    let (coefficient, (offset, labels)) = match toks.as_slice() {
        [] => return Err(Error::parse(1, "empty observable")),
        [single] => (1.0, *single),
        [(coef_offset, coef), labels] => {
            let value: f64 = coef.parse().map_err(|_| {
                Error::parse(
                    char_column(text, *coef_offset),
                    format!("invalid coefficient {coef:?}"),
                )
            })?;
            if !value.is_finite() {
                return Err(Error::parse(
                    char_column(text, *coef_offset),
                    "coefficient must be finite",
                ));
            }
            (value, *labels)
        }
        [_, _, (extra, _), ..] => {
            return Err(Error::parse(char_column(text, *extra), "unexpected trailing token"))
        }
    };
    let labels = parse_labels(labels, char_column(text, offset), true)?;
    Ok(PauliObservable {
        labels,
        coefficient,
    })
}

pub fn render_pauli(o: &PauliObservable) -> String {
    o.render()
}

/// A full-weight measurement setting over `{X,Y,Z}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MeasurementBasis {
    labels: PackedLabels,
}

impl MeasurementBasis {
    pub fn new(labels: &[Pauli]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Domain("measurement basis must cover at least one qubit".into()));
        }
        if let Some(k) = labels.iter().position(|&p| p == Pauli::I) {
            return Err(Error::Domain(format!(
                "measurement basis has identity label at position {k}"
            )));
        }
        Ok(MeasurementBasis {
            labels: PackedLabels::from_labels(labels),
        })
    }

    /// Same label on every qubit.
    pub fn uniform(n: usize, p: Pauli) -> Result<Self> {
        Self::new(&vec![p; n])
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn label(&self, k: usize) -> Pauli {
        self.labels.get(k)
    }

    #[inline]
    pub fn labels(&self) -> &PackedLabels {
        &self.labels
    }

    pub fn to_vec(&self) -> Vec<Pauli> {
        self.labels.iter().collect()
    }
}

impl fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels)
    }
}

impl fmt::Debug for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels)
    }
}

impl FromStr for MeasurementBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks = tokens(s);
        match toks.as_slice() {
            [] => Err(Error::parse(1, "empty measurement basis")),
            [(offset, token)] => Ok(MeasurementBasis {
                labels: parse_labels(token, char_column(s, *offset), false)?,
            }),
            [_, (extra, _), ..] => {
                Err(Error::parse(char_column(s, *extra), "unexpected trailing token"))
            }
        }
    }
}

/// Ordered list of observables sharing one qubit count. Duplicates are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    n: usize,
    observables: Vec<PauliObservable>,
}

impl ObservableSet {
    pub fn new(observables: Vec<PauliObservable>) -> Result<Self> {
        let first = observables
            .first()
            .ok_or_else(|| Error::Domain("observable set is empty".into()))?;
        let n = first.num_qubits();
        for o in &observables {
            Error::check_len(n, o.num_qubits())?;
        }
        Ok(ObservableSet { n, observables })
    }

    /// Convenience constructor from label strings with unit coefficients.
    pub fn from_strs<S: AsRef<str>>(strings: &[S]) -> Result<Self> {
        let observables = strings
            .iter()
            .map(|s| parse_pauli(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(observables)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.observables.len()
    }

    /// Always `false`; kept for the `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PauliObservable> {
        self.observables.iter()
    }

    pub fn as_slice(&self) -> &[PauliObservable] {
        &self.observables
    }

    pub fn get(&self, index: usize) -> Option<&PauliObservable> {
        self.observables.get(index)
    }

    pub fn check_basis(&self, basis: &MeasurementBasis) -> Result<()> {
        Error::check_len(self.n, basis.num_qubits())
    }
}

impl std::ops::Index<usize> for ObservableSet {
    type Output = PauliObservable;

    fn index(&self, index: usize) -> &PauliObservable {
        &self.observables[index]
    }
}

impl<'a> IntoIterator for &'a ObservableSet {
    type Item = &'a PauliObservable;
    type IntoIter = std::slice::Iter<'a, PauliObservable>;

    fn into_iter(self) -> Self::IntoIter {
        self.observables.iter()
    }
}
