//! The lattice of partial parameter bindings.
//!
//! A [`ParamInstance`] is a finite partial map from parameter names to
//! opaque values. Instances are ordered by informativeness (`a ⊑ b` when `b`
//! extends `a`), two instances are compatible when they agree on their
//! common parameters, and compatible instances have a least upper bound that
//! merges both bindings. The empty instance is the bottom element.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default bound on `|Dom(θ)|` for sub-instance enumeration.
pub const DEFAULT_CAP: usize = 10;

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_value_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '=')
}

/// A parameter name such as `r` or `iter_1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamName(Arc<str>);

impl ParamName {
    pub fn new(name: &str) -> Result<Self> {
        if is_identifier(name) {
            Ok(ParamName(Arc::from(name)))
        } else {
            Err(Error::InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An opaque parameter value. Only equality is meaningful.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamValue(Arc<str>);

impl ParamValue {
    pub fn new(value: &str) -> Result<Self> {
        if is_value_token(value) {
            Ok(ParamValue(Arc::from(value)))
        } else {
            Err(Error::InvalidValue(value.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Repr {
    bindings: Box<[(ParamName, ParamValue)]>,
    key: Box<str>,
}

/// A parameter instance θ: finite partial map `ParamName → ParamValue`.
///
/// Bindings are kept sorted by name. The canonical encoding (`name=value`
/// pairs joined by `,`) is computed once and used for hashing, equality and
/// the deterministic ordering (domain cardinality first, then encoding).
/// Cloning is a reference-count bump.
#[derive(Clone)]
pub struct ParamInstance(Arc<Repr>);

impl ParamInstance {
    /// The bottom instance ⊥, undefined everywhere.
    pub fn bottom() -> Self {
        ParamInstance(Arc::new(Repr { bindings: Box::new([]), key: Box::from("") }))
    }

    /// Builds an instance from bindings in any order.
    pub fn from_bindings<I>(bindings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ParamName, ParamValue)>,
    {
        let mut v: Vec<(ParamName, ParamValue)> = bindings.into_iter().collect();
        v.sort_by(|a, b| a.0.as_str().as_bytes().cmp(b.0.as_str().as_bytes()));
        for w in v.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateParam { param: w[0].0.to_string(), line: None });
            }
        }
        Ok(Self::from_sorted(v))
    }

    /// Convenience constructor from string pairs.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let mut v = Vec::with_capacity(pairs.len());
        for (n, val) in pairs {
            v.push((ParamName::new(n)?, ParamValue::new(val)?));
        }
        Self::from_bindings(v)
    }

    fn from_sorted(bindings: Vec<(ParamName, ParamValue)>) -> Self {
        let mut key = String::new();
        for (i, (n, v)) in bindings.iter().enumerate() {
            if i > 0 {
                key.push(',');
            }
            key.push_str(n.as_str());
            key.push('=');
            key.push_str(v.as_str());
        }
        ParamInstance(Arc::new(Repr { bindings: bindings.into_boxed_slice(), key: key.into_boxed_str() }))
    }

    /// Parses the canonical encoding, e.g. `a=a1,b=b1`. The empty string is ⊥.
    ///
    /// Values may contain `,` but never `=`, so a segment between two `=`
    /// splits at its last comma into the previous value and the next name.
    pub fn parse_canonical(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::bottom());
        }
        let bad = || Error::InvalidInstance(text.to_string());
        let segments: Vec<&str> = text.split('=').collect();
        if segments.len() < 2 {
            return Err(bad());
        }
        let mut names = vec![segments[0]];
        let mut values = Vec::new();
        for seg in &segments[1..segments.len() - 1] {
            let cut = seg.rfind(',').ok_or_else(bad)?;
            values.push(&seg[..cut]);
            names.push(&seg[cut + 1..]);
        }
        values.push(segments[segments.len() - 1]);
        let mut bindings = Vec::with_capacity(names.len());
        for (n, v) in names.into_iter().zip(values) {
            bindings.push((ParamName::new(n)?, ParamValue::new(v)?));
        }
        Self::from_bindings(bindings)
    }

    pub fn is_bottom(&self) -> bool {
        self.0.bindings.is_empty()
    }

    /// `|Dom(θ)|`.
    pub fn len(&self) -> usize {
        self.0.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.bindings.is_empty()
    }

    pub fn bindings(&self) -> &[(ParamName, ParamValue)] {
        &self.0.bindings
    }

    pub fn get(&self, name: &ParamName) -> Option<&ParamValue> {
        self.0
            .bindings
            .binary_search_by(|(n, _)| n.as_str().as_bytes().cmp(name.as_str().as_bytes()))
            .ok()
            .map(|i| &self.0.bindings[i].1)
    }

    pub fn names(&self) -> impl Iterator<Item = &ParamName> {
        self.0.bindings.iter().map(|(n, _)| n)
    }

    /// The canonical encoding used as the set key.
    pub fn canonical(&self) -> &str {
        &self.0.key
    }

    /// Restriction of this instance to the bindings selected by `mask`
    /// (bit `i` keeps the `i`-th binding in name order).
    pub(crate) fn restrict_mask(&self, mask: u64) -> ParamInstance {
        let kept = self
            .0
            .bindings
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1u64 << i) != 0)
            .map(|(_, b)| b.clone())
            .collect();
        Self::from_sorted(kept)
    }
}

impl PartialEq for ParamInstance {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.key == other.0.key
    }
}

impl Eq for ParamInstance {}

impl Hash for ParamInstance {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.key.hash(state);
    }
}

impl Ord for ParamInstance {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.key.as_bytes().cmp(other.0.key.as_bytes()))
    }
}

impl PartialOrd for ParamInstance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ParamInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.key)
    }
}

impl fmt::Debug for ParamInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self.0.key)
    }
}

/// `a ⊑ b`: `Dom(a) ⊆ Dom(b)` and the two agree on `Dom(a)`.
pub fn less_informative(a: &ParamInstance, b: &ParamInstance) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let (xs, ys) = (a.bindings(), b.bindings());
    let mut j = 0;
    for (name, value) in xs {
        loop {
            if j == ys.len() {
                return false;
            }
            match ys[j].0.as_str().as_bytes().cmp(name.as_str().as_bytes()) {
                Ordering::Less => j += 1,
                Ordering::Equal => break,
                Ordering::Greater => return false,
            }
        }
        if ys[j].1 != *value {
            return false;
        }
        j += 1;
    }
    true
}

/// `a ⊏ b`: less informative and distinct.
pub fn strictly_less_informative(a: &ParamInstance, b: &ParamInstance) -> bool {
    a.len() < b.len() && less_informative(a, b)
}

/// Agreement on every parameter both instances bind.
pub fn compatible(a: &ParamInstance, b: &ParamInstance) -> bool {
    let (xs, ys) = (a.bindings(), b.bindings());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].0.as_str().as_bytes().cmp(ys[j].0.as_str().as_bytes()) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                if xs[i].1 != ys[j].1 {
                    return false;
                }
                i += 1;
                j += 1;
            }
        }
    }
    true
}

/// Result of a binary least upper bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lub {
    Defined(ParamInstance),
    Incompatible,
}

impl Lub {
    pub fn defined(self) -> Option<ParamInstance> {
        match self {
            Lub::Defined(t) => Some(t),
            Lub::Incompatible => None,
        }
    }
}

/// `a ⊔ b`, or [`Lub::Incompatible`] when the two disagree somewhere.
pub fn lub(a: &ParamInstance, b: &ParamInstance) -> Lub {
    if less_informative(a, b) {
        return Lub::Defined(b.clone());
    }
    if less_informative(b, a) {
        return Lub::Defined(a.clone());
    }
    let (xs, ys) = (a.bindings(), b.bindings());
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() || j < ys.len() {
        let ord = match (xs.get(i), ys.get(j)) {
            (Some(x), Some(y)) => x.0.as_str().as_bytes().cmp(y.0.as_str().as_bytes()),
            (Some(_), None) => Ordering::Less,
            (None, _) => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(xs[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(ys[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                if xs[i].1 != ys[j].1 {
                    return Lub::Incompatible;
                }
                out.push(xs[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    Lub::Defined(ParamInstance::from_sorted(out))
}

/// A finite set of instances iterated in ascending (cardinality, encoding)
/// order.
///
/// The `closed` flag records that the set is known to be lub closed; it is
/// only ever set by [`lub_closure`] or after [`is_lub_closed`] succeeds.
#[derive(Clone, Default)]
pub struct InstanceSet {
    members: BTreeSet<ParamInstance>,
    closed: bool,
}

impl PartialEq for InstanceSet {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for InstanceSet {}

impl InstanceSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{⊥}`, which is lub closed.
    pub fn bottom_only() -> Self {
        let mut members = BTreeSet::new();
        members.insert(ParamInstance::bottom());
        InstanceSet { members, closed: true }
    }

    pub fn insert(&mut self, theta: ParamInstance) -> bool {
        let added = self.members.insert(theta);
        if added {
            self.closed = false;
        }
        added
    }

    pub fn contains(&self, theta: &ParamInstance) -> bool {
        self.members.contains(theta)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ParamInstance> {
        self.members.iter()
    }

    pub fn is_known_closed(&self) -> bool {
        self.closed
    }

    /// Marks the set closed after checking it.
    pub fn check_closed(&mut self) -> bool {
        self.closed = is_lub_closed(self);
        self.closed
    }

    pub fn union(&self, other: &InstanceSet) -> InstanceSet {
        let members = self.members.union(&other.members).cloned().collect();
        InstanceSet { members, closed: false }
    }

    pub fn is_subset(&self, other: &InstanceSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

impl FromIterator<ParamInstance> for InstanceSet {
    fn from_iter<I: IntoIterator<Item = ParamInstance>>(iter: I) -> Self {
        InstanceSet { members: iter.into_iter().collect(), closed: false }
    }
}

impl IntoIterator for InstanceSet {
    type Item = ParamInstance;
    type IntoIter = std::collections::btree_set::IntoIter<ParamInstance>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

impl<'a> IntoIterator for &'a InstanceSet {
    type Item = &'a ParamInstance;
    type IntoIter = std::collections::btree_set::Iter<'a, ParamInstance>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl fmt::Debug for InstanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

/// `{θ} ⊔ Θ`: every defined lub of `singleton` with a member of `theta_set`.
pub fn lub_set(singleton: &ParamInstance, theta_set: &InstanceSet) -> InstanceSet {
    theta_set.iter().filter_map(|t| lub(singleton, t).defined()).collect()
}

/// `A ⊔ B` for two families: all defined pairwise lubs.
pub fn lub_families(a: &InstanceSet, b: &InstanceSet) -> InstanceSet {
    let mut out = InstanceSet::new();
    for x in a {
        for y in b {
            if let Lub::Defined(t) = lub(x, y) {
                out.insert(t);
            }
        }
    }
    out
}

/// Whether `theta_set` contains ⊥ and every pairwise lub of its members.
///
/// For finite sets this is equivalent to closure under lubs of all bounded
/// subsets, since ⊔ is associative.
pub fn is_lub_closed(theta_set: &InstanceSet) -> bool {
    if !theta_set.contains(&ParamInstance::bottom()) {
        return false;
    }
    let members: Vec<&ParamInstance> = theta_set.iter().collect();
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if let Lub::Defined(t) = lub(a, b) {
                if !theta_set.contains(&t) {
                    return false;
                }
            }
        }
    }
    true
}

/// The smallest lub-closed superset of `theta_set`.
pub fn lub_closure(theta_set: &InstanceSet) -> InstanceSet {
    let mut closed = InstanceSet::bottom_only();
    for theta in theta_set {
        if closed.contains(theta) {
            continue;
        }
        // {⊥,θ} ⊔ Θ̄ is the closure of Θ̄ ∪ {θ} when Θ̄ is closed.
        let grown = lub_set(theta, &closed);
        for t in grown {
            closed.members.insert(t);
        }
    }
    closed.closed = true;
    closed
}

/// All strict restrictions of `theta`, most informative first.
///
/// Ordered by decreasing domain size, ties by canonical encoding. The
/// sequence has `2^|Dom(θ)| - 1` entries and ends with ⊥ (unless `theta` is
/// ⊥ itself, which has none).
pub fn strict_subinstances_desc(theta: &ParamInstance, cap: usize) -> Result<Vec<ParamInstance>> {
    let n = theta.len();
    if n > cap || n >= 64 {
        return Err(Error::CapExceeded { size: n, cap });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let full = (1u64 << n) - 1;
    let mut subs: Vec<ParamInstance> = (0..full).map(|m| theta.restrict_mask(m)).collect();
    subs.sort_by(|a, b| {
        b.len().cmp(&a.len()).then_with(|| a.canonical().as_bytes().cmp(b.canonical().as_bytes()))
    });
    Ok(subs)
}

/// `max (θ]_Θ`, the most informative member of `theta_set` below `theta`.
///
/// Scans `theta` and then its strict restrictions in descending order and
/// returns the first member found. When the set is not known to be lub
/// closed the candidate is checked against every member below `theta`, and
/// [`Error::NoUniqueMax`] is returned if it does not dominate them all.
pub fn max_below(theta: &ParamInstance, theta_set: &InstanceSet, cap: usize) -> Result<ParamInstance> {
    let found = first_member_below(theta, |t| theta_set.contains(t), cap)?;
    if theta_set.is_known_closed() {
        return found.ok_or_else(|| Error::NoUniqueMax(theta.to_string()));
    }
    let candidate = found.ok_or_else(|| Error::NoUniqueMax(theta.to_string()))?;
    let dominates = theta_set
        .iter()
        .filter(|t| less_informative(t, theta))
        .all(|t| less_informative(t, &candidate));
    if dominates {
        Ok(candidate)
    } else {
        Err(Error::NoUniqueMax(theta.to_string()))
    }
}

/// Descending scan used by the engines: `theta` itself first, then its
/// strict restrictions, returning the first one satisfying `is_member`.
pub(crate) fn first_member_below<F>(theta: &ParamInstance, is_member: F, cap: usize) -> Result<Option<ParamInstance>>
where
    F: Fn(&ParamInstance) -> bool,
{
    if is_member(theta) {
        return Ok(Some(theta.clone()));
    }
    Ok(strict_subinstances_desc(theta, cap)?.into_iter().find(|t| is_member(t)))
}
