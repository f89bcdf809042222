//! Mod-2 Schubert calculus on the real Grassmannian `G_n(R^N)`.
//!
//! A Schubert cocycle is a nondecreasing sequence `(a_1, ..., a_n)` with every
//! entry in `[0, N - n]`; its degree is the entry sum. Cohomology classes with
//! `F_2` coefficients are finite sets of cocycles. Products with the
//! Stiefel-Whitney classes of the tautological bundle use the two Pieri rules:
//!
//! * `w̄_j = (0, ..., 0, j)`: horizontal strips, `a_i <= b_i <= a_{i+1}` with
//!   `a_{n+1} = N - n` and total degree raised by `j`;
//! * `w_i = (0, ..., 0, 1, ..., 1)` (`i` ones): vertical strips, each entry
//!   raised by at most one, sequence still nondecreasing and inside the box.
//!
//! The vertical rule is cross-checked against the horizontal one through the
//! Whitney relation `sum_{i+j=d} w_i w̄_j = 0` (see the tests).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// The Grassmannian of `n`-planes in `R^(n + codim)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrassmannContext {
    n: usize,
    codim: usize,
}

impl GrassmannContext {
    pub fn new(n: usize, codim: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("Grassmannian needs n >= 1"));
        }
        Ok(Self { n, codim })
    }

    /// Context for `G_n(R^ambient)`.
    pub fn from_ambient(n: usize, ambient: usize) -> Result<Self> {
        if ambient < n {
            return Err(domain(format!("ambient dimension {ambient} is smaller than n = {n}")));
        }
        Self::new(n, ambient - n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn ambient(&self) -> usize {
        self.n + self.codim
    }

    pub fn top_degree(&self) -> usize {
        self.n * self.codim
    }

    fn check(&self, parts: &[usize]) -> Result<()> {
        if parts.len() != self.n {
            return Err(domain(format!("cocycle has {} entries, expected {}", parts.len(), self.n)));
        }
        if parts.windows(2).any(|w| w[0] > w[1]) {
            return Err(domain(format!("cocycle {parts:?} is not nondecreasing")));
        }
        if parts.last().is_some_and(|&a| a > self.codim) {
            return Err(domain(format!("cocycle {parts:?} leaves the {}x{} box", self.n, self.codim)));
        }
        Ok(())
    }
}

/// A Schubert cocycle `(a_1 <= ... <= a_n)` valid in some context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchubertCocycle(Vec<usize>);

impl SchubertCocycle {
    pub fn new(ctx: &GrassmannContext, parts: Vec<usize>) -> Result<Self> {
        ctx.check(&parts)?;
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for SchubertCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// The distinguished special classes of the tautological bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialClass {
    /// `w_i(γ)`, a vertical strip of length `i`.
    W(usize),
    /// `w̄_j(γ)`, the dual class, a horizontal strip of length `j`.
    WBar(usize),
}

/// An `F_2`-linear combination of Schubert cocycles.
///
/// The support is kept sorted and duplicate-free, so equality of cochains is
/// equality of classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    ctx: GrassmannContext,
    support: BTreeSet<Vec<usize>>,
}

impl Cochain {
    pub fn zero(ctx: GrassmannContext) -> Self {
        Self { ctx, support: BTreeSet::new() }
    }

    pub fn unit(ctx: GrassmannContext) -> Self {
        Self::single(ctx, vec![0; ctx.n])
    }

    fn single(ctx: GrassmannContext, parts: Vec<usize>) -> Self {
        let mut support = BTreeSet::new();
        support.insert(parts);
        Self { ctx, support }
    }

    /// Sums the given cocycles mod 2 (a cocycle listed twice cancels).
    pub fn from_cocycles<I>(ctx: GrassmannContext, cocycles: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut out = Self::zero(ctx);
        for parts in cocycles {
            ctx.check(&parts)?;
            out.toggle(parts);
        }
        Ok(out)
    }

    pub fn context(&self) -> GrassmannContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, parts: &[usize]) -> bool {
        self.support.contains(parts)
    }

    /// Cocycles in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &[usize]> {
        self.support.iter().map(Vec::as_slice)
    }

    /// Common degree of all members; `None` for the zero class or a mixed sum.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.support.iter().map(|a| a.iter().sum::<usize>());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    fn toggle(&mut self, parts: Vec<usize>) {
        if !self.support.remove(&parts) {
            self.support.insert(parts);
        }
    }

    fn same_context(&self, other: &Cochain) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(domain("cochains live in different Grassmannians"));
        }
        Ok(())
    }

    /// Sum over `F_2` (symmetric difference of supports).
    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.same_context(other)?;
        Ok(Cochain {
            ctx: self.ctx,
            support: self.support.symmetric_difference(&other.support).cloned().collect(),
        })
    }

    /// Multiplication by `w̄_j` (horizontal-strip Pieri rule).
    pub fn pieri_special(&self, j: usize) -> Result<Cochain> {
        if j > self.ctx.codim {
            return Err(domain(format!("w̄_{j} needs j <= codim = {}", self.ctx.codim)));
        }
        let mut out = Cochain::zero(self.ctx);
        let mut buf = Vec::with_capacity(self.ctx.n);
        for a in &self.support {
            let target = a.iter().sum::<usize>() + j;
            horizontal_strips(a, self.ctx.codim, 0, target, &mut buf, &mut |b| out.toggle(b.to_vec()));
        }
        Ok(out)
    }

    /// Multiplication by `w_i` (vertical-strip Pieri rule).
    pub fn pieri_dual(&self, i: usize) -> Result<Cochain> {
        if i > self.ctx.n {
            return Err(domain(format!("w_{i} needs i <= n = {}", self.ctx.n)));
        }
        let mut out = Cochain::zero(self.ctx);
        let mut buf = Vec::with_capacity(self.ctx.n);
        for a in &self.support {
            vertical_strips(a, self.ctx.codim, i, &mut buf, &mut |b| out.toggle(b.to_vec()));
        }
        Ok(out)
    }

    pub fn times(&self, class: SpecialClass) -> Result<Cochain> {
        match class {
            SpecialClass::W(i) => self.pieri_dual(i),
            SpecialClass::WBar(j) => self.pieri_special(j),
        }
    }

    /// Multiplies by each special class in turn.
    pub fn times_all(&self, classes: &[SpecialClass]) -> Result<Cochain> {
        classes.iter().try_fold(self.clone(), |acc, &c| acc.times(c))
    }

    pub fn to_repr(&self) -> CochainRepr {
        CochainRepr {
            n: self.ctx.n,
            codim: self.ctx.codim,
            support: self.support.iter().cloned().collect(),
        }
    }
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        for (k, a) in self.support.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", SchubertCocycle(a.clone()))?;
        }
        Ok(())
    }
}

/// Serialized form: `{"n": .., "codim": .., "support": [[a_1, ..., a_n], ...]}`
/// with the support in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainRepr {
    pub n: usize,
    pub codim: usize,
    pub support: Vec<Vec<usize>>,
}

impl TryFrom<CochainRepr> for Cochain {
    type Error = Error;

    fn try_from(r: CochainRepr) -> Result<Self> {
        let ctx = GrassmannContext::new(r.n, r.codim)?;
        let mut out = Cochain::zero(ctx);
        for a in r.support {
            ctx.check(&a)?;
            if !out.support.insert(a.clone()) {
                return Err(Error::Parse(format!("duplicate cocycle {a:?} in support")));
            }
        }
        Ok(out)
    }
}

impl Serialize for Cochain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cochain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CochainRepr::deserialize(d)?;
        Cochain::try_from(r).map_err(serde::de::Error::custom)
    }
}

// Depth-first generation of b with a_k <= b_k <= a_{k+1} and sum(b) = target.
fn horizontal_strips(
    a: &[usize],
    codim: usize,
    k: usize,
    target: usize,
    buf: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let n = a.len();
    if k == n {
        if target == 0 {
            emit(buf);
        }
        return;
    }
    let upper = |i: usize| if i + 1 < n { a[i + 1] } else { codim };
    // Feasible range for the remaining entries k+1..n.
    let rest_min: usize = a[k + 1..].iter().sum();
    let rest_max: usize = (k + 1..n).map(upper).sum();
    let lo = a[k].max(target.saturating_sub(rest_max));
    let hi = upper(k).min(target.saturating_sub(rest_min));
    if target < rest_min || lo > hi {
        return;
    }
    for b in lo..=hi {
        buf.push(b);
        horizontal_strips(a, codim, k + 1, target - b, buf, emit);
        buf.pop();
    }
}

// Depth-first generation of b = a + e, e in {0,1}^n with |e| = remaining,
// b nondecreasing and b_n <= codim.
fn vertical_strips(a: &[usize], codim: usize, remaining: usize, buf: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    let k = buf.len();
    let n = a.len();
    if remaining > n - k {
        return;
    }
    if k == n {
        emit(buf);
        return;
    }
    for bump in 0..=1usize.min(remaining) {
        let b = a[k] + bump;
        if b > codim || buf.last().is_some_and(|&prev| prev > b) {
            continue;
        }
        buf.push(b);
        vertical_strips(a, codim, remaining - bump, buf, emit);
        buf.pop();
    }
}

/// `w_i` (`(0,..,0,1,..,1)` with `i` ones) or `w̄_j` (`(0,..,0,j)`) as a cochain.
pub fn special_class(ctx: GrassmannContext, class: SpecialClass) -> Result<Cochain> {
    let n = ctx.n;
    match class {
        SpecialClass::W(i) => {
            if i > n {
                return Err(domain(format!("w_{i} is undefined for n = {n}")));
            }
            if i > 0 && ctx.codim == 0 {
                return Ok(Cochain::zero(ctx));
            }
            let parts = (0..n).map(|k| usize::from(k >= n - i)).collect();
            Ok(Cochain::single(ctx, parts))
        }
        SpecialClass::WBar(j) => {
            if j > ctx.codim {
                return Err(domain(format!("w̄_{j} is undefined for codim = {}", ctx.codim)));
            }
            let mut parts = vec![0; n];
            parts[n - 1] = j;
            Ok(Cochain::single(ctx, parts))
        }
    }
}

/// `w_n^k`, which is the single cocycle `(k, ..., k)` inside the box and zero beyond it.
pub fn wn_power(ctx: GrassmannContext, k: usize) -> Cochain {
    if k > ctx.codim {
        Cochain::zero(ctx)
    } else {
        Cochain::single(ctx, vec![k; ctx.n])
    }
}

/// `prod_i w_i^{e_i}` by iterated vertical-strip multiplication from the unit.
pub fn monomial(ctx: GrassmannContext, exponents: &[usize]) -> Result<Cochain> {
    if exponents.len() > ctx.n {
        return Err(domain(format!("{} exponents given for n = {}", exponents.len(), ctx.n)));
    }
    let mut acc = Cochain::unit(ctx);
    for (idx, &e) in exponents.iter().enumerate() {
        for _ in 0..e {
            if acc.is_zero() {
                return Ok(acc);
            }
            acc = acc.pieri_dual(idx + 1)?;
        }
    }
    Ok(acc)
}

pub fn is_power_of_two(x: usize) -> bool {
    x != 0 && x & (x - 1) == 0
}

/// Smallest ambient dimension for which the improved depth is guaranteed:
/// `2m + n - 1`, or `3m + n - 1` when `n + 1` is a power of two.
pub fn min_dimension(m: usize, n: usize) -> Result<usize> {
    if m < 1 || n < 2 {
        return Err(domain("min_dimension needs m >= 1 and n >= 2"));
    }
    Ok(if is_power_of_two(n + 1) { 3 * m + n - 1 } else { 2 * m + n - 1 })
}

/// Largest `k` with `w_1^k != 0`.
pub fn height_w1(ctx: GrassmannContext) -> usize {
    let mut acc = Cochain::unit(ctx);
    let mut k = 0;
    loop {
        acc = acc.pieri_dual(1).expect("w_1 exists for n >= 1");
        if acc.is_zero() {
            return k;
        }
        k += 1;
    }
}

/// Outcome of the `w_1^m w_n^{2m-1}` nonvanishing check in `G_n(R^{3m+n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainObstructionReport {
    pub m: usize,
    pub n: usize,
    pub ambient: usize,
    pub product: Cochain,
    /// The cocycle `(2m-1, ..., 2m-1, 3m-1)`.
    pub leading: Vec<usize>,
    pub nonzero: bool,
    pub contains_leading: bool,
}

impl MainObstructionReport {
    pub fn passed(&self) -> bool {
        self.nonzero && self.contains_leading
    }
}

pub fn obstruction_main(m: usize, n: usize) -> Result<MainObstructionReport> {
    if m < 1 || n < 2 {
        return Err(domain("obstruction_main needs m >= 1 and n >= 2"));
    }
    let ctx = GrassmannContext::new(n, 3 * m - 1)?;
    let mut exponents = vec![0; n];
    exponents[0] = m;
    exponents[n - 1] += 2 * m - 1;
    let product = monomial(ctx, &exponents)?;
    let mut leading = vec![2 * m - 1; n];
    leading[n - 1] = 3 * m - 1;
    Ok(MainObstructionReport {
        m,
        n,
        ambient: ctx.ambient(),
        nonzero: !product.is_zero(),
        contains_leading: product.contains(&leading),
        product,
        leading,
    })
}

/// Outcome of the `w_n^{N-n}` check in `G_n(R^{2m+n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Power2FreeReport {
    pub m: usize,
    pub n: usize,
    pub ambient: usize,
    /// True when `n + 1` is a power of two, i.e. outside this case's hypothesis.
    pub n_plus_one_power_of_two: bool,
    pub full_power: Cochain,
    pub full_power_nonzero: bool,
    /// `w_n^{N-n-m+1}`, the class restricted to the coincidence set.
    pub restricted_power: Cochain,
    pub restricted_power_nonzero: bool,
}

impl Power2FreeReport {
    pub fn passed(&self) -> bool {
        self.full_power_nonzero && self.restricted_power_nonzero
    }
}

pub fn obstruction_power2free(m: usize, n: usize) -> Result<Power2FreeReport> {
    if m < 1 || n < 2 {
        return Err(domain("obstruction_power2free needs m >= 1 and n >= 2"));
    }
    let ctx = GrassmannContext::new(n, 2 * m - 1)?;
    let full_power = wn_power(ctx, ctx.codim());
    let restricted_power = wn_power(ctx, ctx.codim() + 1 - m);
    Ok(Power2FreeReport {
        m,
        n,
        ambient: ctx.ambient(),
        n_plus_one_power_of_two: is_power_of_two(n + 1),
        full_power_nonzero: !full_power.is_zero(),
        restricted_power_nonzero: !restricted_power.is_zero(),
        full_power,
        restricted_power,
    })
}

/// Checks `sum_{i+j=d} w_i w̄_j = 0` for every `1 <= d <= n + codim`.
/// Returns the first degree where the identity fails, if any.
pub fn whitney_violation(ctx: GrassmannContext) -> Option<usize> {
    for d in 1..=ctx.n + ctx.codim {
        let mut total = Cochain::zero(ctx);
        for i in 0..=d.min(ctx.n) {
            let j = d - i;
            if j > ctx.codim {
                continue;
            }
            let w = special_class(ctx, SpecialClass::W(i)).expect("i <= n");
            let term = w.pieri_special(j).expect("j <= codim");
            total = total.add(&term).expect("same context");
        }
        if !total.is_zero() {
            return Some(d);
        }
    }
    None
}
