//! Second homology of blow-ups of CP² and of ruled surfaces.
//!
//! A [`Basis`] fixes the intersection form and the first Chern class; a
//! [`HomologyClass`] is an integer vector in it. [`SymplecticData`] assigns
//! areas to the basis. On top of this sit the exceptional-class enumeration,
//! general blow-downs through lattice isometries, minimal blow-down chains
//! and the capacity threshold below which `E_k` is the only minimal class.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::rational::{floor, floor_sqrt, qi, Q};
use crate::Result;

/// Leading-coefficient cap used when callers do not pass their own.
pub const DEFAULT_SEARCH_CEILING: u64 = 64;

// Enumeration works in i128; keep squares of the leading coefficient far from overflow.
const HARD_CEILING: u64 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    Rational,
    ProductRuled,
    TwistedRuled,
}

/// `Rational`: symbols L, E1..Ek. Ruled: B, F, E1..Ek.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis {
    pub kind: BasisKind,
    pub genus: u32,
    pub k: usize,
}

impl Basis {
    pub fn rational(k: usize) -> Self {
        Basis { kind: BasisKind::Rational, genus: 0, k }
    }

    pub fn product_ruled(genus: u32, k: usize) -> Self {
        Basis { kind: BasisKind::ProductRuled, genus, k }
    }

    pub fn twisted_ruled(genus: u32, k: usize) -> Self {
        Basis { kind: BasisKind::TwistedRuled, genus, k }
    }

    pub fn with_k(self, k: usize) -> Self {
        Basis { k, ..self }
    }

    pub fn is_ruled(&self) -> bool {
        self.kind != BasisKind::Rational
    }

    /// CP² blow-ups and genus-zero ruled surfaces.
    pub fn is_rational_surface(&self) -> bool {
        self.genus == 0
    }

    pub fn base_rank(&self) -> usize {
        if self.is_ruled() {
            2
        } else {
            1
        }
    }

    pub fn rank(&self) -> usize {
        self.base_rank() + self.k
    }

    /// Position of `E_j` (1-based) in the coefficient vector.
    pub fn e_index(&self, j: usize) -> usize {
        self.base_rank() + j - 1
    }

    pub fn pairing(&self, i: usize, j: usize) -> i64 {
        let br = self.base_rank();
        if i >= br || j >= br {
            return if i == j { -1 } else { 0 };
        }
        match (self.kind, i, j) {
            (BasisKind::Rational, _, _) => 1,
            (_, 0, 1) | (_, 1, 0) => 1,
            (_, 1, 1) => 0,
            (BasisKind::ProductRuled, _, _) => 0,
            _ => -1,
        }
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n).map(|i| (0..n).map(|j| self.pairing(i, j)).collect()).collect()
    }

    pub fn chern(&self, i: usize) -> i64 {
        let g = i64::from(self.genus);
        match (self.kind, i) {
            (BasisKind::Rational, 0) => 3,
            (BasisKind::ProductRuled, 0) => 2 - 2 * g,
            (BasisKind::TwistedRuled, 0) => 1 - 2 * g,
            (BasisKind::Rational, _) => 1,
            (_, 1) => 2,
            _ => 1,
        }
    }

    pub fn symbol(&self, i: usize) -> String {
        let br = self.base_rank();
        if i >= br {
            return format!("E{}", i - br + 1);
        }
        match (self.kind, i) {
            (BasisKind::Rational, _) => "L".into(),
            (_, 0) => "B".into(),
            _ => "F".into(),
        }
    }

    /// Solves `Q y = v` for the intersection matrix `Q`.
    pub fn solve_gram(&self, v: &[Q]) -> Vec<Q> {
        let br = self.base_rank();
        let mut y: Vec<Q> = v.iter().map(|x| -x).collect();
        match self.kind {
            BasisKind::Rational => y[0] = v[0].clone(),
            BasisKind::ProductRuled => {
                y[0] = v[1].clone();
                y[1] = v[0].clone();
            }
            BasisKind::TwistedRuled => {
                y[0] = v[1].clone();
                y[1] = &v[0] + &v[1];
            }
        }
        debug_assert!(y.len() >= br);
        y
    }

    /// `uᵀ Q⁻¹ v`.
    pub fn dual_pairing(&self, u: &[Q], v: &[Q]) -> Q {
        let y = self.solve_gram(v);
        u.iter().zip(&y).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BasisKind::Rational => write!(f, "Rational({})", self.k),
            BasisKind::ProductRuled => write!(f, "ProductRuled({},{})", self.genus, self.k),
            BasisKind::TwistedRuled => write!(f, "TwistedRuled({},{})", self.genus, self.k),
        }
    }
}

/// Counts (positive, negative, zero) eigenvalues of a symmetric integer
/// matrix by rational congruence diagonalisation.
pub fn signature(gram: &[Vec<i64>]) -> (usize, usize, usize) {
    let n = gram.len();
    let mut m: Vec<Vec<Q>> = gram.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut alive: Vec<usize> = (0..n).collect();
    while let Some(&first) = alive.first() {
        let pivot = alive.iter().copied().find(|&i| !m[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // zero diagonal: make one nonzero via row/column i += j
                let pair = alive
                    .iter()
                    .flat_map(|&i| alive.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !m[i][j].is_zero());
                match pair {
                    Some((i, j)) => {
                        for r in 0..n {
                            let v = m[r][j].clone();
                            m[r][i] += v;
                        }
                        for c in 0..n {
                            let v = m[j][c].clone();
                            m[i][c] += v;
                        }
                        i
                    }
                    None => {
                        zero += alive.len();
                        let _ = first;
                        break;
                    }
                }
            }
        };
        let d = m[p][p].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        alive.retain(|&i| i != p);
        for &i in &alive {
            let f = &m[i][p] / &d;
            for &j in &alive {
                let v = &f * &m[p][j];
                m[i][j] -= v;
            }
        }
        for &i in &alive {
            m[i][p] = Q::zero();
            m[p][i] = Q::zero();
        }
    }
    (pos, neg, zero)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyClass {
    basis: Basis,
    coeffs: Vec<BigInt>,
}

impl HomologyClass {
    pub fn new(basis: Basis, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() != basis.rank() {
            return Err(Error::Precondition(format!(
                "{} coefficients given for a basis of rank {}",
                coeffs.len(),
                basis.rank()
            )));
        }
        Ok(HomologyClass { basis, coeffs })
    }

    pub fn from_i64(basis: Basis, coeffs: &[i64]) -> Result<Self> {
        Self::new(basis, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(basis: Basis) -> Self {
        HomologyClass { basis, coeffs: vec![BigInt::zero(); basis.rank()] }
    }

    pub fn unit(basis: Basis, i: usize) -> Self {
        let mut c = Self::zero(basis);
        c.coeffs[i] = BigInt::one();
        c
    }

    /// `L` for rational bases, `B` for ruled ones.
    pub fn base_class(basis: Basis) -> Self {
        Self::unit(basis, 0)
    }

    pub fn fiber(basis: Basis) -> Self {
        assert!(basis.is_ruled(), "fiber class needs a ruled basis");
        Self::unit(basis, 1)
    }

    /// `E_j`, 1-based.
    pub fn exceptional(basis: Basis, j: usize) -> Self {
        assert!(j >= 1 && j <= basis.k, "no E{j} in {basis}");
        Self::unit(basis, basis.e_index(j))
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch(self.basis.to_string(), other.basis.to_string()))
        }
    }

    pub fn intersect(&self, other: &Self) -> Result<BigInt> {
        self.same_basis(other)?;
        Ok(self.dot_unchecked(other))
    }

    fn dot_unchecked(&self, other: &Self) -> BigInt {
        let b = &self.basis;
        let br = b.base_rank();
        let mut s = BigInt::zero();
        for i in 0..br {
            for j in 0..br {
                let p = b.pairing(i, j);
                if p != 0 {
                    s += &self.coeffs[i] * &other.coeffs[j] * p;
                }
            }
        }
        for i in br..b.rank() {
            s -= &self.coeffs[i] * &other.coeffs[i];
        }
        s
    }

    pub fn square(&self) -> BigInt {
        self.dot_unchecked(self)
    }

    pub fn chern(&self) -> BigInt {
        self.coeffs.iter().enumerate().map(|(i, c)| c * self.basis.chern(i)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index `i` if this is the basis vector `e_i`.
    pub fn as_unit(&self) -> Option<usize> {
        let mut hit = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_one() && hit.is_none() {
                hit = Some(i);
            } else if !c.is_zero() {
                return None;
            }
        }
        hit
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.basis, other.basis);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        HomologyClass { basis: self.basis, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&BigInt::from(-1)))
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        HomologyClass { basis: self.basis, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Reflection in a root `r` (r·r = −2): `x ↦ x + (x·r) r`.
    pub fn reflect(&self, r: &Self) -> Self {
        self.add(&r.scaled(&self.dot_unchecked(r)))
    }

    /// Rewrites a class given in a frame: `Σ cᵢ frame[i]`.
    pub fn expand_in(&self, frame: &[HomologyClass]) -> HomologyClass {
        let mut acc = HomologyClass::zero(frame[0].basis);
        for (c, f) in self.coeffs.iter().zip(frame) {
            if !c.is_zero() {
                acc = acc.add(&f.scaled(c));
            }
        }
        acc
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sym = self.basis.symbol(i);
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{sym}")?;
            } else {
                write!(f, "{mag}{sym}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A class with rational coefficients, e.g. the Poincaré dual of ω.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalClass {
    pub basis: Basis,
    pub coeffs: Vec<Q>,
}

impl RationalClass {
    /// `Q·coeffs`: the functional `X ↦ self·X` on basis vectors.
    pub fn pairing_vector(&self) -> Vec<Q> {
        let n = self.basis.rank();
        (0..n)
            .map(|i| (0..n).map(|j| &self.coeffs[j] * qi(self.basis.pairing(i, j))).sum())
            .collect()
    }

    pub fn square(&self) -> Q {
        self.pairing_vector().iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn dot(&self, x: &HomologyClass) -> Q {
        self.pairing_vector().iter().zip(x.coeffs()).map(|(a, c)| a * Q::from_integer(c.clone())).sum()
    }
}

impl From<&HomologyClass> for RationalClass {
    fn from(c: &HomologyClass) -> Self {
        RationalClass { basis: c.basis, coeffs: c.coeffs.iter().map(|x| Q::from_integer(x.clone())).collect() }
    }
}

/// Areas of a blow-up recipe in a fixed basis.
///
/// `base_areas` is `[λ]` for rational bases and `[μ, f]` (areas of `B` and
/// `F`) for ruled ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticData {
    basis: Basis,
    base_areas: Vec<Q>,
    capacities: Vec<Q>,
}

impl SymplecticData {
    pub fn new(basis: Basis, base_areas: Vec<Q>, capacities: Vec<Q>) -> Result<Self> {
        if base_areas.len() != basis.base_rank() {
            return Err(Error::Precondition(format!("{basis} needs {} base areas", basis.base_rank())));
        }
        let basis = basis.with_k(capacities.len());
        if base_areas.iter().any(|a| !a.is_positive()) {
            return Err(Error::Precondition("base areas must be positive".into()));
        }
        if capacities.iter().any(|d| !d.is_positive()) {
            return Err(Error::Precondition("capacities must be positive".into()));
        }
        if capacities.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition("capacities must be weakly decreasing".into()));
        }
        let data = SymplecticData { basis, base_areas, capacities };
        if !data.volume_quantity().is_positive() {
            return Err(Error::Precondition("total volume must be positive".into()));
        }
        Ok(data)
    }

    pub fn rational(lambda: Q, capacities: Vec<Q>) -> Result<Self> {
        Self::new(Basis::rational(0), vec![lambda], capacities)
    }

    pub fn product_ruled(genus: u32, mu: Q, fiber: Q, capacities: Vec<Q>) -> Result<Self> {
        Self::new(Basis::product_ruled(genus, 0), vec![mu, fiber], capacities)
    }

    pub fn twisted_ruled(genus: u32, mu: Q, fiber: Q, capacities: Vec<Q>) -> Result<Self> {
        Self::new(Basis::twisted_ruled(genus, 0), vec![mu, fiber], capacities)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn k(&self) -> usize {
        self.basis.k
    }

    pub fn base_areas(&self) -> &[Q] {
        &self.base_areas
    }

    pub fn capacities(&self) -> &[Q] {
        &self.capacities
    }

    pub fn lambda(&self) -> Option<&Q> {
        (!self.basis.is_ruled()).then(|| &self.base_areas[0])
    }

    pub fn area_vector(&self) -> Vec<Q> {
        self.base_areas.iter().chain(&self.capacities).cloned().collect()
    }

    pub fn area(&self, c: &HomologyClass) -> Result<Q> {
        if c.basis != self.basis {
            return Err(Error::BasisMismatch(c.basis.to_string(), self.basis.to_string()));
        }
        Ok(self.area_unchecked(c))
    }

    fn area_unchecked(&self, c: &HomologyClass) -> Q {
        self.area_vector().iter().zip(&c.coeffs).map(|(a, x)| a * Q::from_integer(x.clone())).sum()
    }

    /// `PD(ω)²`: λ² − Σδ² for CP² blow-ups, twice the volume in general.
    pub fn volume_quantity(&self) -> Q {
        let a = self.area_vector();
        self.basis.dual_pairing(&a, &a)
    }

    /// `⟨ω, c₁⟩`; equals the perimeter of a moment polygon.
    pub fn chern_pairing(&self) -> Q {
        let a = self.area_vector();
        let c: Vec<Q> = (0..self.basis.rank()).map(|i| qi(self.basis.chern(i))).collect();
        self.basis.dual_pairing(&a, &c)
    }

    pub fn pd_class(&self) -> RationalClass {
        RationalClass { basis: self.basis, coeffs: self.basis.solve_gram(&self.area_vector()) }
    }

    pub fn smallest_capacity(&self) -> Option<&Q> {
        self.capacities.last()
    }

    /// Same data with the last capacity replaced.
    pub fn with_last_capacity(&self, d: Q) -> Result<Self> {
        let mut caps = self.capacities.clone();
        match caps.last_mut() {
            Some(last) => *last = d,
            None => return Err(Error::NoExceptionalDivisor),
        }
        Self::new(self.basis, self.base_areas.clone(), caps)
    }

    /// Areas of a frame (new basis in these coordinates) become the data of
    /// the target basis. Exceptional frame vectors are re-sorted so that the
    /// capacities decrease; the returned frame follows that order.
    fn reframe(&self, target: Basis, frame: Vec<HomologyClass>) -> Result<(SymplecticData, Vec<HomologyClass>)> {
        let br = target.base_rank();
        let areas: Vec<Q> = frame.iter().map(|f| self.area_unchecked(f)).collect();
        let mut order: Vec<usize> = (br..frame.len()).collect();
        order.sort_by(|&i, &j| areas[j].cmp(&areas[i]).then(i.cmp(&j)));
        let mut sorted: Vec<HomologyClass> = frame[..br].to_vec();
        sorted.extend(order.iter().map(|&i| frame[i].clone()));
        let mut base_areas: Vec<Q> = areas[..br].to_vec();
        let caps: Vec<Q> = order.iter().map(|&i| areas[i].clone()).collect();
        let mut basis = target;
        if target.kind == BasisKind::ProductRuled && target.genus == 0 && base_areas[0] < base_areas[1] {
            // B and F are interchangeable on S²×S²; keep the larger one as B
            base_areas.swap(0, 1);
            sorted.swap(0, 1);
        }
        basis.k = caps.len();
        let data = SymplecticData::new(basis, base_areas, caps)?;
        debug_assert!(frame_is_isometric(&data.basis, &sorted));
        Ok((data, sorted))
    }
}

fn frame_is_isometric(target: &Basis, frame: &[HomologyClass]) -> bool {
    frame.len() == target.rank()
        && (0..frame.len()).all(|i| {
            frame[i].chern() == BigInt::from(target.chern(i))
                && (0..frame.len()).all(|j| frame[i].dot_unchecked(&frame[j]) == BigInt::from(target.pairing(i, j)))
        })
}

fn to_i128(x: &BigInt) -> i128 {
    x.to_i128().expect("coefficient bound exceeds i128")
}

/// `G = 2ααᵀ/V − Q`, positive definite when `V = αᵀQ⁻¹α > 0`.
fn light_cone_form(basis: &Basis, alpha: &[Q], v: &Q) -> Vec<Vec<Q>> {
    let n = basis.rank();
    (0..n)
        .map(|i| (0..n).map(|j| qi(2) * &alpha[i] * &alpha[j] / v - qi(basis.pairing(i, j))).collect())
        .collect()
}

/// `(G⁻¹)₀₀` for a positive definite rational matrix.
fn inverse_00(g: &[Vec<Q>]) -> Q {
    let n = g.len();
    let mut a: Vec<Vec<Q>> = g.to_vec();
    let mut rhs: Vec<Q> = (0..n).map(|i| if i == 0 { Q::one() } else { Q::zero() }).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("form is definite");
        a.swap(c, p);
        rhs.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let v = &f * &a[c][k];
                    a[r][k] -= v;
                }
                let v = &f * &rhs[c];
                rhs[r] -= v;
            }
        }
    }
    &rhs[0] / &a[0][0]
}

/// `L D Lᵀ` of a positive definite matrix; returns (L, D).
fn ldl(g: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<Q>) {
    let n = g.len();
    let mut l = vec![vec![Q::zero(); n]; n];
    let mut d = vec![Q::zero(); n];
    for j in 0..n {
        let mut s = g[j][j].clone();
        for k in 0..j {
            s -= &l[j][k] * &l[j][k] * &d[k];
        }
        d[j] = s;
        l[j][j] = Q::one();
        for i in j + 1..n {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = s / &d[j];
        }
    }
    (l, d)
}

/// All integer vectors `x` with `xᵀGx ≤ r`, `G` positive definite.
fn ellipsoid_points(g: &[Vec<Q>], r: &Q) -> Vec<Vec<BigInt>> {
    let n = g.len();
    let (l, d) = ldl(g);
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    fn rec(
        j: usize,
        budget: Q,
        x: &mut Vec<BigInt>,
        l: &[Vec<Q>],
        d: &[Q],
        out: &mut Vec<Vec<BigInt>>,
    ) {
        let n = x.len();
        // y_j = x_j + Σ_{i>j} L_ij x_i, quadratic form = Σ d_j y_j²
        let shift: Q = (j + 1..n).map(|i| &l[i][j] * Q::from_integer(x[i].clone())).sum();
        let center = -shift.clone();
        let reach = floor_sqrt(&(&budget / &d[j])) + 1u32;
        let lo = floor(&center) - &reach;
        let hi = floor(&center) + &reach + 1u32;
        let mut v = lo;
        while v <= hi {
            let y = Q::from_integer(v.clone()) + &shift;
            let used = &d[j] * &y * &y;
            if used <= budget {
                x[j] = v.clone();
                if j == 0 {
                    out.push(x.clone());
                } else {
                    rec(j - 1, &budget - &used, x, l, d, out);
                }
            }
            v += 1u32;
        }
        x[j] = BigInt::zero();
    }
    if n > 0 {
        rec(n - 1, r.clone(), &mut x, &l, &d, &mut out);
    }
    out
}

/// Bound on `|x₀|` for classes with `x² ≥ −s` and `|ω(x)| ≤ bound`.
fn lead_bound(data: &SymplecticData, bound: &Q, s: &Q) -> BigInt {
    let alpha = data.area_vector();
    let v = data.volume_quantity();
    let g = light_cone_form(&data.basis, &alpha, &v);
    let n_max = qi(2) * bound * bound / &v + s;
    floor_sqrt(&(n_max * inverse_00(&g)))
}

/// All integer vectors of length `n` with `Σbᵢ = sum` and `Σbᵢ² = sq`.
fn sum_and_squares(n: usize, sum: i128, sq: i128, prefix: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
    if n == 0 {
        if sum == 0 && sq == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if sq < 0 {
        return;
    }
    let r = isqrt(sq);
    for b in -r..=r {
        let rest_sq = sq - b * b;
        let rest_sum = sum - b;
        let m = (n - 1) as i128;
        if rest_sum * rest_sum > m * rest_sq || (m == 0 && (rest_sum != 0 || rest_sq != 0)) {
            continue;
        }
        prefix.push(b);
        sum_and_squares(n - 1, rest_sum, rest_sq, prefix, out);
        prefix.pop();
    }
}

/// All integer vectors of length `n` with `Σ(bᵢ² − p bᵢ) = target`.
fn shifted_squares(n: usize, p: i128, target: i128, prefix: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
    let min_term = -((p * p) / 4);
    if n == 0 {
        if target == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let room = target - (n as i128 - 1) * min_term;
    if room < min_term {
        return;
    }
    let r = isqrt(room + p * p) + 1;
    for b in (p / 2 - r)..=(p / 2 + r + 1) {
        let t = b * b - p * b;
        if t > room {
            continue;
        }
        prefix.push(b);
        shifted_squares(n - 1, p, target - t, prefix, out);
        prefix.pop();
    }
}

fn isqrt(x: i128) -> i128 {
    if x <= 0 {
        0
    } else {
        x.isqrt()
    }
}

/// Upper bound for `a = E·L` over all exceptional classes of Rational(k),
/// k ≤ 8, from Cauchy–Schwarz on `Σb = 3a−1`, `Σb² = a²+1`.
fn cauchy_schwarz_bound(k: usize) -> Option<i128> {
    if k > 8 {
        return None;
    }
    let k = k as i128;
    let holds = |a: i128| (9 - k) * a * a - 6 * a + 1 - k <= 0;
    // the parabola opens upward with vertex at 3/(9−k) ≤ 3
    Some((0..=16).filter(|&a| holds(a)).max().unwrap_or(0))
}

/// Classes with `E² = −1`, `c₁(E) = 1`, `E·(L or F) ≥ 0` whose leading
/// coefficient is at most `lead_max`.
fn exceptional_lattice_classes(basis: Basis, lead_max: i128) -> Vec<HomologyClass> {
    let k = basis.k;
    let mut out = Vec::new();
    let mut vecs = Vec::new();
    match basis.kind {
        BasisKind::Rational => {
            for a in 0..=lead_max {
                vecs.clear();
                sum_and_squares(k, 3 * a - 1, a * a + 1, &mut Vec::new(), &mut vecs);
                for b in &vecs {
                    let mut c = vec![BigInt::from(a)];
                    c.extend(b.iter().map(|&x| BigInt::from(-x)));
                    out.push(HomologyClass { basis, coeffs: c });
                }
            }
        }
        _ => {
            let g = i128::from(basis.genus);
            let c1b = i128::from(basis.chern(0));
            // a sphere cannot cover a base of positive genus: E·F = 0 there
            let p_max = if g > 0 { 0 } else { lead_max };
            for p in 0..=p_max {
                vecs.clear();
                let target = p + 1 - (2 - 2 * g) * p * p;
                shifted_squares(k, p, target, &mut Vec::new(), &mut vecs);
                for b in &vecs {
                    let s: i128 = b.iter().sum();
                    let twice_q = 1 + s - c1b * p;
                    if twice_q % 2 != 0 {
                        continue;
                    }
                    let mut c = vec![BigInt::from(p), BigInt::from(twice_q / 2)];
                    c.extend(b.iter().map(|&x| BigInt::from(-x)));
                    let cl = HomologyClass { basis, coeffs: c };
                    if cl.square() == BigInt::from(-1) && cl.chern().is_one() {
                        out.push(cl);
                    }
                }
            }
        }
    }
    out
}

fn certified_lead(data: &SymplecticData, bound: &Q, ceiling: u64) -> Result<i128> {
    let ceiling = ceiling.min(HARD_CEILING);
    let basis = data.basis;
    if basis.is_ruled() && basis.genus > 0 {
        return Ok(0);
    }
    let nform = lead_bound(data, bound, &Q::one());
    let mut lead = nform.clone();
    if basis.kind == BasisKind::Rational {
        if let Some(cs) = cauchy_schwarz_bound(basis.k) {
            lead = lead.min(BigInt::from(cs));
        }
    }
    if lead > BigInt::from(ceiling) {
        return Err(Error::BoundNotCertified(format!(
            "leading coefficient bound {lead} exceeds search ceiling {ceiling}"
        )));
    }
    Ok(to_i128(&lead).max(0))
}

/// Exceptional candidates with `lo < ω(E) ≤ hi`.
fn exceptional_in_window(data: &SymplecticData, lo: &Q, hi: &Q, ceiling: u64) -> Result<BTreeSet<HomologyClass>> {
    let reach = if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
    let lead = certified_lead(data, &reach, ceiling)?;
    Ok(exceptional_lattice_classes(data.basis, lead)
        .into_iter()
        .filter(|c| {
            let a = data.area_unchecked(c);
            a > *lo && a <= *hi
        })
        .collect())
}

/// All exceptional candidates `E` with `0 < ω(E) ≤ area_bound`, in
/// coefficient order. Errors instead of truncating when the certified
/// bound on the leading coefficient exceeds `search_ceiling`.
pub fn enumerate_exceptional_candidates(
    data: &SymplecticData,
    area_bound: &Q,
    search_ceiling: u64,
) -> Result<Vec<HomologyClass>> {
    if !area_bound.is_positive() {
        return Err(Error::Precondition("area bound must be positive".into()));
    }
    Ok(exceptional_in_window(data, &Q::zero(), area_bound, search_ceiling)?.into_iter().collect())
}

/// Checks that every exceptional candidate has positive area, where the
/// candidate set is finite independently of ω. Returns `Ok(false)` when no
/// such certificate is available (CP² blown up nine or more times).
pub fn exceptional_areas_positive(data: &SymplecticData) -> Result<bool> {
    let basis = data.basis;
    let classes = match basis.kind {
        BasisKind::Rational => match cauchy_schwarz_bound(basis.k) {
            Some(a) => exceptional_lattice_classes(basis, a),
            None => return Ok(false),
        },
        _ if basis.genus > 0 => exceptional_lattice_classes(basis, 0),
        // S²×S² has no exceptional classes
        BasisKind::ProductRuled if basis.k == 0 => return Ok(true),
        _ => {
            let (rdata, _) = to_rational(data)?;
            return exceptional_areas_positive(&rdata);
        }
    };
    if let Some(bad) = classes.iter().find(|c| !data.area_unchecked(c).is_positive()) {
        return Err(Error::Precondition(format!(
            "exceptional class {bad} has nonpositive area {}",
            data.area_unchecked(bad)
        )));
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalClasses {
    pub epsilon: Q,
    pub classes: Vec<HomologyClass>,
}

pub fn minimal_exceptional_classes(data: &SymplecticData) -> Result<MinimalClasses> {
    minimal_exceptional_classes_with_ceiling(data, DEFAULT_SEARCH_CEILING)
}

pub fn minimal_exceptional_classes_with_ceiling(data: &SymplecticData, ceiling: u64) -> Result<MinimalClasses> {
    let bound = data.smallest_capacity().ok_or(Error::NoExceptionalDivisor)?.clone();
    let all = enumerate_exceptional_candidates(data, &bound, ceiling)?;
    let epsilon = all.iter().map(|c| data.area_unchecked(c)).min().ok_or(Error::NoExceptionalDivisor)?;
    let classes = all.into_iter().filter(|c| data.area_unchecked(c) == epsilon).collect();
    Ok(MinimalClasses { epsilon, classes })
}

/// All integral `X` with `−q ≤ X·X ≤ −p` and `lo ≤ A·X ≤ hi`. Requires
/// `A·A > 0`, which makes the region compact.
pub fn enumerate_bounded_classes(a: &RationalClass, lo: &Q, hi: &Q, p: &Q, q: &Q) -> Result<Vec<HomologyClass>> {
    if lo > hi {
        return Err(Error::Precondition("empty interval: a > b".into()));
    }
    if !p.is_positive() || p > q {
        return Err(Error::Precondition("need 0 < p <= q".into()));
    }
    let v = a.square();
    if !v.is_positive() {
        return Err(Error::BoundNotCertified("A·A must be positive for a compact search region".into()));
    }
    let alpha = a.pairing_vector();
    let g = light_cone_form(&a.basis, &alpha, &v);
    let reach = if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
    let n_max = qi(2) * &reach * &reach / &v + q;
    let mut out: Vec<HomologyClass> = ellipsoid_points(&g, &n_max)
        .into_iter()
        .map(|c| HomologyClass { basis: a.basis, coeffs: c })
        .filter(|x| {
            let s = Q::from_integer(x.square());
            let d = a.dot(x);
            s >= -q.clone() && s <= -p.clone() && d >= *lo && d <= *hi
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Result of blowing down one exceptional class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blowdown {
    pub data: SymplecticData,
    /// Basis vectors of `data` written in the coordinates of the input.
    pub images: Vec<HomologyClass>,
}

/// Rational(k+1) frame for a genus-zero ruled basis.
fn rational_frame(basis: Basis) -> Option<Vec<HomologyClass>> {
    if basis.genus != 0 || !basis.is_ruled() {
        return None;
    }
    let u = |i| HomologyClass::unit(basis, i);
    let (b, f) = (u(0), u(1));
    let mut frame = Vec::new();
    match basis.kind {
        BasisKind::ProductRuled => {
            if basis.k == 0 {
                return None;
            }
            let e1 = u(2);
            frame.push(b.add(&f).sub(&e1));
            frame.push(f.sub(&e1));
            frame.push(b.sub(&e1));
            frame.extend((3..basis.rank()).map(u));
        }
        _ => {
            frame.push(b.add(&f));
            frame.push(b);
            frame.extend((2..basis.rank()).map(u));
        }
    }
    Some(frame)
}

/// Rewrites genus-zero ruled data (with at least one blow-up for the
/// product case) as a blow-up of CP².
pub fn to_rational(data: &SymplecticData) -> Result<(SymplecticData, Vec<HomologyClass>)> {
    let frame = rational_frame(data.basis)
        .ok_or_else(|| Error::Precondition(format!("{} is not a blow-up of CP²", data.basis)))?;
    data.reframe(Basis::rational(data.k() + 1), frame)
}

/// Coordinates of `x` in an isometric frame of `target`.
fn coordinates_in(target: &Basis, frame: &[HomologyClass], x: &HomologyClass) -> HomologyClass {
    let p: Vec<Q> = frame.iter().map(|f| Q::from_integer(f.dot_unchecked(x))).collect();
    let y = target.solve_gram(&p);
    HomologyClass { basis: *target, coeffs: y.iter().map(|c| c.to_integer()).collect() }
}

fn unsupported(e: &HomologyClass) -> Error {
    Error::UnsupportedBlowdown(e.to_string())
}

/// Cremona reduction of an exceptional class of Rational(k), k ≥ 3, down to
/// some `E_j`. Returns the frame `ψ⁻¹(standard basis)` and `j`'s index.
fn cremona_frame(e: &HomologyClass) -> Result<(Vec<HomologyClass>, usize)> {
    let basis = e.basis;
    let mut x = e.clone();
    let mut roots: Vec<HomologyClass> = Vec::new();
    loop {
        let a = x.coeffs[0].clone();
        if a.is_zero() {
            break;
        }
        if a.is_negative() || roots.len() > 512 {
            return Err(unsupported(e));
        }
        let mut idx: Vec<usize> = (1..basis.rank()).collect();
        // b_i = −coeff; pick the three largest
        idx.sort_by(|&i, &j| x.coeffs[i].cmp(&x.coeffs[j]).then(i.cmp(&j)));
        let mut r = HomologyClass::unit(basis, 0);
        for &i in &idx[..3] {
            r.coeffs[i] = BigInt::from(-1);
        }
        if !x.dot_unchecked(&r).is_negative() {
            return Err(unsupported(e));
        }
        x = x.reflect(&r);
        roots.push(r);
    }
    let j = x.as_unit().filter(|&j| j >= 1).ok_or_else(|| unsupported(e))?;
    let frame = (0..basis.rank())
        .map(|i| roots.iter().rev().fold(HomologyClass::unit(basis, i), |acc, r| acc.reflect(r)))
        .collect::<Vec<_>>();
    debug_assert_eq!(frame[j], *e);
    Ok((frame, j))
}

/// Blows down `e`, returning the smaller recipe and the transport.
pub fn blow_down(data: &SymplecticData, e: &HomologyClass) -> Result<Blowdown> {
    let basis = data.basis;
    if e.basis != basis {
        return Err(Error::BasisMismatch(e.basis.to_string(), basis.to_string()));
    }
    if e.square() != BigInt::from(-1) || !e.chern().is_one() || !data.area_unchecked(e).is_positive() {
        return Err(Error::Precondition(format!("{e} is not an exceptional class of positive area")));
    }
    let id = || (0..basis.rank()).map(|i| HomologyClass::unit(basis, i)).collect::<Vec<_>>();
    let (target, frame, drop) = if let Some(j) = e.as_unit().filter(|&j| j >= basis.base_rank()) {
        (basis, id(), j)
    } else if let Some(j) = basis.is_ruled().then(|| is_fiber_minus_e(e)).flatten() {
        let mut frame = id();
        let (b, f, ej) = (frame[0].clone(), frame[1].clone(), frame[j].clone());
        let target = match basis.kind {
            BasisKind::ProductRuled => {
                frame[0] = b.sub(&ej);
                Basis::twisted_ruled(basis.genus, basis.k)
            }
            _ => {
                frame[0] = b.add(&f).sub(&ej);
                Basis::product_ruled(basis.genus, basis.k)
            }
        };
        frame[j] = f.sub(&ej);
        (target, frame, j)
    } else if basis.is_ruled() && basis.genus == 0 {
        let (rdata, rframe) = to_rational(data)?;
        let y = coordinates_in(&rdata.basis, &rframe, e);
        let inner = blow_down(&rdata, &y)?;
        let images = inner.images.iter().map(|c| c.expand_in(&rframe)).collect();
        return Ok(Blowdown { data: inner.data, images });
    } else if basis.kind == BasisKind::Rational && basis.k == 2 {
        let u = |i| HomologyClass::unit(basis, i);
        let (l, e1, e2) = (u(0), u(1), u(2));
        if *e != l.sub(&e1).sub(&e2) {
            return Err(unsupported(e));
        }
        (Basis::product_ruled(0, 1), vec![l.sub(&e1), l.sub(&e2), e.clone()], 2)
    } else if basis.kind == BasisKind::Rational && basis.k >= 3 {
        let (frame, j) = cremona_frame(e)?;
        (basis, frame, j)
    } else {
        return Err(unsupported(e));
    };
    let mut kept = frame;
    kept.remove(drop);
    let (data, images) = data.reframe(target.with_k(basis.k - 1), kept)?;
    Ok(Blowdown { data, images })
}

/// `F − E_j` in a ruled basis: returns the index of `E_j`.
fn is_fiber_minus_e(e: &HomologyClass) -> Option<usize> {
    let c = &e.coeffs;
    if !c[0].is_zero() || !c[1].is_one() {
        return None;
    }
    let mut hit = None;
    for (i, x) in c.iter().enumerate().skip(2) {
        if *x == BigInt::from(-1) && hit.is_none() {
            hit = Some(i);
        } else if !x.is_zero() {
            return None;
        }
    }
    hit
}

pub fn blow_down_class(data: &SymplecticData, e: &HomologyClass) -> Result<SymplecticData> {
    Ok(blow_down(data, e)?.data)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    /// Number of blow-ups of the stage the class lives on.
    pub stage: usize,
    /// The class in that stage's basis.
    pub class: HomologyClass,
    /// The same class in the basis of the input recipe.
    pub original: HomologyClass,
    pub area: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowdownChain {
    pub steps: Vec<ChainStep>,
    /// The minimal model reached, with no blow-ups.
    pub terminal: SymplecticData,
}

impl BlowdownChain {
    /// Capacities to blow the terminal model back up with, largest first.
    pub fn capacities(&self) -> Vec<Q> {
        self.steps.iter().rev().map(|s| s.area.clone()).collect()
    }
}

struct ChainNode {
    data: SymplecticData,
    /// Current basis vectors in original coordinates.
    images: Vec<HomologyClass>,
    steps: Vec<ChainStep>,
}

/// Normalises a node before choosing a class: genus-zero ruled surfaces with
/// blow-ups are rewritten over CP², and CP² blown up once with δ ≥ λ/2 is
/// kept as the twisted model (its toric actions do not all come from CP²).
fn settle(node: ChainNode) -> Result<(ChainNode, bool)> {
    let b = node.data.basis;
    if b.is_ruled() && b.genus == 0 && b.k >= 1 {
        let (data, frame) = to_rational(&node.data)?;
        let images = frame.iter().map(|f| f.expand_in(&node.images)).collect();
        return settle(ChainNode { data, images, ..node });
    }
    if b.kind == BasisKind::Rational && b.k == 1 {
        let lambda = node.data.base_areas[0].clone();
        if node.data.capacities[0].clone() * qi(2) >= lambda {
            let (l, e1) = (HomologyClass::unit(b, 0), HomologyClass::unit(b, 1));
            let (data, frame) = node.data.reframe(Basis::twisted_ruled(0, 0), vec![e1.clone(), l.sub(&e1)])?;
            let images = frame.iter().map(|f| f.expand_in(&node.images)).collect();
            return Ok((ChainNode { data, images, ..node }, true));
        }
    }
    let done = node.data.k() == 0;
    Ok((node, done))
}

fn chains_from(node: ChainNode, limit: usize, out: &mut Vec<BlowdownChain>) -> Result<()> {
    if out.len() >= limit {
        return Ok(());
    }
    let (node, done) = settle(node)?;
    if done {
        out.push(BlowdownChain { steps: node.steps, terminal: node.data });
        return Ok(());
    }
    let min = minimal_exceptional_classes(&node.data)?;
    for e in min.classes {
        if out.len() >= limit {
            break;
        }
        let bd = blow_down(&node.data, &e)?;
        let original = e.expand_in(&node.images);
        let images = bd.images.iter().map(|c| c.expand_in(&node.images)).collect();
        let mut steps = node.steps.clone();
        steps.push(ChainStep { stage: node.data.k(), class: e, original, area: min.epsilon.clone() });
        chains_from(ChainNode { data: bd.data, images, steps }, limit, out)?;
    }
    Ok(())
}

fn root_node(data: &SymplecticData) -> ChainNode {
    let images = (0..data.basis.rank()).map(|i| HomologyClass::unit(data.basis, i)).collect();
    ChainNode { data: data.clone(), images, steps: Vec::new() }
}

/// Every chain of minimal blow-downs, branching over ties in `E_min`.
pub fn minimal_blowdown_chains(data: &SymplecticData) -> Result<Vec<BlowdownChain>> {
    minimal_blowdown_chains_limited(data, usize::MAX)
}

pub fn minimal_blowdown_chains_limited(data: &SymplecticData, limit: usize) -> Result<Vec<BlowdownChain>> {
    let mut out = Vec::new();
    chains_from(root_node(data), limit.max(1), &mut out)?;
    Ok(out)
}

/// The first chain in enumeration order.
pub fn first_minimal_blowdown_chain(data: &SymplecticData) -> Result<BlowdownChain> {
    let mut v = minimal_blowdown_chains_limited(data, 1)?;
    v.pop().ok_or(Error::NoExceptionalDivisor)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub delta0: Q,
    /// Competitors `A − sE_k` attaining `ω(A)/(s+1) = δ₀`.
    pub binding: Vec<HomologyClass>,
}

/// Supremum `δ₀` of last capacities for which `E_min = {E_k}`, holding the
/// other capacities fixed.
pub fn min_capacity_threshold(data: &SymplecticData) -> Result<Threshold> {
    let basis = data.basis;
    let k = basis.k;
    if k == 0 {
        return Err(Error::NoExceptionalDivisor);
    }
    if basis.kind == BasisKind::Rational && k == 1 {
        // past λ/2 the fibre L − E₁ is smaller than E₁
        let l = HomologyClass::unit(basis, 0);
        let fiber = l.sub(&HomologyClass::unit(basis, 1));
        return Ok(Threshold { delta0: &data.base_areas[0] / qi(2), binding: vec![fiber] });
    }
    let t = if k >= 2 {
        data.capacities[k - 2].clone()
    } else {
        // F − E₁ on a ruled surface
        &data.base_areas[1] / qi(2)
    };
    let probe = data.with_last_capacity(t.clone())?;
    let ek = basis.e_index(k);
    let candidates = exceptional_in_window(&probe, &-t.clone(), &t, DEFAULT_SEARCH_CEILING)?;
    let mut best: Option<(Q, Vec<HomologyClass>)> = None;
    for c in candidates {
        if c.as_unit() == Some(ek) {
            continue;
        }
        // c = A − sE_k with s = −coeff
        let s = -c.coeffs[ek].clone();
        if s.is_negative() {
            continue;
        }
        let mut a = c.clone();
        a.coeffs[ek] = BigInt::zero();
        let value = data.area_unchecked(&a) / Q::from_integer(s + 1u32);
        match &mut best {
            Some((v, list)) if *v == value => list.push(c),
            Some((v, _)) if *v < value => {}
            _ => best = Some((value, vec![c])),
        }
    }
    let (delta0, binding) = best.ok_or_else(|| Error::BoundNotCertified("no competitor in the search region".into()))?;
    Ok(Threshold { delta0, binding })
}
