//! Dense exact matrices over Q(ζ_n), plus a monomial fast path for group images.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact_number::{validate_conductor, CyclotomicNumber, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    conductor: u32,
    entries: Vec<CyclotomicNumber>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize, conductor: u32) -> Self {
        ExactMatrix {
            rows,
            cols,
            conductor,
            entries: vec![CyclotomicNumber::zero(conductor); rows * cols],
        }
    }

    pub fn identity(n: usize, conductor: u32) -> Self {
        Self::scalar(n, &CyclotomicNumber::one(conductor))
    }

    pub fn scalar(n: usize, value: &CyclotomicNumber) -> Self {
        let mut m = Self::zeros(n, n, value.conductor());
        for i in 0..n {
            m.entries[i * n + i] = value.clone();
        }
        m
    }

    /// E_{ij}: the matrix unit with a single 1 at (i, j).
    pub fn unit(n: usize, i: usize, j: usize, conductor: u32) -> Self {
        let mut m = Self::zeros(n, n, conductor);
        m.entries[i * n + j] = CyclotomicNumber::one(conductor);
        m
    }

    pub fn from_rows(rows: Vec<Vec<CyclotomicNumber>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let conductor = rows
            .first()
            .and_then(|r| r.first())
            .map(CyclotomicNumber::conductor)
            .ok_or_else(|| Error::Structural("empty matrix".into()))?;
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::Structural("ragged matrix rows".into()));
            }
            for e in row {
                if e.conductor() != conductor {
                    return Err(Error::Structural("mixed conductors in one matrix".into()));
                }
                entries.push(e);
            }
        }
        Ok(ExactMatrix {
            rows: nrows,
            cols: ncols,
            conductor,
            entries,
        })
    }

    /// Builds a matrix of rationals (given as (num, den) pairs) over Q(ζ_n).
    pub fn from_rationals(conductor: u32, rows: &[Vec<(i64, i64)>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&(n, d)| {
                            CyclotomicNumber::from_rational(conductor, crate::exact_number::rational(n, d))
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CyclotomicNumber {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CyclotomicNumber) {
        assert_eq!(v.conductor(), self.conductor);
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[CyclotomicNumber] {
        &self.entries
    }

    pub fn row_vecs(&self) -> Vec<Vec<CyclotomicNumber>> {
        self.entries.chunks(self.cols.max(1)).map(<[_]>::to_vec).collect()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Structural(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.conductor != other.conductor {
            return Err(Error::Structural("conductor mismatch".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.with_entries(self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.with_entries(self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect()))
    }

    fn with_entries(&self, entries: Vec<CyclotomicNumber>) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            conductor: self.conductor,
            entries,
        }
    }

    pub fn neg(&self) -> Self {
        self.with_entries(self.entries.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: &CyclotomicNumber) -> Self {
        self.with_entries(self.entries.iter().map(|a| a * s).collect())
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        self.with_entries(self.entries.iter().map(|a| a.scale(s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Structural(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.conductor != other.conductor {
            return Err(Error::Structural("conductor mismatch".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.conductor);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.conductor);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.conductor);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).conjugate();
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        self.with_entries(self.entries.iter().map(CyclotomicNumber::conjugate).collect())
    }

    pub fn trace(&self) -> Result<CyclotomicNumber> {
        self.require_square()?;
        let mut t = CyclotomicNumber::zero(self.conductor);
        for i in 0..self.rows {
            t = &t + self.get(i, i);
        }
        Ok(t)
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Structural(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CyclotomicNumber::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// Returns λ when M = λI exactly.
    pub fn is_scalar(&self) -> Option<CyclotomicNumber> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let lambda = self.get(0, 0);
        let ok = (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e == lambda
                } else {
                    e.is_zero()
                }
            })
        });
        ok.then(|| lambda.clone())
    }

    /// M · M† = I exactly.
    pub fn is_unitary(&self) -> bool {
        self.is_square()
            && self
                .mul(&self.dagger())
                .map(|p| p.is_identity())
                .unwrap_or(false)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        self.require_square()?;
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows, self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Determinant by Gaussian elimination over Q(ζ_n) with exact nonzero pivots.
    pub fn det(&self) -> Result<CyclotomicNumber> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut det = CyclotomicNumber::one(self.conductor);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(CyclotomicNumber::zero(self.conductor));
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det = &det * &pivot;
            let inv = pivot.inv()?;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] * &inv;
                for c in col..n {
                    let t = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - &t;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut b = Self::identity(n, self.conductor).row_vecs();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::Domain("singular matrix".into()))?;
            a.swap(piv, col);
            b.swap(piv, col);
            let inv = a[col][col].inv()?;
            for c in 0..n {
                a[col][c] = &a[col][c] * &inv;
                b[col][c] = &b[col][c] * &inv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let ta = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - &ta;
                    let tb = &factor * &b[col][c];
                    b[r][c] = &b[r][c] - &tb;
                }
            }
        }
        Self::from_rows(b)
    }

    /// [A, B] = AB - BA.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.commutator(other).map(|c| c.is_zero()).unwrap_or(false)
    }

    /// Row-major flattening.
    pub fn vectorize(&self) -> Vec<CyclotomicNumber> {
        self.entries.clone()
    }

    pub fn to_float(&self) -> Vec<Vec<(f64, f64)>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_complex()).collect())
            .collect()
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} over Q(z{}):", self.rows, self.cols, self.conductor)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    conductor: u32,
    entries: Vec<Vec<CyclotomicNumber>>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            conductor: self.conductor,
            entries: self.row_vecs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = MatrixWire::deserialize(d)?;
        validate_conductor(w.conductor).map_err(D::Error::custom)?;
        if w.entries.len() != w.rows || w.entries.iter().any(|r| r.len() != w.cols) {
            return Err(D::Error::custom("matrix entries do not match the stated shape"));
        }
        if w.entries.iter().flatten().any(|e| e.conductor() != w.conductor) {
            return Err(D::Error::custom("entry conductor differs from matrix conductor"));
        }
        Ok(ExactMatrix {
            rows: w.rows,
            cols: w.cols,
            conductor: w.conductor,
            entries: w.entries.into_iter().flatten().collect(),
        })
    }
}

/// Float export of a matrix: `[re, im]` pairs rounded to a fixed number of digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl FloatMatrix {
    pub fn from_exact(m: &ExactMatrix, digits: u32) -> Self {
        FloatMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows)
                .map(|i| {
                    (0..m.cols)
                        .map(|j| {
                            let (re, im) = m.get(i, j).embed_float(digits);
                            [re, im]
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// A monomial matrix: column j has its single nonzero entry ζ_n^{phase[j]} in row `perm[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialMatrix {
    conductor: u32,
    perm: Vec<usize>,
    phase: Vec<u32>,
}

impl MonomialMatrix {
    pub fn new(conductor: u32, perm: Vec<usize>, phase: Vec<u32>) -> Self {
        debug_assert_eq!(perm.len(), phase.len());
        MonomialMatrix {
            conductor,
            perm,
            phase: phase.into_iter().map(|p| p % conductor).collect(),
        }
    }

    pub fn identity(n: usize, conductor: u32) -> Self {
        Self::new(conductor, (0..n).collect(), vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phase(&self) -> &[u32] {
        &self.phase
    }

    /// Entry (row, col) as a root-of-unity exponent, if nonzero.
    pub fn entry_phase(&self, row: usize, col: usize) -> Option<u32> {
        (self.perm[col] == row).then(|| self.phase[col])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.conductor;
        let perm = other.perm.iter().map(|&k| self.perm[k]).collect();
        let phase = other
            .perm
            .iter()
            .zip(&other.phase)
            .map(|(&k, &ph)| (ph + self.phase[k]) % n)
            .collect();
        MonomialMatrix {
            conductor: n,
            perm,
            phase,
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.conductor;
        let mut perm = vec![0; self.dim()];
        let mut phase = vec![0; self.dim()];
        for (j, (&r, &ph)) in self.perm.iter().zip(&self.phase).enumerate() {
            perm[r] = j;
            phase[r] = (n - ph) % n;
        }
        MonomialMatrix {
            conductor: n,
            perm,
            phase,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut perm = vec![0; self.dim()];
        let mut phase = vec![0; self.dim()];
        for (j, (&r, &ph)) in self.perm.iter().zip(&self.phase).enumerate() {
            perm[r] = j;
            phase[r] = ph;
        }
        MonomialMatrix {
            conductor: self.conductor,
            perm,
            phase,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &r)| r == j) && self.phase.iter().all(|&p| p == 0)
    }

    /// λ as an exponent when the matrix is λI.
    pub fn scalar_phase(&self) -> Option<u32> {
        let first = *self.phase.first()?;
        (self.perm.iter().enumerate().all(|(j, &r)| r == j) && self.phase.iter().all(|&p| p == first))
            .then_some(first)
    }

    pub fn trace(&self) -> CyclotomicNumber {
        let mut t = CyclotomicNumber::zero(self.conductor);
        for (j, &r) in self.perm.iter().enumerate() {
            if r == j {
                t = &t + &CyclotomicNumber::root_of_unity(self.conductor, self.phase[j] as i64);
            }
        }
        t
    }

    pub fn to_dense(&self) -> ExactMatrix {
        let n = self.dim();
        let mut m = ExactMatrix::zeros(n, n, self.conductor);
        for (j, (&r, &ph)) in self.perm.iter().zip(&self.phase).enumerate() {
            m.set(r, j, CyclotomicNumber::root_of_unity(self.conductor, ph as i64));
        }
        m
    }

    /// self · A for dense A.
    pub fn mul_dense_right(&self, a: &ExactMatrix) -> ExactMatrix {
        let n = self.dim();
        let mut out = ExactMatrix::zeros(n, a.cols(), self.conductor);
        for (j, (&r, &ph)) in self.perm.iter().zip(&self.phase).enumerate() {
            let z = CyclotomicNumber::root_of_unity(self.conductor, ph as i64);
            for c in 0..a.cols() {
                out.set(r, c, &z * a.get(j, c));
            }
        }
        out
    }

    /// A · self for dense A.
    pub fn mul_dense_left(&self, a: &ExactMatrix) -> ExactMatrix {
        let n = self.dim();
        let mut out = ExactMatrix::zeros(a.rows(), n, self.conductor);
        for (j, (&r, &ph)) in self.perm.iter().zip(&self.phase).enumerate() {
            let z = CyclotomicNumber::root_of_unity(self.conductor, ph as i64);
            for i in 0..a.rows() {
                out.set(i, j, a.get(i, r) * &z);
            }
        }
        out
    }
}

/// Incrementally maintained reduced row echelon form over Q(ζ_n).
#[derive(Clone, Debug)]
pub struct RowEchelon {
    ncols: usize,
    conductor: u32,
    rows: Vec<Vec<CyclotomicNumber>>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn new(ncols: usize, conductor: u32) -> Self {
        RowEchelon {
            ncols,
            conductor,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<CyclotomicNumber>) -> Vec<CyclotomicNumber> {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if v[pc].is_zero() {
                continue;
            }
            let factor = v[pc].clone();
            for (c, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    v[c] = &v[c] - &(&factor * r);
                }
            }
        }
        v
    }

    /// Whether `v` lies in the row space.
    pub fn contains(&self, v: &[CyclotomicNumber]) -> bool {
        self.reduce(v.to_vec()).iter().all(CyclotomicNumber::is_zero)
    }

    /// Adds a row; returns true if it increased the rank.
    pub fn insert(&mut self, v: Vec<CyclotomicNumber>) -> Result<bool> {
        if v.len() != self.ncols {
            return Err(Error::Structural(format!(
                "row of length {} in a system with {} columns",
                v.len(),
                self.ncols
            )));
        }
        let v = self.reduce(v);
        let Some(pc) = v.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        // exact nonzero pivot by construction
        let inv = v[pc].inv()?;
        let v: Vec<CyclotomicNumber> = v.iter().map(|x| x * &inv).collect();
        for row in &mut self.rows {
            if row[pc].is_zero() {
                continue;
            }
            let factor = row[pc].clone();
            for (c, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    row[c] = &row[c] - &(&factor * x);
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(pc);
        Ok(true)
    }

    /// Basis of {x : row · x = 0 for every row}.
    pub fn nullspace(&self) -> Vec<Vec<CyclotomicNumber>> {
        let n = self.conductor;
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![CyclotomicNumber::zero(n); self.ncols];
                x[f] = CyclotomicNumber::one(n);
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    x[pc] = -&row[f];
                }
                x
            })
            .collect()
    }
}

fn check_uniform(list: &[ExactMatrix]) -> Result<(usize, usize, u32)> {
    let first = list
        .first()
        .ok_or_else(|| Error::Structural("empty matrix list".into()))?;
    let shape = (first.rows, first.cols, first.conductor);
    if list.iter().any(|m| (m.rows, m.cols, m.conductor) != shape) {
        return Err(Error::Structural("matrices of differing shape or conductor".into()));
    }
    Ok(shape)
}

/// Dimension of the linear span of `list`.
pub fn span_rank(list: &[ExactMatrix]) -> Result<usize> {
    if list.is_empty() {
        return Ok(0);
    }
    let (r, c, n) = check_uniform(list)?;
    let mut ech = RowEchelon::new(r * c, n);
    for m in list {
        ech.insert(m.vectorize())?;
    }
    Ok(ech.rank())
}

pub fn span_echelon(list: &[ExactMatrix]) -> Result<RowEchelon> {
    let (r, c, n) = check_uniform(list)?;
    let mut ech = RowEchelon::new(r * c, n);
    for m in list {
        ech.insert(m.vectorize())?;
    }
    Ok(ech)
}

pub fn span_membership(v: &ExactMatrix, basis: &[ExactMatrix]) -> Result<bool> {
    if basis.is_empty() {
        return Ok(v.is_zero());
    }
    let ech = span_echelon(basis)?;
    if (v.rows, v.cols, v.conductor) != (basis[0].rows, basis[0].cols, basis[0].conductor) {
        return Err(Error::Structural("vector shape differs from basis".into()));
    }
    Ok(ech.contains(&v.vectorize()))
}

/// Rows expressing hY - Yh = 0 in the row-major unknowns of Y.
pub fn commutator_equations(h: &ExactMatrix) -> Vec<Vec<CyclotomicNumber>> {
    let n = h.rows;
    let cond = h.conductor;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for s in 0..n {
            let mut row = vec![CyclotomicNumber::zero(cond); n * n];
            for k in 0..n {
                let hrk = h.get(r, k);
                if !hrk.is_zero() {
                    row[k * n + s] = &row[k * n + s] + hrk;
                }
                let hks = h.get(k, s);
                if !hks.is_zero() {
                    row[r * n + k] = &row[r * n + k] - hks;
                }
            }
            out.push(row);
        }
    }
    out
}

/// Rows expressing YS + SYᵀ = 0 in the row-major unknowns of Y.
pub fn symplectic_equations(s: &ExactMatrix) -> Vec<Vec<CyclotomicNumber>> {
    let n = s.rows;
    let cond = s.conductor;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let mut row = vec![CyclotomicNumber::zero(cond); n * n];
            for k in 0..n {
                // (YS)_{rc} = Σ_k Y_{rk} S_{kc}
                let skc = s.get(k, c);
                if !skc.is_zero() {
                    row[r * n + k] = &row[r * n + k] + skc;
                }
                // (S Yᵀ)_{rc} = Σ_k S_{rk} Y_{ck}
                let srk = s.get(r, k);
                if !srk.is_zero() {
                    row[c * n + k] = &row[c * n + k] + srk;
                }
            }
            out.push(row);
        }
    }
    out
}

/// Solution space of a homogeneous system on n×n matrices, returned as matrices.
pub fn solve_matrix_system(
    n: usize,
    conductor: u32,
    equations: impl IntoIterator<Item = Vec<CyclotomicNumber>>,
) -> Result<Vec<ExactMatrix>> {
    let mut ech = RowEchelon::new(n * n, conductor);
    for eq in equations {
        if eq.iter().all(CyclotomicNumber::is_zero) {
            continue;
        }
        ech.insert(eq)?;
        if ech.rank() == n * n {
            break;
        }
    }
    Ok(ech
        .nullspace()
        .into_iter()
        .map(|v| ExactMatrix {
            rows: n,
            cols: n,
            conductor,
            entries: v,
        })
        .collect())
}

/// {Y : [h, Y] = 0 for every h in `basis`}: its dimension and a basis.
pub fn solve_centralizer(basis: &[ExactMatrix]) -> Result<(usize, Vec<ExactMatrix>)> {
    let (r, c, n) = check_uniform(basis)?;
    if r != c {
        return Err(Error::Structural("centralizer of non-square matrices".into()));
    }
    let sols = solve_matrix_system(r, n, basis.iter().flat_map(commutator_equations))?;
    Ok((sols.len(), sols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_number::rational;
    use proptest::prelude::*;

    fn c4(re: i64, im: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_coeffs(4, vec![rational(re, 1), rational(im, 1)]).unwrap()
    }

    fn order_three_2x2() -> ExactMatrix {
        // (1+i)/2 · [[-1, i], [1, i]]
        let s = CyclotomicNumber::from_coeffs(4, vec![rational(1, 2), rational(1, 2)]).unwrap();
        ExactMatrix::from_rows(vec![vec![c4(-1, 0), c4(0, 1)], vec![c4(1, 0), c4(0, 1)]])
            .unwrap()
            .scale(&s)
    }

    #[test]
    fn basic_identities() {
        let m = order_three_2x2();
        assert_eq!(m.dagger().dagger(), m);
        assert_eq!(ExactMatrix::identity(5, 4).trace().unwrap(), CyclotomicNumber::from_int(4, 5));
        assert!(ExactMatrix::identity(3, 3).det().unwrap().is_one());
        assert!(m.is_unitary());
        assert!(m.det().unwrap().is_one());
    }

    #[test]
    fn trace_inner_product_matches_expansion() {
        let u = order_three_2x2();
        let v = order_three_2x2().pow(2).unwrap();
        let f = u.dagger().mul(&v).unwrap().trace().unwrap();
        // Σ_{ij} conj(u_ij) v_ij
        let mut oracle = CyclotomicNumber::zero(4);
        for i in 0..2 {
            for j in 0..2 {
                oracle = &oracle + &(&u.get(i, j).conjugate() * v.get(i, j));
            }
        }
        assert_eq!(f, oracle);
    }

    #[test]
    fn scalar_detection() {
        let three = ExactMatrix::scalar(3, &CyclotomicNumber::from_int(4, 3));
        assert_eq!(three.is_scalar(), Some(CyclotomicNumber::from_int(4, 3)));
        assert_eq!(order_three_2x2().is_scalar(), None);
    }

    #[test]
    fn dimension_errors() {
        let a = ExactMatrix::zeros(2, 3, 4);
        assert!(matches!(a.mul(&a), Err(Error::Structural(_))));
        assert!(matches!(a.det(), Err(Error::Structural(_))));
        assert!(ExactMatrix::zeros(2, 2, 3).add(&ExactMatrix::zeros(2, 2, 4)).is_err());
    }

    #[test]
    fn inverse_and_singular() {
        let m = order_three_2x2();
        assert!(m.mul(&m.inverse().unwrap()).unwrap().is_identity());
        let sing = ExactMatrix::from_rows(vec![vec![c4(1, 0), c4(2, 0)], vec![c4(2, 0), c4(4, 0)]]).unwrap();
        assert!(sing.det().unwrap().is_zero());
        assert!(matches!(sing.inverse(), Err(Error::Domain(_))));
    }

    #[test]
    fn centralizer_examples() {
        let (d, _) = solve_centralizer(&[ExactMatrix::identity(3, 4)]).unwrap();
        assert_eq!(d, 9);
        // diagonal trace-zero matrices in 4x4
        let diag: Vec<ExactMatrix> = (0..3)
            .map(|k| {
                let mut m = ExactMatrix::zeros(4, 4, 4);
                m.set(k, k, c4(1, 0));
                m.set(k + 1, k + 1, c4(-1, 0));
                m
            })
            .collect();
        let (d, basis) = solve_centralizer(&diag).unwrap();
        assert_eq!(d, 4);
        for y in &basis {
            for h in &diag {
                assert!(h.commutes_with(y));
            }
        }
    }

    #[test]
    fn spans() {
        let m = order_three_2x2();
        assert!(span_membership(&m, &[m.clone()]).unwrap());
        assert!(!span_membership(&ExactMatrix::identity(2, 4), &[m.clone()]).unwrap());
        let i = ExactMatrix::identity(2, 4);
        assert_eq!(span_rank(&[i.clone(), i.neg()]).unwrap(), 1);
        // order 3 with det 1: M² + M + I = 0 by Cayley–Hamilton
        assert_eq!(span_rank(&[i.clone(), m.clone(), m.pow(2).unwrap()]).unwrap(), 2);
    }

    #[test]
    fn monomial_fast_path_matches_dense() {
        let a = MonomialMatrix::new(4, vec![2, 0, 1], vec![1, 3, 2]);
        let b = MonomialMatrix::new(4, vec![1, 2, 0], vec![0, 1, 1]);
        assert_eq!(a.mul(&b).to_dense(), a.to_dense().mul(&b.to_dense()).unwrap());
        assert_eq!(a.inverse().to_dense(), a.to_dense().inverse().unwrap());
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
        assert_eq!(a.trace(), a.to_dense().trace().unwrap());
        let d = order_three_2x2();
        let m2 = MonomialMatrix::new(4, vec![1, 0], vec![3, 2]);
        assert_eq!(m2.mul_dense_right(&d), m2.to_dense().mul(&d).unwrap());
        assert_eq!(m2.mul_dense_left(&d), d.mul(&m2.to_dense()).unwrap());
        assert!(a.mul(&a.inverse()).is_identity());
    }

    #[test]
    fn serde_round_trip() {
        let m = order_three_2x2();
        let s = serde_json::to_string(&m).unwrap();
        let back: ExactMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = s.replacen("\"rows\":2", "\"rows\":3", 1);
        assert!(serde_json::from_str::<ExactMatrix>(&bad).is_err());
    }

    fn small_matrix(n: usize, cond: u32) -> impl Strategy<Value = ExactMatrix> {
        let len = crate::exact_number::phi(cond);
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, len), n * n).prop_map(move |cells| {
            let rows = cells
                .chunks(n)
                .map(|row| {
                    row.iter()
                        .map(|c| {
                            CyclotomicNumber::from_coeffs(cond, c.iter().map(|&v| rational(v, 1)).collect())
                                .unwrap()
                        })
                        .collect()
                })
                .collect();
            ExactMatrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn algebraic_identities(a in small_matrix(3, 4), b in small_matrix(3, 4)) {
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.dagger(), b.dagger().mul(&a.dagger()).unwrap());
            prop_assert_eq!(ab.trace().unwrap(), b.mul(&a).unwrap().trace().unwrap());
            prop_assert_eq!(a.dagger().det().unwrap(), a.det().unwrap().conjugate());
            prop_assert_eq!(ab.det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
        }

        #[test]
        fn det_multiplicative_q_zeta3(a in small_matrix(3, 3), b in small_matrix(3, 3)) {
            prop_assert_eq!(a.mul(&b).unwrap().det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
        }
    }
}
