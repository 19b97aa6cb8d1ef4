//! Dense exact linear algebra over a [`Field`].
//!
//! GF(2) inputs go through the bit-packed path in [`gf2`]; every other field
//! uses table-driven elimination. Both produce the same canonical RREF.

pub mod gf2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u64>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(|&e| e as u64).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(serde::de::Error::custom("matrix entries do not match rows/cols"));
        }
        let mut data = Vec::with_capacity(j.rows * j.cols);
        for r in &j.entries {
            for &e in r {
                if e > Elem::MAX as u64 {
                    return Err(serde::de::Error::custom("matrix entry out of range"));
                }
                data.push(e as Elem);
            }
        }
        Ok(Matrix {
            rows: j.rows,
            cols: j.cols,
            data,
        })
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Elem>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Checks every entry is an element of `f`.
    pub fn check_field(&self, f: &Field) -> Result<()> {
        if self.data.iter().any(|&e| e as usize >= f.order()) {
            return Err(Error::BadParams(format!(
                "matrix entry outside F_{}",
                f.designator()
            )));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Columns `range` of the matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn add(&self, f: &Field, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("matrix sum".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, f: &Field, c: Elem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, f: &Field, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(f, self.row(i), x))
            .collect())
    }
}

#[inline]
pub fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// `acc += c * v`.
#[inline]
pub fn axpy(f: &Field, acc: &mut [Elem], c: Elem, v: &[Elem]) {
    if c == 0 {
        return;
    }
    for (a, &x) in acc.iter_mut().zip(v) {
        *a = f.add(*a, f.mul(c, x));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Same shape as the input; rows past `rank` are zero.
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn rref(f: &Field, m: &Matrix) -> Rref {
    if f.is_gf2() {
        rref_gf2(m)
    } else {
        rref_generic(f, m)
    }
}

/// Table-driven elimination, valid for every field.
pub fn rref_generic(f: &Field, m: &Matrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(src) = (r..rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        if src != r {
            for j in 0..cols {
                a.data.swap(src * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("pivot is nonzero");
        for j in 0..cols {
            let v = f.mul(inv, a.get(r, j));
            a.set(r, j, v);
        }
        let pivot_row: Vec<Elem> = a.row(r).to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c);
            if factor != 0 {
                let neg = f.neg(factor);
                axpy(f, &mut a.data[i * cols..(i + 1) * cols], neg, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref {
        matrix: a,
        rank: r,
        pivots,
    }
}

/// Bit-packed elimination; entries of `m` are read modulo 2.
pub fn rref_gf2(m: &Matrix) -> Rref {
    let mut b = gf2::BitMatrix::from_bits(m.cols, (0..m.rows).map(|i| m.row(i)));
    let pivots = b.rref();
    let mut data = Vec::with_capacity(m.rows * m.cols);
    for i in 0..m.rows {
        data.extend(b.unpack_row(i));
    }
    Rref {
        matrix: Matrix {
            rows: m.rows,
            cols: m.cols,
            data,
        },
        rank: pivots.len(),
        pivots,
    }
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    rref(f, m).rank
}

fn nullspace_from_rref(f: &Field, r: &Rref) -> Vec<Vec<Elem>> {
    let cols = r.matrix.cols;
    let mut is_pivot = vec![false; cols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for free in (0..cols).filter(|&j| !is_pivot[j]) {
        let mut v = vec![0; cols];
        v[free] = 1;
        for (i, &p) in r.pivots.iter().enumerate() {
            v[p] = f.neg(r.matrix.get(i, free));
        }
        out.push(v);
    }
    out
}

/// `{x : M x = 0}`.
pub fn kernel(f: &Field, m: &Matrix) -> SubspaceBasis {
    let r = rref(f, m);
    SubspaceBasis::from_vectors(f, m.cols, nullspace_from_rref(f, &r)).expect("kernel vectors")
}

/// `{M x}` as a subspace of K^rows.
pub fn column_space(f: &Field, m: &Matrix) -> SubspaceBasis {
    SubspaceBasis::from_vectors(f, m.rows, m.transpose().row_vecs()).expect("columns")
}

/// Any `x` with `M x = b`, or `None` when the system is inconsistent.
pub fn solve(f: &Field, m: &Matrix, b: &[Elem]) -> Result<Option<Vec<Elem>>> {
    if b.len() != m.rows {
        return Err(Error::ShapeMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows
        )));
    }
    let bcol = Matrix::from_data(m.rows, 1, b.to_vec())?;
    let aug = m.hstack(&bcol)?;
    let r = rref(f, &aug);
    if r.pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![0; m.cols];
    for (i, &p) in r.pivots.iter().enumerate() {
        x[p] = r.matrix.get(i, m.cols);
    }
    Ok(Some(x))
}

/// A subspace of K^d in canonical form: the nonzero rows of its RREF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    field: Field,
    ambient_dim: usize,
    vectors: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(f: &Field, ambient_dim: usize) -> Self {
        SubspaceBasis {
            field: f.clone(),
            ambient_dim,
            vectors: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(f: &Field, ambient_dim: usize) -> Self {
        SubspaceBasis {
            field: f.clone(),
            ambient_dim,
            vectors: Matrix::identity(ambient_dim).row_vecs(),
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Span of `vectors` (any spanning set).
    pub fn from_vectors(f: &Field, ambient_dim: usize, vectors: Vec<Vec<Elem>>) -> Result<Self> {
        let m = Matrix::from_rows(ambient_dim, &vectors)?;
        m.check_field(f)?;
        let r = rref(f, &m);
        let vectors = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
        Ok(SubspaceBasis {
            field: f.clone(),
            ambient_dim,
            vectors,
            pivots: r.pivots,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Elem>] {
        &self.vectors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_rows(self.ambient_dim, &self.vectors).expect("basis rows")
    }

    fn check_ambient(&self, other_dim: usize) -> Result<()> {
        if self.ambient_dim != other_dim {
            return Err(Error::AmbientMismatch(format!(
                "ambient dimension {} vs {other_dim}",
                self.ambient_dim
            )));
        }
        Ok(())
    }

    /// Coefficients of `v` in the basis; `None` when `v` is not in the span.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        if v.len() != self.ambient_dim {
            return None;
        }
        let f = &self.field;
        let coeffs: Vec<Elem> = self.pivots.iter().map(|&p| v[p]).collect();
        let mut rest = v.to_vec();
        for (c, b) in coeffs.iter().zip(&self.vectors) {
            axpy(f, &mut rest, f.neg(*c), b);
        }
        rest.iter().all(|&e| e == 0).then_some(coeffs)
    }

    pub fn member(&self, v: &[Elem]) -> bool {
        self.coordinates(v).is_some()
    }

    /// `sum c_i b_i`.
    pub fn combine(&self, coeffs: &[Elem]) -> Vec<Elem> {
        let mut out = vec![0; self.ambient_dim];
        for (c, b) in coeffs.iter().zip(&self.vectors) {
            axpy(&self.field, &mut out, *c, b);
        }
        out
    }

    pub fn contains_space(&self, other: &SubspaceBasis) -> Result<bool> {
        self.check_ambient(other.ambient_dim)?;
        Ok(other.vectors.iter().all(|v| self.member(v)))
    }

    /// Functionals (as coordinate vectors under the standard pairing) vanishing on the space.
    pub fn annihilator(&self) -> SubspaceBasis {
        if self.vectors.is_empty() {
            return SubspaceBasis::full(&self.field, self.ambient_dim);
        }
        kernel(&self.field, &self.as_matrix())
    }

    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check_ambient(other.ambient_dim)?;
        let mut vs = self.vectors.clone();
        vs.extend(other.vectors.iter().cloned());
        SubspaceBasis::from_vectors(&self.field, self.ambient_dim, vs)
    }

    pub fn intersect(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check_ambient(other.ambient_dim)?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }
}

pub fn annihilator(w: &SubspaceBasis) -> SubspaceBasis {
    w.annihilator()
}

pub fn member(w: &SubspaceBasis, v: &[Elem]) -> bool {
    w.member(v)
}

pub fn sum_spaces(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<SubspaceBasis> {
    a.sum(b)
}

pub fn intersect(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<SubspaceBasis> {
    a.intersect(b)
}

/// Row accumulator that keeps a semi-echelon form, for stacking large
/// constraint systems one row at a time.
#[derive(Clone, Debug)]
pub enum Echelon {
    Gf2(gf2::Gf2Echelon),
    Generic {
        field: Field,
        cols: usize,
        rows: Vec<Vec<Elem>>,
        pivots: Vec<usize>,
    },
}

impl Echelon {
    pub fn new(f: &Field, cols: usize) -> Self {
        if f.is_gf2() {
            Echelon::Gf2(gf2::Gf2Echelon::new(cols))
        } else {
            Echelon::Generic {
                field: f.clone(),
                cols,
                rows: Vec::new(),
                pivots: Vec::new(),
            }
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Echelon::Gf2(e) => e.cols(),
            Echelon::Generic { cols, .. } => *cols,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Echelon::Gf2(e) => e.rank(),
            Echelon::Generic { rows, .. } => rows.len(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.cols()
    }

    pub fn insert(&mut self, row: &[Elem]) -> bool {
        match self {
            Echelon::Gf2(e) => {
                let packed = gf2::pack(row, e.words());
                e.insert_packed(packed)
            }
            Echelon::Generic {
                field,
                rows,
                pivots,
                ..
            } => {
                let mut v = row.to_vec();
                for (stored, &p) in rows.iter().zip(pivots.iter()) {
                    let c = v[p];
                    if c != 0 {
                        axpy(field, &mut v, field.neg(c), stored);
                    }
                }
                match v.iter().position(|&e| e != 0) {
                    Some(p) => {
                        let inv = field.inv(v[p]).unwrap();
                        for e in v.iter_mut() {
                            *e = field.mul(inv, *e);
                        }
                        rows.push(v);
                        pivots.push(p);
                        true
                    }
                    None => false,
                }
            }
        }
    }

    /// Solution space `{x : r . x = 0 for all inserted r}`.
    pub fn nullspace(&self, f: &Field) -> SubspaceBasis {
        let cols = self.cols();
        let m = match self {
            Echelon::Gf2(e) => {
                let b = e.clone().into_matrix();
                let rows: Vec<Vec<Elem>> = (0..b.rows()).map(|i| b.unpack_row(i)).collect();
                Matrix::from_rows(cols, &rows).unwrap()
            }
            Echelon::Generic { rows, .. } => Matrix::from_rows(cols, rows).unwrap(),
        };
        kernel(f, &m)
    }
}
