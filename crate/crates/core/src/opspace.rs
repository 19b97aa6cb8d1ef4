//! Operator spaces: linear subspaces of structured matrix ambients.
//!
//! Every ambient is a space of `n x N` matrices. `Sym(n, m)` and `Alt(n, m)`
//! have a symmetric (resp. alternating) `n x n` block followed by `m` free
//! tail columns; `Full(n, m)` is all of `Mat_{n,m}`.
//!
//! Coordinates, in order:
//! - `Sym`: diagonal `(i,i)`, then off-diagonal `(i,j)`, `i < j`, lexicographic;
//! - `Alt`: lower entries `(i,j)`, `i > j`, lexicographic (the entry at `(j,i)` is the negative);
//! - tail (and all of `Full`): column-major.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_field, Elem, Field, DEFAULT_ORDER_CAP};
use crate::linalg::{Matrix, SubspaceBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientKind {
    Full,
    Sym,
    Alt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    kind: AmbientKind,
    n: usize,
    m: usize,
    field: Field,
}

/// One coordinate of an ambient: the matrix entries it controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Diag(usize),
    SymPair(usize, usize),
    /// `(i, j)` with `i > j`: `+1` at `(i, j)`, `-1` at `(j, i)`.
    AltPair(usize, usize),
    Entry(usize, usize),
}

impl Ambient {
    pub fn full(field: &Field, rows: usize, cols: usize) -> Self {
        Ambient {
            kind: AmbientKind::Full,
            n: rows,
            m: cols,
            field: field.clone(),
        }
    }

    pub fn sym(field: &Field, n: usize, m: usize) -> Self {
        Ambient {
            kind: AmbientKind::Sym,
            n,
            m,
            field: field.clone(),
        }
    }

    pub fn alt(field: &Field, n: usize, m: usize) -> Self {
        Ambient {
            kind: AmbientKind::Alt,
            n,
            m,
            field: field.clone(),
        }
    }

    pub fn new(kind: AmbientKind, field: &Field, n: usize, m: usize) -> Self {
        Ambient {
            kind,
            n,
            m,
            field: field.clone(),
        }
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of rows, i.e. the target dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Tail width (all columns for `Full`).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_structured(&self) -> bool {
        self.kind != AmbientKind::Full
    }

    /// Width of the structured block (0 for `Full`).
    pub fn block_width(&self) -> usize {
        if self.is_structured() {
            self.n
        } else {
            0
        }
    }

    pub fn cols(&self) -> usize {
        self.block_width() + self.m
    }

    pub fn block_dim(&self) -> usize {
        let n = self.n;
        match self.kind {
            AmbientKind::Full => 0,
            AmbientKind::Sym => n * (n + 1) / 2,
            AmbientKind::Alt => n * n.saturating_sub(1) / 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.block_dim() + self.n * self.m
    }

    /// The pure block ambient (`m = 0`).
    pub fn block_ambient(&self) -> Ambient {
        Ambient::new(self.kind, &self.field, self.n, 0)
    }

    /// `Full(n, m)` holding the tail columns.
    pub fn tail_ambient(&self) -> Ambient {
        Ambient::full(&self.field, self.n, self.m)
    }

    fn slots(&self) -> Vec<Slot> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim());
        match self.kind {
            AmbientKind::Full => {}
            AmbientKind::Sym => {
                out.extend((0..n).map(Slot::Diag));
                for i in 0..n {
                    for j in i + 1..n {
                        out.push(Slot::SymPair(i, j));
                    }
                }
            }
            AmbientKind::Alt => {
                for i in 0..n {
                    for j in 0..i {
                        out.push(Slot::AltPair(i, j));
                    }
                }
            }
        }
        let off = self.block_width();
        for c in 0..self.m {
            for r in 0..n {
                out.push(Slot::Entry(r, off + c));
            }
        }
        out
    }

    /// Coordinate vector of a matrix of the ambient.
    pub fn encode(&self, mat: &Matrix) -> Result<Vec<Elem>> {
        if mat.rows() != self.n || mat.cols() != self.cols() {
            return Err(Error::MatrixNotInAmbient(format!(
                "{}x{} matrix in a {}x{} ambient",
                mat.rows(),
                mat.cols(),
                self.n,
                self.cols()
            )));
        }
        mat.check_field(&self.field)?;
        let f = &self.field;
        match self.kind {
            AmbientKind::Full => {}
            AmbientKind::Sym => {
                for i in 0..self.n {
                    for j in i + 1..self.n {
                        if mat.get(i, j) != mat.get(j, i) {
                            return Err(Error::MatrixNotInAmbient(format!(
                                "block is not symmetric at ({i},{j})"
                            )));
                        }
                    }
                }
            }
            AmbientKind::Alt => {
                for i in 0..self.n {
                    if mat.get(i, i) != 0 {
                        return Err(Error::MatrixNotInAmbient(format!(
                            "block has nonzero diagonal entry at ({i},{i})"
                        )));
                    }
                    for j in 0..i {
                        if mat.get(j, i) != f.neg(mat.get(i, j)) {
                            return Err(Error::MatrixNotInAmbient(format!(
                                "block is not skew-symmetric at ({i},{j})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(self
            .slots()
            .into_iter()
            .map(|s| match s {
                Slot::Diag(i) => mat.get(i, i),
                Slot::SymPair(i, j) | Slot::AltPair(i, j) | Slot::Entry(i, j) => mat.get(i, j),
            })
            .collect())
    }

    pub fn decode(&self, v: &[Elem]) -> Result<Matrix> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "coordinate vector of length {} for an ambient of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let f = &self.field;
        let mut mat = Matrix::zeros(self.n, self.cols());
        for (s, &x) in self.slots().into_iter().zip(v) {
            match s {
                Slot::Diag(i) => mat.set(i, i, x),
                Slot::SymPair(i, j) => {
                    mat.set(i, j, x);
                    mat.set(j, i, x);
                }
                Slot::AltPair(i, j) => {
                    mat.set(i, j, x);
                    mat.set(j, i, f.neg(x));
                }
                Slot::Entry(i, j) => mat.set(i, j, x),
            }
        }
        Ok(mat)
    }

    pub fn describe(&self) -> String {
        let kind = match self.kind {
            AmbientKind::Full => "Mat",
            AmbientKind::Sym => "Mats",
            AmbientKind::Alt => "Mata",
        };
        match self.kind {
            AmbientKind::Full => format!("Mat_{{{},{}}}(F_{})", self.n, self.m, self.field),
            _ if self.m == 0 => format!("{kind}_{}(F_{})", self.n, self.field),
            _ => format!(
                "{kind}_{}(F_{}) + Mat_{{{},{}}}",
                self.n, self.field, self.n, self.m
            ),
        }
    }
}

/// A linear subspace of an [`Ambient`], stored by its canonical RREF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpace {
    ambient: Ambient,
    basis: SubspaceBasis,
}

impl OperatorSpace {
    pub fn full(ambient: &Ambient) -> Self {
        OperatorSpace {
            ambient: ambient.clone(),
            basis: SubspaceBasis::full(&ambient.field, ambient.dim()),
        }
    }

    pub fn zero(ambient: &Ambient) -> Self {
        OperatorSpace {
            ambient: ambient.clone(),
            basis: SubspaceBasis::zero(&ambient.field, ambient.dim()),
        }
    }

    pub fn from_basis(ambient: &Ambient, basis: SubspaceBasis) -> Result<Self> {
        if basis.ambient_dim() != ambient.dim() || basis.field() != ambient.field() {
            return Err(Error::AmbientMismatch(format!(
                "basis of K^{} for {}",
                basis.ambient_dim(),
                ambient.describe()
            )));
        }
        Ok(OperatorSpace {
            ambient: ambient.clone(),
            basis,
        })
    }

    pub fn from_coordinates(ambient: &Ambient, vectors: Vec<Vec<Elem>>) -> Result<Self> {
        let basis = SubspaceBasis::from_vectors(&ambient.field, ambient.dim(), vectors)?;
        Self::from_basis(ambient, basis)
    }

    /// Span of the given matrices, each of which must lie in the ambient.
    pub fn span(ambient: &Ambient, mats: &[Matrix]) -> Result<Self> {
        let vectors = mats
            .iter()
            .map(|m| ambient.encode(m))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coordinates(ambient, vectors)
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn field(&self) -> &Field {
        &self.ambient.field
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.basis.dim()
    }

    pub fn rows(&self) -> usize {
        self.ambient.n
    }

    pub fn cols(&self) -> usize {
        self.ambient.cols()
    }

    pub fn basis_matrices(&self) -> Vec<Matrix> {
        self.basis
            .vectors()
            .iter()
            .map(|v| self.ambient.decode(v).expect("basis vector in ambient"))
            .collect()
    }

    /// `sum coeffs_i b_i` as a matrix.
    pub fn element(&self, coeffs: &[Elem]) -> Matrix {
        self.ambient
            .decode(&self.basis.combine(coeffs))
            .expect("combination lies in ambient")
    }

    /// Coefficients of `mat` in the basis; `None` when `mat` is not in the space.
    pub fn coordinates_of(&self, mat: &Matrix) -> Option<Vec<Elem>> {
        let v = self.ambient.encode(mat).ok()?;
        self.basis.coordinates(&v)
    }

    pub fn contains(&self, mat: &Matrix) -> bool {
        self.coordinates_of(mat).is_some()
    }

    pub fn codim_of(&self) -> usize {
        self.codim()
    }

    pub fn same_ambient(&self, other: &OperatorSpace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(format!(
                "{} vs {}",
                self.ambient.describe(),
                other.ambient.describe()
            )));
        }
        Ok(())
    }

    pub fn is_subspace_of(&self, other: &OperatorSpace) -> Result<bool> {
        self.same_ambient(other)?;
        other.basis.contains_space(&self.basis)
    }

    /// The same matrices viewed in `Full(n, N)`.
    pub fn as_full(&self) -> OperatorSpace {
        let amb = Ambient::full(self.field(), self.rows(), self.cols());
        OperatorSpace::span(&amb, &self.basis_matrices()).expect("every matrix lies in Mat_{n,N}")
    }

    pub fn to_json(&self) -> SpaceJson {
        SpaceJson {
            field: self.field().designator(),
            ambient: AmbientJson {
                kind: self.ambient.kind,
                n: self.ambient.n,
                m: self.ambient.m,
            },
            basis: self
                .basis
                .vectors()
                .iter()
                .map(|v| v.iter().map(|&e| e as u64).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &SpaceJson) -> Result<Self> {
        let field = parse_field(&j.field, DEFAULT_ORDER_CAP)?;
        let ambient = Ambient::new(j.ambient.kind, &field, j.ambient.n, j.ambient.m);
        let vectors = j
            .basis
            .iter()
            .map(|v| v.iter().map(|&e| field.check_elem(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        for v in &vectors {
            if v.len() != ambient.dim() {
                return Err(Error::Parse(format!(
                    "basis vector of length {} in an ambient of dimension {}",
                    v.len(),
                    ambient.dim()
                )));
            }
        }
        Self::from_coordinates(&ambient, vectors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientJson {
    pub kind: AmbientKind,
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub field: String,
    pub ambient: AmbientJson,
    pub basis: Vec<Vec<u64>>,
}

pub fn encode(mat: &Matrix, amb: &Ambient) -> Result<Vec<Elem>> {
    amb.encode(mat)
}

pub fn decode(v: &[Elem], amb: &Ambient) -> Result<Matrix> {
    amb.decode(v)
}

pub fn full_space(amb: &Ambient) -> OperatorSpace {
    OperatorSpace::full(amb)
}

fn embed(mat: &Matrix, rows: usize, cols: usize, r0: usize, c0: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..mat.rows() {
        for j in 0..mat.cols() {
            out.set(r0 + i, c0 + j, mat.get(i, j));
        }
    }
    out
}

/// Block-diagonal sum `A (+) B` of two pure sym (or two pure alt) spaces.
pub fn direct_sum(a: &OperatorSpace, b: &OperatorSpace) -> Result<OperatorSpace> {
    let (ka, kb) = (a.ambient.kind, b.ambient.kind);
    if ka != kb || ka == AmbientKind::Full {
        return Err(Error::KindMismatch(format!(
            "direct sum of {ka:?} and {kb:?} spaces"
        )));
    }
    if a.ambient.m != 0 || b.ambient.m != 0 {
        return Err(Error::KindMismatch("direct sum requires m = 0 tails".into()));
    }
    if a.field() != b.field() {
        return Err(Error::MixedFields(a.field().designator(), b.field().designator()));
    }
    let n = a.rows() + b.rows();
    let amb = Ambient::new(ka, a.field(), n, 0);
    let mut gens: Vec<Matrix> = a
        .basis_matrices()
        .iter()
        .map(|m| embed(m, n, n, 0, 0))
        .collect();
    gens.extend(
        b.basis_matrices()
            .iter()
            .map(|m| embed(m, n, n, a.rows(), a.rows())),
    );
    OperatorSpace::span(&amb, &gens)
}

/// `A ∐ B = {[A B]}`. A structured `A` next to a `Full` `B` keeps its kind,
/// with the tail widened; any other combination lands in `Full`.
pub fn side_by_side(a: &OperatorSpace, b: &OperatorSpace) -> Result<OperatorSpace> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "side by side of {} and {} rows",
            a.rows(),
            b.rows()
        )));
    }
    if a.field() != b.field() {
        return Err(Error::MixedFields(a.field().designator(), b.field().designator()));
    }
    let n = a.rows();
    let cols = a.cols() + b.cols();
    let amb = match (a.ambient.kind, b.ambient.kind) {
        (k, AmbientKind::Full) => Ambient::new(k, a.field(), n, a.ambient.m + b.cols()),
        _ => Ambient::full(a.field(), n, cols),
    };
    let mut gens: Vec<Matrix> = a
        .basis_matrices()
        .iter()
        .map(|m| embed(m, n, cols, 0, 0))
        .collect();
    gens.extend(
        b.basis_matrices()
            .iter()
            .map(|m| embed(m, n, cols, 0, a.cols())),
    );
    OperatorSpace::span(&amb, &gens)
}

fn require_structured(s: &OperatorSpace) -> Result<()> {
    if !s.ambient.is_structured() {
        return Err(Error::KindMismatch(
            "restricted/modulo parts need a structured ambient".into(),
        ));
    }
    Ok(())
}

/// `S_r`: the structured blocks of the elements of `S`.
pub fn restricted_part(s: &OperatorSpace) -> Result<OperatorSpace> {
    require_structured(s)?;
    let bd = s.ambient.block_dim();
    let rows: Vec<Vec<Elem>> = s
        .basis
        .vectors()
        .iter()
        .zip(s.basis.pivots())
        .filter(|(_, &p)| p < bd)
        .map(|(v, _)| v[..bd].to_vec())
        .collect();
    OperatorSpace::from_coordinates(&s.ambient.block_ambient(), rows)
}

/// `S_m`: tails of the elements of `S` whose block vanishes, in `Full(n, m)`.
pub fn modulo_part(s: &OperatorSpace) -> Result<OperatorSpace> {
    require_structured(s)?;
    let bd = s.ambient.block_dim();
    // In RREF with block coordinates first, the rows pivoting in the tail are
    // exactly a basis of the elements with zero block.
    let rows: Vec<Vec<Elem>> = s
        .basis
        .vectors()
        .iter()
        .zip(s.basis.pivots())
        .filter(|(_, &p)| p >= bd)
        .map(|(v, _)| v[bd..].to_vec())
        .collect();
    OperatorSpace::from_coordinates(&s.ambient.tail_ambient(), rows)
}

/// Rows of the canonical projection `K^n -> K^n / W`: the RREF basis of `W°`.
pub fn quotient_projection(w: &SubspaceBasis) -> Matrix {
    w.annihilator().as_matrix()
}

/// `S mod W = {P s : s in S}` in `Full(n - dim W, N)`.
pub fn quotient_space(s: &OperatorSpace, w: &SubspaceBasis) -> Result<OperatorSpace> {
    if w.ambient_dim() != s.rows() || w.field() != s.field() {
        return Err(Error::AmbientMismatch(format!(
            "quotient of a space with {} rows by a subspace of K^{}",
            s.rows(),
            w.ambient_dim()
        )));
    }
    let p = quotient_projection(w);
    let amb = Ambient::full(s.field(), p.rows(), s.cols());
    let f = s.field();
    let gens = s
        .basis_matrices()
        .iter()
        .map(|m| p.mul(f, m))
        .collect::<Result<Vec<_>>>()?;
    OperatorSpace::span(&amb, &gens)
}

/// Named constructions of operator spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceFamily {
    FullSym { n: usize, m: usize },
    FullAlt { n: usize, m: usize },
    FullRect { rows: usize, cols: usize },
    /// Hyperplane of `Mats_3` with `m_{2,3} = 0`.
    T3,
    /// `Mats_1 (+) Mats_{n-1}`.
    SymBlockCounterexample { n: usize },
    /// `U_2 (+) Mats_{n-2}` with `U_2 = {[a b; b 0]}`.
    U2Block { n: usize },
    /// Alternating matrices with `a_{i,1} = 0` for `i >= 3`.
    AltFirstColumn { n: usize },
    /// Alternating block pattern with an upper-triangular Toeplitz `2x2` block.
    AltCodim2n5 { n: usize },
    /// Alternating block pattern with a symmetric `2x2` block (F_2 only).
    AltCodim2n6 { n: usize },
    /// `M_f` for a linear `f : Mata_3 -> Mat_r` given by `3 r^2` coefficients,
    /// `coeffs[t r^2 + i r + j]` = coefficient of alternating coordinate `t` in `f(A)_{i,j}`.
    Mf { r: usize, coeffs: Vec<Elem> },
}

/// Identifier of a [`SpaceFamily`] without its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceFamilyId {
    FullSym,
    FullAlt,
    FullRect,
    T3,
    SymBlockCounterexample,
    U2Block,
    AltFirstColumn,
    AltCodim2n5,
    AltCodim2n6,
    Mf,
}

impl SpaceFamily {
    pub fn id(&self) -> SpaceFamilyId {
        match self {
            SpaceFamily::FullSym { .. } => SpaceFamilyId::FullSym,
            SpaceFamily::FullAlt { .. } => SpaceFamilyId::FullAlt,
            SpaceFamily::FullRect { .. } => SpaceFamilyId::FullRect,
            SpaceFamily::T3 => SpaceFamilyId::T3,
            SpaceFamily::SymBlockCounterexample { .. } => SpaceFamilyId::SymBlockCounterexample,
            SpaceFamily::U2Block { .. } => SpaceFamilyId::U2Block,
            SpaceFamily::AltFirstColumn { .. } => SpaceFamilyId::AltFirstColumn,
            SpaceFamily::AltCodim2n5 { .. } => SpaceFamilyId::AltCodim2n5,
            SpaceFamily::AltCodim2n6 { .. } => SpaceFamilyId::AltCodim2n6,
            SpaceFamily::Mf { .. } => SpaceFamilyId::Mf,
        }
    }
}

impl fmt::Display for SpaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceFamily::FullSym { n, m: 0 } => write!(f, "full-sym:{n}"),
            SpaceFamily::FullSym { n, m } => write!(f, "full-sym:{n},{m}"),
            SpaceFamily::FullAlt { n, m: 0 } => write!(f, "full-alt:{n}"),
            SpaceFamily::FullAlt { n, m } => write!(f, "full-alt:{n},{m}"),
            SpaceFamily::FullRect { rows, cols } => write!(f, "full:{rows}x{cols}"),
            SpaceFamily::T3 => write!(f, "t3"),
            SpaceFamily::SymBlockCounterexample { n } => write!(f, "sym-block:{n}"),
            SpaceFamily::U2Block { n } => write!(f, "u2:{n}"),
            SpaceFamily::AltFirstColumn { n } => write!(f, "alt-col1:{n}"),
            SpaceFamily::AltCodim2n5 { n } => write!(f, "alt-2n5:{n}"),
            SpaceFamily::AltCodim2n6 { n } => write!(f, "alt-2n6:{n}"),
            SpaceFamily::Mf { r, coeffs } => {
                write!(f, "mf:r={r},f=")?;
                for c in coeffs {
                    write!(f, "{c:x}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SpaceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad builder designator {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let n_and_m = |arg: Option<&str>| -> Result<(usize, usize)> {
            let arg = arg.ok_or_else(bad)?;
            match arg.split_once(',') {
                Some((n, m)) => Ok((num(n)?, num(m)?)),
                None => Ok((num(arg)?, 0)),
            }
        };
        let single = |arg: Option<&str>| -> Result<usize> { num(arg.ok_or_else(bad)?) };
        Ok(match name {
            "full-sym" => {
                let (n, m) = n_and_m(arg)?;
                SpaceFamily::FullSym { n, m }
            }
            "full-alt" => {
                let (n, m) = n_and_m(arg)?;
                SpaceFamily::FullAlt { n, m }
            }
            "full" => {
                let arg = arg.ok_or_else(bad)?;
                let (r, c) = arg.split_once('x').ok_or_else(bad)?;
                SpaceFamily::FullRect {
                    rows: num(r)?,
                    cols: num(c)?,
                }
            }
            "t3" if arg.is_none() => SpaceFamily::T3,
            "sym-block" => SpaceFamily::SymBlockCounterexample { n: single(arg)? },
            "u2" => SpaceFamily::U2Block { n: single(arg)? },
            "alt-col1" => SpaceFamily::AltFirstColumn { n: single(arg)? },
            "alt-2n5" => SpaceFamily::AltCodim2n5 { n: single(arg)? },
            "alt-2n6" => SpaceFamily::AltCodim2n6 { n: single(arg)? },
            "mf" => {
                let arg = arg.ok_or_else(bad)?;
                let mut r = None;
                let mut coeffs = None;
                for part in arg.split(',') {
                    match part.trim().split_once('=') {
                        Some(("r", v)) => r = Some(num(v)?),
                        Some(("f", v)) => {
                            coeffs = Some(
                                v.chars()
                                    .map(|c| c.to_digit(16).map(|d| d as Elem).ok_or_else(bad))
                                    .collect::<Result<Vec<_>>>()?,
                            )
                        }
                        _ => return Err(bad()),
                    }
                }
                let r = r.ok_or_else(bad)?;
                let coeffs = coeffs.unwrap_or_else(|| vec![0; 3 * r * r]);
                SpaceFamily::Mf { r, coeffs }
            }
            _ => return Err(bad()),
        })
    }
}

fn sym_unit(n: usize, cols: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, cols);
    m.set(i, j, 1);
    m.set(j, i, 1);
    m
}

/// `E_{i,j} - E_{j,i}` for `i > j`.
fn alt_unit(f: &Field, n: usize, cols: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, cols);
    m.set(i, j, 1);
    m.set(j, i, f.neg(1));
    m
}

fn sum_of(f: &Field, mats: &[Matrix]) -> Matrix {
    let mut acc = Matrix::zeros(mats[0].rows(), mats[0].cols());
    for m in mats {
        acc = acc.add(f, m).expect("same shape");
    }
    acc
}

/// Generators shared by the two alternating block patterns: `B`, `C` and `D` blocks.
fn alt_pattern_tail(f: &Field, n: usize) -> Vec<Matrix> {
    let mut g = vec![alt_unit(f, n, n, 3, 2)];
    for i in 4..n {
        for j in 2..i {
            g.push(alt_unit(f, n, n, i, j));
        }
    }
    g
}

/// Builds the space of a named family over `field`.
pub fn build(family: &SpaceFamily, field: &Field) -> Result<OperatorSpace> {
    let f = field;
    let need = |ok: bool, msg: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::BadParams(format!("{family}: {msg}")))
        }
    };
    match family {
        SpaceFamily::FullSym { n, m } => Ok(OperatorSpace::full(&Ambient::sym(f, *n, *m))),
        SpaceFamily::FullAlt { n, m } => Ok(OperatorSpace::full(&Ambient::alt(f, *n, *m))),
        SpaceFamily::FullRect { rows, cols } => {
            Ok(OperatorSpace::full(&Ambient::full(f, *rows, *cols)))
        }
        SpaceFamily::T3 => {
            let amb = Ambient::sym(f, 3, 0);
            let gens: Vec<Matrix> = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)]
                .iter()
                .map(|&(i, j)| sym_unit(3, 3, i, j))
                .collect();
            OperatorSpace::span(&amb, &gens)
        }
        SpaceFamily::SymBlockCounterexample { n } => {
            let n = *n;
            need(n >= 2, "needs n >= 2")?;
            let amb = Ambient::sym(f, n, 0);
            let mut gens = vec![sym_unit(n, n, 0, 0)];
            for i in 1..n {
                for j in i..n {
                    gens.push(sym_unit(n, n, i, j));
                }
            }
            OperatorSpace::span(&amb, &gens)
        }
        SpaceFamily::U2Block { n } => {
            let n = *n;
            need(n >= 2, "needs n >= 2")?;
            let amb = Ambient::sym(f, n, 0);
            let mut gens = vec![sym_unit(n, n, 0, 0), sym_unit(n, n, 0, 1)];
            for i in 2..n {
                for j in i..n {
                    gens.push(sym_unit(n, n, i, j));
                }
            }
            OperatorSpace::span(&amb, &gens)
        }
        SpaceFamily::AltFirstColumn { n } => {
            let n = *n;
            need(n >= 2, "needs n >= 2")?;
            let amb = Ambient::alt(f, n, 0);
            let mut gens = Vec::new();
            for i in 0..n {
                for j in 0..i {
                    if j == 0 && i >= 2 {
                        continue;
                    }
                    gens.push(alt_unit(f, n, n, i, j));
                }
            }
            OperatorSpace::span(&amb, &gens)
        }
        SpaceFamily::AltCodim2n5 { n } => {
            let n = *n;
            need(n >= 4, "needs n >= 4")?;
            let amb = Ambient::alt(f, n, 0);
            // A = [a b; 0 a] sits at rows 3-4, columns 1-2 (1-indexed).
            let mut gens = vec![
                sum_of(f, &[alt_unit(f, n, n, 2, 0), alt_unit(f, n, n, 3, 1)]),
                alt_unit(f, n, n, 2, 1),
            ];
            gens.extend(alt_pattern_tail(f, n));
            OperatorSpace::span(&amb, &gens)
        }
        SpaceFamily::AltCodim2n6 { n } => {
            let n = *n;
            need(n >= 4, "needs n >= 4")?;
            need(f.order() == 2, "defined over F_2 only")?;
            let amb = Ambient::alt(f, n, 0);
            // A = [a b; b c] at rows 3-4, columns 1-2.
            let mut gens = vec![
                alt_unit(f, n, n, 2, 0),
                sum_of(f, &[alt_unit(f, n, n, 2, 1), alt_unit(f, n, n, 3, 0)]),
                alt_unit(f, n, n, 3, 1),
            ];
            gens.extend(alt_pattern_tail(f, n));
            OperatorSpace::span(&amb, &gens)
        }
        SpaceFamily::Mf { r, coeffs } => {
            let r = *r;
            need(r <= 3, "needs r <= 3")?;
            need(coeffs.len() == 3 * r * r, "needs 3 r^2 coefficients")?;
            need(
                coeffs.iter().all(|&c| (c as usize) < f.order()),
                "coefficient outside the field",
            )?;
            let amb = Ambient::alt(f, 3, r);
            let cols = 3 + r;
            let mut gens = Vec::new();
            for (t, &(i, j)) in [(1, 0), (2, 0), (2, 1)].iter().enumerate() {
                let mut g = alt_unit(f, 3, cols, i, j);
                for a in 0..r {
                    for b in 0..r {
                        g.set(a, 3 + b, coeffs[t * r * r + a * r + b]);
                    }
                }
                gens.push(g);
            }
            // N in sl_r
            for a in 0..r {
                for b in 0..r {
                    if a != b {
                        let mut g = Matrix::zeros(3, cols);
                        g.set(a, 3 + b, 1);
                        gens.push(g);
                    }
                }
            }
            for a in 0..r.saturating_sub(1) {
                let mut g = Matrix::zeros(3, cols);
                g.set(a, 3 + a, 1);
                g.set(r - 1, 3 + r - 1, f.neg(1));
                gens.push(g);
            }
            // free rows below the first r
            for a in r..3 {
                for b in 0..r {
                    let mut g = Matrix::zeros(3, cols);
                    g.set(a, 3 + b, 1);
                    gens.push(g);
                }
            }
            OperatorSpace::span(&amb, &gens)
        }
    }
}

/// Number of `c`-dimensional subspaces of F_q^d.
pub fn gaussian_binomial(d: usize, c: usize, q: u128) -> u128 {
    if c > d {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..c {
        num *= q.pow((d - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Iterator over all codimension-`c` subspaces of an ambient, in canonical
/// order: by the pivot set of the annihilator's RREF (lexicographic), then by
/// its free entries read as a base-`q` counter.
pub struct SubspaceEnumerator {
    ambient: Ambient,
    codim: usize,
    pivots: Option<Vec<usize>>,
    free: Vec<(usize, usize)>,
    counter: Vec<Elem>,
    remaining: u128,
}

impl SubspaceEnumerator {
    fn free_positions(pivots: &[usize], d: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in p + 1..d {
                if !pivots.contains(&j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn next_pivots(pivots: &mut [usize], d: usize) -> bool {
        let c = pivots.len();
        for i in (0..c).rev() {
            if pivots[i] < d - c + i {
                pivots[i] += 1;
                for j in i + 1..c {
                    pivots[j] = pivots[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    pub fn count(&self) -> u128 {
        self.remaining
    }
}

impl Iterator for SubspaceEnumerator {
    type Item = OperatorSpace;

    fn next(&mut self) -> Option<OperatorSpace> {
        let pivots = self.pivots.as_ref()?.clone();
        let d = self.ambient.dim();
        let f = self.ambient.field.clone();

        let mut ann = Matrix::zeros(self.codim, d);
        for (i, &p) in pivots.iter().enumerate() {
            ann.set(i, p, 1);
        }
        for (&(i, j), &v) in self.free.iter().zip(&self.counter) {
            ann.set(i, j, v);
        }
        let space = if self.codim == 0 {
            OperatorSpace::full(&self.ambient)
        } else {
            let basis = crate::linalg::kernel(&f, &ann);
            OperatorSpace::from_basis(&self.ambient, basis).expect("kernel lives in ambient")
        };

        // advance the counter, then the pivot set
        let q = f.order() as Elem;
        let mut carry = true;
        for v in self.counter.iter_mut() {
            *v += 1;
            if *v < q {
                carry = false;
                break;
            }
            *v = 0;
        }
        if carry {
            let mut next = pivots;
            if self.codim > 0 && Self::next_pivots(&mut next, d) {
                self.free = Self::free_positions(&next, d);
                self.counter = vec![0; self.free.len()];
                self.pivots = Some(next);
            } else {
                self.pivots = None;
            }
        }
        self.remaining = self.remaining.saturating_sub(1);
        Some(space)
    }
}

/// All codimension-`codim` subspaces of `amb`, refusing when there are more than `cap`.
pub fn enumerate_subspaces(amb: &Ambient, codim: usize, cap: u64) -> Result<SubspaceEnumerator> {
    let d = amb.dim();
    if codim > d {
        return Err(Error::BadParams(format!(
            "codimension {codim} exceeds ambient dimension {d}"
        )));
    }
    let count = gaussian_binomial(d, codim, amb.field.order() as u128);
    if count > cap as u128 {
        return Err(Error::EnumerationCapExceeded { count, cap });
    }
    let pivots: Vec<usize> = (0..codim).collect();
    let free = SubspaceEnumerator::free_positions(&pivots, d);
    Ok(SubspaceEnumerator {
        ambient: amb.clone(),
        codim,
        counter: vec![0; free.len()],
        free,
        pivots: Some(pivots),
        remaining: count,
    })
}
