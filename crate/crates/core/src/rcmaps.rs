//! Additive maps on operator spaces and the range-compatibility problems on them.
//!
//! An additive map `F : S -> K^n` is F_p-linear, so it is determined by its
//! values on the prime basis `ω^l b_i` of `S` (index `β = i k + l`). Its F_p
//! coordinates are the prime digits of those values, ordered `(β, row, digit)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_field, Elem, Field};
use crate::linalg::{kernel, solve, Echelon, Matrix, SubspaceBasis};
use crate::opspace::{self, AmbientKind, OperatorSpace, SpaceFamily, SpaceJson};
use crate::Caps;

/// Iterates over all vectors of `F_q^len` in base-`q` counter order.
pub struct VectorCounter {
    q: Elem,
    cur: Option<Vec<Elem>>,
}

impl VectorCounter {
    pub fn new(q: usize, len: usize) -> Self {
        VectorCounter {
            q: q as Elem,
            cur: Some(vec![0; len]),
        }
    }
}

impl Iterator for VectorCounter {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().unwrap();
        let mut done = true;
        for v in cur.iter_mut() {
            *v += 1;
            if *v < self.q {
                done = false;
                break;
            }
            *v = 0;
        }
        if done {
            self.cur = None;
        }
        Some(out)
    }
}

/// `q^dim S`, refusing domains larger than the element cap.
pub fn check_domain_size(s: &OperatorSpace, caps: &Caps) -> Result<u128> {
    let size = (s.field().order() as u128)
        .checked_pow(s.dim() as u32)
        .unwrap_or(u128::MAX);
    if size > caps.elements as u128 {
        return Err(Error::DomainTooLarge {
            size,
            cap: caps.elements,
        });
    }
    Ok(size)
}

/// Every element of `S` with its coefficient vector.
pub fn domain_elements<'a>(
    s: &'a OperatorSpace,
    caps: &Caps,
) -> Result<impl Iterator<Item = (Vec<Elem>, Matrix)> + 'a> {
    check_domain_size(s, caps)?;
    Ok(VectorCounter::new(s.field().order(), s.dim()).map(move |c| {
        let m = s.element(&c);
        (c, m)
    }))
}

fn scale_vec(f: &Field, c: Elem, v: &[Elem]) -> Vec<Elem> {
    v.iter().map(|&x| f.mul(c, x)).collect()
}

fn add_vec(f: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

/// A group homomorphism `S -> K^n`, stored by its values on the prime basis of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveMap {
    domain: OperatorSpace,
    values: Vec<Vec<Elem>>,
}

impl AdditiveMap {
    pub fn new(domain: &OperatorSpace, values: Vec<Vec<Elem>>) -> Result<Self> {
        let f = domain.field();
        let big_d = domain.dim() * f.degree();
        if values.len() != big_d {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a domain with {} prime basis elements",
                values.len(),
                big_d
            )));
        }
        for v in &values {
            if v.len() != domain.rows() {
                return Err(Error::ShapeMismatch(format!(
                    "value of length {} for target K^{}",
                    v.len(),
                    domain.rows()
                )));
            }
            for &x in v {
                f.check_elem(x as u64)?;
            }
        }
        Ok(AdditiveMap {
            domain: domain.clone(),
            values,
        })
    }

    pub fn zero(domain: &OperatorSpace) -> Self {
        let big_d = domain.dim() * domain.field().degree();
        AdditiveMap {
            domain: domain.clone(),
            values: vec![vec![0; domain.rows()]; big_d],
        }
    }

    /// Samples `func` on the prime basis; `func` must be additive for the
    /// result to agree with it elsewhere.
    pub fn from_fn(domain: &OperatorSpace, func: impl Fn(&Matrix) -> Vec<Elem>) -> Result<Self> {
        let values = prime_basis_matrices(domain).iter().map(func).collect();
        Self::new(domain, values)
    }

    /// The local map `s ↦ s x`.
    pub fn local(domain: &OperatorSpace, x: &[Elem]) -> Result<Self> {
        if x.len() != domain.cols() {
            return Err(Error::ShapeMismatch(format!(
                "witness of length {} for {} columns",
                x.len(),
                domain.cols()
            )));
        }
        let f = domain.field().clone();
        Self::from_fn(domain, |m| m.mul_vec(&f, x).expect("shapes checked"))
    }

    pub fn from_coords(domain: &OperatorSpace, coords: &[Elem]) -> Result<Self> {
        let f = domain.field();
        let (n, k) = (domain.rows(), f.degree());
        let big_d = domain.dim() * k;
        if coords.len() != big_d * n * k {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates, expected {}",
                coords.len(),
                big_d * n * k
            )));
        }
        let values = (0..big_d)
            .map(|b| {
                (0..n)
                    .map(|r| {
                        let o = (b * n + r) * k;
                        f.from_prime_coords(&coords[o..o + k])
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, values)
    }

    pub fn random(domain: &OperatorSpace, rng: &mut impl rand::Rng) -> Self {
        let q = domain.field().order();
        let big_d = domain.dim() * domain.field().degree();
        let values = (0..big_d)
            .map(|_| (0..domain.rows()).map(|_| rng.gen_range(0..q) as Elem).collect())
            .collect();
        AdditiveMap {
            domain: domain.clone(),
            values,
        }
    }

    pub fn domain(&self) -> &OperatorSpace {
        &self.domain
    }

    pub fn field(&self) -> &Field {
        self.domain.field()
    }

    pub fn values(&self) -> &[Vec<Elem>] {
        &self.values
    }

    /// F_p coordinates, length `D n k`.
    pub fn coords(&self) -> Vec<Elem> {
        let f = self.field();
        let mut out = Vec::with_capacity(self.values.len() * self.domain.rows() * f.degree());
        for v in &self.values {
            for &x in v {
                out.extend(f.prime_coords(x));
            }
        }
        out
    }

    /// Value at the element with K-coefficients `coeffs`.
    pub fn evaluate_coeffs(&self, coeffs: &[Elem]) -> Vec<Elem> {
        let f = self.field();
        let k = f.degree();
        let mut acc = vec![0; self.domain.rows()];
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (l, d) in f.prime_coords(c).into_iter().enumerate() {
                if d != 0 {
                    crate::linalg::axpy(f, &mut acc, d, &self.values[i * k + l]);
                }
            }
        }
        acc
    }

    pub fn evaluate(&self, s: &Matrix) -> Result<Vec<Elem>> {
        let c = self.domain.coordinates_of(s).ok_or(Error::NotInDomain)?;
        Ok(self.evaluate_coeffs(&c))
    }

    pub fn add(&self, other: &AdditiveMap) -> Result<AdditiveMap> {
        if self.domain != other.domain {
            return Err(Error::AmbientMismatch("maps on different domains".into()));
        }
        let f = self.field();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| add_vec(f, a, b))
            .collect();
        Ok(AdditiveMap {
            domain: self.domain.clone(),
            values,
        })
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            field: None,
            space: serde_json::to_value(self.domain.to_json()).expect("space serializes"),
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(|&x| x as u64).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &MapJson) -> Result<Self> {
        let domain = resolve_space_ref(&j.space, j.field.as_deref())?;
        let f = domain.field().clone();
        let values = j
            .values
            .iter()
            .map(|v| v.iter().map(|&x| f.check_elem(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(&domain, values)
    }
}

/// Map JSON: `space` is a space object or a builder designator (with `field`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub space: serde_json::Value,
    pub values: Vec<Vec<u64>>,
}

pub fn resolve_space_ref(space: &serde_json::Value, field: Option<&str>) -> Result<OperatorSpace> {
    match space {
        serde_json::Value::String(designator) => {
            let field = field.ok_or_else(|| {
                Error::Parse("a builder designator needs a top-level \"field\"".into())
            })?;
            let fam: SpaceFamily = designator.parse()?;
            opspace::build(&fam, &parse_field(field, crate::field::DEFAULT_ORDER_CAP)?)
        }
        other => {
            let sj: SpaceJson = serde_json::from_value(other.clone())
                .map_err(|e| Error::Parse(format!("space: {e}")))?;
            OperatorSpace::from_json(&sj)
        }
    }
}

/// `ω^l b_i` for `β = i k + l`.
pub fn prime_basis_matrices(s: &OperatorSpace) -> Vec<Matrix> {
    let f = s.field();
    let mut out = Vec::with_capacity(s.dim() * f.degree());
    for b in s.basis_matrices() {
        for l in 0..f.degree() {
            out.push(b.scale(f, f.prime_basis(l)));
        }
    }
    out
}

/// An F_p-space of additive maps on a domain, by the RREF of their coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RCSpace {
    domain: OperatorSpace,
    basis: SubspaceBasis,
}

impl RCSpace {
    fn coord_len(domain: &OperatorSpace) -> usize {
        let k = domain.field().degree();
        domain.dim() * k * domain.rows() * k
    }

    pub fn from_maps(domain: &OperatorSpace, maps: &[AdditiveMap]) -> Result<Self> {
        let pf = domain.field().prime_subfield();
        let vecs = maps.iter().map(|m| m.coords()).collect();
        Ok(RCSpace {
            domain: domain.clone(),
            basis: SubspaceBasis::from_vectors(&pf, Self::coord_len(domain), vecs)?,
        })
    }

    pub fn all_additive(domain: &OperatorSpace) -> Self {
        RCSpace {
            domain: domain.clone(),
            basis: SubspaceBasis::full(&domain.field().prime_subfield(), Self::coord_len(domain)),
        }
    }

    pub fn domain(&self) -> &OperatorSpace {
        &self.domain
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    /// Dimension over the prime subfield.
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn maps(&self) -> Vec<AdditiveMap> {
        self.basis
            .vectors()
            .iter()
            .map(|v| AdditiveMap::from_coords(&self.domain, v).expect("basis coordinates"))
            .collect()
    }

    pub fn contains(&self, map: &AdditiveMap) -> bool {
        map.domain == self.domain && self.basis.member(&map.coords())
    }

    pub fn is_subspace_of(&self, other: &RCSpace) -> Result<bool> {
        if self.domain != other.domain {
            return Err(Error::AmbientMismatch("map spaces on different domains".into()));
        }
        other.basis.contains_space(&self.basis)
    }

    pub fn sum(&self, other: &RCSpace) -> Result<RCSpace> {
        if self.domain != other.domain {
            return Err(Error::AmbientMismatch("map spaces on different domains".into()));
        }
        Ok(RCSpace {
            domain: self.domain.clone(),
            basis: self.basis.sum(&other.basis)?,
        })
    }

    pub fn intersect(&self, other: &RCSpace) -> Result<RCSpace> {
        if self.domain != other.domain {
            return Err(Error::AmbientMismatch("map spaces on different domains".into()));
        }
        Ok(RCSpace {
            domain: self.domain.clone(),
            basis: self.basis.intersect(&other.basis)?,
        })
    }

    /// Maps of `self` whose classes span `self / other` (`other ⊆ self` is not required).
    pub fn complement_basis(&self, other: &RCSpace) -> Vec<AdditiveMap> {
        let pf = self.domain.field().prime_subfield();
        let mut ech = Echelon::new(&pf, Self::coord_len(&self.domain));
        for v in other.basis.vectors() {
            ech.insert(v);
        }
        self.basis
            .vectors()
            .iter()
            .filter(|v| ech.insert(v))
            .map(|v| AdditiveMap::from_coords(&self.domain, v).expect("basis coordinates"))
            .collect()
    }
}

/// Whether the representative `c` is the one kept among its nonzero F_p multiples.
fn is_projective_rep(f: &Field, c: &[Elem]) -> bool {
    match c.iter().find(|&&x| x != 0) {
        None => false,
        Some(&x) => f.prime_coords(x).into_iter().find(|&d| d != 0) == Some(1),
    }
}

/// Rows `⟨a, F(s)⟩ = 0`, `a` over a K-basis of the left kernel of `s`, split into prime digits.
fn rc_constraint_rows(
    f: &Field,
    n: usize,
    coeffs: &[Elem],
    s: &Matrix,
    mut emit: impl FnMut(&[Elem]),
) {
    let left = kernel(f, &s.transpose());
    if left.dim() == 0 {
        return;
    }
    let k = f.degree();
    let big_d = coeffs.len() * k;
    let cb: Vec<Elem> = coeffs.iter().flat_map(|&c| f.prime_coords(c)).collect();
    let mut row = vec![0; big_d * n * k];
    for a in left.vectors() {
        // pc_t(a_j ω^l), indexed [j][l][t]
        let digits: Vec<Vec<Vec<Elem>>> = a
            .iter()
            .map(|&aj| {
                (0..k)
                    .map(|l| f.prime_coords(f.mul(aj, f.prime_basis(l))))
                    .collect()
            })
            .collect();
        #[allow(clippy::needless_range_loop)]
        for t in 0..k {
            row.iter_mut().for_each(|x| *x = 0);
            for (beta, &c) in cb.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for j in 0..n {
                    for l in 0..k {
                        let d = digits[j][l][t];
                        if d != 0 {
                            row[(beta * n + j) * k + l] = ((c as u32 * d as u32) % f.characteristic() as u32) as Elem;
                        }
                    }
                }
            }
            emit(&row);
        }
    }
}

/// The space of all range-compatible additive maps on `S`, as the nullspace of the
/// stacked membership constraints of every `s ∈ S`.
pub fn rc_solution_space(s: &OperatorSpace, caps: &Caps) -> Result<RCSpace> {
    check_domain_size(s, caps)?;
    let f = s.field();
    let pf = f.prime_subfield();
    let cols = RCSpace::coord_len(s);
    let mut ech = Echelon::new(&pf, cols);
    for c in VectorCounter::new(f.order(), s.dim()) {
        if ech.is_full() {
            break;
        }
        if !is_projective_rep(f, &c) {
            continue;
        }
        let m = s.element(&c);
        rc_constraint_rows(f, s.rows(), &c, &m, |row| {
            ech.insert(row);
        });
    }
    Ok(RCSpace {
        domain: s.clone(),
        basis: ech.nullspace(&pf),
    })
}

/// `F(s) ∈ im s` for every `s`, checked directly and through the constraint rows;
/// the two must agree.
pub fn is_range_compatible(map: &AdditiveMap, caps: &Caps) -> Result<bool> {
    let s = map.domain();
    let f = s.field();
    let pf = f.prime_subfield();
    let coords = map.coords();
    let mut direct = true;
    let mut constraints = true;
    for (c, m) in domain_elements(s, caps)? {
        let y = map.evaluate_coeffs(&c);
        if solve(f, &m, &y)?.is_none() {
            direct = false;
        }
        rc_constraint_rows(f, s.rows(), &c, &m, |row| {
            if crate::linalg::dot(&pf, row, &coords) != 0 {
                constraints = false;
            }
        });
        if !direct && !constraints {
            break;
        }
    }
    if direct != constraints {
        return Err(Error::Inconsistent(
            "direct and constraint range-compatibility checks disagree".into(),
        ));
    }
    Ok(direct)
}

/// `{s ↦ s x : x ∈ K^N}` as an F_p-space.
pub fn local_space(s: &OperatorSpace) -> RCSpace {
    let f = s.field();
    let mut maps = Vec::new();
    for j in 0..s.cols() {
        for l in 0..f.degree() {
            let mut x = vec![0; s.cols()];
            x[j] = f.prime_basis(l);
            maps.push(AdditiveMap::local(s, &x).expect("witness length"));
        }
    }
    RCSpace::from_maps(s, &maps).expect("coordinates of the right length")
}

/// A witness `x` with `F(s) = s x` on all of `S`, if there is one.
pub fn is_local(map: &AdditiveMap) -> Option<Vec<Elem>> {
    let s = map.domain();
    let f = s.field();
    let (n, cols, k) = (s.rows(), s.cols(), f.degree());
    let bases = s.basis_matrices();
    let mut rows = Vec::with_capacity(bases.len() * n);
    let mut rhs = Vec::with_capacity(bases.len() * n);
    for (i, b) in bases.iter().enumerate() {
        for r in 0..n {
            rows.push(b.row(r).to_vec());
            rhs.push(map.values[i * k][r]);
        }
    }
    let x = if rows.is_empty() {
        vec![0; cols]
    } else {
        let a = Matrix::from_rows(cols, &rows).expect("rows of equal length");
        solve(f, &a, &rhs).expect("shapes match")?
    };
    // a K-linear solve sees only the K-basis; additive maps must agree on the prime basis too
    for (beta, m) in prime_basis_matrices(s).iter().enumerate() {
        if m.mul_vec(f, &x).expect("shapes match") != map.values[beta] {
            return None;
        }
    }
    Some(x)
}

/// An additive form `α : K -> K` with `α(λ² x) = λ α(x)` (characteristic 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootLinearForm {
    field: Field,
    table: Vec<Elem>,
}

impl RootLinearForm {
    pub fn from_table(field: &Field, table: Vec<Elem>) -> Result<Self> {
        if table.len() != field.order() {
            return Err(Error::ShapeMismatch("value table must cover the field".into()));
        }
        let form = RootLinearForm {
            field: field.clone(),
            table,
        };
        if field.characteristic() != 2 || !form.check() {
            return Err(Error::BadParams("table is not a root-linear form".into()));
        }
        Ok(form)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x as usize]
    }

    /// Exhaustive additivity and root-linearity check.
    pub fn check(&self) -> bool {
        let f = &self.field;
        f.elements().all(|x| {
            f.elements().all(|y| {
                self.apply(f.add(x, y)) == f.add(self.apply(x), self.apply(y))
                    && self.apply(f.mul(f.mul(y, y), x)) == f.mul(y, self.apply(x))
            })
        })
    }

    pub fn is_linear(&self) -> bool {
        let f = &self.field;
        let c = self.apply(1);
        f.elements().all(|x| self.apply(x) == f.mul(c, x))
    }
}

/// An F_p-basis of the root-linear forms on `K`; empty in odd characteristic.
pub fn root_linear_forms(field: &Field) -> Vec<RootLinearForm> {
    if field.characteristic() != 2 {
        return Vec::new();
    }
    let f = field;
    let k = f.degree();
    let pf = f.prime_subfield();
    // unknown u[l*k + t] = digit t of α(ω^l)
    let mut ech = Echelon::new(&pf, k * k);
    for lam in f.elements() {
        let lam2 = f.mul(lam, lam);
        for j in 0..k {
            let lhs = f.prime_coords(f.mul(lam2, f.prime_basis(j)));
            for s in 0..k {
                let mut row = vec![0; k * k];
                for (l, &d) in lhs.iter().enumerate() {
                    row[l * k + s] ^= d;
                }
                for t in 0..k {
                    row[j * k + t] ^= f.prime_coord(f.mul(lam, f.prime_basis(t)), s);
                }
                ech.insert(&row);
            }
        }
    }
    ech.nullspace(&pf)
        .vectors()
        .iter()
        .map(|u| {
            let images: Vec<Elem> = (0..k)
                .map(|l| f.from_prime_coords(&u[l * k..(l + 1) * k]).expect("digits"))
                .collect();
            let table = f
                .elements()
                .map(|x| {
                    f.prime_coords(x)
                        .iter()
                        .enumerate()
                        .filter(|(_, &d)| d == 1)
                        .fold(0, |acc, (l, _)| f.add(acc, images[l]))
                })
                .collect();
            RootLinearForm {
                field: f.clone(),
                table,
            }
        })
        .collect()
}

pub fn apply_entrywise(alpha: &RootLinearForm, v: &[Elem]) -> Vec<Elem> {
    v.iter().map(|&x| alpha.apply(x)).collect()
}

fn require_sym(s: &OperatorSpace) -> Result<()> {
    if s.ambient().kind() != AmbientKind::Sym {
        return Err(Error::KindMismatch(format!(
            "needs a symmetric ambient, got {}",
            s.ambient().describe()
        )));
    }
    Ok(())
}

/// `M ↦ Δ(M)^α`, reading the diagonal of the symmetric block.
pub fn diag_rootlinear_map(s: &OperatorSpace, alpha: &RootLinearForm) -> Result<AdditiveMap> {
    require_sym(s)?;
    if alpha.field() != s.field() {
        return Err(Error::MixedFields(alpha.field().designator(), s.field().designator()));
    }
    AdditiveMap::from_fn(s, |m| (0..m.rows()).map(|i| alpha.apply(m.get(i, i))).collect())
}

/// Restrictions to `S` of the range-compatible maps of the full symmetric ambient:
/// local maps plus, in characteristic 2, the maps `Δ^α`.
pub fn standard_space(s: &OperatorSpace) -> Result<RCSpace> {
    require_sym(s)?;
    if s.rows() < 2 {
        // on one row every additive map of the full ambient is range-compatible
        return Ok(RCSpace::all_additive(s));
    }
    let local = local_space(s);
    let diag = root_linear_forms(s.field())
        .iter()
        .map(|a| diag_rootlinear_map(s, a))
        .collect::<Result<Vec<_>>>()?;
    local.sum(&RCSpace::from_maps(s, &diag)?)
}

pub fn is_standard(map: &AdditiveMap) -> Result<bool> {
    Ok(standard_space(map.domain())?.contains(map))
}

/// `F(λ s) = λ F(s)`: checked as `F(ω^l b_i) = ω^l F(b_i)`, which with additivity covers all `λ`.
pub fn is_linear(map: &AdditiveMap) -> bool {
    let f = map.field();
    let k = f.degree();
    map.values
        .chunks(k)
        .all(|vals| (0..k).all(|l| vals[l] == scale_vec(f, f.prime_basis(l), &vals[0])))
}

/// The K-linear maps among the additive maps on `S`.
pub fn linear_space(s: &OperatorSpace) -> RCSpace {
    let f = s.field();
    let k = f.degree();
    let mut maps = Vec::new();
    for i in 0..s.dim() {
        for j in 0..s.rows() {
            for t in 0..k {
                let mut values = vec![vec![0; s.rows()]; s.dim() * k];
                for l in 0..k {
                    values[i * k + l][j] = f.mul(f.prime_basis(l), f.prime_basis(t));
                }
                maps.push(AdditiveMap {
                    domain: s.clone(),
                    values,
                });
            }
        }
    }
    RCSpace::from_maps(s, &maps).expect("coordinates of the right length")
}

/// `F mod W`: the map `P s ↦ P F(s)` on `S mod W`, where `P` projects onto `K^n / W`.
pub fn quotient_map(map: &AdditiveMap, w: &SubspaceBasis) -> Result<AdditiveMap> {
    let s = map.domain();
    let f = s.field();
    let k = f.degree();
    let q = opspace::quotient_space(s, w)?;
    let p = opspace::quotient_projection(w);
    // coefficients of P b_i in the basis of S mod W, one column per b_i
    let images: Vec<Vec<Elem>> = s
        .basis_matrices()
        .iter()
        .map(|b| {
            let pb = p.mul(f, b).expect("shapes match");
            q.coordinates_of(&pb).expect("P b_i lies in S mod W")
        })
        .collect();
    let proj = |v: &[Elem]| p.mul_vec(f, v).expect("shapes match");
    let mut coeff_mat = Matrix::zeros(q.dim(), s.dim());
    for (i, col) in images.iter().enumerate() {
        for (j, &x) in col.iter().enumerate() {
            coeff_mat.set(j, i, x);
        }
    }
    // well-defined iff P F vanishes on the kernel of s ↦ P s
    let ker = kernel(f, &coeff_mat);
    for c in ker.vectors() {
        for l in 0..k {
            let cl = scale_vec(f, f.prime_basis(l), c);
            if proj(&map.evaluate_coeffs(&cl)).iter().any(|&x| x != 0) {
                return Err(Error::IllDefined(
                    "P F(s) is nonzero for some s with P s = 0".into(),
                ));
            }
        }
    }
    let mut values = Vec::with_capacity(q.dim() * k);
    for j in 0..q.dim() {
        let mut e = vec![0; q.dim()];
        e[j] = 1;
        let pre = solve(f, &coeff_mat, &e)?
            .ok_or_else(|| Error::Inconsistent("basis of S mod W without preimage".into()))?;
        for l in 0..k {
            let cl = scale_vec(f, f.prime_basis(l), &pre);
            values.push(proj(&map.evaluate_coeffs(&cl)));
        }
    }
    AdditiveMap::new(&q, values)
}

/// `f ∐ g : [A B] ↦ f(A) + g(B)` on `side_by_side(A, B)`.
pub fn join_map(fm: &AdditiveMap, gm: &AdditiveMap) -> Result<AdditiveMap> {
    let (a, b) = (fm.domain(), gm.domain());
    let joint = opspace::side_by_side(a, b)?;
    let fld = joint.field().clone();
    let split = a.cols();
    AdditiveMap::from_fn(&joint, |m| {
        let left = m.columns(0..split);
        let right = m.columns(split..m.cols());
        let x = fm.evaluate(&left).expect("left block lies in A");
        let y = gm.evaluate(&right).expect("right block lies in B");
        add_vec(&fld, &x, &y)
    })
}

/// Inverse of [`join_map`] for a map on `side_by_side(a, b)`.
pub fn split_map(
    map: &AdditiveMap,
    a: &OperatorSpace,
    b: &OperatorSpace,
) -> Result<(AdditiveMap, AdditiveMap)> {
    let joint = opspace::side_by_side(a, b)?;
    if &joint != map.domain() {
        return Err(Error::AmbientMismatch(
            "map domain is not the side-by-side space of the given parts".into(),
        ));
    }
    let (n, cols) = (joint.rows(), joint.cols());
    let pad = |m: &Matrix, c0: usize| {
        let mut out = Matrix::zeros(n, cols);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, c0 + j, m.get(i, j));
            }
        }
        out
    };
    let fm = AdditiveMap::from_fn(a, |m| map.evaluate(&pad(m, 0)).expect("[A 0] in domain"))?;
    let gm = AdditiveMap::from_fn(b, |m| {
        map.evaluate(&pad(m, a.cols())).expect("[0 B] in domain")
    })?;
    Ok((fm, gm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::opspace::{build, Ambient};

    fn fld(p: u64, k: u32) -> Field {
        make_field(p, k).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    fn sym(f: &Field, n: usize) -> OperatorSpace {
        OperatorSpace::full(&Ambient::sym(f, n, 0))
    }

    /// `Δ^sqrt`, which over F_2 is plain `Δ`.
    fn delta(s: &OperatorSpace) -> AdditiveMap {
        let f = s.field();
        let table = f.elements().map(|x| f.sqrt_char2(x).unwrap()).collect();
        let sqrt = RootLinearForm::from_table(f, table).unwrap();
        diag_rootlinear_map(s, &sqrt).unwrap()
    }

    #[test]
    fn evaluate_local_and_delta() {
        let f2 = fld(2, 1);
        let s = sym(&f2, 2);
        let m = Matrix::from_rows(2, &[vec![1, 1], vec![1, 0]]).unwrap();
        let d = delta(&s);
        assert_eq!(d.evaluate(&m).unwrap(), vec![1, 0]);
        let loc = AdditiveMap::local(&s, &[1, 0]).unwrap();
        assert_eq!(loc.evaluate(&m).unwrap(), vec![1, 1]);
        assert_eq!(loc.evaluate(&Matrix::zeros(2, 2)).unwrap(), vec![0, 0]);
        let not_sym = Matrix::from_rows(2, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(loc.evaluate(&not_sym), Err(Error::NotInDomain));
    }

    #[test]
    fn rc_dimensions_of_small_full_spaces() {
        let cases = [((2, 1), 2, 3), ((2, 1), 3, 4), ((3, 1), 2, 2), ((3, 1), 3, 3), ((2, 2), 2, 6)];
        for ((p, k), n, want) in cases {
            let s = sym(&fld(p, k), n);
            assert_eq!(rc_solution_space(&s, &caps()).unwrap().dim(), want, "F_{p}^{k}, n={n}");
        }
        for (n, want) in [(3, 3), (4, 4)] {
            let s = OperatorSpace::full(&Ambient::alt(&fld(2, 1), n, 0));
            let rc = rc_solution_space(&s, &caps()).unwrap();
            assert_eq!(rc.dim(), want);
            assert_eq!(rc, local_space(&s));
        }
    }

    #[test]
    fn locality() {
        let f2 = fld(2, 1);
        let s = sym(&f2, 2);
        assert_eq!(is_local(&AdditiveMap::zero(&s)), Some(vec![0, 0]));
        assert_eq!(is_local(&delta(&s)), None);
        assert!(is_range_compatible(&delta(&s), &caps()).unwrap());
        for q in [fld(2, 1), fld(3, 1), fld(2, 2)] {
            for n in 1..=3 {
                assert_eq!(local_space(&sym(&q, n)).dim(), n * q.degree());
            }
        }
        let f4 = fld(2, 2);
        let s4 = sym(&f4, 2);
        let x = vec![2, 3];
        let m = AdditiveMap::local(&s4, &x).unwrap();
        assert_eq!(is_local(&m), Some(x));
        assert!(is_range_compatible(&m, &caps()).unwrap());
    }

    #[test]
    fn is_local_rejects_additive_non_linear_candidates() {
        // on Mats_1(F_4), a ↦ a² agrees with a ↦ a x on the K-basis for x = 1 but is not local
        let f4 = fld(2, 2);
        let s = sym(&f4, 1);
        let frob = AdditiveMap::from_fn(&s, |m| vec![f4.frobenius(m.get(0, 0))]).unwrap();
        assert_eq!(is_local(&frob), None);
        assert!(!is_linear(&frob));
        assert!(is_range_compatible(&frob, &caps()).unwrap());
    }

    #[test]
    fn root_linear_bases() {
        let f2 = root_linear_forms(&fld(2, 1));
        assert_eq!(f2.len(), 1);
        assert_eq!(f2[0].table(), &[0, 1]);
        assert!(root_linear_forms(&fld(3, 1)).is_empty());
        for k in 2..=4 {
            let f = fld(2, k);
            let forms = root_linear_forms(&f);
            assert_eq!(forms.len(), k as usize);
            for a in &forms {
                assert!(a.check());
                assert!(!a.is_linear());
                // α = c · sqrt
                let c = a.apply(1);
                for x in f.elements() {
                    assert_eq!(a.apply(x), f.mul(c, f.sqrt_char2(x).unwrap()));
                }
            }
        }
    }

    #[test]
    fn diag_map_ignores_tail() {
        let f2 = fld(2, 1);
        let s = OperatorSpace::full(&Ambient::sym(&f2, 2, 1));
        let d = delta(&s);
        let m = Matrix::from_rows(3, &[vec![1, 0, 1], vec![0, 0, 1]]).unwrap();
        assert_eq!(d.evaluate(&m).unwrap(), vec![1, 0]);
        assert!(is_range_compatible(&d, &caps()).unwrap());
        let zero = RootLinearForm::from_table(&f2, vec![0, 0]).unwrap();
        assert_eq!(diag_rootlinear_map(&s, &zero).unwrap(), AdditiveMap::zero(&s));
        let alt = OperatorSpace::full(&Ambient::alt(&f2, 2, 0));
        assert!(diag_rootlinear_map(&alt, &zero).is_err());
    }

    #[test]
    fn standardness() {
        let f2 = fld(2, 1);
        let t3 = build(&SpaceFamily::T3, &f2).unwrap();
        assert!(is_standard(&delta(&t3)).unwrap());
        assert!(is_standard(&AdditiveMap::local(&t3, &[1, 1, 0]).unwrap()).unwrap());

        let f4 = fld(2, 2);
        let sb = build(&SpaceFamily::SymBlockCounterexample { n: 3 }, &f4).unwrap();
        let frob = AdditiveMap::from_fn(&sb, |m| vec![f4.frobenius(m.get(0, 0)), 0, 0]).unwrap();
        assert!(is_range_compatible(&frob, &caps()).unwrap());
        assert!(!is_standard(&frob).unwrap());

        let f3 = fld(3, 1);
        let s3 = sym(&f3, 3);
        assert_eq!(standard_space(&s3).unwrap(), local_space(&s3));
    }

    #[test]
    fn linear_space_matches_is_linear() {
        let f4 = fld(2, 2);
        let s = sym(&f4, 2);
        let lin = linear_space(&s);
        assert_eq!(lin.dim(), s.dim() * s.rows() * 2);
        assert!(lin.maps().iter().all(is_linear));
        assert!(local_space(&s).is_subspace_of(&lin).unwrap());
        assert!(!lin.contains(&delta(&s)));
    }

    #[test]
    fn quotient_examples() {
        let f3 = fld(3, 1);
        let s = sym(&f3, 3);
        let x = vec![1, 2, 0];
        let loc = AdditiveMap::local(&s, &x).unwrap();
        let zero = SubspaceBasis::zero(&f3, 3);
        let q0 = quotient_map(&loc, &zero).unwrap();
        assert_eq!(q0.domain().dim(), s.dim());
        assert_eq!(is_local(&q0), Some(x.clone()));
        let w = SubspaceBasis::from_vectors(&f3, 3, vec![vec![1, 1, 0]]).unwrap();
        let qw = quotient_map(&loc, &w).unwrap();
        let p = opspace::quotient_projection(&w);
        for (_, m) in domain_elements(&s, &caps()).unwrap() {
            let lhs = qw.evaluate(&p.mul(&f3, &m).unwrap()).unwrap();
            let rhs = p.mul_vec(&f3, &loc.evaluate(&m).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(is_local(&qw).is_some());
        let full = SubspaceBasis::full(&f3, 3);
        let qf = quotient_map(&loc, &full).unwrap();
        assert!(qf.values().iter().all(|v| v.is_empty()));
        // a non-RC map need not descend: P s = 0 forces the first row to vanish, not m_{2,2}
        let bad = AdditiveMap::from_fn(&s, |m| vec![m.get(1, 1), 0, 0]).unwrap();
        let w23 = SubspaceBasis::from_vectors(&f3, 3, vec![vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(matches!(quotient_map(&bad, &w23), Err(Error::IllDefined(_))));
    }

    #[test]
    fn join_and_split() {
        let f2 = fld(2, 1);
        let a = sym(&f2, 2);
        let b = OperatorSpace::full(&Ambient::full(&f2, 2, 1));
        let j0 = join_map(&AdditiveMap::zero(&a), &AdditiveMap::zero(&b)).unwrap();
        assert_eq!(j0, AdditiveMap::zero(j0.domain()));
        let jd = join_map(&delta(&a), &AdditiveMap::zero(&b)).unwrap();
        assert!(is_range_compatible(&jd, &caps()).unwrap());
        assert_eq!(is_local(&jd), None);
        let (fa, gb) = split_map(&jd, &a, &b).unwrap();
        assert_eq!(fa, delta(&a));
        assert_eq!(gb, AdditiveMap::zero(&b));
        let jl = join_map(
            &AdditiveMap::local(&a, &[1, 0]).unwrap(),
            &AdditiveMap::local(&b, &[1]).unwrap(),
        )
        .unwrap();
        let x = is_local(&jl).unwrap();
        assert_eq!(AdditiveMap::local(jl.domain(), &x).unwrap(), jl);
        assert_eq!(AdditiveMap::local(jl.domain(), &[1, 0, 1]).unwrap(), jl);
        assert!(split_map(&jl, &b, &a).is_err());
    }

    #[test]
    fn coords_round_trip_and_json() {
        let f4 = fld(2, 2);
        let s = build(&SpaceFamily::T3, &f4).unwrap();
        let mut rng = rand::thread_rng();
        let m = AdditiveMap::random(&s, &mut rng);
        assert_eq!(AdditiveMap::from_coords(&s, &m.coords()).unwrap(), m);
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let back: MapJson = serde_json::from_str(&text).unwrap();
        assert_eq!(AdditiveMap::from_json(&back).unwrap(), m);
        let by_name: MapJson = serde_json::from_str(
            r#"{"field":"2","space":"full-sym:2","values":[[1,0],[0,1],[0,0]]}"#,
        )
        .unwrap();
        let d = AdditiveMap::from_json(&by_name).unwrap();
        assert_eq!(d, delta(&sym(&fld(2, 1), 2)));
    }

    #[test]
    fn domain_cap_is_enforced() {
        let f2 = fld(2, 1);
        let s = sym(&f2, 3);
        let tiny = Caps {
            elements: 8,
            ..Caps::default()
        };
        assert!(matches!(
            rc_solution_space(&s, &tiny),
            Err(Error::DomainTooLarge { .. })
        ));
    }
}
