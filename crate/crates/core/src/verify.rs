//! Exhaustive and randomized verification suites with reproducible reports.
//!
//! Every suite expands into an ordered list of independent cases. Cases run on a
//! rayon pool of `jobs` threads and are collected back in case order, so the
//! report does not depend on the degree of parallelism.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_field, Elem, Field};
use crate::linalg::{Matrix, SubspaceBasis};
use crate::opspace::{
    self, build, enumerate_subspaces, gaussian_binomial, Ambient, AmbientKind, OperatorSpace,
    SpaceFamily, SpaceJson,
};
use crate::rcmaps::{
    self, domain_elements, is_local, is_range_compatible, is_standard, local_space,
    rc_solution_space, standard_space, AdditiveMap, RCSpace, VectorCounter,
};
use crate::Caps;

pub const DEFAULT_SEED: u64 = 0x5eed_2015;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    SymMain,
    AltMain,
    FullSymClass,
    FullAltClass,
    SymOptimality,
    AltOptimality,
    Rank1Gaps,
    GoodFunctionals,
    QuotientLemma,
    SplittingLemma,
    Dim3Alt,
    MfLemma,
    RectGroup,
}

impl SuiteId {
    pub const ALL: [SuiteId; 13] = [
        SuiteId::SymMain,
        SuiteId::AltMain,
        SuiteId::FullSymClass,
        SuiteId::FullAltClass,
        SuiteId::SymOptimality,
        SuiteId::AltOptimality,
        SuiteId::Rank1Gaps,
        SuiteId::GoodFunctionals,
        SuiteId::QuotientLemma,
        SuiteId::SplittingLemma,
        SuiteId::Dim3Alt,
        SuiteId::MfLemma,
        SuiteId::RectGroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::SymMain => "sym-main",
            SuiteId::AltMain => "alt-main",
            SuiteId::FullSymClass => "full-sym-class",
            SuiteId::FullAltClass => "full-alt-class",
            SuiteId::SymOptimality => "sym-optimality",
            SuiteId::AltOptimality => "alt-optimality",
            SuiteId::Rank1Gaps => "rank1-gaps",
            SuiteId::GoodFunctionals => "good-functionals",
            SuiteId::QuotientLemma => "quotient-lemma",
            SuiteId::SplittingLemma => "splitting-lemma",
            SuiteId::Dim3Alt => "dim3-alt",
            SuiteId::MfLemma => "mf-lemma",
            SuiteId::RectGroup => "rect-group",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteSpec {
    pub suite: SuiteId,
    pub field: String,
    pub n: usize,
    pub m: usize,
    pub codim: usize,
    /// Column count of the rectangular ambient.
    pub p: usize,
    /// Tail width of `M_f`.
    pub r: usize,
    /// Randomized instance count; `None` means exhaustive where a suite supports it.
    pub samples: Option<usize>,
    pub seed: u64,
    pub caps: Caps,
}

impl SuiteSpec {
    pub fn new(suite: SuiteId, field: &str) -> Self {
        SuiteSpec {
            suite,
            field: field.to_string(),
            n: 3,
            m: 0,
            codim: 0,
            p: 2,
            r: 1,
            samples: None,
            seed: DEFAULT_SEED,
            caps: Caps::default(),
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn codim(mut self, c: usize) -> Self {
        self.codim = c;
        self
    }

    pub fn p(mut self, p: usize) -> Self {
        self.p = p;
        self
    }

    pub fn r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn samples(mut self, s: usize) -> Self {
        self.samples = Some(s);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub space: SpaceJson,
    /// F_p coordinates of the offending map, when there is one.
    pub map: Option<Vec<u64>>,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Falsified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub suite: SuiteSpec,
    pub cases_run: usize,
    pub passes: usize,
    /// Enumerated cases outside the suite's hypotheses (not counted in `casesRun`).
    pub excluded: usize,
    pub failures: Vec<Failure>,
    pub wall_time: f64,
    pub tool_version: String,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with `wallTime` zeroed, for comparing runs.
    pub fn to_json_without_wall_time(&self) -> String {
        let mut r = self.clone();
        r.wall_time = 0.0;
        r.to_json()
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} over F_{}: {} cases, {} passed, {} failed",
            self.suite.suite,
            self.suite.field,
            self.cases_run,
            self.passes,
            self.failures.len()
        );
        if self.excluded > 0 {
            s.push_str(&format!(", {} excluded by hypothesis", self.excluded));
        }
        s.push_str(&format!(
            " ({:.2}s) -> {}",
            self.wall_time,
            match self.verdict {
                Verdict::Verified => "verified",
                Verdict::Falsified => "FALSIFIED",
            }
        ));
        for f in self.failures.iter().take(5) {
            s.push_str(&format!("\n  failure: {}", f.reason));
        }
        s
    }
}

enum Outcome {
    Pass,
    Fail(Failure),
    Excluded,
}

fn fail(space: &OperatorSpace, map: Option<&AdditiveMap>, reason: impl Into<String>) -> Outcome {
    Outcome::Fail(Failure {
        space: space.to_json(),
        map: map.map(|m| m.coords().into_iter().map(u64::from).collect()),
        reason: reason.into(),
    })
}

fn check(ok: bool, space: &OperatorSpace, map: Option<&AdditiveMap>, reason: &str) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        fail(space, map, reason)
    }
}

fn run_parallel<T, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<Outcome>>
where
    T: Sync,
    F: Fn(usize, &T) -> Result<Outcome> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::BadParams(format!("thread pool: {e}")))?;
    pool.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, t)| f(i, t))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .collect()
}

fn hypothesis(ok: bool, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::HypothesisViolated(msg.into()))
    }
}

/// Every subspace of codimension `0..=c`, in canonical order, after checking
/// the total against the enumeration cap and the Gaussian-binomial prediction.
fn subspaces_up_to(amb: &Ambient, c: usize, caps: &Caps) -> Result<Vec<OperatorSpace>> {
    let q = amb.field().order() as u128;
    let predicted: u128 = (0..=c).map(|j| gaussian_binomial(amb.dim(), j, q)).sum();
    if predicted > caps.enumeration as u128 {
        return Err(Error::EnumerationCapExceeded {
            count: predicted,
            cap: caps.enumeration,
        });
    }
    let mut out = Vec::new();
    for j in 0..=c.min(amb.dim()) {
        out.extend(enumerate_subspaces(amb, j, caps.enumeration)?);
    }
    if out.len() as u128 != predicted {
        return Err(Error::Inconsistent(format!(
            "enumerated {} subspaces, expected {predicted}",
            out.len()
        )));
    }
    Ok(out)
}

fn first_outside(inner: &RCSpace, outer: &RCSpace) -> Option<AdditiveMap> {
    inner.maps().into_iter().find(|m| !outer.contains(m))
}

/// RC ⊆ `target`, reporting a basis map outside it.
fn inclusion_outcome(s: &OperatorSpace, rc: &RCSpace, target: &RCSpace, what: &str) -> Outcome {
    match first_outside(rc, target) {
        None => Outcome::Pass,
        Some(m) => fail(s, Some(&m), format!("range-compatible map is not {what}")),
    }
}

fn rc_is_local(s: &OperatorSpace, caps: &Caps) -> Result<Outcome> {
    let rc = rc_solution_space(s, caps)?;
    Ok(inclusion_outcome(s, &rc, &local_space(s), "local"))
}

/// Runs a suite with `jobs` worker threads.
pub fn run_suite(spec: &SuiteSpec, jobs: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    if spec.caps.field_order < 2 {
        return Err(Error::BadParams("field order cap below 2".into()));
    }
    let field = parse_field(&spec.field, spec.caps.field_order)?;
    let (outcomes, _) = match spec.suite {
        SuiteId::SymMain => (sym_main(spec, &field, jobs)?, ()),
        SuiteId::AltMain => (alt_main(spec, &field, jobs)?, ()),
        SuiteId::FullSymClass => (full_sym_class(spec, &field)?, ()),
        SuiteId::FullAltClass => (full_alt_class(spec, &field)?, ()),
        SuiteId::SymOptimality => (sym_optimality(spec, jobs)?, ()),
        SuiteId::AltOptimality => (alt_optimality(spec, jobs)?, ()),
        SuiteId::Rank1Gaps => (rank1_gaps(spec, &field, jobs)?, ()),
        SuiteId::GoodFunctionals => (good_functionals(spec, &field, jobs)?, ()),
        SuiteId::QuotientLemma => (quotient_lemma(spec, &field, jobs)?, ()),
        SuiteId::SplittingLemma => (splitting_lemma(spec, &field, jobs)?, ()),
        SuiteId::Dim3Alt => (dim3_alt(spec, &field)?, ()),
        SuiteId::MfLemma => (mf_lemma(spec, &field, jobs)?, ()),
        SuiteId::RectGroup => (rect_group(spec, &field, jobs)?, ()),
    };
    let mut passes = 0;
    let mut excluded = 0;
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Pass => passes += 1,
            Outcome::Excluded => excluded += 1,
            Outcome::Fail(f) => failures.push(f),
        }
    }
    let verdict = if failures.is_empty() {
        Verdict::Verified
    } else {
        Verdict::Falsified
    };
    Ok(VerificationReport {
        suite: spec.clone(),
        cases_run: passes + failures.len(),
        passes,
        excluded,
        failures,
        wall_time: start.elapsed().as_secs_f64(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        verdict,
    })
}

/// Every RC map on every subspace of `Sym(n, m)` of codimension `<= c <= n-2` is standard.
fn sym_main(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    hypothesis(
        spec.codim + 2 <= spec.n,
        format!("codimension {} exceeds n - 2 = {}", spec.codim, spec.n as i64 - 2),
    )?;
    let amb = Ambient::sym(f, spec.n, spec.m);
    let spaces = subspaces_up_to(&amb, spec.codim, &spec.caps)?;
    run_parallel(&spaces, jobs, |_, s| {
        let rc = rc_solution_space(s, &spec.caps)?;
        Ok(inclusion_outcome(s, &rc, &standard_space(s)?, "standard"))
    })
}

/// Every RC map is local on subspaces of `Alt(n, m)` with codim `S <= n-2` and codim `S_r <= n-3`.
fn alt_main(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    hypothesis(
        spec.codim + 2 <= spec.n,
        format!("codimension {} exceeds n - 2 = {}", spec.codim, spec.n as i64 - 2),
    )?;
    let amb = Ambient::alt(f, spec.n, spec.m);
    let spaces = subspaces_up_to(&amb, spec.codim, &spec.caps)?;
    run_parallel(&spaces, jobs, |_, s| {
        let sr = opspace::restricted_part(s)?;
        if sr.codim() + 3 > spec.n {
            return Ok(Outcome::Excluded);
        }
        rc_is_local(s, &spec.caps)
    })
}

/// `RC(Mats_n) = local ⊕ span{Δ^α}` (characteristic 2) or `= local`, with a trivial intersection.
fn full_sym_class(spec: &SuiteSpec, f: &Field) -> Result<Vec<Outcome>> {
    hypothesis(spec.n >= 2, "the full-space classification needs n >= 2")?;
    let s = OperatorSpace::full(&Ambient::sym(f, spec.n, 0));
    let rc = rc_solution_space(&s, &spec.caps)?;
    let local = local_space(&s);
    let diag = rcmaps::root_linear_forms(f)
        .iter()
        .map(|a| rcmaps::diag_rootlinear_map(&s, a))
        .collect::<Result<Vec<_>>>()?;
    let diag = RCSpace::from_maps(&s, &diag)?;
    let expected = local.sum(&diag)?;
    let mut out = vec![check(
        rc == expected,
        &s,
        first_outside(&rc, &expected).as_ref(),
        "range-compatible maps differ from local + diagonal root-linear maps",
    )];
    out.push(check(
        local.intersect(&diag)?.dim() == 0,
        &s,
        None,
        "local and diagonal root-linear parts intersect",
    ));
    out.push(check(
        rc.dim() == local.dim() + diag.dim(),
        &s,
        None,
        "dimension count of the classification fails",
    ));
    Ok(out)
}

/// Linear RC maps on `Mata_n` are local.
fn full_alt_class(spec: &SuiteSpec, f: &Field) -> Result<Vec<Outcome>> {
    let s = OperatorSpace::full(&Ambient::alt(f, spec.n, 0));
    let rc = rc_solution_space(&s, &spec.caps)?;
    let linear_rc = rc.intersect(&rcmaps::linear_space(&s))?;
    let local = local_space(&s);
    Ok(vec![check(
        linear_rc == local,
        &s,
        first_outside(&linear_rc, &local).as_ref(),
        "linear range-compatible map is not local",
    )])
}

struct Witness {
    label: &'static str,
    space: OperatorSpace,
    map: AdditiveMap,
    expected_codim: usize,
    want_linear: Option<bool>,
    /// Claim: not standard (symmetric ambients) rather than merely not local.
    non_standard: bool,
}

fn witness_outcome(w: &Witness, caps: &Caps) -> Result<Outcome> {
    let mut problems = Vec::new();
    if w.space.codim() != w.expected_codim {
        problems.push(format!(
            "codimension {} instead of {}",
            w.space.codim(),
            w.expected_codim
        ));
    }
    if !is_range_compatible(&w.map, caps)? {
        problems.push("map is not range-compatible".into());
    }
    if let Some(lin) = w.want_linear {
        if rcmaps::is_linear(&w.map) != lin {
            problems.push(format!("linearity is not {lin}"));
        }
    }
    if is_local(&w.map).is_some() {
        problems.push("map is local".into());
    }
    if w.non_standard && is_standard(&w.map)? {
        problems.push("map is standard".into());
    }
    Ok(if problems.is_empty() {
        Outcome::Pass
    } else {
        fail(
            &w.space,
            Some(&w.map),
            format!("{}: {}", w.label, problems.join("; ")),
        )
    })
}

fn field_or_err(p: u64, k: u32, caps: &Caps) -> Result<Field> {
    crate::field::make_field_with_cap(p, k, caps.field_order)
}

/// Symmetric optimality witnesses. Fields are fixed by the claims; `spec.n` sizes the spaces.
fn sym_optimality(spec: &SuiteSpec, jobs: usize) -> Result<Vec<Outcome>> {
    let n = spec.n;
    hypothesis(n >= 2, "witnesses need n >= 2")?;
    let mut ws = Vec::new();
    let f4 = field_or_err(2, 2, &spec.caps)?;
    let sb = build(&SpaceFamily::SymBlockCounterexample { n }, &f4)?;
    let frob = {
        let f4 = f4.clone();
        AdditiveMap::from_fn(&sb, move |m| {
            let mut v = vec![0; m.rows()];
            v[0] = f4.frobenius(m.get(0, 0));
            v
        })?
    };
    ws.push(Witness {
        label: "sym-block with Frobenius over F_4",
        space: sb,
        map: frob,
        expected_codim: n - 1,
        want_linear: Some(false),
        non_standard: true,
    });
    for (p, label) in [(2, "u2 block over F_2"), (3, "u2 block over F_3")] {
        let f = field_or_err(p, 1, &spec.caps)?;
        let u = build(&SpaceFamily::U2Block { n }, &f)?;
        let map = AdditiveMap::from_fn(&u, |m| {
            let mut v = vec![0; m.rows()];
            v[0] = m.get(0, 0);
            v
        })?;
        ws.push(Witness {
            label,
            space: u,
            map,
            expected_codim: 2 * n - 3,
            want_linear: Some(true),
            non_standard: false,
        });
    }
    run_parallel(&ws, jobs, |_, w| witness_outcome(w, &spec.caps))
}

/// Alternating optimality witnesses.
fn alt_optimality(spec: &SuiteSpec, jobs: usize) -> Result<Vec<Outcome>> {
    let n = spec.n;
    hypothesis(n >= 4, "witnesses need n >= 4")?;
    let mut ws = Vec::new();
    let f4 = field_or_err(2, 2, &spec.caps)?;
    let col = build(&SpaceFamily::AltFirstColumn { n }, &f4)?;
    let frob = {
        let f4 = f4.clone();
        AdditiveMap::from_fn(&col, move |m| {
            let mut v = vec![0; m.rows()];
            v[1] = f4.frobenius(m.get(1, 0));
            v
        })?
    };
    ws.push(Witness {
        label: "first-column space with Frobenius over F_4",
        space: col,
        map: frob,
        expected_codim: n - 2,
        want_linear: Some(false),
        non_standard: false,
    });
    for p in [2, 3] {
        let f = field_or_err(p, 1, &spec.caps)?;
        let s = build(&SpaceFamily::AltCodim2n5 { n }, &f)?;
        let map = AdditiveMap::from_fn(&s, |m| {
            let mut v = vec![0; m.rows()];
            v[2] = m.get(2, 1);
            v
        })?;
        ws.push(Witness {
            label: if p == 2 {
                "codim 2n-5 pattern over F_2"
            } else {
                "codim 2n-5 pattern over F_3"
            },
            space: s,
            map,
            expected_codim: 2 * n - 5,
            want_linear: Some(true),
            non_standard: false,
        });
    }
    let f2 = field_or_err(2, 1, &spec.caps)?;
    let s = build(&SpaceFamily::AltCodim2n6 { n }, &f2)?;
    let map = AdditiveMap::from_fn(&s, |m| {
        let mut v = vec![0; m.rows()];
        v[2] = m.get(2, 0);
        v[3] = m.get(3, 1);
        v
    })?;
    ws.push(Witness {
        label: "codim 2n-6 pattern over F_2",
        space: s,
        map,
        expected_codim: 2 * n - 6,
        want_linear: Some(true),
        non_standard: false,
    });
    run_parallel(&ws, jobs, |_, w| witness_outcome(w, &spec.caps))
}

/// One representative per line of `K^n` (first nonzero entry 1).
pub fn projective_points(f: &Field, n: usize) -> Vec<Vec<Elem>> {
    VectorCounter::new(f.order(), n)
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

fn outer(f: &Field, x: &[Elem], cols: usize) -> Matrix {
    let mut m = Matrix::zeros(x.len(), cols);
    for i in 0..x.len() {
        for j in 0..x.len() {
            m.set(i, j, f.mul(x[i], x[j]));
        }
    }
    m
}

/// Every hyperplane `W` of `Mats_n` misses `x x^T` for two non-collinear `x`.
/// Hyperplanes suffice: a proper subspace lies in one, and its gaps include the hyperplane's.
fn rank1_gaps(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    hypothesis(spec.n >= 3, "the rank-one gap statement needs n >= 3")?;
    let amb = Ambient::sym(f, spec.n, 0);
    let hyper: Vec<_> = enumerate_subspaces(&amb, 1, spec.caps.enumeration)?.collect();
    let points = projective_points(f, spec.n);
    run_parallel(&hyper, jobs, |_, w| {
        let gaps = points
            .iter()
            .filter(|x| !w.contains(&outer(f, x, spec.n)))
            .count();
        Ok(check(gaps >= 2, w, None, "fewer than two non-collinear rank-one gaps"))
    })
}

/// `codim (S mod x)` inside the ambient of operators `U -> (ker x^⋆)^⋆`.
pub fn quotient_codim(s: &OperatorSpace, x: &[Elem]) -> Result<usize> {
    let f = s.field();
    let n = s.rows();
    let m = s.ambient().m();
    let w = SubspaceBasis::from_vectors(f, n, vec![x.to_vec()])?;
    let q = opspace::quotient_space(s, &w)?;
    let amb_dim = (n - 1) * n / 2 + (n - 1) * (m + 1);
    Ok(amb_dim - q.dim())
}

fn congruence_orbit(base: &OperatorSpace) -> Result<Vec<OperatorSpace>> {
    let f = base.field();
    let n = base.rows();
    let mut orbit: Vec<OperatorSpace> = Vec::new();
    for entries in VectorCounter::new(f.order(), n * n) {
        let p = Matrix::from_data(n, n, entries)?;
        if crate::linalg::rank(f, &p) < n {
            continue;
        }
        let pt = p.transpose();
        let gens = base
            .basis_matrices()
            .iter()
            .map(|b| pt.mul(f, &b.mul(f, &p)?))
            .collect::<Result<Vec<_>>>()?;
        let img = OperatorSpace::span(base.ambient(), &gens)?;
        if !orbit.contains(&img) {
            orbit.push(img);
        }
    }
    Ok(orbit)
}

/// Good functionals: with codim `S <= n-2` and `n >= 3`, two non-collinear `x` have
/// codim (S mod x) `<= n-3`; over F_2 three distinct ones, unless `n = 3` and `S` is `T3 ∐ Mat`
/// in suitable bases.
fn good_functionals(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    let n = spec.n;
    hypothesis(n >= 3, "good functionals need n >= 3")?;
    hypothesis(
        spec.codim + 2 <= n,
        format!("codimension {} exceeds n - 2 = {}", spec.codim, n as i64 - 2),
    )?;
    let amb = Ambient::sym(f, n, spec.m);
    let spaces = subspaces_up_to(&amb, spec.codim, &spec.caps)?;
    let points = projective_points(f, n);
    let t3_orbit = if f.order() == 2 && n == 3 {
        congruence_orbit(&build(&SpaceFamily::T3, f)?)?
    } else {
        Vec::new()
    };
    run_parallel(&spaces, jobs, |_, s| {
        let mut good = 0;
        for x in &points {
            if quotient_codim(s, x)? + 3 <= n {
                good += 1;
            }
        }
        if good < 2 {
            return Ok(fail(s, None, format!("only {good} good functionals up to scalars")));
        }
        if f.order() == 2 && good < 3 {
            let sm = opspace::modulo_part(s)?;
            let sr = opspace::restricted_part(s)?;
            let exceptional = n == 3 && sm.codim() == 0 && t3_orbit.contains(&sr);
            if !exceptional {
                return Ok(fail(
                    s,
                    None,
                    "two good functionals only, and the space is not T3 next to a full block",
                ));
            }
        }
        Ok(Outcome::Pass)
    })
}

fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Largest subspace dimension sampled for randomized instances.
fn sample_dim_limit(f: &Field) -> usize {
    match f.order() {
        2 => 7,
        3 => 5,
        4 | 5 => 4,
        _ => 3,
    }
}

fn random_vector(f: &Field, len: usize, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    (0..len).map(|_| rng.gen_range(0..f.order()) as Elem).collect()
}

fn random_subspace(amb: &Ambient, max_dim: usize, rng: &mut ChaCha8Rng) -> Result<OperatorSpace> {
    let gens = rng.gen_range(0..=max_dim.min(amb.dim()));
    let vecs = (0..gens)
        .map(|_| random_vector(amb.field(), amb.dim(), rng))
        .collect();
    OperatorSpace::from_coordinates(amb, vecs)
}

fn random_ambient(f: &Field, rng: &mut ChaCha8Rng) -> Ambient {
    let n = rng.gen_range(1..=3);
    match rng.gen_range(0..3) {
        0 => Ambient::sym(f, n, rng.gen_range(0..=1)),
        1 => Ambient::alt(f, n, rng.gen_range(0..=1)),
        _ => Ambient::full(f, n, rng.gen_range(1..=3)),
    }
}

fn random_combination(space: &RCSpace, rng: &mut ChaCha8Rng) -> AdditiveMap {
    let pf = space.domain().field().prime_subfield();
    let coeffs = random_vector(&pf, space.dim(), rng);
    let coords = space.basis().combine(&coeffs);
    AdditiveMap::from_coords(space.domain(), &coords).expect("coordinates of the space")
}

/// Quotient commutation `(F mod W)(P s) = P F(s)`, range-compatibility and locality of
/// the quotient, row decomposition of `F`, and `(W°)° = W`, on random `(S, F, W)`.
fn quotient_lemma(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    let samples = spec.samples.unwrap_or(1000);
    let idx: Vec<usize> = (0..samples).collect();
    let limit = sample_dim_limit(f);
    run_parallel(&idx, jobs, |_, &i| {
        let mut rng = case_rng(spec.seed, i);
        let amb = random_ambient(f, &mut rng);
        let s = random_subspace(&amb, limit, &mut rng)?;
        let rc = rc_solution_space(&s, &spec.caps)?;
        let map = if rng.gen_bool(0.25) {
            AdditiveMap::local(&s, &random_vector(f, s.cols(), &mut rng))?
        } else {
            random_combination(&rc, &mut rng)
        };
        let wgens = (0..rng.gen_range(0..=s.rows()))
            .map(|_| random_vector(f, s.rows(), &mut rng))
            .collect();
        let w = SubspaceBasis::from_vectors(f, s.rows(), wgens)?;
        if w.annihilator().annihilator() != w {
            return Ok(fail(&s, None, "double annihilator differs from the subspace"));
        }
        let g = match rcmaps::quotient_map(&map, &w) {
            Ok(g) => g,
            Err(Error::IllDefined(e)) => {
                return Ok(fail(&s, Some(&map), format!("quotient map ill-defined: {e}")))
            }
            Err(e) => return Err(e),
        };
        let p = opspace::quotient_projection(&w);
        for (c, m) in domain_elements(&s, &spec.caps)? {
            let lhs = g.evaluate(&p.mul(f, &m)?)?;
            let rhs = p.mul_vec(f, &map.evaluate_coeffs(&c))?;
            if lhs != rhs {
                return Ok(fail(&s, Some(&map), "quotient commutation identity fails"));
            }
        }
        if !is_range_compatible(&g, &spec.caps)? {
            return Ok(fail(&s, Some(&map), "quotient of a range-compatible map is not"));
        }
        if let Some(x) = is_local(&map) {
            if AdditiveMap::local(g.domain(), &x)? != g {
                return Ok(fail(&s, Some(&map), "quotient of a local map lost its witness"));
            }
        }
        // row decomposition: F(M)_i depends on the i-th row of M alone
        for row in 0..s.rows() {
            let mut seen: HashMap<Vec<Elem>, Elem> = HashMap::new();
            for (c, m) in domain_elements(&s, &spec.caps)? {
                let v = map.evaluate_coeffs(&c)[row];
                if *seen.entry(m.row(row).to_vec()).or_insert(v) != v {
                    return Ok(fail(
                        &s,
                        Some(&map),
                        format!("row {} of F is not a function of row {} of M", row + 1, row + 1),
                    ));
                }
            }
        }
        Ok(Outcome::Pass)
    })
}

fn random_map(domain: &OperatorSpace, caps: &Caps, rng: &mut ChaCha8Rng) -> Result<AdditiveMap> {
    let f = domain.field();
    Ok(match rng.gen_range(0..3) {
        0 => AdditiveMap::local(domain, &random_vector(f, domain.cols(), rng))?,
        1 => random_combination(&rc_solution_space(domain, caps)?, rng),
        _ => AdditiveMap::random(domain, rng),
    })
}

/// `f ∐ g` splits back into `(f, g)`, every map on `A ∐ B` is a join, and the join is
/// RC (resp. local) exactly when both parts are.
fn splitting_lemma(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    let samples = spec.samples.unwrap_or(1000);
    let idx: Vec<usize> = (0..samples).collect();
    let limit = sample_dim_limit(f);
    run_parallel(&idx, jobs, |_, &i| {
        let mut rng = case_rng(spec.seed, i);
        let amb_a = random_ambient(f, &mut rng);
        let a = random_subspace(&amb_a, limit / 2 + 1, &mut rng)?;
        let amb_b = Ambient::full(f, a.rows(), rng.gen_range(0..=2));
        let b = random_subspace(&amb_b, limit - a.dim(), &mut rng)?;
        let fm = random_map(&a, &spec.caps, &mut rng)?;
        let gm = random_map(&b, &spec.caps, &mut rng)?;
        let joint = rcmaps::join_map(&fm, &gm)?;
        let space = joint.domain().clone();
        let (f2, g2) = rcmaps::split_map(&joint, &a, &b)?;
        if f2 != fm || g2 != gm {
            return Ok(fail(&space, Some(&joint), "split of a join differs from its parts"));
        }
        let h = AdditiveMap::random(&space, &mut rng);
        let (hf, hg) = rcmaps::split_map(&h, &a, &b)?;
        if rcmaps::join_map(&hf, &hg)? != h {
            return Ok(fail(&space, Some(&h), "homomorphism is not the join of its parts"));
        }
        let rc_parts =
            is_range_compatible(&fm, &spec.caps)? && is_range_compatible(&gm, &spec.caps)?;
        if is_range_compatible(&joint, &spec.caps)? != rc_parts {
            return Ok(fail(&space, Some(&joint), "range-compatibility does not split"));
        }
        let local_parts = is_local(&fm).is_some() && is_local(&gm).is_some();
        if is_local(&joint).is_some() != local_parts {
            return Ok(fail(&space, Some(&joint), "locality does not split"));
        }
        Ok(Outcome::Pass)
    })
}

/// RC = local on `Alt(3, m)`.
fn dim3_alt(spec: &SuiteSpec, f: &Field) -> Result<Vec<Outcome>> {
    let s = OperatorSpace::full(&Ambient::alt(f, 3, spec.m));
    Ok(vec![rc_is_local(&s, &spec.caps)?])
}

/// RC = local on `M_f`: every `f` when `samples` is unset, else `samples` random ones.
fn mf_lemma(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    let r = spec.r;
    hypothesis(r <= 3, "M_f needs r <= 3")?;
    let len = 3 * r * r;
    let tensors: Vec<Vec<Elem>> = match spec.samples {
        None => {
            let count = (f.order() as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
            if count > spec.caps.enumeration as u128 {
                return Err(Error::EnumerationCapExceeded {
                    count,
                    cap: spec.caps.enumeration,
                });
            }
            VectorCounter::new(f.order(), len).collect()
        }
        Some(k) => {
            let mut rng = case_rng(spec.seed, 0);
            (0..k).map(|_| random_vector(f, len, &mut rng)).collect()
        }
    };
    run_parallel(&tensors, jobs, |_, coeffs| {
        let s = build(
            &SpaceFamily::Mf {
                r,
                coeffs: coeffs.clone(),
            },
            f,
        )?;
        rc_is_local(&s, &spec.caps)
    })
}

/// RC = local on every subspace of `Mat_{n,p}` of codimension `<= c <= n-2`.
fn rect_group(spec: &SuiteSpec, f: &Field, jobs: usize) -> Result<Vec<Outcome>> {
    hypothesis(
        spec.codim + 2 <= spec.n,
        format!("codimension {} exceeds n - 2 = {}", spec.codim, spec.n as i64 - 2),
    )?;
    let amb = Ambient::full(f, spec.n, spec.p);
    let spaces = subspaces_up_to(&amb, spec.codim, &spec.caps)?;
    run_parallel(&spaces, jobs, |_, s| rc_is_local(s, &spec.caps))
}

/// Dimensions reported by `classify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    pub space: SpaceJson,
    pub rc_dim: usize,
    pub local_dim: usize,
    /// Present for symmetric ambients.
    pub standard_dim: Option<usize>,
    /// Dimension of RC modulo local.
    pub exotic_dim: usize,
    /// Maps spanning RC modulo local.
    pub exotic_basis: Vec<Vec<u64>>,
    /// Dimension of RC modulo standard (symmetric ambients).
    pub nonstandard_dim: Option<usize>,
}

pub fn classify(s: &OperatorSpace, caps: &Caps) -> Result<Classification> {
    let rc = rc_solution_space(s, caps)?;
    let local = local_space(s);
    let standard = if s.ambient().kind() == AmbientKind::Sym {
        Some(standard_space(s)?)
    } else {
        None
    };
    let exotic = rc.complement_basis(&local);
    let nonstandard_dim = standard.as_ref().map(|st| rc.complement_basis(st).len());
    Ok(Classification {
        space: s.to_json(),
        rc_dim: rc.dim(),
        local_dim: local.dim(),
        standard_dim: standard.as_ref().map(RCSpace::dim),
        exotic_dim: exotic.len(),
        exotic_basis: exotic
            .iter()
            .map(|m| m.coords().into_iter().map(u64::from).collect())
            .collect(),
        nonstandard_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(spec: SuiteSpec) -> VerificationReport {
        run_suite(&spec, 2).unwrap()
    }

    #[test]
    fn suite_names_round_trip() {
        for id in SuiteId::ALL {
            assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
            assert_eq!(
                serde_json::to_string(&id).unwrap(),
                format!("\"{}\"", id.name())
            );
        }
        assert!("nope".parse::<SuiteId>().is_err());
    }

    #[test]
    fn sym_main_small() {
        let r = run(SuiteSpec::new(SuiteId::SymMain, "2").n(3).codim(1));
        assert_eq!(r.cases_run, 64);
        assert!(r.verified(), "{}", r.summary());
        let r = run(SuiteSpec::new(SuiteId::SymMain, "2").n(2).m(1));
        assert_eq!(r.cases_run, 1);
        assert!(r.verified());
        assert!(matches!(
            run_suite(&SuiteSpec::new(SuiteId::SymMain, "2").n(3).codim(2), 1),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn alt_main_small() {
        let r = run(SuiteSpec::new(SuiteId::AltMain, "3").n(3));
        assert_eq!(r.cases_run, 1);
        assert!(r.verified());
        let r = run(SuiteSpec::new(SuiteId::AltMain, "2").n(3).m(1));
        assert!(r.verified());
        assert_eq!(r.cases_run + r.excluded, 1);
    }

    #[test]
    fn classes_and_witnesses() {
        for (q, n) in [("2", 2), ("2", 3), ("3", 2), ("2^2", 2)] {
            let r = run(SuiteSpec::new(SuiteId::FullSymClass, q).n(n));
            assert!(r.verified(), "{}", r.summary());
        }
        for n in 0..=3 {
            assert!(run(SuiteSpec::new(SuiteId::FullAltClass, "3").n(n)).verified());
        }
        let r = run(SuiteSpec::new(SuiteId::SymOptimality, "2").n(3));
        assert_eq!(r.cases_run, 3);
        assert!(r.verified(), "{}", r.summary());
        let r = run(SuiteSpec::new(SuiteId::AltOptimality, "2").n(4));
        assert_eq!(r.cases_run, 4);
        assert!(r.verified(), "{}", r.summary());
    }

    #[test]
    fn lemmas_small() {
        let r = run(SuiteSpec::new(SuiteId::Rank1Gaps, "2").n(3));
        assert_eq!(r.cases_run, 63);
        assert!(r.verified());
        let r = run(SuiteSpec::new(SuiteId::GoodFunctionals, "2").n(3).codim(1));
        assert_eq!(r.cases_run, 64);
        assert!(r.verified(), "{}", r.summary());
        let r = run(SuiteSpec::new(SuiteId::QuotientLemma, "3").samples(40));
        assert_eq!(r.cases_run, 40);
        assert!(r.verified(), "{}", r.summary());
        let r = run(SuiteSpec::new(SuiteId::SplittingLemma, "2^2").samples(40));
        assert!(r.verified(), "{}", r.summary());
    }

    #[test]
    fn t3_orbit() {
        let f2 = crate::make_field(2, 1).unwrap();
        let t3 = build(&SpaceFamily::T3, &f2).unwrap();
        let orbit = congruence_orbit(&t3).unwrap();
        assert!(orbit.contains(&t3));
        assert!(orbit.iter().all(|s| s.codim() == 1));
        assert_eq!(168 % orbit.len(), 0);
    }

    #[test]
    fn mf_and_rect() {
        let r = run(SuiteSpec::new(SuiteId::MfLemma, "2").r(1));
        assert_eq!(r.cases_run, 8);
        assert!(r.verified());
        let r = run(SuiteSpec::new(SuiteId::MfLemma, "3").r(1).samples(5));
        assert_eq!(r.cases_run, 5);
        assert!(r.verified());
        let r = run(SuiteSpec::new(SuiteId::RectGroup, "2").n(2).p(2));
        assert!(r.verified());
        let r = run(SuiteSpec::new(SuiteId::Dim3Alt, "2"));
        assert!(r.verified());
    }

    #[test]
    fn reports_are_independent_of_jobs() {
        let spec = SuiteSpec::new(SuiteId::SymMain, "2").n(3).codim(1);
        let a = run_suite(&spec, 1).unwrap();
        let b = run_suite(&spec, 4).unwrap();
        assert_eq!(a.to_json_without_wall_time(), b.to_json_without_wall_time());
        let back: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back.to_json(), a.to_json());
    }

    #[test]
    fn classify_dims() {
        let f2 = crate::make_field(2, 1).unwrap();
        let c = classify(&build(&SpaceFamily::FullSym { n: 2, m: 0 }, &f2).unwrap(), &Caps::default()).unwrap();
        assert_eq!((c.rc_dim, c.local_dim, c.standard_dim, c.exotic_dim), (3, 2, Some(3), 1));
        assert_eq!(c.nonstandard_dim, Some(0));
        let f4 = crate::make_field(2, 2).unwrap();
        let sb = build(&SpaceFamily::SymBlockCounterexample { n: 3 }, &f4).unwrap();
        let c = classify(&sb, &Caps::default()).unwrap();
        assert!(c.exotic_dim >= 1);
        assert!(c.nonstandard_dim.unwrap() >= 1);
    }
}
