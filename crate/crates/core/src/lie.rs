//! Orthogonal decompositions of sl_q and sp_q (q = 2^a) into Cartan
//! subalgebras spanned by images of the abelian subgroups A_i, permuted
//! cyclically by conjugation with D.

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::exact_number::{CyclotomicNumber, Rational};
use crate::group::{Group, GroupElement};
use crate::intertwiner::Generator;
use crate::linalg::{
    commutator_equations, solve_centralizer, solve_matrix_system, span_echelon, span_rank,
    symplectic_equations, ExactMatrix, MonomialMatrix, RowEchelon,
};
use crate::representation::UnitaryRep;

pub const DEFAULT_LIE_MAX_Q: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Sl,
    Sp,
}

#[derive(Clone, Debug)]
pub struct CartanSummand {
    /// 1-based subgroup index i.
    pub index: u32,
    pub algebra: Algebra,
    pub elements: Vec<GroupElement>,
    pub basis: Vec<ExactMatrix>,
}

#[derive(Clone, Debug)]
pub struct SymplecticForm {
    pub matrix: ExactMatrix,
    pub seed: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub algebra: Algebra,
    pub q: usize,
    pub summands: Vec<CartanSummand>,
    /// orbit[i-1] = j when D⁻¹ H_i D = H_j.
    pub orbit: Vec<u32>,
    pub form: Option<SymplecticForm>,
    pub certificate: Certificate,
}

fn require_even(group: &Group) -> Result<()> {
    if group.p() != 2 {
        return Err(Error::Input(format!(
            "Lie decompositions need q a power of 2, got p = {}",
            group.p()
        )));
    }
    Ok(())
}

/// H_i = span{X(x_{i,j}) : j ≥ 2}.
pub fn build_sl_summand(rep: &UnitaryRep, i: u32) -> Result<CartanSummand> {
    let cs = rep.group().coset_system(i)?;
    let elements: Vec<GroupElement> = cs.representatives.into_iter().skip(1).collect();
    let basis = elements.iter().map(|&x| rep.eval_dense(x)).collect();
    Ok(CartanSummand {
        index: i,
        algebra: Algebra::Sl,
        elements,
        basis,
    })
}

/// S = Σ_{a} X((a,0)) K X((a,0))ᵀ for the skew seed K = E_kl - E_lk.
fn form_sum(rep: &UnitaryRep, k: usize, l: usize) -> ExactMatrix {
    let group = rep.group();
    let f = group.field();
    let q = rep.dim();
    let n = rep.conductor() as usize;
    let mut counts = vec![0i64; q * q * n];
    for a in f.elements() {
        let x = rep.eval(GroupElement::new(a, f.zero()));
        // X E_kl Xᵀ = ζ^{φ_k + φ_l} E_{π(k), π(l)}
        let (rk, rl) = (x.perm()[k], x.perm()[l]);
        let ph = (x.phase()[k] + x.phase()[l]) as usize % n;
        counts[(rk * q + rl) * n + ph] += 1;
        counts[(rl * q + rk) * n + (ph + n / 2) % n] += 1;
    }
    let mut s = ExactMatrix::zeros(q, q, n as u32);
    for r in 0..q {
        for c in 0..q {
            let mut v = CyclotomicNumber::zero(n as u32);
            for ph in 0..n {
                let cnt = counts[(r * q + c) * n + ph];
                if cnt != 0 {
                    let z = CyclotomicNumber::root_of_unity(n as u32, ph as i64);
                    v = &v + &z.scale(&Rational::from_integer(cnt.into()));
                }
            }
            s.set(r, c, v);
        }
    }
    s
}

fn skew_seeds(q: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..q).flat_map(move |k| (k + 1..q).map(move |l| (k, l)))
}

fn first_nonzero_form(rep: &UnitaryRep, skip: usize) -> Option<SymplecticForm> {
    skew_seeds(rep.dim())
        .map(|(k, l)| SymplecticForm {
            matrix: form_sum(rep, k, l),
            seed: (k, l),
        })
        .filter(|s| !s.matrix.is_zero())
        .nth(skip)
}

/// The X-invariant skew form, certified against X, D and a second seed.
pub fn compute_symplectic_form(rep: &UnitaryRep, gen: &Generator) -> Result<(SymplecticForm, Certificate)> {
    let group = rep.group();
    require_even(group)?;
    let tag = "symplectic-form";
    let form = first_nonzero_form(rep, 0)
        .ok_or_else(|| Error::cert(tag, "every skew seed gives a zero form"))?;
    let s = &form.matrix;
    let mut cert = certify_form(rep, &gen.matrix, s)?;
    match first_nonzero_form(rep, 1) {
        Some(other) => {
            let pos = s.entries().iter().position(|e| !e.is_zero()).unwrap_or(0);
            let ratio = other.matrix.entries()[pos].checked_div(&s.entries()[pos]);
            let proportional = ratio.map_or(false, |r| s.scale(&r) == other.matrix);
            cert.check(
                "second seed gives a scalar multiple",
                tag,
                proportional,
                format!("seeds {:?} and {:?}", form.seed, other.seed),
            );
        }
        None => {
            cert.check("second seed gives a scalar multiple", tag, true, "only one nonzero seed");
        }
    }
    Ok((form, cert))
}

/// Span of the order-4 images in X(A_i), one representative per ± pair.
pub fn build_sp_summand(rep: &UnitaryRep, i: u32) -> Result<(CartanSummand, usize)> {
    let group = rep.group();
    require_even(group)?;
    let n = rep.conductor();
    let minus_one = MonomialMatrix::new(n, (0..rep.dim()).collect(), vec![n / 2; rep.dim()]);
    let cs = group.coset_system(i)?;
    let mut elements = Vec::new();
    for x in cs.representatives {
        let m = rep.eval(x);
        if m.mul(&m) == minus_one {
            elements.push(x);
        }
    }
    // X(A_i) = {±X(x_{i,j})}, so each such representative contributes two order-4 images
    let order_four = 2 * elements.len();
    let basis = elements.iter().map(|&x| rep.eval_dense(x)).collect();
    Ok((
        CartanSummand {
            index: i,
            algebra: Algebra::Sp,
            elements,
            basis,
        },
        order_four,
    ))
}

fn all_pairwise_commute(basis: &[ExactMatrix]) -> bool {
    basis
        .iter()
        .enumerate()
        .all(|(k, u)| basis[k + 1..].iter().all(|v| u.commutes_with(v)))
}

/// tr(uv) without forming the product.
fn trace_of_product(u: &ExactMatrix, v: &ExactMatrix) -> CyclotomicNumber {
    let n = u.rows();
    let mut t = CyclotomicNumber::zero(u.conductor());
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (u.get(i, j), v.get(j, i));
            if !a.is_zero() && !b.is_zero() {
                t = &t + &(a * b);
            }
        }
    }
    t
}

/// tr(uv) = 0 for u, v in distinct summands: (pairs checked, failures).
fn cross_orthogonal(summands: &[CartanSummand]) -> (usize, usize) {
    let mut pairs = 0;
    let mut bad = 0;
    for i in 0..summands.len() {
        for j in i + 1..summands.len() {
            for u in &summands[i].basis {
                for v in &summands[j].basis {
                    pairs += 1;
                    if !trace_of_product(u, v).is_zero() {
                        bad += 1;
                    }
                }
            }
        }
    }
    (pairs, bad)
}

/// orbit[i] = j (0-based) when every D⁻¹ b D, b in summand i, lies in summand j.
fn conjugation_orbit(summands: &[CartanSummand], d: &ExactMatrix) -> Result<Vec<Option<usize>>> {
    if summands.iter().any(|s| s.basis.is_empty()) {
        return Ok(vec![None; summands.len()]);
    }
    let d_inv = d.dagger();
    let echelons: Vec<RowEchelon> = summands
        .iter()
        .map(|s| span_echelon(&s.basis))
        .collect::<Result<_>>()?;
    let mut orbit = Vec::with_capacity(summands.len());
    for s in summands {
        let conj: Vec<Vec<CyclotomicNumber>> = s
            .basis
            .iter()
            .map(|b| d_inv.mul(b).and_then(|m| m.mul(d)).map(|m| m.vectorize()))
            .collect::<Result<_>>()?;
        orbit.push(
            echelons
                .iter()
                .position(|e| e.rank() == conj.len() && conj.iter().all(|v| e.contains(v))),
        );
    }
    Ok(orbit)
}

fn is_single_cycle(orbit: &[Option<usize>]) -> bool {
    let n = orbit.len();
    let mut cur = 0;
    for step in 1..=n {
        match orbit[cur] {
            Some(next) => cur = next,
            None => return false,
        }
        if cur == 0 {
            return step == n;
        }
    }
    false
}

fn finish_orbit(orbit: &[Option<usize>]) -> Vec<u32> {
    orbit.iter().map(|o| o.map_or(0, |j| j as u32 + 1)).collect()
}

/// tr(D⁻¹uD·D⁻¹vD) = tr(uv) on a deterministic selection of pairs.
fn conjugation_isometry(summands: &[CartanSummand], d: &ExactMatrix) -> Result<bool> {
    let d_inv = d.dagger();
    let flat: Vec<&ExactMatrix> = summands.iter().flat_map(|s| s.basis.iter()).collect();
    let step = (flat.len() / 6).max(1);
    for u in flat.iter().step_by(step) {
        for v in flat.iter().skip(1).step_by(step) {
            let cu = d_inv.mul(u)?.mul(d)?;
            let cv = d_inv.mul(v)?.mul(d)?;
            if trace_of_product(&cu, &cv) != trace_of_product(u, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Each stored basis matrix is X of its stored element, and the element lies in A_i.
fn check_images(cert: &mut Certificate, rep: &UnitaryRep, summands: &[CartanSummand], tag: &str) {
    let group = rep.group();
    let ok = summands.iter().all(|s| {
        s.elements.len() == s.basis.len()
            && s.elements.iter().zip(&s.basis).all(|(&x, b)| {
                !x.is_central() && group.in_abelian_subgroup(s.index, x) && rep.eval_dense(x) == *b
            })
    });
    cert.check("basis elements are images X(x) with x ∈ A_i \\ Z", tag, ok, "");
}

/// sl_q as an orthogonal sum of the q+1 Cartan subalgebras H_i.
pub fn verify_sl_decomposition(rep: &UnitaryRep, gen: &Generator) -> Result<Decomposition> {
    let group = rep.group();
    require_even(group)?;
    let summands: Vec<CartanSummand> = (1..=group.q() + 1)
        .map(|i| build_sl_summand(rep, i))
        .collect::<Result<_>>()?;
    let (certificate, orbit) = certify_sl(rep, &gen.matrix, &summands)?;
    Ok(Decomposition {
        algebra: Algebra::Sl,
        q: rep.dim(),
        summands,
        orbit,
        form: None,
        certificate,
    })
}

/// All sl-decomposition clauses for the given summands and generator.
pub fn certify_sl(rep: &UnitaryRep, d: &ExactMatrix, summands: &[CartanSummand]) -> Result<(Certificate, Vec<u32>)> {
    let group = rep.group();
    require_even(group)?;
    let q = rep.dim();
    let tag = "sl-decomposition";
    let mut cert = Certificate::new(format!("Cartan decomposition of sl_{q}"));
    check_images(&mut cert, rep, summands, tag);
    cert.check(
        "q + 1 summands",
        tag,
        summands.len() == q + 1 && summands.iter().enumerate().all(|(k, s)| s.index as usize == k + 1),
        format!("{} summands", summands.len()),
    );

    let mut dims = Vec::new();
    let mut shape_ok = true;
    for s in summands {
        dims.push(span_rank(&s.basis)?);
        shape_ok &= s.basis.iter().all(|b| b.trace().map_or(false, |t| t.is_zero()));
        shape_ok &= all_pairwise_commute(&s.basis);
    }
    cert.check(
        "each summand has dimension q - 1",
        tag,
        dims.iter().all(|&d| d == q - 1),
        format!("{dims:?}"),
    );
    cert.check("summands abelian and trace-free", tag, shape_ok, "");
    let all: Vec<ExactMatrix> = summands.iter().flat_map(|s| s.basis.clone()).collect();
    let global = span_rank(&all)?;
    cert.check(
        "global rank q² - 1",
        tag,
        global == q * q - 1,
        format!("rank {global}"),
    );
    let (pairs, bad) = cross_orthogonal(summands);
    cert.check(
        "tr(uv) = 0 across summands",
        tag,
        bad == 0,
        format!("{pairs} pairs, {bad} nonzero"),
    );
    let mut cdims = Vec::new();
    for s in summands {
        cdims.push(if s.basis.is_empty() { q * q } else { solve_centralizer(&s.basis)?.0 });
    }
    cert.check(
        "centralizer of each summand has dimension q",
        tag,
        cdims.iter().all(|&d| d == q),
        format!("{cdims:?}"),
    );
    let orbit = conjugation_orbit(summands, d)?;
    cert.check(
        "D⁻¹ H_i D = H_{i+1}, a single (q+1)-cycle",
        tag,
        is_single_cycle(&orbit),
        format!("{:?}", finish_orbit(&orbit)),
    );
    cert.check(
        "conjugation by D preserves tr(uv)",
        tag,
        conjugation_isometry(summands, d)?,
        "",
    );
    Ok((cert, finish_orbit(&orbit)))
}

/// sp_q as an orthogonal sum of the q+1 spans of order-4 images.
pub fn verify_sp_decomposition(rep: &UnitaryRep, gen: &Generator) -> Result<Decomposition> {
    let group = rep.group();
    require_even(group)?;
    let (form, form_cert) = compute_symplectic_form(rep, gen)?;
    let mut summands = Vec::new();
    for i in 1..=group.q() + 1 {
        summands.push(build_sp_summand(rep, i)?.0);
    }
    let (cert, orbit) = certify_sp(rep, &gen.matrix, &form.matrix, &summands)?;
    let mut certificate = Certificate::new(cert.subject.clone());
    certificate.absorb(form_cert);
    certificate.clauses.extend(cert.clauses);
    certificate.passed &= cert.passed;
    Ok(Decomposition {
        algebra: Algebra::Sp,
        q: rep.dim(),
        summands,
        orbit,
        form: Some(form),
        certificate,
    })
}

/// Invariance clauses for a candidate skew form S.
pub fn certify_form(rep: &UnitaryRep, d: &ExactMatrix, s: &ExactMatrix) -> Result<Certificate> {
    let f = rep.group().field();
    let tag = "symplectic-form";
    let q = rep.dim();
    let mut cert = Certificate::new(format!("invariant skew form, q = {q}"));
    let shape = s.rows() == q && s.cols() == q && s.conductor() == rep.conductor();
    cert.check("S is q×q over the field of definition", tag, shape, "");
    if !shape {
        return Ok(cert);
    }
    cert.check("Sᵀ = -S", tag, s.transpose() == s.neg(), "");
    cert.check("S invertible", tag, !s.det()?.is_zero(), "");
    let invariant = f.elements().all(|a| {
        let x = rep.eval(GroupElement::new(a, f.zero()));
        x.transpose().mul_dense_left(&x.mul_dense_right(s)) == *s
    });
    cert.check("X(x) S X(x)ᵀ = S on the transversal", tag, invariant, "");
    cert.check("D S Dᵀ = S", tag, d.mul(s)?.mul(&d.transpose())? == *s, "");
    Ok(cert)
}

/// All sp-decomposition clauses for the given form, summands and generator.
pub fn certify_sp(
    rep: &UnitaryRep,
    d: &ExactMatrix,
    s: &ExactMatrix,
    summands: &[CartanSummand],
) -> Result<(Certificate, Vec<u32>)> {
    let group = rep.group();
    require_even(group)?;
    let q = rep.dim();
    let tag = "sp-decomposition";
    let mut cert = Certificate::new(format!("Cartan decomposition of sp_{q}"));
    check_images(&mut cert, rep, summands, tag);
    cert.check(
        "q + 1 summands",
        tag,
        summands.len() == q + 1 && summands.iter().enumerate().all(|(k, s)| s.index as usize == k + 1),
        format!("{} summands", summands.len()),
    );
    let mut counts = Vec::new();
    for i in 1..=group.q() + 1 {
        counts.push(build_sp_summand(rep, i)?.1);
    }
    cert.check(
        "X(A_i) has q elements of order 4",
        tag,
        counts.iter().all(|&c| c == q),
        format!("{counts:?}"),
    );
    let minus_one = ExactMatrix::identity(q, rep.conductor()).neg();
    let mut dims = Vec::new();
    let mut in_sp = true;
    let mut order_four = true;
    let mut abelian = true;
    for sm in summands {
        dims.push(span_rank(&sm.basis)?);
        for b in &sm.basis {
            in_sp &= b.mul(s)?.add(&s.mul(&b.transpose())?)?.is_zero();
            order_four &= b.mul(b)? == minus_one;
        }
        abelian &= all_pairwise_commute(&sm.basis);
    }
    cert.check("basis elements square to -I", tag, order_four, "");
    cert.check(
        "each summand has dimension q/2",
        tag,
        dims.iter().all(|&d| d == q / 2),
        format!("{dims:?}"),
    );
    cert.check("M S + S Mᵀ = 0 for every basis element", tag, in_sp, "");
    cert.check("summands abelian", tag, abelian, "");
    let all: Vec<ExactMatrix> = summands.iter().flat_map(|sm| sm.basis.clone()).collect();
    let global = if all.is_empty() { 0 } else { span_rank(&all)? };
    cert.check(
        "global rank q(q+1)/2",
        tag,
        global == q * (q + 1) / 2,
        format!("rank {global}"),
    );
    let (pairs, bad) = cross_orthogonal(summands);
    cert.check(
        "tr(uv) = 0 across summands",
        tag,
        bad == 0,
        format!("{pairs} pairs, {bad} nonzero"),
    );
    let mut cdims = Vec::new();
    for sm in summands {
        let eqs = sm
            .basis
            .iter()
            .flat_map(commutator_equations)
            .chain(symplectic_equations(s));
        cdims.push(solve_matrix_system(q, rep.conductor(), eqs)?.len());
    }
    cert.check(
        "centralizer in sp_q has dimension q/2",
        tag,
        cdims.iter().all(|&d| d == q / 2),
        format!("{cdims:?}"),
    );
    let orbit = conjugation_orbit(summands, d)?;
    cert.check(
        "D⁻¹ D_i D = D_{i+1}, a single (q+1)-cycle",
        tag,
        is_single_cycle(&orbit),
        format!("{:?}", finish_orbit(&orbit)),
    );
    Ok((cert, finish_orbit(&orbit)))
}

/// Orbit of D on the (q+1)/2 distinct summands for odd p; reported, not asserted.
#[derive(Clone, Debug, Serialize)]
pub struct OddOrbitProfile {
    pub q: usize,
    pub summands: usize,
    pub dimensions: Vec<usize>,
    pub orbit: Vec<u32>,
    pub cycle_lengths: Vec<usize>,
}

fn cycle_lengths(orbit: &[Option<usize>]) -> Vec<usize> {
    let mut seen = vec![false; orbit.len()];
    let mut out = Vec::new();
    for start in 0..orbit.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = Some(start);
        while let Some(c) = cur {
            if seen[c] {
                break;
            }
            seen[c] = true;
            len += 1;
            cur = orbit[c];
        }
        out.push(len);
    }
    out
}

pub fn odd_orbit_profile(rep: &UnitaryRep, gen: &Generator) -> Result<OddOrbitProfile> {
    let group = rep.group();
    let distinct = if group.p() == 2 { group.q() + 1 } else { (group.q() + 1) / 2 };
    let summands: Vec<CartanSummand> = (1..=distinct)
        .map(|i| build_sl_summand(rep, i))
        .collect::<Result<_>>()?;
    let dimensions = summands
        .iter()
        .map(|s| span_rank(&s.basis))
        .collect::<Result<_>>()?;
    let orbit = conjugation_orbit(&summands, &gen.matrix)?;
    Ok(OddOrbitProfile {
        q: rep.dim(),
        summands: summands.len(),
        dimensions,
        cycle_lengths: cycle_lengths(&orbit),
        orbit: finish_orbit(&orbit),
    })
}

/// Permutation action of X on the generators of G_q together with D on the
/// sl summands; reported without classification.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorAction {
    pub label: String,
    pub permutation: Vec<u32>,
}

pub fn larger_group_profile(rep: &UnitaryRep, gen: &Generator) -> Result<Vec<GeneratorAction>> {
    let group = rep.group();
    require_even(group)?;
    let f = group.field();
    let summands: Vec<CartanSummand> = (1..=group.q() + 1)
        .map(|i| build_sl_summand(rep, i))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for k in 0..2 * f.a() {
        let x = f.pow(f.generator(), k as u64);
        let g = GroupElement::new(x, f.zero());
        // unitary, so the orbit test conjugates as X(g)⁻¹ H_i X(g)
        let m = rep.eval_dense(g);
        let orbit = conjugation_orbit(&summands, &m)?;
        out.push(GeneratorAction {
            label: format!("X(({}, 0))", f.format(x)),
            permutation: finish_orbit(&orbit),
        });
    }
    out.push(GeneratorAction {
        label: "D".into(),
        permutation: finish_orbit(&conjugation_orbit(&summands, &gen.matrix)?),
    });
    Ok(out)
}
