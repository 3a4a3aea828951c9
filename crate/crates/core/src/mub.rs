//! Mutually unbiased bases from the powers of D, flatness certificates and
//! the two hard-coded reference matrices.

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::Result;
use crate::exact_number::{rational, CyclotomicNumber};
use crate::intertwiner::Generator;
use crate::linalg::ExactMatrix;

/// True iff every entry has |m_ij|² = 1/q exactly.
pub fn is_flat(m: &ExactMatrix, q: usize) -> bool {
    let target = CyclotomicNumber::from_rational(m.conductor(), rational(1, q as i64));
    m.rows() == q && m.cols() == q && m.entries().iter().all(|e| e.norm_squared() == target)
}

/// Entry with the largest |(|m_ij|² - 1/q)|, measured in floating point.
pub fn flatness_witness(m: &ExactMatrix, q: usize) -> (usize, usize, f64) {
    let target = 1.0 / q as f64;
    let mut worst = (0, 0, -1.0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let dev = (m.get(i, j).norm_squared().to_complex().0 - target).abs();
            if dev > worst.2 {
                worst = (i, j, dev);
            }
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// q + 1 bases from D⁰, …, D^q (p = 2).
    Full,
    /// (q + 1)/2 bases from D⁰, D⁻¹, …, D^{-(q-1)/2} (p odd).
    Half,
}

#[derive(Clone, Debug)]
pub struct MubFamily {
    pub q: usize,
    pub kind: FamilyKind,
    /// Exponents k with bases[i] = D^{k_i}.
    pub exponents: Vec<i64>,
    pub bases: Vec<ExactMatrix>,
    pub certificate: Certificate,
}

pub fn generate_family(gen: &Generator, p: u32) -> Result<MubFamily> {
    let d = &gen.matrix;
    let q = d.rows();
    let n = d.conductor();
    let (kind, step, count) = if p == 2 {
        (FamilyKind::Full, d.clone(), q + 1)
    } else {
        (FamilyKind::Half, d.dagger(), (q + 1) / 2)
    };
    let sign = if p == 2 { 1 } else { -1 };
    let tag = if p == 2 { "mub-full-family" } else { "mub-half-family" };
    let mut cert = Certificate::new(format!("mutually unbiased bases, q = {q}"));
    let mut bases = vec![ExactMatrix::identity(q, n)];
    let mut exponents = vec![0];
    for k in 1..count {
        let next = bases[k - 1].mul(&step)?;
        let flat = is_flat(&next, q);
        let detail = if flat {
            String::new()
        } else {
            let (i, j, dev) = flatness_witness(&next, q);
            format!("entry ({i}, {j}) deviates by {dev:.3e}")
        };
        cert.check(format!("D^{} is flat", sign * k as i64), tag, flat, detail);
        bases.push(next);
        exponents.push(sign * k as i64);
    }
    cert.check(
        "family size",
        tag,
        bases.len() == count,
        format!("{} bases", bases.len()),
    );
    Ok(MubFamily {
        q,
        kind,
        exponents,
        bases,
        certificate: cert.into_result()?,
    })
}

/// Redundant pairwise check: U_i† U_j flat for every i < j.
pub fn pairwise_unbiased(family: &MubFamily) -> Result<bool> {
    for i in 0..family.bases.len() {
        for j in i + 1..family.bases.len() {
            let m = family.bases[i].dagger().mul(&family.bases[j])?;
            if !is_flat(&m, family.q) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub k: u64,
    pub flat: bool,
    pub diagonal_flat: bool,
    pub witness: (usize, usize),
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct FlatnessProfile {
    pub q: usize,
    pub rows: Vec<ProfileRow>,
    pub certificate: Certificate,
}

/// Flatness of D^k for k = 1…q+1. For odd non-square q the involution
/// D^{(q+1)/2} must have a diagonal entry off the flat norm.
pub fn flatness_profile(gen: &Generator, p: u32, a: u32) -> Result<FlatnessProfile> {
    let d = &gen.matrix;
    let q = d.rows();
    let target = CyclotomicNumber::from_rational(d.conductor(), rational(1, q as i64));
    let mut rows = Vec::with_capacity(q + 1);
    let mut power = ExactMatrix::identity(q, d.conductor());
    for k in 1..=q as u64 + 1 {
        power = power.mul(d)?;
        let (i, j, deviation) = flatness_witness(&power, q);
        rows.push(ProfileRow {
            k,
            flat: is_flat(&power, q),
            diagonal_flat: (0..q).all(|i| power.get(i, i).norm_squared() == target),
            witness: (i, j),
            deviation,
        });
    }
    let mut cert = Certificate::new(format!("flatness profile, q = {q}"));
    cert.check(
        "D^{q+1} = I is not flat",
        "flatness-profile",
        !rows[q].flat,
        "",
    );
    if p != 2 && a % 2 == 1 {
        let inv = &rows[(q + 1) / 2 - 1];
        cert.check(
            format!("involution D^{} has a non-flat diagonal", inv.k),
            "involution-obstruction",
            !inv.diagonal_flat,
            format!("witness ({}, {})", inv.witness.0, inv.witness.1),
        );
    }
    Ok(FlatnessProfile {
        q,
        rows,
        certificate: cert.into_result()?,
    })
}

/// (1+i)/2 · [[-1, i], [1, i]].
pub fn fixture_q2() -> ExactMatrix {
    let half = |re: i64, im: i64| {
        CyclotomicNumber::from_coeffs(4, vec![rational(re, 2), rational(im, 2)]).expect("conductor 4")
    };
    // (1+i)(-1) = -1-i, (1+i)i = -1+i, (1+i)·1 = 1+i
    ExactMatrix::from_rows(vec![vec![half(-1, -1), half(-1, 1)], vec![half(1, 1), half(-1, 1)]])
        .expect("2x2")
}

/// ½[[-1,-1,-1,-1],[1,-1,-1,1],[1,1,-1,-1],[1,-1,1,-1]].
pub fn fixture_real4() -> ExactMatrix {
    let signs = [[-1, -1, -1, -1], [1, -1, -1, 1], [1, 1, -1, -1], [1, -1, 1, -1]];
    let rows: Vec<Vec<(i64, i64)>> = signs.iter().map(|r| r.iter().map(|&s| (s, 2)).collect()).collect();
    ExactMatrix::from_rationals(4, &rows).expect("4x4")
}

fn order_three(cert: &mut Certificate, m: &ExactMatrix, tag: &str) -> Result<()> {
    let m2 = m.mul(m)?;
    let m3 = m2.mul(m)?;
    cert.check(
        "order 3",
        tag,
        !m.is_identity() && !m2.is_identity() && m3.is_identity(),
        "",
    );
    Ok(())
}

pub fn verify_fixture_q2() -> Result<Certificate> {
    certify_unitary_fixture(&fixture_q2())
}

/// Unitary, order 3, det 1 and flat powers, for a candidate 2×2 matrix.
pub fn certify_unitary_fixture(m: &ExactMatrix) -> Result<Certificate> {
    let tag = "fixture-2x2";
    let mut cert = Certificate::new("2x2 reference matrix");
    if !cert.check("2×2 over Q(i)", tag, m.rows() == 2 && m.cols() == 2 && m.conductor() == 4, "") {
        return Ok(cert);
    }
    cert.check("unitary", tag, m.is_unitary(), "");
    order_three(&mut cert, m, tag)?;
    cert.check("det 1", tag, m.det()?.is_one(), "");
    let m2 = m.mul(m)?;
    cert.check("M and M² flat", tag, is_flat(&m, 2) && is_flat(&m2, 2), "");
    Ok(cert)
}

pub fn verify_fixture_real4() -> Result<Certificate> {
    certify_real_fixture(&fixture_real4())
}

/// Real orthogonal, order 3, flat powers and a doubled Hadamard matrix, for a candidate 4×4 matrix.
pub fn certify_real_fixture(m: &ExactMatrix) -> Result<Certificate> {
    let tag = "fixture-real4";
    let mut cert = Certificate::new("4x4 real reference matrix");
    if !cert.check("4×4", tag, m.rows() == 4 && m.cols() == 4, "") {
        return Ok(cert);
    }
    let real = m.entries().iter().all(|e| e.as_rational().is_some());
    cert.check("real entries", tag, real, "");
    cert.check(
        "MᵀM = I",
        tag,
        m.transpose().mul(m)?.is_identity(),
        "",
    );
    order_three(&mut cert, m, tag)?;
    let m2 = m.mul(m)?;
    cert.check("M and M² flat", tag, is_flat(&m, 4) && is_flat(&m2, 4), "");
    let h = m.scale_rational(&rational(2, 1));
    let signs = h.entries().iter().all(|e| {
        e.as_rational()
            .map_or(false, |r| *r == rational(1, 1) || *r == rational(-1, 1))
    });
    cert.check("2M has ±1 entries", tag, signs, "");
    let hh = h.mul(&h.transpose())?;
    cert.check(
        "HHᵀ = 4I",
        tag,
        hh == ExactMatrix::scalar(4, &CyclotomicNumber::from_int(4, 4)),
        "",
    );
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureRelation {
    Equal,
    PermutationConjugate,
    Sibling,
}

/// How the canonical q = 2 generator relates to the 2×2 reference matrix.
pub fn compare_with_fixture(d: &ExactMatrix) -> Result<FixtureRelation> {
    let m = fixture_q2();
    if *d == m {
        return Ok(FixtureRelation::Equal);
    }
    if d.rows() == 2 && d.conductor() == 4 {
        let swap = ExactMatrix::from_rationals(4, &[vec![(0, 1), (1, 1)], vec![(1, 1), (0, 1)]])?;
        if swap.mul(d)?.mul(&swap)? == m {
            return Ok(FixtureRelation::PermutationConjugate);
        }
    }
    Ok(FixtureRelation::Sibling)
}
