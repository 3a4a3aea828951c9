//! The intertwiner D with D⁻¹X(x)D = X(σ(x)), normalized to order q + 1 and
//! determinant 1.

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::exact_number::{CyclotomicNumber, Rational};
use crate::group::GroupElement;
use crate::linalg::ExactMatrix;
use crate::representation::UnitaryRep;

/// Matrix-unit seed E_{kl}, with its row-major index k·q + l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub row: usize,
    pub col: usize,
}

impl Seed {
    pub fn from_index(index: usize, q: usize) -> Self {
        Seed {
            row: index / q,
            col: index % q,
        }
    }

    pub fn index(&self, q: usize) -> usize {
        self.row * q + self.col
    }
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub matrix: ExactMatrix,
    pub order: u64,
    pub seed: Seed,
    /// det T before normalization.
    pub d: CyclotomicNumber,
    /// T^{q+1} = λ_s I.
    pub lambda_s: CyclotomicNumber,
    pub certificate: Certificate,
}

/// T = Σ_{a ∈ F_{q²}} X((a,0)) E X(σ((a,0)))⁻¹ for one seed E.
///
/// Each term is a single matrix unit times a root of unity, so the sum is
/// accumulated as a histogram of phases per entry.
pub fn coset_sum(rep: &UnitaryRep, seed: Seed) -> ExactMatrix {
    let group = rep.group();
    let f = group.field();
    let q = rep.dim();
    let n = rep.conductor() as usize;
    let mut counts = vec![0i64; q * q * n];
    for a in f.elements() {
        let g = GroupElement::new(a, f.zero());
        let left = rep.eval(g);
        let right = rep.eval(group.sigma(g, 1));
        // X(g) E_{kl} X(σg)⁻¹ = ζ^{φ_k - ψ_l} E_{perm(k), perm'(l)}
        let row = left.perm()[seed.row];
        let col = right.perm()[seed.col];
        let ph = (left.phase()[seed.row] as usize + n - right.phase()[seed.col] as usize) % n;
        counts[(row * q + col) * n + ph] += 1;
    }
    let mut t = ExactMatrix::zeros(q, q, n as u32);
    for r in 0..q {
        for c in 0..q {
            let mut v = CyclotomicNumber::zero(n as u32);
            for ph in 0..n {
                let k = counts[(r * q + c) * n + ph];
                if k != 0 {
                    let z = CyclotomicNumber::root_of_unity(n as u32, ph as i64);
                    v = &v + &z.scale(&Rational::from_integer(k.into()));
                }
            }
            t.set(r, c, v);
        }
    }
    t
}

/// First nonzero coset sum, trying seeds in row-major order from `start`.
pub fn raw_intertwiner(rep: &UnitaryRep, start: usize) -> Result<(Seed, ExactMatrix)> {
    let q = rep.dim();
    if start >= q * q {
        return Err(Error::Input(format!("seed index {start} outside 0..{}", q * q)));
    }
    for idx in start..q * q {
        let seed = Seed::from_index(idx, q);
        let t = coset_sum(rep, seed);
        if !t.is_zero() {
            return Ok((seed, t));
        }
    }
    Err(Error::cert(
        "generator-normalization",
        format!("every seed from index {start} gives a zero intertwiner"),
    ))
}

/// X(x)·M = M·X(σ(x)) for every x = (a, 0).
pub fn intertwines(rep: &UnitaryRep, m: &ExactMatrix) -> bool {
    let group = rep.group();
    let f = group.field();
    f.elements().all(|a| {
        let g = GroupElement::new(a, f.zero());
        rep.eval(g).mul_dense_right(m) == rep.eval(group.sigma(g, 1)).mul_dense_left(m)
    })
}

/// D = d·λ_s⁻¹·T with d = det T and T^{q+1} = λ_s I.
pub fn normalize(rep: &UnitaryRep, seed: Seed, t: &ExactMatrix) -> Result<Generator> {
    let q = rep.dim() as u64;
    let n = rep.conductor();
    let mut cert = Certificate::new(format!("generator D, q = {q}"));

    let lambda_s = t
        .pow(q + 1)?
        .is_scalar()
        .ok_or_else(|| Error::cert("generator-normalization", "T^{q+1} is not scalar"))?;
    let d = t.det()?;
    if d.is_zero() || lambda_s.is_zero() {
        return Err(Error::cert("generator-normalization", "intertwiner is singular"));
    }
    cert.check(
        "d^{q+1} = λ_s^q",
        "generator-normalization",
        d.pow(q + 1) == lambda_s.pow(q),
        format!("d = {d}, λ_s = {lambda_s}"),
    );
    let scale = d.checked_mul(&lambda_s.inv()?)?;
    let dm = t.scale(&scale);

    cert.check(
        "entries in Q(ζ_n) with the expected conductor",
        "generator-normalization",
        dm.conductor() == n,
        format!("conductor {}", dm.conductor()),
    );
    cert.check(
        "det D = 1",
        "generator-normalization",
        dm.det()?.is_one(),
        "",
    );
    cert.check(
        "D D† = I",
        "generator-normalization",
        dm.is_unitary(),
        "",
    );
    let mut power = ExactMatrix::identity(q as usize, n);
    let mut early = None;
    for k in 1..=q {
        power = power.mul(&dm)?;
        if power.is_identity() {
            early = Some(k);
            break;
        }
    }
    let full = early.is_none() && power.mul(&dm)?.is_identity();
    cert.check(
        "D has order exactly q + 1",
        "generator-normalization",
        full,
        match early {
            Some(k) => format!("D^{k} = I"),
            None => String::new(),
        },
    );
    cert.check(
        "D⁻¹X(x)D = X(σ(x)) on all q² transversal elements",
        "generator-normalization",
        intertwines(rep, &dm),
        "",
    );
    let group = rep.group();
    let orbit_ok = (1..=group.q() + 1).all(|i| {
        group.coset_system(i).map_or(false, |cs| {
            cs.representatives.iter().all(|&x| {
                rep.eval(x).mul_dense_right(&dm) == rep.eval(group.sigma(x, 1)).mul_dense_left(&dm)
            })
        })
    });
    cert.check(
        "D carries C_i onto C_{i+1}",
        "generator-normalization",
        orbit_ok,
        "",
    );
    let certificate = cert.into_result()?;
    Ok(Generator {
        matrix: dm,
        order: q + 1,
        seed,
        d,
        lambda_s,
        certificate,
    })
}

/// Builds D from the first nonzero seed at or after `seed_index`.
pub fn build_generator(rep: &UnitaryRep, seed_index: usize) -> Result<Generator> {
    let (seed, t) = raw_intertwiner(rep, seed_index)?;
    normalize(rep, seed, &t)
}

/// Normalizes intertwiners from `count` distinct nonzero seeds and checks
/// they all give the same D.
pub fn uniqueness_check(rep: &UnitaryRep, count: usize) -> Result<Certificate> {
    let q = rep.dim();
    let mut gens = Vec::new();
    let mut next = 0;
    while gens.len() < count && next < q * q {
        let (seed, t) = raw_intertwiner(rep, next)?;
        gens.push(normalize(rep, seed, &t)?);
        next = seed.index(q) + 1;
    }
    let mut cert = Certificate::new(format!("uniqueness of D, q = {q}"));
    cert.check(
        "enough nonzero seeds",
        "generator-uniqueness",
        gens.len() >= count.min(2),
        format!("{} seeds", gens.len()),
    );
    let first = &gens[0];
    let same = gens.iter().all(|g| g.matrix == first.matrix);
    cert.check(
        "all seeds give identical D",
        "generator-uniqueness",
        same,
        gens.iter()
            .map(|g| format!("({}, {})", g.seed.row, g.seed.col))
            .collect::<Vec<_>>()
            .join(" "),
    );
    let (seed, t) = raw_intertwiner(rep, 0)?;
    let scaled = normalize(rep, seed, &t.scale_rational(&Rational::new(7.into(), 3.into())))?;
    cert.check(
        "rational rescaling of T leaves D unchanged",
        "generator-uniqueness",
        scaled.matrix == first.matrix,
        "",
    );
    Ok(cert)
}
