//! The degree-q irreducible representation X of G_q, induced from a linear
//! character μ of the maximal abelian subgroup A = {(a,b) : a^q = a}.
//!
//! Character values are carried as exponents of ζ_n (n = 4 for p = 2, n = p
//! otherwise), so every X(g) is a [`MonomialMatrix`] and unitarity is
//! structural.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::exact_number::{rational, CyclotomicNumber};
use crate::finite_field::FieldElement;
use crate::group::{Group, GroupElement, EXHAUSTIVE_LIMIT};
use crate::linalg::{ExactMatrix, MonomialMatrix};

pub const SAMPLE_SEED: u64 = 0x6d75_6266;

/// Conductor of the field of definition: Q(i) for p = 2, Q(ζ_p) otherwise.
pub fn conductor_for(p: u32) -> u32 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// λ(0, b) = ζ_p^{Tr(c·b)}, stored as a ζ_n exponent.
#[derive(Clone, Debug)]
pub struct CentralCharacter {
    group: Group,
    conductor: u32,
    parameter: FieldElement,
    index: usize,
}

impl CentralCharacter {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// The field element c in Tr(c·b).
    pub fn parameter(&self) -> FieldElement {
        self.parameter
    }

    /// Position of this choice among all admissible parameters.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Exponent of ζ_n for λ(0, b).
    pub fn phase(&self, b: FieldElement) -> u32 {
        let f = self.group.field();
        let t = f.trace(f.mul(self.parameter, b));
        t * (self.conductor / f.p())
    }

    pub fn value(&self, b: FieldElement) -> CyclotomicNumber {
        CyclotomicNumber::root_of_unity(self.conductor, self.phase(b) as i64)
    }
}

/// Picks the `index`-th parameter c (in field order) whose character is
/// nontrivial on the commutator subgroup {(0, e) : e^q = -e}.
pub fn build_central_character(group: &Group, index: usize) -> Result<CentralCharacter> {
    let f = group.field();
    let skew = f.skew_elements();
    let admissible = f
        .elements()
        .filter(|&c| skew.iter().any(|&e| f.trace(f.mul(c, e)) != 0));
    let (count, parameter) = admissible
        .enumerate()
        .nth(index)
        .ok_or_else(|| Error::Input(format!("lambda index {index} exceeds the admissible range")))?;
    debug_assert_eq!(count, index);
    Ok(CentralCharacter {
        group: group.clone(),
        conductor: conductor_for(group.p()),
        parameter,
        index,
    })
}

/// Number of admissible central characters, q² - q.
pub fn admissible_central_count(group: &Group) -> usize {
    let f = group.field();
    let skew = f.skew_elements();
    f.elements()
        .filter(|&c| skew.iter().any(|&e| f.trace(f.mul(c, e)) != 0))
        .count()
}

/// A linear character μ of A extending λ.
#[derive(Clone, Debug)]
pub struct ExtendedCharacter {
    central: CentralCharacter,
    /// F_p-basis β_1, …, β_a of F_q; the chain generators are (β_k, 0).
    basis: Vec<FieldElement>,
    /// μ(β_k, 0) as exponents.
    generator_phase: Vec<u32>,
    /// a ↦ (digits e_k with a = Σ e_k β_k, second coordinate of Π (β_k,0)^{e_k}).
    decomposition: HashMap<FieldElement, (Vec<u32>, FieldElement)>,
}

impl ExtendedCharacter {
    pub fn central(&self) -> &CentralCharacter {
        &self.central
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub fn generator_phases(&self) -> &[u32] {
        &self.generator_phase
    }

    /// μ(x) as an exponent, or None when x ∉ A.
    pub fn phase(&self, x: GroupElement) -> Option<u32> {
        let group = self.central.group();
        let f = group.field();
        let n = self.central.conductor();
        let (digits, s) = self.decomposition.get(&x.a)?;
        let z = f.sub(x.b, *s);
        let mut ph = self.central.phase(z);
        for (e, g) in digits.iter().zip(&self.generator_phase) {
            ph = (ph + e * g) % n;
        }
        Some(ph)
    }
}

/// Extends λ along Z = H_0 < H_1 < … < H_a = A, adjoining (β_k, 0) at step k
/// and choosing μ(β_k, 0) as the least-exponent m-th root of μ((β_k,0)^m).
pub fn extend_to_a(central: &CentralCharacter) -> Result<ExtendedCharacter> {
    let group = central.group().clone();
    let f = group.field().clone();
    let p = f.p();
    let n = central.conductor();

    let mut basis: Vec<FieldElement> = Vec::new();
    let mut span: HashSet<FieldElement> = HashSet::from([f.zero()]);
    for x in f.subfield_elements() {
        if span.contains(&x) {
            continue;
        }
        let mut next = span.clone();
        for &s in &span {
            let mut y = s;
            for _ in 1..p {
                y = f.add(y, x);
                next.insert(y);
            }
        }
        span = next;
        basis.push(x);
    }

    let mut generator_phase = Vec::with_capacity(basis.len());
    let mut partial: Vec<FieldElement> = Vec::new();
    let in_chain = |span_of: &[FieldElement], a: FieldElement| -> bool {
        // is a in the F_p-span of span_of?
        let mut reach: HashSet<FieldElement> = HashSet::from([f.zero()]);
        for &b in span_of {
            let cur: Vec<_> = reach.iter().copied().collect();
            for s in cur {
                let mut y = s;
                for _ in 1..p {
                    y = f.add(y, b);
                    reach.insert(y);
                }
            }
        }
        reach.contains(&a)
    };
    for &beta in &basis {
        let g = GroupElement::new(beta, f.zero());
        let mut m = 1u32;
        let mut power = g;
        while !in_chain(&partial, power.a) {
            power = group.mul(power, g);
            m += 1;
        }
        // power lies in H_{k-1}; its μ-value is known from earlier generators.
        let earlier = ExtendedCharacter {
            central: central.clone(),
            basis: partial.clone(),
            generator_phase: generator_phase.clone(),
            decomposition: decompose(&group, &partial),
        };
        let target = earlier
            .phase(power)
            .ok_or_else(|| Error::cert("character-extension", "g^m left the previous chain step"))?;
        let root = (0..n)
            .find(|&r| (m * r) % n == target)
            .ok_or_else(|| Error::cert("character-extension", format!("no {m}-th root of ζ^{target}")))?;
        generator_phase.push(root);
        partial.push(beta);
    }

    let decomposition = decompose(&group, &basis);
    let mu = ExtendedCharacter {
        central: central.clone(),
        basis,
        generator_phase,
        decomposition,
    };
    verify_extension(&mu)?.into_result()?;
    Ok(mu)
}

/// For every a in the F_p-span of `basis`: its digits and the second
/// coordinate of the ordered product Π_k (β_k, 0)^{e_k}.
fn decompose(group: &Group, basis: &[FieldElement]) -> HashMap<FieldElement, (Vec<u32>, FieldElement)> {
    let f = group.field();
    let p = f.p();
    let count = (p as usize).pow(basis.len() as u32);
    let mut out = HashMap::with_capacity(count);
    for idx in 0..count {
        let mut rest = idx;
        let mut digits = Vec::with_capacity(basis.len());
        let mut prod = group.identity();
        for &beta in basis {
            let e = (rest % p as usize) as u32;
            rest /= p as usize;
            digits.push(e);
            prod = group.mul(prod, group.pow(GroupElement::new(beta, f.zero()), e as i64));
        }
        out.insert(prod.a, (digits, prod.b));
    }
    out
}

/// Checks μ is a homomorphism on all pairs of generators of A and restricts to λ on Z.
pub fn verify_extension(mu: &ExtendedCharacter) -> Result<Certificate> {
    let group = mu.central().group();
    let f = group.field();
    let n = mu.central().conductor();
    let mut gens: Vec<GroupElement> = mu.basis().iter().map(|&b| GroupElement::new(b, f.zero())).collect();
    // Z is generated by (0, t^k) and scalar multiples; use every F_p-basis-like element.
    let unit = f.one();
    let mut x = unit;
    let mut central_gens = Vec::new();
    for _ in 0..2 * f.a() {
        central_gens.push(GroupElement::new(f.zero(), x));
        x = f.mul(x, f.generator());
    }
    gens.extend(central_gens);
    let mut cert = Certificate::new("extension of the central character to A");
    let mut bad = 0usize;
    for &x in &gens {
        for &y in &gens {
            let lhs = mu.phase(group.mul(x, y));
            let rhs = mu.phase(x).zip(mu.phase(y)).map(|(a, b)| (a + b) % n);
            if lhs.is_none() || lhs != rhs {
                bad += 1;
            }
        }
    }
    cert.check(
        "μ(xy) = μ(x)μ(y) on all generator pairs",
        "character-extension",
        bad == 0,
        format!("{} pairs, {bad} violations", gens.len() * gens.len()),
    );
    let restricts = f
        .elements()
        .all(|b| mu.phase(GroupElement::new(f.zero(), b)) == Some(mu.central().phase(b)));
    cert.check("μ restricted to Z equals λ", "character-extension", restricts, "");
    Ok(cert)
}

/// X = Ind_A^G μ with transversal t_k = (r_k, 0).
#[derive(Clone, Debug)]
pub struct UnitaryRep {
    mu: ExtendedCharacter,
    transversal: Vec<FieldElement>,
    coset_of: Vec<usize>,
}

pub fn induce(mu: &ExtendedCharacter) -> UnitaryRep {
    let group = mu.central().group();
    let f = group.field();
    let sub = f.subfield_elements();
    let mut coset_of = vec![usize::MAX; f.size() as usize];
    let mut transversal = Vec::with_capacity(f.q() as usize);
    for r in f.elements() {
        if coset_of[r.index() as usize] != usize::MAX {
            continue;
        }
        let k = transversal.len();
        transversal.push(r);
        for &s in &sub {
            coset_of[f.add(r, s).index() as usize] = k;
        }
    }
    UnitaryRep {
        mu: mu.clone(),
        transversal,
        coset_of,
    }
}

impl UnitaryRep {
    pub fn group(&self) -> &Group {
        self.mu.central().group()
    }

    pub fn character(&self) -> &ExtendedCharacter {
        &self.mu
    }

    pub fn central(&self) -> &CentralCharacter {
        self.mu.central()
    }

    pub fn conductor(&self) -> u32 {
        self.mu.central().conductor()
    }

    pub fn dim(&self) -> usize {
        self.transversal.len()
    }

    pub fn transversal(&self) -> &[FieldElement] {
        &self.transversal
    }

    /// X(g)[k, l] = μ(t_k⁻¹ g t_l) when that lies in A, else 0.
    pub fn eval(&self, g: GroupElement) -> MonomialMatrix {
        let group = self.group();
        let f = group.field();
        let mut perm = Vec::with_capacity(self.dim());
        let mut phase = Vec::with_capacity(self.dim());
        for &r in &self.transversal {
            let y = group.mul(g, GroupElement::new(r, f.zero()));
            let k = self.coset_of[y.a.index() as usize];
            let tk_inv = group.inv(GroupElement::new(self.transversal[k], f.zero()));
            let inside = group.mul(tk_inv, y);
            perm.push(k);
            phase.push(self.mu.phase(inside).expect("t_k⁻¹ g t_l lies in A by choice of k"));
        }
        MonomialMatrix::new(self.conductor(), perm, phase)
    }

    pub fn eval_dense(&self, g: GroupElement) -> ExactMatrix {
        self.eval(g).to_dense()
    }

    /// χ(g) = tr X(g).
    pub fn trace(&self, g: GroupElement) -> CyclotomicNumber {
        self.eval(g).trace()
    }

    /// Homomorphism, unitarity and central-character consistency on
    /// generator pairs plus a fixed-seed random sample.
    pub fn verify_homomorphism(&self, samples: usize) -> Certificate {
        let group = self.group();
        let f = group.field();
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let size = f.size();
        let mut pairs: Vec<(GroupElement, GroupElement)> = Vec::new();
        let gens: Vec<GroupElement> = (0..2 * f.a())
            .flat_map(|k| {
                let x = f.pow(f.generator(), k as u64);
                [GroupElement::new(x, f.zero()), GroupElement::new(f.zero(), x)]
            })
            .collect();
        for &x in &gens {
            for &y in &gens {
                pairs.push((x, y));
            }
        }
        let mut random = || {
            GroupElement::new(
                FieldElement(rng.gen_range(0..size)),
                FieldElement(rng.gen_range(0..size)),
            )
        };
        for _ in 0..samples {
            pairs.push((random(), random()));
        }
        let mut cert = Certificate::new(format!("representation X, q = {}", group.q()));
        let bad = pairs
            .iter()
            .filter(|&&(x, y)| self.eval(x).mul(&self.eval(y)) != self.eval(group.mul(x, y)))
            .count();
        cert.check(
            "X(g)X(h) = X(gh)",
            "induced-representation",
            bad == 0,
            format!("{} pairs, {bad} violations", pairs.len()),
        );
        let unitary = pairs.iter().take(8).all(|&(x, _)| self.eval_dense(x).is_unitary());
        cert.check("X(g) unitary (dense check)", "induced-representation", unitary, "");
        let monomial = pairs.iter().all(|&(x, _)| {
            let m = self.eval(x);
            let mut seen = vec![false; m.dim()];
            m.perm().iter().all(|&r| !std::mem::replace(&mut seen[r], true))
        });
        cert.check(
            "X(g) monomial with root-of-unity entries",
            "induced-representation",
            monomial,
            "",
        );
        let consistent = pairs.iter().all(|&(x, y)| {
            let z = GroupElement::new(f.zero(), y.b);
            let lhs = self.eval(group.mul(z, x));
            let scaled = MonomialMatrix::new(
                self.conductor(),
                self.eval(x).perm().to_vec(),
                self.eval(x)
                    .phase()
                    .iter()
                    .map(|&ph| ph + self.central().phase(y.b))
                    .collect(),
            );
            lhs == scaled
        });
        cert.check(
            "X(zg) = λ(z)X(g)",
            "induced-representation",
            consistent,
            "",
        );
        cert
    }
}

/// Character-theoretic certificate: degree q, vanishing off the center,
/// irreducibility norm, and the size of X(Z) and of the kernel.
pub fn verify_character(rep: &UnitaryRep) -> Result<Certificate> {
    let group = rep.group();
    let f = group.field();
    let q = group.q() as u64;
    let p = group.p() as u64;
    let n = rep.conductor();
    let mut cert = Certificate::new(format!("character of X, q = {q}"));

    let chi1 = rep.trace(group.identity());
    cert.check(
        "χ(1) = q",
        "character-degree",
        chi1 == CyclotomicNumber::from_int(n, q as i64),
        format!("χ(1) = {chi1}"),
    );

    let exhaustive = group.order() <= EXHAUSTIVE_LIMIT;
    let mut nonzero = Vec::new();
    let mut checked = 0u64;
    if exhaustive {
        for x in group.elements().filter(|x| !x.is_central()) {
            checked += 1;
            if !rep.trace(x).is_zero() {
                nonzero.push(x);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        for _ in 0..4096 {
            let a = FieldElement(rng.gen_range(1..f.size()));
            let b = FieldElement(rng.gen_range(0..f.size()));
            checked += 1;
            if !rep.trace(GroupElement::new(a, b)).is_zero() {
                nonzero.push(GroupElement::new(a, b));
            }
        }
    }
    cert.check(
        "χ vanishes outside Z(G_q)",
        "character-vanishing",
        nonzero.is_empty(),
        format!(
            "{checked} non-central elements ({}), first violation {:?}",
            if exhaustive { "exhaustive" } else { "sampled" },
            nonzero.first()
        ),
    );

    let mut norm_sum = CyclotomicNumber::zero(n);
    let mut image = HashSet::new();
    let mut kernel = 0u64;
    let mut all_scalar = true;
    for z in group.center() {
        let m = rep.eval(z);
        match m.scalar_phase() {
            Some(ph) => {
                image.insert(ph);
                if ph == 0 {
                    kernel += 1;
                }
            }
            None => all_scalar = false,
        }
        norm_sum = &norm_sum + &m.trace().norm_squared();
    }
    cert.check("X(z) scalar for z ∈ Z", "character-degree", all_scalar, "");
    cert.check(
        "Σ_{z∈Z} |χ(z)|² = q⁴",
        "character-degree",
        norm_sum == CyclotomicNumber::from_rational(n, rational((q * q * q * q) as i64, 1)),
        format!("sum = {norm_sum}"),
    );
    cert.check(
        "|X(Z)| = p",
        "character-degree",
        image.len() as u64 == p,
        format!("|X(Z)| = {}", image.len()),
    );
    cert.check(
        "|ker X| = q²/p",
        "character-degree",
        kernel == q * q / p,
        format!("|ker X| = {kernel}"),
    );
    let derived = f.skew_elements().len() as u64;
    cert.check(
        "q³ linear characters (|G:G'|)",
        "character-degree",
        group.order() / derived == q * q * q,
        format!("|G'| = {derived}"),
    );
    Ok(cert)
}

/// Builds X with the given central-character index.
pub fn build_representation(group: &Group, lambda_index: usize) -> Result<UnitaryRep> {
    let lambda = build_central_character(group, lambda_index)?;
    let mu = extend_to_a(&lambda)?;
    Ok(induce(&mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::make_field;

    fn rep(p: u64, a: u32) -> UnitaryRep {
        build_representation(&Group::new(make_field(p, a).unwrap()), 0).unwrap()
    }

    #[test]
    fn central_character_basics() {
        for (p, a) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
            let g = Group::new(make_field(p, a).unwrap());
            let lambda = build_central_character(&g, 0).unwrap();
            let f = g.field();
            assert_eq!(lambda.phase(f.zero()), 0);
            let n = lambda.conductor();
            for b in f.elements() {
                assert_eq!((lambda.phase(b) * p as u32) % n, 0);
            }
            assert!(f.skew_elements().iter().any(|&e| lambda.phase(e) != 0));
            let q = g.q() as usize;
            assert_eq!(admissible_central_count(&g), q * q - q);
        }
    }

    #[test]
    fn q2_character_nontrivial_on_commutators() {
        let g = Group::new(make_field(2, 1).unwrap());
        let lambda = build_central_character(&g, 0).unwrap();
        let f = g.field();
        let derived: Vec<_> = f.skew_elements();
        assert_eq!(derived.len(), 2);
        assert!(derived.iter().any(|&e| lambda.phase(e) == 2));
        assert!(build_central_character(&g, 1).is_ok());
        assert!(matches!(build_central_character(&g, 2 * 2 - 2), Err(Error::Input(_))));
    }

    #[test]
    fn extension_values_p2() {
        let x = rep(2, 1);
        let g = x.group();
        let mut values = HashSet::new();
        let mut count = 0;
        for el in g.elements() {
            if let Some(ph) = x.character().phase(el) {
                count += 1;
                values.insert(ph);
            }
        }
        assert_eq!(count, 8);
        assert!(values.iter().all(|v| *v < 4));
        // A at q = 2 has elements of order 4, forcing ±i among the values
        assert!(values.contains(&1) || values.contains(&3));
    }

    #[test]
    fn extension_exponent_p_odd_exhaustive() {
        let x = rep(3, 1);
        let g = x.group();
        let mut count = 0;
        for el in g.elements() {
            if let Some(ph) = x.character().phase(el) {
                count += 1;
                assert_eq!((ph * 3) % 3, 0);
                assert_eq!(g.pow(el, 3), g.identity());
            }
        }
        assert_eq!(count, 27);
    }

    #[test]
    fn mu_is_a_homomorphism_exhaustively_on_a() {
        for (p, a) in [(2, 1), (2, 2), (3, 1)] {
            let x = rep(p, a);
            let g = x.group();
            let n = x.conductor();
            let a_elems: Vec<_> = g.elements().filter(|&e| g.in_abelian_subgroup(1, e)).collect();
            for &u in &a_elems {
                for &v in a_elems.iter().step_by(3) {
                    let lhs = x.character().phase(g.mul(u, v)).unwrap();
                    let rhs = (x.character().phase(u).unwrap() + x.character().phase(v).unwrap()) % n;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn identity_and_central_images() {
        let x = rep(2, 2);
        let g = x.group();
        assert!(x.eval(g.identity()).is_identity());
        for z in g.center() {
            assert_eq!(x.eval(z).scalar_phase(), Some(x.central().phase(z.b)));
        }
    }

    #[test]
    fn homomorphism_q4_random_pairs() {
        let x = rep(2, 2);
        let cert = x.verify_homomorphism(200);
        assert!(cert.passed(), "{cert}");
    }

    #[test]
    fn homomorphism_exhaustive_q2() {
        let x = rep(2, 1);
        let g = x.group();
        for u in g.elements() {
            for v in g.elements() {
                assert_eq!(x.eval(u).mul(&x.eval(v)), x.eval(g.mul(u, v)));
            }
        }
    }

    #[test]
    fn character_small() {
        for (p, a) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let cert = verify_character(&rep(p, a)).unwrap();
            assert!(cert.passed(), "{cert}");
        }
    }

    #[test]
    fn q2_all_noncentral_traces_vanish() {
        let x = rep(2, 1);
        let g = x.group();
        let noncentral: Vec<_> = g.elements().filter(|e| !e.is_central()).collect();
        assert_eq!(noncentral.len(), 12);
        assert!(noncentral.iter().all(|&e| x.trace(e).is_zero()));
    }

    #[test]
    fn every_admissible_lambda_gives_irreducible_x() {
        let g = Group::new(make_field(2, 2).unwrap());
        for idx in 0..admissible_central_count(&g) {
            let x = build_representation(&g, idx).unwrap();
            assert!(verify_character(&x).unwrap().passed());
        }
    }
}
