//! The group G_q on F_{q²} × F_{q²} with product (a,b)(c,d) = (a+c, a^q c + b + d),
//! its automorphism σ(a,b) = (αa, b), and the maximal abelian subgroups
//! A_i = σ^{i-1}(A), A = {(a,b) : a^q = a}.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::finite_field::{FieldElement, FieldSpec};

/// Whole-group scans are allowed up to this many elements (q = 16).
pub const EXHAUSTIVE_LIMIT: u64 = 65536;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElement {
    pub a: FieldElement,
    pub b: FieldElement,
}

impl GroupElement {
    pub fn new(a: FieldElement, b: FieldElement) -> Self {
        GroupElement { a, b }
    }

    pub fn is_central(&self) -> bool {
        self.a.is_zero()
    }
}

/// Wire form: both coordinates as F_p coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElementWire {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

/// Representatives x_{i,1}, …, x_{i,q} of Z(G_q) in A_i, with x_{i,1} the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSystem {
    pub index: u32,
    pub representatives: Vec<GroupElement>,
}

#[derive(Clone, Debug)]
pub struct Group {
    field: FieldSpec,
    alpha: FieldElement,
}

impl Group {
    pub fn new(field: FieldSpec) -> Self {
        let alpha = field.find_alpha();
        Group { field, alpha }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    /// Number of A_i: q + 1 for p = 2, (q+1)/2 distinct ones for odd p.
    pub fn distinct_subgroup_count(&self) -> u32 {
        if self.p() == 2 {
            self.q() + 1
        } else {
            (self.q() + 1) / 2
        }
    }

    pub fn order(&self) -> u64 {
        (self.field.size() as u64).pow(2)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(FieldElement::ZERO, FieldElement::ZERO)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let f = &self.field;
        f.elements()
            .flat_map(move |a| f.elements().map(move |b| GroupElement::new(a, b)))
    }

    pub fn center(&self) -> Vec<GroupElement> {
        self.field
            .elements()
            .map(|b| GroupElement::new(FieldElement::ZERO, b))
            .collect()
    }

    /// The elements (a, 0): one representative per coset of Z(G_q).
    pub fn center_transversal(&self) -> Vec<GroupElement> {
        self.field
            .elements()
            .map(|a| GroupElement::new(a, FieldElement::ZERO))
            .collect()
    }

    pub fn mul(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        let f = &self.field;
        let a = f.add(x.a, y.a);
        let b = f.add(f.add(f.mul(f.frobenius_q(x.a), y.a), x.b), y.b);
        GroupElement::new(a, b)
    }

    /// Product with validation that both operands belong to this group's field.
    pub fn try_mul(&self, x: GroupElement, y: GroupElement) -> Result<GroupElement> {
        for e in [x.a, x.b, y.a, y.b] {
            self.field.element(e.index())?;
        }
        Ok(self.mul(x, y))
    }

    /// (a,b)^{-1} = (-a, a^{q+1} - b).
    pub fn inv(&self, x: GroupElement) -> GroupElement {
        let f = &self.field;
        let norm = f.mul(f.frobenius_q(x.a), x.a);
        GroupElement::new(f.neg(x.a), f.sub(norm, x.b))
    }

    pub fn pow(&self, x: GroupElement, k: i64) -> GroupElement {
        let base = if k < 0 { self.inv(x) } else { x };
        let mut acc = self.identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// x^{-1} y^{-1} x y.
    pub fn comm(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        let xi = self.inv(x);
        let yi = self.inv(y);
        self.mul(self.mul(xi, yi), self.mul(x, y))
    }

    /// σ^steps(a, b) = (α^steps a, b).
    pub fn sigma(&self, x: GroupElement, steps: i64) -> GroupElement {
        let f = &self.field;
        GroupElement::new(f.mul(f.pow_signed(self.alpha, steps), x.a), x.b)
    }

    /// Membership in A_i (1-based, taken mod q+1): σ^{-(i-1)}(x) ∈ A.
    pub fn in_abelian_subgroup(&self, i: u32, x: GroupElement) -> bool {
        let back = self.sigma(x, -(i as i64 - 1));
        self.field.in_subfield(back.a)
    }

    /// For odd p, A_{i+(q+1)/2} = A_i; returns the smallest index naming the same subgroup.
    pub fn alias(&self, i: u32) -> u32 {
        let m = self.q() + 1;
        let i0 = (i - 1) % m;
        if self.p() == 2 {
            i0 + 1
        } else {
            i0 % (m / 2) + 1
        }
    }

    pub fn coset_system(&self, i: u32) -> Result<CosetSystem> {
        let q = self.q();
        if i == 0 || i > q + 1 {
            return Err(Error::Input(format!("coset index {i} outside 1..={}", q + 1)));
        }
        let f = &self.field;
        let shift = f.pow(self.alpha, (i - 1) as u64);
        let representatives = f
            .subfield_elements()
            .into_iter()
            .map(|a| GroupElement::new(f.mul(shift, a), FieldElement::ZERO))
            .collect();
        Ok(CosetSystem { index: i, representatives })
    }

    pub fn to_wire(&self, x: GroupElement) -> GroupElementWire {
        GroupElementWire {
            a: self.field.coeffs(x.a),
            b: self.field.coeffs(x.b),
        }
    }

    pub fn from_wire(&self, w: &GroupElementWire) -> Result<GroupElement> {
        Ok(GroupElement::new(
            self.field.from_coeffs(&w.a)?,
            self.field.from_coeffs(&w.b)?,
        ))
    }

    fn check_exhaustive(&self) -> Result<()> {
        if self.order() > EXHAUSTIVE_LIMIT {
            return Err(Error::Resource(format!(
                "|G_q| = {} exceeds the exhaustive scan limit {EXHAUSTIVE_LIMIT}",
                self.order()
            )));
        }
        Ok(())
    }

    /// Exhaustive membership table: for each element, which A_i (1..=q+1) contain it.
    fn subgroup_scan(&self, count: u32) -> (Vec<u64>, Vec<Vec<u64>>, bool) {
        let n = count as usize;
        let mut sizes = vec![0u64; n];
        let mut pair_counts = vec![vec![0u64; n]; n];
        let mut covered_all = true;
        for x in self.elements() {
            let member: Vec<bool> = (1..=count).map(|i| self.in_abelian_subgroup(i, x)).collect();
            if !member.iter().any(|&m| m) {
                covered_all = false;
            }
            for i in 0..n {
                if !member[i] {
                    continue;
                }
                sizes[i] += 1;
                for j in i + 1..n {
                    if member[j] {
                        pair_counts[i][j] += 1;
                    }
                }
            }
        }
        (sizes, pair_counts, covered_all)
    }

    /// p = 2: A_i ∩ A_j = Z(G_q) for i ≠ j and the A_i cover G_q.
    pub fn check_subgroup_partition(&self) -> Result<Certificate> {
        if self.p() != 2 {
            return Err(Error::Input("the covering property applies to p = 2 only".into()));
        }
        self.check_exhaustive()?;
        let q = self.q() as u64;
        let count = self.q() + 1;
        let (sizes, pairs, covered) = self.subgroup_scan(count);
        let mut cert = Certificate::new(format!("abelian subgroup partition, q = {q}"));
        let bad_sizes: Vec<_> = sizes.iter().enumerate().filter(|(_, &s)| s != q * q * q).collect();
        cert.check(
            "|A_i| = q^3 for every i",
            "subgroup-partition",
            bad_sizes.is_empty(),
            format!("sizes {sizes:?}"),
        );
        let center = q * q;
        let bad_pairs = pair_violations(&pairs, center);
        cert.check(
            "A_i ∩ A_j = Z(G_q) for i ≠ j",
            "subgroup-partition",
            bad_pairs.is_empty() && self.center_in_all(count),
            format!("{} pairs checked, violations {bad_pairs:?}", count * (count - 1) / 2),
        );
        cert.check(
            "A_1 ∪ … ∪ A_{q+1} = G_q",
            "subgroup-partition",
            covered,
            format!("|G_q| = {}", self.order()),
        );
        Ok(cert)
    }

    /// p odd: A_i ∩ A_j = Z(G_q) for 1 ≤ i ≠ j ≤ (q+1)/2, and A_{i+(q+1)/2} = A_i.
    pub fn check_subgroup_aliasing(&self) -> Result<Certificate> {
        if self.p() == 2 {
            return Err(Error::Input("the half-family intersection property needs odd p".into()));
        }
        self.check_exhaustive()?;
        let q = self.q() as u64;
        let half = (self.q() + 1) / 2;
        let (sizes, pairs, _) = self.subgroup_scan(half);
        let mut cert = Certificate::new(format!("abelian subgroup intersections, q = {q}"));
        cert.check(
            "|A_i| = q^3 for 1 ≤ i ≤ (q+1)/2",
            "subgroup-half-partition",
            sizes.iter().all(|&s| s == q * q * q),
            format!("sizes {sizes:?}"),
        );
        let bad_pairs = pair_violations(&pairs, q * q);
        cert.check(
            "A_i ∩ A_j = Z(G_q) for 1 ≤ i ≠ j ≤ (q+1)/2",
            "subgroup-half-partition",
            bad_pairs.is_empty() && self.center_in_all(half),
            format!("violations {bad_pairs:?}"),
        );
        let mut alias_ok = true;
        for i in 1..=half {
            let j = i + half;
            for x in self.elements() {
                if self.in_abelian_subgroup(i, x) != self.in_abelian_subgroup(j, x) {
                    alias_ok = false;
                    break;
                }
            }
        }
        cert.check(
            "A_{i+(q+1)/2} = A_i",
            "subgroup-aliasing",
            alias_ok,
            format!("checked i = 1..={half}"),
        );
        Ok(cert)
    }

    fn center_in_all(&self, count: u32) -> bool {
        self.center()
            .into_iter()
            .all(|z| (1..=count).all(|i| self.in_abelian_subgroup(i, z)))
    }

    /// Brute-force census of the center, commutator subgroup and centralizer orders.
    pub fn structure_census(&self, limit: u64) -> Result<Certificate> {
        if self.order() > limit {
            return Err(Error::Resource(format!(
                "census over |G_q| = {} exceeds limit {limit}",
                self.order()
            )));
        }
        let q = self.q() as u64;
        let all: Vec<GroupElement> = self.elements().collect();
        let mut cert = Certificate::new(format!("structure census, q = {q}"));

        let center: Vec<GroupElement> = all
            .iter()
            .copied()
            .filter(|&x| all.iter().all(|&y| self.mul(x, y) == self.mul(y, x)))
            .collect();
        cert.check(
            "|Z(G_q)| = q^2",
            "group-structure",
            center.len() as u64 == q * q && center.iter().all(|z| z.is_central()),
            format!("|Z| = {}", center.len()),
        );
        cert.check(
            "identity is central",
            "group-structure",
            center.contains(&self.identity()),
            String::new(),
        );

        let mut derived: HashSet<GroupElement> = HashSet::new();
        for &x in &all {
            for &y in &all {
                derived.insert(self.comm(x, y));
            }
        }
        // close under products
        loop {
            let current: Vec<_> = derived.iter().copied().collect();
            let before = derived.len();
            for &x in &current {
                for &y in &current {
                    derived.insert(self.mul(x, y));
                }
            }
            if derived.len() == before {
                break;
            }
        }
        cert.check(
            "|G_q'| = q",
            "group-structure",
            derived.len() as u64 == q,
            format!("|G'| = {}", derived.len()),
        );

        let mut bad = Vec::new();
        for &x in all.iter().filter(|x| !x.is_central()) {
            let c = all.iter().filter(|&&y| self.mul(x, y) == self.mul(y, x)).count() as u64;
            if c != q * q * q {
                bad.push((x, c));
            }
        }
        cert.check(
            "centralizer of every non-central element has order q^3",
            "group-structure",
            bad.is_empty(),
            format!(
                "{} non-central elements, {} violations",
                all.len() as u64 - q * q,
                bad.len()
            ),
        );
        Ok(cert)
    }
}

fn pair_violations(pairs: &[Vec<u64>], expected: u64) -> Vec<(usize, usize, u64)> {
    let n = pairs.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if pairs[i][j] != expected {
                out.push((i + 1, j + 1, pairs[i][j]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::make_field;
    use proptest::prelude::*;

    fn group(p: u64, a: u32) -> Group {
        Group::new(make_field(p, a).unwrap())
    }

    #[test]
    fn identity_and_inverse_formula() {
        for (p, a) in [(2, 1), (3, 1), (2, 2)] {
            let g = group(p, a);
            let e = g.identity();
            for x in g.elements() {
                assert_eq!(g.mul(e, x), x);
                assert_eq!(g.mul(x, e), x);
                let f = g.field();
                let norm = f.pow(x.a, (g.q() + 1) as u64);
                let closed_form_inverse = GroupElement::new(f.neg(x.a), f.sub(norm, x.b));
                assert_eq!(g.mul(x, closed_form_inverse), e);
                assert_eq!(g.inv(x), closed_form_inverse);
            }
        }
    }

    #[test]
    fn commutator_formula_and_skew_values() {
        for (p, a) in [(2, 1), (3, 1), (2, 2)] {
            let g = group(p, a);
            let f = g.field().clone();
            for x in g.elements().step_by(3) {
                for y in g.elements().step_by(5) {
                    let c = g.comm(x, y);
                    assert!(c.a.is_zero());
                    let expected = f.sub(
                        f.mul(f.frobenius_q(x.a), y.a),
                        f.mul(f.frobenius_q(y.a), x.a),
                    );
                    assert_eq!(c.b, expected);
                    assert_eq!(f.frobenius_q(c.b), f.neg(c.b));
                }
            }
        }
    }

    #[test]
    fn exponent_p_for_odd_p() {
        let g = group(3, 1);
        for x in g.elements() {
            assert_eq!(g.pow(x, 3), g.identity());
        }
    }

    #[test]
    fn squares_for_p2() {
        for a in [1, 2] {
            let g = group(2, a);
            let f = g.field().clone();
            for x in g.elements() {
                let expected = GroupElement::new(FieldElement::ZERO, f.pow(x.a, (g.q() + 1) as u64));
                assert_eq!(g.pow(x, 2), expected);
            }
        }
    }

    #[test]
    fn sigma_has_order_q_plus_one() {
        for (p, a) in [(2, 1), (2, 2), (3, 1), (5, 1), (2, 3)] {
            let g = group(p, a);
            let q = g.q() as i64;
            // (1, 0) generates the first coordinate's orbit; σ^k moves it for 1 ≤ k ≤ q.
            let x = GroupElement::new(g.field().one(), FieldElement::ZERO);
            for k in 1..=q {
                assert_ne!(g.sigma(x, k), x);
            }
            for y in g.elements().take(50) {
                assert_eq!(g.sigma(y, q + 1), y);
            }
            for z in g.center() {
                assert_eq!(g.sigma(z, 1), z);
            }
        }
    }

    #[test]
    fn coset_systems() {
        let g = group(2, 2);
        let c1 = g.coset_system(1).unwrap();
        assert_eq!(c1.representatives[0], g.identity());
        assert!(c1
            .representatives
            .iter()
            .all(|x| g.field().in_subfield(x.a) && x.b.is_zero()));
        for i in 1..=5 {
            let ci = g.coset_system(i).unwrap();
            let mapped: Vec<_> = c1
                .representatives
                .iter()
                .map(|&x| g.sigma(x, (i - 1) as i64))
                .collect();
            assert_eq!(ci.representatives, mapped);
            // closing with the center gives q^3 elements
            let mut closure = HashSet::new();
            for &x in &ci.representatives {
                for z in g.center() {
                    closure.insert(g.mul(x, z));
                }
            }
            assert_eq!(closure.len(), 64);
            assert!(closure.iter().all(|&x| g.in_abelian_subgroup(i, x)));
        }
        assert!(g.coset_system(0).is_err());
        assert!(g.coset_system(6).is_err());
    }

    #[test]
    fn subgroup_partition_small() {
        for a in [1, 2, 3] {
            let cert = group(2, a).check_subgroup_partition().unwrap();
            assert!(cert.passed(), "{cert}");
        }
        assert!(matches!(group(3, 1).check_subgroup_partition(), Err(Error::Input(_))));
    }

    #[test]
    fn subgroup_aliasing_small() {
        for (p, a) in [(3, 1), (5, 1)] {
            let cert = group(p, a).check_subgroup_aliasing().unwrap();
            assert!(cert.passed(), "{cert}");
        }
        assert!(matches!(group(2, 1).check_subgroup_aliasing(), Err(Error::Input(_))));
    }

    #[test]
    fn q3_a3_equals_a1() {
        let g = group(3, 1);
        assert_eq!(g.alias(3), 1);
        assert_eq!(g.alias(4), 2);
        for x in g.elements() {
            assert_eq!(g.in_abelian_subgroup(1, x), g.in_abelian_subgroup(3, x));
            if g.in_abelian_subgroup(1, x) && g.in_abelian_subgroup(2, x) {
                assert!(x.is_central());
            }
        }
    }

    #[test]
    fn census() {
        for (p, a) in [(2, 1), (3, 1), (2, 2)] {
            let cert = group(p, a).structure_census(EXHAUSTIVE_LIMIT).unwrap();
            assert!(cert.passed(), "{cert}");
        }
        assert!(group(2, 3).structure_census(1000).is_err());
    }

    #[test]
    fn wire_round_trip_and_validation() {
        let g = group(3, 1);
        let x = GroupElement::new(g.field().generator(), g.field().one());
        assert_eq!(g.from_wire(&g.to_wire(x)).unwrap(), x);
        let foreign = GroupElement::new(FieldElement(200), FieldElement::ZERO);
        assert!(matches!(g.try_mul(x, foreign), Err(Error::Structural(_))));
    }

    proptest! {
        #[test]
        fn group_axioms_q8(a in 0u32..64, b in 0u32..64, c in 0u32..64, d in 0u32..64, e in 0u32..64, f in 0u32..64) {
            let g = group(2, 3);
            let x = GroupElement::new(FieldElement(a), FieldElement(b));
            let y = GroupElement::new(FieldElement(c), FieldElement(d));
            let z = GroupElement::new(FieldElement(e), FieldElement(f));
            prop_assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
            prop_assert_eq!(g.mul(x, g.inv(x)), g.identity());
            prop_assert_eq!(g.sigma(g.mul(x, y), 1), g.mul(g.sigma(x, 1), g.sigma(y, 1)));
            let comm = g.comm(x, y);
            prop_assert!(comm.a.is_zero());
            prop_assert_eq!(g.field().frobenius_q(comm.b), g.field().neg(comm.b));
        }

        #[test]
        fn group_axioms_q9(a in 0u32..81, b in 0u32..81, c in 0u32..81, d in 0u32..81) {
            let g = group(3, 2);
            let x = GroupElement::new(FieldElement(a), FieldElement(b));
            let y = GroupElement::new(FieldElement(c), FieldElement(d));
            prop_assert_eq!(g.sigma(g.mul(x, y), 1), g.mul(g.sigma(x, 1), g.sigma(y, 1)));
            prop_assert_eq!(g.pow(x, 3), g.identity());
        }
    }
}
