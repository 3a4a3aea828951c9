//! Floating-point cross-check: a numerical simultaneous eigenbasis of C₁,
//! transported by powers of D⁻¹, must diagonalize every C_i.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::certificate::Certificate;
use crate::error::Result;
use crate::group::{Group, GroupElement};
use crate::intertwiner::Generator;
use crate::linalg::ExactMatrix;
use crate::representation::UnitaryRep;

pub const DEFAULT_TOL: f64 = 1e-9;

type CMat = DMatrix<Complex<f64>>;

fn to_nalgebra(m: &ExactMatrix) -> CMat {
    let f = m.to_float();
    CMat::from_fn(m.rows(), m.cols(), |i, j| Complex::new(f[i][j].0, f[i][j].1))
}

/// Non-identity coset representatives x_{i,j}, j ≥ 2.
fn nontrivial_reps(group: &Group, i: u32) -> Result<Vec<GroupElement>> {
    let cs = group.coset_system(i)?;
    Ok(cs.representatives.into_iter().skip(1).collect())
}

/// Σ_j (c_j X_j + c̄_j X_j†) with fixed generic weights; Hermitian, and its
/// eigenvectors are the joint eigenvectors of the commuting X_j.
fn hermitian_combination(mats: &[CMat]) -> CMat {
    let n = mats[0].nrows();
    let mut h = CMat::zeros(n, n);
    for (j, m) in mats.iter().enumerate() {
        let t = j as f64 + 1.0;
        let c = Complex::new(1.0 / (t + 0.37), (t * 0.618_033_988_7).fract() - 0.5);
        h += m * c + m.adjoint() * c.conj();
    }
    h
}

/// Columns sorted by ascending eigenvalue.
fn eigenbasis(h: CMat) -> CMat {
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])])
}

/// Largest ‖Mb - (b†Mb)b‖ over the columns b of `basis`.
fn eigen_residual(m: &CMat, basis: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for col in basis.column_iter() {
        let mb = m * col;
        let lambda = col.dotc(&mb);
        worst = worst.max((mb - col * lambda).norm());
    }
    worst
}

/// Largest | |u_ij|² - 1/q | over the entries of u.
fn flatness_residual(u: &CMat) -> f64 {
    let q = u.nrows() as f64;
    u.iter().map(|z| (z.norm_sqr() - 1.0 / q).abs()).fold(0.0, f64::max)
}

/// Numerical eigenbasis route plus the exact cross-class trace orthogonality.
pub fn eigenbasis_crosscheck(gen: &Generator, rep: &UnitaryRep, tol: f64) -> Result<Certificate> {
    let group = rep.group();
    let q = rep.dim();
    let classes = group.q() + 1;
    let mut cert = Certificate::new(format!("eigenbasis cross-check, q = {q}, tol = {tol:e}"));

    let c1: Vec<CMat> = nontrivial_reps(group, 1)?
        .into_iter()
        .map(|x| to_nalgebra(&rep.eval_dense(x)))
        .collect();
    let basis = eigenbasis(hermitian_combination(&c1));
    let orth = (basis.adjoint() * &basis - CMat::identity(q, q)).norm();
    cert.check(
        "numerical eigenbasis is orthonormal",
        "eigenbasis-crosscheck",
        orth < tol,
        format!("residual {orth:.3e}"),
    );

    let d_inv = to_nalgebra(&gen.matrix.dagger());
    let family_len = if group.p() == 2 { classes } else { classes / 2 };
    let mut transported = Vec::with_capacity(classes as usize);
    let mut b = basis;
    let mut worst: f64 = 0.0;
    for i in 1..=classes {
        for x in nontrivial_reps(group, i)? {
            worst = worst.max(eigen_residual(&to_nalgebra(&rep.eval_dense(x)), &b));
        }
        transported.push(b.clone());
        b = &d_inv * b;
    }
    cert.check(
        "D^{-(i-1)}B diagonalizes C_i for every i",
        "eigenbasis-crosscheck",
        worst < tol,
        format!("worst residual {worst:.3e}"),
    );

    let mut flat_worst: f64 = 0.0;
    for i in 0..family_len as usize {
        for j in i + 1..family_len as usize {
            flat_worst = flat_worst.max(flatness_residual(&(transported[i].adjoint() * &transported[j])));
        }
    }
    cert.check(
        "B_i†B_j flat within the family",
        "eigenbasis-crosscheck",
        flat_worst < tol,
        format!("worst residual {flat_worst:.3e}"),
    );

    let images: Vec<Vec<_>> = (1..=classes)
        .map(|i| nontrivial_reps(group, i).map(|v| v.into_iter().map(|x| rep.eval(x)).collect()))
        .collect::<Result<_>>()?;
    let commuting = images
        .iter()
        .all(|c| c.iter().all(|u| c.iter().all(|v| u.mul(v) == v.mul(u))));
    cert.check(
        "C_i members commute",
        "trace-orthogonality",
        commuting,
        "",
    );
    let mut pairs = 0usize;
    let mut failures = 0usize;
    for i in 0..images.len() {
        if group.p() != 2 && i >= family_len as usize {
            break;
        }
        for j in i + 1..images.len() {
            if group.alias(i as u32 + 1) == group.alias(j as u32 + 1) {
                continue;
            }
            for u in &images[i] {
                let ui = u.inverse();
                for v in &images[j] {
                    pairs += 1;
                    if !ui.mul(v).trace().is_zero() {
                        failures += 1;
                    }
                }
            }
        }
    }
    cert.check(
        "tr(X(x)†X(y)) = 0 across distinct classes",
        "trace-orthogonality",
        failures == 0,
        format!("{pairs} pairs, {failures} nonzero"),
    );
    Ok(cert)
}
