//! JSON artifacts and their independent re-verification.
//!
//! Every artifact carries `"schema": "mubforge-1"` and a `kind`. Verification
//! never reads the stored certificate; it rebuilds X from the stored field and
//! character choice and re-checks every identity on the stored matrices.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::exact_number::CyclotomicNumber;
use crate::finite_field::{make_field_limited, FieldSpecWire};
use crate::group::{Group, GroupElementWire};
use crate::intertwiner::{build_generator, coset_sum, intertwines, Generator, Seed};
use crate::lie::{certify_form, certify_sl, certify_sp, Algebra, CartanSummand, Decomposition};
use crate::linalg::{ExactMatrix, FloatMatrix};
use crate::mub::{
    certify_real_fixture, certify_unitary_fixture, fixture_q2, fixture_real4, flatness_witness,
    is_flat, FamilyKind, MubFamily,
};
use crate::representation::{build_representation, conductor_for, UnitaryRep};

pub const SCHEMA: &str = "mubforge-1";

/// Field, group, representation and generator for one (p, a) and choice of λ and seed.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub group: Group,
    pub rep: UnitaryRep,
    pub generator: Generator,
    pub lambda_index: usize,
    pub seed_index: usize,
}

impl Pipeline {
    pub fn build(p: u64, a: u32, max_q: u64, lambda_index: usize, seed_index: usize) -> Result<Self> {
        let group = Group::new(make_field_limited(p, a, max_q)?);
        let rep = build_representation(&group, lambda_index)?;
        let generator = build_generator(&rep, seed_index)?;
        Ok(Pipeline {
            group,
            rep,
            generator,
            lambda_index,
            seed_index,
        })
    }

    pub fn p(&self) -> u32 {
        self.group.p()
    }

    pub fn a(&self) -> u32 {
        self.group.field().a()
    }

    pub fn q(&self) -> usize {
        self.rep.dim()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Seed,
    pub seed_index: usize,
    pub lambda_index: usize,
    pub d: CyclotomicNumber,
    pub lambda_s: CyclotomicNumber,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorArtifact {
    pub schema: String,
    pub kind: String,
    pub field: FieldSpecWire,
    pub q: usize,
    pub conductor: u32,
    #[serde(rename = "D")]
    pub d: ExactMatrix,
    pub order: u64,
    pub provenance: Provenance,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MubFamilyArtifact {
    pub schema: String,
    pub kind: String,
    pub field: FieldSpecWire,
    pub lambda_index: usize,
    pub q: usize,
    pub family: FamilyKind,
    pub count: usize,
    pub exponents: Vec<i64>,
    pub bases: Vec<ExactMatrix>,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummandArtifact {
    pub index: u32,
    pub elements: Vec<GroupElementWire>,
    pub basis: Vec<ExactMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionArtifact {
    pub schema: String,
    pub kind: String,
    pub algebra: Algebra,
    pub field: FieldSpecWire,
    pub lambda_index: usize,
    pub q: usize,
    #[serde(rename = "D")]
    pub d: ExactMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<ExactMatrix>,
    pub summands: Vec<SummandArtifact>,
    pub orbit: Vec<u32>,
    pub certificate: Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureName {
    Unitary2,
    Real4,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureArtifact {
    pub schema: String,
    pub kind: String,
    pub name: FixtureName,
    pub matrix: ExactMatrix,
    pub certificate: Certificate,
}

pub fn generator_artifact(pl: &Pipeline) -> GeneratorArtifact {
    let g = &pl.generator;
    GeneratorArtifact {
        schema: SCHEMA.into(),
        kind: "generator".into(),
        field: pl.group.field().to_wire(),
        q: pl.q(),
        conductor: pl.rep.conductor(),
        d: g.matrix.clone(),
        order: g.order,
        provenance: Provenance {
            seed: g.seed,
            seed_index: pl.seed_index,
            lambda_index: pl.lambda_index,
            d: g.d.clone(),
            lambda_s: g.lambda_s.clone(),
        },
        certificate: g.certificate.clone(),
    }
}

pub fn family_artifact(pl: &Pipeline, fam: &MubFamily) -> MubFamilyArtifact {
    MubFamilyArtifact {
        schema: SCHEMA.into(),
        kind: "mub-family".into(),
        field: pl.group.field().to_wire(),
        lambda_index: pl.lambda_index,
        q: fam.q,
        family: fam.kind,
        count: fam.bases.len(),
        exponents: fam.exponents.clone(),
        bases: fam.bases.clone(),
        certificate: fam.certificate.clone(),
    }
}

pub fn decomposition_artifact(pl: &Pipeline, dec: &Decomposition) -> DecompositionArtifact {
    DecompositionArtifact {
        schema: SCHEMA.into(),
        kind: "decomposition".into(),
        algebra: dec.algebra,
        field: pl.group.field().to_wire(),
        lambda_index: pl.lambda_index,
        q: dec.q,
        d: pl.generator.matrix.clone(),
        form: dec.form.as_ref().map(|f| f.matrix.clone()),
        summands: dec
            .summands
            .iter()
            .map(|s| SummandArtifact {
                index: s.index,
                elements: s.elements.iter().map(|&x| pl.group.to_wire(x)).collect(),
                basis: s.basis.clone(),
            })
            .collect(),
        orbit: dec.orbit.clone(),
        certificate: dec.certificate.clone(),
    }
}

pub fn fixture_artifacts() -> Result<Vec<FixtureArtifact>> {
    let make = |name, matrix: ExactMatrix, cert: Certificate| FixtureArtifact {
        schema: SCHEMA.into(),
        kind: "fixture".into(),
        name,
        matrix,
        certificate: cert,
    };
    Ok(vec![
        make(FixtureName::Unitary2, fixture_q2(), certify_unitary_fixture(&fixture_q2())?),
        make(FixtureName::Real4, fixture_real4(), certify_real_fixture(&fixture_real4())?),
    ])
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Replaces every exact matrix by its float export and every exact scalar by [re, im].
pub fn floatify(value: &mut Value, digits: u32) -> Result<()> {
    match value {
        Value::Object(map) => {
            if map.contains_key("rows") && map.contains_key("entries") && map.contains_key("conductor") {
                let m: ExactMatrix = serde_json::from_value(value.clone())?;
                *value = serde_json::to_value(FloatMatrix::from_exact(&m, digits))?;
                return Ok(());
            }
            if map.len() == 2 && map.contains_key("conductor") && map.contains_key("coeffs") {
                let c: CyclotomicNumber = serde_json::from_value(value.clone())?;
                let (re, im) = c.embed_float(digits);
                *value = serde_json::json!([re, im]);
                return Ok(());
            }
            for v in map.values_mut() {
                floatify(v, digits)?;
            }
            if let Some(kind) = map.get_mut("kind") {
                if let Some(k) = kind.as_str() {
                    *kind = Value::String(format!("{k}-float"));
                }
            }
        }
        Value::Array(items) => {
            for v in items {
                floatify(v, digits)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Writes via a temporary file in the same directory and an atomic rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

pub fn read_artifact(path: &PathBuf) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn rebuild(field: &FieldSpecWire, lambda_index: usize, max_q: u64, cert: &mut Certificate) -> Result<UnitaryRep> {
    let f = make_field_limited(field.p as u64, field.a, max_q)?;
    cert.check(
        "stored modulus is the canonical one",
        "artifact-provenance",
        f.modulus() == field.modulus.as_slice(),
        format!("stored {:?}, canonical {:?}", field.modulus, f.modulus()),
    );
    build_representation(&Group::new(f), lambda_index)
}

/// Order exactly `order`, unitary, det 1, conductor and intertwining.
fn check_generator_matrix(cert: &mut Certificate, rep: &UnitaryRep, d: &ExactMatrix, tag: &str) -> Result<bool> {
    let q = rep.dim();
    let shape = d.rows() == q && d.cols() == q && d.conductor() == conductor_for(rep.group().p());
    if !cert.check("D is q×q over the field of definition", tag, shape, "") {
        return Ok(false);
    }
    cert.check("D D† = I", tag, d.is_unitary(), "");
    cert.check("det D = 1", tag, d.det()?.is_one(), "");
    let mut power = ExactMatrix::identity(q, d.conductor());
    let mut early = None;
    for k in 1..=q {
        power = power.mul(d)?;
        if power.is_identity() {
            early = Some(k);
            break;
        }
    }
    cert.check(
        "D has order exactly q + 1",
        tag,
        early.is_none() && power.mul(d)?.is_identity(),
        early.map(|k| format!("D^{k} = I")).unwrap_or_default(),
    );
    cert.check(
        "D⁻¹X(x)D = X(σ(x)) on all q² transversal elements",
        tag,
        intertwines(rep, d),
        "",
    );
    Ok(true)
}

fn verify_generator(art: &GeneratorArtifact, max_q: u64) -> Result<Certificate> {
    let tag = "generator-normalization";
    let mut cert = Certificate::new(format!("stored generator, q = {}", art.q));
    let rep = rebuild(&art.field, art.provenance.lambda_index, max_q, &mut cert)?;
    let q = rep.dim();
    cert.check(
        "stated q, conductor and order",
        tag,
        art.q == q && art.conductor == rep.conductor() && art.order == q as u64 + 1,
        "",
    );
    if !check_generator_matrix(&mut cert, &rep, &art.d, tag)? {
        return Ok(cert);
    }
    let prov = &art.provenance;
    let seed_ok = prov.seed.row < q && prov.seed.col < q;
    if cert.check("seed within range", tag, seed_ok, "") {
        let t = coset_sum(&rep, prov.seed);
        let lambda_ok = t.pow(q as u64 + 1)? == ExactMatrix::scalar(q, &prov.lambda_s);
        cert.check("T^{q+1} = λ_s I", tag, lambda_ok, "");
        cert.check("det T = d", tag, t.det()? == prov.d, "");
        cert.check(
            "d^{q+1} = λ_s^q",
            tag,
            prov.d.pow(q as u64 + 1) == prov.lambda_s.pow(q as u64),
            "",
        );
        let rebuilt = prov
            .lambda_s
            .inv()
            .and_then(|inv| prov.d.checked_mul(&inv))
            .map(|s| t.scale(&s) == art.d)
            .unwrap_or(false);
        cert.check("D = d λ_s⁻¹ T", tag, rebuilt, "");
    }
    Ok(cert)
}

fn verify_family(art: &MubFamilyArtifact, max_q: u64) -> Result<Certificate> {
    let tag = match art.family {
        FamilyKind::Full => "mub-full-family",
        FamilyKind::Half => "mub-half-family",
    };
    let mut cert = Certificate::new(format!("stored basis family, q = {}", art.q));
    let rep = rebuild(&art.field, art.lambda_index, max_q, &mut cert)?;
    let q = rep.dim();
    let p = rep.group().p();
    let (kind, count) = if p == 2 {
        (FamilyKind::Full, q + 1)
    } else {
        (FamilyKind::Half, (q + 1) / 2)
    };
    let sign: i64 = if p == 2 { 1 } else { -1 };
    let expected: Vec<i64> = (0..count as i64).map(|k| sign * k).collect();
    let counts_ok = art.q == q
        && art.family == kind
        && art.count == count
        && art.bases.len() == count
        && art.exponents == expected;
    cert.check("family size and exponents", tag, counts_ok, format!("{} bases", art.bases.len()));
    let shapes_ok = art
        .bases
        .iter()
        .all(|b| b.rows() == q && b.cols() == q && b.conductor() == rep.conductor());
    if !cert.check("bases are q×q over the field of definition", tag, shapes_ok, "") || art.bases.len() < 2 {
        return Ok(cert);
    }
    cert.check("first basis is I", tag, art.bases[0].is_identity(), "");
    cert.check("every basis unitary", tag, art.bases.iter().all(ExactMatrix::is_unitary), "");
    let step = &art.bases[1];
    let mut powers_ok = true;
    for k in 2..art.bases.len() {
        powers_ok &= art.bases[k - 1].mul(step)? == art.bases[k];
    }
    cert.check("bases are consecutive powers", tag, powers_ok, "");
    let d = if p == 2 { step.clone() } else { step.dagger() };
    check_generator_matrix(&mut cert, &rep, &d, tag)?;
    let mut witness = None;
    for i in 0..art.bases.len() {
        for j in i + 1..art.bases.len() {
            let m = art.bases[i].dagger().mul(&art.bases[j])?;
            if witness.is_none() && !is_flat(&m, q) {
                let (r, c, dev) = flatness_witness(&m, q);
                witness = Some(format!("bases {i}, {j}: entry ({r}, {c}) deviates by {dev:.3e}"));
            }
        }
    }
    cert.check(
        "U_i†U_j flat for every pair",
        tag,
        witness.is_none(),
        witness.unwrap_or_default(),
    );
    Ok(cert)
}

fn verify_decomposition(art: &DecompositionArtifact, max_q: u64) -> Result<Certificate> {
    let tag = match art.algebra {
        Algebra::Sl => "sl-decomposition",
        Algebra::Sp => "sp-decomposition",
    };
    let mut cert = Certificate::new(format!("stored decomposition, q = {}", art.q));
    let rep = rebuild(&art.field, art.lambda_index, max_q, &mut cert)?;
    let group = rep.group().clone();
    if !check_generator_matrix(&mut cert, &rep, &art.d, tag)? {
        return Ok(cert);
    }
    let q = rep.dim();
    let mut summands = Vec::with_capacity(art.summands.len());
    for s in &art.summands {
        let elements = s
            .elements
            .iter()
            .map(|w| group.from_wire(w))
            .collect::<Result<Vec<_>>>()?;
        let shapes_ok = s
            .basis
            .iter()
            .all(|b| b.rows() == q && b.cols() == q && b.conductor() == rep.conductor());
        if !cert.check(format!("summand {} shapes", s.index), tag, shapes_ok, "") {
            return Ok(cert);
        }
        summands.push(CartanSummand {
            index: s.index,
            algebra: art.algebra,
            elements,
            basis: s.basis.clone(),
        });
    }
    let (inner, orbit) = match art.algebra {
        Algebra::Sl => certify_sl(&rep, &art.d, &summands)?,
        Algebra::Sp => {
            let Some(s) = &art.form else {
                cert.check("invariant form present", tag, false, "");
                return Ok(cert);
            };
            let form_cert = certify_form(&rep, &art.d, s)?;
            let form_ok = form_cert.passed();
            cert.absorb(form_cert);
            if !form_ok {
                return Ok(cert);
            }
            certify_sp(&rep, &art.d, s, &summands)?
        }
    };
    cert.absorb(inner);
    cert.check("stored orbit matches", tag, orbit == art.orbit, format!("{:?}", orbit));
    Ok(cert)
}

fn verify_fixture(art: &FixtureArtifact) -> Result<Certificate> {
    let (cert, reference) = match art.name {
        FixtureName::Unitary2 => (certify_unitary_fixture(&art.matrix)?, fixture_q2()),
        FixtureName::Real4 => (certify_real_fixture(&art.matrix)?, fixture_real4()),
    };
    let mut out = Certificate::new(format!("stored fixture {:?}", art.name));
    out.absorb(cert);
    out.check(
        "matches the built-in table",
        "fixture-table",
        art.matrix == reference,
        "",
    );
    Ok(out)
}

/// Re-verifies any artifact kind from scratch.
pub fn verify_value(value: &Value, max_q: u64) -> Result<Certificate> {
    let schema = value.get("schema").and_then(Value::as_str);
    if schema != Some(SCHEMA) {
        return Err(Error::Parse(format!("expected schema {SCHEMA}, found {schema:?}")));
    }
    let kind = value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("missing kind".into()))?;
    match kind {
        "generator" => verify_generator(&serde_json::from_value(value.clone())?, max_q),
        "mub-family" => verify_family(&serde_json::from_value(value.clone())?, max_q),
        "decomposition" => verify_decomposition(&serde_json::from_value(value.clone())?, max_q),
        "fixture" => verify_fixture(&serde_json::from_value(value.clone())?),
        "flatness-profile" | "lie-profile" => Err(Error::Input(format!("{kind} files are reports without an exact claim to verify"))),
        k if k.ends_with("-float") => Err(Error::Input(format!(
            "{k} artifacts are rounded exports and cannot be verified exactly"
        ))),
        k => Err(Error::Parse(format!("unknown artifact kind {k}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::verify_sl_decomposition;
    use crate::mub::generate_family;

    #[test]
    fn generator_round_trip_and_tamper() {
        let pl = Pipeline::build(2, 2, 32, 0, 0).unwrap();
        let art = generator_artifact(&pl);
        let v = serde_json::to_value(&art).unwrap();
        assert!(verify_value(&v, 32).unwrap().passed());
        let mut bad = art.clone();
        bad.d = bad.d.transpose();
        let v = serde_json::to_value(&bad).unwrap();
        assert!(!verify_value(&v, 32).unwrap().passed());
    }

    #[test]
    fn family_round_trip_and_tamper() {
        let pl = Pipeline::build(3, 1, 32, 0, 0).unwrap();
        let fam = generate_family(&pl.generator, 3).unwrap();
        let art = family_artifact(&pl, &fam);
        let v = serde_json::to_value(&art).unwrap();
        let c = verify_value(&v, 32).unwrap();
        assert!(c.passed(), "{c}");
        let mut bad = art.clone();
        let mut e = bad.bases[1].get(0, 0).clone();
        e = &e + &CyclotomicNumber::from_int(3, 1);
        bad.bases[1].set(0, 0, e);
        let c = verify_value(&serde_json::to_value(&bad).unwrap(), 32).unwrap();
        assert!(!c.passed());
        assert!(c.failures().any(|f| f.detail.contains("deviates")));
    }

    #[test]
    fn decomposition_round_trip() {
        let pl = Pipeline::build(2, 1, 32, 0, 0).unwrap();
        let dec = verify_sl_decomposition(&pl.rep, &pl.generator).unwrap();
        let art = decomposition_artifact(&pl, &dec);
        let c = verify_value(&serde_json::to_value(&art).unwrap(), 32).unwrap();
        assert!(c.passed(), "{c}");
    }

    #[test]
    fn fixtures_round_trip() {
        for art in fixture_artifacts().unwrap() {
            let c = verify_value(&serde_json::to_value(&art).unwrap(), 32).unwrap();
            assert!(c.passed(), "{c}");
        }
    }

    #[test]
    fn floatify_replaces_matrices() {
        let pl = Pipeline::build(2, 1, 32, 0, 0).unwrap();
        let mut v = serde_json::to_value(generator_artifact(&pl)).unwrap();
        floatify(&mut v, 6).unwrap();
        assert_eq!(v["kind"], "generator-float");
        assert!(v["D"]["entries"][0][0][0].is_number());
        assert!(v["provenance"]["d"][0].is_number());
        assert!(matches!(verify_value(&v, 32), Err(Error::Input(_))));
    }

    #[test]
    fn wrong_schema_is_a_parse_error() {
        let v = serde_json::json!({"schema": "other", "kind": "generator"});
        assert!(matches!(verify_value(&v, 32), Err(Error::Parse(_))));
    }
}
