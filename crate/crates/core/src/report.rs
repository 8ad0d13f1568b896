//! Structured reports for the command-line tool.

use std::fmt::Write as _;

use serde::Serialize;

use crate::braided::{Braided, Completion, Matrix, B1};
use crate::error::{Error, Result};
use crate::rootdata::{SubRootDatum, ValidationReport};
use crate::uq::EngineConfig;

#[derive(Clone, Debug, Serialize)]
pub struct ConditionEntry {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationSection {
    pub passed: bool,
    pub conditions: Vec<ConditionEntry>,
}

impl From<&ValidationReport> for ValidationSection {
    fn from(r: &ValidationReport) -> Self {
        Self {
            passed: r.passed(),
            conditions: r
                .conditions
                .iter()
                .map(|c| ConditionEntry {
                    id: c.id.into(),
                    description: c.description.into(),
                    passed: c.passed,
                    witness: c.witness.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleEntry {
    pub node: String,
    pub dim: usize,
    pub highest_weight: Vec<i64>,
    pub dominant: bool,
    pub primitive_vectors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionEntry {
    pub generator: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeEntry {
    pub degree: usize,
    pub dim: usize,
    pub basis: Vec<String>,
    pub products_dim: usize,
    pub coinvariant_dim: usize,
    pub pbw_count: Option<u64>,
    pub agree: bool,
    pub pairing_rank: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BraidingSection {
    /// Column `i * dim + j` is `Psi(b_i (x) b_j)` in the basis `b_k (x) b_l`.
    pub matrix: Vec<Vec<String>>,
    pub formulas: Vec<String>,
    pub invertible: bool,
    pub braid_equation: bool,
    pub minimal_polynomial: Vec<String>,
    /// `(alpha, beta)` with `(Psi - alpha)(Psi + beta) = 0`.
    pub hecke: Option<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationsEntry {
    pub degree: usize,
    pub relations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NicholsSection {
    pub passed: bool,
    pub b0_is_field: bool,
    pub primitive_dims: Vec<(usize, usize)>,
    pub generated: Vec<(usize, bool)>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityEntry {
    pub vector: String,
    pub generator: String,
    pub nilpotency: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroComponentSection {
    pub passed: bool,
    pub actions: Vec<String>,
    pub slices: Vec<(Vec<u32>, usize, usize)>,
}

/// Everything `compute` produces. Sections after a bound was hit are absent.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub ambient: Vec<String>,
    pub sub: Vec<String>,
    pub iota: Vec<String>,
    pub deleted: Vec<String>,
    pub max_degree: usize,
    pub orbit_cap: usize,
    pub partial: bool,
    pub status: String,
    pub failures: Vec<String>,
    pub validation: Option<ValidationSection>,
    pub corank: usize,
    pub index: Option<usize>,
    pub b1_basis: Vec<String>,
    pub modules: Vec<ModuleEntry>,
    pub action_table: Vec<ActionEntry>,
    pub hilbert_series: Vec<usize>,
    pub degrees: Vec<DegreeEntry>,
    pub braiding: Option<BraidingSection>,
    pub relations: Vec<RelationsEntry>,
    pub primitive_dims: Vec<(usize, usize)>,
    pub nichols: Option<NicholsSection>,
    pub integrability: Vec<IntegrabilityEntry>,
    pub zero_component: Option<ZeroComponentSection>,
}

/// How a run ended, in exit-code order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    MathFailure,
    Partial,
}

fn strings(m: &Matrix) -> Vec<Vec<String>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

fn bound_error(e: &Error) -> bool {
    matches!(
        e,
        Error::HeightBound { .. } | Error::DegreeBound { .. } | Error::CapExceeded { .. }
    )
}

/// Runs every computation on `s` up to degree `max_degree`.
pub fn compute(s: &SubRootDatum, max_degree: usize, config: EngineConfig) -> Result<(Report, Outcome)> {
    let names = |d: &crate::rootdata::RootDatum, idx: &[usize]| -> Vec<String> {
        idx.iter().map(|&i| d.names[i].clone()).collect()
    };
    let t = &s.ambient;
    let mut report = Report {
        ambient: t.names.clone(),
        sub: s.sub.names.clone(),
        iota: names(t, &s.iota),
        deleted: names(t, &s.deleted()),
        max_degree,
        orbit_cap: config.orbit_cap,
        corank: s.corank(),
        status: "complete".into(),
        ..Report::default()
    };
    let v = s.validate();
    report.validation = Some((&v).into());
    if !v.passed() {
        report.failures.push(format!("validation: conditions {:?} fail", v.failed_ids()));
        report.status = "invalid sub-root datum".into();
        return Ok((report, Outcome::MathFailure));
    }
    let config = EngineConfig {
        max_degree: config.max_degree.max(max_degree),
        ..config
    };
    let alg = Braided::new(s, config)?;
    match fill(&alg, max_degree, &mut report) {
        Ok(()) => {}
        Err(e) if bound_error(&e) => {
            report.partial = true;
            report.status = format!("partial: {e}");
        }
        Err(e) => return Err(e),
    }
    let outcome = if report.partial {
        Outcome::Partial
    } else if report.failures.is_empty() {
        Outcome::Pass
    } else {
        Outcome::MathFailure
    };
    Ok((report, outcome))
}

fn fill(alg: &Braided, max_degree: usize, report: &mut Report) -> Result<()> {
    let eng = alg.engine();
    let zc = alg.verify_zero_component()?;
    if !zc.passed() {
        report.failures.push("zero component".into());
    }
    report.zero_component = Some(ZeroComponentSection {
        passed: zc.passed(),
        actions: zc
            .actions
            .iter()
            .map(|a| {
                format!(
                    "K_{d} F[{j}] K_{d}^-1 = q^{e} F[{j}]: {}",
                    if a.holds { "ok" } else { "FAIL" },
                    d = a.deleted + 1,
                    j = a.kept + 1,
                    e = a.exponent
                )
            })
            .collect(),
        slices: zc.slices.clone(),
    });

    let b1: B1 = alg.compute_B1()?;
    report.b1_basis = b1.basis.vectors.iter().map(|b| eng.format(&b.value)).collect();
    match &b1.completion {
        Completion::Complete => {}
        Completion::CapExceeded { cap } => {
            report.partial = true;
            report.status = format!("partial: orbit cap {cap} exceeded in B1");
            return Ok(());
        }
        Completion::BoundExceeded(why) => {
            report.partial = true;
            report.status = format!("partial: {why} in B1");
            return Ok(());
        }
    }
    let (index, _) = alg.index_and_corank(&b1);
    report.index = index;
    let names = &alg.sub().ambient.names;
    for m in &b1.modules {
        if m.primitive.len() != 1 {
            report
                .failures
                .push(format!("V(lambda'_{}) has {} primitive vectors", names[m.node], m.primitive.len()));
        }
        report.modules.push(ModuleEntry {
            node: names[m.node].clone(),
            dim: m.dim,
            highest_weight: m.highest_weight.clone(),
            dominant: m.dominant,
            primitive_vectors: m.primitive.iter().map(|x| eng.format(x)).collect(),
        });
    }
    report.action_table = alg
        .action_table(&b1.basis)?
        .into_iter()
        .map(|(g, m)| ActionEntry {
            generator: g.to_string(),
            matrix: strings(&m),
        })
        .collect();
    for n in alg.integrability_check(&b1.basis, 2 * b1.basis.dim() + 2)? {
        if n.degree.is_none() {
            report.failures.push(format!("Ad_{} is not nilpotent on b{}", n.generator, n.vector + 1));
        }
        report.integrability.push(IntegrabilityEntry {
            vector: format!("b{}", n.vector + 1),
            generator: n.generator.to_string(),
            nilpotency: n.degree,
        });
    }

    let psi = alg.braiding_matrix(&b1.basis)?;
    let d = psi.dim;
    let mut formulas = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let col = i * d + j;
            let mut terms = Vec::new();
            for k in 0..d {
                for l in 0..d {
                    let c = &psi.entries[k * d + l][col];
                    if !c.is_zero() {
                        terms.push(format!("({c}) b{}(x)b{}", k + 1, l + 1));
                    }
                }
            }
            let rhs = if terms.is_empty() { "0".into() } else { terms.join(" + ") };
            formulas.push(format!("Psi(b{}(x)b{}) = {rhs}", i + 1, j + 1));
        }
    }
    let braid = psi.satisfies_braid_equation();
    let invertible = psi.is_invertible()?;
    if !braid {
        report.failures.push("braid equation".into());
    }
    if !invertible {
        report.failures.push("Psi is not invertible".into());
    }
    report.braiding = Some(BraidingSection {
        matrix: strings(&psi.entries),
        formulas,
        invertible,
        braid_equation: braid,
        minimal_polynomial: psi.minimal_polynomial()?.iter().map(|c| c.to_string()).collect(),
        hecke: psi.hecke()?.map(|h| (h.alpha.to_string(), h.beta.to_string())),
    });

    for n in 0..=max_degree {
        let bn = alg.compute_Bn(&b1, n)?;
        let c = &bn.certificate;
        let pairing_rank = if alg.sub().ambient.dot.iter().enumerate().all(|(i, r)| r[i] == 2) {
            Some(alg.pairing_rank(&bn.basis)?)
        } else {
            None
        };
        if pairing_rank.is_some_and(|r| r != bn.basis.dim()) {
            report.failures.push(format!("pairing degenerate on B_{n}"));
        }
        report.hilbert_series.push(bn.basis.dim());
        report.degrees.push(DegreeEntry {
            degree: n,
            dim: bn.basis.dim(),
            basis: bn.basis.vectors.iter().map(|b| eng.format(&b.value)).collect(),
            products_dim: c.products_dim,
            coinvariant_dim: c.coinvariant_dim,
            pbw_count: c.pbw_count,
            agree: c.agree(),
            pairing_rank,
        });
        if n >= 2 {
            let rel = alg.relations_at_degree(&b1, n)?;
            report.relations.push(RelationsEntry {
                degree: n,
                relations: rel
                    .iter()
                    .map(|r| {
                        r.terms
                            .iter()
                            .map(|(w, c)| {
                                let word: Vec<String> = w.iter().map(|i| format!("b{}", i + 1)).collect();
                                format!("({c})*{}", word.join("*"))
                            })
                            .collect::<Vec<_>>()
                            .join(" + ")
                    })
                    .collect(),
            });
            let p = alg.primitives(&bn.basis)?;
            report.primitive_dims.push((n, p.len()));
        }
    }

    let nichols = alg.nichols_check(&b1, max_degree)?;
    if !nichols.passed() {
        report.failures.push("Nichols check".into());
    }
    report.nichols = Some(NicholsSection {
        passed: nichols.passed(),
        b0_is_field: nichols.b0_is_field,
        primitive_dims: nichols.primitive_dims.clone(),
        generated: nichols.generated.clone(),
        witness: nichols.witness.clone(),
    });
    Ok(())
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = self.write_text(&mut s);
        s
    }

    fn write_text(&self, s: &mut String) -> std::fmt::Result {
        writeln!(s, "ambient I = {:?}, J = {:?}, iota = {:?}", self.ambient, self.sub, self.iota)?;
        writeln!(s, "deleted D = {:?}", self.deleted)?;
        writeln!(s, "status: {}{}", self.status, if self.partial { " [PARTIAL]" } else { "" })?;
        if let Some(v) = &self.validation {
            writeln!(s, "validation: {}", if v.passed { "ok" } else { "FAIL" })?;
            for c in &v.conditions {
                write!(s, "  ({}) {} {}", c.id, if c.passed { "ok" } else { "FAIL" }, c.description)?;
                if let Some(w) = &c.witness {
                    write!(s, ": {w}")?;
                }
                writeln!(s)?;
            }
        }
        writeln!(s, "corank: {}", self.corank)?;
        match self.index {
            Some(i) => writeln!(s, "index: {i}")?,
            None => writeln!(s, "index: not determined")?,
        }
        if !self.b1_basis.is_empty() {
            writeln!(s, "B1 basis:")?;
            for (i, b) in self.b1_basis.iter().enumerate() {
                writeln!(s, "  b{} = {b}", i + 1)?;
            }
        }
        for m in &self.modules {
            writeln!(
                s,
                "V(lambda'_{}): dim {}, highest weight {:?}{}",
                m.node,
                m.dim,
                m.highest_weight,
                if m.dominant { "" } else { " (not dominant)" }
            )?;
        }
        if !self.action_table.is_empty() {
            writeln!(s, "action table (column c = image of b_c):")?;
            for a in &self.action_table {
                writeln!(s, "  Ad_{}:", a.generator)?;
                for r in &a.matrix {
                    writeln!(s, "    [{}]", r.join(", "))?;
                }
            }
        }
        if let Some(b) = &self.braiding {
            writeln!(s, "braiding:")?;
            for f in &b.formulas {
                writeln!(s, "  {f}")?;
            }
            writeln!(s, "  invertible: {}, braid equation: {}", b.invertible, b.braid_equation)?;
            writeln!(s, "  minimal polynomial (constant term first): [{}]", b.minimal_polynomial.join(", "))?;
            if let Some((a, c)) = &b.hecke {
                writeln!(s, "  Hecke: (Psi - ({a}))(Psi + ({c})) = 0")?;
            }
        }
        if !self.hilbert_series.is_empty() {
            writeln!(s, "Hilbert series: {:?}", self.hilbert_series)?;
        }
        for d in &self.degrees {
            writeln!(
                s,
                "B_{}: dim {} (products {}, coinvariants {}, PBW {}, {}){}",
                d.degree,
                d.dim,
                d.products_dim,
                d.coinvariant_dim,
                d.pbw_count.map_or("-".into(), |c| c.to_string()),
                if d.agree { "agree" } else { "DISAGREE" },
                d.pairing_rank.map_or(String::new(), |r| format!(", pairing rank {r}"))
            )?;
        }
        for r in &self.relations {
            writeln!(s, "relations in degree {}: {}", r.degree, r.relations.len())?;
            for x in &r.relations {
                writeln!(s, "  {x} = 0")?;
            }
        }
        for (n, p) in &self.primitive_dims {
            writeln!(s, "primitives in degree {n}: {p}")?;
        }
        if let Some(n) = &self.nichols {
            writeln!(s, "Nichols check: {}", if n.passed { "pass" } else { "FAIL" })?;
            if let Some(w) = &n.witness {
                writeln!(s, "  witness: {w}")?;
            }
        }
        if let Some(z) = &self.zero_component {
            writeln!(s, "zero component: {}", if z.passed { "ok" } else { "FAIL" })?;
            for a in &z.actions {
                writeln!(s, "  {a}")?;
            }
        }
        for f in &self.failures {
            writeln!(s, "FAILURE: {f}")?;
        }
        Ok(())
    }
}
