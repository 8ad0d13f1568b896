//! Root data `(I, ., Y, X, <,>, i1, i2)`, sub-root data and the lattice maps
//! that drive the grading.
//!
//! Lattices are `Z^rank` with fixed standard bases; the pairing is stored as
//! the Gram matrix `pairing[a][b] = <y_a, x_b>`. Maps between lattices are
//! stored as lists of images of basis vectors.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snf::{self, IMat};

/// A root datum. Field names follow the on-disk JSON schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootDatum {
    #[serde(rename = "I")]
    pub names: Vec<String>,
    pub dot: IMat,
    #[serde(rename = "rankY")]
    pub rank_y: usize,
    #[serde(rename = "rankX")]
    pub rank_x: usize,
    pub pairing: IMat,
    pub i1: Vec<Vec<i64>>,
    pub i2: Vec<Vec<i64>>,
}

/// Which flavour of type-A datum [`RootDatum::type_a`] builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeA {
    /// `Y` = coroot lattice, `X` = weight lattice, both of rank `n`.
    SimplyConnected,
    /// The `GL_{n+1}` datum: `Y = X = Z^{n+1}`, `i1(i) = i2(i) = e_i - e_{i+1}`.
    GeneralLinear,
}

impl RootDatum {
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Symmetrizer `c_i = (i.i)/2`.
    pub fn c(&self, i: usize) -> u32 {
        (self.dot[i][i] / 2) as u32
    }

    /// Cartan matrix entry `C_ij = 2 (i.j) / (i.i)`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        2 * self.dot[i][j] / self.dot[i][i]
    }

    pub fn cartan_matrix(&self) -> IMat {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| self.cartan(i, j)).collect())
            .collect()
    }

    /// `<y, x>` for `y` in `Y`, `x` in `X`.
    pub fn pair(&self, y: &[i64], x: &[i64]) -> i64 {
        let mut s = 0;
        for (a, ya) in y.iter().enumerate() {
            if *ya == 0 {
                continue;
            }
            for (b, xb) in x.iter().enumerate() {
                s += ya * self.pairing[a][b] * xb;
            }
        }
        s
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Standard type-A datum of rank `n`.
    pub fn type_a(n: usize, flavour: TypeA) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("type A needs rank n >= 1".into()));
        }
        let names = (1..=n).map(|i| i.to_string()).collect();
        let dot: IMat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        let d = match flavour {
            TypeA::SimplyConnected => {
                let i1 = snf::identity(n);
                // i2(j) = alpha_j written in fundamental weights = column j of C
                let i2 = (0..n).map(|j| (0..n).map(|i| dot[i][j]).collect()).collect();
                RootDatum {
                    names,
                    dot,
                    rank_y: n,
                    rank_x: n,
                    pairing: snf::identity(n),
                    i1,
                    i2,
                }
            }
            TypeA::GeneralLinear => {
                let simple: Vec<Vec<i64>> = (0..n)
                    .map(|i| {
                        let mut v = vec![0; n + 1];
                        v[i] = 1;
                        v[i + 1] = -1;
                        v
                    })
                    .collect();
                RootDatum {
                    names,
                    dot,
                    rank_y: n + 1,
                    rank_x: n + 1,
                    pairing: snf::identity(n + 1),
                    i1: simple.clone(),
                    i2: simple,
                }
            }
        };
        d.check()?;
        Ok(d)
    }

    /// The empty root datum (no simple roots, zero lattices).
    pub fn empty() -> Self {
        RootDatum {
            names: Vec::new(),
            dot: Vec::new(),
            rank_y: 0,
            rank_x: 0,
            pairing: Vec::new(),
            i1: Vec::new(),
            i2: Vec::new(),
        }
    }

    /// Checks the datum's own invariants.
    pub fn check(&self) -> Result<()> {
        let n = self.rank();
        let bad = |m: String| Err(Error::Input(m));
        if self.dot.len() != n || self.dot.iter().any(|r| r.len() != n) {
            return bad(format!("dot must be {n}x{n}"));
        }
        if self.i1.len() != n || self.i2.len() != n {
            return bad("i1 and i2 need one vector per index".into());
        }
        if self.i1.iter().any(|v| v.len() != self.rank_y) {
            return bad(format!("i1 vectors must have length rankY = {}", self.rank_y));
        }
        if self.i2.iter().any(|v| v.len() != self.rank_x) {
            return bad(format!("i2 vectors must have length rankX = {}", self.rank_x));
        }
        if self.pairing.len() != self.rank_y
            || self.pairing.iter().any(|r| r.len() != self.rank_x)
        {
            return bad("pairing must be rankY x rankX".into());
        }
        let distinct: BTreeSet<_> = self.names.iter().collect();
        if distinct.len() != n {
            return bad("index names must be distinct".into());
        }
        for i in 0..n {
            let d = self.dot[i][i];
            if d <= 0 || d % 2 != 0 {
                return bad(format!("i.i must be a positive even integer (index {i})"));
            }
            for j in 0..n {
                if self.dot[i][j] != self.dot[j][i] {
                    return bad("dot must be symmetric".into());
                }
                if (2 * self.dot[i][j]) % d != 0 {
                    return bad(format!("Cartan entry C[{i}][{j}] is not an integer"));
                }
                if i != j && self.dot[i][j] > 0 {
                    return bad(format!("off-diagonal Cartan entry C[{i}][{j}] is positive"));
                }
                let p = self.pair(&self.i1[i], &self.i2[j]);
                if p != self.cartan(i, j) {
                    return bad(format!(
                        "<i1({i}), i2({j})> = {p} but C[{i}][{j}] = {}",
                        self.cartan(i, j)
                    ));
                }
            }
        }
        if self.rank_y != self.rank_x {
            return bad("a perfect pairing needs rankY = rankX".into());
        }
        if self.rank_y > 0 && snf::abs_det(&self.pairing, self.rank_y) != 1 {
            return bad("pairing is not perfect (determinant is not +-1)".into());
        }
        Ok(())
    }

    /// `{i1(i)}` is linearly independent in `Y`.
    pub fn is_y_regular(&self) -> bool {
        snf::rank_of_rows(&self.i1) == self.rank()
    }

    /// `lambda` is `S`-dominant: `<i1(s), lambda>` is a natural number for all `s`.
    pub fn is_dominant(&self, lambda: &[i64], subset: &[usize]) -> Result<bool> {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&s| self.i1[s].clone()).collect();
        if snf::rank_of_rows(&rows) != subset.len() {
            return Err(Error::Input(
                "dominance needs a subset with linearly independent i1-images".into(),
            ));
        }
        Ok(subset.iter().all(|&s| self.pair(&self.i1[s], lambda) >= 0))
    }

    /// `wt2(nu) = sum_i nu_i i2(i)` for a multidegree `nu` over `I`.
    pub fn wt2(&self, nu: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.rank_x];
        for (i, &m) in nu.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(&self.i2[i]) {
                *o += m * x;
            }
        }
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: RootDatum =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("root datum: {e}")))?;
        d.check()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Direct sum; `other`'s names are primed if they clash.
    pub fn direct_sum(&self, other: &RootDatum) -> RootDatum {
        let mut names = self.names.clone();
        for n in &other.names {
            let mut cand = n.clone();
            while names.contains(&cand) || self.names.contains(&cand) {
                cand.push('\'');
            }
            names.push(cand);
        }
        let (n1, n2) = (self.rank(), other.rank());
        let block = |a: &IMat, b: &IMat, r1: usize, c1: usize, r2: usize, c2: usize| -> IMat {
            let mut m = vec![vec![0; c1 + c2]; r1 + r2];
            for i in 0..r1 {
                m[i][..c1].copy_from_slice(&a[i][..c1]);
            }
            for i in 0..r2 {
                m[r1 + i][c1..].copy_from_slice(&b[i][..c2]);
            }
            m
        };
        let pad = |v: &Vec<Vec<i64>>, before: usize, after: usize| -> Vec<Vec<i64>> {
            v.iter()
                .map(|x| {
                    let mut o = vec![0; before];
                    o.extend_from_slice(x);
                    o.extend(std::iter::repeat_n(0, after));
                    o
                })
                .collect()
        };
        let mut i1 = pad(&self.i1, 0, other.rank_y);
        i1.extend(pad(&other.i1, self.rank_y, 0));
        let mut i2 = pad(&self.i2, 0, other.rank_x);
        i2.extend(pad(&other.i2, self.rank_x, 0));
        RootDatum {
            names,
            dot: block(&self.dot, &other.dot, n1, n1, n2, n2),
            rank_y: self.rank_y + other.rank_y,
            rank_x: self.rank_x + other.rank_x,
            pairing: block(
                &self.pairing,
                &other.pairing,
                self.rank_y,
                self.rank_x,
                other.rank_y,
                other.rank_x,
            ),
            i1,
            i2,
        }
    }
}

impl fmt::Display for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root datum on {{{}}} (rank Y = {}, rank X = {})",
            self.names.join(", "),
            self.rank_y,
            self.rank_x
        )
    }
}

/// A sub-root datum `sub -> ambient` via `iota`, with lattice embeddings and
/// a fixed complement `X''` of `X' = sX(X')` in `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubRootDatum {
    pub ambient: RootDatum,
    pub sub: RootDatum,
    /// `iota[j]` is the ambient index of sub index `j`.
    pub iota: Vec<usize>,
    /// Images of the basis of `Y'` in `Y`.
    pub s_y: Vec<Vec<i64>>,
    /// Images of the basis of `X'` in `X`.
    pub s_x: Vec<Vec<i64>>,
    /// Basis of `X''`.
    pub xpp: Vec<Vec<i64>>,
}

/// Outcome of one of the six embedding conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub id: &'static str,
    pub description: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failed_ids(&self) -> Vec<&'static str> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id)
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            write!(
                f,
                "({:>3}) {:<4} {}",
                c.id,
                if c.passed { "ok" } else { "FAIL" },
                c.description
            )?;
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn columns(vs: &[Vec<i64>], n: usize) -> IMat {
    (0..n).map(|i| vs.iter().map(|v| v[i]).collect()).collect()
}

impl SubRootDatum {
    /// Assembles a sub-root datum. When `xpp` is `None`, `X''` is taken to be
    /// the annihilator of `sY(Y')`, computed by Smith normal form.
    pub fn new(
        ambient: RootDatum,
        sub: RootDatum,
        iota: Vec<usize>,
        s_y: Vec<Vec<i64>>,
        s_x: Vec<Vec<i64>>,
        xpp: Option<Vec<Vec<i64>>>,
    ) -> Result<Self> {
        if iota.len() != sub.rank() {
            return Err(Error::Input("iota needs one entry per sub index".into()));
        }
        if iota.iter().any(|&i| i >= ambient.rank()) {
            return Err(Error::Input("iota maps outside the ambient index set".into()));
        }
        if s_y.len() != sub.rank_y || s_y.iter().any(|v| v.len() != ambient.rank_y) {
            return Err(Error::Input("sY must list rankY' images of length rankY".into()));
        }
        if s_x.len() != sub.rank_x || s_x.iter().any(|v| v.len() != ambient.rank_x) {
            return Err(Error::Input("sX must list rankX' images of length rankX".into()));
        }
        let xpp = match xpp {
            Some(x) => {
                if x.iter().any(|v| v.len() != ambient.rank_x) {
                    return Err(Error::Input("Xpp vectors must have length rankX".into()));
                }
                x
            }
            None => annihilator(&ambient, &s_y),
        };
        Ok(Self {
            ambient,
            sub,
            iota,
            s_y,
            s_x,
            xpp,
        })
    }

    /// The identity embedding of a datum in itself.
    pub fn identity(d: &RootDatum) -> Self {
        let n = d.rank();
        Self {
            ambient: d.clone(),
            sub: d.clone(),
            iota: (0..n).collect(),
            s_y: snf::identity(d.rank_y),
            s_x: snf::identity(d.rank_x),
            xpp: Vec::new(),
        }
    }

    /// `t` and `j` as sub-root data of `t (+) j`.
    pub fn direct_sum_pair(t: &RootDatum, j: &RootDatum) -> (Self, Self) {
        let sum = t.direct_sum(j);
        let emb = |d: &RootDatum, off_i: usize, off_y: usize, off_x: usize| {
            let unit = |len: usize, k: usize| {
                let mut v = vec![0; len];
                v[k] = 1;
                v
            };
            let s_y: Vec<Vec<i64>> = (0..d.rank_y).map(|k| unit(sum.rank_y, off_y + k)).collect();
            let s_x: Vec<Vec<i64>> = (0..d.rank_x).map(|k| unit(sum.rank_x, off_x + k)).collect();
            let xpp: Vec<Vec<i64>> = (0..sum.rank_x)
                .filter(|k| *k < off_x || *k >= off_x + d.rank_x)
                .map(|k| unit(sum.rank_x, k))
                .collect();
            SubRootDatum {
                ambient: sum.clone(),
                sub: d.clone(),
                iota: (0..d.rank()).map(|k| off_i + k).collect(),
                s_y,
                s_x,
                xpp,
            }
        };
        (
            emb(t, 0, 0, 0),
            emb(j, t.rank(), t.rank_y, t.rank_x),
        )
    }

    /// Deleted nodes `D = I \ iota(J)`, ascending.
    pub fn deleted(&self) -> Vec<usize> {
        (0..self.ambient.rank())
            .filter(|i| !self.iota.contains(i))
            .collect()
    }

    /// Ambient indices of `iota(J)`, ascending.
    pub fn kept(&self) -> Vec<usize> {
        let mut k = self.iota.clone();
        k.sort_unstable();
        k
    }

    pub fn in_deleted(&self, i: usize) -> bool {
        !self.iota.contains(&i)
    }

    /// `chi_D` degree of a word over `I`.
    pub fn chi(&self, word: &[usize]) -> usize {
        word.iter().filter(|&&i| self.in_deleted(i)).count()
    }

    pub fn corank(&self) -> usize {
        self.deleted().len()
    }

    /// Restriction `rho: X -> X'` through the fixed splitting `X = X' (+) X''`.
    pub fn rho(&self, lambda: &[i64]) -> Result<Vec<i64>> {
        let n = self.ambient.rank_x;
        let mut basis = self.s_x.clone();
        basis.extend(self.xpp.iter().cloned());
        if basis.len() != n {
            return Err(Error::Input("X' and X'' do not have complementary ranks".into()));
        }
        let m = columns(&basis, n);
        let coords = snf::solve_integral(&m, lambda)
            .ok_or_else(|| Error::Input("X' (+) X'' is not a basis of X".into()))?;
        Ok(coords[..self.sub.rank_x].to_vec())
    }

    /// Runs the six embedding conditions.
    pub fn validate(&self) -> ValidationReport {
        let t = &self.ambient;
        let j = &self.sub;
        let mut conditions = Vec::with_capacity(6);
        let mut push = |id, description, witness: Option<String>| {
            conditions.push(ConditionResult {
                id,
                description,
                passed: witness.is_none(),
                witness,
            })
        };

        // (i)
        let mut seen = BTreeSet::new();
        let dup = self.iota.iter().find(|i| !seen.insert(**i));
        push(
            "i",
            "iota is injective",
            dup.map(|i| format!("ambient index {} is hit twice", t.names[*i])),
        );

        // (ii)
        let mut w = None;
        'outer: for a in 0..j.rank() {
            for b in 0..j.rank() {
                let (ia, ib) = (self.iota[a], self.iota[b]);
                if j.dot[a][b] != t.dot[ia][ib] {
                    w = Some(format!(
                        "{}.{} = {} but {}.{} = {}",
                        j.names[a], j.names[b], j.dot[a][b], t.names[ia], t.names[ib], t.dot[ia][ib]
                    ));
                    break 'outer;
                }
            }
        }
        push("ii", "the form restricts to the sub form", w);

        // (iii)
        let sy = columns(&self.s_y, t.rank_y);
        let sx = columns(&self.s_x, t.rank_x);
        let mut w = None;
        for (name, m, rows, cols) in [
            ("sY", &sy, t.rank_y, j.rank_y),
            ("sX", &sx, t.rank_x, j.rank_x),
        ] {
            if cols == 0 {
                continue;
            }
            let s = snf::smith(m, rows, cols);
            if s.divisors.len() != cols {
                w = Some(format!("{name} is not injective (rank {} < {cols})", s.divisors.len()));
                break;
            }
            if let Some(d) = s.divisors.iter().find(|&&d| d != 1) {
                w = Some(format!("{name} has elementary divisor {d}; the quotient has torsion"));
                break;
            }
        }
        push("iii", "sY, sX injective with free quotients", w);

        // (iv)
        let mut w = None;
        'iv: for a in 0..j.rank_y {
            for b in 0..j.rank_x {
                let v = t.pair(&self.s_y[a], &self.s_x[b]);
                if v != j.pairing[a][b] {
                    w = Some(format!(
                        "<sY(y{a}), sX(x{b})> = {v} but <y{a}, x{b}>' = {}",
                        j.pairing[a][b]
                    ));
                    break 'iv;
                }
            }
        }
        push("iv", "the pairing restricts to the sub pairing", w);

        // (v)
        let mut w = None;
        let mut basis = self.s_x.clone();
        basis.extend(self.xpp.iter().cloned());
        if basis.len() != t.rank_x {
            w = Some(format!(
                "rank X' + rank X'' = {} but rank X = {}",
                basis.len(),
                t.rank_x
            ));
        } else if t.rank_x > 0 && snf::abs_det(&columns(&basis, t.rank_x), t.rank_x) != 1 {
            w = Some("X' + X'' is not all of X (determinant is not +-1)".into());
        } else {
            'v: for (a, y) in self.s_y.iter().enumerate() {
                for (b, x) in self.xpp.iter().enumerate() {
                    let v = t.pair(y, x);
                    if v != 0 {
                        w = Some(format!("<sY(y{a}), x''{b}> = {v}"));
                        break 'v;
                    }
                }
            }
        }
        push("v", "X = X' (+) X'' with X'' orthogonal to sY(Y')", w);

        // (vi)
        let mut w = None;
        let apply = |imgs: &[Vec<i64>], v: &[i64], len: usize| {
            let mut out = vec![0; len];
            for (k, &c) in v.iter().enumerate() {
                for (o, x) in out.iter_mut().zip(&imgs[k]) {
                    *o += c * x;
                }
            }
            out
        };
        for a in 0..j.rank() {
            let ia = self.iota[a];
            if ia >= t.rank() {
                continue;
            }
            if apply(&self.s_y, &j.i1[a], t.rank_y) != t.i1[ia] {
                w = Some(format!("sY(i1'({})) != i1({})", j.names[a], t.names[ia]));
                break;
            }
            if apply(&self.s_x, &j.i2[a], t.rank_x) != t.i2[ia] {
                w = Some(format!("sX(i2'({})) != i2({})", j.names[a], t.names[ia]));
                break;
            }
        }
        push("vi", "sY.i1' = i1.iota and sX.i2' = i2.iota", w);

        ValidationReport { conditions }
    }

    /// Parses a sub-root datum file; datum references are resolved relative
    /// to `base`.
    pub fn from_json(s: &str, base: Option<&Path>) -> Result<Self> {
        let f: SubRootDatumFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("sub-root datum: {e}")))?;
        let load = |r: &DatumRef| -> Result<RootDatum> {
            match r {
                DatumRef::Inline(d) => {
                    d.check()?;
                    Ok((**d).clone())
                }
                DatumRef::Path(p) => {
                    let path = match base {
                        Some(b) => b.join(p),
                        None => p.into(),
                    };
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::Input(format!("cannot read {}: {e}", path.display()))
                    })?;
                    RootDatum::from_json(&text)
                }
            }
        };
        let ambient = load(&f.ambient)?;
        let sub = load(&f.sub)?;
        let iota = f
            .iota
            .iter()
            .map(|n| {
                ambient
                    .index_of(n)
                    .ok_or_else(|| Error::Input(format!("iota names unknown index {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SubRootDatum::new(ambient, sub, iota, f.s_y, f.s_x, f.xpp)
    }

    pub fn to_json(&self) -> String {
        let f = SubRootDatumFile {
            ambient: DatumRef::Inline(Box::new(self.ambient.clone())),
            sub: DatumRef::Inline(Box::new(self.sub.clone())),
            iota: self
                .iota
                .iter()
                .map(|&i| self.ambient.names[i].clone())
                .collect(),
            s_y: self.s_y.clone(),
            s_x: self.s_x.clone(),
            xpp: Some(self.xpp.clone()),
        };
        serde_json::to_string_pretty(&f).expect("serializable")
    }
}

/// `{x in X : <sY(y'), x> = 0 for all y'}`, a saturated sublattice.
fn annihilator(t: &RootDatum, s_y: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = t.rank_x;
    if s_y.is_empty() {
        return snf::identity(n);
    }
    // rows: the functionals x -> <sY(y_a), x>
    let a: IMat = s_y
        .iter()
        .map(|y| {
            (0..n)
                .map(|b| y.iter().enumerate().map(|(k, yk)| yk * t.pairing[k][b]).sum())
                .collect()
        })
        .collect();
    let s = snf::smith(&a, s_y.len(), n);
    let r = s.divisors.len();
    (r..n).map(|j| (0..n).map(|i| s.v[i][j]).collect()).collect()
}

/// On-disk form of a sub-root datum.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubRootDatumFile {
    pub ambient: DatumRef,
    pub sub: DatumRef,
    /// Ambient index names, one per sub index, in sub order.
    pub iota: Vec<String>,
    #[serde(rename = "sY")]
    pub s_y: Vec<Vec<i64>>,
    #[serde(rename = "sX")]
    pub s_x: Vec<Vec<i64>>,
    #[serde(rename = "Xpp", default, skip_serializing_if = "Option::is_none")]
    pub xpp: Option<Vec<Vec<i64>>>,
}

/// A datum given either as a file path or inline.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatumRef {
    Path(String),
    Inline(Box<RootDatum>),
}

/// `A_{m} (GL_{m+1})` inside `A_{n} (GL_{n+1})` on the first `m` nodes.
pub fn gl_leading_block(m: usize, n: usize) -> Result<SubRootDatum> {
    if m > n {
        return Err(Error::Input("sub rank exceeds ambient rank".into()));
    }
    let t = RootDatum::type_a(n, TypeA::GeneralLinear)?;
    let j = if m == 0 {
        RootDatum::empty()
    } else {
        RootDatum::type_a(m, TypeA::GeneralLinear)?
    };
    let unit = |k: usize| {
        let mut v = vec![0; n + 1];
        v[k] = 1;
        v
    };
    let (s_y, s_x): (Vec<_>, Vec<_>) = (0..j.rank_y).map(|k| (unit(k), unit(k))).unzip();
    SubRootDatum::new(t, j, (0..m).collect(), s_y, s_x, None)
}

/// The empty sub-root datum `J = {}` of `t` (every node deleted).
pub fn empty_sub(t: &RootDatum) -> SubRootDatum {
    SubRootDatum {
        ambient: t.clone(),
        sub: RootDatum::empty(),
        iota: Vec::new(),
        s_y: Vec::new(),
        s_x: Vec::new(),
        xpp: snf::identity(t.rank_x),
    }
}

/// Positive roots (in simple-root coordinates) of the Cartan matrix `c`, by
/// root strings. Returns `None` if some root exceeds `max_height`, which is
/// how infinite (non-finite-type) root systems show up.
pub fn positive_roots(c: &IMat, max_height: usize) -> Option<Vec<Vec<i64>>> {
    let n = c.len();
    let mut roots: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect();
    let mut known: BTreeSet<Vec<i64>> = roots.iter().cloned().collect();
    let mut layer = roots.clone();
    let mut height = 1;
    while !layer.is_empty() {
        if height >= max_height {
            return None;
        }
        let mut next = Vec::new();
        for beta in &layer {
            for i in 0..n {
                // beta - p alpha_i, ..., beta is the bottom of the i-string
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if known.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pair: i64 = (0..n).map(|j| beta[j] * c[i][j]).sum();
                if p - pair > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if known.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        roots.extend(next.iter().cloned());
        layer = next;
        height += 1;
    }
    roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
    Some(roots)
}

/// Number of ways to write `nu` as an unordered sum of the given roots.
pub fn kostant_count(roots: &[Vec<i64>], nu: &[u32]) -> u64 {
    let n = nu.len();
    let mut stride = vec![1usize; n + 1];
    for i in 0..n {
        stride[i + 1] = stride[i] * (nu[i] as usize + 1);
    }
    let size = stride[n];
    let mut dp = vec![0u64; size];
    dp[0] = 1;
    for r in roots {
        if r.iter().zip(nu).any(|(&a, &b)| a < 0 || a > b as i64) {
            continue;
        }
        let off: usize = (0..n).map(|i| r[i] as usize * stride[i]).sum();
        // ascending order lets each root be reused
        for idx in 0..size {
            let fits = (0..n).all(|i| (idx / stride[i]) % (nu[i] as usize + 1) + r[i] as usize <= nu[i] as usize);
            if fits && dp[idx] != 0 {
                dp[idx + off] += dp[idx];
            }
        }
    }
    dp[size - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2_in_a3() -> SubRootDatum {
        gl_leading_block(2, 3).unwrap()
    }

    #[test]
    fn type_a_cartan() {
        let a1 = RootDatum::type_a(1, TypeA::SimplyConnected).unwrap();
        assert_eq!(a1.cartan_matrix(), vec![vec![2]]);
        let a3 = RootDatum::type_a(3, TypeA::SimplyConnected).unwrap();
        assert_eq!(
            a3.cartan_matrix(),
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]
        );
        let g3 = RootDatum::type_a(3, TypeA::GeneralLinear).unwrap();
        assert_eq!(g3.cartan_matrix(), a3.cartan_matrix());
        assert!(RootDatum::type_a(0, TypeA::SimplyConnected).is_err());
    }

    #[test]
    fn leading_block_passes() {
        let s = a2_in_a3();
        let r = s.validate();
        assert!(r.passed(), "{r}");
        assert_eq!(s.deleted(), vec![2]);
        assert_eq!(s.xpp, vec![vec![0, 0, 0, 1]]);
    }

    #[test]
    fn simply_connected_a2_does_not_embed() {
        // sX(i2') = i2.iota would need a non-integral image of a fundamental weight.
        let t = RootDatum::type_a(3, TypeA::SimplyConnected).unwrap();
        let j = RootDatum::type_a(2, TypeA::SimplyConnected).unwrap();
        let s = SubRootDatum::new(
            t,
            j,
            vec![0, 1],
            vec![vec![1, 0, 0], vec![0, 1, 0]],
            vec![vec![1, 0, 0], vec![0, 1, 0]],
            None,
        )
        .unwrap();
        assert_eq!(s.validate().failed_ids(), vec!["vi"]);
    }

    #[test]
    fn identity_embedding_passes() {
        for flavour in [TypeA::SimplyConnected, TypeA::GeneralLinear] {
            let d = RootDatum::type_a(3, flavour).unwrap();
            let s = SubRootDatum::identity(&d);
            assert!(s.validate().passed());
            assert!(s.xpp.is_empty());
            assert!(s.deleted().is_empty());
        }
    }

    #[test]
    fn doubled_sy_fails_condition_iii() {
        let mut s = a2_in_a3();
        for v in s.s_y.iter_mut() {
            for x in v.iter_mut() {
                *x *= 2;
            }
        }
        let r = s.validate();
        assert!(r.failed_ids().contains(&"iii"));
        let w = r.conditions[2].witness.as_ref().unwrap();
        assert!(w.contains("elementary divisor 2"), "{w}");
    }

    #[test]
    fn direct_sums() {
        let a1 = RootDatum::type_a(1, TypeA::SimplyConnected).unwrap();
        let s = a1.direct_sum(&a1);
        assert_eq!(s.cartan_matrix(), vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(s.names, vec!["1".to_string(), "1'".to_string()]);
        s.check().unwrap();

        let a2 = RootDatum::type_a(2, TypeA::SimplyConnected).unwrap();
        let (left, right) = SubRootDatum::direct_sum_pair(&a2, &a1);
        assert!(left.validate().passed());
        assert!(right.validate().passed());
        // <y1 + y2, x1 + x2> = <y1, x1> + <y2, x2>'
        let sum = &left.ambient;
        let y = [1, -2, 3];
        let x = [2, 5, -1];
        assert_eq!(sum.pair(&y, &x), a2.pair(&y[..2], &x[..2]) + a1.pair(&y[2..], &x[2..]));
    }

    #[test]
    fn rho_and_dominance() {
        let s = a2_in_a3();
        let t = &s.ambient;
        // rho is the identity on X'
        for v in &s.s_x {
            let img = s.rho(v).unwrap();
            let back: Vec<i64> = (0..t.rank_x)
                .map(|i| img.iter().zip(&s.s_x).map(|(c, b)| c * b[i]).sum())
                .collect();
            assert_eq!(&back, v);
        }
        for v in &s.xpp {
            assert!(s.rho(v).unwrap().iter().all(|&c| c == 0));
        }
        let minus_alpha3: Vec<i64> = t.i2[2].iter().map(|x| -x).collect();
        assert!(!t.is_dominant(&minus_alpha3, &[0, 1, 2]).unwrap());
        assert_eq!(t.pair(&t.i1[2], &minus_alpha3), -2);
        let r = s.rho(&minus_alpha3).unwrap();
        assert!(s.sub.is_dominant(&r, &[0, 1]).unwrap());
        assert!(t.is_dominant(&vec![0; 4], &[0, 1, 2]).unwrap());
        // <mu', rho(lambda)>' = <sY(mu'), lambda>
        for (a, y) in s.s_y.iter().enumerate() {
            let mut e = vec![0; s.sub.rank_y];
            e[a] = 1;
            assert_eq!(s.sub.pair(&e, &r), t.pair(y, &minus_alpha3));
        }
    }

    #[test]
    fn dependent_subset_is_rejected() {
        let mut d = RootDatum::type_a(2, TypeA::GeneralLinear).unwrap();
        d.i1[1] = d.i1[0].clone();
        assert!(d.is_dominant(&[0, 0, 0], &[0, 1]).is_err());
    }

    #[test]
    fn positive_roots_of_small_types() {
        let a3 = RootDatum::type_a(3, TypeA::SimplyConnected).unwrap();
        let r = positive_roots(&a3.cartan_matrix(), 20).unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.contains(&vec![1, 1, 1]));
        let b2 = vec![vec![2, -2], vec![-1, 2]];
        assert_eq!(positive_roots(&b2, 20).unwrap().len(), 4);
        let g2 = vec![vec![2, -1], vec![-3, 2]];
        assert_eq!(positive_roots(&g2, 20).unwrap().len(), 6);
        let affine = vec![vec![2, -2], vec![-2, 2]];
        assert!(positive_roots(&affine, 20).is_none());
    }

    #[test]
    fn kostant_counts() {
        let a2 = positive_roots(&vec![vec![2, -1], vec![-1, 2]], 10).unwrap();
        assert_eq!(kostant_count(&a2, &[1, 1]), 2);
        assert_eq!(kostant_count(&a2, &[2, 1]), 2);
        assert_eq!(kostant_count(&a2, &[2, 2]), 3);
        let a3 = positive_roots(&vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]], 10).unwrap();
        assert_eq!(kostant_count(&a3, &[1, 1, 1]), 4);
        assert_eq!(kostant_count(&a3, &[0, 0, 0]), 1);
    }

    #[test]
    fn chi_counts_deleted_letters() {
        let s = a2_in_a3();
        assert_eq!(s.chi(&[]), 0);
        assert_eq!(s.chi(&[2]), 1);
        assert_eq!(s.chi(&[0, 2, 1, 2]), 2);
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let s = a2_in_a3();
        let back = SubRootDatum::from_json(&s.to_json(), None).unwrap();
        assert_eq!(back, s);
        let d = RootDatum::type_a(2, TypeA::GeneralLinear).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        v["extra"] = 1.into();
        assert!(RootDatum::from_json(&v.to_string()).is_err());
    }
}
