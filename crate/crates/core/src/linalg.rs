//! Sparse linear algebra over `Q(q)`: incremental echelon forms that remember
//! how each reduced row was built from the inserted vectors.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::qfield::RatQ;

pub type SparseVec<K> = BTreeMap<K, RatQ>;

pub fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &RatQ, x: &SparseVec<K>) {
    if a.is_zero() {
        return;
    }
    for (k, v) in x {
        let t = a * v;
        match y.get_mut(k) {
            Some(s) => {
                *s = &*s + &t;
                if s.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                y.insert(k.clone(), t);
            }
        }
    }
}

pub fn scale<K: Ord + Clone>(x: &SparseVec<K>, a: &RatQ) -> SparseVec<K> {
    if a.is_zero() {
        return SparseVec::new();
    }
    x.iter().map(|(k, v)| (k.clone(), v * a)).collect()
}

/// Result of reducing a vector against an [`Echelon`].
#[derive(Clone, Debug)]
pub struct Reduction<K> {
    pub residual: SparseVec<K>,
    /// `v = residual + sum comb[j] * inserted[j]`.
    pub comb: SparseVec<usize>,
}

#[derive(Clone, Debug)]
struct Row<K> {
    pivot: K,
    vec: SparseVec<K>,
    /// The row as a combination of inserted vectors.
    comb: SparseVec<usize>,
}

/// Incremental row echelon form.
#[derive(Clone, Debug)]
pub struct Echelon<K> {
    rows: Vec<Row<K>>,
    inserted: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self {
            rows: Vec::new(),
            inserted: 0,
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors passed to [`Echelon::insert`].
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn reduce(&self, v: &SparseVec<K>) -> Result<Reduction<K>> {
        let mut residual = v.clone();
        let mut comb = SparseVec::new();
        for row in &self.rows {
            if let Some(f) = residual.get(&row.pivot).cloned() {
                axpy(&mut residual, &-&f, &row.vec);
                axpy(&mut comb, &f, &row.comb);
            }
        }
        Ok(Reduction { residual, comb })
    }

    /// Inserts `v` as vector number `inserted()`. Returns `None` if `v` was
    /// independent, or the dependency `v = sum c_j inserted[j]` otherwise.
    pub fn insert(&mut self, v: &SparseVec<K>) -> Result<Option<SparseVec<usize>>> {
        let id = self.inserted;
        self.inserted += 1;
        let red = self.reduce(v)?;
        match red.residual.iter().next() {
            None => Ok(Some(red.comb)),
            Some((k, lead)) => {
                let pivot = k.clone();
                let inv = lead.inv()?;
                let vec = scale(&red.residual, &inv);
                // residual = v - comb, normalized
                let mut comb = scale(&red.comb, &-&inv);
                comb.insert(id, inv);
                self.rows.push(Row { pivot, vec, comb });
                Ok(None)
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<K>) -> Result<bool> {
        Ok(self.reduce(v)?.residual.is_empty())
    }

    /// Coefficients expressing `v` through inserted vectors, if in the span.
    pub fn express(&self, v: &SparseVec<K>) -> Result<Option<SparseVec<usize>>> {
        let red = self.reduce(v)?;
        Ok(red.residual.is_empty().then_some(red.comb))
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.iter().map(|r| &r.pivot)
    }
}

/// Rank of a family of vectors.
pub fn rank<K: Ord + Clone>(vs: &[SparseVec<K>]) -> Result<usize> {
    let mut e = Echelon::new();
    for v in vs {
        e.insert(v)?;
    }
    Ok(e.rank())
}

/// Basis of `{c : sum c_j vs[j] = 0}`.
pub fn kernel<K: Ord + Clone>(vs: &[SparseVec<K>]) -> Result<Vec<SparseVec<usize>>> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (j, v) in vs.iter().enumerate() {
        if let Some(dep) = e.insert(v)? {
            let mut k = scale(&dep, &-RatQ::one());
            k.insert(j, RatQ::one());
            out.push(k);
        }
    }
    Ok(out)
}

/// Solves `sum x_j cols[j] = target` for dense columns.
pub fn solve_columns(cols: &[Vec<RatQ>], target: &[RatQ]) -> Result<Option<Vec<RatQ>>> {
    let sparse = |v: &[RatQ]| -> SparseVec<usize> {
        v.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect()
    };
    let mut e = Echelon::new();
    for c in cols {
        e.insert(&sparse(c))?;
    }
    Ok(e.express(&sparse(target))?.map(|comb| {
        (0..cols.len())
            .map(|j| comb.get(&j).cloned().unwrap_or_default())
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::LaurentQ;

    fn v(xs: &[RatQ]) -> SparseVec<usize> {
        xs.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect()
    }

    fn q(e: i32) -> RatQ {
        RatQ::q_pow(e)
    }

    #[test]
    fn kernel_and_rank() {
        let one = RatQ::one();
        let qq = RatQ::from(&LaurentQ::q_pow(1) + &LaurentQ::one());
        let a = v(&[one.clone(), q(1)]);
        let b = v(&[q(-1), one.clone()]);
        let c = v(&[qq.clone(), RatQ::zero()]);
        assert_eq!(rank(&[a.clone(), b.clone(), c.clone()]).unwrap(), 2);
        // b = q^-1 a
        let k = kernel(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(k.len(), 1);
        let mut s = SparseVec::new();
        axpy(&mut s, &k[0][&0], &a);
        axpy(&mut s, &k[0][&1], &b);
        assert!(s.is_empty());
    }

    #[test]
    fn express_tracks_combinations() {
        let a = v(&[RatQ::one(), q(2), RatQ::zero()]);
        let b = v(&[RatQ::zero(), RatQ::one(), q(-1)]);
        let mut e = Echelon::new();
        assert!(e.insert(&a).unwrap().is_none());
        assert!(e.insert(&b).unwrap().is_none());
        let mut t = scale(&a, &q(3));
        axpy(&mut t, &q(-5), &b);
        let comb = e.express(&t).unwrap().unwrap();
        assert_eq!(comb[&0], q(3));
        assert_eq!(comb[&1], q(-5));
        assert!(e.express(&v(&[RatQ::zero(), RatQ::zero(), RatQ::one()])).unwrap().is_none());
        let sol = solve_columns(
            &[vec![RatQ::one(), q(2), RatQ::zero()], vec![RatQ::zero(), RatQ::one(), q(-1)]],
            &[q(3), &q(5) + &q(-5), q(-6)],
        )
        .unwrap()
        .unwrap();
        assert_eq!(sol, vec![q(3), q(-5)]);
    }
}
