//! Tensor fields on the chart with positional indices, variance signatures and
//! projective weights.

use std::fmt;

use crate::error::{Error, Result};
use crate::exprcore::{RationalExpr, Scalar, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

pub use Variance::{Down, Up};

/// Row-major flat index of a multi-index.
pub fn flat(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Inverse of [`flat`] for a given rank.
pub fn unflat(mut k: usize, n: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = k % n;
        k /= n;
    }
    idx
}

/// Kronecker delta as a scalar.
pub fn delta<S: Scalar>(a: usize, b: usize) -> S {
    if a == b {
        S::one()
    } else {
        S::zero()
    }
}

/// A tensor field with components in `S`.
///
/// The field may carry a formal rescaling factor `exp(tag)`: the value it
/// represents is `exp(tag) * components`. Projective weight `w` records how
/// the field rescales when the volume form changes by `exp((n+1)f)`.
#[derive(Clone, PartialEq)]
pub struct TensorField<S: Scalar = RationalExpr> {
    dim: usize,
    signature: Vec<Variance>,
    weight: i32,
    tag: RationalExpr,
    components: Vec<S>,
}

impl<S: Scalar> TensorField<S> {
    pub fn zeros(dim: usize, signature: &[Variance]) -> Self {
        Self {
            dim,
            signature: signature.to_vec(),
            weight: 0,
            tag: RationalExpr::zero(),
            components: vec![S::zero(); dim.pow(signature.len() as u32)],
        }
    }

    pub fn from_fn<F: FnMut(&[usize]) -> S>(dim: usize, signature: &[Variance], mut f: F) -> Self {
        let rank = signature.len();
        let total = dim.pow(rank as u32);
        let components = (0..total).map(|k| f(&unflat(k, dim, rank))).collect();
        Self {
            dim,
            signature: signature.to_vec(),
            weight: 0,
            tag: RationalExpr::zero(),
            components,
        }
    }

    pub fn from_components(dim: usize, signature: &[Variance], components: Vec<S>) -> Result<Self> {
        let expect = dim.pow(signature.len() as u32);
        if components.len() != expect {
            return Err(Error::Shape(format!(
                "expected {} components for rank {}, got {}",
                expect,
                signature.len(),
                components.len()
            )));
        }
        Ok(Self {
            dim,
            signature: signature.to_vec(),
            weight: 0,
            tag: RationalExpr::zero(),
            components,
        })
    }

    pub fn with_weight(mut self, w: i32) -> Self {
        self.weight = w;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.signature.len()
    }

    pub fn signature(&self) -> &[Variance] {
        &self.signature
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn tag(&self) -> &RationalExpr {
        &self.tag
    }

    pub fn components(&self) -> &[S] {
        &self.components
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        debug_assert_eq!(idx.len(), self.rank());
        &self.components[flat(idx, self.dim)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let k = flat(idx, self.dim);
        self.components[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn map<T: Scalar, F: FnMut(&S) -> T>(&self, f: F) -> TensorField<T> {
        TensorField {
            dim: self.dim,
            signature: self.signature.clone(),
            weight: self.weight,
            tag: self.tag.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    fn check_same_shape(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim || self.signature != o.signature {
            return Err(Error::Shape("tensor shapes differ".into()));
        }
        if self.tag != o.tag {
            return Err(Error::Shape("exponential weight tags differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        let mut out = self.clone();
        for (a, b) in out.components.iter_mut().zip(&o.components) {
            a.add_assign_ref(b);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        let mut out = self.clone();
        for (a, b) in out.components.iter_mut().zip(&o.components) {
            *a = a.sub(b);
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Q) -> Self {
        self.map(|c| c.scale(k)).with_weight(self.weight).retag(self.tag.clone())
    }

    fn retag(mut self, tag: RationalExpr) -> Self {
        self.tag = tag;
        self
    }

    /// Contracts an upper index with a lower index.
    pub fn contract(&self, i: usize, j: usize) -> Result<Self> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if i == j || j >= self.rank() || self.signature[i] == self.signature[j] {
            return Err(Error::Shape(format!(
                "cannot contract slots {} and {} of {:?}",
                i, j, self.signature
            )));
        }
        let mut sig = self.signature.clone();
        sig.remove(j);
        sig.remove(i);
        let n = self.dim;
        let mut out = TensorField::from_fn(n, &sig, |rest| {
            let mut acc = S::zero();
            let mut full = Vec::with_capacity(rest.len() + 2);
            for k in 0..n {
                full.clear();
                full.extend_from_slice(rest);
                full.insert(i, k);
                full.insert(j, k);
                acc.add_assign_ref(self.get(&full));
            }
            acc
        });
        out.weight = self.weight;
        out.tag = self.tag.clone();
        Ok(out)
    }

    /// Whether the field is structurally symmetric in slots `i` and `j`.
    pub fn is_symmetric_in(&self, i: usize, j: usize) -> bool {
        let r = self.rank();
        (0..self.components.len()).all(|k| {
            let idx = unflat(k, self.dim, r);
            let mut sw = idx.clone();
            sw.swap(i, j);
            self.components[k] == *self.get(&sw)
        })
    }

    /// Whether the field is structurally antisymmetric in slots `i` and `j`.
    pub fn is_antisymmetric_in(&self, i: usize, j: usize) -> bool {
        let r = self.rank();
        (0..self.components.len()).all(|k| {
            let idx = unflat(k, self.dim, r);
            let mut sw = idx.clone();
            sw.swap(i, j);
            self.components[k].add(self.get(&sw)).is_zero()
        })
    }

    /// Trace-free part of a field `T_a^{bc}` symmetric in `b, c`:
    /// `T_a^{bc} - δ_a^b X^c - δ_a^c X^b` with `X^c = T_d^{dc}/(n+1)`.
    pub fn trace_free_part(&self) -> Result<Self> {
        if self.signature != [Down, Up, Up] {
            return Err(Error::Shape(format!(
                "trace_free_part needs signature [Down, Up, Up], got {:?}",
                self.signature
            )));
        }
        if !self.is_symmetric_in(1, 2) {
            return Err(Error::Shape("upper indices are not symmetric".into()));
        }
        let n = self.dim;
        let inv = Q::new(1.into(), (n as i64 + 1).into());
        let x: Vec<S> = (0..n)
            .map(|c| {
                let mut acc = S::zero();
                for d in 0..n {
                    acc.add_assign_ref(self.get(&[d, d, c]));
                }
                acc.scale(&inv)
            })
            .collect();
        let mut out = self.clone();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut v = self.get(&[a, b, c]).clone();
                    if a == b {
                        v = v.sub(&x[c]);
                    }
                    if a == c {
                        v = v.sub(&x[b]);
                    }
                    out.set(&[a, b, c], v);
                }
            }
        }
        Ok(out)
    }
}

impl TensorField<RationalExpr> {
    /// Formal rescaling by `exp(w f)` for a field of projective weight `w`.
    ///
    /// Components are untouched; the exponent is recorded in the tag, so that
    /// identities in which the factors cancel can be checked exactly.
    pub fn reweight(&self, f: &RationalExpr) -> Self {
        let w = RationalExpr::int(self.weight as i64);
        let mut out = self.clone();
        out.tag = &self.tag + &(&w * f);
        out
    }

    /// Sets the exponential tag directly.
    pub fn with_tag(mut self, tag: RationalExpr) -> Self {
        self.tag = tag;
        self
    }
}

impl<S: Scalar> fmt::Debug for TensorField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "TensorField(dim={}, sig={:?}, weight={}, tag={})",
            self.dim, self.signature, self.weight, self.tag
        )?;
        for (k, c) in self.components.iter().enumerate() {
            if !c.is_zero() {
                writeln!(f, "  {:?}: {:?}", unflat(k, self.dim, self.rank()), c)?;
            }
        }
        Ok(())
    }
}
