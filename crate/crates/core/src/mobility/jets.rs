//! Taylor-jet recursion for parallel sections of the tampered connection.
//!
//! Writing `s = Σ s_α y^α` in local coordinates `y = x − p`, the system
//! `∂_a s = −A_a s` reads `α_a s_α = −[A_a s]_{α−e_a}` for every `a` with
//! `α_a ≥ 1`. The first such `a` defines `s_α`; the others are linear
//! constraints on the initial value `s_0`. Coefficients are stored as
//! `N × d` matrices over the current parameters and re-parametrized by the
//! constraint kernel after every degree.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::linalg::Echelon;
use crate::error::{Error, Result};
use crate::exprcore::{Monomial, Poly, RationalExpr, Q};
use crate::projconn::AffineConnection;
use crate::tractor::{slot_count, TractorConnection, TractorSection};

type Mat = Vec<Vec<Q>>;
type SparseMat = Vec<(usize, usize, Q)>;

/// Parallel sections of the tampered connection to a finite jet order.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSolution {
    pub dim: usize,
    pub base_point: Vec<Q>,
    pub order: usize,
    /// `dims[k]` is the admissible dimension after imposing the equations of
    /// degree `k`; `dims[0] = N`.
    pub dims: Vec<usize>,
    /// Canonical (reduced row echelon) basis of admissible initial values.
    pub admissible_space: Vec<Vec<Q>>,
    /// For each basis vector, the Taylor polynomial of every slot in local
    /// coordinates `y = x − p`, complete through degree `order`.
    pub series: Vec<Vec<Poly>>,
    /// Whether the dimension was unchanged over the last two orders.
    pub stabilized: bool,
}

impl JetSolution {
    pub fn dimension(&self) -> usize {
        self.admissible_space.len()
    }

    /// Order at which the dimension first reached its final value.
    pub fn stabilization_order(&self) -> usize {
        let last = *self.dims.last().expect("dims is never empty");
        let mut k = self.dims.len() - 1;
        while k > 0 && self.dims[k - 1] == last {
            k -= 1;
        }
        k
    }

    /// The truncated solution as a polynomial section in chart coordinates.
    pub fn section(&self, i: usize) -> TractorSection<RationalExpr> {
        let neg: Vec<Q> = self.base_point.iter().map(|x| -x.clone()).collect();
        let slots = self.series[i]
            .iter()
            .map(|p| RationalExpr::from_poly(p.shift(&neg)))
            .collect();
        TractorSection::from_slots(self.dim, slots)
    }

    /// Value at a local offset `y` from the base point.
    pub fn eval_local_f64(&self, i: usize, y: &[f64]) -> Vec<f64> {
        self.series[i].iter().map(|p| p.eval_f64(y)).collect()
    }

    /// A linear combination of basis solutions.
    pub fn combine(&self, coeffs: &[Q]) -> (Vec<Q>, Vec<Poly>) {
        let m = slot_count(self.dim);
        let mut init = vec![Q::zero(); m];
        let mut polys = vec![Poly::zero(); m];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for r in 0..m {
                init[r] += c * &self.admissible_space[k][r];
                polys[r] = polys[r].add(&self.series[k][r].scale(c));
            }
        }
        (init, polys)
    }
}

/// Monomials of total degree `k` in `n` variables, in a fixed order.
pub fn monomials_of_degree(n: usize, k: u32) -> Vec<Monomial> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i + 1 == n {
            cur[i] = left as u16;
            out.push(Monomial::from_exps(cur));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u16;
            rec(n, i + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(n, 0, k, &mut vec![0; n], &mut out);
    out
}

/// Taylor coefficient of some `A_a`: integer entries over a common denominator.
struct Coefficient {
    mono: Monomial,
    den: BigInt,
    entries: Vec<(usize, usize, BigInt)>,
}

/// Sparse Taylor coefficients of each `A_a` through degree `deg`.
fn sparse_coefficients(tc: &TractorConnection<crate::exprcore::Series>, deg: u32) -> Vec<Vec<Coefficient>> {
    let n = tc.dim();
    let m = slot_count(n);
    (0..n)
        .map(|a| {
            let mut by_mono: HashMap<Monomial, SparseMat> = HashMap::new();
            for (k, entry) in tc.matrix(a).iter().enumerate() {
                for (mono, c) in entry.poly().terms() {
                    if mono.degree() <= deg {
                        by_mono.entry(*mono).or_default().push((k / m, k % m, c.clone()));
                    }
                }
            }
            let mut v: Vec<Coefficient> = by_mono
                .into_iter()
                .map(|(mono, sparse)| {
                    let den = sparse.iter().fold(BigInt::one(), |l, (_, _, c)| l.lcm(c.denom()));
                    let entries = sparse.into_iter().map(|(i, j, c)| (i, j, c.numer() * (&den / c.denom()))).collect();
                    Coefficient { mono, den, entries }
                })
                .collect();
            v.sort_by(|x, y| x.mono.cmp(&y.mono));
            v
        })
        .collect()
}

/// A coefficient matrix as integers over a common denominator.
fn integral(mat: &Mat) -> (BigInt, Vec<Vec<BigInt>>) {
    let den = mat.iter().flatten().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let rows = mat
        .iter()
        .map(|r| r.iter().map(|c| c.numer() * (&den / c.denom())).collect())
        .collect();
    (den, rows)
}

fn mat_times(x: &Mat, k: &Mat) -> Mat {
    let d2 = k.first().map_or(0, |r| r.len());
    x.iter()
        .map(|row| {
            let mut out = vec![Q::zero(); d2];
            for (j, xv) in row.iter().enumerate() {
                if xv.is_zero() {
                    continue;
                }
                for (o, kv) in out.iter_mut().zip(&k[j]) {
                    if !kv.is_zero() {
                        *o += xv * kv;
                    }
                }
            }
            out
        })
        .collect()
}

fn invert(mut a: Mat) -> Mat {
    let n = a.len();
    let mut inv: Mat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero()).expect("matrix is invertible");
        a.swap(col, p);
        inv.swap(col, p);
        let d = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &d;
            inv[col][j] /= &d;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..n {
                let (x, y) = (&f * &a[col][j], &f * &inv[col][j]);
                a[i][j] -= x;
                inv[i][j] -= y;
            }
        }
    }
    inv
}

/// Dimension of the space of parallel sections of the tampered connection,
/// by exact jet recursion at `p` through degree `max_order`.
pub fn degree_of_mobility(c: &AffineConnection, p: &[Q], max_order: usize) -> Result<JetSolution> {
    let n = c.dim();
    if max_order < 2 {
        return Err(Error::Shape("max_order must be at least 2".into()));
    }
    if p.len() != n {
        return Err(Error::Shape(format!("base point has {} coordinates, expected {}", p.len(), n)));
    }
    let m = max_order;
    let cs = c.expand(p, m as i32 + 1)?;
    // β is checked through the jet order, which is what the recursion uses.
    let d = cs.decompose_curvature()?;
    let tc = TractorConnection::new(&cs, &d, true);
    let acoef = sparse_coefficients(&tc, m as u32 - 1);
    let nslots = slot_count(n);

    let mut params = nslots;
    let mut coeffs: HashMap<Monomial, Mat> = HashMap::new();
    coeffs.insert(
        Monomial::one(),
        (0..nslots)
            .map(|i| (0..nslots).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }).collect())
            .collect(),
    );
    let mut dims = vec![nslots];

    for k in 1..=m as u32 {
        if params == 0 {
            dims.push(0);
            continue;
        }
        let mut echelon = Echelon::new(params);
        let icoeffs: HashMap<Monomial, (BigInt, Vec<Vec<BigInt>>)> =
            coeffs.iter().map(|(mo, mat)| (*mo, integral(mat))).collect();
        let mut fresh: Vec<(Monomial, Mat)> = Vec::new();
        for alpha in monomials_of_degree(n, k) {
            let mut defined: Option<Mat> = None;
            for a in 0..n {
                let ea = alpha.exp(a);
                if ea == 0 {
                    continue;
                }
                let rest = alpha.with_exp(a, ea - 1);
                // [A_a s]_rest = Σ_γ A_γ s_{rest/γ}, summed over a common denominator.
                let terms: Vec<(&Coefficient, &(BigInt, Vec<Vec<BigInt>>))> = acoef[a]
                    .iter()
                    .filter(|g| g.mono.divides(&rest))
                    .filter_map(|g| icoeffs.get(&rest.div(&g.mono)).map(|sb| (g, sb)))
                    .collect();
                let lcm = terms.iter().fold(BigInt::one(), |l, (g, sb)| l.lcm(&(&g.den * &sb.0)));
                let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); params]; nslots];
                for (g, (sden, srows)) in &terms {
                    let f = &lcm / (&g.den * sden);
                    for (i, j, val) in &g.entries {
                        let scaled = val * &f;
                        for (o, x) in acc[*i].iter_mut().zip(&srows[*j]) {
                            if !x.is_zero() {
                                *o += &scaled * x;
                            }
                        }
                    }
                }
                let den = -(lcm * BigInt::from(ea));
                let v: Mat = acc
                    .into_iter()
                    .map(|row| row.into_iter().map(|x| if x.is_zero() { Q::zero() } else { Q::new(x, den.clone()) }).collect())
                    .collect();
                match &defined {
                    None => defined = Some(v),
                    Some(s) => {
                        for (r1, r2) in v.iter().zip(s) {
                            let diff: Vec<Q> = r1.iter().zip(r2).map(|(x, y)| x - y).collect();
                            echelon.push(&diff);
                        }
                    }
                }
            }
            fresh.push((alpha, defined.expect("degree >= 1 has a nonzero exponent")));
        }
        coeffs.extend(fresh);
        if echelon.rank() > 0 {
            let kernel = echelon.kernel();
            let newp = kernel.len();
            let kmat: Mat = (0..params).map(|r| kernel.iter().map(|v| v[r].clone()).collect()).collect();
            for mat in coeffs.values_mut() {
                *mat = mat_times(mat, &kmat);
            }
            params = newp;
        }
        dims.push(params);
    }

    // Canonical basis: RREF of the span of initial values.
    let s0 = coeffs[&Monomial::one()].clone();
    let columns: Vec<Vec<Q>> = (0..params).map(|j| s0.iter().map(|r| r[j].clone()).collect()).collect();
    let mut e = Echelon::new(nslots);
    for col in &columns {
        e.push(col);
    }
    let (basis, pivots) = e.rref();
    let series = if params == 0 {
        Vec::new()
    } else {
        let sp: Mat = pivots.iter().map(|&r| s0[r].clone()).collect();
        let y = invert(sp);
        for mat in coeffs.values_mut() {
            *mat = mat_times(mat, &y);
        }
        let mut monos: Vec<&Monomial> = coeffs.keys().collect();
        monos.sort();
        (0..params)
            .map(|i| {
                (0..nslots)
                    .map(|r| {
                        Poly::from_terms(monos.iter().map(|mo| (**mo, coeffs[*mo][r][i].clone())))
                    })
                    .collect()
            })
            .collect()
    };
    let stabilized = dims[m] == dims[m - 1];
    Ok(JetSolution {
        dim: n,
        base_point: p.to_vec(),
        order: m,
        dims,
        admissible_space: basis,
        series,
        stabilized,
    })
}

/// Basis solutions whose truncated Taylor polynomial is an exact parallel
/// section, checked by substituting into the symbolic tampered connection.
pub fn exact_solutions(tc: &TractorConnection<RationalExpr>, jet: &JetSolution) -> Vec<Option<TractorSection<RationalExpr>>> {
    (0..jet.dimension())
        .map(|i| {
            let top = jet.order as u32;
            let high = jet.series[i]
                .iter()
                .any(|p| p.terms().iter().any(|(mo, _)| mo.degree() == top && top > 2));
            if high {
                return None;
            }
            let s = jet.section(i);
            tc.derivative(&s).iter().all(|d| d.is_zero()).then_some(s)
        })
        .collect()
}
