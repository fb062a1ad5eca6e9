//! Vector fields and (1,1)-operator fields with series entries: Lie
//! bracket, Nijenhuis torsion, the Frölicher–Nijenhuis bracket and
//! coordinate-change transport.
//!
//! Derived tensors carry a `trusted` degree: differentiating a series
//! known through degree `N` is complete only through `N - 1`, so the
//! torsion of a degree-`N` truncation is reliable through `N - 1`.

use crate::change::FormalChange;
use crate::coeff::Coeff;
use crate::error::TensorError;
use crate::series::{compose_many, PowerCache, Series, Vars};

/// Vector field: one series per component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<C: Coeff> {
    components: Vec<Series<C>>,
}

impl<C: Coeff> VectorField<C> {
    pub fn new(components: Vec<Series<C>>) -> Result<Self, TensorError> {
        let n = components.len();
        let first = components.first().ok_or(TensorError::BadComponentCount {
            dim: 0,
            got: 0,
        })?;
        if first.vars().len() != n {
            return Err(TensorError::BadComponentCount {
                dim: first.vars().len(),
                got: n,
            });
        }
        for c in &components[1..] {
            if c.vars() != first.vars() {
                return Err(TensorError::Series(crate::error::SeriesError::VarMismatch(
                    first.vars().to_string(),
                    c.vars().to_string(),
                )));
            }
            if c.truncation() != first.truncation() {
                return Err(TensorError::Series(
                    crate::error::SeriesError::TruncationMismatch(
                        first.truncation(),
                        c.truncation(),
                    ),
                ));
            }
        }
        Ok(VectorField { components })
    }

    /// The constant coordinate field `∂_index`.
    pub fn coordinate(
        vars: Vars,
        trunc: u32,
        index: usize,
        one: C,
    ) -> Result<Self, TensorError> {
        let n = vars.len();
        let mut components = vec![Series::zero(vars.clone(), trunc); n];
        components[index] = Series::constant(vars, trunc, one);
        VectorField::new(components)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn vars(&self) -> &Vars {
        self.components[0].vars()
    }

    pub fn truncation(&self) -> u32 {
        self.components[0].truncation()
    }

    pub fn component(&self, k: usize) -> &Series<C> {
        &self.components[k]
    }

    pub fn components(&self) -> &[Series<C>] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Series::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_shape(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(VectorField { components })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_shape(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_, _>>()?;
        Ok(VectorField { components })
    }

    pub fn neg(&self) -> Self {
        VectorField {
            components: self.components.iter().map(Series::neg).collect(),
        }
    }

    fn check_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.dim() != other.dim() {
            return Err(TensorError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }
}

/// Commutator of vector fields: `[ξ, η]^k = Σ_j (ξ^j ∂_j η^k − η^j ∂_j ξ^k)`.
pub fn lie_bracket<C: Coeff>(
    xi: &VectorField<C>,
    eta: &VectorField<C>,
) -> Result<VectorField<C>, TensorError> {
    xi.check_shape(eta)?;
    let n = xi.dim();
    let vars = xi.vars().clone();
    let trunc = xi.truncation();
    let mut components = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Series::zero(vars.clone(), trunc);
        for j in 0..n {
            let fwd = xi.component(j).mul(&eta.component(k).derivative(j)?)?;
            let bwd = eta.component(j).mul(&xi.component(k).derivative(j)?)?;
            acc = acc.add(&fwd)?.sub(&bwd)?;
        }
        components.push(acc);
    }
    VectorField::new(components)
}

/// (1,1)-tensor field: entry `(k, i)` is `R^k_i`, so column `i` is `R ∂_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorField<C: Coeff> {
    entries: Vec<Vec<Series<C>>>,
    unit: C,
    trusted: u32,
}

impl<C: Coeff> OperatorField<C> {
    pub fn new(entries: Vec<Vec<Series<C>>>, unit: C) -> Result<Self, TensorError> {
        let n = entries.len();
        if n == 0 {
            return Err(TensorError::BadComponentCount { dim: 0, got: 0 });
        }
        let first = &entries[0][0];
        if first.vars().len() != n {
            return Err(TensorError::DimensionMismatch(first.vars().len(), n));
        }
        for row in &entries {
            if row.len() != n {
                return Err(TensorError::BadComponentCount {
                    dim: n,
                    got: row.len(),
                });
            }
            for e in row {
                if e.vars() != first.vars() || e.truncation() != first.truncation() {
                    return Err(TensorError::Series(
                        crate::error::SeriesError::TruncationMismatch(
                            first.truncation(),
                            e.truncation(),
                        ),
                    ));
                }
            }
        }
        let trusted = first.truncation();
        Ok(OperatorField {
            entries,
            unit,
            trusted,
        })
    }

    pub fn with_trusted(mut self, trusted: u32) -> Self {
        self.trusted = trusted.min(self.truncation());
        self
    }

    pub fn zero(vars: Vars, trunc: u32, unit: C) -> Self {
        let n = vars.len();
        let entries = vec![vec![Series::zero(vars.clone(), trunc); n]; n];
        OperatorField {
            entries,
            unit,
            trusted: trunc,
        }
    }

    pub fn identity(vars: Vars, trunc: u32, unit: C) -> Self {
        let n = vars.len();
        let mut op = Self::zero(vars, trunc, unit.clone());
        for i in 0..n {
            op.entries[i][i] =
                Series::constant(op.entries[i][i].vars().clone(), trunc, unit.clone());
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn vars(&self) -> &Vars {
        self.entries[0][0].vars()
    }

    pub fn truncation(&self) -> u32 {
        self.entries[0][0].truncation()
    }

    /// Degree through which the entries are complete.
    pub fn trusted(&self) -> u32 {
        self.trusted
    }

    pub fn unit(&self) -> &C {
        &self.unit
    }

    pub fn entry(&self, out: usize, inp: usize) -> &Series<C> {
        &self.entries[out][inp]
    }

    pub fn entries(&self) -> &Vec<Vec<Series<C>>> {
        &self.entries
    }

    pub fn set_entry(&mut self, out: usize, inp: usize, s: Series<C>) {
        self.entries[out][inp] = s;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Series::is_zero)
    }

    /// Column `i` as the vector field `R ∂_i`.
    pub fn column(&self, i: usize) -> VectorField<C> {
        let components = (0..self.dim())
            .map(|k| self.entries[k][i].clone())
            .collect();
        VectorField { components }
    }

    /// Matrix–vector action on a vector field.
    pub fn apply(&self, v: &VectorField<C>) -> Result<VectorField<C>, TensorError> {
        if v.dim() != self.dim() {
            return Err(TensorError::DimensionMismatch(self.dim(), v.dim()));
        }
        let n = self.dim();
        let mut components = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Series::zero(self.vars().clone(), self.truncation());
            for i in 0..n {
                acc = acc.add(&self.entries[k][i].mul(v.component(i))?)?;
            }
            components.push(acc);
        }
        Ok(VectorField { components })
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_shape(other)?;
        let n = self.dim();
        let mut out = self.clone();
        for k in 0..n {
            for i in 0..n {
                out.entries[k][i] = self.entries[k][i].add(&other.entries[k][i])?;
            }
        }
        out.trusted = self.trusted.min(other.trusted);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.entries {
            for e in row {
                *e = e.neg();
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.clone();
        for row in &mut out.entries {
            for e in row {
                *e = e.scale(c);
            }
        }
        out
    }

    /// Matrix product (entry-wise series arithmetic).
    pub fn matmul(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_shape(other)?;
        let n = self.dim();
        let mut out = Self::zero(self.vars().clone(), self.truncation(), self.unit.clone());
        for k in 0..n {
            for i in 0..n {
                let mut acc = Series::zero(self.vars().clone(), self.truncation());
                for j in 0..n {
                    acc = acc.add(&self.entries[k][j].mul(&other.entries[j][i])?)?;
                }
                out.entries[k][i] = acc;
            }
        }
        out.trusted = self.trusted.min(other.trusted);
        Ok(out)
    }

    pub fn trace(&self) -> Result<Series<C>, TensorError> {
        let mut acc = Series::zero(self.vars().clone(), self.truncation());
        for k in 0..self.dim() {
            acc = acc.add(&self.entries[k][k])?;
        }
        Ok(acc)
    }

    pub fn det2(&self) -> Result<Series<C>, TensorError> {
        assert_eq!(self.dim(), 2, "det2 requires dimension 2");
        Ok(self.entries[0][0]
            .mul(&self.entries[1][1])?
            .sub(&self.entries[0][1].mul(&self.entries[1][0])?)?)
    }

    /// Entries restricted to homogeneous degree `k`.
    pub fn homogeneous_slice(&self, k: u32) -> Result<Self, TensorError> {
        let n = self.dim();
        let mut out = self.clone();
        for r in 0..n {
            for c in 0..n {
                out.entries[r][c] = self.entries[r][c].homogeneous_part(k)?.into_series();
            }
        }
        Ok(out)
    }

    /// The scalar multiple of the identity at the origin, if the operator
    /// is scalar there (`None` otherwise).
    pub fn scalar_at_origin(&self) -> Option<C> {
        let n = self.dim();
        let zero = self.unit.of_int(0);
        let mut lambda: Option<C> = None;
        for k in 0..n {
            for i in 0..n {
                let c = self.entries[k][i]
                    .constant_term()
                    .cloned()
                    .unwrap_or_else(|| zero.clone());
                if k == i {
                    match &lambda {
                        None => lambda = Some(c),
                        Some(l) if *l == c => {}
                        _ => return None,
                    }
                } else if !c.is_zero() {
                    return None;
                }
            }
        }
        lambda
    }

    fn check_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.dim() != other.dim() {
            return Err(TensorError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }
}

/// Vector-valued two-form (type (1,2), antisymmetric in the lower pair).
/// Entries are stored for `i < j`; the accessor flips sign for `i > j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormValued<C: Coeff> {
    dim: usize,
    vars: Vars,
    trunc: u32,
    trusted: u32,
    /// `table[k][pair_index(i, j)]` for i < j.
    table: Vec<Vec<Series<C>>>,
}

fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    // pairs (0,1), (0,2), ..., (0,n-1), (1,2), ...
    i * (2 * dim - i - 1) / 2 + (j - i - 1)
}

impl<C: Coeff> TwoFormValued<C> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trusted(&self) -> u32 {
        self.trusted
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    /// `T^k(∂_i, ∂_j)`; antisymmetry supplies `i > j` and `i == j`.
    pub fn entry(&self, k: usize, i: usize, j: usize) -> Series<C> {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.table[k][pair_index(self.dim, i, j)].clone(),
            Equal => Series::zero(self.vars.clone(), self.trunc),
            Greater => self.table[k][pair_index(self.dim, j, i)].neg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(Series::is_zero)
    }

    /// Zero through degree `deg` in every component.
    pub fn is_zero_through(&self, deg: u32) -> bool {
        self.table
            .iter()
            .flatten()
            .all(|s| s.truncate_to_degree(deg).is_zero())
    }

    /// First nonzero component at degree `<= deg`: (degree, i, j, out).
    pub fn first_nonzero_through(&self, deg: u32) -> Option<(u32, usize, usize, usize)> {
        let mut best: Option<(u32, usize, usize, usize)> = None;
        for k in 0..self.dim {
            for i in 0..self.dim {
                for j in (i + 1)..self.dim {
                    let s = &self.table[k][pair_index(self.dim, i, j)];
                    for (m, _) in s.terms() {
                        let d = m.total_degree();
                        if d <= deg && best.map_or(true, |(bd, ..)| d < bd) {
                            best = Some((d, i, j, k));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Nijenhuis torsion
/// `N_R(ξ, η) = R[Rξ, η] + R[ξ, Rη] − [Rξ, Rη] − R²[ξ, η]`,
/// evaluated on all coordinate-field pairs (bilinearity makes that a
/// complete set of values). Coordinate fields commute, so the `R²[ξ, η]`
/// term vanishes on this basis.
pub fn nijenhuis_torsion<C: Coeff>(r: &OperatorField<C>) -> Result<TwoFormValued<C>, TensorError> {
    let n = r.dim();
    let vars = r.vars().clone();
    let trunc = r.truncation();
    let mut table = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let e_i = VectorField::coordinate(vars.clone(), trunc, i, r.unit().clone())?;
            let e_j = VectorField::coordinate(vars.clone(), trunc, j, r.unit().clone())?;
            let r_i = r.column(i);
            let r_j = r.column(j);
            let t1 = r.apply(&lie_bracket(&r_i, &e_j)?)?;
            let t2 = r.apply(&lie_bracket(&e_i, &r_j)?)?;
            let t3 = lie_bracket(&r_i, &r_j)?;
            let value = t1.add(&t2)?.sub(&t3)?;
            for (k, row) in table.iter_mut().enumerate() {
                row.push(value.component(k).clone());
            }
        }
    }
    Ok(TwoFormValued {
        dim: n,
        vars,
        trunc,
        trusted: r.trusted().saturating_sub(1),
        table,
    })
}

/// Frölicher–Nijenhuis bracket of two operator fields, evaluated on
/// coordinate-field pairs:
/// `[[R, Q]](ξ, η) = Q[Rξ, η] + R[ξ, Qη] − [Rξ, Qη] − RQ[ξ, η]`
/// `              + R[Qξ, η] + Q[ξ, Rη] − [Qξ, Rη] − QR[ξ, η]`.
pub fn fn_bracket<C: Coeff>(
    r: &OperatorField<C>,
    q: &OperatorField<C>,
) -> Result<TwoFormValued<C>, TensorError> {
    if r.dim() != q.dim() {
        return Err(TensorError::DimensionMismatch(r.dim(), q.dim()));
    }
    let n = r.dim();
    let vars = r.vars().clone();
    let trunc = r.truncation();
    let mut table = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let e_i = VectorField::coordinate(vars.clone(), trunc, i, r.unit().clone())?;
            let e_j = VectorField::coordinate(vars.clone(), trunc, j, r.unit().clone())?;
            let r_i = r.column(i);
            let r_j = r.column(j);
            let q_i = q.column(i);
            let q_j = q.column(j);
            // [∂_i, ∂_j] = 0 removes the RQ and QR terms.
            let mut value = q.apply(&lie_bracket(&r_i, &e_j)?)?;
            value = value.add(&r.apply(&lie_bracket(&e_i, &q_j)?)?)?;
            value = value.sub(&lie_bracket(&r_i, &q_j)?)?;
            value = value.add(&r.apply(&lie_bracket(&q_i, &e_j)?)?)?;
            value = value.add(&q.apply(&lie_bracket(&e_i, &r_j)?)?)?;
            value = value.sub(&lie_bracket(&q_i, &r_j)?)?;
            for (k, row) in table.iter_mut().enumerate() {
                row.push(value.component(k).clone());
            }
        }
    }
    Ok(TwoFormValued {
        dim: n,
        vars,
        trunc,
        trusted: r.trusted().min(q.trusted()).saturating_sub(1),
        table,
    })
}

/// Decision wrapper over the torsion: vanishing through degree `k`.
/// Reliable only through `N − 1` because the formula differentiates once.
pub fn is_nijenhuis<C: Coeff>(
    r: &OperatorField<C>,
    through_degree: u32,
) -> Result<Result<(), (u32, usize, usize, usize)>, TensorError> {
    let reliable = r.trusted().min(r.truncation()).saturating_sub(1);
    if through_degree > reliable {
        return Err(TensorError::BeyondReliableDegree {
            degree: through_degree,
            reliable,
        });
    }
    let torsion = nijenhuis_torsion(r)?;
    match torsion.first_nonzero_through(through_degree) {
        None => Ok(Ok(())),
        Some(witness) => Ok(Err(witness)),
    }
}

/// Jacobian matrix of a map: `J[k][i] = ∂(map_k)/∂x_i`.
pub fn jacobian<C: Coeff>(
    map: &[Series<C>],
    unit: &C,
) -> Result<OperatorField<C>, TensorError> {
    let n = map.len();
    let mut entries = Vec::with_capacity(n);
    for comp in map {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            row.push(comp.derivative(i)?);
        }
        entries.push(row);
    }
    OperatorField::new(entries, unit.clone())
}

/// Inverse of `Id + E` with `E` of strictly positive degree, via the
/// terminating Neumann series.
pub fn invert_unipotent<C: Coeff>(m: &OperatorField<C>) -> Result<OperatorField<C>, TensorError> {
    let n = m.dim();
    let vars = m.vars().clone();
    let trunc = m.truncation();
    let id = OperatorField::identity(vars.clone(), trunc, m.unit().clone());
    let e = m.sub(&id)?;
    for k in 0..n {
        for i in 0..n {
            if e.entry(k, i).constant_term().is_some() {
                return Err(TensorError::Series(
                    crate::error::SeriesError::NonIdentityLinearPart { component: k },
                ));
            }
        }
    }
    let neg_e = e.neg();
    let mut acc = id.clone();
    let mut power = id;
    for _ in 0..trunc {
        power = power.matmul(&neg_e)?;
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power)?;
    }
    Ok(acc)
}

/// Transport of an operator field through a tangent-to-identity change:
/// `R̄ = (Jφ · R · Jφ⁻¹) ∘ φ⁻¹`, with `Jφ` the Jacobian of the forward
/// map. Vanishing torsion is preserved exactly for polynomial data.
pub fn transform_operator<C: Coeff>(
    r: &OperatorField<C>,
    change: &FormalChange<C>,
) -> Result<OperatorField<C>, TensorError> {
    if r.dim() != change.dim() {
        return Err(TensorError::DimensionMismatch(r.dim(), change.dim()));
    }
    let n = r.dim();
    let jac = jacobian(change.forward(), r.unit())?;
    let jac_inv = invert_unipotent(&jac)?;
    let conjugated = jac.matmul(r)?.matmul(&jac_inv)?;
    // Substitute the inverse map into every entry, sharing power tables.
    let flat: Vec<Series<C>> = conjugated
        .entries()
        .iter()
        .flatten()
        .cloned()
        .collect();
    let composed = {
        let mut cache = PowerCache::new(change.inverse(), n, r.truncation())
            .map_err(TensorError::Series)?;
        cache.compose_all(&flat).map_err(TensorError::Series)?
    };
    let mut entries = Vec::with_capacity(n);
    for k in 0..n {
        entries.push(composed[k * n..(k + 1) * n].to_vec());
    }
    let out = OperatorField::new(entries, r.unit().clone())?;
    Ok(out.with_trusted(r.trusted()))
}

/// Transport of a vector-valued two-form through a change, with `J` on the
/// output slot and `J⁻¹` on both lower slots (the convention matching
/// [`transform_operator`]).
pub fn transform_two_form<C: Coeff>(
    t: &TwoFormValued<C>,
    change: &FormalChange<C>,
    unit: &C,
) -> Result<TwoFormValued<C>, TensorError> {
    if t.dim() != change.dim() {
        return Err(TensorError::DimensionMismatch(t.dim(), change.dim()));
    }
    let n = t.dim();
    let trunc = t.truncation();
    let jac = jacobian(change.forward(), unit)?;
    let jac_inv = invert_unipotent(&jac)?;
    let mut raw = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            // value^k = Σ_{c,a,b} J^k_c T^c_{ab} (J⁻¹)^a_i (J⁻¹)^b_j
            for k in 0..n {
                let mut acc = Series::zero(t.vars().clone(), trunc);
                for c in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            if a == b {
                                continue;
                            }
                            let term = jac
                                .entry(k, c)
                                .mul(&t.entry(c, a, b))?
                                .mul(jac_inv.entry(a, i))?
                                .mul(jac_inv.entry(b, j))?;
                            acc = acc.add(&term)?;
                        }
                    }
                }
                raw[k].push(acc);
            }
        }
    }
    let flat: Vec<Series<C>> = raw.iter().flatten().cloned().collect();
    let composed = compose_many(&flat, change.inverse()).map_err(TensorError::Series)?;
    let per_k = n * (n - 1) / 2;
    let table: Vec<Vec<Series<C>>> = (0..n)
        .map(|k| composed[k * per_k..(k + 1) * per_k].to_vec())
        .collect();
    Ok(TwoFormValued {
        dim: n,
        vars: t.vars().clone(),
        trunc,
        trusted: t.trusted(),
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::change::{ChangeStep, FormalChange};
    use crate::coeff::{parse_rational, CoeffMode, Rat};
    use crate::series::parse_polynomial;
    use crate::templates::{template_operator, Family};

    fn uv(text: &str, trunc: u32) -> Series<Rat> {
        parse_polynomial(text, &Vars::uv(), trunc, CoeffMode::Rational).unwrap()
    }

    fn xy(text: &str, trunc: u32) -> Series<Rat> {
        parse_polynomial(text, &Vars::xy(), trunc, CoeffMode::Rational).unwrap()
    }

    fn one() -> Rat {
        parse_rational("1").unwrap()
    }

    fn op(e: [[&str; 2]; 2], trunc: u32) -> OperatorField<Rat> {
        let entries = e
            .iter()
            .map(|row| row.iter().map(|s| uv(s, trunc)).collect())
            .collect();
        OperatorField::new(entries, one()).unwrap()
    }

    #[test]
    fn lie_bracket_basics() {
        let n = 4;
        let du = VectorField::coordinate(Vars::uv(), n, 0, one()).unwrap();
        let dv = VectorField::coordinate(Vars::uv(), n, 1, one()).unwrap();
        assert!(lie_bracket(&du, &dv).unwrap().is_zero());
        // [∂_u, u ∂_u] = ∂_u
        let u_du = VectorField::new(vec![uv("u", n), uv("0", n)]).unwrap();
        assert_eq!(lie_bracket(&du, &u_du).unwrap(), du);
        // antisymmetry on the diagonal
        let xi = VectorField::new(vec![uv("u^2 - v", n), uv("3*u*v", n)]).unwrap();
        assert!(lie_bracket(&xi, &xi).unwrap().is_zero());
    }

    #[test]
    fn torsion_of_identity_vanishes() {
        let id = OperatorField::identity(Vars::uv(), 4, one());
        assert!(nijenhuis_torsion(&id).unwrap().is_zero());
    }

    #[test]
    fn torsion_of_all_templates_vanishes() {
        let alpha = parse_rational("-7/3").unwrap();
        let beta = parse_rational("5/2").unwrap();
        for family in Family::ALL {
            let param = match family {
                Family::B1 => Some(&alpha),
                Family::B2 => Some(&beta),
                _ => None,
            };
            let r = template_operator(family, param, 3, &one()).unwrap();
            let t = nijenhuis_torsion(&r).unwrap();
            assert!(t.is_zero(), "template {family} should be Nijenhuis");
        }
    }

    #[test]
    fn torsion_hand_oracle_nonzero() {
        // R = [[v, 0], [0, u]]: N(∂_u, ∂_v) = (u - v)(∂_u + ∂_v), computed
        // by expanding the defining formula by hand.
        let n = 3;
        let r = op([["v", "0"], ["0", "u"]], n);
        let t = nijenhuis_torsion(&r).unwrap();
        assert_eq!(t.entry(0, 0, 1), uv("u - v", n));
        assert_eq!(t.entry(1, 0, 1), uv("u - v", n));
        // antisymmetry accessor
        assert_eq!(t.entry(0, 1, 0), uv("v - u", n));
        assert!(t.entry(0, 0, 0).is_zero());
    }

    #[test]
    fn fn_bracket_is_twice_torsion_and_symmetric() {
        let n = 5;
        let r = op([["u*v", "v^2 - u"], ["2*u", "u^2 + 3*v"]], n);
        let q = op([["v", "u^2"], ["u + v", "0"]], n);
        let rr = fn_bracket(&r, &r).unwrap();
        let tor = nijenhuis_torsion(&r).unwrap();
        for k in 0..2 {
            assert_eq!(rr.entry(k, 0, 1), tor.entry(k, 0, 1).scale_int(2));
        }
        let rq = fn_bracket(&r, &q).unwrap();
        let qr = fn_bracket(&q, &r).unwrap();
        assert_eq!(rq, qr);
    }

    #[test]
    fn fn_bracket_degree_addition() {
        // homogeneous degree-2 R and degree-3 Q give degree-4 entries
        let n = 6;
        let r = op([["u^2", "u*v"], ["v^2", "u^2 - v^2"]], n);
        let q = op([["u^3", "v^3"], ["u*v^2", "u^2*v"]], n);
        let b = fn_bracket(&r, &q).unwrap();
        for k in 0..2 {
            let e = b.entry(k, 0, 1);
            for (m, _) in e.terms() {
                assert_eq!(m.total_degree(), 4);
            }
        }
    }

    #[test]
    fn transform_identity_and_scalars() {
        let n = 5;
        let alpha = parse_rational("2/3").unwrap();
        let r = template_operator(Family::B1, Some(&alpha), n, &one()).unwrap();
        let id = FormalChange::identity(Vars::xy(), n, one());
        assert_eq!(transform_operator(&r, &id).unwrap().entries(), r.entries());

        let mut change = FormalChange::identity(Vars::xy(), n, one());
        change
            .push_step(ChangeStep {
                degree: 2,
                parts: vec![xy("x^2 - x*y", n), xy("2*y^2", n)],
            })
            .unwrap();
        let ident_op = OperatorField::identity(Vars::xy(), n, one());
        let moved = transform_operator(&ident_op, &change).unwrap();
        assert_eq!(moved.entries(), ident_op.entries());
    }

    #[test]
    fn transform_satisfies_conjugation_relation() {
        // J(x) · R(x) = R̄(φ(x)) · J(x), which pins the transported
        // operator without inverting anything.
        let n = 6;
        let alpha = parse_rational("-5/7").unwrap();
        let r = template_operator(Family::B1, Some(&alpha), n, &one()).unwrap();
        let mut change = FormalChange::identity(Vars::xy(), n, one());
        change
            .push_step(ChangeStep {
                degree: 2,
                parts: vec![xy("x^2", n), xy("0", n)],
            })
            .unwrap();
        let moved = transform_operator(&r, &change).unwrap();
        let jac = jacobian(change.forward(), &one()).unwrap();
        let lhs = jac.matmul(&r).unwrap();
        // R̄ ∘ φ, entry-wise
        let flat: Vec<Series<Rat>> = moved.entries().iter().flatten().cloned().collect();
        let comp = compose_many(&flat, change.forward()).unwrap();
        let mut moved_at_phi = OperatorField::zero(Vars::xy(), n, one());
        for k in 0..2 {
            for i in 0..2 {
                moved_at_phi.set_entry(k, i, comp[k * 2 + i].clone());
            }
        }
        let rhs = moved_at_phi.matmul(&jac).unwrap();
        assert_eq!(lhs.entries(), rhs.entries());
    }

    #[test]
    fn transform_roundtrip_and_torsion_naturality() {
        let n = 5;
        let r = op([["u^2", "u + v^2"], ["u*v", "v - u^2"]], n);
        let mut change = FormalChange::identity(Vars::uv(), n, one());
        change
            .push_step(ChangeStep {
                degree: 3,
                parts: vec![uv("u^2*v", n), uv("u^3 - v^3", n)],
            })
            .unwrap();
        let moved = transform_operator(&r, &change).unwrap();
        let back = transform_operator(&moved, &change.inverted().unwrap()).unwrap();
        assert_eq!(back.entries(), r.entries());

        // naturality up to the reliable degree
        let t_then_move = transform_two_form(&nijenhuis_torsion(&r).unwrap(), &change, &one())
            .unwrap();
        let move_then_t = nijenhuis_torsion(&moved).unwrap();
        let reliable = move_then_t.trusted();
        for k in 0..2 {
            let diff = t_then_move
                .entry(k, 0, 1)
                .sub(&move_then_t.entry(k, 0, 1))
                .unwrap();
            assert!(
                diff.truncate_to_degree(reliable).is_zero(),
                "naturality fails at component {k}: {diff}"
            );
        }
    }

    #[test]
    fn is_nijenhuis_wrapper() {
        let n = 4;
        let alpha = parse_rational("3").unwrap();
        let r = template_operator(Family::B4Plus, None::<&Rat>, n, &one()).unwrap();
        assert!(is_nijenhuis(&r, n - 1).unwrap().is_ok());
        let bad = op([["v", "0"], ["0", "u"]], n);
        let witness = is_nijenhuis(&bad, n - 1).unwrap().unwrap_err();
        assert_eq!(witness, (1, 0, 1, 0));
        // beyond the reliable range
        assert!(matches!(
            is_nijenhuis(&r, n),
            Err(TensorError::BeyondReliableDegree { .. })
        ));
        let _ = alpha;
    }
}
