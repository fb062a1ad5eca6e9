//! Formal coordinate changes tangent to the identity.
//!
//! A [`FormalChange`] is a tower of per-degree perturbations
//! `id + P_2, id + P_3, ...` (each `P_k` homogeneous of degree `k`),
//! together with the composed forward map and its formal inverse, both
//! truncated at the working order. Composition order: the degree-2 step
//! is applied first, so `forward = phi_N ∘ ... ∘ phi_2`.

use crate::coeff::Coeff;
use crate::error::SeriesError;
use crate::series::{compose_many, HomogeneousPart, Series, Vars};

/// One homogeneous step of the tower: `new_i = old_i + parts[i](old)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChangeStep<C: Coeff> {
    pub degree: u32,
    pub parts: Vec<Series<C>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormalChange<C: Coeff> {
    vars: Vars,
    trunc: u32,
    steps: Vec<ChangeStep<C>>,
    forward: Vec<Series<C>>,
    inverse: Vec<Series<C>>,
}

impl<C: Coeff> FormalChange<C> {
    pub fn identity(vars: Vars, trunc: u32, one: C) -> Self {
        let n = vars.len();
        let forward: Vec<Series<C>> = (0..n)
            .map(|i| Series::var(vars.clone(), trunc, i, one.clone()).expect("identity map"))
            .collect();
        FormalChange {
            vars,
            trunc,
            steps: Vec::new(),
            forward: forward.clone(),
            inverse: forward,
        }
    }

    /// Build from an explicit forward map `id + higher order`. The tower
    /// factorization is recovered degree by degree.
    pub fn from_forward(forward: Vec<Series<C>>) -> Result<Self, SeriesError> {
        let (vars, trunc) = map_shape(&forward)?;
        let one = identity_scale(&forward, &vars, trunc)?;
        let mut change = Self::identity(vars.clone(), trunc, one.clone());
        // Peel homogeneous layers: at each degree take the residual slice
        // of forward relative to the current tower composite.
        for k in 2..=trunc {
            let residual: Vec<Series<C>> = forward
                .iter()
                .zip(&change.forward)
                .map(|(f, cur)| f.sub(cur))
                .collect::<Result<_, _>>()?;
            let parts: Vec<Series<C>> = residual
                .iter()
                .map(|r| r.homogeneous_part(k).map(HomogeneousPart::into_series))
                .collect::<Result<_, _>>()?;
            if parts.iter().all(Series::is_zero) {
                continue;
            }
            change.push_step(ChangeStep { degree: k, parts })?;
        }
        // Degrees beyond the truncation can hold nothing; the composite
        // must now agree with the requested map.
        for (f, cur) in forward.iter().zip(&change.forward) {
            if f != cur {
                return Err(SeriesError::NonIdentityLinearPart { component: 0 });
            }
        }
        Ok(change)
    }

    /// Append one homogeneous step (applied after all existing ones).
    pub fn push_step(&mut self, step: ChangeStep<C>) -> Result<(), SeriesError> {
        if step.parts.len() != self.vars.len() {
            return Err(SeriesError::VarMismatch(
                self.vars.to_string(),
                format!("{} components", step.parts.len()),
            ));
        }
        for p in &step.parts {
            for (m, _) in p.terms() {
                if m.total_degree() != step.degree {
                    return Err(SeriesError::DegreeOutOfRange {
                        degree: m.total_degree(),
                        max: step.degree,
                    });
                }
            }
        }
        let one = self.one();
        let step_fwd: Vec<Series<C>> = (0..self.vars.len())
            .map(|i| {
                Series::var(self.vars.clone(), self.trunc, i, one.clone())
                    .expect("coordinate series")
                    .add(&step.parts[i])
            })
            .collect::<Result<_, _>>()?;
        let step_inv = invert_map(&step_fwd)?;
        // forward_new = step ∘ forward_old, inverse_new = inverse_old ∘ step⁻¹
        self.forward = compose_many(&step_fwd, &self.forward)?;
        self.inverse = compose_many(&self.inverse, &step_inv)?;
        self.steps.push(step);
        Ok(())
    }

    fn one(&self) -> C {
        self.forward
            .iter()
            .find_map(|s| s.proto())
            .expect("identity part present")
            .of_int(1)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn steps(&self) -> &[ChangeStep<C>] {
        &self.steps
    }

    pub fn forward(&self) -> &[Series<C>] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Series<C>] {
        &self.inverse
    }

    pub fn is_identity(&self) -> bool {
        self.forward
            .iter()
            .enumerate()
            .all(|(i, s)| is_coordinate(s, i))
    }

    /// The change with forward and inverse swapped.
    pub fn inverted(&self) -> Result<Self, SeriesError> {
        Self::from_forward(self.inverse.clone())
    }

    /// `other` applied after `self` (`forward = other.forward ∘ self.forward`).
    pub fn then(&self, other: &Self) -> Result<Self, SeriesError> {
        let fwd = compose_many(&other.forward, &self.forward)?;
        let mut out = Self::from_forward(fwd)?;
        // Preserve the step history where it is cheap to do so.
        if self.steps.is_empty() {
            out.steps = other.steps.clone();
        } else if other.steps.is_empty() {
            out.steps = self.steps.clone();
        }
        Ok(out)
    }
}

fn map_shape<C: Coeff>(map: &[Series<C>]) -> Result<(Vars, u32), SeriesError> {
    let first = map.first().ok_or(SeriesError::ArgCountMismatch {
        expected: 1,
        got: 0,
    })?;
    let vars = first.vars().clone();
    let trunc = first.truncation();
    if map.len() != vars.len() {
        return Err(SeriesError::ArgCountMismatch {
            expected: vars.len(),
            got: map.len(),
        });
    }
    Ok((vars, trunc))
}

fn is_coordinate<C: Coeff>(s: &Series<C>, index: usize) -> bool {
    s.num_terms() == 1
        && s.terms().all(|(m, c)| {
            m.total_degree() == 1 && m.0[index] == 1 && c.is_one()
        })
}

/// Check the map is `id + higher order` and return its unit coefficient.
fn identity_scale<C: Coeff>(
    map: &[Series<C>],
    vars: &Vars,
    _trunc: u32,
) -> Result<C, SeriesError> {
    let n = vars.len();
    let mut one: Option<C> = None;
    for (i, s) in map.iter().enumerate() {
        if s.constant_term().is_some() {
            return Err(SeriesError::NonIdentityLinearPart { component: i });
        }
        for j in 0..n {
            let mono = crate::series::Mono::var(n, j);
            let c = s.coefficient(&mono.0);
            match (j == i, c) {
                (true, Some(c)) if c.is_one() => one = Some(c.clone()),
                (true, _) => return Err(SeriesError::NonIdentityLinearPart { component: i }),
                (false, Some(c)) if !c.is_zero() => {
                    return Err(SeriesError::NonIdentityLinearPart { component: i })
                }
                _ => {}
            }
        }
    }
    Ok(one.expect("nonempty map").of_int(1))
}

/// Formal inverse of `id + higher order`, by the fixed-point iteration
/// `psi <- id - P ∘ psi` which settles one degree per pass.
pub fn invert_map<C: Coeff>(map: &[Series<C>]) -> Result<Vec<Series<C>>, SeriesError> {
    let (vars, trunc) = map_shape(map)?;
    let one = identity_scale(map, &vars, trunc)?;
    let n = vars.len();
    let idmap: Vec<Series<C>> = (0..n)
        .map(|i| Series::var(vars.clone(), trunc, i, one.clone()))
        .collect::<Result<_, _>>()?;
    let pert: Vec<Series<C>> = map
        .iter()
        .zip(&idmap)
        .map(|(f, id)| f.sub(id))
        .collect::<Result<_, _>>()?;
    let mut inv = idmap.clone();
    for _ in 1..trunc.max(1) {
        let pert_of_inv = compose_many(&pert, &inv)?;
        let next: Vec<Series<C>> = idmap
            .iter()
            .zip(&pert_of_inv)
            .map(|(id, p)| id.sub(p))
            .collect::<Result<_, _>>()?;
        if next == inv {
            break;
        }
        inv = next;
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoeffMode, Rat};
    use crate::series::parse_polynomial;

    fn uv(text: &str, trunc: u32) -> Series<Rat> {
        parse_polynomial(text, &Vars::uv(), trunc, CoeffMode::Rational).unwrap()
    }

    #[test]
    fn identity_inverts_to_identity() {
        let one = crate::coeff::parse_rational("1").unwrap();
        let id = FormalChange::identity(Vars::uv(), 5, one);
        assert!(id.is_identity());
        let inv = id.inverted().unwrap();
        assert!(inv.is_identity());
    }

    #[test]
    fn shear_in_other_variable_inverts_exactly() {
        // (u + v^2, v) -> (u - v^2, v) at any truncation
        for n in [2u32, 3, 6, 9] {
            let fwd = vec![uv("u + v^2", n), uv("v", n)];
            let change = FormalChange::from_forward(fwd).unwrap();
            assert_eq!(change.inverse()[0], uv("u - v^2", n));
            assert_eq!(change.inverse()[1], uv("v", n));
        }
    }

    #[test]
    fn self_shear_needs_higher_corrections() {
        // (u + u^2, v) with N = 3 inverts to (u - u^2 + 2u^3, v)
        let n = 3;
        let change = FormalChange::from_forward(vec![uv("u + u^2", n), uv("v", n)]).unwrap();
        assert_eq!(change.inverse()[0], uv("u - u^2 + 2*u^3", n));
        assert_eq!(change.inverse()[1], uv("v", n));
        // re-composition gives the identity through degree N
        let both = compose_many(change.forward(), change.inverse()).unwrap();
        assert_eq!(both[0], uv("u", n));
        assert_eq!(both[1], uv("v", n));
    }

    #[test]
    fn roundtrip_both_ways_random_tower() {
        let n = 7;
        let mut change = FormalChange::identity(
            Vars::uv(),
            n,
            crate::coeff::parse_rational("1").unwrap(),
        );
        change
            .push_step(ChangeStep {
                degree: 2,
                parts: vec![uv("u*v - 3*v^2", n), uv("2*u^2", n)],
            })
            .unwrap();
        change
            .push_step(ChangeStep {
                degree: 3,
                parts: vec![uv("u^3", n), uv("-1/2*u*v^2", n)],
            })
            .unwrap();
        let fi = compose_many(change.forward(), change.inverse()).unwrap();
        let if_ = compose_many(change.inverse(), change.forward()).unwrap();
        assert_eq!(fi[0], uv("u", n));
        assert_eq!(fi[1], uv("v", n));
        assert_eq!(if_[0], uv("u", n));
        assert_eq!(if_[1], uv("v", n));
    }

    #[test]
    fn non_identity_linear_part_rejected() {
        let n = 4;
        let err = FormalChange::from_forward(vec![uv("2*u", n), uv("v", n)]).unwrap_err();
        assert!(matches!(err, SeriesError::NonIdentityLinearPart { .. }));
        let err = FormalChange::from_forward(vec![uv("u + 1", n), uv("v", n)]).unwrap_err();
        assert!(matches!(err, SeriesError::NonIdentityLinearPart { .. }));
        let err = FormalChange::from_forward(vec![uv("u + v", n), uv("v", n)]).unwrap_err();
        assert!(matches!(err, SeriesError::NonIdentityLinearPart { .. }));
    }
}
