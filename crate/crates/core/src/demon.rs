//! Particle ⊗ pointer density matrices for the measurement step.
//!
//! The particle space is truncated to `n_pair` degenerate pairs of the
//! infinite-barrier problem. Its basis is the energy eigenbasis
//! {ψ_{2n}, ψ_{2n+1}} (even, odd), in which the side states are
//! L_n = (ψ_{2n} - ψ_{2n+1})/√2 and R_n = (ψ_{2n} + ψ_{2n+1})/√2.
//! The pointer basis is (D_L, D_R). Joint index = particle · 2 + pointer.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, LN_2};

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues in [-EIG_CLAMP, 0) are treated as rounding and dropped.
pub const EIG_CLAMP: f64 = 1e-10;
/// Projective measurement angle λδt/ħ.
pub const PROJECTIVE_ANGLE: f64 = FRAC_PI_4;
const TRUNCATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Degenerate pairs {ψ_{2n}, ψ_{2n+1}} with the barrier in place.
    BarrierPairs,
    /// Free-oscillator levels ψ_0 .. ψ_{2 n_pair - 1}.
    Harmonic,
}

/// Side-state relabeling of the pair basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftRightBasis {
    pub n_pair: usize,
    /// Energy of both L_n and R_n, in ħω.
    pub energies: Vec<f64>,
    /// Columns are L_0, R_0, L_1, R_1, ... in the pair basis.
    pub vectors: DMatrix<f64>,
}

pub fn left_right_basis(n_pair: usize) -> Result<LeftRightBasis> {
    check_pairs(n_pair)?;
    let dim = 2 * n_pair;
    let mut v = DMatrix::zeros(dim, dim);
    for n in 0..n_pair {
        let (e, o) = (2 * n, 2 * n + 1);
        v[(e, 2 * n)] = FRAC_1_SQRT_2;
        v[(o, 2 * n)] = -FRAC_1_SQRT_2;
        v[(e, 2 * n + 1)] = FRAC_1_SQRT_2;
        v[(o, 2 * n + 1)] = FRAC_1_SQRT_2;
    }
    Ok(LeftRightBasis {
        n_pair,
        energies: (0..n_pair).map(|n| 2.0 * n as f64 + 1.5).collect(),
        vectors: v,
    })
}

fn check_pairs(n_pair: usize) -> Result<()> {
    if n_pair == 0 {
        return Err(Error::Domain("n_pair must be at least 1".into()));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!(
            "theta = {theta} must be positive and finite"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub rho: DMatrix<f64>,
    pub basis: Basis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointerState {
    pub rho: Matrix2<f64>,
}

impl PointerState {
    /// (D_L + D_R)/√2.
    pub fn neutral() -> Self {
        PointerState {
            rho: Matrix2::from_element(0.5),
        }
    }

    /// Equal mixture of D_L and D_R.
    pub fn mixed() -> Self {
        PointerState {
            rho: Matrix2::from_diagonal_element(0.5),
        }
    }

    pub fn entropy(&self) -> Result<f64> {
        vn_entropy(&DMatrix::from_column_slice(2, 2, self.rho.as_slice()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub rho: DMatrix<f64>,
    pub basis: Basis,
    pub theta: f64,
    pub n_pair: usize,
}

impl JointState {
    pub fn product(particle: &ParticleState, pointer: &PointerState, theta: f64) -> Result<Self> {
        let dim = particle.rho.nrows();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Dimension {
                expected: 2,
                got: dim,
            });
        }
        let p = DMatrix::from_column_slice(2, 2, pointer.rho.as_slice());
        Ok(JointState {
            rho: particle.rho.kronecker(&p),
            basis: particle.basis,
            theta,
            n_pair: dim / 2,
        })
    }

    fn dim(&self) -> usize {
        4 * self.n_pair
    }

    pub fn particle(&self) -> ParticleState {
        let n = 2 * self.n_pair;
        let rho = DMatrix::from_fn(n, n, |i, j| {
            self.rho[(2 * i, 2 * j)] + self.rho[(2 * i + 1, 2 * j + 1)]
        });
        ParticleState {
            rho,
            basis: self.basis,
        }
    }

    pub fn pointer(&self) -> PointerState {
        let mut m = Matrix2::zeros();
        for p in 0..2 * self.n_pair {
            for a in 0..2 {
                for b in 0..2 {
                    m[(a, b)] += self.rho[(2 * p + a, 2 * p + b)];
                }
            }
        }
        PointerState { rho: m }
    }
}

/// Thermal state of the particle behind a central impenetrable barrier,
/// in the pair basis. Diagonal there and in the side basis, because each
/// degenerate pair carries equal weights.
pub fn rho_perp(theta: f64, n_pair: usize) -> Result<ParticleState> {
    check_theta(theta)?;
    check_pairs(n_pair)?;
    let ratio = (-2.0 * theta * n_pair as f64).exp();
    if ratio > TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            tail: ratio,
            tolerance: TRUNCATION_TOLERANCE,
        });
    }
    let w: Vec<f64> = (0..n_pair)
        .map(|n| (-2.0 * theta * n as f64).exp())
        .collect();
    let z = 2.0 * w.iter().sum::<f64>();
    let diag = (0..2 * n_pair).map(|i| w[i / 2] / z);
    Ok(ParticleState {
        rho: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(2 * n_pair, diag)),
        basis: Basis::BarrierPairs,
    })
}

/// Thermal state of the free oscillator on its lowest 2·n_pair levels.
pub fn rho_in(theta: f64, n_pair: usize) -> Result<ParticleState> {
    check_theta(theta)?;
    check_pairs(n_pair)?;
    let dim = 2 * n_pair;
    let ratio = (-theta * dim as f64).exp();
    if ratio > TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            tail: ratio,
            tolerance: TRUNCATION_TOLERANCE,
        });
    }
    let w: Vec<f64> = (0..dim).map(|k| (-theta * k as f64).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(ParticleState {
        rho: DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            w.iter().map(|x| x / z),
        )),
        basis: Basis::Harmonic,
    })
}

/// Side projectors (P_L, P_R) on the pair basis.
pub fn projectors(n_pair: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let lr = left_right_basis(n_pair)?;
    let dim = 2 * n_pair;
    let mut pl = DMatrix::zeros(dim, dim);
    let mut pr = DMatrix::zeros(dim, dim);
    for n in 0..n_pair {
        let l = lr.vectors.column(2 * n);
        let r = lr.vectors.column(2 * n + 1);
        pl += l * l.transpose();
        pr += r * r.transpose();
    }
    Ok((pl, pr))
}

/// Π = P_L - P_R: +1 on left states, -1 on right states.
pub fn observable_pi(n_pair: usize) -> Result<DMatrix<f64>> {
    let (pl, pr) = projectors(n_pair)?;
    Ok(pl - pr)
}

/// Normalized P ρ P / tr(P ρ P).
pub fn project(rho: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if rho.shape() != p.shape() {
        return Err(Error::Dimension {
            expected: p.nrows(),
            got: rho.nrows(),
        });
    }
    let m = p * rho * p;
    let tr = m.trace();
    if tr <= 0.0 {
        return Err(Error::InvalidState("projection has zero weight".into()));
    }
    Ok(m / tr)
}

/// cos φ · 1 + sin φ · (Π ⊗ J), with J = [[0, 1], [-1, 0]] on (D_L, D_R).
/// At φ = π/4 this maps L ⊗ D_0 to L ⊗ D_L and R ⊗ D_0 to R ⊗ D_R.
pub fn measurement_unitary(n_pair: usize, angle: f64) -> Result<DMatrix<f64>> {
    let pi = observable_pi(n_pair)?;
    let j = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let dim = 4 * n_pair;
    Ok(DMatrix::identity(dim, dim) * angle.cos() + pi.kronecker(&j) * angle.sin())
}

/// Applies the projective measurement interaction.
pub fn measure(joint: &JointState) -> Result<JointState> {
    if joint.basis != Basis::BarrierPairs {
        return Err(Error::InvalidState(
            "measurement acts on the barrier pair basis".into(),
        ));
    }
    let dim = joint.dim();
    if joint.rho.nrows() != dim || joint.rho.ncols() != dim {
        return Err(Error::Dimension {
            expected: dim,
            got: joint.rho.nrows(),
        });
    }
    let u = measurement_unitary(joint.n_pair, PROJECTIVE_ANGLE)?;
    Ok(JointState {
        rho: &u * &joint.rho * u.transpose(),
        ..joint.clone()
    })
}

/// -Tr ρ ln ρ in k_B.
pub fn vn_entropy(rho: &DMatrix<f64>) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::Dimension {
            expected: rho.nrows(),
            got: rho.ncols(),
        });
    }
    let sym = (rho + rho.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.min();
    if min < -EIG_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.ln())
        .sum())
}

/// S(particle) + S(pointer) - S(joint).
pub fn mutual_information(joint: &JointState) -> Result<f64> {
    let sp = vn_entropy(&joint.particle().rho)?;
    let sd = joint.pointer().entropy()?;
    let sj = vn_entropy(&joint.rho)?;
    Ok(sp + sd - sj)
}

/// Joint state after the expansion returns both branches to ρ_in:
/// ρ_in ⊗ (|D_L⟩⟨D_L| + |D_R⟩⟨D_R|)/2, in the harmonic basis.
pub fn end_of_cycle_state(theta: f64, n_pair: usize) -> Result<JointState> {
    JointState::product(&rho_in(theta, n_pair)?, &PointerState::mixed(), theta)
}

/// Erasure bookkeeping for the pointer at the end of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResetEntry {
    /// Pointer entropy before reset, k_B.
    pub pointer_entropy: f64,
    /// Minimum work to reset, k_B T · entropy, in ħω.
    pub w_min: f64,
}

pub fn reset_cost(theta: f64, pointer: &PointerState) -> Result<ResetEntry> {
    check_theta(theta)?;
    let s = pointer.entropy()?;
    Ok(ResetEntry {
        pointer_entropy: s,
        w_min: s / theta,
    })
}

/// The one-bit reset bound (1/θ) ln 2 in ħω.
pub fn landauer_bound(theta: f64) -> f64 {
    LN_2 / theta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    #[test]
    fn side_basis_is_orthonormal() {
        let lr = left_right_basis(3).unwrap();
        let g = lr.vectors.transpose() * &lr.vectors;
        assert!(max_abs(&(g - DMatrix::identity(6, 6))) < 1e-15);
        assert_eq!(left_right_basis(1).unwrap().energies, vec![1.5]);
    }

    #[test]
    fn projector_algebra() {
        let (pl, pr) = projectors(5).unwrap();
        let id = DMatrix::identity(10, 10);
        assert!(max_abs(&(&pl + &pr - &id)) < 1e-15);
        assert!(max_abs(&(&pl * &pr)) < 1e-15);
        let pi = observable_pi(5).unwrap();
        assert!(max_abs(&(&pi * &pi - &id)) < 1e-15);
    }

    #[test]
    fn projected_states_are_side_thermal_states() {
        let rho = rho_perp(1.0, 20).unwrap().rho;
        let (pl, pr) = projectors(20).unwrap();
        let rl = project(&rho, &pl).unwrap();
        let rr = project(&rho, &pr).unwrap();
        assert!(max_abs(&((&rl + &rr) * 0.5 - &rho)) < 1e-12);
        // ρ_L is 2 P_L ρ P_L since both sides carry weight 1/2
        assert!(max_abs(&(&rl - (&pl * &rho * &pl) * 2.0)) < 1e-12);
    }

    #[test]
    fn perp_state_matches_thermo() {
        let s = vn_entropy(&rho_perp(1.0, 20).unwrap().rho).unwrap();
        let cf = crate::thermo::closed_form(crate::thermo::Stage::BarrierIn, 1.0).unwrap();
        assert!((s - cf.s).abs() < 1e-8);
        let cold = vn_entropy(&rho_perp(50.0, 1).unwrap().rho).unwrap();
        assert!((cold - LN_2).abs() < 1e-12);
        assert!(rho_perp(0.1, 5).is_err());
    }

    #[test]
    fn measurement_entangles_pointer() {
        let (t, n) = (1.0, 20);
        let before =
            JointState::product(&rho_perp(t, n).unwrap(), &PointerState::neutral(), t).unwrap();
        let u = measurement_unitary(n, PROJECTIVE_ANGLE).unwrap();
        assert!(max_abs(&(&u * u.transpose() - DMatrix::identity(4 * n, 4 * n))) < 1e-12);

        let after = measure(&before).unwrap();
        // no coherence between pointer outcomes
        for i in 0..4 * n {
            for j in 0..4 * n {
                if i % 2 != j % 2 {
                    assert!(after.rho[(i, j)].abs() < 1e-12);
                }
            }
        }
        let (pl, pr) = projectors(n).unwrap();
        let rho = rho_perp(t, n).unwrap().rho;
        let dl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let dr = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let expect = (project(&rho, &pl).unwrap().kronecker(&dl)
            + project(&rho, &pr).unwrap().kronecker(&dr))
            * 0.5;
        assert!(max_abs(&(&after.rho - expect)) < 1e-12);

        assert!(before.pointer().entropy().unwrap().abs() < 1e-12);
        assert!((after.pointer().entropy().unwrap() - LN_2).abs() < 1e-8);
        let sp0 = vn_entropy(&before.particle().rho).unwrap();
        let sp1 = vn_entropy(&after.particle().rho).unwrap();
        assert!((sp0 - sp1).abs() < 1e-8);
        let sj0 = vn_entropy(&before.rho).unwrap();
        let sj1 = vn_entropy(&after.rho).unwrap();
        assert!((sj0 - sj1).abs() < 1e-10);
        assert!(mutual_information(&before).unwrap().abs() < 1e-10);
        assert!((mutual_information(&after).unwrap() - LN_2).abs() < 1e-8);
    }

    #[test]
    fn end_of_cycle() {
        let j = end_of_cycle_state(1.0, 20).unwrap();
        assert_eq!(j.basis, Basis::Harmonic);
        let sp = vn_entropy(&j.particle().rho).unwrap();
        let cf = crate::thermo::closed_form(crate::thermo::Stage::Initial, 1.0).unwrap();
        assert!((sp - cf.s).abs() < 1e-8);
        assert!((j.pointer().entropy().unwrap() - LN_2).abs() < 1e-12);
        assert!(mutual_information(&j).unwrap().abs() < 1e-10);
        let reset = reset_cost(1.0, &j.pointer()).unwrap();
        assert!((reset.w_min - landauer_bound(1.0)).abs() < 1e-12);
        assert!(measure(&j).is_err());
    }

    #[test]
    fn entropy_edge_cases() {
        let pure = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(vn_entropy(&pure).unwrap(), 0.0);
        let mixed = DMatrix::from_diagonal_element(2, 2, 0.5);
        assert!((vn_entropy(&mixed).unwrap() - LN_2).abs() < 1e-15);
        let bad = DMatrix::from_row_slice(2, 2, &[1.1, 0.0, 0.0, -0.1]);
        assert!(matches!(vn_entropy(&bad), Err(Error::NotPsd { .. })));
        let one = JointState::product(
            &ParticleState {
                rho: DMatrix::from_diagonal_element(2, 2, 0.5),
                basis: Basis::BarrierPairs,
            },
            &PointerState::neutral(),
            1.0,
        )
        .unwrap();
        assert!(mutual_information(&one).unwrap().abs() < 1e-12);
    }
}
