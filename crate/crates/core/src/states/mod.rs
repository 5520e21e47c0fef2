//! Density matrices, the family zoo, PPT classification and separable sampling.

mod bloch;
mod density;
mod family;
mod sampling;

pub use bloch::{product_state_from_bloch, BlochVector};
pub use density::{
    ppt_classify, validate_state_matrix, DensityMatrix, PptClass, PptReport, PPT_TOL, PSD_TOL,
    TRACE_TOL,
};
pub use family::{
    family_registry, family_registry_json, make_family_state, zoo_members, FamilySpec, ParamRange,
    StateFamily, ALL_FAMILIES, MEMS_Q_MAX,
};
pub use sampling::{
    battery_sample, dirichlet_weights, ginibre, haar_ket, random_hermitian, random_state, sample_rng, sample_separable,
    sample_separable_with, SeparableMixture, DEFAULT_SEED, MAX_COMPONENTS,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn state(f: StateFamily, p: &[f64]) -> DensityMatrix {
        make_family_state(f, p).unwrap()
    }

    #[test]
    fn isotropic_limit_is_bell_state() {
        assert_eq!(
            state(StateFamily::Isotropic2x2, &[1.0]),
            state(StateFamily::PhiPlus, &[])
        );
    }

    #[test]
    fn rho_x_at_one_has_uniform_inner_diagonal() {
        let r = state(StateFamily::RhoX, &[1.0]);
        for i in [1, 2, 3, 5, 6, 7] {
            assert!((r.matrix()[(i, i)] - C64::new(1.0 / 9.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            make_family_state(StateFamily::Isotropic2x2, &[-0.5]),
            Err(crate::Error::ParameterOutOfRange { .. })
        ));
        assert!(make_family_state(StateFamily::RhoX, &[0.0]).is_err());
        assert!(make_family_state(StateFamily::RhoX, &[1e6]).is_ok());
        assert!(make_family_state(StateFamily::RhoSt, &[0.295]).is_err());
        assert!(make_family_state(StateFamily::HorodeckiGamma, &[5.01]).is_err());
    }

    #[test]
    fn published_classifications() {
        let iso = |a| ppt_classify(&state(StateFamily::Isotropic2x2, &[a])).class;
        assert_eq!(iso(0.3), PptClass::Ppt);
        assert_eq!(iso(0.34), PptClass::Npt);
        for x in [0.5, 1.0, 2.0, 5.0] {
            assert_eq!(ppt_classify(&state(StateFamily::RhoX, &[x])).class, PptClass::Ppt);
        }
        let h = |g| ppt_classify(&state(StateFamily::HorodeckiGamma, &[g]));
        assert_eq!(h(2.0).class, PptClass::Ppt);
        assert_eq!(h(3.5).class, PptClass::Ppt);
        assert_eq!(h(4.2).class, PptClass::Npt);
        assert_eq!(
            ppt_classify(&state(StateFamily::Npt2x3, &[])).class,
            PptClass::Npt
        );
    }

    #[test]
    fn rho_st_trace_is_exact() {
        for s in [0.2926, 0.296, 0.3] {
            for t in [0.02, 0.0213] {
                let r = state(StateFamily::RhoSt, &[s, t]);
                assert!((r.matrix().trace().re - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bell_marginal_from_explicit_matrix() {
        let r = state(StateFamily::RhoEnt, &[]);
        let m = r.marginal_b();
        assert!(m.approx_eq(&crate::linalg::ComplexMatrix::identity(2).scale(0.5), 1e-15));
    }

    #[test]
    fn registry_lists_every_family() {
        let json = family_registry_json().unwrap();
        for f in ALL_FAMILIES {
            assert!(json.contains(f.id()));
            assert_eq!(f.id().parse::<StateFamily>().unwrap(), f);
        }
    }
}
