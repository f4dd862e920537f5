use super::forms::{hermitian_units, symmetric_units, symplectic_basis};
use super::nilpotent::{nilpotent_pair_reduce, ReduceMode, ReductionWitness};
use super::split::split_regular_nilpotent;
use super::{check_shapes, pair_product, EquivalenceWitness, PairError};
use crate::blocks::{Flavor, StructuredPairForm};
use crate::exactmat::{hermitian_inertia, inverse};
use crate::{ExactMatrix, GaussianRational, Kind};

/// Canonical block counts of a structured pair, with a witness when one
/// exists over `Q(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredCanonical {
    pub form: StructuredPairForm,
    pub witness: Option<EquivalenceWitness>,
    /// Why `witness` is absent.
    pub witness_note: Option<String>,
}

/// First matching flavor in the order Hermitian, skew-Hermitian, symmetric,
/// skew-symmetric; a zero product is Hermitian (Star) or symmetric (T).
pub fn detect_flavor(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> Result<Flavor, PairError> {
    check_shapes(e, q)?;
    let p = pair_product(e, q, kind);
    let found = match kind {
        Kind::Star if p.is_hermitian() => Some(Flavor::HermStar),
        Kind::Star if p.is_skew_hermitian() => Some(Flavor::SkewHermStar),
        Kind::T if p.is_symmetric() => Some(Flavor::SymT),
        Kind::T if p.is_skew_symmetric() => Some(Flavor::SkewSymT),
        _ => None,
    };
    found.ok_or_else(|| PairError::UnsupportedFlavor(kind.name().into()))
}

/// `(S, n_plus, n_minus)` with `S^T R S` (or `S^* R S`) the canonical regular product.
fn regular_part(r: &ExactMatrix, flavor: Flavor) -> Result<(usize, usize, Result<ExactMatrix, String>), PairError> {
    let k = r.rows();
    let inertia = |m: &ExactMatrix| hermitian_inertia(m).map_err(|e| PairError::Inconsistent(e.to_string()));
    Ok(match flavor {
        Flavor::HermStar => {
            let (p, q, _) = inertia(r)?;
            (p, q, hermitian_units(r).map(|(s, _, _)| s))
        }
        Flavor::SkewHermStar => {
            let h = r.scale(&-GaussianRational::i());
            let (p, q, _) = inertia(&h)?;
            (p, q, hermitian_units(&h).map(|(s, _, _)| s))
        }
        Flavor::SymT => (k, 0, symmetric_units(r)),
        Flavor::SkewSymT => (k / 2, 0, Ok(symplectic_basis(r))),
    })
}

/// Canonical form of a pair whose product `E^T Q` / `E^* Q` is symmetric,
/// skew-symmetric, Hermitian or skew-Hermitian; either member may be singular.
///
/// Split off the regular part `(I_k, R)`, reduce `R` to unit pivots, and
/// reduce the remaining nilpotent pair. The nilpotent counts are the ones
/// invariant under every nonsingular `V`. `flavor`, when given, must match
/// the product.
pub fn structured_pair_canonical(
    e: &ExactMatrix,
    q: &ExactMatrix,
    kind: Kind,
    flavor: Option<Flavor>,
) -> Result<StructuredCanonical, PairError> {
    let detected = detect_flavor(e, q, kind)?;
    let flavor = match flavor {
        None => detected,
        Some(f) => {
            let p = pair_product(e, q, kind);
            let ok = f.kind() == kind
                && match f {
                    Flavor::HermStar => p.is_hermitian(),
                    Flavor::SkewHermStar => p.is_skew_hermitian(),
                    Flavor::SymT => p.is_symmetric(),
                    Flavor::SkewSymT => p.is_skew_symmetric(),
                };
            if !ok {
                return Err(PairError::UnsupportedFlavor(format!("{} requested but product does not match", f.name())));
            }
            f
        }
    };
    let split = split_regular_nilpotent(e, q, kind)?;
    let (n_plus, n_minus, s) = regular_part(&split.r, flavor)?;
    let nil = nilpotent_pair_reduce(&split.e_nil, &split.q_nil, kind, ReduceMode::ExactNonsingularV)?;
    let counts = nil.counts;
    let form = StructuredPairForm { flavor, n_plus, n_minus, a: counts.a, b: counts.b, c: counts.c, d: counts.d };
    let (witness, witness_note) = match s {
        Err(note) => (None, Some(note)),
        Ok(s) => {
            let ReductionWitness::Exact(nw) = nil.witness else {
                return Err(PairError::Inconsistent("exact mode returned a float witness".into()));
            };
            let s_inv = inverse(&s).ok_or_else(|| PairError::Inconsistent("regular basis is singular".into()))?;
            let regular = EquivalenceWitness { u: s_inv, v: s, kind, v_unitary: false };
            let w = split.witness.then(&regular.direct_sum(&nw));
            let (ce, cq) = form.realize()?;
            if !w.maps((e, q), (&ce, &cq)) {
                return Err(PairError::Inconsistent("structured witness does not reproduce the canonical pair".into()));
            }
            (Some(w), None)
        }
    };
    Ok(StructuredCanonical { form, witness, witness_note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzz;
    use crate::GaussianRational as G;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| G::int(v)).collect()).collect())
    }

    fn form(flavor: Flavor, n_plus: usize, n_minus: usize, [a, b, c, d]: [usize; 4]) -> StructuredPairForm {
        StructuredPairForm { flavor, n_plus, n_minus, a, b, c, d }
    }

    #[test]
    fn hermitian_with_mixed_signs() {
        let got = structured_pair_canonical(&ExactMatrix::identity(2), &m(&[&[2, 0], &[0, -3]]), Kind::Star, None).unwrap();
        assert_eq!(got.form, form(Flavor::HermStar, 1, 1, [0; 4]));
        // 2 and 3 are not both norms, so the exact witness may be missing; the counts are not
        assert!(!got.form.is_psd());
    }

    #[test]
    fn skew_symmetric_block_is_fixed() {
        let h = m(&[&[0, 1], &[-1, 0]]);
        let got = structured_pair_canonical(&ExactMatrix::identity(2), &h, Kind::T, None).unwrap();
        assert_eq!(got.form, form(Flavor::SkewSymT, 1, 0, [0; 4]));
        assert_eq!(got.witness.unwrap().apply(&ExactMatrix::identity(2), &h).unwrap(), (ExactMatrix::identity(2), h));
    }

    #[test]
    fn singular_hermitian_pair() {
        let e = m(&[&[1, 0], &[0, 0]]);
        let got = structured_pair_canonical(&e, &e, Kind::Star, None).unwrap();
        assert_eq!(got.form, form(Flavor::HermStar, 1, 0, [0, 0, 1, 0]));
        assert!(got.form.is_psd());
        assert!(got.witness.is_some());
    }

    #[test]
    fn flavor_precedence_and_mismatch() {
        let z = ExactMatrix::zeros(2, 2);
        assert_eq!(detect_flavor(&z, &z, Kind::Star).unwrap(), Flavor::HermStar);
        assert_eq!(detect_flavor(&z, &z, Kind::T).unwrap(), Flavor::SymT);
        let i = ExactMatrix::identity(1);
        let r = structured_pair_canonical(&i, &i, Kind::T, Some(Flavor::SkewSymT));
        assert!(matches!(r, Err(PairError::UnsupportedFlavor(_))));
        let skew = ExactMatrix::from_rows(vec![vec![G::i()]]);
        assert_eq!(detect_flavor(&i, &skew, Kind::Star).unwrap(), Flavor::SkewHermStar);
    }

    #[test]
    fn planted_structured_pairs() {
        let mut rng = fuzz::rng(31);
        for trial in 0..24 {
            let flavor = Flavor::ALL[trial % 4];
            let kind = flavor.kind();
            let (n_plus, n_minus) = match flavor {
                Flavor::SymT | Flavor::SkewSymT => (1 + trial % 2, 0),
                _ => (1 + trial % 2, trial % 3 % 2),
            };
            let f = form(flavor, n_plus, n_minus, [trial % 2, (trial / 2) % 2, (trial / 3) % 2, (trial / 5) % 2]);
            let (e0, q0) = f.realize().unwrap();
            let n = f.dim();
            let w = EquivalenceWitness { u: fuzz::nonsingular(&mut rng, n, 2), v: fuzz::nonsingular(&mut rng, n, 2), kind, v_unitary: false };
            let (e, q) = w.apply(&e0, &q0).unwrap();
            let got = structured_pair_canonical(&e, &q, kind, None).unwrap();
            assert_eq!(got.form, f, "trial {trial}");
            let wit = got.witness.unwrap_or_else(|| panic!("trial {trial}: {:?}", got.witness_note));
            assert!(wit.maps((&e, &q), (&e0, &q0)), "trial {trial}");
        }
    }
}
