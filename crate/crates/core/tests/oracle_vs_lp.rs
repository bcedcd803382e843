use kpn_core::access::ParticipantSet;
use kpn_core::bound::{build_lp, kappa, AxiomInstance, RowKind, SubsetVar};
use kpn_core::entropy::{enumerate_joint, SecretDependence};
use kpn_core::field::Prime;
use kpn_core::schemes::{SchemeKind, SchemeSpec};
use num_traits::ToPrimitive;

const TOL: f64 = 1e-9;

fn specs() -> Vec<SchemeSpec> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(SchemeSpec::with_default_q(SchemeKind::Sigma1, n).unwrap());
        out.push(SchemeSpec::with_default_q(SchemeKind::Sigma2, n).unwrap());
    }
    out.push(SchemeSpec::new(SchemeKind::Sigma2, 3, Prime::new(2).unwrap()).unwrap());
    out.push(SchemeSpec::new(SchemeKind::Composite, 2, Prime::new(5).unwrap()).unwrap());
    out.push(SchemeSpec::new(SchemeKind::Composite, 3, Prime::new(7).unwrap()).unwrap());
    out
}

/// The normalized entropy vector of a real scheme is a feasible LP point, so
/// its largest share is at least kappa.
#[test]
fn oracle_points_are_lp_feasible() {
    for spec in specs() {
        let structure = spec.structure();
        let m = structure.len();
        let table = enumerate_joint(&spec).unwrap();
        let h_raw = table.entropy_vector();
        let unit = h_raw[1 << m];
        let mut h: Vec<f64> = h_raw.iter().map(|v| v / unit).collect();
        let t = (0..m).map(|i| h[1 << i]).fold(0.0, f64::max);
        h.push(t);

        let lp = build_lp(&structure).unwrap();
        for (row, kind) in lp.program.constraints.iter().zip(&lp.kinds) {
            if let RowKind::Axiom(AxiomInstance::SecretEquality { set, .. }) = kind {
                let x = ParticipantSet(set.0);
                let want = if structure.qualifies(x) {
                    SecretDependence::Determined
                } else {
                    SecretDependence::Independent
                };
                assert_eq!(table.secret_dependence(x), want, "{spec:?} {}", structure.format_set(x));
                continue;
            }
            let lhs: f64 = row.coeffs.iter().map(|(&j, a)| a.to_f64().unwrap() * h[j]).sum();
            let rhs = row.rhs.to_f64().unwrap();
            let ok = match row.relation {
                kpn_core::simplex::Relation::Ge => lhs >= rhs - TOL,
                kpn_core::simplex::Relation::Le => lhs <= rhs + TOL,
                kpn_core::simplex::Relation::Eq => (lhs - rhs).abs() <= TOL,
            };
            assert!(ok, "{spec:?}: {kind:?} gives {lhs} vs {rhs}");
        }
        let k = kappa(&structure).unwrap().to_f64().unwrap();
        assert!(t >= k - TOL, "{spec:?}: largest share {t} below kappa {k}");
    }
}

#[test]
fn composite_meets_the_bound_at_n3() {
    let spec = SchemeSpec::new(SchemeKind::Composite, 3, Prime::new(7).unwrap()).unwrap();
    let table = enumerate_joint(&spec).unwrap();
    let m = spec.structure().len();
    let unit = table.entropy(SubsetVar::secret(m));
    let largest = (0..m).map(|i| table.entropy(SubsetVar(1 << i)) / unit).fold(0.0, f64::max);
    assert!((largest - 1.5).abs() < TOL, "{largest}");
}
