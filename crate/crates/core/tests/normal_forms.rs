use quivertilt_core::*;

fn grid(m: u32) -> Vec<NormalFormParams> {
    grid_with(m, false)
}

fn grid_with(m: u32, generalized: bool) -> Vec<NormalFormParams> {
    let mut out = Vec::new();
    for n1 in 1..=5 {
        for k1 in 0..=n1 {
            for n2 in 1..=5 {
                for k2 in 0..=n2 {
                    for r in -4..=4 {
                        let p = NormalFormParams::nonoriented(n1, k1, n2, k2, r);
                        let ok = if generalized {
                            p.is_generalized(m)
                        } else {
                            p.is_valid(m)
                        };
                        if ok {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    for k in 0..=3 {
        for n in 1..=5 {
            for t in 0..=4 {
                let p = NormalFormParams::oriented(k, n, t);
                if !generalized && p.is_valid(m) {
                    out.push(p);
                }
            }
        }
    }
    out
}

#[test]
fn phi_matches_closed_form() {
    for m in 1..=3 {
        for p in grid(m) {
            let q = build_normal_form(&p, m).unwrap();
            assert!(is_gentle(&q), "{p} m={m}");
            assert_eq!(compute_phi(&q).unwrap(), phi_formula(&p, m), "{p} m={m}");
        }
    }
}

#[test]
fn normal_forms_recognized_and_parameters_recovered() {
    for m in 1..=3 {
        for p in grid(m) {
            let q = build_normal_form(&p, m).unwrap();
            if matches!(p, NormalFormParams::NonOriented { r: 0, .. }) {
                let rep = recognize_m_cluster_tilted(&q, m);
                assert!(rep.accepted, "{p} m={m}\n{rep}");
            }
            let rep = recognize_branched(&q, m);
            let r = DerivedParams::of_normal_form(&p, m).r;
            assert_eq!(rep.accepted, r % m as i64 == 0, "{p} m={m}\n{rep}");
            let d = extract_params(&q, m).unwrap();
            assert_eq!(d.normal_form(), p, "{p} m={m} {d}");
        }
    }
}

#[test]
fn generalized_forms_follow_the_same_formula() {
    for m in 1..=3 {
        let g = grid_with(m, true);
        assert!(!g.is_empty());
        for p in g {
            let q = build_generalized_normal_form(&p, m).unwrap();
            assert!(is_gentle(&q), "{p} m={m}");
            assert_eq!(compute_phi(&q).unwrap(), phi_formula(&p, m), "{p} m={m}");
            assert_eq!(extract_params(&q, m).unwrap().normal_form(), p, "{p} m={m}");
        }
    }
}
