use proptest::prelude::*;

use rckit::linalg::{rref_generic, rref_gf2};
use rckit::opspace::{Ambient, AmbientKind};
use rckit::rcmaps::{
    is_range_compatible, join_map, local_space, rc_solution_space, standard_space, AdditiveMap,
};
use rckit::{make_field, Caps, Field, Matrix, OperatorSpace, SubspaceBasis};

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![(Just(2u64), Just(1u32)), (Just(3), Just(1)), (Just(2), Just(2)), (Just(5), Just(1))]
        .prop_map(|(p, k)| make_field(p, k).unwrap())
}

fn ambient_strategy() -> impl Strategy<Value = Ambient> {
    (field_strategy(), 0usize..3, 0usize..4, 0usize..3).prop_map(|(f, kind, n, m)| match kind {
        0 => Ambient::sym(&f, n, m),
        1 => Ambient::alt(&f, n, m),
        _ => Ambient::full(&f, n, m + 1),
    })
}

/// Ambient plus raw generator coordinates for a subspace.
fn space_strategy(max_dim: usize) -> impl Strategy<Value = OperatorSpace> {
    ambient_strategy().prop_flat_map(move |amb| {
        let q = amb.field().order() as u8;
        let d = amb.dim();
        prop::collection::vec(prop::collection::vec(0..q, d), 0..=max_dim).prop_map(move |gens| {
            OperatorSpace::from_coordinates(&amb, gens).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gf2_and_generic_rref_agree(rows in 0usize..9, cols in 0usize..70, seed in any::<u64>()) {
        let f2 = make_field(2, 1).unwrap();
        let mut state = seed | 1;
        let data: Vec<u8> = (0..rows * cols)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state & 1) as u8
            })
            .collect();
        let m = Matrix::from_data(rows, cols, data).unwrap();
        let a = rref_gf2(&m);
        let b = rref_generic(&f2, &m);
        prop_assert_eq!(a.rank, b.rank);
        prop_assert_eq!(a.pivots, b.pivots);
        prop_assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn encode_decode_round_trip(amb in ambient_strategy(), seed in any::<u64>()) {
        let q = amb.field().order() as u64;
        let v: Vec<u8> = (0..amb.dim() as u64).map(|i| ((seed >> (i % 60)) ^ i) % q).map(|x| x as u8).collect();
        let m = amb.decode(&v).unwrap();
        prop_assert_eq!(amb.encode(&m).unwrap(), v);
        if amb.kind() == AmbientKind::Alt {
            for i in 0..amb.n() {
                prop_assert_eq!(m.get(i, i), 0);
            }
        }
    }

    #[test]
    fn double_annihilator(f in field_strategy(), d in 0usize..7, gens in prop::collection::vec(prop::collection::vec(0u8..16, 6), 0..5)) {
        let q = f.order() as u8;
        let vecs = gens.into_iter().map(|v| v.into_iter().take(d).map(|x| x % q).collect()).collect();
        let w = SubspaceBasis::from_vectors(&f, d, vecs).unwrap();
        prop_assert_eq!(w.annihilator().dim(), d - w.dim());
        prop_assert_eq!(w.annihilator().annihilator(), w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn structural_inclusions(s in space_strategy(4)) {
        let caps = Caps::default();
        let rc = rc_solution_space(&s, &caps).unwrap();
        prop_assert!(local_space(&s).is_subspace_of(&rc).unwrap());
        if s.ambient().kind() == AmbientKind::Sym {
            let st = standard_space(&s).unwrap();
            prop_assert!(st.is_subspace_of(&rc).unwrap());
            if s.field().characteristic() != 2 && s.rows() >= 2 {
                prop_assert_eq!(st, local_space(&s));
            }
        }
        // RC closure: every basis map, and a sum of two, is range-compatible
        let maps = rc.maps();
        for m in maps.iter().take(3) {
            prop_assert!(is_range_compatible(m, &caps).unwrap());
        }
        if maps.len() >= 2 {
            prop_assert!(is_range_compatible(&maps[0].add(&maps[1]).unwrap(), &caps).unwrap());
        }
    }

    #[test]
    fn joins_of_local_maps_are_local(s in space_strategy(3), seed in any::<u64>()) {
        let f = s.field().clone();
        let q = f.order() as u64;
        let b = OperatorSpace::full(&Ambient::full(&f, s.rows(), 1));
        let x: Vec<u8> = (0..s.cols() as u64).map(|i| ((seed >> i) % q) as u8).collect();
        let y = vec![(seed % q) as u8];
        let j = join_map(&AdditiveMap::local(&s, &x).unwrap(), &AdditiveMap::local(&b, &y).unwrap()).unwrap();
        let xy: Vec<u8> = x.iter().chain(&y).copied().collect();
        prop_assert_eq!(j.clone(), AdditiveMap::local(j.domain(), &xy).unwrap());
    }
}
