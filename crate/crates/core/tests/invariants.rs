use proptest::prelude::*;
use tatra_core::autiso::automorphism_group;
use tatra_core::coherent_config::{coherent_closure, verify_axioms};
use tatra_core::{FiniteField, Permutation, TatraScheme};

const FIELDS: [(u64, u32); 6] = [(2, 1), (3, 2), (2, 4), (5, 1), (7, 2), (13, 1)];
const SCHEMES: [(u64, u32); 5] = [(4, 3), (5, 2), (7, 3), (9, 4), (8, 7)];

fn field() -> impl Strategy<Value = FiniteField> {
    (0..FIELDS.len()).prop_map(|i| FiniteField::new(FIELDS[i].0, FIELDS[i].1).unwrap())
}

proptest! {
    #[test]
    fn field_axioms(f in field(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = f.order();
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        // Frobenius is additive
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
    }

    #[test]
    fn form_is_constant_on_classes(i in 0..SCHEMES.len(), a in any::<u32>(), b in any::<u32>(), k in any::<u64>()) {
        let x = TatraScheme::build(SCHEMES[i].0, SCHEMES[i].1).unwrap();
        let f = x.field();
        let pts = x.points();
        let (u, v) = (pts[a as usize % pts.len()], pts[b as usize % pts.len()]);
        // a random element of K
        let scale = f.exp(x.n() as u64 * (k % x.m() as u64));
        let u2 = x.canonical(f.mul(scale, u.v1), f.mul(scale, u.v2));
        prop_assert_eq!(u2, u);
        prop_assert_eq!(x.form_value(&u, &v), x.form_value(&v, &u));
        let raw = f.sub(f.mul(f.mul(scale, u.v1), v.v2), f.mul(f.mul(scale, u.v2), v.v1));
        prop_assert_eq!(x.cosets().coset_of(raw), x.form_value(&u, &v));
    }

    #[test]
    fn automorphism_group_is_closed(i in 0..SCHEMES.len(), word in proptest::collection::vec(any::<usize>(), 1..8)) {
        let x = TatraScheme::build(SCHEMES[i].0, SCHEMES[i].1).unwrap();
        let g = automorphism_group(&x).unwrap();
        let gens = g.generators();
        let mut p = Permutation::identity(x.degree());
        for w in word {
            p = p.compose(&gens[w % gens.len()]);
        }
        prop_assert!(g.contains(&p).unwrap());
        prop_assert!(g.contains(&p.inverse()).unwrap());
        let c = x.config();
        for a in 0..x.degree() as u32 {
            for b in 0..x.degree() as u32 {
                prop_assert_eq!(c.color(p.apply(a), p.apply(b)), c.color(a, b));
            }
        }
    }

    #[test]
    fn closure_is_coherent_and_idempotent(size in 1usize..14, colors in 1u32..4, seed in proptest::collection::vec(any::<u32>(), 196)) {
        let cells: Vec<u32> = (0..size * size).map(|i| seed[i] % colors).collect();
        let y = coherent_closure(size, &cells).unwrap();
        prop_assert!(verify_axioms(size, y.cells()).unwrap().passed());
        prop_assert!(coherent_closure(size, y.cells()).unwrap().same_partition(&y));
        // the closure refines the input coloring
        for p in 0..size * size {
            for r in 0..size * size {
                if y.cells()[p] == y.cells()[r] {
                    prop_assert_eq!(cells[p], cells[r]);
                }
            }
        }
    }
}
