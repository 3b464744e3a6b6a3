//! The synthesized laws against products of unipotent matrices: for a
//! faithful nilpotent representation `X_i`, `exp(Σ (g*h)_i X_i)` must equal
//! `exp(Σ g_i X_i) exp(Σ h_i X_i)`.

use nilnet::rational::random_q;
use nilnet::{synthesize_law, GroupSpec, Point, Q};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Mat = Vec<Vec<Q>>;

fn zero(d: usize) -> Mat {
    vec![vec![Q::zero(); d]; d]
}

fn unit(d: usize, i: usize, j: usize) -> Mat {
    let mut m = zero(d);
    m[i][j] = Q::one();
    m
}

fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

fn scale(a: &Mat, c: &Q) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

/// `exp` of a strictly upper triangular matrix.
fn exp(a: &Mat) -> Mat {
    let d = a.len();
    let mut out = zero(d);
    let mut term = zero(d);
    for i in 0..d {
        out[i][i] = Q::one();
        term[i][i] = Q::one();
    }
    for k in 1..d {
        term = scale(&mul(&term, a), &Q::new(1.into(), (k as i64).into()));
        out = add(&out, &term);
    }
    out
}

fn combo(basis: &[Mat], g: &[Q]) -> Mat {
    basis.iter().zip(g).fold(zero(basis[0].len()), |acc, (x, c)| add(&acc, &scale(x, c)))
}

fn check(spec: &GroupSpec, basis: &[Mat], seed: u64) {
    let law = synthesize_law(spec).unwrap();
    let n = law.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let g: Point = (0..n).map(|_| random_q(&mut rng, 4, 5)).collect();
        let h: Point = (0..n).map(|_| random_q(&mut rng, 4, 5)).collect();
        let lhs = exp(&combo(basis, &law.multiply(&g, &h)));
        let rhs = mul(&exp(&combo(basis, &g)), &exp(&combo(basis, &h)));
        assert_eq!(lhs, rhs, "g = {g:?}, h = {h:?}");
    }
}

#[test]
fn heisenberg_matches_upper_triangular_3x3() {
    // [E12, E23] = E13, so e3 = -E13 gives [e1, e2] = -e3
    let basis = vec![unit(3, 0, 1), unit(3, 1, 2), scale(&unit(3, 0, 2), &-Q::one())];
    check(&GroupSpec::heisenberg(), &basis, 1);
    let basis = vec![unit(3, 0, 1), unit(3, 1, 2), scale(&unit(3, 0, 2), &Q::new(1.into(), 2.into()))];
    check(&GroupSpec::heisenberg_integral(), &basis, 2);
}

#[test]
fn filiform_matches_upper_triangular_4x4() {
    let x1 = add(&add(&unit(4, 0, 1), &unit(4, 1, 2)), &unit(4, 2, 3));
    let basis = vec![x1, unit(4, 2, 3), unit(4, 1, 3), unit(4, 0, 3)];
    check(&GroupSpec::filiform(), &basis, 3);
}
