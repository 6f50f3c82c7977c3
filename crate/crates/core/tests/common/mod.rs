//! Shared helpers for integration and acceptance tests: fan generators and
//! classical cohomology formulas used as independent oracles.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use regcomp::{rat, ChamberFan, Coweight, PLFunction, Rat, RootDatum};

pub type Cones = Vec<Vec<Vec<i64>>>;

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Star subdivision at the face spanned by `face`: every cone containing
/// the face is replaced by the cones obtained by swapping one face
/// generator for the sum of the face generators. Keeps smoothness.
pub fn star_subdivide(cones: &Cones, face: &[Vec<i64>]) -> Cones {
    let v = face.iter().skip(1).fold(face[0].clone(), |acc, g| add(&acc, g));
    let mut out = Vec::new();
    for cone in cones {
        if face.iter().all(|g| cone.contains(g)) {
            for g in face {
                out.push(cone.iter().map(|x| if x == g { v.clone() } else { x.clone() }).collect());
            }
        } else {
            out.push(cone.clone());
        }
    }
    out
}

/// A random sequence of star subdivisions of `start` at edges and faces of
/// random cones.
pub fn random_subdivision(start: Cones, steps: usize, rng: &mut impl Rng) -> Cones {
    let mut cones = start;
    for _ in 0..steps {
        let cone = cones[rng.gen_range(0..cones.len())].clone();
        let size = rng.gen_range(2..=cone.len());
        let mut idx: Vec<usize> = (0..cone.len()).collect();
        for k in 0..size {
            let j = rng.gen_range(k..idx.len());
            idx.swap(k, j);
        }
        let face: Vec<Vec<i64>> = idx[..size].iter().map(|&i| cone[i].clone()).collect();
        cones = star_subdivide(&cones, &face);
    }
    cones
}

pub fn orthant(rank: usize) -> Cones {
    vec![(0..rank).map(|i| (0..rank).map(|j| i64::from(i == j)).collect()).collect()]
}

pub fn to_coweights(cones: &Cones) -> Vec<Vec<Coweight>> {
    cones.iter().map(|c| c.iter().map(|g| Coweight::from_ints(g)).collect()).collect()
}

pub fn chamber_fan(rd: &Arc<RootDatum>, cones: &Cones) -> Arc<ChamberFan> {
    Arc::new(ChamberFan::build_chamber_fan(rd.clone(), &to_coweights(cones)).expect("valid chamber fan"))
}

pub fn complete_fan(rank: usize, cones: &Cones) -> Arc<ChamberFan> {
    Arc::new(ChamberFan::build_complete_fan(rank, &to_coweights(cones)).expect("valid complete fan"))
}

/// The piecewise-linear function with value `values[k]` on `rays[k]`.
pub fn pl_from_values(fan: &Arc<ChamberFan>, rays: &[Vec<i64>], values: &[i64]) -> PLFunction {
    let by_fan_ray: Vec<Rat> = fan
        .rays()
        .iter()
        .map(|r| {
            let r: Vec<i64> = r.iter().map(|x| i64::try_from(x).unwrap()).collect();
            let k = rays.iter().position(|q| *q == r).expect("ray listed");
            rat(values[k])
        })
        .collect();
    PLFunction::from_ray_values(fan.clone(), &by_fan_ray).expect("continuous integral h")
}

/// Integer-valued random function on the rays of `fan`.
pub fn random_pl(fan: &Arc<ChamberFan>, range: i64, rng: &mut impl Rng) -> PLFunction {
    let values: Vec<Rat> = fan.rays().iter().map(|_| rat(rng.gen_range(-range..=range))).collect();
    PLFunction::from_ray_values(fan.clone(), &values).expect("continuous integral h")
}

/// `C(n, k)` for `n ≥ 0`, zero when `n < k`.
pub fn binom(n: i64, k: i64) -> i64 {
    if n < k || k < 0 {
        return 0;
    }
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

/// `h^i(ℙ^n, O(d))`.
pub fn projective_space(n: i64, d: i64) -> Vec<i64> {
    let mut h = vec![0; n as usize + 1];
    h[0] = binom(d + n, n);
    h[n as usize] = binom(-d - 1, n);
    h
}

/// `h^i(ℙ¹ × ℙ¹, O(a, b))` by Künneth.
pub fn p1xp1(a: i64, b: i64) -> Vec<i64> {
    let (x, y) = (projective_space(1, a), projective_space(1, b));
    vec![x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[1] * y[1]]
}

pub const P1_RAYS: [[i64; 1]; 2] = [[1], [-1]];
pub const P2_RAYS: [[i64; 2]; 3] = [[1, 0], [0, 1], [-1, -1]];
pub const P1XP1_RAYS: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, 0], [0, -1]];
pub const F1_RAYS: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, 1], [0, -1]];

/// Two-dimensional complete fan whose cones join cyclically adjacent rays.
pub fn cyclic_cones(rays: &[[i64; 2]]) -> Cones {
    (0..rays.len())
        .map(|i| vec![rays[i].to_vec(), rays[(i + 1) % rays.len()].to_vec()])
        .collect()
}

/// `#{m ∈ ℤ² : ⟨m, u_ρ⟩ ≥ −a_ρ}`, the space of sections of `Σ a_ρ D_ρ`
/// on a complete smooth toric surface.
pub fn sections(rays: &[[i64; 2]], a: &[i64]) -> i64 {
    let r = a.iter().map(|x| x.abs()).sum::<i64>() + 1;
    let mut count = 0;
    for m0 in -r..=r {
        for m1 in -r..=r {
            if rays.iter().zip(a).all(|(u, &ai)| m0 * u[0] + m1 * u[1] >= -ai) {
                count += 1;
            }
        }
    }
    count
}

/// `h^i` of `Σ a_ρ D_ρ` on a complete smooth toric surface: `h⁰` and
/// `h² = h⁰(K − D)` by lattice-point counting, `h¹` from Riemann–Roch
/// with self-intersections `D_i² = −b_i`, `u_{i−1} + u_{i+1} = b_i u_i`.
pub fn toric_surface(rays: &[[i64; 2]], a: &[i64]) -> Vec<i64> {
    let n = rays.len();
    let mut inter = vec![vec![0i64; n]; n];
    for i in 0..n {
        let (prev, next) = (rays[(i + n - 1) % n], rays[(i + 1) % n]);
        let s = [prev[0] + next[0], prev[1] + next[1]];
        let u = rays[i];
        let b = if u[0] != 0 { s[0] / u[0] } else { s[1] / u[1] };
        debug_assert_eq!([b * u[0], b * u[1]], s);
        inter[i][i] = -b;
        inter[i][(i + 1) % n] = 1;
        inter[(i + 1) % n][i] = 1;
    }
    let k: Vec<i64> = vec![-1; n];
    let dot = |x: &[i64], y: &[i64]| -> i64 {
        (0..n).map(|i| (0..n).map(|j| x[i] * inter[i][j] * y[j]).sum::<i64>()).sum()
    };
    let chi = 1 + (dot(a, a) - dot(a, &k)) / 2;
    let h0 = sections(rays, a);
    let dual: Vec<i64> = a.iter().map(|x| -1 - x).collect();
    let h2 = sections(rays, &dual);
    vec![h0, h0 + h2 - chi, h2]
}
