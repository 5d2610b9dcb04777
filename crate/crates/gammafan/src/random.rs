//! Seeded random Γ-admissible fans in one and two dimensions.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::fixtures::z_sqrt2;
use crate::gamma::ValueGroup;
use crate::polyhedra::cone::{Cone, Point};
use crate::polyhedra::fan::{Ambient, Fan};
use crate::polyhedra::polyhedron::Polyhedron;
use crate::scalar::{int, Rat, Scalar, SymbolBasis};

/// ℤ, ℤ√2 or ℤ ⊕ ℤ√2.
pub fn value_group<R: Rng>(rng: &mut R) -> ValueGroup {
    match rng.gen_range(0..3) {
        0 => ValueGroup::integers(),
        1 => ValueGroup::new(vec![SymbolBasis::sqrts(&["r2"], &[2]).symbol(0)]).expect("rank one"),
        _ => z_sqrt2().expect("rank two"),
    }
}

/// Σ kᵢγᵢ with |kᵢ| ≤ bound.
pub fn element<R: Rng>(rng: &mut R, g: &ValueGroup, bound: i64) -> Scalar {
    g.basis().iter().map(|b| b.mul_rat(&int(rng.gen_range(-bound..=bound)))).sum()
}

/// `count` distinct elements of Γ in increasing order.
fn sorted_elements<R: Rng>(rng: &mut R, g: &ValueGroup, count: usize, bound: i64) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = Vec::new();
    while out.len() < count {
        let x = element(rng, g, bound);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort_by(|a, b| a.cmp_value(b));
    out
}

fn at(p: &[Scalar]) -> Point {
    let mut v = p.to_vec();
    v.push(Scalar::one());
    v
}

fn cell(verts: &[Vec<Scalar>], rays: &[Vec<Rat>]) -> Result<Cone> {
    Ok(Polyhedron::from_vertices(verts, rays)?.homogenization().clone())
}

/// Cones over a random Γ-rational interval complex on the line.
pub fn random_1d<R: Rng>(rng: &mut R) -> Result<(Fan, ValueGroup)> {
    let g = value_group(rng);
    let m = rng.gen_range(2..=5);
    let xs = sorted_elements(rng, &g, m, 3);
    let mut cones: Vec<Cone> = Vec::new();
    let mut used = vec![false; m];
    for i in 0..m - 1 {
        if rng.gen_bool(0.6) {
            cones.push(Cone::from_rays(2, vec![at(&[xs[i].clone()]), at(&[xs[i + 1].clone()])], vec![])?);
            used[i] = true;
            used[i + 1] = true;
        }
    }
    for i in 0..m {
        if !used[i] && rng.gen_bool(0.4) {
            cones.push(Cone::from_rays(2, vec![at(&[xs[i].clone()])], vec![])?);
            used[i] = true;
        }
    }
    if rng.gen_bool(0.3) {
        cones.push(cell(&[vec![xs[m - 1].clone()]], &[vec![int(1)]])?);
    }
    if cones.is_empty() {
        cones.push(Cone::from_rays(2, vec![at(&[xs[0].clone()]), at(&[xs[1].clone()])], vec![])?);
    }
    Ok((Fan::from_max(2, Ambient::HalfSpace, cones)?, g))
}

/// Cones over a few cells of a Γ-rational grid in the plane, optionally with a
/// triangle {x ≥ a, y ≥ b, x + y ≤ c} placed beside it.
pub fn random_2d<R: Rng>(rng: &mut R) -> Result<(Fan, ValueGroup)> {
    loop {
        let g = value_group(rng);
        let (nx, ny) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let xs = sorted_elements(rng, &g, nx, 2);
        let ys = sorted_elements(rng, &g, ny, 2);
        let mut cells: Vec<(usize, usize)> = (0..xs.len() - 1).flat_map(|i| (0..ys.len() - 1).map(move |j| (i, j))).collect();
        cells.shuffle(rng);
        let take = rng.gen_range(1..=cells.len().min(3));
        let mut cones = Vec::new();
        for &(i, j) in &cells[..take] {
            let v = |a: usize, b: usize| vec![xs[a].clone(), ys[b].clone()];
            cones.push(cell(&[v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)], &[])?);
        }
        if rng.gen_bool(0.5) {
            // Triangle to the right of the grid.
            let unit = g.positive_unit();
            let a = &xs[xs.len() - 1] + &unit;
            let b = ys[0].clone();
            let c = &(&a + &b) + &unit.mul_rat(&int(rng.gen_range(1..=2)));
            let verts = vec![vec![a.clone(), b.clone()], vec![&c - &b, b.clone()], vec![a.clone(), &c - &a]];
            cones.push(cell(&verts, &[])?);
        }
        if let Ok(f) = Fan::from_max(3, Ambient::HalfSpace, cones) {
            return Ok((f, g));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::is_admissible_fan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_fans_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (f, g) = random_1d(&mut rng).unwrap();
            assert!(is_admissible_fan(&f, &g).unwrap().verdict);
            let (f, g) = random_2d(&mut rng).unwrap();
            assert!(is_admissible_fan(&f, &g).unwrap().verdict);
        }
    }
}
