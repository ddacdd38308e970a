use super::{PartitionError, SizeSpec};
use crate::graph::{InteractionGraph, PartitionVector};
use crate::scalar::Real;

const MAX_ROUNDS: usize = 200;

/// Kernighan-Lin refinement of a feasible partition.
///
/// Every pair of clusters is refined in turn until a full round brings no
/// improvement. Free capacity is padded with isolated dummy vertices so a swap
/// with a dummy acts as a single-vertex move. Pinned vertices never move. The
/// result never has a higher cut than the input.
pub fn kl_refine<T: Real>(
    g: &InteractionGraph<T>,
    p: &PartitionVector,
    spec: &SizeSpec,
) -> Result<PartitionVector, PartitionError> {
    spec.validate(g.len())?;
    p.check_len(g.len())?;
    spec.check(p)?;
    let eps = T::epsilon() * (g.total_weight() + T::one()) * T::lit(64.0);
    let mut assign = p.assignment().to_vec();
    for _ in 0..MAX_ROUNDS {
        let mut improved = false;
        for a in 0..spec.k() {
            for b in a + 1..spec.k() {
                improved |= refine_pair(g, &mut assign, spec, [a, b], eps);
            }
        }
        if !improved {
            break;
        }
    }
    Ok(PartitionVector::new(assign, spec.k())?)
}

/// Entry in the padded pair problem; `None` is a dummy.
type Slot = Option<usize>;

fn refine_pair<T: Real>(
    g: &InteractionGraph<T>,
    assign: &mut [usize],
    spec: &SizeSpec,
    pair: [usize; 2],
    eps: T,
) -> bool {
    let mut improved = false;
    loop {
        let mut sides: [Vec<Slot>; 2] = [Vec::new(), Vec::new()];
        for (v, &c) in assign.iter().enumerate() {
            if c == pair[0] {
                sides[0].push(Some(v));
            } else if c == pair[1] {
                sides[1].push(Some(v));
            }
        }
        for s in 0..2 {
            let pad = spec.sizes[pair[s]] - sides[s].len();
            sides[s].extend(std::iter::repeat_n(None, pad));
        }
        let w = |x: Slot, y: Slot| match (x, y) {
            (Some(i), Some(j)) => g.weight(i, j),
            _ => T::zero(),
        };
        // D = external - internal weight, restricted to the pair.
        let mut d: [Vec<T>; 2] = [Vec::new(), Vec::new()];
        for s in 0..2 {
            d[s] = sides[s]
                .iter()
                .map(|&x| {
                    let ext: T = sides[1 - s].iter().map(|&y| w(x, y)).sum();
                    let int: T = sides[s].iter().map(|&y| w(x, y)).sum();
                    ext - int
                })
                .collect();
        }
        let movable = |x: Slot| x.is_none_or(|v| !spec.pinned.contains_key(&v));
        let mut locked: [Vec<bool>; 2] = [
            sides[0].iter().map(|&x| !movable(x)).collect(),
            sides[1].iter().map(|&x| !movable(x)).collect(),
        ];

        let steps = sides[0].len().min(sides[1].len());
        let mut swaps = Vec::new();
        let mut gains = Vec::new();
        for _ in 0..steps {
            let mut best: Option<(T, usize, usize)> = None;
            for i in 0..sides[0].len() {
                if locked[0][i] {
                    continue;
                }
                for j in 0..sides[1].len() {
                    if locked[1][j] || (sides[0][i].is_none() && sides[1][j].is_none()) {
                        continue;
                    }
                    let gain = d[0][i] + d[1][j] - T::lit(2.0) * w(sides[0][i], sides[1][j]);
                    if best.is_none_or(|(bg, _, _)| gain > bg + eps) {
                        best = Some((gain, i, j));
                    }
                }
            }
            let Some((gain, i, j)) = best else { break };
            locked[0][i] = true;
            locked[1][j] = true;
            let (xa, xb) = (sides[0][i], sides[1][j]);
            for k in 0..sides[0].len() {
                if !locked[0][k] {
                    let x = sides[0][k];
                    d[0][k] += T::lit(2.0) * (w(x, xa) - w(x, xb));
                }
            }
            for k in 0..sides[1].len() {
                if !locked[1][k] {
                    let x = sides[1][k];
                    d[1][k] += T::lit(2.0) * (w(x, xb) - w(x, xa));
                }
            }
            swaps.push((xa, xb));
            gains.push(gain);
        }

        let mut acc = T::zero();
        let mut best = (T::zero(), 0);
        for (k, &gain) in gains.iter().enumerate() {
            acc += gain;
            if acc > best.0 + eps {
                best = (acc, k + 1);
            }
        }
        if best.1 == 0 {
            return improved;
        }
        for &(xa, xb) in &swaps[..best.1] {
            if let Some(v) = xa {
                assign[v] = pair[1];
            }
            if let Some(v) = xb {
                assign[v] = pair[0];
            }
        }
        improved = true;
    }
}

#[cfg(test)]
mod tests {
    use super::super::{cut_cost, fixtures::*};
    use super::*;

    fn pv(a: &[usize], k: usize) -> PartitionVector {
        PartitionVector::new(a.to_vec(), k).unwrap()
    }

    #[test]
    fn fixes_a_bad_split() {
        let g = two_triangles_bridge();
        let p = kl_refine(&g, &pv(&[0, 1, 0, 1, 0, 1], 2), &SizeSpec::equal(2, 3)).unwrap();
        assert_eq!(cut_cost(&g, &p), 2.0);
    }

    #[test]
    fn uses_slack_for_single_moves() {
        let g = InteractionGraph::<f64>::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        let p = kl_refine(&g, &pv(&[0, 1, 1], 2), &SizeSpec::equal(2, 3)).unwrap();
        assert_eq!(cut_cost(&g, &p), 0.0);
    }

    #[test]
    fn pinned_vertices_stay() {
        let g = two_triangles_bridge();
        let spec = SizeSpec::equal(2, 3).pin(0, 1).pin(5, 0);
        let p = kl_refine(&g, &pv(&[1, 0, 0, 1, 1, 0], 2), &spec).unwrap();
        spec.check(&p).unwrap();
    }

    #[test]
    fn rejects_infeasible_input() {
        let g = complete(4);
        assert!(kl_refine(&g, &pv(&[0, 0, 0, 1], 2), &SizeSpec::equal(2, 2)).is_err());
    }

    #[test]
    fn barbell_from_interleaved_start() {
        let g = barbell();
        let start = pv(&[0, 1, 0, 1, 0, 1, 0, 1, 0, 1], 2);
        let p = kl_refine(&g, &start, &SizeSpec::equal(2, 5)).unwrap();
        assert_eq!(g.cut_weight(&p), 1.0);
    }
}
