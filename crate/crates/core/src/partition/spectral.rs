use super::{PartitionError, SizeSpec};
use crate::graph::{fiedler_vector, InteractionGraph, PartitionVector};
use crate::scalar::Real;

/// Capacity-respecting spectral partition.
///
/// Two clusters: vertices are ordered by their Fiedler-vector entry (index on
/// ties), pinned vertices are placed first, and the free vertices are split at
/// every feasible boundary in both orientations; the cheapest split wins.
/// More clusters: recursive bisection over capacity-balanced cluster groups.
pub fn spectral_partition<T: Real>(
    g: &InteractionGraph<T>,
    spec: &SizeSpec,
) -> Result<PartitionVector, PartitionError> {
    let n = g.len();
    spec.validate(n)?;
    let mut assignment = vec![0usize; n];
    let vertices: Vec<usize> = (0..n).collect();
    let clusters: Vec<usize> = (0..spec.k()).collect();
    recurse(g, &vertices, &clusters, spec, &mut assignment)?;
    Ok(PartitionVector::new(assignment, spec.k())?)
}

fn recurse<T: Real>(
    g: &InteractionGraph<T>,
    vertices: &[usize],
    clusters: &[usize],
    spec: &SizeSpec,
    out: &mut [usize],
) -> Result<(), PartitionError> {
    if clusters.len() == 1 {
        for &v in vertices {
            out[v] = clusters[0];
        }
        return Ok(());
    }
    let split = balanced_split(clusters, &spec.sizes);
    let (left, right) = clusters.split_at(split);
    let cap = |cs: &[usize]| cs.iter().map(|&c| spec.sizes[c]).sum::<usize>();
    let pins: Vec<Option<usize>> = vertices
        .iter()
        .map(|v| spec.pinned.get(v).map(|c| usize::from(!left.contains(c))))
        .collect();
    let sides = bisect(g, vertices, [cap(left), cap(right)], &pins)?;
    let (mut lv, mut rv) = (Vec::new(), Vec::new());
    for (&v, &s) in vertices.iter().zip(&sides) {
        if s == 0 {
            lv.push(v);
        } else {
            rv.push(v);
        }
    }
    recurse(g, &lv, left, spec, out)?;
    recurse(g, &rv, right, spec, out)
}

/// Split index minimising the capacity imbalance between the two groups.
fn balanced_split(clusters: &[usize], sizes: &[usize]) -> usize {
    let total: usize = clusters.iter().map(|&c| sizes[c]).sum();
    let mut acc = 0;
    let mut best = (usize::MAX, 1);
    for i in 1..clusters.len() {
        acc += sizes[clusters[i - 1]];
        let diff = acc.abs_diff(total - acc);
        if diff < best.0 {
            best = (diff, i);
        }
    }
    best.1
}

/// Returns a side (0 or 1) per entry of `vertices`.
fn bisect<T: Real>(
    g: &InteractionGraph<T>,
    vertices: &[usize],
    caps: [usize; 2],
    pins: &[Option<usize>],
) -> Result<Vec<usize>, PartitionError> {
    let m = vertices.len();
    let pinned = [
        pins.iter().filter(|p| **p == Some(0)).count(),
        pins.iter().filter(|p| **p == Some(1)).count(),
    ];
    let free: Vec<usize> = (0..m).filter(|&i| pins[i].is_none()).collect();
    let f = free.len();
    let room = [
        caps[0].checked_sub(pinned[0]),
        caps[1].checked_sub(pinned[1]),
    ];
    let (Some(room0), Some(room1)) = (room[0], room[1]) else {
        return Err(PartitionError::Infeasible {
            n: m,
            capacity: caps[0] + caps[1],
        });
    };
    let lo = f.saturating_sub(room1);
    let hi = f.min(room0);
    if lo > hi {
        return Err(PartitionError::Infeasible {
            n: m,
            capacity: caps[0] + caps[1],
        });
    }

    let base: Vec<usize> = pins.iter().map(|p| p.unwrap_or(1)).collect();
    if f == 0 {
        return Ok(base);
    }

    let sub = g.subgraph(vertices);
    let order: Vec<usize> = if m >= 2 {
        let fv = fiedler_vector(&sub)?;
        let mut o = free.clone();
        o.sort_by(|&a, &b| {
            fv[a]
                .partial_cmp(&fv[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        o
    } else {
        free.clone()
    };

    let mut best: Option<(T, Vec<usize>)> = None;
    for reversed in [false, true] {
        let ordered: Vec<usize> = if reversed {
            order.iter().rev().copied().collect()
        } else {
            order.clone()
        };
        for c0 in lo..=hi {
            let mut sides = base.clone();
            for &i in &ordered[..c0] {
                sides[i] = 0;
            }
            let cost = local_cut(&sub, &sides);
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, sides));
            }
        }
    }
    Ok(best.expect("non-empty feasible range").1)
}

fn local_cut<T: Real>(g: &InteractionGraph<T>, sides: &[usize]) -> T {
    let mut cut = T::zero();
    for i in 0..sides.len() {
        for j in i + 1..sides.len() {
            if sides[i] != sides[j] {
                cut += g.weight(i, j);
            }
        }
    }
    cut
}

#[cfg(test)]
mod tests {
    use super::super::{cut_cost, fixtures::*};
    use super::*;

    #[test]
    fn two_triangles_split_on_bridge() {
        let g = two_triangles_bridge();
        let p = spectral_partition(&g, &SizeSpec::equal(2, 3)).unwrap();
        assert_eq!(cut_cost(&g, &p), 2.0);
        assert_eq!(p.sizes(), [3, 3]);
    }

    #[test]
    fn barbell_cut_is_bridge() {
        let g = barbell();
        let p = spectral_partition(&g, &SizeSpec::equal(2, 5)).unwrap();
        assert_eq!(g.cut_weight(&p), 1.0);
    }

    #[test]
    fn complete_graph_balanced() {
        let g = complete(4);
        let p = spectral_partition(&g, &SizeSpec::equal(2, 2)).unwrap();
        assert_eq!(cut_cost(&g, &p), 8.0);
    }

    #[test]
    fn slack_allows_uneven_split() {
        // One edge plus two isolated vertices: the edge stays together.
        let g = InteractionGraph::<f64>::unweighted(4, &[(0, 1)]).unwrap();
        let p = spectral_partition(&g, &SizeSpec::equal(2, 3)).unwrap();
        assert_eq!(cut_cost(&g, &p), 0.0);
    }

    #[test]
    fn pins_respected() {
        let g = two_triangles_bridge();
        let spec = SizeSpec::equal(2, 3).pin(0, 1);
        let p = spectral_partition(&g, &spec).unwrap();
        spec.check(&p).unwrap();
        assert_eq!(cut_cost(&g, &p), 2.0);
    }

    #[test]
    fn three_way() {
        let edges: Vec<_> = (0..3)
            .flat_map(|b| {
                [
                    (3 * b, 3 * b + 1),
                    (3 * b + 1, 3 * b + 2),
                    (3 * b, 3 * b + 2),
                ]
            })
            .chain([(2, 3), (5, 6)])
            .collect();
        let g = InteractionGraph::<f64>::unweighted(9, &edges).unwrap();
        let spec = SizeSpec::equal(3, 3);
        let p = spectral_partition(&g, &spec).unwrap();
        spec.check(&p).unwrap();
        assert_eq!(g.cut_weight(&p), 2.0);
    }

    #[test]
    fn infeasible() {
        let g = complete(5);
        assert!(spectral_partition(&g, &SizeSpec::equal(2, 2)).is_err());
    }
}
