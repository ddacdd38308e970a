use super::{PartitionError, SizeSpec};
use crate::graph::{InteractionGraph, PartitionVector};
use crate::scalar::Real;

pub const EXACT_MAX_VERTICES: usize = 16;

/// Minimum-cut bipartition by exhaustive enumeration. Bit `v` of the mask puts
/// vertex `v` in cluster 1; the lowest optimal mask is returned.
pub fn exact_min_cut<T: Real>(
    g: &InteractionGraph<T>,
    spec: &SizeSpec,
) -> Result<PartitionVector, PartitionError> {
    let n = g.len();
    if n > EXACT_MAX_VERTICES || spec.k() != 2 {
        return Err(PartitionError::TooLarge {
            n,
            k: spec.k(),
            max: EXACT_MAX_VERTICES,
        });
    }
    spec.validate(n)?;
    let mut best: Option<(T, u32)> = None;
    for mask in 0u32..(1 << n) {
        let ones = mask.count_ones() as usize;
        if ones > spec.sizes[1] || n - ones > spec.sizes[0] {
            continue;
        }
        if spec
            .pinned
            .iter()
            .any(|(&v, &c)| ((mask >> v) & 1) as usize != c)
        {
            continue;
        }
        let mut cut = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                if (mask >> i) & 1 != (mask >> j) & 1 {
                    cut += g.weight(i, j);
                }
            }
        }
        if best.is_none_or(|(b, _)| cut < b) {
            best = Some((cut, mask));
        }
    }
    let (_, mask) = best.expect("validated spec admits a partition");
    Ok(PartitionVector::new(
        (0..n).map(|v| ((mask >> v) & 1) as usize).collect(),
        2,
    )?)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn examples() {
        let g = two_triangles_bridge();
        let p = exact_min_cut(&g, &SizeSpec::equal(2, 3)).unwrap();
        assert_eq!(g.cut_weight(&p), 1.0);
        assert_eq!(p.assignment(), [1, 1, 1, 0, 0, 0]);

        let g = barbell();
        assert_eq!(
            g.cut_weight(&exact_min_cut(&g, &SizeSpec::equal(2, 5)).unwrap()),
            1.0
        );
        let g = complete(4);
        assert_eq!(
            g.cut_weight(&exact_min_cut(&g, &SizeSpec::equal(2, 2)).unwrap()),
            4.0
        );
    }

    #[test]
    fn too_large() {
        let g = InteractionGraph::<f64>::new(17);
        assert!(matches!(
            exact_min_cut(&g, &SizeSpec::equal(2, 9)),
            Err(PartitionError::TooLarge { .. })
        ));
    }
}
