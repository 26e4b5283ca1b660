use super::eval::element_dofs;
use crate::geometry::MultiPatchDomain;
use crate::quadrature::InterfaceSegmentation;
use crate::solver::CsrMatrix;
use crate::spline::KnotVector;

/// Basis indices whose supports overlap basis `j` with positive measure.
fn axis_neighbours(kv: &KnotVector) -> Vec<Vec<usize>> {
    let k = kv.degree();
    let t = kv.knots();
    let n = kv.num_basis();
    (0..n)
        .map(|j| {
            (j.saturating_sub(k)..n.min(j + k + 1))
                .filter(|&i| t[i].max(t[j]) < t[i + k + 1].min(t[j + k + 1]))
                .collect()
        })
        .collect()
}

/// Zero matrix holding every entry the dG form can touch.
pub(crate) fn build_pattern(
    domain: &MultiPatchDomain,
    offsets: &[usize],
    segmentations: &[InterfaceSegmentation],
) -> CsrMatrix {
    let total = offsets[domain.num_patches()];
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (p, space) in domain.solution_spaces().iter().enumerate() {
        let neighbours: Vec<Vec<Vec<usize>>> = space.axes().iter().map(axis_neighbours).collect();
        let sizes = space.basis_per_axis();
        for j in 0..space.num_basis() {
            let multi = crate::spline::unflatten(j, &sizes);
            let lists: Vec<&Vec<usize>> = multi.iter().enumerate().map(|(a, &m)| &neighbours[a][m]).collect();
            let counts: Vec<usize> = lists.iter().map(|l| l.len()).collect();
            let row = &mut rows[offsets[p] + j];
            row.reserve(counts.iter().product());
            for flat in 0..counts.iter().product::<usize>() {
                let pick = crate::spline::unflatten(flat, &counts);
                let cols: Vec<usize> = pick.iter().enumerate().map(|(a, &i)| lists[a][i]).collect();
                row.push(offsets[p] + space.basis_flat(&cols));
            }
        }
    }
    for seg in segmentations {
        let (l, r) = (seg.face.left_patch, seg.face.right_patch);
        let mut seen = std::collections::HashSet::new();
        for cell in &seg.cells {
            if !seen.insert((cell.left_element, cell.right_element)) {
                continue;
            }
            let left: Vec<usize> = element_dofs(domain.solution_space(l), cell.left_element)
                .into_iter()
                .map(|j| j + offsets[l])
                .collect();
            let right: Vec<usize> = element_dofs(domain.solution_space(r), cell.right_element)
                .into_iter()
                .map(|j| j + offsets[r])
                .collect();
            for &a in &left {
                rows[a].extend_from_slice(&right);
            }
            for &b in &right {
                rows[b].extend_from_slice(&left);
            }
        }
    }
    CsrMatrix::from_pattern(total, rows)
}
