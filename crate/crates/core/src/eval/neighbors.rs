use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use super::cosine;
use crate::corpus::SyntheticAssignment;
use crate::error::{Error, Result};
use crate::model::FrozenModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub word: String,
    pub group: String,
    pub index: usize,
    pub score: f64,
}

fn score_group(
    model: &FrozenModel,
    query: ArrayView1<f64>,
    qgroup: usize,
    qindex: usize,
    tgroup: usize,
) -> Vec<Neighbor> {
    let space = model.space(tgroup);
    (0..space.matrix.nrows())
        .filter(|&i| !(tgroup == qgroup && i == qindex))
        .map(|i| Neighbor {
            word: model.vocab().group(tgroup).word(i).to_string(),
            group: space.label.clone(),
            index: i,
            score: cosine(query, space.matrix.row(i)),
        })
        .collect()
}

/// The `k` words of `target_group` closest to `word` by cosine, most similar
/// first. Ties go to the lower group, then the lower vocabulary index. The
/// query word itself is left out when both groups are the same.
pub fn nearest_neighbors(
    model: &FrozenModel,
    word: &str,
    query_group: &str,
    target_group: &str,
    k: usize,
) -> Result<Vec<Neighbor>> {
    nearest_neighbors_multi(model, word, query_group, &[target_group], k)
}

/// Like [`nearest_neighbors`] but ranks the union of several target groups.
pub fn nearest_neighbors_multi(
    model: &FrozenModel,
    word: &str,
    query_group: &str,
    target_groups: &[&str],
    k: usize,
) -> Result<Vec<Neighbor>> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let schema = model.schema();
    let qg = schema.index_of(query_group)?;
    let qi = model.vocab().group(qg).lookup(word)?;
    let query = model.vector(qg, qi);
    let mut out = Vec::new();
    for t in target_groups {
        let tg = schema.index_of(t)?;
        out.extend(score_group(model, query, qg, qi, tg).into_iter().map(|n| (tg, n)));
    }
    out.sort_by(|(ga, a), (gb, b)| b.score.total_cmp(&a.score).then(ga.cmp(gb)).then(a.index.cmp(&b.index)));
    Ok(out.into_iter().take(k).map(|(_, n)| n).collect())
}

/// Purity of the item vectors of `group` under the assignment's true
/// clusters: every item goes to the nearest (Euclidean) cluster centroid,
/// and purity is the fraction that lands in its own cluster.
pub fn cluster_purity(model: &FrozenModel, assignment: &SyntheticAssignment, group: &str) -> Result<f64> {
    let g = model.schema().index_of(group)?;
    let vocab = model.vocab().group(g);
    let matrix = &model.space(g).matrix;
    let mut rows = Vec::with_capacity(assignment.n_items);
    for word in &assignment.item_words {
        rows.push(vocab.lookup(word)?);
    }
    let vectors = matrix.select(Axis(0), &rows);
    Ok(cluster_purity_of(vectors.view(), &assignment.assignment, assignment.k_clusters))
}

/// Nearest-centroid purity for row vectors with labels in `0..k`. Clusters
/// without members get no centroid.
pub fn cluster_purity_of(vectors: ArrayView2<f64>, labels: &[usize], k: usize) -> f64 {
    assert_eq!(vectors.nrows(), labels.len(), "one label per vector");
    if labels.is_empty() {
        return 0.0;
    }
    let mut centroids = Array2::<f64>::zeros((k, vectors.ncols()));
    let mut sizes = vec![0usize; k];
    for (row, &c) in vectors.rows().into_iter().zip(labels) {
        let mut target = centroids.row_mut(c);
        target += &row;
        sizes[c] += 1;
    }
    for (mut c, &n) in centroids.rows_mut().into_iter().zip(&sizes) {
        if n > 0 {
            c /= n as f64;
        }
    }
    let hits = vectors
        .rows()
        .into_iter()
        .zip(labels)
        .filter(|(row, &label)| {
            let nearest = (0..k)
                .filter(|&c| sizes[c] > 0)
                .min_by(|&a, &b| {
                    let da = (&centroids.row(a) - row).mapv(|x| x * x).sum();
                    let db = (&centroids.row(b) - row).mapv(|x| x * x).sum();
                    da.total_cmp(&db)
                })
                .expect("at least one non-empty cluster");
            nearest == label
        })
        .count();
    hits as f64 / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{gen_synthetic_assignment, AssignmentMode, GroupSchema, RawTuple, Vocabulary};
    use crate::model::{JointModel, Sharing};
    use crate::seeded_rng;
    use rand::Rng as _;

    fn model() -> FrozenModel {
        let schema = GroupSchema::parse("S,V,O").unwrap();
        let tuples: Vec<RawTuple> = ["a", "b", "c", "d"]
            .iter()
            .map(|w| RawTuple::new([w.to_string(), format!("v{w}"), w.to_string()], 1))
            .collect();
        let vocab = Vocabulary::build(&schema, &tuples, 1).unwrap();
        let mut m = JointModel::zeros(vocab, 2, Sharing::Shared).unwrap();
        let s = m.vocab().group(0).clone();
        let rows = [("a", [1.0, 0.0]), ("b", [0.9, 0.1]), ("c", [1.0, 0.0]), ("d", [-1.0, 0.0])];
        for (w, v) in rows {
            let i = s.lookup(w).unwrap();
            m.params_mut().embeddings[0].row_mut(i).assign(&ndarray::arr1(&v));
            m.params_mut().embeddings[2].row_mut(i).assign(&ndarray::arr1(&v));
        }
        m.frozen()
    }

    #[test]
    fn ranked_without_the_query() {
        let m = model();
        let nn = nearest_neighbors(&m, "a", "S", "S", 10).unwrap();
        let words: Vec<&str> = nn.iter().map(|n| n.word.as_str()).collect();
        assert_eq!(words, ["c", "b", "d"]);
        assert!(nn.windows(2).all(|w| w[0].score >= w[1].score));
        assert_eq!(nearest_neighbors(&m, "a", "S", "S", 1).unwrap().len(), 1);
    }

    #[test]
    fn cross_group_keeps_the_same_word() {
        let m = model();
        let nn = nearest_neighbors(&m, "a", "S", "O", 4).unwrap();
        assert_eq!(nn.len(), 4);
        assert!(nn[..2].iter().any(|n| n.word == "a"));
        let joint = nearest_neighbors_multi(&m, "a", "S", &["S", "O"], 3).unwrap();
        assert_eq!(joint.len(), 3);
        assert!(joint.iter().all(|n| n.score > 0.99));
    }

    #[test]
    fn ties_break_by_index() {
        let m = model();
        // every V vector is zero, so all cosines tie at 0
        let nn = nearest_neighbors(&m, "va", "V", "V", 10).unwrap();
        let idx: Vec<usize> = nn.iter().map(|n| n.index).collect();
        let mut sorted = idx.clone();
        sorted.sort();
        assert_eq!(idx, sorted);
    }

    #[test]
    fn oov_and_bad_k() {
        let m = model();
        assert!(matches!(nearest_neighbors(&m, "zz", "S", "S", 3), Err(Error::Lookup { .. })));
        assert!(nearest_neighbors(&m, "a", "S", "S", 0).is_err());
    }

    #[test]
    fn separated_clusters_are_pure() {
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let mut v = Array2::<f64>::zeros((30, 3));
        for (i, &c) in labels.iter().enumerate() {
            v[[i, c]] = 1.0;
        }
        assert_eq!(cluster_purity_of(v.view(), &labels, 3), 1.0);
    }

    #[test]
    fn random_vectors_are_near_chance() {
        let mut rng = seeded_rng(5, 0);
        let v = Array2::from_shape_fn((1000, 25), |_| rng.random_range(-1.0..1.0));
        let labels: Vec<usize> = (0..1000).map(|_| rng.random_range(0..3)).collect();
        let p = cluster_purity_of(v.view(), &labels, 3);
        assert!(p < 0.5, "purity {p}");
    }

    #[test]
    fn purity_reads_item_rows_by_word() {
        let a = gen_synthetic_assignment(30, 3, 1, AssignmentMode::Balanced).unwrap();
        let (vocab, _) = a.encode().unwrap();
        let mut m = JointModel::zeros(vocab, 3, Sharing::Shared).unwrap();
        let items = m.vocab().group(0).clone();
        for (word, &c) in a.item_words.iter().zip(&a.assignment) {
            m.params_mut().embeddings[0][[items.lookup(word).unwrap(), c]] = 1.0;
        }
        assert_eq!(cluster_purity(&m.frozen(), &a, "A").unwrap(), 1.0);
    }
}
