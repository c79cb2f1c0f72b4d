//! Event representations composed from subject, verb and object vectors.

use std::fmt;
use std::str::FromStr;

use ndarray::{concatenate, Array1, ArrayView1, Axis};

use crate::error::{Error, Result};
use crate::eval::cosine_checked;
use crate::model::FrozenModel;

/// An `(S, V, O)` event given by surface words; each word is looked up in its
/// own group's space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub s: String,
    pub v: String,
    pub o: String,
}

impl EventRecord {
    pub fn new(s: impl Into<String>, v: impl Into<String>, o: impl Into<String>) -> Self {
        Self {
            s: s.into(),
            v: v.into(),
            o: o.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompositionKind {
    /// `v`
    VerbOnly,
    /// `s + v + o`
    Addition,
    /// `s` scaled elementwise by the scalar `v . o`
    CopyObject,
    /// `[s, v, o]`
    Concat,
    /// `[s, v] + [v, o]`
    ConcatAddition,
    /// the scalar plausibility `s.v + v.o + s.o` (plus biases when enabled)
    Network,
}

impl CompositionKind {
    pub const ALL: [CompositionKind; 6] = [
        CompositionKind::VerbOnly,
        CompositionKind::Addition,
        CompositionKind::CopyObject,
        CompositionKind::Concat,
        CompositionKind::ConcatAddition,
        CompositionKind::Network,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CompositionKind::VerbOnly => "verb-only",
            CompositionKind::Addition => "addition",
            CompositionKind::CopyObject => "copy-object",
            CompositionKind::Concat => "concat",
            CompositionKind::ConcatAddition => "concat-addition",
            CompositionKind::Network => "network",
        }
    }

    /// Output length for vectors of dimension `d`; `None` for the scalar kind.
    pub fn output_len(&self, d: usize) -> Option<usize> {
        match self {
            CompositionKind::VerbOnly | CompositionKind::Addition | CompositionKind::CopyObject => Some(d),
            CompositionKind::Concat => Some(3 * d),
            CompositionKind::ConcatAddition => Some(2 * d),
            CompositionKind::Network => None,
        }
    }
}

impl fmt::Display for CompositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompositionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Self::ALL.into_iter().find(|k| k.name() == norm).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
            Error::Config(format!("unknown composition {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Composed {
    Vector(Array1<f64>),
    Scalar(f64),
}

impl Composed {
    pub fn as_vector(&self) -> Option<&Array1<f64>> {
        match self {
            Composed::Vector(v) => Some(v),
            Composed::Scalar(_) => None,
        }
    }
}

/// Applies a vector composition to raw vectors. Returns `None` for
/// [`CompositionKind::Network`], which needs the model's scorer.
pub fn compose_vectors(
    s: ArrayView1<f64>,
    v: ArrayView1<f64>,
    o: ArrayView1<f64>,
    kind: CompositionKind,
) -> Option<Array1<f64>> {
    Some(match kind {
        CompositionKind::VerbOnly => v.to_owned(),
        CompositionKind::Addition => &s + &v + &o,
        CompositionKind::CopyObject => &s * v.dot(&o),
        CompositionKind::Concat => concatenate(Axis(0), &[s, v, o]).expect("equal dims"),
        CompositionKind::ConcatAddition => {
            let sv = concatenate(Axis(0), &[s, v]).expect("equal dims");
            let vo = concatenate(Axis(0), &[v, o]).expect("equal dims");
            sv + vo
        }
        CompositionKind::Network => return None,
    })
}

pub fn compose_event(model: &FrozenModel, event: &EventRecord, kind: CompositionKind) -> Result<Composed> {
    if kind == CompositionKind::Network {
        return model.triplet_plausibility(&event.s, &event.v, &event.o).map(Composed::Scalar);
    }
    let s = model.vector_of("S", &event.s)?;
    let v = model.vector_of("V", &event.v)?;
    let o = model.vector_of("O", &event.o)?;
    Ok(Composed::Vector(compose_vectors(s, v, o, kind).expect("vector kind")))
}

/// Similarity of two events and whether a zero-norm vector forced it to 0.
///
/// Vector kinds compare composed vectors by cosine. The network kind needs
/// both events to share subject and object, and scores the second event's
/// plausibility, i.e. the shared `S`, `O` with the second verb.
pub fn event_similarity_detailed(
    model: &FrozenModel,
    a: &EventRecord,
    b: &EventRecord,
    kind: CompositionKind,
) -> Result<(f64, bool)> {
    if kind == CompositionKind::Network {
        if a.s != b.s || a.o != b.o {
            return Err(Error::Unsupported(format!(
                "network similarity needs shared S and O, got ({} {} {}) vs ({} {} {})",
                a.s, a.v, a.o, b.s, b.v, b.o
            )));
        }
        // both events must resolve, even though only the second is scored
        model.triplet_plausibility(&a.s, &a.v, &a.o)?;
        return Ok((model.triplet_plausibility(&b.s, &b.v, &b.o)?, false));
    }
    let x = compose_event(model, a, kind)?;
    let y = compose_event(model, b, kind)?;
    let (x, y) = (x.as_vector().expect("vector kind"), y.as_vector().expect("vector kind"));
    Ok(cosine_checked(x.view(), y.view()))
}

pub fn event_similarity_score(
    model: &FrozenModel,
    a: &EventRecord,
    b: &EventRecord,
    kind: CompositionKind,
) -> Result<f64> {
    event_similarity_detailed(model, a, b, kind).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{GroupSchema, RawTuple, Vocabulary};
    use crate::eval::cosine;
    use crate::model::{JointModel, Sharing};
    use approx::assert_relative_eq;
    use ndarray::array;

    fn vecs() -> (Array1<f64>, Array1<f64>, Array1<f64>) {
        (array![1.0, 0.0], array![0.0, 1.0], array![1.0, 1.0])
    }

    #[test]
    fn worked_examples() {
        let (s, v, o) = vecs();
        let f = |k| compose_vectors(s.view(), v.view(), o.view(), k).unwrap();
        assert_eq!(f(CompositionKind::Addition), array![2.0, 2.0]);
        assert_eq!(f(CompositionKind::CopyObject), array![1.0, 0.0]);
        assert_eq!(f(CompositionKind::ConcatAddition), array![1.0, 1.0, 1.0, 2.0]);
        assert_eq!(f(CompositionKind::VerbOnly), array![0.0, 1.0]);
        assert_eq!(f(CompositionKind::Concat), array![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert!(compose_vectors(s.view(), v.view(), o.view(), CompositionKind::Network).is_none());
    }

    #[test]
    fn output_arity() {
        let (s, v, o) = vecs();
        for kind in CompositionKind::ALL {
            let got = compose_vectors(s.view(), v.view(), o.view(), kind).map(|x| x.len());
            assert_eq!(got, kind.output_len(2), "{kind}");
        }
    }

    #[test]
    fn addition_commutes_but_concat_does_not() {
        let (s, v, o) = (array![1.0, 2.0], array![-3.0, 0.5], array![0.25, 4.0]);
        let add = |a: &Array1<f64>, b: &Array1<f64>, c: &Array1<f64>| {
            compose_vectors(a.view(), b.view(), c.view(), CompositionKind::Addition).unwrap()
        };
        let cat = |a: &Array1<f64>, b: &Array1<f64>, c: &Array1<f64>| {
            compose_vectors(a.view(), b.view(), c.view(), CompositionKind::Concat).unwrap()
        };
        assert_eq!(add(&s, &v, &o), add(&o, &s, &v));
        assert_eq!(add(&s, &v, &o), add(&v, &o, &s));
        assert_ne!(cat(&s, &v, &o), cat(&o, &s, &v));
    }

    #[test]
    fn copy_object_is_parallel_to_subject() {
        let (s, v, o) = (array![1.0, -2.0, 0.5], array![0.3, 0.1, 2.0], array![-1.0, 0.2, 0.4]);
        let c = compose_vectors(s.view(), v.view(), o.view(), CompositionKind::CopyObject).unwrap();
        assert_relative_eq!(cosine(c.view(), s.view()).abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in CompositionKind::ALL {
            assert_eq!(k.name().parse::<CompositionKind>().unwrap(), k);
        }
        assert_eq!("Concat_Addition".parse::<CompositionKind>().unwrap(), CompositionKind::ConcatAddition);
        let err = "tensor".parse::<CompositionKind>().unwrap_err().to_string();
        for k in CompositionKind::ALL {
            assert!(err.contains(k.name()));
        }
    }

    fn model() -> FrozenModel {
        let schema = GroupSchema::parse("S,V,O").unwrap();
        let tuples = vec![
            RawTuple::new(["people", "run", "company"], 1),
            RawTuple::new(["people", "operate", "company"], 1),
        ];
        let vocab = Vocabulary::build(&schema, &tuples, 1).unwrap();
        let mut m = JointModel::init(vocab, 3, Sharing::Shared, 5).unwrap();
        for b in &mut m.params_mut().biases {
            b.fill(0.1);
        }
        m.frozen()
    }

    #[test]
    fn identical_events_have_cosine_one() {
        let m = model();
        let e = EventRecord::new("people", "run", "company");
        for kind in CompositionKind::ALL.into_iter().filter(|&k| k != CompositionKind::Network) {
            assert_relative_eq!(event_similarity_score(&m, &e, &e, kind).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn network_similarity_scores_the_landmark() {
        let m = model();
        let a = EventRecord::new("people", "run", "company");
        let b = EventRecord::new("people", "operate", "company");
        let got = event_similarity_score(&m, &a, &b, CompositionKind::Network).unwrap();
        assert_eq!(got, m.triplet_plausibility("people", "operate", "company").unwrap());

        let c = EventRecord::new("company", "run", "people");
        assert!(matches!(
            event_similarity_score(&m, &a, &c, CompositionKind::Network),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn network_without_bias_is_the_dot_sum() {
        let m = model().without_bias();
        let s = m.vector_of("S", "people").unwrap();
        let v = m.vector_of("V", "run").unwrap();
        let o = m.vector_of("O", "company").unwrap();
        let expected = s.dot(&v) + v.dot(&o) + s.dot(&o);
        let e = EventRecord::new("people", "run", "company");
        assert_eq!(
            compose_event(&m, &e, CompositionKind::Network).unwrap(),
            Composed::Scalar(expected)
        );
    }

    #[test]
    fn oov_is_a_lookup_error() {
        let m = model();
        let e = EventRecord::new("people", "fly", "company");
        assert!(matches!(
            compose_event(&m, &e, CompositionKind::Addition),
            Err(Error::Lookup { .. })
        ));
    }
}
