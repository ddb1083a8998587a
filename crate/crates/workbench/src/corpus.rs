//! Built-in instances. Each one is also shipped as a normalized
//! `.rgw.json` file under `corpus/` at the repository root.

use rgw_core::{examples, Matrix, Rational, Scalar, SpaceSpec};

use crate::document::SpaceDocument;

fn q(v: i64) -> Rational {
    Rational::from_i64(v)
}

fn su2(name: &str, d: [i64; 3]) -> SpaceDocument {
    SpaceDocument::from_exact_spec(name, &examples::su2(&d.map(q)))
}

/// `S^2` with a quarter turn of the isotropy circle as an explicit generator.
fn sphere2() -> SpaceDocument {
    let mut spec: SpaceSpec<Rational> = examples::s2();
    spec.isotropy_generators = vec![Matrix::from_rows(&[vec![q(0), q(-1)], vec![q(1), q(0)]])];
    SpaceDocument::from_exact_spec("sphere-s2", &spec)
}

pub fn builtin_corpus() -> Vec<SpaceDocument> {
    vec![
        SpaceDocument::from_exact_spec("abelian-r2", &examples::abelian(2)),
        SpaceDocument::from_exact_spec("abelian-r3", &examples::abelian(3)),
        SpaceDocument::from_exact_spec("heisenberg", &examples::heisenberg()),
        su2("su2-round", [1, 1, 1]),
        su2("su2-berger", [1, 1, 2]),
        su2("su2-balanced", [1, 4, 1]),
        SpaceDocument::from_exact_spec("affine-line", &examples::affine_line()),
        SpaceDocument::from_exact_spec("euclidean-plane", &examples::euclidean_plane()),
        sphere2(),
        SpaceDocument::from_exact_spec("sphere-s3", &examples::sphere(3)),
        SpaceDocument::from_exact_spec("so4-so2", &examples::so4_so2()),
    ]
}

pub fn corpus_instance(name: &str) -> Option<SpaceDocument> {
    builtin_corpus().into_iter().find(|d| d.name == name)
}

/// File name used for a corpus instance.
pub fn file_name(doc: &SpaceDocument) -> String {
    format!("{}.rgw.json", doc.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::parse_document;
    use rgw_core::validate_space;

    #[test]
    fn corpus_is_valid() {
        let corpus = builtin_corpus();
        assert!(corpus.len() >= 8);
        for doc in &corpus {
            assert!(doc.exact);
            assert!(validate_space(&doc.to_exact_spec(), 0.0).unwrap().is_valid(), "{}", doc.name);
            assert!(validate_space(&doc.to_f64_spec(), 1e-12).unwrap().is_valid(), "{}", doc.name);
        }
    }

    #[test]
    fn shipped_files_match() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
        for doc in builtin_corpus() {
            let path = dir.join(file_name(&doc));
            let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(parse_document(&text).unwrap(), doc);
            assert_eq!(text, doc.to_json());
        }
    }
}
