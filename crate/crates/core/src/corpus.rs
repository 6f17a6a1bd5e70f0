//! Built-in varieties, addressable as `@name`.

use crate::presentation::Presentation;

const BUILTINS: &[(&str, &str, &[&str], &[&str])] = &[
    ("affine-line", "affine_line", &["x"], &[]),
    ("affine-plane", "affine_plane", &["x", "y"], &[]),
    ("affine-3", "affine_3", &["x", "y", "z"], &[]),
    ("parabola", "parabola", &["x", "y"], &["y - x^2"]),
    ("circle", "circle", &["x", "y"], &["x^2 + y^2 - 1"]),
    ("cusp", "cusp", &["x", "y"], &["y^2 - x^3"]),
    ("node", "node", &["x", "y"], &["y^2 - x^2*(x + 1)"]),
    ("danielewski-x", "danielewski_x", &["x", "y", "z"], &["x*z - y^2 + 1"]),
    ("danielewski-y", "danielewski_y", &["x", "y", "z"], &["x^2*z - y^2 + 1"]),
];

/// Names accepted by [`builtin`], without the leading `@`.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|b| b.0).collect()
}

/// Looks up a built-in variety; the leading `@` is optional.
pub fn builtin(name: &str) -> Option<Presentation> {
    let key = name.strip_prefix('@').unwrap_or(name);
    BUILTINS.iter().find(|b| b.0 == key).map(|&(_, pname, vars, gens)| {
        Presentation::from_strings(pname, vars, gens).expect("built-in varieties parse")
    })
}

/// The seven-variety test corpus: smooth and singular curves, affine space
/// and the two Danielewski surfaces.
pub fn test_corpus() -> Vec<Presentation> {
    [
        "affine-plane",
        "parabola",
        "circle",
        "cusp",
        "node",
        "danielewski-x",
        "danielewski-y",
    ]
    .iter()
    .map(|n| builtin(n).unwrap())
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_loads() {
        for name in builtin_names() {
            let v = builtin(&format!("@{name}")).unwrap();
            assert!(v.generators().len() <= 1);
        }
        assert!(builtin("@nope").is_none());
        assert_eq!(test_corpus().len(), 7);
    }
}
