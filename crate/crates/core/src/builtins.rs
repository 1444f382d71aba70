//! Named example automorphisms of rank-2 groups, given by words in the
//! basis generators so that they make sense at every class.

use crate::autom::Endomorphism;
use crate::error::{Error, Result};
use crate::group::{GroupSpec, WordExpr};

pub const NAMES: [&str; 4] = ["fib", "unipotent-shear", "central-shear", "identity"];

fn words(name: &str) -> Option<[&'static str; 2]> {
    Some(match name {
        // Abelianization [[1,1],[1,0]].
        "fib" => ["x1 x2", "x1"],
        "unipotent-shear" => ["x1", "x1 x2"],
        // x1 -> x1 [x2, x1], x2 -> x2.
        "central-shear" => ["x1 x2^-1 x1^-1 x2 x1", "x2"],
        "identity" => ["x1", "x2"],
        _ => return None,
    })
}

pub fn builtin(name: &str, spec: &GroupSpec) -> Result<Endomorphism> {
    let ws = words(name).ok_or_else(|| {
        Error::InvalidParameter(format!("unknown builtin `{name}`; expected one of {}", NAMES.join(", ")))
    })?;
    if spec.rank() != 2 {
        return Err(Error::InvalidParameter(format!(
            "builtin `{name}` needs a rank-2 group, got rank {}",
            spec.rank()
        )));
    }
    let ws: Vec<WordExpr> = ws.iter().map(|w| w.parse()).collect::<Result<_>>()?;
    let images = ws
        .iter()
        .map(|w| spec.eval_basis_word(w))
        .collect::<Result<Vec<_>>>()?;
    Endomorphism::new(spec, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Malcev;

    #[test]
    fn heisenberg_images() {
        let h = GroupSpec::free(2, 2).unwrap();
        let img = |n| builtin(n, &h).unwrap().images().to_vec();
        let v = Malcev::from_i64s;
        assert_eq!(img("fib"), vec![v(&[1, 1, 0]), v(&[1, 0, 0])]);
        assert_eq!(img("unipotent-shear"), vec![v(&[1, 0, 0]), v(&[1, 1, 0])]);
        assert_eq!(img("central-shear"), vec![v(&[1, 0, 1]), v(&[0, 1, 0])]);
        assert!(builtin("nope", &h).is_err());
        assert!(builtin("fib", &GroupSpec::free(3, 2).unwrap()).is_err());
    }
}
