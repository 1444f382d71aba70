//! Parsing of group, automorphism and element arguments.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nilentropy::builtins::builtin;
use nilentropy::constructions::{free_nilpotent, surface_quotient};
use nilentropy::json::{read_endomorphism, read_group};
use nilentropy::{Endomorphism, GroupSpec, Malcev, WordExpr};

fn pair(s: &str, what: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(',')
        .with_context(|| format!("expected `{what}:A,B`, got `{what}:{s}`"))?;
    Ok((
        a.trim().parse().with_context(|| format!("bad number `{a}`"))?,
        b.trim().parse().with_context(|| format!("bad number `{b}`"))?,
    ))
}

/// `free:m,c`, `surface:g,c` or a path to a group document.
pub fn group(src: &str) -> Result<GroupSpec> {
    if let Some(rest) = src.strip_prefix("free:") {
        let (m, c) = pair(rest, "free")?;
        return Ok(free_nilpotent(m, c)?);
    }
    if let Some(rest) = src.strip_prefix("surface:") {
        let (g, c) = pair(rest, "surface")?;
        return Ok(surface_quotient(g, c)?);
    }
    read_group(Path::new(src)).with_context(|| format!("reading group from `{src}`"))
}

/// `builtin:NAME` over `group`, or a path to an endomorphism document.
pub fn automorphism(src: &str, group: Option<&GroupSpec>) -> Result<Endomorphism> {
    if let Some(name) = src.strip_prefix("builtin:") {
        let Some(group) = group else {
            bail!("`--aut builtin:{name}` needs `--group`");
        };
        return Ok(builtin(name, group)?);
    }
    let phi = read_endomorphism(Path::new(src)).with_context(|| format!("reading automorphism from `{src}`"))?;
    if let Some(g) = group {
        if g.rank() != phi.spec().rank() || g.len() != phi.spec().len() {
            bail!(
                "automorphism acts on a group with {} coordinates, but --group has {}",
                phi.spec().len(),
                g.len()
            );
        }
    }
    Ok(phi)
}

/// The group given by `--group`, falling back to the automorphism's own.
pub fn group_and_automorphism(group_src: Option<&str>, aut_src: &str) -> Result<(GroupSpec, Endomorphism)> {
    let group = group_src.map(group).transpose()?;
    let phi = automorphism(aut_src, group.as_ref())?;
    Ok((phi.spec().clone(), phi))
}

/// A coordinate vector such as `(1,0,2)` or a word such as `x1 x2^-1`.
pub fn element(spec: &GroupSpec, s: &str) -> Result<Malcev> {
    let t = s.trim();
    if t.starts_with('(') || t.starts_with('[') {
        let g: Malcev = t.parse().with_context(|| format!("bad coordinate vector `{s}`"))?;
        spec.check_len(&g)?;
        return Ok(spec.reduce(&g));
    }
    let w: WordExpr = t.parse().with_context(|| format!("bad word `{s}`"))?;
    Ok(spec.eval_word(&w)?)
}

pub fn subjects(spec: &GroupSpec, given: &[String]) -> Result<Vec<Malcev>> {
    if given.is_empty() {
        return Ok(spec.generating_set().to_vec());
    }
    given.iter().map(|s| element(spec, s)).collect()
}

/// Comma-separated list of integers.
pub fn usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse().with_context(|| format!("bad number `{x}`")))
        .collect()
}
