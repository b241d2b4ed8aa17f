//! Derived rules: compositions of primitive steps, built as ordinary
//! certificates so the checker sees only primitives.

use super::{apply_rule, Certificate, KernelError, Params, RuleId};
use crate::syntax::{num, Formula, Path, Term};

fn equivalence(c: &Certificate) -> Result<(&Formula, &Formula), KernelError> {
    match c.formula() {
        Some(Formula::Equiv(a, b)) => Ok((a, b)),
        _ => Err(KernelError::Shape("expected a proven equivalence".into())),
    }
}

/// `s = t` by ring normalization.
pub fn poly_identity(lhs: Term, rhs: Term) -> Result<Certificate, KernelError> {
    apply_rule(RuleId::PolyIdentity, Params::Identity { lhs, rhs }, vec![])
}

/// `f <-> f`, as a congruence instance of `0 = 0`.
pub fn reflexivity(f: &Formula) -> Result<Certificate, KernelError> {
    if crate::syntax::contains_dot(f) {
        return Err(KernelError::IllFormed(
            "reflexivity of a formula with dots".into(),
        ));
    }
    let zero = poly_identity(num(0), num(0))?;
    apply_rule(RuleId::CQ, Params::Context(f.clone()), vec![zero])
}

/// Rewrites the formula at `path` in `target`'s conclusion using `eq`.
pub fn equiv_rewrite(
    eq: Certificate,
    target: Certificate,
    path: Path,
) -> Result<Certificate, KernelError> {
    apply_rule(RuleId::EquivRewrite, Params::Path(path), vec![eq, target])
}

/// From `a <-> b` derive `b <-> a`.
pub fn symmetry(eq: Certificate) -> Result<Certificate, KernelError> {
    let (a, _) = equivalence(&eq)?;
    let refl = reflexivity(a)?;
    equiv_rewrite(eq, refl, Path::new(vec![0]))
}

/// From `a <-> b` and `b <-> c` derive `a <-> c`.
pub fn transitivity(ab: Certificate, bc: Certificate) -> Result<Certificate, KernelError> {
    equiv_rewrite(bc, ab, Path::new(vec![1]))
}

/// From `a <-> b` derive `f <-> f'` where `f'` is `f` with the `a` at
/// `path` replaced by `b`.
pub fn lift(eq: Certificate, f: &Formula, path: &Path) -> Result<Certificate, KernelError> {
    let refl = reflexivity(f)?;
    equiv_rewrite(eq, refl, Path::new(vec![1]).join(path))
}

/// From `p -> q` and `p` derive `q`.
pub fn modus_ponens(imp: Certificate, p: Certificate) -> Result<Certificate, KernelError> {
    apply_rule(RuleId::ModusPonens, Params::None, vec![imp, p])
}
