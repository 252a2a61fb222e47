//! Fragment classification and decomposition construction.
//!
//! Two syntactic fragments come with exchangeability guarantees via domain
//! renaming symmetries: monadic models (all predicates unary) decompose the
//! full atom set into per-constant blocks, and two-variable models (at most
//! two distinct logical variables per formula, arities at most two) split
//! into a marginally exchangeable per-constant scope — unary atoms plus
//! reflexive binary atoms — and off-diagonal binary atoms that factorize
//! into independent per-pair groups given that scope.

use alloc::vec::Vec;
use core::fmt;

use crate::exchange::Decomposition;
use crate::fol::MlnModel;
use crate::world::{AtomId, GroundModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FragmentClass {
    /// All predicates unary; the whole atom set decomposes with width equal
    /// to the predicate count.
    Monadic,
    /// Arities at most two and at most two distinct variables per formula.
    TwoVariable,
    /// No lifted guarantee; only the exhaustive engine applies.
    Unsupported,
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentClass::Monadic => write!(f, "monadic"),
            FragmentClass::TwoVariable => write!(f, "two-variable"),
            FragmentClass::Unsupported => write!(f, "unsupported"),
        }
    }
}

/// Classifies a model. Monadic wins when both fragments apply, because its
/// width (and hence statistic space) is smaller.
pub fn classify(model: &MlnModel) -> FragmentClass {
    if model.predicates.iter().all(|p| p.arity == 1) {
        return FragmentClass::Monadic;
    }
    let arity_ok = model.predicates.iter().all(|p| p.arity <= 2);
    let vars_ok = model.formulas.iter().all(|wf| wf.vars.len() <= 2);
    if arity_ok && vars_ok {
        FragmentClass::TwoVariable
    } else {
        FragmentClass::Unsupported
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentError {
    WrongFragment {
        expected: FragmentClass,
        found: FragmentClass,
    },
    BadContextConstant(u16),
}

impl fmt::Display for FragmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentError::WrongFragment { expected, found } => {
                write!(f, "model is {found}, not {expected}")
            }
            FragmentError::BadContextConstant(c) => {
                write!(f, "context constant index {c} is out of range or repeated")
            }
        }
    }
}

impl core::error::Error for FragmentError {}

/// The per-constant decomposition of a monadic model: block `i` holds
/// `P_1(i), ..., P_M(i)` in predicate order, width `M`.
pub fn monadic_decomposition(gm: &GroundModel) -> Result<Decomposition, FragmentError> {
    let found = classify(&gm.model);
    if found != FragmentClass::Monadic {
        return Err(FragmentError::WrongFragment {
            expected: FragmentClass::Monadic,
            found,
        });
    }
    let k = gm.domain_size();
    let blocks = (0..k)
        .map(|i| {
            (0..gm.model.predicates.len())
                .map(|p| gm.atom_id(p as u16, &[i]))
                .collect()
        })
        .collect();
    Ok(Decomposition::new(blocks).expect("per-constant blocks are disjoint and equal width"))
}

/// Which group a ground formula's weight belongs to when the two-variable
/// conditional split is in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorGroup {
    /// Evaluated directly on the decomposition scope plus the enumerated
    /// context atoms; mentions no off-diagonal binary atom between two
    /// lifted constants.
    Scope,
    /// Touches the off-diagonal binary atoms of exactly one lifted pair.
    Pair(u32),
}

/// The conditional split of a two-variable model, optionally with a set of
/// `context` constants whose atoms are lifted out for exhaustive
/// enumeration (used for queries naming off-diagonal binary atoms).
///
/// With an empty context this is the plain two-variable construction: per
/// lifted constant `i`, a block of the unary atoms `P(i)` and reflexive
/// binary atoms `Q(i,i)`; for every lifted pair `i < j`, the group
/// `Q(i,j), Q(j,i)` over all binary predicates. With a non-empty context,
/// each block is widened by the cross atoms `Q(i,c)` and `Q(c,i)` for every
/// context constant `c`, in (predicate, context constant, direction) order.
#[derive(Clone, Debug)]
pub struct ConditionalStructure {
    pub context: Vec<u16>,
    pub lifted: Vec<u16>,
    /// Atoms whose arguments all lie in the context, ascending by id.
    pub context_atoms: Vec<AtomId>,
    pub decomp: Decomposition,
    /// Width of the per-constant prefix (unary + reflexive atoms); the
    /// widened cross atoms follow it inside each block.
    pub base_width: u32,
    /// Lifted constant pairs `(i, j)`, `i < j`, in lexicographic order.
    /// Entries are indices into `lifted`, not raw constants.
    pub pairs: Vec<(u32, u32)>,
    /// Off-diagonal atoms of each pair: predicate-major, `(i,j)` before `(j,i)`.
    pub pair_atoms: Vec<Vec<AtomId>>,
    /// Group of every ground factor, aligned with `GroundModel::factors`.
    pub factor_groups: Vec<FactorGroup>,
}

impl ConditionalStructure {
    /// Width of the per-pair atom groups (`2 *` the binary predicate count).
    pub fn pair_width(&self) -> usize {
        self.pair_atoms.first().map(|a| a.len()).unwrap_or(0)
    }
}

/// Builds the conditional structure of a two-variable model. `context`
/// lists the constants (by domain index) to lift out; pass `&[]` for the
/// plain construction.
pub fn conditional_structure(
    gm: &GroundModel,
    context: &[u16],
) -> Result<ConditionalStructure, FragmentError> {
    let found = classify(&gm.model);
    if found == FragmentClass::Unsupported {
        return Err(FragmentError::WrongFragment {
            expected: FragmentClass::TwoVariable,
            found,
        });
    }
    let k = gm.domain_size();
    let mut in_context = alloc::vec![false; k as usize];
    for &c in context {
        if c >= k || in_context[c as usize] {
            return Err(FragmentError::BadContextConstant(c));
        }
        in_context[c as usize] = true;
    }
    let mut context: Vec<u16> = context.to_vec();
    context.sort_unstable();
    let lifted: Vec<u16> = (0..k).filter(|&i| !in_context[i as usize]).collect();

    let unary: Vec<u16> = (0..gm.model.predicates.len() as u16)
        .filter(|&p| gm.model.predicates[p as usize].arity == 1)
        .collect();
    let binary: Vec<u16> = (0..gm.model.predicates.len() as u16)
        .filter(|&p| gm.model.predicates[p as usize].arity == 2)
        .collect();
    let base_width = (unary.len() + binary.len()) as u32;

    // widened per-constant blocks over the lifted constants
    let blocks: Vec<Vec<AtomId>> = lifted
        .iter()
        .map(|&i| {
            let mut block: Vec<AtomId> = Vec::new();
            for &p in &unary {
                block.push(gm.atom_id(p, &[i]));
            }
            for &q in &binary {
                block.push(gm.atom_id(q, &[i, i]));
            }
            for &q in &binary {
                for &c in &context {
                    block.push(gm.atom_id(q, &[i, c]));
                    block.push(gm.atom_id(q, &[c, i]));
                }
            }
            block
        })
        .collect();
    let decomp = Decomposition::new(blocks).expect("widened blocks are disjoint and equal width");

    // context atoms: every atom whose arguments all lie in the context
    let mut context_atoms: Vec<AtomId> = Vec::new();
    for &p in &unary {
        for &c in &context {
            context_atoms.push(gm.atom_id(p, &[c]));
        }
    }
    for &q in &binary {
        for &a in &context {
            for &b in &context {
                context_atoms.push(gm.atom_id(q, &[a, b]));
            }
        }
    }
    context_atoms.sort_unstable();

    // lifted pairs and their off-diagonal atoms
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut pair_atoms: Vec<Vec<AtomId>> = Vec::new();
    let mut pair_index = alloc::collections::BTreeMap::new();
    for i in 0..lifted.len() {
        for j in (i + 1)..lifted.len() {
            pair_index.insert((lifted[i], lifted[j]), pairs.len() as u32);
            pairs.push((i as u32, j as u32));
            let mut atoms = Vec::with_capacity(binary.len() * 2);
            for &q in &binary {
                atoms.push(gm.atom_id(q, &[lifted[i], lifted[j]]));
                atoms.push(gm.atom_id(q, &[lifted[j], lifted[i]]));
            }
            pair_atoms.push(atoms);
        }
    }

    // assign every ground factor to its group
    let mut factor_groups = Vec::with_capacity(gm.factors.len());
    for factor in &gm.factors {
        let mut group: Option<u32> = None;
        let mut consistent = true;
        factor.formula.for_each_leaf(&mut |&id| {
            let atom = gm.atom(id);
            if atom.args.len() == 2 && atom.args[0] != atom.args[1] {
                let (a, b) = (atom.args[0], atom.args[1]);
                if !in_context[a as usize] && !in_context[b as usize] {
                    let key = (a.min(b), a.max(b));
                    let pid = pair_index[&key];
                    match group {
                        None => group = Some(pid),
                        Some(g) if g == pid => {}
                        Some(_) => consistent = false,
                    }
                }
            }
        });
        // a two-variable ground formula mentions at most two constants, so
        // its off-diagonal lifted atoms cannot straddle two pairs
        assert!(consistent, "ground formula straddles two lifted pairs");
        factor_groups.push(match group {
            None => FactorGroup::Scope,
            Some(pid) => FactorGroup::Pair(pid),
        });
    }

    Ok(ConditionalStructure {
        context,
        lifted,
        context_atoms,
        decomp,
        base_width,
        pairs,
        pair_atoms,
        factor_groups,
    })
}

/// The plain two-variable split (no context constants).
pub fn two_var_structure(gm: &GroundModel) -> Result<ConditionalStructure, FragmentError> {
    conditional_structure(gm, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::ground_text;
    use alloc::vec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const MONADIC2: &str = "constants A B C\n1.3\tSmokes(x) => Cancer(x)\n1.5\tSmokes(x) & Smokes(y)\n";
    const FRIENDS: &str = "constants A B C\n1.3\tSmokes(x) => Cancer(x)\n1.5\tSmokes(x) & Friends(x,y) => Smokes(y)\n";

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&ground_text(MONADIC2).model), FragmentClass::Monadic);
        assert_eq!(classify(&ground_text(FRIENDS).model), FragmentClass::TwoVariable);
        let ternary = ground_text("domain 2\n1.0\tR(x,y,z)\n");
        assert_eq!(classify(&ternary.model), FragmentClass::Unsupported);
        // three distinct variables also leave the two-variable fragment
        let three_vars = ground_text("domain 2\n1.0\tQ(x,y) & Q(y,z)\n");
        assert_eq!(classify(&three_vars.model), FragmentClass::Unsupported);
    }

    #[test]
    fn monadic_blocks_per_constant() {
        let gm = ground_text(MONADIC2);
        let d = monadic_decomposition(&gm).unwrap();
        assert_eq!(d.block_count(), 3);
        assert_eq!(d.width(), 2);
        // block for A: Smokes(A), Cancer(A)
        assert_eq!(d.blocks()[0], vec![gm.parse_atom("Smokes(A)").unwrap(), gm.parse_atom("Cancer(A)").unwrap()]);
    }

    #[test]
    fn monadic_singleton_blocks() {
        let gm = ground_text("domain 5\n0.5\tP(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        assert_eq!(d.block_count(), 5);
        assert_eq!(d.width(), 1);
    }

    #[test]
    fn monadic_rejects_binary_models() {
        let gm = ground_text(FRIENDS);
        assert!(matches!(
            monadic_decomposition(&gm),
            Err(FragmentError::WrongFragment { .. })
        ));
    }

    #[test]
    fn monadic_block_swap_preserves_weight() {
        // permuting two blocks' contents never changes the log weight
        let gm = ground_text(MONADIC2);
        let d = monadic_decomposition(&gm).unwrap();
        let n = gm.atom_count() as usize;
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let mut world: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let before = gm.log_weight(&world);
            let (a, b) = (rng.gen_range(0..3usize), rng.gen_range(0..3usize));
            for pos in 0..d.width() as usize {
                let (x, y) = (d.blocks()[a][pos] as usize, d.blocks()[b][pos] as usize);
                world.swap(x, y);
            }
            assert_eq!(gm.log_weight(&world), before);
        }
    }

    #[test]
    fn two_var_structure_of_social_model() {
        let gm = ground_text(FRIENDS);
        let cs = two_var_structure(&gm).unwrap();
        assert_eq!(cs.decomp.block_count(), 3);
        assert_eq!(cs.decomp.width(), 3);
        assert_eq!(cs.base_width, 3);
        assert_eq!(cs.pairs.len(), 3);
        for atoms in &cs.pair_atoms {
            assert_eq!(atoms.len(), 2);
        }
        // block for A holds Smokes(A), Cancer(A), Friends(A,A)
        assert_eq!(
            cs.decomp.blocks()[0],
            vec![
                gm.parse_atom("Smokes(A)").unwrap(),
                gm.parse_atom("Cancer(A)").unwrap(),
                gm.parse_atom("Friends(A,A)").unwrap(),
            ]
        );
        // the grounding of the second formula at (A,B) sits on pair {A,B}
        let ab = gm.parse_atom("Friends(A,B)").unwrap();
        let fid = gm
            .factors
            .iter()
            .position(|f| {
                let mut hit = false;
                f.formula.for_each_leaf(&mut |&id| hit |= id == ab);
                hit
            })
            .unwrap();
        assert_eq!(cs.factor_groups[fid], FactorGroup::Pair(0));
        assert_eq!(cs.pairs[0], (0, 1));
    }

    #[test]
    fn unary_only_factors_fall_in_scope_group() {
        // reflexive binary use keeps the predicate but yields no pair factors
        let gm = ground_text("constants A B\n0.7\tSmokes(x)\n0.2\tFriends(x,x)\n");
        let cs = two_var_structure(&gm).unwrap();
        assert!(cs.factor_groups.iter().all(|g| *g == FactorGroup::Scope));
        assert_eq!(cs.pairs.len(), 1);
        assert_eq!(cs.pair_atoms[0].len(), 2);
    }

    #[test]
    fn additive_split_reproduces_log_weight() {
        let gm = ground_text(FRIENDS);
        let cs = two_var_structure(&gm).unwrap();
        let n = gm.atom_count() as usize;
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let world: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let mut scope_part = 0.0;
            let mut pair_part = vec![0.0; cs.pairs.len()];
            for (factor, group) in gm.factors.iter().zip(&cs.factor_groups) {
                let sat = factor.formula.eval_with(&mut |&id| world[id as usize]);
                if sat {
                    match group {
                        FactorGroup::Scope => scope_part += factor.weight,
                        FactorGroup::Pair(p) => pair_part[*p as usize] += factor.weight,
                    }
                }
            }
            let total = scope_part + pair_part.iter().sum::<f64>();
            assert!((total - gm.log_weight(&world)).abs() < 1e-9);
        }
    }

    #[test]
    fn renaming_swap_preserves_weight() {
        // swap two constants everywhere: blocks trade patterns and the
        // off-diagonal atoms relabel under the transposition
        let gm = ground_text(FRIENDS);
        let n = gm.atom_count() as usize;
        let k = gm.domain_size();
        let swap = |c: u16, i: u16, j: u16| {
            if c == i {
                j
            } else if c == j {
                i
            } else {
                c
            }
        };
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let world: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let (i, j) = (rng.gen_range(0..k), rng.gen_range(0..k));
            let mut renamed = vec![false; n];
            for id in 0..gm.atom_count() {
                let atom = gm.atom(id);
                let new_args: Vec<u16> = atom.args.iter().map(|&c| swap(c, i, j)).collect();
                let new_id = gm.atom_id(atom.pred, &new_args);
                renamed[new_id as usize] = world[id as usize];
            }
            assert_eq!(gm.log_weight(&renamed), gm.log_weight(&world));
        }
    }

    #[test]
    fn context_widens_blocks() {
        let gm = ground_text(FRIENDS);
        let cs = conditional_structure(&gm, &[0, 1]).unwrap();
        assert_eq!(cs.lifted, vec![2]);
        assert_eq!(cs.decomp.block_count(), 1);
        // prefix Smokes(C), Cancer(C), Friends(C,C) then cross atoms to A and B
        assert_eq!(cs.decomp.width(), 3 + 4);
        assert_eq!(
            cs.decomp.blocks()[0],
            vec![
                gm.parse_atom("Smokes(C)").unwrap(),
                gm.parse_atom("Cancer(C)").unwrap(),
                gm.parse_atom("Friends(C,C)").unwrap(),
                gm.parse_atom("Friends(C,A)").unwrap(),
                gm.parse_atom("Friends(A,C)").unwrap(),
                gm.parse_atom("Friends(C,B)").unwrap(),
                gm.parse_atom("Friends(B,C)").unwrap(),
            ]
        );
        // context atoms: Smokes/Cancer of A,B and all four Friends over {A,B}
        assert_eq!(cs.context_atoms.len(), 2 + 2 + 4);
        assert!(cs.pairs.is_empty());
        // with one lifted constant every factor is a scope factor
        assert!(cs.factor_groups.iter().all(|g| *g == FactorGroup::Scope));
    }

    #[test]
    fn context_rejects_bad_constants() {
        let gm = ground_text(FRIENDS);
        assert!(conditional_structure(&gm, &[9]).is_err());
        assert!(conditional_structure(&gm, &[1, 1]).is_err());
    }
}
