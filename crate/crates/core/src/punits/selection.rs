//! Selection: a conjunction of comparison atoms over one input layout.
//!
//! The predicate arrives at deploy time as a tag-0 instruction. An
//! unprogrammed selection passes everything; the END tuple always passes.

use crate::instr::{CmpOp, PredicateAtom, PredicateProgram};

#[derive(Debug, Clone, Default)]
pub struct SelectionPredicate {
    atoms: Vec<PredicateAtom>,
    /// Fields available in the unit's input layout.
    field_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("predicate atom references field {field} but the layout has {fields} fields")]
pub struct UnknownField {
    pub field: usize,
    pub fields: usize,
}

impl SelectionPredicate {
    pub fn new(field_count: usize) -> SelectionPredicate {
        SelectionPredicate { atoms: Vec::new(), field_count }
    }

    pub fn with_atoms(field_count: usize, atoms: Vec<PredicateAtom>) -> Result<SelectionPredicate, UnknownField> {
        let mut p = SelectionPredicate::new(field_count);
        p.set_atoms(atoms)?;
        Ok(p)
    }

    pub fn atoms(&self) -> &[PredicateAtom] {
        &self.atoms
    }

    fn set_atoms(&mut self, atoms: Vec<PredicateAtom>) -> Result<(), UnknownField> {
        for atom in &atoms {
            if atom.field >= self.field_count {
                return Err(UnknownField { field: atom.field, fields: self.field_count });
            }
        }
        self.atoms = atoms;
        Ok(())
    }

    /// Replaces the predicate with the atoms of a deploy-time instruction.
    pub fn program(&mut self, prog: &PredicateProgram) -> Result<(), crate::fault::Fault> {
        self.set_atoms(prog.atoms.clone()).map_err(|e| crate::fault::Fault::DeployMismatch {
            b_id: prog.b_id,
            detail: e.to_string(),
        })
    }

    /// True when every atom holds for the decoded values.
    pub fn matches(&self, values: &[u64]) -> bool {
        self.atoms.iter().all(|a| a.op.eval(values[a.field], a.value as u64))
    }
}

/// Convenience constructor for tests and plans.
pub fn atom(field: usize, op: CmpOp, value: u32) -> PredicateAtom {
    PredicateAtom { field, op, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_semantics() {
        let p = SelectionPredicate::with_atoms(
            3,
            vec![atom(1, CmpOp::Gt, 100), atom(2, CmpOp::Eq, 5)],
        )
        .unwrap();
        assert!(p.matches(&[0, 101, 5]));
        assert!(!p.matches(&[0, 100, 5])); // Gt is strict
        assert!(!p.matches(&[0, 101, 6]));
    }

    #[test]
    fn equality_atom_drops_mismatch() {
        // segment enumeration: BUILDING = 1
        let p = SelectionPredicate::with_atoms(2, vec![atom(1, CmpOp::Eq, 1)]).unwrap();
        assert!(!p.matches(&[7, 0]));
        assert!(p.matches(&[7, 1]));
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(SelectionPredicate::with_atoms(2, vec![atom(2, CmpOp::Lt, 1)]).is_err());
    }

    #[test]
    fn empty_predicate_passes_all() {
        let p = SelectionPredicate::new(4);
        assert!(p.matches(&[1, 2, 3, 4]));
    }
}
