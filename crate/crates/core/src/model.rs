use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::checkers::Notion;
use crate::constraints::Constraint;
use crate::domains::{Domain, IntSet, VarId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub initial: IntSet,
}

/// A constraint together with the notion its propagator enforces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posted {
    pub id: String,
    pub constraint: Constraint,
    pub notion: Notion,
}

/// Named variables with initial sets, plus a conjunction of constraints.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Model {
    pub vars: Vec<VarDecl>,
    pub constraints: Vec<Posted>,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, initial: IntSet) -> VarId {
        self.vars.push(VarDecl { name: name.into(), initial });
        VarId::from(self.vars.len() - 1)
    }

    pub fn post(&mut self, id: impl Into<String>, constraint: Constraint, notion: Notion) {
        self.constraints.push(Posted { id: id.into(), constraint, notion });
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId::from)
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    pub fn constraint_index(&self, id: &str) -> Option<usize> {
        self.constraints.iter().position(|c| c.id == id)
    }

    pub fn initial_domain(&self) -> Domain {
        Domain::new(self.vars.iter().map(|v| v.initial.clone()).collect())
    }

    /// The same model with every constraint attached to `notion`.
    pub fn with_notion(&self, notion: Notion) -> Model {
        let mut m = self.clone();
        for p in &mut m.constraints {
            p.notion = notion;
        }
        m
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for v in &self.vars {
            if v.name.is_empty() {
                return Err(Error::InvalidModel("empty variable name".into()));
            }
            if !names.insert(v.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate variable `{}`", v.name)));
            }
            if v.initial.is_empty() {
                return Err(Error::InvalidModel(format!("variable `{}` has an empty domain", v.name)));
            }
        }
        let mut ids = HashSet::new();
        let d = self.initial_domain();
        for p in &self.constraints {
            if !ids.insert(p.id.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate constraint id `{}`", p.id)));
            }
            p.constraint.validate(Some(&d)).map_err(|e| Error::InvalidModel(format!("{}: {e}", p.id)))?;
            if p.notion == Notion::BoundsR && !p.constraint.has_real_semantics() {
                return Err(Error::InvalidModel(format!(
                    "{}: {} cannot be propagated under bounds-r",
                    p.id,
                    p.constraint.kind()
                )));
            }
        }
        Ok(())
    }
}
