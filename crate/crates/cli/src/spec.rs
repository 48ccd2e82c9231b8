//! Element specs: names, literals, inline s-expressions, or `@file`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Deserialize;

use pca_core::k1::{self, K1Model};
use pca_core::k2::{K2Element, PrefixRule};
use pca_core::oracle::{query_machine, scripted_plans, table_oracles, OracleFn};
use pca_core::pca::FiniteTable;
use pca_core::reductions::candidates::k1_c01;
use pca_core::reductions::Setting;
use pca_core::term::{eval_closed, Basis, Term};
use pca_core::EvalOutcome;

use crate::CliError;

/// The text of a spec, reading `@path` from disk.
pub fn read_spec(spec: &str) -> Result<String, CliError> {
    match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map(|s| s.trim().to_string()).map_err(|e| CliError::Io { path: path.into(), source: e }),
        None => Ok(spec.trim().to_string()),
    }
}

pub fn parse_term(spec: &str) -> Result<Term<String>, CliError> {
    let src = read_spec(spec)?;
    Term::parse(&src).map_err(|e| CliError::usage(format!("bad term: {e}")))
}

/// `name=spec` pairs from `--bind`.
pub fn split_binds(binds: &[String]) -> Result<Vec<(String, String)>, CliError> {
    binds
        .iter()
        .map(|b| match b.split_once('=') {
            Some((n, s)) if !n.is_empty() => Ok((n.to_string(), s.to_string())),
            _ => Err(CliError::usage(format!("--bind expects NAME=SPEC, got {b:?}"))),
        })
        .collect()
}

/// Closes a parsed term by resolving each constant name.
pub fn resolve<C>(t: &Term<String>, mut lookup: impl FnMut(&str) -> Result<C, CliError>) -> Result<Term<C>, CliError> {
    t.try_map_consts(&mut |name: &String| lookup(name))
}

pub(crate) fn closed_check<C>(t: &Term<C>) -> Result<(), CliError> {
    let free = t.free_vars();
    if free.is_empty() {
        Ok(())
    } else {
        Err(CliError::usage(format!("term has free variables: {}", free.into_iter().collect::<Vec<_>>().join(", "))))
    }
}

/// Names understood in K1, with user bindings taking precedence.
pub struct K1Names<'s, 'm> {
    pub setting: &'s Setting<'m, K1Model>,
    pub binds: BTreeMap<String, BigUint>,
}

impl<'s, 'm> K1Names<'s, 'm> {
    pub fn new(setting: &'s Setting<'m, K1Model>, binds: &[String]) -> Result<Self, CliError> {
        let mut names = K1Names { setting, binds: BTreeMap::new() };
        for (n, s) in split_binds(binds)? {
            let v = names.element(&s)?;
            names.binds.insert(n, v);
        }
        Ok(names)
    }

    fn builtin(&self, name: &str) -> Option<BigUint> {
        let l = &self.setting.lib;
        Some(match name {
            "k" => l.basis.k.clone(),
            "s" => l.basis.s.clone(),
            "i" => l.i.clone(),
            "true" => l.tru.clone(),
            "false" => l.fls.clone(),
            "not" => l.not.clone(),
            "and" => l.and.clone(),
            "ite" => l.ite.clone(),
            "zero" => l.zero.clone(),
            "c" => l.to_numeral.clone(),
            "d" => l.to_bool.clone(),
            "h" => self.setting.h.clone(),
            "c01" => k1_c01(l),
            "totalizer" => k1::totalizer_code().clone(),
            "diverge" => k1::diverge_code().clone(),
            _ => {
                if let Some(n) = name.strip_prefix('#') {
                    return n.parse::<usize>().ok().and_then(|n| l.numeral(n).ok().cloned());
                }
                return name.parse::<BigUint>().ok();
            }
        })
    }

    pub fn lookup(&self, name: &str) -> Result<BigUint, CliError> {
        if let Some(plan) = name.strip_prefix("plan:") {
            return self.plan(plan);
        }
        self.binds
            .get(name)
            .cloned()
            .or_else(|| self.builtin(name))
            .ok_or_else(|| CliError::usage(format!("unknown K1 constant {name:?}; use a code, #n, a builtin name, or --bind")))
    }

    /// The query machine of a scripted dialogue plan.
    pub fn plan(&self, name: &str) -> Result<BigUint, CliError> {
        let (m, lib) = (self.setting.model, &self.setting.lib);
        let plans = scripted_plans(lib).map_err(|e| CliError::usage(e.to_string()))?;
        let known: Vec<&str> = plans.iter().map(|p| p.0).collect();
        let plan = plans.iter().find(|p| p.0 == name).ok_or_else(|| CliError::usage(format!("unknown plan {name:?}; shipped: {}", known.join(", "))))?;
        query_machine(m, lib, &plan.1).map_err(|e| CliError::usage(e.to_string()))
    }

    /// A code, a name, or a closed term evaluated to its value.
    pub fn element(&self, spec: &str) -> Result<BigUint, CliError> {
        let src = read_spec(spec)?;
        if !src.starts_with('(') {
            return self.lookup(&src);
        }
        let t = resolve(&parse_term(&src)?, |n| self.lookup(n))?;
        let compiled = self.setting.lib.basis.compile(&t).map_err(|e| CliError::usage(e.to_string()))?;
        closed_check(&compiled)?;
        match eval_closed(self.setting.model, &compiled, self.setting.fuel).map_err(|e| CliError::usage(e.to_string()))? {
            EvalOutcome::Defined(v) => Ok(v),
            other => Err(CliError::usage(format!("element spec {src:?} is not defined ({})", other.label()))),
        }
    }

    /// Binds each unknown identifier in `t` to a fresh parameter: a code
    /// past every builtin, distinct per name. Returns the names bound.
    pub fn bind_parameters(&mut self, t: &Term<String>) -> Vec<String> {
        let mut fresh = Vec::new();
        let _ = t.try_map_consts(&mut |name: &String| -> Result<(), ()> {
            let ident = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_');
            if ident && self.lookup(name).is_err() {
                let code = (BigUint::from(1u8) << 64u32) + BigUint::from(self.binds.len());
                self.binds.insert(name.clone(), code);
                fresh.push(name.clone());
            }
            Ok(())
        });
        fresh
    }

    /// Every name, builtin or bound, denoting `v`.
    pub fn names_of(&self, v: &BigUint) -> Vec<String> {
        let mut out: Vec<String> = self.binds.iter().filter(|(_, b)| *b == v).map(|(n, _)| n.clone()).collect();
        for n in ["k", "s", "i", "true", "false", "not", "and", "zero", "c", "d", "h"] {
            if self.builtin(n).as_ref() == Some(v) {
                out.push(n.to_string());
            }
        }
        if let Some(n) = self.setting.lib.numeral_value(v) {
            out.push(format!("#{n}"));
        }
        out
    }
}

/// K2 elements: `alpha-hat`, `beta-hat`, `zeros`, `ones`, `one-at-N`,
/// `const-N`, or JSON.
pub fn k2_element(spec: &str) -> Result<K2Element, CliError> {
    let src = read_spec(spec)?;
    if src.starts_with('{') {
        return serde_json::from_str(&src).map_err(|e| CliError::usage(format!("bad K2 element: {e}")));
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| CliError::usage(format!("bad number in {src:?}")));
    Ok(match src.as_str() {
        "alpha-hat" => K2Element::rule(PrefixRule::AlphaHat),
        "beta-hat" => K2Element::rule(PrefixRule::BetaHat),
        "zeros" => K2Element::zeros(),
        "ones" => K2Element::ones(),
        s => {
            if let Some(p) = s.strip_prefix("one-at-") {
                K2Element::single_one_at(num(p)? as usize)
            } else if let Some(v) = s.strip_prefix("const-") {
                K2Element::constant(num(v)?)
            } else {
                return Err(CliError::usage(format!("unknown K2 element {s:?}")));
            }
        }
    })
}

pub fn read_table(path: &str) -> Result<FiniteTable, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
    src.parse().map_err(|e| CliError::usage(format!("{path}: {e}")))
}

/// Table elements are indices, or `k` and `s`.
pub fn table_element(t: &FiniteTable, name: &str) -> Result<usize, CliError> {
    use pca_core::Combinatory;
    match name {
        "k" => Ok(t.k()),
        "s" => Ok(t.s()),
        n => match n.parse::<usize>() {
            Ok(i) if i < t.n => Ok(i),
            _ => Err(CliError::usage(format!("table element {n:?} is not in 0..{}", t.n))),
        },
    }
}

#[derive(Deserialize)]
struct OracleFile {
    table: Vec<(String, String)>,
    default: String,
}

/// A shipped oracle by name, or `@file` with `{"table": [[a, b], …], "default": d}`.
pub fn oracle(names: &K1Names<'_, '_>, spec: &str) -> Result<OracleFn<BigUint>, CliError> {
    if spec.starts_with('@') {
        let f: OracleFile = serde_json::from_str(&read_spec(spec)?).map_err(|e| CliError::usage(format!("bad oracle file: {e}")))?;
        let table = f.table.iter().map(|(a, b)| Ok((names.element(a)?, names.element(b)?))).collect::<Result<Vec<_>, CliError>>()?;
        return Ok(OracleFn::new(table, names.element(&f.default)?));
    }
    let shipped = table_oracles(&names.setting.lib).map_err(|e| CliError::usage(e.to_string()))?;
    let known: Vec<&str> = shipped.iter().map(|(n, _)| *n).collect();
    shipped
        .into_iter()
        .find(|(n, _)| *n == spec)
        .map(|(_, f)| f)
        .ok_or_else(|| CliError::usage(format!("unknown oracle {spec:?}; shipped: {}", known.join(", "))))
}

/// Symbolic `k`/`s` basis for printing compiled terms.
pub fn symbolic_basis() -> Basis<String> {
    Basis { k: "k".to_string(), s: "s".to_string() }
}
