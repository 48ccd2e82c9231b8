use std::cell::RefCell;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use pca_core::{Combinatory, Fuel, Model, Step};

use crate::CliError;

/// JSON-lines sink for `--trace`; a no-op when no path was given.
pub struct Tracer {
    sink: Option<(String, BufWriter<File>)>,
    buffered: RefCell<Vec<String>>,
}

impl Tracer {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let sink = match path {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::Io { path: p.display().to_string(), source: e })?;
                Some((p.display().to_string(), BufWriter::new(f)))
            }
            None => None,
        };
        Ok(Tracer { sink, buffered: RefCell::new(Vec::new()) })
    }

    pub fn enabled(&self) -> bool {
        self.sink.is_some()
    }

    pub fn event(&self, e: &impl Serialize) {
        if self.enabled() {
            self.buffered.borrow_mut().push(serde_json::to_string(e).expect("events serialize"));
        }
    }

    pub fn finish(&mut self) -> Result<(), CliError> {
        if let Some((path, w)) = &mut self.sink {
            let io = |e| CliError::Io { path: path.clone(), source: e };
            for line in self.buffered.borrow_mut().drain(..) {
                writeln!(w, "{line}").map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
        Ok(())
    }
}

/// Logs every top-level application of the wrapped model.
pub struct Traced<'t, M> {
    pub inner: M,
    pub tracer: &'t Tracer,
}

impl<M: Model> Model for Traced<'_, M> {
    type Elem = M::Elem;

    fn apply(&self, f: &M::Elem, a: &M::Elem, fuel: &mut Fuel) -> Step<M::Elem> {
        let before = fuel.spent();
        let r = self.inner.apply(f, a, fuel);
        if self.tracer.enabled() {
            let (outcome, value) = match &r {
                Ok(v) => ("defined", Some(self.inner.render(v))),
                Err(pca_core::Halt::Divergent) => ("proven-divergent", None),
                Err(pca_core::Halt::Exhausted) => ("fuel-exhausted", None),
            };
            self.tracer.event(&json!({
                "event": "apply",
                "function": self.inner.render(f),
                "argument": self.inner.render(a),
                "outcome": outcome,
                "value": value,
                "fuel": fuel.spent() - before,
            }));
        }
        r
    }

    fn render(&self, e: &M::Elem) -> String {
        self.inner.render(e)
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}

impl<M: Combinatory> Combinatory for Traced<'_, M> {
    fn k(&self) -> M::Elem {
        self.inner.k()
    }

    fn s(&self) -> M::Elem {
        self.inner.s()
    }
}
