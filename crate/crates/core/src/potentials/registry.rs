use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{benchmarks, NamedPotential, Potential};
use crate::error::{Error, Result};

/// Optional knobs for parameterised targets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetParams {
    /// Variance of the `gaussian` target (default 1).
    pub variance: Option<f64>,
}

pub type PotentialFactory = fn(&TargetParams) -> Result<NamedPotential>;

/// Name-keyed table of potential constructors.
#[derive(Debug, Clone, Default)]
pub struct PotentialRegistry {
    factories: BTreeMap<String, PotentialFactory>,
}

impl PotentialRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding every built-in benchmark.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("double_well", |_| Ok(benchmarks::double_well()));
        reg.register("super_flat", |_| Ok(benchmarks::super_flat()));
        reg.register("discontinuous", |_| Ok(benchmarks::discontinuous()));
        reg.register("octic", |_| Ok(benchmarks::octic()));
        reg.register("stiff_2d", |_| Ok(benchmarks::stiff_2d()));
        reg.register("gaussian", |p| benchmarks::gaussian(p.variance.unwrap_or(1.0)));
        reg
    }

    /// Adds or replaces a factory.
    pub fn register(&mut self, name: &str, factory: PotentialFactory) {
        self.factories.insert(name.to_owned(), factory);
    }

    pub fn names(&self) -> Vec<String> {
        self.factories.keys().cloned().collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, name: &str, params: &TargetParams) -> Result<Arc<dyn Potential>> {
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownTarget {
            name: name.to_owned(),
            known: self.names(),
        })?;
        Ok(Arc::new(factory(params)?))
    }
}
