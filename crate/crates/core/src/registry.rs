//! Named, swappable strategies: the order in which violators are removed by
//! the stratification algorithm, and the kernels that turn vertex data into
//! a value on every simplex.

use crate::complex::{Complex, ScalarField, SimplexId};
use crate::error::{Error, Result};
use crate::pointdata::{maxf_extension, mean_extension, VertexField};

/// Orders the initial violator list before the removal loop.
pub trait RemovalOrder: Send + Sync {
    fn name(&self) -> &str;
    fn sort(&self, k: &Complex, f: &ScalarField, violators: &mut [SimplexId]);
}

/// Increasing dimension, then increasing value, then id.
#[derive(Debug, Clone, Copy, Default)]
pub struct DimValue;

impl RemovalOrder for DimValue {
    fn name(&self) -> &str {
        "dim-value"
    }

    fn sort(&self, k: &Complex, f: &ScalarField, violators: &mut [SimplexId]) {
        violators.sort_by(|&a, &b| {
            k.dim_of(a)
                .cmp(&k.dim_of(b))
                .then(f.value(a).total_cmp(&f.value(b)))
                .then(a.cmp(&b))
        });
    }
}

/// Increasing dimension, then decreasing value, then id.
#[derive(Debug, Clone, Copy, Default)]
pub struct DimValueDesc;

impl RemovalOrder for DimValueDesc {
    fn name(&self) -> &str {
        "dim-value-desc"
    }

    fn sort(&self, k: &Complex, f: &ScalarField, violators: &mut [SimplexId]) {
        violators.sort_by(|&a, &b| {
            k.dim_of(a)
                .cmp(&k.dim_of(b))
                .then(f.value(b).total_cmp(&f.value(a)))
                .then(a.cmp(&b))
        });
    }
}

/// Listed simplices first, in the given order; the rest by [`DimValue`].
#[derive(Debug, Clone, Default)]
pub struct Explicit {
    pub priority: Vec<SimplexId>,
}

impl Explicit {
    pub fn new(priority: Vec<SimplexId>) -> Self {
        Self { priority }
    }
}

impl RemovalOrder for Explicit {
    fn name(&self) -> &str {
        "explicit"
    }

    fn sort(&self, k: &Complex, f: &ScalarField, violators: &mut [SimplexId]) {
        DimValue.sort(k, f, violators);
        let rank = |s: SimplexId| {
            self.priority
                .iter()
                .position(|&p| p == s)
                .unwrap_or(self.priority.len())
        };
        // stable, so unlisted violators keep the fallback order
        violators.sort_by_key(|&s| rank(s));
    }
}

/// Turns vertex data into a scalar field on all simplices.
pub trait PreExtension: Send + Sync {
    fn name(&self) -> &str;
    fn extend(&self, k: &Complex, f0: &VertexField) -> Result<ScalarField>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MaxKernel;

impl PreExtension for MaxKernel {
    fn name(&self) -> &str {
        "maxf"
    }

    fn extend(&self, k: &Complex, f0: &VertexField) -> Result<ScalarField> {
        maxf_extension(k, f0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeanKernel;

impl PreExtension for MeanKernel {
    fn name(&self) -> &str {
        "mean"
    }

    fn extend(&self, k: &Complex, f0: &VertexField) -> Result<ScalarField> {
        mean_extension(k, f0)
    }
}

/// Strategies available by name.
pub struct Registry {
    removal: Vec<Box<dyn RemovalOrder>>,
    pre: Vec<Box<dyn PreExtension>>,
}

impl Default for Registry {
    fn default() -> Self {
        Self {
            removal: vec![Box::new(DimValue), Box::new(DimValueDesc), Box::new(Explicit::default())],
            pre: vec![Box::new(MaxKernel), Box::new(MeanKernel)],
        }
    }
}

fn unknown(name: &str, names: Vec<&str>) -> Error {
    Error::UnknownStrategy {
        name: name.to_string(),
        available: names.join(", "),
    }
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a removal order, replacing one of the same name.
    pub fn register_removal_order(&mut self, order: Box<dyn RemovalOrder>) {
        self.removal.retain(|o| o.name() != order.name());
        self.removal.push(order);
    }

    pub fn register_pre_extension(&mut self, kernel: Box<dyn PreExtension>) {
        self.pre.retain(|o| o.name() != kernel.name());
        self.pre.push(kernel);
    }

    pub fn removal_order(&self, name: &str) -> Result<&dyn RemovalOrder> {
        self.removal
            .iter()
            .find(|o| o.name() == name)
            .map(|o| o.as_ref())
            .ok_or_else(|| unknown(name, self.removal_order_names()))
    }

    pub fn pre_extension(&self, name: &str) -> Result<&dyn PreExtension> {
        self.pre
            .iter()
            .find(|o| o.name() == name)
            .map(|o| o.as_ref())
            .ok_or_else(|| unknown(name, self.pre_extension_names()))
    }

    pub fn removal_order_names(&self) -> Vec<&str> {
        self.removal.iter().map(|o| o.name()).collect()
    }

    pub fn pre_extension_names(&self) -> Vec<&str> {
        self.pre.iter().map(|o| o.name()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    #[test]
    fn lookup_and_unknown_names() {
        let r = Registry::new();
        assert_eq!(r.removal_order("dim-value").unwrap().name(), "dim-value");
        assert_eq!(r.pre_extension("mean").unwrap().name(), "mean");
        match r.removal_order("random") {
            Err(Error::UnknownStrategy { available, .. }) => assert!(available.contains("explicit")),
            _ => panic!("expected UnknownStrategy"),
        }
    }

    #[test]
    fn orders_differ_on_ties_of_dimension() {
        let (k, f) = build_complex([(vec![1], 2.0), (vec![2], 1.0), (vec![1, 2], 0.0)]).unwrap();
        let mut v = vec![2, 0, 1];
        DimValue.sort(&k, &f, &mut v);
        assert_eq!(v, vec![1, 0, 2]);
        DimValueDesc.sort(&k, &f, &mut v);
        assert_eq!(v, vec![0, 1, 2]);
        Explicit::new(vec![2, 0]).sort(&k, &f, &mut v);
        assert_eq!(v, vec![2, 0, 1]);
    }

    #[test]
    fn registering_replaces_by_name() {
        let mut r = Registry::new();
        r.register_removal_order(Box::new(Explicit::new(vec![3])));
        assert_eq!(r.removal_order_names().iter().filter(|n| **n == "explicit").count(), 1);
    }
}
