//! Batch evaluation over many instances, in parallel or sequentially.

use rand::Rng;

use crate::error::Result;
use crate::flow::{decorate_from_flow, rw_spirality, FlowManifest, LoopItinerary, SideConvention};
use crate::generate::{random_flow_instance, rng_from_seed, FlowShape};
use crate::graph::{cycle_spirality, verdict, DecoratedJSJGraph, Verdict};
pub use crate::par::Exec;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCase {
    pub manifest: FlowManifest,
    pub alpha: LoopItinerary,
}

/// `count` random flow instances; case `i` depends only on `(seed, i)`.
pub fn random_flow_cases(count: usize, seed: u64, shape: FlowShape, exec: Exec) -> Vec<FlowCase> {
    exec.map_range(count, |i| {
        let mut rng = rng_from_seed(seed);
        rng.set_stream(i as u64);
        let shape = FlowShape {
            pieces: rng.gen_range(1..=shape.pieces.max(1)),
            ..shape
        };
        let (manifest, alpha) = random_flow_instance(&mut rng, shape);
        FlowCase { manifest, alpha }
    })
}

/// Both sides of the bridge identity for one instance: the flow formula and
/// the holonomy of the decorated graph it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bridge {
    pub rw: Rational,
    pub holonomy: Rational,
}

impl Bridge {
    pub fn agrees(&self) -> bool {
        self.rw == self.holonomy
    }
}

pub fn bridge(case: &FlowCase, conv: SideConvention) -> Result<Bridge> {
    let rw = rw_spirality(&case.alpha, &case.manifest, conv)?;
    let (g, cycle) = decorate_from_flow(&case.alpha, &case.manifest, conv)?;
    let holonomy = cycle_spirality(&g, &cycle)?;
    Ok(Bridge { rw, holonomy })
}

pub fn bridge_all(cases: &[FlowCase], conv: SideConvention, exec: Exec) -> Vec<Result<Bridge>> {
    exec.map(cases, |c| bridge(c, conv))
}

pub fn rw_all(cases: &[FlowCase], conv: SideConvention, exec: Exec) -> Vec<Result<Rational>> {
    exec.map(cases, |c| rw_spirality(&c.alpha, &c.manifest, conv))
}

pub fn verdict_all(graphs: &[DecoratedJSJGraph], exec: Exec) -> Vec<Result<Verdict>> {
    exec.map(graphs, verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_do_not_depend_on_execution() {
        let shape = FlowShape::default();
        let a = random_flow_cases(40, 9, shape, Exec::Sequential);
        let b = random_flow_cases(40, 9, shape, Exec::Parallel);
        assert_eq!(a, b);
        assert_eq!(
            &random_flow_cases(10, 9, shape, Exec::Sequential)[..],
            &a[..10]
        );
        assert_ne!(random_flow_cases(5, 10, shape, Exec::Sequential), a[..5]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cases = random_flow_cases(60, 1, FlowShape::default(), Exec::Sequential);
        let s = bridge_all(&cases, SideConvention::Leaving, Exec::Sequential);
        let p = bridge_all(&cases, SideConvention::Leaving, Exec::Parallel);
        assert_eq!(s, p);
        assert!(s.iter().all(|b| b.as_ref().unwrap().agrees()));
    }
}
