//! Upper bounds on operator growth between two nodes of a factor graph.

pub mod closed_form;
pub mod matrices;
pub mod paths;

use thiserror::Error;

use crate::curve::BoundCurve;
use crate::graph::{GraphError, NodeId, WeightedFactorGraph};
use crate::scalar::Real;

pub use closed_form::{bessel_i, ClosedForm};
pub use matrices::{
    corollary6_bound, corollary6_bound_with, corollary6_matrix, golden_section_min, lr_bound, lr_bound_at,
    prop1_convert, tfm_sum_bound, velocities, Alpha, ExpMethod, HMatrices, Interval, Prop1Direction,
};
pub use paths::{
    enumerate_irreducible_paths, theorem3_bound, IrreduciblePath, PathEnumeration, PathPolynomial,
    EXHAUSTIVE_FACTOR_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has {0} factors; give an explicit path-length cap")]
    NeedsLengthLimit(usize),
    #[error("graph is not regular")]
    NotRegular,
    #[error("factor weight {weight} exceeds the admissible {cap}")]
    WeightTooLarge { weight: f64, cap: f64 },
    #[error("local dimension {0} is below 2")]
    BadDimension(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Which of the graph bounds to tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Thm3,
    Cor6,
    Lr,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundKind::Thm3 => "thm3",
            BoundKind::Cor6 => "cor6",
            BoundKind::Lr => "lr",
        }
    }
}

/// Options shared by [`bound_curves`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveOptions<T> {
    /// Cap on path length for the path sum; `None` means exhaustive.
    pub max_path_len: Option<usize>,
    pub alpha: Alpha<T>,
}

impl<T: Real> Default for CurveOptions<T> {
    fn default() -> Self {
        Self { max_path_len: None, alpha: Alpha::Fixed(T::lit(std::f64::consts::E)) }
    }
}

/// Tabulates the requested bounds for the pair `(i, j)` on `times`.
pub fn bound_curves<T: Real>(
    wg: &WeightedFactorGraph<T>,
    i: NodeId,
    j: NodeId,
    times: &[T],
    kinds: &[BoundKind],
    opts: CurveOptions<T>,
) -> Result<Vec<BoundCurve<T>>, BoundError> {
    let n = wg.graph().num_nodes();
    if i >= n || j >= n {
        return Err(BoundError::InvalidParams(format!("nodes {i}, {j} out of range for N={n}")));
    }
    let needs_h = kinds.iter().any(|k| matches!(k, BoundKind::Cor6 | BoundKind::Lr));
    let hm = needs_h.then(|| HMatrices::new(wg));
    let mut out = Vec::new();
    for &kind in kinds {
        let curve = match kind {
            BoundKind::Thm3 => {
                let poly = PathPolynomial::new(wg, i, j, opts.max_path_len)?;
                let mut c = BoundCurve::from_fn(kind.label(), times, |t| poly.eval(t));
                c.truncated = poly.truncated;
                c.with_meta("max_path_len", poly.coeffs.len() - 1)
            }
            BoundKind::Cor6 => {
                let hm = hm.as_ref().expect("built above");
                BoundCurve::from_fn(kind.label(), times, |t| corollary6_bound(hm, i, j, t))
            }
            BoundKind::Lr => {
                let hm = hm.as_ref().expect("built above");
                let d = wg.graph().node_distance(i, j)?;
                let mut values = Vec::with_capacity(times.len());
                for &t in times {
                    values.push(lr_bound(hm, d, t, opts.alpha)?.0);
                }
                let alpha_desc = match opts.alpha {
                    Alpha::Fixed(a) => a.to_string(),
                    Alpha::Optimize => "optimize".to_string(),
                };
                BoundCurve::new(kind.label(), times.to_vec(), values).with_meta("alpha", alpha_desc)
            }
        };
        out.push(curve);
    }
    Ok(out)
}
