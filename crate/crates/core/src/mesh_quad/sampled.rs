use super::Mesh;
use crate::error::{domain, Error, Result};

/// Interpolation between mesh nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    PiecewiseLinear,
    PiecewiseConstantLeft,
}

/// Behavior of a sampled function on the first panel `[0, t_1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// `values[0]` is defined and the first panel follows `interp`.
    Regular,
    /// `values[0]` is undefined (stored as NaN); on `(0, t_1]` the function is
    /// modelled as `values[1]·(t/t_1)^{-exponent}`.
    PowerLaw { exponent: f64 },
}

impl Origin {
    pub fn exponent(self) -> f64 {
        match self {
            Origin::Regular => 0.0,
            Origin::PowerLaw { exponent } => exponent,
        }
    }

    pub fn is_regular(self) -> bool {
        matches!(self, Origin::Regular)
    }
}

/// Values of a function at the nodes of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    mesh: Mesh,
    values: Vec<f64>,
    interp: Interp,
    origin: Origin,
}

impl SampledFunction {
    pub fn new(mesh: &Mesh, mut values: Vec<f64>, interp: Interp, origin: Origin) -> Result<Self> {
        if values.len() != mesh.nodes().len() {
            return Err(Error::MeshMismatch(format!(
                "{} values for a mesh with {} nodes",
                values.len(),
                mesh.nodes().len()
            )));
        }
        match origin {
            Origin::Regular => {}
            Origin::PowerLaw { exponent } => {
                if !(0.0..1.0).contains(&exponent) {
                    return Err(domain("exponent", exponent, "origin exponent must lie in [0, 1)"));
                }
                values[0] = f64::NAN;
            }
        }
        let first = if origin.is_regular() { 0 } else { 1 };
        if let Some(i) = (first..values.len()).find(|&i| !values[i].is_finite()) {
            return Err(Error::UndefinedSample(i));
        }
        Ok(Self {
            mesh: mesh.clone(),
            values,
            interp,
            origin,
        })
    }

    /// Samples `f` at every node, or at nodes `1..=N` for a power-law origin.
    pub fn from_fn(mesh: &Mesh, origin: Origin, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = mesh
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &t)| if i == 0 && !origin.is_regular() { f64::NAN } else { f(t) })
            .collect();
        Self::new(mesh, values, Interp::PiecewiseLinear, origin)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn is_defined(&self, i: usize) -> bool {
        i > 0 || self.origin.is_regular()
    }

    pub(crate) fn with_origin(mut self, origin: Origin, value0: f64) -> Self {
        self.origin = origin;
        self.values[0] = if origin.is_regular() { value0 } else { f64::NAN };
        self
    }

    /// Evaluates the interpolant at `t ∈ (0, b]` (or `[0, b]` for a regular
    /// origin). Values outside the mesh are clamped to the end panels.
    pub fn eval_at(&self, t: f64) -> f64 {
        let nodes = self.mesh.nodes();
        let t1 = nodes[1];
        if t <= t1 {
            if let Origin::PowerLaw { exponent } = self.origin {
                return if exponent == 0.0 {
                    self.values[1]
                } else {
                    self.values[1] * (t / t1).powf(-exponent)
                };
            }
        }
        let j = self.mesh.panel_of(t);
        match self.interp {
            Interp::PiecewiseConstantLeft => {
                if j == 0 && !self.origin.is_regular() {
                    self.values[1]
                } else {
                    self.values[j]
                }
            }
            Interp::PiecewiseLinear => {
                let (a, b) = (nodes[j], nodes[j + 1]);
                let w = (t - a) / (b - a);
                self.values[j] + w * (self.values[j + 1] - self.values[j])
            }
        }
    }

    /// Largest absolute value over defined nodes with index `>= from`.
    pub fn max_abs_from(&self, from: usize) -> f64 {
        let start = from.max(if self.origin.is_regular() { 0 } else { 1 });
        self.values[start..].iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_quad::graded_mesh;

    #[test]
    fn length_and_definedness() {
        let m = graded_mesh(4, 1.0, 1.0).unwrap();
        assert!(SampledFunction::new(&m, vec![0.0; 4], Interp::PiecewiseLinear, Origin::Regular).is_err());
        let bad = vec![0.0, 1.0, f64::NAN, 1.0, 1.0];
        assert_eq!(
            SampledFunction::new(&m, bad, Interp::PiecewiseLinear, Origin::Regular),
            Err(Error::UndefinedSample(2))
        );
        let ok = vec![f64::INFINITY, 1.0, 2.0, 3.0, 4.0];
        let f = SampledFunction::new(&m, ok, Interp::PiecewiseLinear, Origin::PowerLaw { exponent: 0.5 }).unwrap();
        assert!(f.value(0).is_nan());
        assert!(!f.is_defined(0));
    }

    #[test]
    fn interpolation_conventions() {
        let m = graded_mesh(4, 1.0, 1.0).unwrap();
        let f = SampledFunction::from_fn(&m, Origin::Regular, |t| 2.0 * t + 1.0).unwrap();
        assert!((f.eval_at(0.3) - 1.6).abs() < 1e-15);
        let g = SampledFunction::from_fn(&m, Origin::PowerLaw { exponent: 0.5 }, |t| t.powf(-0.5)).unwrap();
        assert!((g.eval_at(0.01) - 10.0).abs() < 1e-12);
        let mut c = SampledFunction::from_fn(&m, Origin::Regular, |t| t).unwrap();
        c.interp = Interp::PiecewiseConstantLeft;
        assert_eq!(c.eval_at(0.3), 0.25);
    }
}
