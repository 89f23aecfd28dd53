use crate::error::{domain, Error, Result};

/// Time mesh `0 = t_0 < t_1 < … < t_N = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    grading: Option<f64>,
}

/// Graded mesh `t_j = b·(j/N)^r`; `r = 1` is uniform.
pub fn graded_mesh(n: usize, r: f64, b: f64) -> Result<Mesh> {
    if n < 2 {
        return Err(domain("N", n as f64, "mesh needs N >= 2 panels"));
    }
    if !r.is_finite() || r < 1.0 {
        return Err(domain("r", r, "grading exponent must be >= 1"));
    }
    if !b.is_finite() || b <= 0.0 {
        return Err(domain("b", b, "horizon must be finite and > 0"));
    }
    let nf = n as f64;
    let mut nodes: Vec<f64> = (0..=n)
        .map(|j| {
            let x = j as f64 / nf;
            if r == 1.0 {
                b * x
            } else {
                b * x.powf(r)
            }
        })
        .collect();
    nodes[n] = b;
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("r", r, "grading collapses the first panels to zero width"));
    }
    Ok(Mesh {
        nodes,
        grading: Some(r),
    })
}

impl Mesh {
    /// Mesh from explicit nodes; must start at 0 and increase strictly.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(domain("N", nodes.len() as f64 - 1.0, "mesh needs N >= 2 panels"));
        }
        if nodes[0] != 0.0 {
            return Err(domain("t_0", nodes[0], "mesh must start at 0"));
        }
        if nodes.iter().any(|t| !t.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MeshMismatch("nodes must be finite and strictly increasing".into()));
        }
        Ok(Self {
            nodes,
            grading: None,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Number of panels `N`.
    pub fn panels(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn grading(&self) -> Option<f64> {
        self.grading
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn max_width(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index of the panel `[t_j, t_{j+1}]` containing `t` (clamped to the mesh).
    pub(crate) fn panel_of(&self, t: f64) -> usize {
        let j = self.nodes.partition_point(|&x| x <= t);
        j.clamp(1, self.nodes.len() - 1) - 1
    }

    /// First node index `i` with `t_i >= t`.
    pub fn first_index_at_or_after(&self, t: f64) -> usize {
        self.nodes.partition_point(|&x| x < t)
    }
}
