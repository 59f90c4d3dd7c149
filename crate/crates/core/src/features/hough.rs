//! Standard (rho, theta) Hough transform over binary foreground pixels.
//!
//! Line parametrization: `rho = col*cos(theta) - row*sin(theta)` with theta in
//! [0, 180) degrees — the usual normal form with the y axis pointing up, so a
//! horizontal image line at row r has (rho, theta) = (-r, 90) and a vertical
//! line at column c has (c, 0). `orientation_deg` is the direction of the line
//! itself, `(theta + 90) mod 180`: 0 for horizontal, 90 for vertical.

use serde::{Deserialize, Serialize};

use crate::raster::BinaryImage;

/// A detected straight line in normal form plus its accumulator strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    /// Signed distance of the line from the origin along its normal, pixels.
    pub rho: f64,
    /// Normal angle in degrees, [0, 180).
    pub theta_deg: f64,
    /// Foreground pixels voting for this accumulator cell.
    pub votes: u32,
    /// Direction of the line in degrees, [0, 180).
    pub orientation_deg: f64,
}

impl LineSegment {
    /// Row of the line at a given column; `None` when the line is vertical.
    pub fn row_at(&self, col: f64) -> Option<f64> {
        let th = self.theta_deg.to_radians();
        let s = th.sin();
        (s.abs() > 1e-9).then(|| (col * th.cos() - self.rho) / s)
    }

    /// Column of the line at a given row; `None` when the line is horizontal.
    pub fn col_at(&self, row: f64) -> Option<f64> {
        let th = self.theta_deg.to_radians();
        let c = th.cos();
        (c.abs() > 1e-9).then(|| (self.rho + row * th.sin()) / c)
    }

    /// Perpendicular distance from a pixel to the line.
    pub fn distance_to(&self, row: usize, col: usize) -> f64 {
        let th = self.theta_deg.to_radians();
        (col as f64 * th.cos() - row as f64 * th.sin() - self.rho).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HoughParams {
    /// Theta quantization step in degrees; must divide 180.
    pub theta_step_deg: f64,
    /// Rho quantization step in pixels.
    pub rho_step: f64,
    /// Maximum number of lines returned.
    pub top_k: usize,
    /// Minimum accumulator votes for a line to count.
    pub min_votes: u32,
}

impl Default for HoughParams {
    fn default() -> Self {
        Self {
            theta_step_deg: 1.0,
            rho_step: 1.0,
            top_k: 8,
            min_votes: 30,
        }
    }
}

/// Accumulates foreground pixels into (rho, theta) space and returns up to
/// `top_k` local maxima with at least `min_votes` votes, strongest first;
/// ties break toward smaller theta, then smaller rho. Near-duplicate cells
/// are pruned by 3x3 non-maximum suppression in accumulator space.
pub fn hough_lines(img: &BinaryImage, params: &HoughParams) -> Vec<LineSegment> {
    let n_theta_f = 180.0 / params.theta_step_deg;
    assert!(
        (n_theta_f - n_theta_f.round()).abs() < 1e-9 && n_theta_f >= 1.0,
        "theta step must divide 180"
    );
    assert!(params.min_votes >= 1, "min_votes must be >= 1");
    let n_theta = n_theta_f.round() as usize;
    let diag = img.diagonal().ceil();
    let n_rho = (2.0 * diag / params.rho_step).floor() as usize + 1;

    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|t| {
            let th = (t as f64 * params.theta_step_deg).to_radians();
            (th.cos(), th.sin())
        })
        .collect();

    let mut acc = vec![0u32; n_theta * n_rho];
    for (row, col) in img.foreground() {
        for (t, &(cos_t, sin_t)) in trig.iter().enumerate() {
            let rho = col as f64 * cos_t - row as f64 * sin_t;
            let ri = ((rho + diag) / params.rho_step).round() as usize;
            acc[t * n_rho + ri.min(n_rho - 1)] += 1;
        }
    }

    // Candidate cells: votes above threshold and >= all 8 accumulator
    // neighbours.
    let at = |t: isize, r: isize| -> u32 {
        if t < 0 || r < 0 || t >= n_theta as isize || r >= n_rho as isize {
            0
        } else {
            acc[t as usize * n_rho + r as usize]
        }
    };
    let mut candidates: Vec<(u32, usize, usize)> = Vec::new();
    for t in 0..n_theta {
        for r in 0..n_rho {
            let v = acc[t * n_rho + r];
            if v < params.min_votes {
                continue;
            }
            let mut is_max = true;
            for dt in -1isize..=1 {
                for dr in -1isize..=1 {
                    if (dt, dr) != (0, 0) && at(t as isize + dt, r as isize + dr) > v {
                        is_max = false;
                    }
                }
            }
            if is_max {
                candidates.push((v, t, r));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut accepted: Vec<(u32, usize, usize)> = Vec::new();
    for cand in candidates {
        if accepted.len() == params.top_k {
            break;
        }
        let close = accepted.iter().any(|&(_, t, r)| {
            (t as isize - cand.1 as isize).abs() <= 1 && (r as isize - cand.2 as isize).abs() <= 1
        });
        if !close {
            accepted.push(cand);
        }
    }

    accepted
        .into_iter()
        .map(|(votes, t, r)| {
            let theta_deg = t as f64 * params.theta_step_deg;
            LineSegment {
                rho: r as f64 * params.rho_step - diag,
                theta_deg,
                votes,
                orientation_deg: (theta_deg + 90.0) % 180.0,
            }
        })
        .collect()
}
