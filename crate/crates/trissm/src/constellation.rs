//! Unit-mean-energy symbol constellations with Gray bit labels.
//!
//! A constellation maps every `bits()`-bit label to a complex point. Labels are
//! Gray-coded so that nearest-neighbour points differ in a single bit: PSK uses
//! a cyclic Gray code around the circle, QAM an independent Gray code per axis.
//! Point sets are closed under complex conjugation bit for bit, which keeps
//! geometrically symmetric decision problems exactly symmetric in floating
//! point as well.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::config::{log2_exact, ModKind, SystemConfig};
use crate::error::{Error, Result};

/// Gray code of an index.
fn gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

/// A symbol constellation: `order` points indexed by Gray label.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ModKind,
    order: usize,
    points: Vec<Complex64>,
}

impl Constellation {
    /// Build a constellation of the given family and order.
    pub fn new(kind: ModKind, order: usize) -> Result<Self> {
        if !kind.supports_order(order) {
            return Err(Error::UnsupportedOrder {
                order,
                family: match kind {
                    ModKind::Psk => "psk",
                    ModKind::Qam => "qam",
                },
            });
        }
        let points = match (kind, order) {
            (_, 1) => vec![Complex64::new(1.0, 0.0)],
            (ModKind::Psk, m) => psk_points(m),
            (ModKind::Qam, m) => qam_points(m),
        };
        Ok(Constellation { kind, order, points })
    }

    /// Phase-shift keying of the given order.
    pub fn psk(order: usize) -> Result<Self> {
        Self::new(ModKind::Psk, order)
    }

    /// Quadrature amplitude modulation of the given order.
    pub fn qam(order: usize) -> Result<Self> {
        Self::new(ModKind::Qam, order)
    }

    /// The order-1 constellation: a single unit point carrying no bits. Used
    /// when all information rides on the spatial (column) index.
    pub fn unmodulated() -> Self {
        Constellation {
            kind: ModKind::Psk,
            order: 1,
            points: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// The constellation a [`SystemConfig`] asks for.
    pub fn for_config(cfg: &SystemConfig) -> Result<Self> {
        Self::new(cfg.mod_kind, cfg.mod_order)
    }

    /// Constellation family.
    pub fn kind(&self) -> ModKind {
        self.kind
    }

    /// Number of points.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Bits per symbol.
    pub fn bits(&self) -> u32 {
        log2_exact(self.order).expect("order is a power of two")
    }

    /// The point carrying a given label.
    pub fn point(&self, label: u32) -> Complex64 {
        self.points[label as usize]
    }

    /// All points, indexed by label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Smallest squared Euclidean distance between distinct points, if the
    /// constellation has more than one point.
    pub fn min_distance_sq(&self) -> Option<f64> {
        if self.order < 2 {
            return None;
        }
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm_sqr());
            }
        }
        Some(best)
    }
}

/// PSK points indexed by Gray label. The circle starts at angle 0, except the
/// 4-point set which uses the diagonal orientation `{(±1±j)/√2}`. The upper
/// half is computed trigonometrically and the lower half mirrored by exact
/// conjugation.
fn psk_points(order: usize) -> Vec<Complex64> {
    let mut by_position = vec![Complex64::default(); order];
    match order {
        2 => {
            by_position[0] = Complex64::new(1.0, 0.0);
            by_position[1] = Complex64::new(-1.0, 0.0);
        }
        4 => {
            let a = FRAC_1_SQRT_2;
            by_position[0] = Complex64::new(a, a);
            by_position[1] = Complex64::new(-a, a);
            by_position[2] = Complex64::new(-a, -a);
            by_position[3] = Complex64::new(a, -a);
        }
        m => {
            for (k, slot) in by_position.iter_mut().enumerate().take(m / 2 + 1) {
                let (sin, cos) = (2.0 * PI * k as f64 / m as f64).sin_cos();
                *slot = Complex64::new(cos, sin);
            }
            // Pin the real-axis point so conjugation closure is exact
            // (sin(pi) rounds to 1.2e-16, not 0).
            by_position[m / 2] = Complex64::new(-1.0, 0.0);
            for k in m / 2 + 1..m {
                by_position[k] = by_position[m - k].conj();
            }
        }
    }
    let mut points = vec![Complex64::default(); order];
    for (k, p) in by_position.into_iter().enumerate() {
        points[gray(k as u32) as usize] = p;
    }
    points
}

/// Grid QAM points indexed by Gray label, scaled to unit mean energy. Square
/// orders split bits evenly between the axes; order 8 uses a 4x2 grid. The
/// label is the in-phase axis Gray code above the quadrature axis Gray code.
fn qam_points(order: usize) -> Vec<Complex64> {
    let bits = log2_exact(order).expect("order is a power of two");
    let i_bits = bits.div_ceil(2);
    let q_bits = bits / 2;
    let (ni, nq) = (1usize << i_bits, 1usize << q_bits);
    let axis_level = |idx: usize, n: usize| (2 * idx) as f64 - (n - 1) as f64;
    let axis_energy = |n: usize| {
        (0..n).map(|i| axis_level(i, n).powi(2)).sum::<f64>() / n as f64
    };
    let norm = (axis_energy(ni) + axis_energy(nq)).sqrt();
    let mut points = vec![Complex64::default(); order];
    for i in 0..ni {
        for q in 0..nq {
            let label = (gray(i as u32) << q_bits) | gray(q as u32);
            points[label as usize] =
                Complex64::new(axis_level(i, ni) / norm, axis_level(q, nq) / norm);
        }
    }
    points
}
