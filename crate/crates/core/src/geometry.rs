//! Atom positions to couplings: resonant dipole exchange `C₃/R³`, standing-wave
//! Gaussian cavity couplings, and the repeated-root test for three atoms.
//!
//! Lengths are in units of the beam waist; `C₃` and `g₀` in units of the
//! reference coupling.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::MAX_ATOMS;
use crate::model::SystemParams;

/// Closest allowed approach of two atoms.
pub const MIN_SEPARATION: f64 = 1e-9;
pub const DISCRIMINANT_TOL: f64 = 1e-10;
pub const EQUAL_MAGNITUDE_TOL: f64 = 1e-8;

/// Which cavity mode profile to evaluate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConvention {
    /// `g₀ cos(kz) exp(-(x²+y²)/w₀²) w₀/w(z)` with `w(z) = w₀ √(1 + z/z_R)`.
    #[default]
    Linear,
    /// `g₀ cos(kz) exp(-(x²+y²)/w(z)²) w₀/w(z)` with `w(z) = w₀ √(1 + (z/z_R)²)`.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomGeometry {
    pub positions: Vec<[f64; 3]>,
    #[serde(rename = "C3", alias = "c3")]
    pub c3: f64,
    pub g0: f64,
    pub w0: f64,
    #[serde(rename = "lambda")]
    pub wavelength: f64,
    #[serde(default)]
    pub convention: ModeConvention,
}

impl AtomGeometry {
    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    /// Rayleigh length `π w₀² / λ`.
    pub fn z_r(&self) -> f64 {
        PI * self.w0 * self.w0 / self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.positions.is_empty() || self.positions.len() > MAX_ATOMS {
            return bad(format!(
                "need between 1 and {MAX_ATOMS} atoms, got {}",
                self.positions.len()
            ));
        }
        if self.positions.iter().flatten().any(|x| !x.is_finite()) {
            return bad("positions must be finite".into());
        }
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return bad(format!("w0 must be positive, got {}", self.w0));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.wavelength));
        }
        if !self.c3.is_finite() || !self.g0.is_finite() {
            return bad("C3 and g0 must be finite".into());
        }
        Ok(())
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `V_jk = C₃ / R_jk³`, zero on the diagonal.
#[allow(clippy::needless_range_loop)]
pub fn dipole_matrix(geo: &AtomGeometry) -> Result<Vec<Vec<f64>>> {
    geo.validate()?;
    let n = geo.n_atoms();
    let mut v = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in j + 1..n {
            let r = distance(&geo.positions[j], &geo.positions[k]);
            if r < MIN_SEPARATION {
                return Err(Error::CoincidentAtoms {
                    first: j,
                    second: k,
                    distance: r,
                });
            }
            let x = geo.c3 / (r * r * r);
            v[j][k] = x;
            v[k][j] = x;
        }
    }
    Ok(v)
}

/// Cavity coupling of atom `j` (zero-based).
pub fn cavity_coupling(geo: &AtomGeometry, j: usize) -> Result<f64> {
    geo.validate()?;
    let [x, y, z] = *geo.positions.get(j).ok_or_else(|| {
        Error::InvalidParameter(format!("atom {j} does not exist ({} atoms)", geo.n_atoms()))
    })?;
    let standing = (geo.wavenumber() * z).cos();
    let rho2 = x * x + y * y;
    let g = match geo.convention {
        ModeConvention::Linear => {
            let arg = 1.0 + z / geo.z_r();
            if arg <= 0.0 {
                return Err(Error::ModeWidthUndefined {
                    atom: j,
                    value: arg,
                });
            }
            let w_z = geo.w0 * arg.sqrt();
            geo.g0 * standing * (-rho2 / (geo.w0 * geo.w0)).exp() * (geo.w0 / w_z)
        }
        ModeConvention::Gaussian => {
            let w_z = geo.w0 * (1.0 + (z / geo.z_r()).powi(2)).sqrt();
            geo.g0 * standing * (-rho2 / (w_z * w_z)).exp() * (geo.w0 / w_z)
        }
    };
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantResult {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub degenerate: bool,
    /// `|V₁₂| = |V₁₃| = |V₂₃|` to relative [`EQUAL_MAGNITUDE_TOL`].
    pub equal_magnitudes: bool,
    /// `(max|V| - min|V|) / max|V|`, zero when all vanish.
    pub magnitude_spread: f64,
    /// All three couplings vanish: a triple root, outside the physical regime.
    pub unphysical: bool,
}

/// Discriminant of the depressed cubic `λ³ + Pλ + Q` whose roots are the
/// eigenvalues of the three-atom exchange matrix.
pub fn cardano_discriminant(v12: f64, v13: f64, v23: f64) -> DiscriminantResult {
    let p = -(v12 * v12 + v13 * v13 + v23 * v23);
    let q = -2.0 * v12 * v13 * v23;
    let delta = (p / 3.0).powi(3) + (q / 2.0).powi(2);
    // Purely relative: Δ scales as V⁶, so an absolute floor would call every
    // weakly coupled triangle degenerate.
    let scale = (p / 3.0).abs().powi(3).max((q / 2.0).powi(2));
    let mags = [v12.abs(), v13.abs(), v23.abs()];
    let hi = mags.iter().copied().fold(0.0, f64::max);
    let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let magnitude_spread = if hi == 0.0 { 0.0 } else { (hi - lo) / hi };
    DiscriminantResult {
        p,
        q,
        delta,
        degenerate: scale == 0.0 || delta.abs() <= DISCRIMINANT_TOL * scale,
        equal_magnitudes: magnitude_spread <= EQUAL_MAGNITUDE_TOL,
        magnitude_spread,
        unphysical: hi == 0.0,
    }
}

/// Couplings from positions; `Δ_a` and `κ` pass through.
pub fn params_from_geometry(geo: &AtomGeometry, delta_a: f64, kappa: f64) -> Result<SystemParams> {
    let v = dipole_matrix(geo)?;
    let g = (0..geo.n_atoms())
        .map(|j| cavity_coupling(geo, j))
        .collect::<Result<Vec<_>>>()?;
    SystemParams::new(g, v, delta_a, kappa)
}
