use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Fixed-step classical Runge-Kutta integrator for linear matrix ODEs
/// `dρ/dt = f(ρ)`. Keeps its own step counter so a blow-up can be located.
#[derive(Debug, Clone)]
pub struct Rk4 {
    dt: f64,
    steps: usize,
}

impl Rk4 {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive and finite, got {dt}"
            )));
        }
        Ok(Self { dt, steps: 0 })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn step<F>(&mut self, deriv: F, rho: &ComplexMatrix) -> Result<ComplexMatrix>
    where
        F: Fn(&ComplexMatrix) -> ComplexMatrix,
    {
        let next = advance(&deriv, rho, self.dt).map_err(|_| Error::NonFinite {
            step: self.steps,
            time: self.time(),
        })?;
        self.steps += 1;
        Ok(next)
    }
}

/// A single RK4 step. A non-finite stage is reported as step 0.
pub fn rk4_step<F>(deriv: F, rho: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    Rk4::new(dt)?.step(deriv, rho)
}

fn advance<F>(deriv: &F, rho: &ComplexMatrix, dt: f64) -> std::result::Result<ComplexMatrix, ()>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let checked = |m: ComplexMatrix| if m.is_finite() { Ok(m) } else { Err(()) };
    let axpy = |x: &ComplexMatrix, a: f64, y: &ComplexMatrix| {
        let mut out = x.clone();
        for (o, &yy) in out.as_mut_slice().iter_mut().zip(y.as_slice()) {
            *o += yy * a;
        }
        out
    };

    let k1 = checked(deriv(rho))?;
    let k2 = checked(deriv(&axpy(rho, 0.5 * dt, &k1)))?;
    let k3 = checked(deriv(&axpy(rho, 0.5 * dt, &k2)))?;
    let k4 = checked(deriv(&axpy(rho, dt, &k3)))?;

    let mut out = rho.clone();
    let w = dt / 6.0;
    for (i, o) in out.as_mut_slice().iter_mut().enumerate() {
        *o +=
            (k1.as_slice()[i] + 2.0 * k2.as_slice()[i] + 2.0 * k3.as_slice()[i] + k4.as_slice()[i])
                * w;
    }
    checked(out)
}
