use super::vehicle::{ControlInput, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::roadnet::SlopeField;

/// Time derivative of `[x, y, z, psi, v]` for the slope-aware single-track
/// model. A stopped vehicle never rolls backwards.
pub fn bicycle_derivative(state: &VehicleState, u: &ControlInput, theta: f64, params: &VehicleParams) -> [f64; 5] {
    let v = state.v.max(0.0);
    let (st, ct) = theta.sin_cos();
    let mut dv = u.accel - params.g * st;
    if v <= 0.0 && dv < 0.0 {
        dv = 0.0;
    }
    [
        v * state.psi.cos() * ct,
        v * state.psi.sin() * ct,
        v * st,
        v / params.wheelbase * u.steer.tan(),
        dv,
    ]
}

fn axpy<const N: usize>(y: &[f64; N], k: &[f64; N], h: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

fn check_finite<const N: usize>(stage: usize, v: &[f64; N]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Integration(format!("RK4 stage {stage} ({v:?})")))
    }
}

/// One classical Runge-Kutta step of `dy/dt = f(y)`.
pub fn rk4_generic<const N: usize, F>(f: F, y: &[f64; N], dt: f64) -> Result<[f64; N]>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step {dt} must be > 0")));
    }
    let k1 = f(y);
    check_finite(1, &k1)?;
    let k2 = f(&axpy(y, &k1, dt / 2.0));
    check_finite(2, &k2)?;
    let k3 = f(&axpy(y, &k2, dt / 2.0));
    check_finite(3, &k3)?;
    let k4 = f(&axpy(y, &k3, dt));
    check_finite(4, &k4)?;
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(5, &out)?;
    Ok(out)
}

/// Advance a vehicle by `dt` with controls held, looking up the road slope
/// at every stage position and clamping the speed at zero afterwards.
pub fn rk4_step(
    state: &VehicleState,
    u: &ControlInput,
    slope: &dyn SlopeField,
    params: &VehicleParams,
    dt: f64,
) -> Result<VehicleState> {
    let f = |y: &[f64; 5]| {
        let s = VehicleState::from_array(*y);
        bicycle_derivative(&s, u, slope.slope(s.x, s.y), params)
    };
    let mut next = VehicleState::from_array(rk4_generic(f, &state.to_array(), dt)?);
    next.v = next.v.max(0.0);
    Ok(next)
}
