#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "memseconv/errors.hpp"

namespace memseconv {

/// Threshold-type memristor parameters. Defaults are the device used
/// throughout: R_ON 10 kOhm, R_OFF 1 MOhm, V_th 1.5 V, alpha 0, beta 1e7.
struct DeviceParams {
  double r_on = 1.0e4;   // ohms, low resistance state
  double r_off = 1.0e6;  // ohms, high resistance state
  double v_th = 1.5;     // volts
  double alpha = 0.0;    // ohm / (V s), sub-threshold change rate
  double beta = 1.0e7;   // ohm / (V s), above-threshold change rate

  double g_on() const { return 1.0 / r_on; }
  double g_off() const { return 1.0 / r_off; }

  void validate() const {
    if (!(r_on > 0.0) || !(r_off > r_on))
      throw ConfigError("device: need 0 < R_ON < R_OFF");
    if (!(v_th > 0.0)) throw ConfigError("device: V_th must be positive");
    if (!(beta > 0.0)) throw ConfigError("device: beta must be positive");
  }
};

struct MemristorDevice {
  DeviceParams params;
  double resistance;  // ohms, kept inside [r_on, r_off]

  explicit MemristorDevice(DeviceParams p = {}, double r0 = -1.0)
      : params(p), resistance(r0 < 0.0 ? p.r_on : std::clamp(r0, p.r_on, p.r_off)) {}
};

/// Resistance change rate in ohm/s:
///   beta*v + 0.5*(alpha - beta) * (|v + V_th| - |v - V_th|)
/// evaluated in its exact piecewise form (alpha*v inside the threshold band,
/// so sub-threshold drive is identically zero at alpha = 0).
inline double f_th(double v, const DeviceParams& p) {
  if (v > p.v_th) return p.beta * v + (p.alpha - p.beta) * p.v_th;
  if (v < -p.v_th) return p.beta * v - (p.alpha - p.beta) * p.v_th;
  return p.alpha * v;
}

inline double device_current(const MemristorDevice& d, double v) { return v / d.resistance; }

/// One explicit-Euler step of the state equation. Positive drive moves the
/// device toward R_OFF, negative toward R_ON; each direction is gated at its
/// rail and the state is clamped after the step.
inline MemristorDevice step(MemristorDevice d, double v, double dt) {
  if (dt <= 0.0) throw ConfigError("step: dt must be positive");
  const bool up_open = v > 0.0 && d.resistance < d.params.r_off;
  const bool down_open = v < 0.0 && d.resistance > d.params.r_on;
  if (up_open || down_open) {
    d.resistance += f_th(v, d.params) * dt;
    d.resistance = std::clamp(d.resistance, d.params.r_on, d.params.r_off);
  }
  return d;
}

struct ProgramResult {
  MemristorDevice device;
  bool switched = false;     // false: |v| <= V_th, state untouched
  double switch_time = 0.0;  // seconds; +inf on the no-switch outcome
  double switch_energy = 0.0;  // joules dissipated while the state moves
  double hold_energy = 0.0;    // joules for the optional constant-R hold phase
  double mean_power = 0.0;     // watts over switch + hold window
};

namespace detail {
inline void finish_program(ProgramResult& r, double hold_time, double hold_voltage) {
  if (hold_time > 0.0)
    r.hold_energy = hold_voltage * hold_voltage / r.device.resistance * hold_time;
  const double total_time = r.switch_time + hold_time;
  if (total_time > 0.0 && std::isfinite(total_time))
    r.mean_power = (r.switch_energy + r.hold_energy) / total_time;
}
}  // namespace detail

/// Constant-voltage programming, closed form. f_th depends only on v, so the
/// rate is constant while the gate is open: the state reaches its rail after
/// delta_R / |f_th(v)| seconds and the dissipated energy is
/// v^2 / |f_th(v)| * ln(R_end / R_start).
inline ProgramResult program_constant(MemristorDevice d, double v, double hold_time = 0.0,
                                      double hold_voltage = 0.0) {
  ProgramResult r{d};
  if (std::abs(v) <= d.params.v_th) {
    r.switched = false;
    r.switch_time = std::numeric_limits<double>::infinity();
    detail::finish_program(r, hold_time, hold_voltage);
    return r;
  }
  const double rate = f_th(v, d.params);
  const double r_start = d.resistance;
  const double r_end = v > 0.0 ? d.params.r_off : d.params.r_on;
  r.switched = true;
  if (r_start != r_end) {
    r.switch_time = std::abs(r_end - r_start) / std::abs(rate);
    r.switch_energy = v * v / std::abs(rate) * std::abs(std::log(r_end / r_start));
    r.device.resistance = r_end;
  }
  detail::finish_program(r, hold_time, hold_voltage);
  return r;
}

/// Same programming pulse integrated with explicit Euler at step dt
/// (left-Riemann energy sum). Converges to program_constant as dt -> 0.
inline ProgramResult program_euler(MemristorDevice d, double v, double dt,
                                   double hold_time = 0.0, double hold_voltage = 0.0) {
  ProgramResult r{d};
  if (std::abs(v) <= d.params.v_th) {
    r.switched = false;
    r.switch_time = std::numeric_limits<double>::infinity();
    detail::finish_program(r, hold_time, hold_voltage);
    return r;
  }
  const double r_end = v > 0.0 ? d.params.r_off : d.params.r_on;
  r.switched = true;
  long long steps = 0;
  const long long max_steps = 200'000'000;
  while (r.device.resistance != r_end) {
    r.switch_energy += v * v / r.device.resistance * dt;
    r.device = step(r.device, v, dt);
    if (++steps > max_steps)
      throw InternalError("program_euler: step budget exhausted; dt too small?");
  }
  r.switch_time = static_cast<double>(steps) * dt;
  detail::finish_program(r, hold_time, hold_voltage);
  return r;
}

}  // namespace memseconv
