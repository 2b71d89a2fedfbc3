#pragma once

#include <span>

#include "maglev/plant.hpp"

namespace maglev::metrics {

struct WindowSpec {
  double steady_fraction = 0.2;  // final share of the run treated as steady state
  double band_fraction = 0.02;   // settling band relative to the setpoint
};

struct SteadyValues {
  double p = 0.0;
  double v = 0.0;
  double i = 0.0;
  double u = 0.0;
};

struct MetricReport {
  double iae = 0.0;
  double itae = 0.0;
  double settling_time = 0.0;  // NaN when not settled
  bool settled = false;
  double e_delta_max = 0.0;    // |max u - u_ss|
  double chatter_amp = 0.0;    // peak-to-peak u over the steady window
  double chatter_freq = 0.0;   // zero crossings of u - u_ss per 2 s of window
  SteadyValues steady;         // window means
  double peak_deviation = 0.0;      // max |p - x1d| over the run
  double position_amplitude = 0.0;  // half peak-to-peak p in the window
  double velocity_ripple = 0.0;     // max |v| in the window
  double current_min = 0.0;         // i range in the window
  double current_max = 0.0;
  double t_final = 0.0;
};

// Setpoint per sample is taken from the trace.
MetricReport compute(const plant::SimTrace& trace, const WindowSpec& window = {});

// Trapezoidal integrals of |e| and t |e| over the sample grid.
double iae(std::span<const double> t, std::span<const double> abs_error);
double itae(std::span<const double> t, std::span<const double> abs_error);

// First time after which |p - x1d| <= band_fraction x1d at every later sample;
// NaN if the final sample is outside the band.
double settling_time(const plant::SimTrace& trace, double band_fraction);

// Index of the first sample of the steady window.
std::size_t steady_window_start(const plant::SimTrace& trace, double steady_fraction);

}  // namespace maglev::metrics
