#include "maglev/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace maglev::metrics {

double iae(std::span<const double> t, std::span<const double> abs_error) {
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    total += 0.5 * (t[k] - t[k - 1]) * (abs_error[k] + abs_error[k - 1]);
  }
  return total;
}

double itae(std::span<const double> t, std::span<const double> abs_error) {
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    total += 0.5 * (t[k] - t[k - 1]) * (t[k] * abs_error[k] + t[k - 1] * abs_error[k - 1]);
  }
  return total;
}

double settling_time(const plant::SimTrace& trace, double band_fraction) {
  const std::size_t n = trace.size();
  if (n == 0) throw std::invalid_argument("settling_time: empty trace");
  std::size_t last_out = n;
  for (std::size_t k = n; k-- > 0;) {
    const double band = band_fraction * std::abs(trace.setpoint[k]);
    if (std::abs(trace.states[k].p - trace.setpoint[k]) > band) {
      last_out = k;
      break;
    }
  }
  if (last_out == n) return trace.t.front();
  if (last_out == n - 1) return std::numeric_limits<double>::quiet_NaN();
  return trace.t[last_out + 1];
}

std::size_t steady_window_start(const plant::SimTrace& trace, double steady_fraction) {
  if (trace.size() == 0) throw std::invalid_argument("steady window of an empty trace");
  if (!(steady_fraction > 0.0 && steady_fraction <= 1.0)) {
    throw std::invalid_argument("steady fraction must be in (0, 1]");
  }
  const double t0 = trace.t.front();
  const double t_start = t0 + (1.0 - steady_fraction) * (trace.t.back() - t0);
  const auto it = std::lower_bound(trace.t.begin(), trace.t.end(), t_start - 1e-12);
  return static_cast<std::size_t>(it - trace.t.begin());
}

MetricReport compute(const plant::SimTrace& trace, const WindowSpec& window) {
  const std::size_t n = trace.size();
  if (n == 0) throw std::invalid_argument("metrics: empty trace");

  MetricReport r;
  std::vector<double> err(n);
  for (std::size_t k = 0; k < n; ++k) {
    err[k] = std::abs(trace.setpoint[k] - trace.states[k].p);
    r.peak_deviation = std::max(r.peak_deviation, err[k]);
  }
  r.iae = iae(trace.t, err);
  r.itae = itae(trace.t, err);
  r.settling_time = settling_time(trace, window.band_fraction);
  r.settled = !std::isnan(r.settling_time);
  r.t_final = trace.t.back();

  const std::size_t start = steady_window_start(trace, window.steady_fraction);
  const auto count = static_cast<double>(n - start);
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -u_min;
  double p_min = u_min;
  double p_max = -u_min;
  r.current_min = u_min;
  r.current_max = -u_min;
  for (std::size_t k = start; k < n; ++k) {
    const auto& x = trace.states[k];
    r.steady.p += x.p / count;
    r.steady.v += x.v / count;
    r.steady.i += x.i / count;
    r.steady.u += trace.u[k] / count;
    u_min = std::min(u_min, trace.u[k]);
    u_max = std::max(u_max, trace.u[k]);
    p_min = std::min(p_min, x.p);
    p_max = std::max(p_max, x.p);
    r.current_min = std::min(r.current_min, x.i);
    r.current_max = std::max(r.current_max, x.i);
    r.velocity_ripple = std::max(r.velocity_ripple, std::abs(x.v));
  }
  r.chatter_amp = u_max - u_min;
  r.position_amplitude = 0.5 * (p_max - p_min);
  r.e_delta_max = std::abs(*std::max_element(trace.u.begin(), trace.u.end()) - r.steady.u);

  long crossings = 0;
  double previous = 0.0;
  for (std::size_t k = start; k < n; ++k) {
    const double dev = trace.u[k] - r.steady.u;
    if (dev == 0.0) continue;
    if (previous != 0.0 && (dev > 0.0) != (previous > 0.0)) ++crossings;
    previous = dev;
  }
  const double duration = trace.t.back() - trace.t[start];
  r.chatter_freq = duration > 0.0 ? static_cast<double>(crossings) / (2.0 * duration) : 0.0;
  return r;
}

}  // namespace maglev::metrics
