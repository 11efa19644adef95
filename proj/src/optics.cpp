#include "qod/optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qod {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

// Relative slack used when sizing, so that the sized device clears its own
// inequalities after rounding.
constexpr double kSizingSlack = 1e-9;

}  // namespace

void validate(const DeviceParameters& dev) {
  require_positive(dev.lambda, "lambda");
  require_positive(dev.d_b, "d_b");
  require_positive(dev.L, "L");
  if (dev.n_gates <= 0) throw std::invalid_argument("n_gates must be positive");
  require_positive(dev.R_M, "R_M");
  require_positive(dev.kappa, "kappa");
  require_positive(dev.delta_p, "delta_p");
  require_positive(dev.I_sat, "I_sat");
  require_positive(dev.T_atom, "T_atom");
  if (!(dev.gain >= 1.0) || std::isinf(dev.gain)) {
    throw std::invalid_argument("gain must be finite and >= 1");
  }
  if (!(dev.phase_jitter >= 0.0) || std::isinf(dev.phase_jitter)) {
    throw std::invalid_argument("phase_jitter must be finite and >= 0");
  }
}

double divergence(double lambda, double d_b) {
  require_positive(lambda, "lambda");
  require_positive(d_b, "d_b");
  return 1.2 * lambda / d_b;
}

double final_diameter(int n, double L, double alpha, double d_b) {
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  require_positive(L, "L");
  require_positive(d_b, "d_b");
  if (!(alpha >= 0.0 && alpha < std::numbers::pi / 2)) {
    throw std::invalid_argument("alpha must lie in [0, pi/2)");
  }
  return n * L * std::sin(alpha) + d_b;
}

double optimal_beam_diameter(int n, double L, double lambda) {
  if (n <= 0) throw std::invalid_argument("n must be positive");
  require_positive(L, "L");
  require_positive(lambda, "lambda");
  return std::sqrt(n * L * lambda);
}

std::int64_t max_representable_sum(double R_M, double kappa) {
  require_positive(R_M, "R_M");
  require_positive(kappa, "kappa");
  const double ratio = R_M / kappa;
  if (ratio >= 0x1p62) throw std::overflow_error("R_M / kappa too large");
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    return static_cast<std::int64_t>(nearest) - 1;
  }
  return static_cast<std::int64_t>(std::ceil(ratio)) - 1;
}

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::BeamSeparation:
      return "beam_separation";
    case Constraint::MirrorSize:
      return "mirror_size";
    case Constraint::BoundCapacity:
      return "bound_capacity";
    case Constraint::BeamExtent:
      return "beam_extent";
    case Constraint::PixelResolution:
      return "pixel_resolution";
  }
  return "unknown";
}

GeometryReport feasibility_check(const DeviceParameters& dev,
                                 std::int64_t max_sum) {
  validate(dev);
  if (max_sum < 0) throw std::invalid_argument("max_sum must be non-negative");
  GeometryReport r;
  r.alpha = divergence(dev.lambda, dev.d_b);
  r.d_final = final_diameter(dev.n_gates, dev.L, r.alpha, dev.d_b);
  r.kappa_min = r.d_final;
  r.kappa_min_nominal = 2.0 * dev.d_b;
  const double sum = static_cast<double>(max_sum);
  r.R_M_min = std::max(dev.kappa * dev.n_gates + dev.d_b,
                       dev.kappa * sum + r.d_final);
  r.bound_ratio = dev.R_M / dev.kappa;
  r.B_plus_max = max_representable_sum(dev);

  if (dev.kappa < r.d_final) r.violations.push_back(Constraint::BeamSeparation);
  if (!(dev.R_M > dev.kappa * dev.n_gates + dev.d_b)) {
    r.violations.push_back(Constraint::MirrorSize);
  }
  if (max_sum > r.B_plus_max) r.violations.push_back(Constraint::BoundCapacity);
  if (dev.kappa * sum + r.d_final > dev.R_M) {
    r.violations.push_back(Constraint::BeamExtent);
  }
  if (!(2.0 * dev.delta_p < dev.kappa)) {
    r.violations.push_back(Constraint::PixelResolution);
  }
  r.feasible = r.violations.empty();

  r.notes.push_back(
      "B_plus_max is the largest integer strictly below R_M/kappa, evaluated "
      "exactly; for R_M = 10 m and kappa = 5e-3 m that is 1999 (ratio 2000), "
      "an order of magnitude above the 2e2 figure often quoted for that device");
  if (r.kappa_min > r.kappa_min_nominal) {
    r.notes.push_back(
        "kappa_min uses the exact d_final; the 2*d_b closed form assumes "
        "d_b = sqrt(n*L*lambda) and drops the 1.2 divergence factor");
  }
  return r;
}

DeviceParameters size_device(int n, std::int64_t max_sum, double lambda,
                             double L) {
  if (max_sum < 0) throw std::invalid_argument("max_sum must be non-negative");
  DeviceParameters dev;
  dev.lambda = lambda;
  dev.L = L;
  dev.n_gates = n;
  dev.d_b = optimal_beam_diameter(n, L, lambda);
  const double d_final =
      final_diameter(n, L, divergence(lambda, dev.d_b), dev.d_b);
  dev.kappa = d_final * (1.0 + kSizingSlack);
  const auto span = static_cast<double>(std::max<std::int64_t>(n, max_sum));
  dev.R_M = (dev.kappa * (span + 1.0) + d_final) * (1.0 + kSizingSlack);
  return dev;
}

}  // namespace qod
