// Gaussian-beam geometry of the splitter/shifter cascade.
//
// All lengths are meters, times seconds. Integer problem quantities enter
// physical space only through kappa, the length of one unit of shift.

#ifndef QOD_OPTICS_HPP_
#define QOD_OPTICS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qod {

struct DeviceParameters {
  double lambda = 0;         // wavelength
  double d_b = 0;            // beam diameter at the source
  double L = 0;              // spacing between consecutive gates
  int n_gates = 0;
  double R_M = 0;            // transverse size of mirrors and amplifiers
  double kappa = 0;          // one unit of shift
  double delta_p = 1e-7;     // CCD pixel size
  double I_sat = 1.0;        // amplifier saturation intensity (normalized)
  double gain = 2.0;         // amplifier small-signal gain
  double T_atom = 1e-8;      // amplifier relaxation time
  double phase_jitter = 0.0; // std-dev of the phase error per passage, rad

  friend bool operator==(const DeviceParameters&,
                         const DeviceParameters&) = default;
};

// Throws std::invalid_argument unless lengths/times are positive, gain >= 1,
// I_sat > 0 and phase_jitter >= 0.
void validate(const DeviceParameters& dev);

// Far-field divergence angle 1.2 * lambda / d_b.
double divergence(double lambda, double d_b);

// Beam diameter after n gates: n * L * sin(alpha) + d_b.
double final_diameter(int n, double L, double alpha, double d_b);

// sqrt(n * L * lambda), the source diameter that (up to the 1.2 factor of
// divergence()) minimizes final_diameter().
double optimal_beam_diameter(int n, double L, double lambda);

// Largest integer sum strictly below R_M / kappa. A ratio that is an integer
// up to rounding noise counts as an integer.
std::int64_t max_representable_sum(double R_M, double kappa);
inline std::int64_t max_representable_sum(const DeviceParameters& dev) {
  return max_representable_sum(dev.R_M, dev.kappa);
}

enum class Constraint {
  BeamSeparation,   // kappa >= d_final
  MirrorSize,       // R_M > kappa * n + d_b
  BoundCapacity,    // max_sum < R_M / kappa
  BeamExtent,       // kappa * max_sum + d_final <= R_M
  PixelResolution,  // 2 * delta_p < kappa, so a pixel centre rounds to its lattice site
};

std::string_view to_string(Constraint c);

struct GeometryReport {
  double alpha = 0;
  double d_final = 0;
  double kappa_min = 0;          // = d_final
  double kappa_min_nominal = 0;  // 2 * d_b, the closed form for an optimal d_b
  double R_M_min = 0;
  double bound_ratio = 0;        // R_M / kappa
  std::int64_t B_plus_max = 0;
  bool feasible = true;
  std::vector<Constraint> violations;
  std::vector<std::string> notes;
};

GeometryReport feasibility_check(const DeviceParameters& dev,
                                 std::int64_t max_sum);

// Smallest device passing feasibility_check for n gates and sums up to
// max_sum: d_b = optimal_beam_diameter, kappa = d_final, and R_M just large
// enough for both the gate count and max_sum. Remaining fields take their
// defaults.
DeviceParameters size_device(int n, std::int64_t max_sum, double lambda,
                             double L);

}  // namespace qod

#endif  // QOD_OPTICS_HPP_
