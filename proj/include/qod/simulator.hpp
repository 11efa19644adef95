// Stage-by-stage simulation of the optical knapsack device.
//
// Each gate splits every beam 50/50, shifts one copy by (c_i, w_i) lattice
// units, recombines coincident copies coherently and passes the result
// through a saturating amplifier. A CCD at the output bins beam centres into
// pixels and the detected centres are read back as the device's answer.
//
// Beam positions are kept on the integer lattice (units of kappa); meters
// appear only at the CCD.

#ifndef QOD_SIMULATOR_HPP_
#define QOD_SIMULATOR_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qod/knapsack.hpp"
#include "qod/optics.hpp"

namespace qod {

struct BeamKey {
  std::int64_t z = 0;  // accumulated sum of c_i
  std::int64_t y = 0;  // accumulated sum of w_i (0 for the decision variants)
  friend auto operator<=>(const BeamKey&, const BeamKey&) = default;
};

struct Beam {
  double amplitude = 0;  // intensity = amplitude^2
  double width = 0;      // current diameter, meters
  double phase = 0;      // radians

  double intensity() const { return amplitude * amplitude; }
};

struct BeamEnsemble {
  int stage = 0;
  int stages = 0;  // number of gates in the cascade
  std::map<BeamKey, Beam> beams;
  // Beams lost so far because they were shifted past the mirror edge.
  std::size_t clipped = 0;

  double total_intensity() const;
};

inline constexpr std::size_t kDefaultMaxBeams = 10'000'000;

// Single source beam at the origin.
BeamEnsemble initial_ensemble(int stages, const DeviceParameters& dev,
                              double source_intensity = 1.0);

// Advances the ensemble by one gate. Children shifted beyond
// max_representable_sum(dev) on either axis leave the mirror and are counted
// in `clipped`. With phase_jitter > 0 each child picks up a N(0, jitter)
// phase error drawn from rng in ensemble order.
//
// Coincident children are combined as sum(a_k e^{i phi_k}) / sqrt(m), the
// symmetric output of a lossless m-way combiner. Intensity is then amplified
// to min(gain * I, I_sat).
//
// Throws std::out_of_range when the cascade is complete and
// std::length_error when the merged ensemble exceeds max_beams.
BeamEnsemble apply_gate(const BeamEnsemble& ens, std::int64_t c_shift,
                        std::int64_t w_shift, const DeviceParameters& dev,
                        std::mt19937_64& rng,
                        std::size_t max_beams = kDefaultMaxBeams);

using StageObserver = std::function<void(const BeamEnsemble&)>;

// Runs all gates of the instance. The observer, when set, sees the ensemble
// after every stage including stage 0.
BeamEnsemble propagate(const KnapsackInstance& inst, const DeviceParameters& dev,
                       std::mt19937_64& rng,
                       std::size_t max_beams = kDefaultMaxBeams,
                       const StageObserver& observer = {});

BeamEnsemble propagate(const KnapsackInstance& inst, const DeviceParameters& dev,
                       std::uint64_t seed);

struct Pixel {
  std::int64_t z = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct ReadoutOptions {
  // Intensity floor; defaults to I_sat / 100 (0.01 when I_sat is infinite).
  std::optional<double> threshold;
  // Uniform error in (-center_noise, +center_noise) meters added to each
  // beam centre on each axis before binning.
  double center_noise = 0.0;
  // Poisson photon counting with this many photons per unit intensity.
  std::optional<double> photon_budget;
};

struct CcdReading {
  double pixel_size = 0;
  bool two_dimensional = false;
  double threshold = 0;
  // Pixel index = floor(offset / pixel_size); y is 0 for 1-D readings.
  std::map<Pixel, double> intensity;
  // Pairs of beams closer than their width, which the CCD cannot separate.
  std::size_t unresolved_pairs = 0;
};

struct Offset {
  double z = 0;
  double y = 0;
};

std::int64_t pixel_index(double offset, double pixel_size);

double detection_threshold(const DeviceParameters& dev,
                           const ReadoutOptions& options);

CcdReading ccd_read(const BeamEnsemble& ens, const DeviceParameters& dev,
                    bool two_dimensional, const ReadoutOptions& options,
                    std::mt19937_64& rng);
CcdReading ccd_read(const BeamEnsemble& ens, const DeviceParameters& dev,
                    bool two_dimensional);

// Pixel centres of every above-threshold pixel, in pixel order.
std::vector<Offset> detected_centers(const CcdReading& reading);

struct DetectionWindow {
  double y_min = 0;
  double y_max = 0;
  double z_budget = 0;  // Optimization only: kappa * bound_hi - delta_p
};

DetectionWindow detection_window(const KnapsackInstance& inst,
                                 const DeviceParameters& dev);

struct SimulationResult {
  Variant variant = Variant::ExactSum;
  std::optional<bool> decision;
  std::optional<std::int64_t> measured_optimum;
  DetectionWindow window;
  std::vector<Offset> detected_offsets;
  std::vector<std::size_t> beam_count_history;
  // Beams shifted past the mirror edge; these carry sums above the span the
  // device was built for.
  std::size_t clipped_beams = 0;
  std::vector<std::string> warnings;
};

// Reads the answer off the detected centres. Each centre is snapped to the
// nearest lattice site (readout precision kappa / 2):
//   ExactSum      YES iff a centre sits at target
//   IntervalSum   YES iff a centre sits strictly inside (lo, hi)
//   Optimization  largest y among centres with z < bound_hi
SimulationResult decide(const CcdReading& reading, const KnapsackInstance& inst,
                        const DeviceParameters& dev);

struct SimulationOptions {
  ReadoutOptions readout;
  std::size_t max_beams = kDefaultMaxBeams;
  StageObserver observer;
};

// Largest lattice coordinate the device must hold for this instance: the
// target, the upper bound, or for Optimization max(bound_hi, sum(w)).
std::int64_t required_span(const KnapsackInstance& inst);

// propagate -> ccd_read -> decide, with beam counts per stage and warnings for
// infeasible geometry, unresolved beams and interference loss.
// Deterministic for a fixed seed.
SimulationResult simulate(const KnapsackInstance& inst,
                          const DeviceParameters& dev, std::uint64_t seed,
                          const SimulationOptions& options = {});

}  // namespace qod

#endif  // QOD_SIMULATOR_HPP_
