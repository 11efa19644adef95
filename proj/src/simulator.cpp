#include "qod/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qod {
namespace {

struct Arrival {
  std::complex<double> field;
  double amplitude = 0;  // of the first arrival, kept exact when unmerged
  double phase = 0;
  double width = 0;
  int count = 0;
};

std::size_t count_unresolved(const BeamEnsemble& ens, double kappa,
                             double threshold) {
  std::vector<std::pair<BeamKey, double>> lit;
  double widest = 0;
  for (const auto& [key, beam] : ens.beams) {
    if (beam.intensity() < threshold) continue;
    lit.emplace_back(key, beam.width);
    widest = std::max(widest, beam.width);
  }
  if (kappa >= widest) return 0;
  std::size_t pairs = 0;
  // Sorted by z, so the inner scan stops once the z gap alone is too wide.
  for (std::size_t i = 0; i < lit.size(); ++i) {
    for (std::size_t j = i + 1; j < lit.size(); ++j) {
      const double dz = static_cast<double>(lit[j].first.z - lit[i].first.z) * kappa;
      if (dz >= widest) break;
      const double dy = static_cast<double>(lit[j].first.y - lit[i].first.y) * kappa;
      const double width = std::max(lit[i].second, lit[j].second);
      if (std::hypot(dz, dy) < width) ++pairs;
    }
  }
  return pairs;
}

}  // namespace

double BeamEnsemble::total_intensity() const {
  double total = 0;
  for (const auto& [key, beam] : beams) total += beam.intensity();
  return total;
}

BeamEnsemble initial_ensemble(int stages, const DeviceParameters& dev,
                              double source_intensity) {
  if (stages < 0) throw std::invalid_argument("negative stage count");
  if (!(source_intensity >= 0.0)) {
    throw std::invalid_argument("negative source intensity");
  }
  BeamEnsemble ens;
  ens.stages = stages;
  ens.beams[BeamKey{}] = Beam{.amplitude = std::sqrt(source_intensity),
                              .width = dev.d_b,
                              .phase = 0.0};
  return ens;
}

BeamEnsemble apply_gate(const BeamEnsemble& ens, std::int64_t c_shift,
                        std::int64_t w_shift, const DeviceParameters& dev,
                        std::mt19937_64& rng, std::size_t max_beams) {
  if (ens.stage >= ens.stages) {
    throw std::out_of_range("gate applied past the last stage");
  }
  if (c_shift < 0 || w_shift < 0) throw std::invalid_argument("negative shift");
  const std::int64_t aperture = max_representable_sum(dev);
  const double growth = dev.L * std::sin(divergence(dev.lambda, dev.d_b));
  const double split = 1.0 / std::numbers::sqrt2;
  std::normal_distribution<double> jitter(0.0, dev.phase_jitter);

  BeamEnsemble next;
  next.stage = ens.stage + 1;
  next.stages = ens.stages;
  next.clipped = ens.clipped;

  std::map<BeamKey, Arrival> arrivals;
  for (const auto& [key, beam] : ens.beams) {
    for (const bool shifted : {false, true}) {
      const BeamKey child =
          shifted ? BeamKey{key.z + c_shift, key.y + w_shift} : key;
      double phase = beam.phase;
      if (dev.phase_jitter > 0.0) phase += jitter(rng);
      if (child.z > aperture || child.y > aperture) {
        ++next.clipped;
        continue;
      }
      const double amplitude = beam.amplitude * split;
      auto& a = arrivals[child];
      if (a.count == 0) {
        a.amplitude = amplitude;
        a.phase = phase;
        a.width = beam.width;
      }
      a.field += std::polar(amplitude, phase);
      ++a.count;
    }
    if (arrivals.size() > max_beams) {
      throw std::length_error("beam ensemble exceeds " +
                              std::to_string(max_beams) + " merged beams");
    }
  }

  for (const auto& [key, a] : arrivals) {
    double amplitude = a.amplitude;
    double phase = a.phase;
    if (a.count > 1) {
      amplitude = std::abs(a.field) / std::sqrt(static_cast<double>(a.count));
      phase = amplitude > 0.0 ? std::arg(a.field) : 0.0;
    }
    const double intensity =
        std::min(dev.gain * amplitude * amplitude, dev.I_sat);
    next.beams.emplace(key, Beam{.amplitude = std::sqrt(intensity),
                                 .width = a.width + growth,
                                 .phase = phase});
  }
  return next;
}

BeamEnsemble propagate(const KnapsackInstance& inst, const DeviceParameters& dev,
                       std::mt19937_64& rng, std::size_t max_beams,
                       const StageObserver& observer) {
  validate(inst);
  validate(dev);
  const bool two_axis = inst.variant == Variant::Optimization;
  auto ens = initial_ensemble(static_cast<int>(inst.size()), dev);
  if (observer) observer(ens);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    ens = apply_gate(ens, inst.c[i], two_axis ? inst.w[i] : 0, dev, rng,
                     max_beams);
    if (observer) observer(ens);
  }
  return ens;
}

BeamEnsemble propagate(const KnapsackInstance& inst, const DeviceParameters& dev,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return propagate(inst, dev, rng);
}

std::int64_t pixel_index(double offset, double pixel_size) {
  const double x = offset / pixel_size;
  double idx = std::floor(x);
  // 3 * 5e-3 / 1e-7 lands a hair below 150000 in binary floating point.
  if (idx + 1.0 - x <= 1e-9 * std::max(1.0, std::abs(x))) idx += 1.0;
  return static_cast<std::int64_t>(idx);
}

double detection_threshold(const DeviceParameters& dev,
                           const ReadoutOptions& options) {
  if (options.threshold) return *options.threshold;
  return std::isfinite(dev.I_sat) ? dev.I_sat / 100.0 : 0.01;
}

CcdReading ccd_read(const BeamEnsemble& ens, const DeviceParameters& dev,
                    bool two_dimensional, const ReadoutOptions& options,
                    std::mt19937_64& rng) {
  CcdReading reading;
  reading.pixel_size = dev.delta_p;
  reading.two_dimensional = two_dimensional;
  reading.threshold = detection_threshold(dev, options);
  std::uniform_real_distribution<double> noise(-options.center_noise,
                                               options.center_noise);
  for (const auto& [key, beam] : ens.beams) {
    double intensity = beam.intensity();
    if (options.photon_budget) {
      const double mean = intensity * *options.photon_budget;
      if (mean > 0.0) {
        std::poisson_distribution<long long> photons(mean);
        intensity = static_cast<double>(photons(rng)) / *options.photon_budget;
      }
    }
    double z = static_cast<double>(key.z) * dev.kappa;
    double y = static_cast<double>(key.y) * dev.kappa;
    if (options.center_noise > 0.0) {
      z += noise(rng);
      if (two_dimensional) y += noise(rng);
    }
    const Pixel px{pixel_index(z, dev.delta_p),
                   two_dimensional ? pixel_index(y, dev.delta_p) : 0};
    reading.intensity[px] += intensity;
  }
  std::erase_if(reading.intensity, [&](const auto& entry) {
    return entry.second < reading.threshold;
  });
  reading.unresolved_pairs = count_unresolved(ens, dev.kappa, reading.threshold);
  return reading;
}

CcdReading ccd_read(const BeamEnsemble& ens, const DeviceParameters& dev,
                    bool two_dimensional) {
  std::mt19937_64 rng(0);
  return ccd_read(ens, dev, two_dimensional, ReadoutOptions{}, rng);
}

std::vector<Offset> detected_centers(const CcdReading& reading) {
  std::vector<Offset> out;
  out.reserve(reading.intensity.size());
  for (const auto& [px, intensity] : reading.intensity) {
    Offset o;
    o.z = (static_cast<double>(px.z) + 0.5) * reading.pixel_size;
    if (reading.two_dimensional) {
      o.y = (static_cast<double>(px.y) + 0.5) * reading.pixel_size;
    }
    out.push_back(o);
  }
  return out;
}

DetectionWindow detection_window(const KnapsackInstance& inst,
                                 const DeviceParameters& dev) {
  DetectionWindow win;
  switch (inst.variant) {
    case Variant::ExactSum: {
      const double centre = dev.kappa * static_cast<double>(*inst.target);
      win.y_min = centre - dev.kappa / 2;
      win.y_max = centre + dev.kappa / 2;
      break;
    }
    case Variant::IntervalSum:
      win.y_min = dev.kappa * static_cast<double>(*inst.bound_lo);
      win.y_max = dev.kappa * static_cast<double>(*inst.bound_hi);
      break;
    case Variant::Optimization:
      win.y_min = 0.0;
      win.y_max = dev.R_M;
      win.z_budget = dev.kappa * static_cast<double>(*inst.bound_hi) - dev.delta_p;
      break;
  }
  return win;
}

SimulationResult decide(const CcdReading& reading, const KnapsackInstance& inst,
                        const DeviceParameters& dev) {
  const bool two_axis = inst.variant == Variant::Optimization;
  if (reading.two_dimensional != two_axis) {
    throw std::invalid_argument("CCD reading dimensionality does not match variant");
  }
  SimulationResult result;
  result.variant = inst.variant;
  result.window = detection_window(inst, dev);
  result.detected_offsets = detected_centers(reading);
  auto site = [&](double offset) {
    return static_cast<std::int64_t>(std::llround(offset / dev.kappa));
  };
  switch (inst.variant) {
    case Variant::ExactSum:
      result.decision = std::ranges::any_of(result.detected_offsets, [&](const Offset& o) {
        return site(o.z) == *inst.target;
      });
      break;
    case Variant::IntervalSum:
      result.decision = std::ranges::any_of(result.detected_offsets, [&](const Offset& o) {
        const auto s = site(o.z);
        return *inst.bound_lo < s && s < *inst.bound_hi;
      });
      break;
    case Variant::Optimization:
      for (const auto& o : result.detected_offsets) {
        if (site(o.z) >= *inst.bound_hi) continue;
        const auto y = site(o.y);
        if (!result.measured_optimum || y > *result.measured_optimum) {
          result.measured_optimum = y;
        }
      }
      break;
  }
  return result;
}

std::int64_t required_span(const KnapsackInstance& inst) {
  switch (inst.variant) {
    case Variant::ExactSum:
      return *inst.target;
    case Variant::IntervalSum:
      return *inst.bound_hi;
    case Variant::Optimization: {
      std::int64_t total = 0;
      for (const auto v : inst.w) total += v;
      return std::max(*inst.bound_hi, total);
    }
  }
  return 0;
}

SimulationResult simulate(const KnapsackInstance& inst,
                          const DeviceParameters& dev, std::uint64_t seed,
                          const SimulationOptions& options) {
  validate(inst);
  validate(dev);
  std::vector<std::string> warnings;
  const auto geometry = feasibility_check(dev, required_span(inst));
  if (!geometry.feasible) {
    std::string msg = "geometry infeasible:";
    for (const auto v : geometry.violations) {
      msg += ' ';
      msg += to_string(v);
    }
    warnings.push_back(std::move(msg));
  }
  if (static_cast<std::size_t>(dev.n_gates) != inst.size()) {
    warnings.push_back("device has " + std::to_string(dev.n_gates) +
                       " gates but the instance has " +
                       std::to_string(inst.size()) + " items");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> history;
  const StageObserver record = [&](const BeamEnsemble& ens) {
    history.push_back(ens.beams.size());
    if (options.observer) options.observer(ens);
  };
  const auto ens = propagate(inst, dev, rng, options.max_beams, record);
  const bool two_axis = inst.variant == Variant::Optimization;

  const auto reading = ccd_read(ens, dev, two_axis, options.readout, rng);
  if (reading.unresolved_pairs > 0) {
    warnings.push_back("unresolved beams: " +
                       std::to_string(reading.unresolved_pairs) +
                       " pairs closer than the beam width");
  }
  const auto dark = std::ranges::count_if(ens.beams, [&](const auto& entry) {
    return entry.second.intensity() < reading.threshold;
  });
  if (dark > 0) {
    warnings.push_back("interference loss: " + std::to_string(dark) +
                       " beams below the detection threshold");
  }

  auto result = decide(reading, inst, dev);
  if (two_axis && !result.measured_optimum) {
    warnings.push_back("no beam detected inside the budget");
  }
  result.beam_count_history = std::move(history);
  result.clipped_beams = ens.clipped;
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace qod
