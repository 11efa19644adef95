// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qod/cli.hpp"
#include "qod/cost_model.hpp"
#include "qod/knapsack.hpp"
#include "qod/optics.hpp"
#include "qod/simulator.hpp"

namespace {

using namespace qod;
using Ints = std::vector<std::int64_t>;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Ints random_ints(std::mt19937_64& rng, std::size_t n, std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> d(lo, hi);
  Ints v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

KnapsackInstance random_instance(std::mt19937_64& rng, Variant variant, std::size_t max_n,
                                 std::int64_t max_value) {
  std::uniform_int_distribution<std::size_t> size(0, max_n);
  const auto n = size(rng);
  const Ints c = random_ints(rng, n, 0, max_value);
  std::int64_t total = 0;
  for (const auto x : c) total += x;
  std::uniform_int_distribution<std::int64_t> pick(0, total + 2);
  switch (variant) {
    case Variant::ExactSum:
      return KnapsackInstance::exact_sum(c, pick(rng));
    case Variant::IntervalSum: {
      const auto lo = pick(rng);
      std::uniform_int_distribution<std::int64_t> gap(1, 10);
      return KnapsackInstance::interval_sum(c, lo, lo + gap(rng));
    }
    case Variant::Optimization:
      return KnapsackInstance::optimization(c, random_ints(rng, n, 0, max_value), pick(rng) + 1);
  }
  return {};
}

// Ideal device: auto-sized for the instance, zero jitter.
DeviceParameters ideal_device(const KnapsackInstance& inst) {
  return parse_device("", device_context_for(inst));
}

constexpr Variant kVariants[] = {Variant::ExactSum, Variant::IntervalSum, Variant::Optimization};

Verdict oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  int trials = 0;
  for (const auto v : kVariants) {
    for (int i = 0; i < 1000; ++i, ++trials) {
      const auto inst = random_instance(rng, v, 15, 50);
      if (!(solve(inst) == exhaustive_oracle(inst))) {
        return {false, "mismatch on " + emit_instance(inst)};
      }
    }
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << trials << " instances, " << t << " s";
  return {t < 60.0, d.str()};
}

Verdict optical_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(4048);
  int trials = 0;
  for (const auto v : kVariants) {
    for (int i = 0; i < 500; ++i, ++trials) {
      const auto inst = random_instance(rng, v, 12, 50);
      const auto expected = solve(inst);
      const auto got = simulate(inst, ideal_device(inst), static_cast<std::uint64_t>(i));
      if (got.decision != expected.decision || got.measured_optimum != expected.optimum) {
        return {false, "mismatch on " + emit_instance(inst)};
      }
    }
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << trials << " instances, " << t << " s";
  return {t < 300.0, d.str()};
}

// Exact optimum by enumeration, kept separate from the library's solvers.
std::int64_t brute_force_optimum(const KnapsackInstance& inst) {
  std::int64_t best = 0;
  const auto n = inst.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::int64_t c = 0, w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) {
        c += inst.c[i];
        w += inst.w[i];
      }
    }
    if (c < *inst.bound_hi) best = std::max(best, w);
  }
  return best;
}

Verdict truncation_bound() {
  std::mt19937_64 rng(99);
  int checked = 0, truncated = 0;
  double worst = 0;
  for (const double eps : {0.1, 0.25, 0.5}) {
    int done = 0;
    while (done < 500) {
      std::uniform_int_distribution<std::size_t> size(1, 12);
      const auto n = size(rng);
      const auto c = random_ints(rng, n, 0, 50);
      const auto w = random_ints(rng, n, 1, 10000);
      std::uniform_int_distribution<std::int64_t> budget(1, 300);
      const auto inst = KnapsackInstance::optimization(c, w, budget(rng));
      const auto opt = brute_force_optimum(inst);
      if (opt == 0) continue;
      const auto approx = solve_variant3_approx(inst, eps);
      if (!witness_is_sound(inst, approx)) return {false, "unsound witness"};
      const double loss = static_cast<double>(opt - *approx.optimum) / static_cast<double>(opt);
      worst = std::max(worst, loss / eps);
      if (!(loss < eps)) return {false, "bound violated on " + emit_instance(inst)};
      truncated += approx.truncation_bits > 0;
      ++done;
      ++checked;
    }
  }
  std::ostringstream d;
  d << checked << " instances, " << truncated << " with dropped bits, worst loss/eps "
    << worst;
  return {true, d.str()};
}

Verdict worked_geometry() {
  DeviceParameters dev;
  dev.lambda = 5e-7;
  dev.d_b = 2e-3;
  dev.L = 10.0 / 30;
  dev.n_gates = 30;
  dev.R_M = 10;
  dev.kappa = 5e-3;
  const auto r = feasibility_check(dev, 200);
  const bool alpha_ok = std::abs(r.alpha - 3.0e-4) <= 1e-5;
  const bool kappa_ok = r.kappa_min_nominal == 2 * dev.d_b && dev.kappa >= r.kappa_min_nominal;
  const bool bound_ok = r.bound_ratio == dev.R_M / dev.kappa && r.B_plus_max == 1999;
  bool note_ok = false;
  for (const auto& n : r.notes) note_ok = note_ok || n.find("2e2") != std::string::npos;
  std::ostringstream d;
  d << "alpha=" << r.alpha << " kappa_min_nominal=" << r.kappa_min_nominal
    << " kappa_min=" << r.kappa_min << " R_M/kappa=" << r.bound_ratio
    << " B_plus_max=" << r.B_plus_max << " note=" << (note_ok ? "yes" : "no");
  return {alpha_ok && kappa_ok && bound_ok && note_ok, d.str()};
}

Verdict timing() {
  const CostAssumptions a;
  const double det = deterministic_time(30, 200, a);
  const double q = qod_time(30, 10.0 / 30, 10.0, a, 1);
  std::ostringstream d;
  d << "deterministic=" << det << " s, optical=" << q << " s";
  return {det >= 3e-7 && det <= 2e-6 && q >= 1e-7 && q <= 2e-6, d.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("qod_acceptance_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

std::string report_field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

Verdict acceleration() {
  std::mt19937_64 rng(30);
  const auto c = random_ints(rng, 30, 1, 6);
  const auto w = random_ints(rng, 30, 1, 40);
  RunConfig config;
  config.command = Command::Compare;
  config.format = OutputFormat::Structured;
  config.instance_paths = {
      write_temp("instance.txt", emit_instance(KnapsackInstance::optimization(c, w, 60)))};
  config.device_path = write_temp(
      "device.txt", "lambda=5e-7\nd_b=2e-3\nL=0.3333333333333333\nn_gates=30\nR_M=10\nkappa=5e-3\n");
  std::ostringstream out, err;
  const int code = run(config, out, err);
  if (code != kExitOk) return {false, "compare failed: " + err.str()};
  const auto report = out.str();
  const auto ratio_text = report_field(report, "time_ratio");
  const double ratio = ratio_text.empty() ? 0.0 : std::stod(ratio_text);
  std::ostringstream d;
  d << "epsilon=" << report_field(report, "epsilon")
    << " deterministic=" << report_field(report, "deterministic_time_total")
    << " s optical=" << report_field(report, "qod_time_total") << " s ratio=" << ratio
    << " answers_agree=" << report_field(report, "answers_agree");
  return {ratio >= 1e5 && ratio <= 1e7, d.str()};
}

// Compact re-check of the cross-module invariants.
Verdict invariants() {
  std::vector<std::string> failed;
  auto check = [&](const char* name, bool ok) {
    if (!ok) failed.emplace_back(name);
  };
  std::mt19937_64 rng(7);

  bool saturation = true, beam_count = true;
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, Variant::ExactSum, 12, 20);
    auto dev = ideal_device(inst);
    if (trial % 2) dev.phase_jitter = 1.0;
    const auto stages = dp_reachable_sums_by_stage(inst.c, max_representable_sum(dev));
    std::size_t j = 0;
    std::mt19937_64 local(trial);
    propagate(inst, dev, local, kDefaultMaxBeams, [&](const BeamEnsemble& ens) {
      for (const auto& [key, beam] : ens.beams) {
        saturation = saturation && beam.intensity() <= dev.I_sat * (1 + 1e-12);
      }
      beam_count = beam_count && ens.beams.size() == stages[j].size();
      ++j;
    });
  }
  check("saturation bound", saturation);
  check("beam count", beam_count);

  bool monotone = true;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    DeviceParameters dev;
    dev.lambda = 5e-7;
    dev.d_b = 1e-3 + 3e-3 * unit(rng);
    dev.L = 0.05 + unit(rng);
    dev.n_gates = 1 + static_cast<int>(40 * unit(rng));
    dev.kappa = 1e-3 + 1e-2 * unit(rng);
    dev.R_M = 0.05 + 5 * unit(rng);
    const auto max_sum = static_cast<std::int64_t>(1000 * unit(rng));
    const auto before = feasibility_check(dev, max_sum);
    auto wider = dev;
    wider.R_M *= 1 + 2 * unit(rng);
    for (const auto v : feasibility_check(wider, max_sum).violations) {
      monotone = monotone && std::find(before.violations.begin(), before.violations.end(), v) !=
                                 before.violations.end();
    }
    auto narrow = dev;
    narrow.kappa = before.d_final * 0.9;
    const auto nv = feasibility_check(narrow, max_sum).violations;
    monotone = monotone &&
               std::find(nv.begin(), nv.end(), Constraint::BeamSeparation) != nv.end();
  }
  check("monotone feasibility", monotone);

  // Linear up to floating-point rounding of the final product.
  const auto same = [](double x, double y) {
    return std::abs(x - y) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(y);
  };
  bool linear = true;
  for (std::int64_t m = 0; m < 200; m += 7) {
    CostAssumptions a, one;
    a.M = m;
    linear = linear && same(deterministic_time(30, 200, a), m * deterministic_time(30, 200, one));
    linear = linear && same(qod_time(30, 0.3, 10, a, m), m * qod_time(30, 0.3, 10, a, 1));
  }
  check("linearity in M", linear);

  bool round_trip = true;
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng, kVariants[trial % 3], 20, 1000);
    round_trip = round_trip && parse_instance(emit_instance(inst)) == inst;
  }
  check("round-trip parsing", round_trip);

  bool deterministic = true;
  {
    RunConfig config;
    config.command = Command::Simulate;
    config.format = OutputFormat::Structured;
    config.seed = 11;
    config.instance_paths = {write_temp(
        "det.txt", emit_instance(KnapsackInstance::optimization({4, 1, 7, 3}, {2, 8, 4, 6}, 9)))};
    std::ostringstream a, b, e;
    deterministic = run(config, a, e) == kExitOk && run(config, b, e) == kExitOk &&
                    a.str() == b.str();
  }
  check("determinism", deterministic);

  if (failed.empty()) {
    return {true, "saturation bound, beam count, monotone feasibility, linearity in M, "
                  "round-trip parsing, determinism"};
  }
  std::string d = "failed:";
  for (const auto& f : failed) d += " " + f;
  return {false, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 oracle equivalence", oracle_equivalence},
      {"2 optical-DP equivalence", optical_equivalence},
      {"3 truncation bound", truncation_bound},
      {"4 worked geometry", worked_geometry},
      {"5 timing reproduction", timing},
      {"6 acceleration ratio", acceleration},
      {"7 invariant suite", invariants},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s AC%s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
