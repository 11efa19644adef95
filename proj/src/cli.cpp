#include "qod/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

#include "qod/cost_model.hpp"
#include "qod/simulator.hpp"

namespace qod {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Calls fn(line_number, content) for each non-blank line with comments removed.
template <typename Fn>
void for_each_line(std::string_view source, Fn&& fn) {
  int number = 0;
  while (!source.empty()) {
    const auto eol = source.find('\n');
    std::string_view line = source.substr(0, eol);
    source = eol == std::string_view::npos ? std::string_view{} : source.substr(eol + 1);
    ++number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (!line.empty()) fn(number, line);
  }
}

std::int64_t parse_integer(std::string_view token, int line) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(line, "integer out of range: " + std::string(token));
  }
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, "not an integer: " + std::string(token));
  }
  if (value < 0) throw ParseError(line, "negative integer: " + std::string(token));
  return value;
}

double parse_real(std::string_view token, int line) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ParseError(line, "not a number: " + std::string(token));
  }
  return value;
}

template <typename T>
std::string join_sizes(const std::vector<T>& v) {
  std::string out;
  for (const auto x : v) {
    if (!out.empty()) out += ' ';
    out += std::to_string(x);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

constexpr std::array<std::string_view, 11> kDeviceKeys = {
    "lambda", "d_b", "L", "n_gates", "R_M", "kappa",
    "delta_p", "T_atom", "gain", "I_sat", "phase_jitter"};
constexpr std::array<std::string_view, 6> kGeometryKeys = {
    "lambda", "d_b", "L", "n_gates", "R_M", "kappa"};

void set_device_field(DeviceParameters& dev, std::string_view key, double v) {
  if (key == "lambda") dev.lambda = v;
  else if (key == "d_b") dev.d_b = v;
  else if (key == "L") dev.L = v;
  else if (key == "n_gates") dev.n_gates = static_cast<int>(v);
  else if (key == "R_M") dev.R_M = v;
  else if (key == "kappa") dev.kappa = v;
  else if (key == "delta_p") dev.delta_p = v;
  else if (key == "T_atom") dev.T_atom = v;
  else if (key == "gain") dev.gain = v;
  else if (key == "I_sat") dev.I_sat = v;
  else if (key == "phase_jitter") dev.phase_jitter = v;
}

void add_device(Report& r, const DeviceParameters& dev) {
  r.add("device_lambda", dev.lambda);
  r.add("device_d_b", dev.d_b);
  r.add("device_L", dev.L);
  r.add("device_n_gates", static_cast<std::int64_t>(dev.n_gates));
  r.add("device_R_M", dev.R_M);
  r.add("device_kappa", dev.kappa);
  r.add("device_delta_p", dev.delta_p);
  r.add("device_T_atom", dev.T_atom);
  r.add("device_gain", dev.gain);
  r.add("device_I_sat", dev.I_sat);
  r.add("device_phase_jitter", dev.phase_jitter);
}

void add_header(Report& r, const RunConfig& config, const std::string& path,
                const KnapsackInstance* inst) {
  r.add("command", std::string(to_string(config.command)));
  r.add("tool_version", std::string(kToolVersion));
  if (!path.empty()) r.add("instance", path);
  if (inst) {
    r.add("variant", static_cast<std::int64_t>(inst->variant));
    r.add("n", static_cast<std::int64_t>(inst->size()));
  }
}

void add_solve(Report& r, const SolveResult& s, std::string_view prefix = "") {
  const std::string p(prefix);
  if (s.decision) r.add(p + "decision", std::string(*s.decision ? "YES" : "NO"));
  if (s.optimum) r.add(p + "optimum", *s.optimum);
  if (s.witness) r.add(p + "witness", join_sizes(*s.witness));
  r.add(p + "truncation_bits", static_cast<std::int64_t>(s.truncation_bits));
}

void add_simulation(Report& r, const SimulationResult& s, std::string_view prefix = "") {
  const std::string p(prefix);
  if (s.decision) r.add(p + "decision", std::string(*s.decision ? "YES" : "NO"));
  if (s.variant == Variant::Optimization) {
    r.add(p + "measured_optimum",
          s.measured_optimum ? std::to_string(*s.measured_optimum) : std::string("none"));
    r.add(p + "window_z_budget", s.window.z_budget);
  }
  r.add(p + "window_y_min", s.window.y_min);
  r.add(p + "window_y_max", s.window.y_max);
  r.add(p + "detected_count", static_cast<std::int64_t>(s.detected_offsets.size()));
  std::string offsets;
  for (const auto& o : s.detected_offsets) {
    if (!offsets.empty()) offsets += ' ';
    offsets += format_number(o.z);
    if (s.variant == Variant::Optimization) offsets += ':' + format_number(o.y);
  }
  r.add(p + "detected_offsets", offsets);
  r.add(p + "beam_count_history", join_sizes(s.beam_count_history));
  r.add(p + "clipped_beams", static_cast<std::int64_t>(s.clipped_beams));
  r.add(p + "warnings_count", static_cast<std::int64_t>(s.warnings.size()));
  for (std::size_t i = 0; i < s.warnings.size(); ++i) {
    r.add(p + "warning_" + std::to_string(i), s.warnings[i]);
  }
}

void add_geometry(Report& r, const GeometryReport& g) {
  r.add("alpha", g.alpha);
  r.add("d_final", g.d_final);
  r.add("kappa_min", g.kappa_min);
  r.add("kappa_min_nominal", g.kappa_min_nominal);
  r.add("R_M_min", g.R_M_min);
  r.add("bound_ratio", g.bound_ratio);
  r.add("B_plus_max", g.B_plus_max);
  r.add("feasible", g.feasible);
  std::string v;
  for (const auto c : g.violations) {
    if (!v.empty()) v += ' ';
    v += to_string(c);
  }
  r.add("violations", v);
  for (std::size_t i = 0; i < g.notes.size(); ++i) {
    r.add("note_" + std::to_string(i), g.notes[i]);
  }
}

void add_cost(Report& r, const CostReport& c) {
  const std::string p = std::string(to_string(c.machine)) + "_";
  r.add(p + "approximate", c.approximate);
  r.add(p + "inputs", c.inputs);
  r.add(p + "CI", c.CI);
  r.add(p + "CE", c.CE);
  r.add(p + "CE_per_input", c.CE_per_input);
  r.add(p + "time_total", c.time_total);
  r.add(p + "time_per_input", c.time_per_input);
  r.add(p + "time_preprocessing", c.time_preprocessing);
  for (const auto& t : c.formula_trace) {
    std::string inputs;
    for (const auto& [name, value] : t.inputs) {
      if (!inputs.empty()) inputs += ' ';
      inputs += name + ':' + format_number(value);
    }
    r.add(p + "trace_" + t.quantity,
          t.formula + " [" + inputs + "] = " + format_number(t.value));
  }
}

void add_comparison(Report& r, const Comparison& c) {
  r.add("time_ratio", c.time_ratio);
  r.add("energy_ratio", c.energy_ratio);
  r.add("crossover_inputs", c.crossover_inputs ? std::to_string(*c.crossover_inputs)
                                               : std::string("none"));
  r.add("energy_time_qod", c.energy_time_qod);
  r.add("energy_time_det", c.energy_time_det);
}

std::int64_t cost_scale(const KnapsackInstance& inst) {
  return required_span(inst);
}

struct Outcome {
  Report report;
  bool warned = false;
};

DeviceParameters load_device(const RunConfig& config, const KnapsackInstance* inst) {
  const std::string text = config.device_path ? read_file(*config.device_path) : std::string();
  std::optional<DeviceContext> ctx;
  if (inst) ctx = device_context_for(*inst);
  return parse_device(text, ctx);
}

void dump_stages(const std::string& path, const std::vector<BeamEnsemble>& stages) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# stage z_units y_units intensity width phase\n";
  for (const auto& ens : stages) {
    for (const auto& [key, beam] : ens.beams) {
      out << ens.stage << ' ' << key.z << ' ' << key.y << ' '
          << format_number(beam.intensity()) << ' ' << format_number(beam.width)
          << ' ' << format_number(beam.phase) << '\n';
    }
  }
}

Outcome run_solve(const RunConfig& config, const std::string& path,
                  const KnapsackInstance& inst) {
  Outcome o;
  add_header(o.report, config, path, &inst);
  const Method method = config.method.value_or(Method::Dp);
  o.report.add("method", std::string(to_string(method)));
  SolveResult result;
  switch (method) {
    case Method::Dp:
      result = solve(inst);
      break;
    case Method::Exhaustive:
      result = exhaustive_oracle(inst);
      break;
    case Method::Truncated:
      if (!config.epsilon) throw std::invalid_argument("method truncated needs --epsilon");
      result = solve_variant3_approx(inst, *config.epsilon);
      o.report.add("epsilon", *config.epsilon);
      break;
    case Method::Qod:
      throw std::invalid_argument("method qod is only valid for simulate and compare");
  }
  add_solve(o.report, result);
  return o;
}

Outcome run_simulate(const RunConfig& config, const std::string& path,
                     const KnapsackInstance& inst, std::uint64_t seed,
                     const std::optional<std::string>& dump_path) {
  Outcome o;
  add_header(o.report, config, path, &inst);
  o.report.add("method", std::string(to_string(Method::Qod)));
  o.report.add("seed", std::to_string(seed));
  const auto dev = load_device(config, &inst);
  add_device(o.report, dev);
  SimulationOptions options;
  std::vector<BeamEnsemble> stages;
  if (dump_path) {
    options.observer = [&](const BeamEnsemble& ens) { stages.push_back(ens); };
  }
  const auto result = simulate(inst, dev, seed, options);
  if (dump_path) dump_stages(*dump_path, stages);
  add_simulation(o.report, result);
  o.warned = !result.warnings.empty();
  return o;
}

Outcome run_feasibility(const RunConfig& config, const std::string& path,
                        const KnapsackInstance* inst) {
  Outcome o;
  add_header(o.report, config, path, inst);
  const auto dev = load_device(config, inst);
  const std::int64_t span = inst ? required_span(*inst) : 0;
  add_device(o.report, dev);
  o.report.add("max_sum", span);
  const auto geometry = feasibility_check(dev, span);
  add_geometry(o.report, geometry);
  o.warned = !geometry.feasible;
  return o;
}

std::optional<DeviceTiming> timing_of(const DeviceParameters& dev) {
  return DeviceTiming{.L = dev.L, .R_M = dev.R_M};
}

Outcome run_cost(const RunConfig& config, const std::string& path,
                 const KnapsackInstance& inst) {
  Outcome o;
  add_header(o.report, config, path, &inst);
  CostAssumptions assum;
  assum.M = config.inputs;
  // Without a device file the sized device only supplies delta_p and kappa;
  // physical timing is reported only for a user-supplied device.
  const auto dev = load_device(config, &inst);
  std::optional<DeviceTiming> timing;
  if (config.device_path) timing = timing_of(dev);
  if (config.epsilon) o.report.add("epsilon", *config.epsilon);
  const auto reports = cost_report(inst.variant, static_cast<int>(inst.size()),
                                   cost_scale(inst), config.inputs, assum,
                                   config.epsilon, dev.delta_p, dev.kappa, timing);
  o.report.add("K", cost_scale(inst));
  add_cost(o.report, reports.qod);
  add_cost(o.report, reports.deterministic);
  add_comparison(o.report, compare(reports.qod, reports.deterministic));
  return o;
}

Outcome run_compare(const RunConfig& config, const std::string& path,
                    const KnapsackInstance& inst, std::uint64_t seed) {
  Outcome o;
  add_header(o.report, config, path, &inst);
  o.report.add("seed", std::to_string(seed));
  const auto dev = load_device(config, &inst);
  add_device(o.report, dev);

  const auto exact = solve(inst);
  add_solve(o.report, exact, "dp_");
  const auto sim = simulate(inst, dev, seed);
  add_simulation(o.report, sim, "qod_");
  const bool agree = inst.variant == Variant::Optimization
                         ? sim.measured_optimum == exact.optimum
                         : sim.decision == exact.decision;
  o.report.add("answers_agree", agree);

  std::optional<double> eps = config.epsilon;
  if (!eps && inst.variant == Variant::Optimization) {
    // Relative precision of the optical readout: half a lattice step over
    // the mirror extent.
    eps = (dev.kappa / 2.0) / dev.R_M;
  }
  if (eps) o.report.add("epsilon", *eps);
  CostAssumptions assum;
  assum.M = config.inputs;
  const auto reports = cost_report(inst.variant, static_cast<int>(inst.size()),
                                   cost_scale(inst), config.inputs, assum, eps,
                                   dev.delta_p, dev.kappa, timing_of(dev));
  o.report.add("K", cost_scale(inst));
  add_cost(o.report, reports.qod);
  add_cost(o.report, reports.deterministic);
  add_comparison(o.report, compare(reports.qod, reports.deterministic));
  o.warned = !sim.warnings.empty() || !agree;
  return o;
}

}  // namespace

KnapsackInstance parse_instance(std::string_view source) {
  std::map<std::string, std::pair<int, std::vector<std::int64_t>>> seen;
  for_each_line(source, [&](int line, std::string_view content) {
    const auto words = split_words(content);
    const std::string key(words.front());
    static const std::map<std::string, int, std::less<>> arity = {
        {"variant", 1}, {"c", -1}, {"target", 1}, {"bounds", 2}, {"w", -1}, {"budget", 1}};
    const auto it = arity.find(key);
    if (it == arity.end()) throw ParseError(line, "unknown key '" + key + "'");
    if (seen.contains(key)) throw ParseError(line, "duplicate key '" + key + "'");
    const auto count = static_cast<int>(words.size()) - 1;
    if (it->second >= 0 && count != it->second) {
      throw ParseError(line, "key '" + key + "' takes " + std::to_string(it->second) +
                                 " value(s), got " + std::to_string(count));
    }
    std::vector<std::int64_t> values;
    for (std::size_t i = 1; i < words.size(); ++i) {
      values.push_back(parse_integer(words[i], line));
    }
    seen.emplace(key, std::make_pair(line, std::move(values)));
  });

  if (!seen.contains("variant")) throw ParseError(0, "missing key 'variant'");
  const auto [variant_line, variant_values] = seen.at("variant");
  const auto tag = variant_values.front();
  if (tag < 1 || tag > 3) throw ParseError(variant_line, "variant must be 1, 2 or 3");
  if (!seen.contains("c")) throw ParseError(0, "missing key 'c'");

  const auto variant = static_cast<Variant>(tag);
  const std::map<Variant, std::vector<std::string>> required = {
      {Variant::ExactSum, {"target"}},
      {Variant::IntervalSum, {"bounds"}},
      {Variant::Optimization, {"w", "budget"}}};
  for (const auto& key : required.at(variant)) {
    if (!seen.contains(key)) {
      throw ParseError(0, "missing key '" + key + "' for variant " + std::to_string(tag));
    }
  }
  for (const auto& [key, entry] : seen) {
    if (key == "variant" || key == "c") continue;
    const auto& allowed = required.at(variant);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(entry.first, "key '" + key + "' not valid for variant " +
                                        std::to_string(tag));
    }
  }

  KnapsackInstance inst;
  inst.variant = variant;
  inst.c = seen.at("c").second;
  switch (variant) {
    case Variant::ExactSum:
      inst.target = seen.at("target").second[0];
      break;
    case Variant::IntervalSum:
      inst.bound_lo = seen.at("bounds").second[0];
      inst.bound_hi = seen.at("bounds").second[1];
      break;
    case Variant::Optimization:
      inst.w = seen.at("w").second;
      inst.bound_hi = seen.at("budget").second[0];
      break;
  }
  try {
    validate(inst);
  } catch (const std::exception& e) {
    throw ParseError(0, e.what());
  }
  return inst;
}

std::string emit_instance(const KnapsackInstance& inst) {
  std::string out = "variant " + std::to_string(static_cast<int>(inst.variant)) + "\n";
  out += "c";
  for (const auto v : inst.c) out += " " + std::to_string(v);
  out += "\n";
  switch (inst.variant) {
    case Variant::ExactSum:
      out += "target " + std::to_string(*inst.target) + "\n";
      break;
    case Variant::IntervalSum:
      out += "bounds " + std::to_string(*inst.bound_lo) + " " +
             std::to_string(*inst.bound_hi) + "\n";
      break;
    case Variant::Optimization:
      out += "w";
      for (const auto v : inst.w) out += " " + std::to_string(v);
      out += "\nbudget " + std::to_string(*inst.bound_hi) + "\n";
      break;
  }
  return out;
}

DeviceContext device_context_for(const KnapsackInstance& inst) {
  DeviceContext ctx;
  ctx.n = std::max<int>(1, static_cast<int>(inst.size()));
  ctx.max_sum = required_span(inst);
  return ctx;
}

DeviceParameters parse_device(std::string_view source,
                              const std::optional<DeviceContext>& context) {
  std::map<std::string, double, std::less<>> given;
  for_each_line(source, [&](int line, std::string_view content) {
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, "expected key=value");
    const std::string key(trim(content.substr(0, eq)));
    const auto value_text = trim(content.substr(eq + 1));
    if (std::find(kDeviceKeys.begin(), kDeviceKeys.end(), key) == kDeviceKeys.end()) {
      throw ParseError(line, "unknown key '" + key + "'");
    }
    if (given.contains(key)) throw ParseError(line, "duplicate key '" + key + "'");
    double value = 0;
    if (key == "n_gates") {
      value = static_cast<double>(parse_integer(value_text, line));
      if (value > 1e9) throw ParseError(line, "n_gates too large");
    } else {
      value = parse_real(value_text, line);
    }
    const bool ok = key == "phase_jitter" ? value >= 0.0
                    : key == "gain"       ? value >= 1.0
                                          : value > 0.0;
    if (!ok) {
      throw ParseError(line, "invalid value for '" + key + "': " + std::string(value_text));
    }
    given.emplace(key, value);
  });

  DeviceParameters dev;
  const bool complete = std::all_of(kGeometryKeys.begin(), kGeometryKeys.end(),
                                    [&](auto k) { return given.contains(k); });
  if (!complete) {
    if (!context) {
      for (const auto k : kGeometryKeys) {
        if (!given.contains(k)) throw ParseError(0, "missing key '" + std::string(k) + "'");
      }
    }
    const int n = given.contains("n_gates") ? static_cast<int>(given.at("n_gates"))
                                            : context->n;
    const double lambda = given.contains("lambda") ? given.at("lambda") : context->lambda;
    const double L = given.contains("L") ? given.at("L") : context->total_length / n;
    dev = size_device(n, context->max_sum, lambda, L);
  }
  for (const auto& [key, value] : given) set_device_field(dev, key, value);
  validate(dev);
  return dev;
}

std::string emit_device(const DeviceParameters& dev) {
  std::string out;
  auto line = [&](const char* key, const std::string& v) {
    out += key;
    out += '=';
    out += v;
    out += '\n';
  };
  line("lambda", format_number(dev.lambda));
  line("d_b", format_number(dev.d_b));
  line("L", format_number(dev.L));
  line("n_gates", std::to_string(dev.n_gates));
  line("R_M", format_number(dev.R_M));
  line("kappa", format_number(dev.kappa));
  line("delta_p", format_number(dev.delta_p));
  line("T_atom", format_number(dev.T_atom));
  line("gain", format_number(dev.gain));
  line("I_sat", format_number(dev.I_sat));
  line("phase_jitter", format_number(dev.phase_jitter));
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::optional<Command> parse_command(std::string_view s) {
  if (s == "solve") return Command::Solve;
  if (s == "simulate") return Command::Simulate;
  if (s == "feasibility") return Command::Feasibility;
  if (s == "cost") return Command::Cost;
  if (s == "compare") return Command::Compare;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "dp") return Method::Dp;
  if (s == "exhaustive") return Method::Exhaustive;
  if (s == "truncated") return Method::Truncated;
  if (s == "qod") return Method::Qod;
  return std::nullopt;
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Simulate: return "simulate";
    case Command::Feasibility: return "feasibility";
    case Command::Cost: return "cost";
    case Command::Compare: return "compare";
  }
  return "unknown";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Dp: return "dp";
    case Method::Exhaustive: return "exhaustive";
    case Method::Truncated: return "truncated";
    case Method::Qod: return "qod";
  }
  return "unknown";
}

void validate(const RunConfig& config) {
  const auto cmd = config.command;
  if (config.method) {
    const auto m = *config.method;
    if (m == Method::Qod && cmd != Command::Simulate && cmd != Command::Compare) {
      throw std::invalid_argument("method qod requires simulate or compare");
    }
    if (cmd == Command::Simulate && m != Method::Qod) {
      throw std::invalid_argument("simulate only supports method qod");
    }
    if (cmd == Command::Solve && m == Method::Qod) {
      throw std::invalid_argument("solve does not support method qod");
    }
  }
  if (config.epsilon) {
    const bool truncated = config.method == Method::Truncated;
    if (!truncated && cmd != Command::Cost && cmd != Command::Compare) {
      throw std::invalid_argument("--epsilon needs method truncated, cost or compare");
    }
    if (!(*config.epsilon > 0.0 && *config.epsilon < 1.0)) {
      throw std::invalid_argument("--epsilon must lie in (0, 1)");
    }
  }
  if (config.method == Method::Truncated && !config.epsilon) {
    throw std::invalid_argument("method truncated needs --epsilon");
  }
  if (config.instance_paths.empty() && cmd != Command::Feasibility) {
    throw std::invalid_argument(std::string(to_string(cmd)) + " needs --instance");
  }
  if (cmd == Command::Feasibility && config.instance_paths.empty() && !config.device_path) {
    throw std::invalid_argument("feasibility needs --instance or --device");
  }
  if (config.inputs < 0) throw std::invalid_argument("--inputs must be non-negative");
}

void Report::add(std::string key, std::string value) {
  // Values are single-line by construction of the format.
  std::replace(value.begin(), value.end(), '\n', ' ');
  fields_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> Report::find(std::string_view key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Report::render(OutputFormat format) const {
  std::string out;
  std::size_t width = 0;
  for (const auto& [k, v] : fields_) width = std::max(width, k.size());
  for (const auto& [k, v] : fields_) {
    out += k;
    if (format == OutputFormat::Structured) {
      out += '=';
    } else {
      out += ':';
      out.append(width - k.size() + 1, ' ');
    }
    out += v;
    out += '\n';
  }
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    std::vector<std::string> paths = config.instance_paths;
    std::vector<std::optional<KnapsackInstance>> instances;
    for (const auto& path : paths) {
      try {
        instances.emplace_back(parse_instance(read_file(path)));
      } catch (const ParseError& e) {
        throw std::invalid_argument(path + ": " + e.what());
      }
    }
    if (paths.empty()) {
      paths.emplace_back();
      instances.emplace_back();
    }

    const bool batch = paths.size() > 1;
    auto dump_for = [&](std::size_t i) -> std::optional<std::string> {
      if (!config.dump_stages) return std::nullopt;
      return batch ? *config.dump_stages + "." + std::to_string(i) : *config.dump_stages;
    };
    auto one = [&](std::size_t i) -> Outcome {
      const auto& path = paths[i];
      const KnapsackInstance* inst = instances[i] ? &*instances[i] : nullptr;
      const std::uint64_t seed = config.seed + i;
      switch (config.command) {
        case Command::Solve:
          return run_solve(config, path, *inst);
        case Command::Simulate:
          return run_simulate(config, path, *inst, seed, dump_for(i));
        case Command::Feasibility:
          return run_feasibility(config, path, inst);
        case Command::Cost:
          return run_cost(config, path, *inst);
        case Command::Compare:
          return run_compare(config, path, *inst, seed);
      }
      throw std::logic_error("unhandled command");
    };

    std::vector<Outcome> outcomes;
    if (batch && config.command == Command::Simulate) {
      std::vector<std::future<Outcome>> jobs;
      for (std::size_t i = 0; i < paths.size(); ++i) {
        jobs.push_back(std::async(std::launch::async, one, i));
      }
      for (auto& job : jobs) outcomes.push_back(job.get());
    } else {
      for (std::size_t i = 0; i < paths.size(); ++i) outcomes.push_back(one(i));
    }

    bool warned = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (batch) {
        if (i > 0) out << '\n';
        out << (config.format == OutputFormat::Structured ? "record=" : "record: ") << i
            << '\n';
      }
      out << outcomes[i].report.render(config.format);
      warned = warned || outcomes[i].warned;
    }
    return config.strict && warned ? kExitWarnings : kExitOk;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << '\n';
    return kExitError;
  }
}

}  // namespace qod
