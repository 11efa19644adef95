#include "qod/cost_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qod {
namespace {

using Inputs = std::vector<std::pair<std::string, double>>;

double lookup(const Inputs& inputs, const char* name) {
  for (const auto& [key, value] : inputs) {
    if (key == name) return value;
  }
  throw std::invalid_argument(std::string("formula input missing: ") + name);
}

double ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

class ReportBuilder {
 public:
  explicit ReportBuilder(CostReport& report) : report_(report) {}

  double add(const char* quantity, const char* id, Inputs inputs) {
    const double value = evaluate_formula(id, inputs);
    report_.formula_trace.push_back(
        FormulaTrace{quantity, id, std::move(inputs), value});
    return value;
  }

 private:
  CostReport& report_;
};

// Same formula with M = 1; all running costs are linear in M.
double per_input(const char* id, Inputs inputs) {
  for (auto& [key, value] : inputs) {
    if (key == "M") value = 1.0;
  }
  return evaluate_formula(id, inputs);
}

}  // namespace

double CostAssumptions::constant(const std::string& formula) const {
  const auto it = big_o.find(formula);
  return it == big_o.end() ? 1.0 : it->second;
}

void validate(const CostAssumptions& a) {
  for (const double v : {a.V, a.C1, a.C2, a.c_light, a.unit_energy}) {
    if (!(v > 0.0)) throw std::invalid_argument("cost constants must be positive");
  }
  if (!(a.T_atom >= 0.0)) throw std::invalid_argument("T_atom must be non-negative");
  if (a.M < 0) throw std::invalid_argument("M must be non-negative");
  for (const auto& [id, k] : a.big_o) {
    if (!(k > 0.0)) throw std::invalid_argument("big-O constant for " + id + " must be positive");
  }
}

double evaluate_formula(const std::string& id, const Inputs& in) {
  namespace f = formula;
  auto v = [&](const char* name) { return lookup(in, name); };
  auto kappa_units = [&] { return v("delta_p") / (v("epsilon") * v("kappa")); };
  if (id == f::kQodImplLinear) return v("k") * v("K") * v("n");
  if (id == f::kQodImplArea) return v("k") * v("K") * v("K") * v("n");
  if (id == f::kQodImplApprox) {
    const double ke = kappa_units();
    return v("k") * ke * ke * v("n");
  }
  if (id == f::kQodEnergyLinear) {
    return v("k") * v("K") * v("n") * (v("n") + v("K")) * v("M") * v("unit_energy");
  }
  if (id == f::kQodEnergyArea) {
    return v("k") * v("K") * v("K") * v("n") * (v("n") + v("K")) * v("M") *
           v("unit_energy");
  }
  if (id == f::kQodEnergyApprox) {
    const double ke = kappa_units();
    return v("k") * ke * ke * v("n") * (v("n") + ke) * v("M") * v("unit_energy");
  }
  if (id == f::kQodTimeFlight) return v("k") * v("C1") * (v("n") + v("K")) * v("M");
  if (id == f::kQodTimeApprox) {
    return v("k") * v("C1") * (v("n") + kappa_units()) * v("M");
  }
  if (id == f::kQodTimeDevice) {
    return v("M") * ((v("n") * v("L") + v("R_M")) / v("c_light") +
                     v("n") * v("T_atom"));
  }
  if (id == f::kQodPre) return v("k") * v("C2") * v("CI");
  if (id == f::kDetEnergy) return v("k") * v("K") * v("n") * v("M") * v("unit_energy");
  if (id == f::kDetTime) return v("k") * v("K") * v("n") * v("M") / v("V");
  if (id == f::kDetEnergyApprox) {
    const double n = v("n");
    return v("k") * n * n * n * n * v("M") * v("unit_energy") / v("epsilon");
  }
  if (id == f::kDetTimeApprox) {
    const double n = v("n");
    return v("k") * v("M") * n * n * n * n / (v("epsilon") * v("V"));
  }
  throw std::invalid_argument("unknown formula id: " + id);
}

std::string_view to_string(Machine m) {
  return m == Machine::Qod ? "qod" : "deterministic";
}

double deterministic_time(int n, std::int64_t bound, const CostAssumptions& assum) {
  validate(assum);
  if (n < 0 || bound < 0) throw std::invalid_argument("negative size");
  return static_cast<double>(assum.M) * n * static_cast<double>(bound) / assum.V;
}

double qod_time(int n, double L, double R_M, const CostAssumptions& assum,
                std::int64_t M) {
  validate(assum);
  if (n < 0 || L < 0 || R_M < 0 || M < 0) throw std::invalid_argument("negative size");
  return evaluate_formula(formula::kQodTimeDevice,
                          {{"M", static_cast<double>(M)},
                           {"n", static_cast<double>(n)},
                           {"L", L},
                           {"R_M", R_M},
                           {"c_light", assum.c_light},
                           {"T_atom", assum.T_atom}});
}

CostReports cost_report(Variant variant, int n, std::int64_t K, std::int64_t M,
                        const CostAssumptions& assum,
                        std::optional<double> approx_eps, double delta_p,
                        double kappa, std::optional<DeviceTiming> device) {
  namespace f = formula;
  validate(assum);
  if (n < 0 || K < 0 || M < 0) throw std::invalid_argument("negative size");
  if (approx_eps) {
    if (!(*approx_eps > 0.0 && *approx_eps < 1.0)) {
      throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (variant != Variant::Optimization) {
      throw std::invalid_argument("approximation costs apply to the optimization variant");
    }
    if (!(delta_p > 0.0 && kappa > 0.0)) {
      throw std::invalid_argument("delta_p and kappa must be positive");
    }
  }

  const double nn = n;
  const double kk = static_cast<double>(K);
  const double mm = static_cast<double>(M);
  auto k = [&](const char* id) { return assum.constant(id); };

  CostReports out;
  CostReport& q = out.qod;
  CostReport& d = out.deterministic;
  q.machine = Machine::Qod;
  d.machine = Machine::Deterministic;
  q.problem = d.problem = variant;
  q.approximate = d.approximate = approx_eps.has_value();
  q.inputs = d.inputs = M;
  ReportBuilder qb(q);
  ReportBuilder db(d);

  const char* ci_id;
  const char* ce_id;
  const char* time_id;
  Inputs size_inputs;
  if (approx_eps) {
    ci_id = f::kQodImplApprox;
    ce_id = f::kQodEnergyApprox;
    time_id = f::kQodTimeApprox;
    size_inputs = {{"delta_p", delta_p}, {"epsilon", *approx_eps}, {"kappa", kappa}};
  } else {
    const bool area = variant == Variant::Optimization;
    ci_id = area ? f::kQodImplArea : f::kQodImplLinear;
    ce_id = area ? f::kQodEnergyArea : f::kQodEnergyLinear;
    time_id = f::kQodTimeFlight;
    size_inputs = {{"K", kk}};
  }
  auto with = [&](std::initializer_list<std::pair<std::string, double>> extra) {
    Inputs in(extra);
    in.insert(in.end(), size_inputs.begin(), size_inputs.end());
    return in;
  };

  q.CI = qb.add("CI", ci_id, with({{"k", k(ci_id)}, {"n", nn}}));
  Inputs ce_in = with({{"k", k(ce_id)}, {"n", nn}, {"M", mm},
                       {"unit_energy", assum.unit_energy}});
  q.CE_per_input = per_input(ce_id, ce_in);
  q.CE = qb.add("CE", ce_id, std::move(ce_in));
  if (device) {
    Inputs t_in{{"M", mm},           {"n", nn},
                {"L", device->L},    {"R_M", device->R_M},
                {"c_light", assum.c_light}, {"T_atom", assum.T_atom}};
    q.time_per_input = per_input(f::kQodTimeDevice, t_in);
    q.time_total = qb.add("time", f::kQodTimeDevice, std::move(t_in));
  } else {
    Inputs t_in = with({{"k", k(time_id)}, {"C1", assum.C1}, {"n", nn}, {"M", mm}});
    q.time_per_input = per_input(time_id, t_in);
    q.time_total = qb.add("time", time_id, std::move(t_in));
  }
  q.time_preprocessing =
      qb.add("time_preprocessing", f::kQodPre,
             {{"k", k(f::kQodPre)}, {"C2", assum.C2}, {"CI", q.CI}});

  if (approx_eps) {
    Inputs e_in{{"k", k(f::kDetEnergyApprox)}, {"n", nn}, {"M", mm},
                {"unit_energy", assum.unit_energy}, {"epsilon", *approx_eps}};
    d.CE_per_input = per_input(f::kDetEnergyApprox, e_in);
    d.CE = db.add("CE", f::kDetEnergyApprox, std::move(e_in));
    // Truncation algorithm: n^4 / epsilon operations at rate V.
    Inputs t_in{{"k", k(f::kDetTimeApprox)}, {"M", mm}, {"n", nn},
                {"epsilon", *approx_eps}, {"V", assum.V}};
    d.time_per_input = per_input(f::kDetTimeApprox, t_in);
    d.time_total = db.add("time", f::kDetTimeApprox, std::move(t_in));
  } else {
    Inputs e_in{{"k", k(f::kDetEnergy)}, {"K", kk}, {"n", nn}, {"M", mm},
                {"unit_energy", assum.unit_energy}};
    d.CE_per_input = per_input(f::kDetEnergy, e_in);
    d.CE = db.add("CE", f::kDetEnergy, std::move(e_in));
    Inputs t_in{{"k", k(f::kDetTime)}, {"K", kk}, {"n", nn}, {"M", mm},
                {"V", assum.V}};
    d.time_per_input = per_input(f::kDetTime, t_in);
    d.time_total = db.add("time", f::kDetTime, std::move(t_in));
  }
  return out;
}

Comparison compare(const CostReport& qod, const CostReport& det) {
  if (qod.machine != Machine::Qod || det.machine != Machine::Deterministic) {
    throw std::invalid_argument("compare expects an optical and a deterministic report");
  }
  if (qod.problem != det.problem || qod.approximate != det.approximate ||
      qod.inputs != det.inputs) {
    throw std::invalid_argument("reports describe different problems");
  }
  Comparison cmp;
  cmp.time_ratio = ratio(det.time_total, qod.time_total);
  cmp.energy_ratio = ratio(det.CE, qod.CE);
  cmp.energy_time_qod = qod.CE * qod.time_total;
  cmp.energy_time_det = det.CE * det.time_total;
  const double gain = det.time_per_input - qod.time_per_input;
  if (gain > 0.0) {
    const double m = std::floor(qod.time_preprocessing / gain) + 1.0;
    if (m < 0x1p62) cmp.crossover_inputs = static_cast<std::int64_t>(m);
  }
  return cmp;
}

}  // namespace qod
