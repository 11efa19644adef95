// Implementation, energy and time estimates for the optical device and for a
// sequential deterministic machine running the same dynamic program.
//
// The estimates are asymptotic; every hidden constant defaults to 1 and is
// written into the report's formula trace together with the inputs, so any
// reported number can be recomputed by hand.

#ifndef QOD_COST_MODEL_HPP_
#define QOD_COST_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qod/knapsack.hpp"

namespace qod {

inline constexpr double kSpeedOfLight = 2.99792458e8;

struct CostAssumptions {
  double V = 1e10;                  // deterministic operations per second
  std::int64_t M = 1;               // repeated inputs
  double C1 = 1.0 / kSpeedOfLight;  // optical running-time constant
  double C2 = 1e-6;                 // preprocessing seconds per unit of CI
  double T_atom = 1e-8;
  double c_light = kSpeedOfLight;
  double unit_energy = 1.0;
  // Overrides of the hidden constant of individual formulas, keyed by
  // formula id (see FormulaId). Missing entries mean 1.
  std::map<std::string, double> big_o;

  double constant(const std::string& formula) const;
};

// Throws std::invalid_argument unless every constant is positive (T_atom may
// be 0, for pure flight time) and M >= 0.
void validate(const CostAssumptions& assum);

namespace formula {
inline constexpr const char* kQodImplLinear = "qod.ci.linear";   // k*K*n
inline constexpr const char* kQodImplArea = "qod.ci.area";       // k*K*K*n
inline constexpr const char* kQodImplApprox = "qod.ci.approx";   // k*Ke*Ke*n
inline constexpr const char* kQodEnergyLinear = "qod.ce.linear"; // k*K*n*(n+K)*M*u
inline constexpr const char* kQodEnergyArea = "qod.ce.area";     // k*K*K*n*(n+K)*M*u
inline constexpr const char* kQodEnergyApprox = "qod.ce.approx"; // k*Ke*Ke*n*(n+Ke)*M*u
inline constexpr const char* kQodTimeFlight = "qod.time.flight"; // k*C1*(n+K)*M
inline constexpr const char* kQodTimeApprox = "qod.time.approx"; // k*C1*(n+Ke)*M
inline constexpr const char* kQodTimeDevice = "qod.time.device"; // M*((n*L+R_M)/c + n*T_atom)
inline constexpr const char* kQodPre = "qod.pre";                // k*C2*CI
inline constexpr const char* kDetEnergy = "det.ce";              // k*K*n*M*u
inline constexpr const char* kDetTime = "det.time";              // k*K*n*M/V
inline constexpr const char* kDetEnergyApprox = "det.ce.approx"; // k*n^4*M*u/eps
inline constexpr const char* kDetTimeApprox = "det.time.approx"; // k*M*n^4/(eps*V)
}  // namespace formula
// Ke = delta_p / (epsilon * kappa), the mirror extent in units of kappa
// needed to resolve a relative precision epsilon.

struct FormulaTrace {
  std::string quantity;
  std::string formula;
  std::vector<std::pair<std::string, double>> inputs;
  double value = 0;
};

// Evaluates a formula id against named inputs. Throws std::invalid_argument
// for an unknown id or a missing input.
double evaluate_formula(const std::string& id,
                        const std::vector<std::pair<std::string, double>>& inputs);

enum class Machine { Qod, Deterministic };

std::string_view to_string(Machine m);

struct CostReport {
  Machine machine = Machine::Qod;
  Variant problem = Variant::ExactSum;
  bool approximate = false;
  std::int64_t inputs = 1;          // M
  double CI = 0;                    // implementation cost (0 for Deterministic)
  double CE = 0;                    // energy, all M inputs
  double CE_per_input = 0;
  double time_total = 0;            // running time, all M inputs, seconds
  double time_per_input = 0;
  double time_preprocessing = 0;    // one-off build time, seconds
  std::vector<FormulaTrace> formula_trace;
};

struct CostReports {
  CostReport qod;
  CostReport deterministic;
};

// Physical device data; when supplied, the optical running time is the
// flight-plus-amplifier estimate of qod_time() instead of C1 * (n + K) * M.
struct DeviceTiming {
  double L = 0;
  double R_M = 0;
};

// Deterministic dynamic-programming time M * n * bound / V, seconds.
double deterministic_time(int n, std::int64_t bound, const CostAssumptions& assum);

// Optical time M * ((n * L + R_M) / c + n * T_atom), seconds.
double qod_time(int n, double L, double R_M, const CostAssumptions& assum,
                std::int64_t M);

// Variants 1 and 2 use mirror extent K; Optimization uses area K^2. With
// approx_eps (Optimization only) the approximation formulas replace K by
// delta_p / (approx_eps * kappa) and the deterministic side by the
// truncation algorithm's n^4 / epsilon.
CostReports cost_report(Variant variant, int n, std::int64_t K, std::int64_t M,
                        const CostAssumptions& assum,
                        std::optional<double> approx_eps, double delta_p,
                        double kappa,
                        std::optional<DeviceTiming> device = std::nullopt);

struct Comparison {
  double time_ratio = 1;    // deterministic / optical; +inf if optical is 0
  double energy_ratio = 1;  // deterministic / optical
  // Smallest M at which optical preprocessing + running time beats the
  // deterministic machine; empty when it never does.
  std::optional<std::int64_t> crossover_inputs;
  double energy_time_qod = 0;
  double energy_time_det = 0;
};

Comparison compare(const CostReport& qod, const CostReport& det);

}  // namespace qod

#endif  // QOD_COST_MODEL_HPP_
