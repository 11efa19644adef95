// Boolean knapsack instances and classical solvers.
//
// Three problem variants share one instance type:
//   ExactSum      is there a subset of c summing to exactly `target`?
//   IntervalSum   is there a subset sum s with bound_lo < s < bound_hi?
//   Optimization  maximize sum(w_i s_i) subject to sum(c_i s_i) < bound_hi.
//
// The dynamic-programming solvers are the reference answers for the optical
// simulator; exhaustive_oracle is the independent check on those.

#ifndef QOD_KNAPSACK_HPP_
#define QOD_KNAPSACK_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qod {

enum class Variant { ExactSum = 1, IntervalSum = 2, Optimization = 3 };

std::string_view to_string(Variant v);

struct KnapsackInstance {
  Variant variant = Variant::ExactSum;
  std::vector<std::int64_t> c;
  // Costs; non-empty only for Optimization.
  std::vector<std::int64_t> w;
  std::optional<std::int64_t> target;    // ExactSum
  std::optional<std::int64_t> bound_lo;  // IntervalSum
  std::optional<std::int64_t> bound_hi;  // IntervalSum, Optimization (budget)

  std::size_t size() const { return c.size(); }

  static KnapsackInstance exact_sum(std::vector<std::int64_t> c,
                                    std::int64_t target);
  static KnapsackInstance interval_sum(std::vector<std::int64_t> c,
                                       std::int64_t lo, std::int64_t hi);
  static KnapsackInstance optimization(std::vector<std::int64_t> c,
                                       std::vector<std::int64_t> w,
                                       std::int64_t budget);

  friend bool operator==(const KnapsackInstance&,
                         const KnapsackInstance&) = default;
};

// Throws std::invalid_argument on missing/extra fields, negative numbers,
// bound_lo >= bound_hi or a zero budget; std::overflow_error when the total
// of c or w does not fit in 64 bits.
void validate(const KnapsackInstance& inst);

// Largest sum an item may contribute to a feasible answer: K for ExactSum,
// bound_hi - 1 otherwise.
std::int64_t feasible_cap(const KnapsackInstance& inst);

struct NormalizedInstance {
  KnapsackInstance instance;
  // original_index[k] is the index in the source instance of item k.
  std::vector<std::size_t> original_index;
};

// Drops items whose c_i exceeds feasible_cap(); they can never be selected.
NormalizedInstance normalize(const KnapsackInstance& inst);

// Set of reachable subset sums clipped to {0, ..., cap}. Always contains 0.
class SubsumSet {
 public:
  explicit SubsumSet(std::int64_t cap);

  std::int64_t cap() const { return cap_; }
  bool contains(std::int64_t s) const {
    return s >= 0 && s <= cap_ && bits_[static_cast<std::size_t>(s)];
  }
  std::size_t size() const { return count_; }
  std::vector<std::int64_t> members() const;

  // this <- (this U (this + c)) n {0, ..., cap}
  void add_item(std::int64_t c);

  // Smallest member s with lo < s < hi.
  std::optional<std::int64_t> smallest_in_open_interval(std::int64_t lo,
                                                        std::int64_t hi) const;

  bool is_subset_of(const SubsumSet& other) const;

  friend bool operator==(const SubsumSet& a, const SubsumSet& b) {
    return a.cap_ == b.cap_ && a.bits_ == b.bits_;
  }

 private:
  std::int64_t cap_;
  std::vector<bool> bits_;
  std::size_t count_ = 1;
};

SubsumSet dp_reachable_sums(std::span<const std::int64_t> c, std::int64_t cap);

// Sigma_0 ... Sigma_n, one entry per processed prefix.
std::vector<SubsumSet> dp_reachable_sums_by_stage(
    std::span<const std::int64_t> c, std::int64_t cap);

struct SolveResult {
  Variant variant = Variant::ExactSum;
  std::optional<bool> decision;          // ExactSum, IntervalSum
  std::optional<std::int64_t> optimum;   // Optimization
  // Sorted item indices. Present for every Optimization result and for YES
  // answers of the decision variants.
  std::optional<std::vector<std::size_t>> witness;
  // Low-order bits dropped from w by the approximate solver (0 when exact).
  int truncation_bits = 0;

  friend bool operator==(const SolveResult&, const SolveResult&) = default;
};

struct WitnessSums {
  std::int64_t c_sum = 0;
  std::int64_t w_sum = 0;
};

WitnessSums evaluate_witness(const KnapsackInstance& inst,
                             std::span<const std::size_t> witness);

// True when the result's witness (if any) reproduces its decision/optimum and
// satisfies the instance constraint.
bool witness_is_sound(const KnapsackInstance& inst, const SolveResult& result);

// Witnesses are the lexicographically smallest sorted index list among the
// admissible ones. IntervalSum picks the smallest admissible sum first.
SolveResult solve_variant1(const KnapsackInstance& inst);
SolveResult solve_variant2(const KnapsackInstance& inst);

enum class TableRoute {
  Auto,           // whichever of the two tables is smaller
  ByWeight,       // best cost per weight budget, O(n * bound_hi)
  ByCost,         // least weight per cost level, O(n * sum(w))
};

SolveResult solve_variant3_exact(const KnapsackInstance& inst,
                                 TableRoute route = TableRoute::Auto);

// Dispatches on inst.variant.
SolveResult solve(const KnapsackInstance& inst);

inline constexpr std::size_t kDefaultExhaustiveLimit = 24;

// Enumerates all 2^n assignments. Same contract and tie-breaking as the DP
// solvers. Throws std::length_error when n exceeds max_items.
SolveResult exhaustive_oracle(const KnapsackInstance& inst,
                              std::size_t max_items = kDefaultExhaustiveLimit);

enum class TruncationMode {
  CostsOnly,         // floor(w / 2^t); c and budget untouched
  CostsAndWeights,   // additionally floor(c / 2^t) and floor(budget / 2^t)
};

KnapsackInstance truncate_instance(const KnapsackInstance& inst, int bits,
                                   TruncationMode mode = TruncationMode::CostsOnly);

// Largest t >= 0 with n * 2^t <= epsilon * w_max (0 if none).
int truncation_bits_for(std::size_t n, std::int64_t w_max, double epsilon);

// Drops low-order bits of w, solves the truncated instance exactly, then
// re-prices the witness with the original costs. For R_opt > 0 the relative
// loss (R_opt - R_appr) / R_opt is strictly below epsilon.
// w_max is taken over items that fit the budget on their own.
SolveResult solve_variant3_approx(const KnapsackInstance& inst, double epsilon);

}  // namespace qod

#endif  // QOD_KNAPSACK_HPP_
