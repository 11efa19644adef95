#include "qod/knapsack.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qod {
namespace {

// Limits on DP table size; beyond these the instance is rejected rather than
// exhausting memory.
constexpr std::uint64_t kMaxBitCells = std::uint64_t{1} << 32;
constexpr std::uint64_t kMaxWordCells = std::uint64_t{1} << 25;

constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max();

void check_table(std::size_t rows, std::int64_t cols, std::uint64_t limit,
                 const char* what) {
  const auto cells = static_cast<long double>(rows) *
                     static_cast<long double>(cols);
  if (cells > static_cast<long double>(limit)) {
    throw std::length_error(std::string(what) + " table too large (" +
                            std::to_string(rows) + " x " +
                            std::to_string(cols) + ")");
  }
}

std::int64_t checked_total(std::span<const std::int64_t> values,
                           const char* name) {
  std::int64_t total = 0;
  for (const auto v : values) {
    if (__builtin_add_overflow(total, v, &total)) {
      throw std::overflow_error(std::string("sum of ") + name +
                                " overflows 64-bit integers");
    }
  }
  return total;
}

void require_variant(const KnapsackInstance& inst, Variant expected) {
  if (inst.variant != expected) {
    throw std::invalid_argument("solver expects variant " +
                                std::string(to_string(expected)) + ", got " +
                                std::string(to_string(inst.variant)));
  }
}

std::vector<std::size_t> mask_to_indices(std::uint64_t mask) {
  std::vector<std::size_t> out;
  while (mask != 0) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

// Lexicographic order on the sorted index lists encoded by two masks.
bool lex_less(std::uint64_t a, std::uint64_t b) {
  if (a == b) return false;
  const int i = std::countr_zero(a ^ b);
  const std::uint64_t at_or_above = ~((std::uint64_t{1} << i) - 1);
  if ((a >> i) & 1U) {
    // b lacks i: b is smaller only if it has nothing left, i.e. is a prefix.
    return (b & at_or_above) != 0;
  }
  return (a & at_or_above) == 0;
}

// Suffix reachability: entry i holds the subset sums of items i..n-1.
std::vector<SubsumSet> suffix_sums(std::span<const std::int64_t> c,
                                   std::int64_t cap) {
  check_table(c.size() + 1, cap + 1, kMaxBitCells, "subset-sum");
  std::vector<SubsumSet> suffix(c.size() + 1, SubsumSet(cap));
  for (std::size_t i = c.size(); i-- > 0;) {
    suffix[i] = suffix[i + 1];
    suffix[i].add_item(c[i]);
  }
  return suffix;
}

// Lexicographically smallest index set with sum exactly `sum`; the sum must be
// reachable.
std::vector<std::size_t> exact_sum_witness(std::span<const std::int64_t> c,
                                           std::int64_t sum) {
  const auto suffix = suffix_sums(c, sum);
  std::vector<std::size_t> witness;
  std::int64_t remaining = sum;
  std::size_t start = 0;
  while (remaining > 0) {
    std::size_t j = start;
    for (; j < c.size(); ++j) {
      if (c[j] <= remaining && suffix[j + 1].contains(remaining - c[j])) break;
    }
    if (j == c.size()) throw std::logic_error("witness backtracking failed");
    witness.push_back(j);
    remaining -= c[j];
    start = j + 1;
  }
  return witness;
}

SolveResult variant3_by_weight(const KnapsackInstance& inst) {
  const auto& c = inst.c;
  const auto& w = inst.w;
  const std::size_t n = c.size();
  const std::int64_t cap = *inst.bound_hi - 1;
  check_table(n + 1, cap + 1, kMaxWordCells, "cost");
  const auto cols = static_cast<std::size_t>(cap + 1);
  // best[i][b]: max cost from items i..n-1 within weight b.
  std::vector<std::int64_t> best((n + 1) * cols, 0);
  auto at = [&](std::size_t i, std::int64_t b) -> std::int64_t& {
    return best[i * cols + static_cast<std::size_t>(b)];
  };
  for (std::size_t i = n; i-- > 0;) {
    for (std::int64_t b = 0; b <= cap; ++b) {
      std::int64_t v = at(i + 1, b);
      if (c[i] <= b) v = std::max(v, w[i] + at(i + 1, b - c[i]));
      at(i, b) = v;
    }
  }
  SolveResult result;
  result.variant = Variant::Optimization;
  const std::int64_t optimum = at(0, cap);
  std::vector<std::size_t> witness;
  std::int64_t need = optimum;
  std::int64_t room = cap;
  std::size_t start = 0;
  while (need > 0) {
    std::size_t j = start;
    for (; j < n; ++j) {
      if (c[j] <= room && w[j] + at(j + 1, room - c[j]) >= need) break;
    }
    if (j == n) throw std::logic_error("witness backtracking failed");
    witness.push_back(j);
    need -= w[j];
    room -= c[j];
    start = j + 1;
  }
  result.optimum = optimum;
  result.witness = std::move(witness);
  return result;
}

SolveResult variant3_by_cost(const KnapsackInstance& inst) {
  const auto& c = inst.c;
  const auto& w = inst.w;
  const std::size_t n = c.size();
  const std::int64_t cap = *inst.bound_hi - 1;
  const std::int64_t total = checked_total(w, "w");
  check_table(n + 1, total + 1, kMaxWordCells, "weight");
  const auto cols = static_cast<std::size_t>(total + 1);
  // lightest[i][p]: least weight from items i..n-1 reaching cost >= p.
  std::vector<std::int64_t> lightest((n + 1) * cols, kInfinity);
  auto at = [&](std::size_t i, std::int64_t p) -> std::int64_t& {
    return lightest[i * cols + static_cast<std::size_t>(p)];
  };
  at(n, 0) = 0;
  for (std::size_t i = n; i-- > 0;) {
    for (std::int64_t p = 0; p <= total; ++p) {
      std::int64_t v = at(i + 1, p);
      const std::int64_t rest = at(i + 1, std::max<std::int64_t>(0, p - w[i]));
      if (rest != kInfinity) v = std::min(v, c[i] + rest);
      at(i, p) = v;
    }
  }
  std::int64_t optimum = 0;
  for (std::int64_t p = total; p >= 0; --p) {
    if (at(0, p) <= cap) {
      optimum = p;
      break;
    }
  }
  std::vector<std::size_t> witness;
  std::int64_t need = optimum;
  std::int64_t room = cap;
  std::size_t start = 0;
  while (need > 0) {
    std::size_t j = start;
    for (; j < n; ++j) {
      const std::int64_t rest =
          at(j + 1, std::max<std::int64_t>(0, need - w[j]));
      if (rest != kInfinity && c[j] + rest <= room) break;
    }
    if (j == n) throw std::logic_error("witness backtracking failed");
    witness.push_back(j);
    need -= w[j];
    room -= c[j];
    start = j + 1;
  }
  SolveResult result;
  result.variant = Variant::Optimization;
  result.optimum = optimum;
  result.witness = std::move(witness);
  return result;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::ExactSum:
      return "exact-sum";
    case Variant::IntervalSum:
      return "interval-sum";
    case Variant::Optimization:
      return "optimization";
  }
  return "unknown";
}

KnapsackInstance KnapsackInstance::exact_sum(std::vector<std::int64_t> c,
                                             std::int64_t target) {
  KnapsackInstance inst;
  inst.variant = Variant::ExactSum;
  inst.c = std::move(c);
  inst.target = target;
  return inst;
}

KnapsackInstance KnapsackInstance::interval_sum(std::vector<std::int64_t> c,
                                                std::int64_t lo,
                                                std::int64_t hi) {
  KnapsackInstance inst;
  inst.variant = Variant::IntervalSum;
  inst.c = std::move(c);
  inst.bound_lo = lo;
  inst.bound_hi = hi;
  return inst;
}

KnapsackInstance KnapsackInstance::optimization(std::vector<std::int64_t> c,
                                                std::vector<std::int64_t> w,
                                                std::int64_t budget) {
  KnapsackInstance inst;
  inst.variant = Variant::Optimization;
  inst.c = std::move(c);
  inst.w = std::move(w);
  inst.bound_hi = budget;
  return inst;
}

void validate(const KnapsackInstance& inst) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument(msg);
  };
  for (const auto v : inst.c) {
    if (v < 0) fail("negative weight c_i");
  }
  for (const auto v : inst.w) {
    if (v < 0) fail("negative cost w_i");
  }
  switch (inst.variant) {
    case Variant::ExactSum:
      if (!inst.target) fail("exact-sum instance needs a target");
      if (inst.bound_lo || inst.bound_hi) fail("exact-sum instance has bounds");
      if (!inst.w.empty()) fail("exact-sum instance has costs");
      if (*inst.target < 0) fail("negative target");
      break;
    case Variant::IntervalSum:
      if (!inst.bound_lo || !inst.bound_hi) fail("interval-sum instance needs bounds");
      if (inst.target) fail("interval-sum instance has a target");
      if (!inst.w.empty()) fail("interval-sum instance has costs");
      if (*inst.bound_lo < 0) fail("negative bound");
      if (*inst.bound_lo >= *inst.bound_hi) fail("bounds not increasing");
      break;
    case Variant::Optimization:
      if (!inst.bound_hi) fail("optimization instance needs a budget");
      if (inst.target || inst.bound_lo) fail("optimization instance has extra bounds");
      if (inst.w.size() != inst.c.size()) fail("c and w differ in length");
      if (*inst.bound_hi < 1) fail("budget must be positive");
      break;
  }
  checked_total(inst.c, "c");
  checked_total(inst.w, "w");
}

std::int64_t feasible_cap(const KnapsackInstance& inst) {
  return inst.variant == Variant::ExactSum ? *inst.target : *inst.bound_hi - 1;
}

NormalizedInstance normalize(const KnapsackInstance& inst) {
  validate(inst);
  const std::int64_t cap = feasible_cap(inst);
  NormalizedInstance out{.instance = inst, .original_index = {}};
  out.instance.c.clear();
  out.instance.w.clear();
  for (std::size_t i = 0; i < inst.c.size(); ++i) {
    if (inst.c[i] > cap) continue;
    out.instance.c.push_back(inst.c[i]);
    if (!inst.w.empty()) out.instance.w.push_back(inst.w[i]);
    out.original_index.push_back(i);
  }
  return out;
}

SubsumSet::SubsumSet(std::int64_t cap) : cap_(cap) {
  if (cap < 0) throw std::invalid_argument("negative cap");
  bits_.assign(static_cast<std::size_t>(cap) + 1, false);
  bits_[0] = true;
}

std::vector<std::int64_t> SubsumSet::members() const {
  std::vector<std::int64_t> out;
  out.reserve(count_);
  for (std::int64_t s = 0; s <= cap_; ++s) {
    if (bits_[static_cast<std::size_t>(s)]) out.push_back(s);
  }
  return out;
}

void SubsumSet::add_item(std::int64_t c) {
  if (c < 0) throw std::invalid_argument("negative weight c_i");
  if (c == 0 || c > cap_) return;
  for (std::int64_t s = cap_ - c; s >= 0; --s) {
    if (!bits_[static_cast<std::size_t>(s)]) continue;
    auto slot = bits_[static_cast<std::size_t>(s + c)];
    if (!slot) {
      slot = true;
      ++count_;
    }
  }
}

std::optional<std::int64_t> SubsumSet::smallest_in_open_interval(
    std::int64_t lo, std::int64_t hi) const {
  const std::int64_t first = std::max<std::int64_t>(lo + 1, 0);
  const std::int64_t last = std::min(hi - 1, cap_);
  for (std::int64_t s = first; s <= last; ++s) {
    if (bits_[static_cast<std::size_t>(s)]) return s;
  }
  return std::nullopt;
}

bool SubsumSet::is_subset_of(const SubsumSet& other) const {
  for (std::int64_t s = 0; s <= cap_; ++s) {
    if (bits_[static_cast<std::size_t>(s)] && !other.contains(s)) return false;
  }
  return true;
}

SubsumSet dp_reachable_sums(std::span<const std::int64_t> c, std::int64_t cap) {
  SubsumSet sums(cap);
  for (const auto ci : c) sums.add_item(ci);
  return sums;
}

std::vector<SubsumSet> dp_reachable_sums_by_stage(
    std::span<const std::int64_t> c, std::int64_t cap) {
  check_table(c.size() + 1, cap + 1, kMaxBitCells, "subset-sum");
  std::vector<SubsumSet> stages;
  stages.reserve(c.size() + 1);
  stages.emplace_back(cap);
  for (const auto ci : c) {
    stages.push_back(stages.back());
    stages.back().add_item(ci);
  }
  return stages;
}

WitnessSums evaluate_witness(const KnapsackInstance& inst,
                             std::span<const std::size_t> witness) {
  WitnessSums sums;
  for (const auto i : witness) {
    if (i >= inst.c.size()) throw std::out_of_range("witness index out of range");
    sums.c_sum += inst.c[i];
    if (!inst.w.empty()) sums.w_sum += inst.w[i];
  }
  return sums;
}

bool witness_is_sound(const KnapsackInstance& inst, const SolveResult& result) {
  if (result.witness) {
    const auto& wit = *result.witness;
    if (!std::is_sorted(wit.begin(), wit.end()) ||
        std::adjacent_find(wit.begin(), wit.end()) != wit.end()) {
      return false;
    }
    for (const auto i : wit) {
      if (i >= inst.c.size()) return false;
    }
  }
  switch (inst.variant) {
    case Variant::ExactSum: {
      if (!result.decision) return false;
      if (!*result.decision) return !result.witness;
      if (!result.witness) return false;
      return evaluate_witness(inst, *result.witness).c_sum == *inst.target;
    }
    case Variant::IntervalSum: {
      if (!result.decision) return false;
      if (!*result.decision) return !result.witness;
      if (!result.witness) return false;
      const auto s = evaluate_witness(inst, *result.witness).c_sum;
      return *inst.bound_lo < s && s < *inst.bound_hi;
    }
    case Variant::Optimization: {
      if (!result.optimum || !result.witness) return false;
      const auto sums = evaluate_witness(inst, *result.witness);
      return sums.c_sum < *inst.bound_hi && sums.w_sum == *result.optimum;
    }
  }
  return false;
}

SolveResult solve_variant1(const KnapsackInstance& inst) {
  require_variant(inst, Variant::ExactSum);
  validate(inst);
  const std::int64_t target = *inst.target;
  check_table(1, target + 1, kMaxBitCells, "subset-sum");
  SolveResult result;
  result.variant = Variant::ExactSum;
  result.decision = dp_reachable_sums(inst.c, target).contains(target);
  if (*result.decision) result.witness = exact_sum_witness(inst.c, target);
  return result;
}

SolveResult solve_variant2(const KnapsackInstance& inst) {
  require_variant(inst, Variant::IntervalSum);
  validate(inst);
  const std::int64_t cap = *inst.bound_hi - 1;
  check_table(1, cap + 1, kMaxBitCells, "subset-sum");
  SolveResult result;
  result.variant = Variant::IntervalSum;
  const auto hit = dp_reachable_sums(inst.c, cap)
                       .smallest_in_open_interval(*inst.bound_lo, *inst.bound_hi);
  result.decision = hit.has_value();
  if (hit) result.witness = exact_sum_witness(inst.c, *hit);
  return result;
}

SolveResult solve_variant3_exact(const KnapsackInstance& inst, TableRoute route) {
  require_variant(inst, Variant::Optimization);
  validate(inst);
  if (route == TableRoute::Auto) {
    const std::int64_t cap = *inst.bound_hi - 1;
    route = cap <= checked_total(inst.w, "w") ? TableRoute::ByWeight
                                              : TableRoute::ByCost;
  }
  return route == TableRoute::ByWeight ? variant3_by_weight(inst)
                                       : variant3_by_cost(inst);
}

SolveResult solve(const KnapsackInstance& inst) {
  switch (inst.variant) {
    case Variant::ExactSum:
      return solve_variant1(inst);
    case Variant::IntervalSum:
      return solve_variant2(inst);
    case Variant::Optimization:
      return solve_variant3_exact(inst);
  }
  throw std::invalid_argument("unknown variant");
}

SolveResult exhaustive_oracle(const KnapsackInstance& inst,
                              std::size_t max_items) {
  validate(inst);
  const std::size_t n = inst.size();
  if (n > max_items || n > 62) {
    throw std::length_error("exhaustive search limited to " +
                            std::to_string(std::min<std::size_t>(max_items, 62)) +
                            " items, got " + std::to_string(n));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::optional<std::uint64_t> best;
  std::int64_t best_c = 0;
  std::int64_t best_w = 0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::int64_t cs = 0;
    std::int64_t ws = 0;
    for (std::uint64_t m = mask; m != 0; m &= m - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(m));
      cs += inst.c[i];
      if (!inst.w.empty()) ws += inst.w[i];
    }
    bool better = false;
    switch (inst.variant) {
      case Variant::ExactSum:
        if (cs != *inst.target) continue;
        better = !best || lex_less(mask, *best);
        break;
      case Variant::IntervalSum:
        if (cs <= *inst.bound_lo || cs >= *inst.bound_hi) continue;
        better = !best || cs < best_c || (cs == best_c && lex_less(mask, *best));
        break;
      case Variant::Optimization:
        if (cs >= *inst.bound_hi) continue;
        better = !best || ws > best_w || (ws == best_w && lex_less(mask, *best));
        break;
    }
    if (better) {
      best = mask;
      best_c = cs;
      best_w = ws;
    }
  }
  SolveResult result;
  result.variant = inst.variant;
  if (inst.variant == Variant::Optimization) {
    // The empty assignment is always feasible since the budget is positive.
    result.optimum = best_w;
    result.witness = mask_to_indices(*best);
  } else {
    result.decision = best.has_value();
    if (best) result.witness = mask_to_indices(*best);
  }
  return result;
}

KnapsackInstance truncate_instance(const KnapsackInstance& inst, int bits,
                                   TruncationMode mode) {
  require_variant(inst, Variant::Optimization);
  if (bits < 0) throw std::invalid_argument("negative truncation");
  auto drop = [bits](std::int64_t v) -> std::int64_t {
    return bits >= 63 ? 0 : (v >> bits);
  };
  KnapsackInstance out = inst;
  for (auto& v : out.w) v = drop(v);
  if (mode == TruncationMode::CostsAndWeights) {
    for (auto& v : out.c) v = drop(v);
    // Keep the empty assignment feasible.
    out.bound_hi = std::max<std::int64_t>(1, drop(*inst.bound_hi));
  }
  return out;
}

int truncation_bits_for(std::size_t n, std::int64_t w_max, double epsilon) {
  const double allowance = epsilon * static_cast<double>(w_max);
  int bits = 0;
  while (bits < 62 &&
         static_cast<double>(n) * std::ldexp(1.0, bits + 1) <= allowance) {
    ++bits;
  }
  return bits;
}

SolveResult solve_variant3_approx(const KnapsackInstance& inst, double epsilon) {
  require_variant(inst, Variant::Optimization);
  validate(inst);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  std::int64_t w_max = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (inst.c[i] < *inst.bound_hi) w_max = std::max(w_max, inst.w[i]);
  }
  if (w_max == 0) {
    throw std::invalid_argument("no item with positive cost fits the budget");
  }
  const int bits = truncation_bits_for(inst.size(), w_max, epsilon);
  SolveResult result = solve_variant3_exact(truncate_instance(inst, bits));
  result.optimum = evaluate_witness(inst, *result.witness).w_sum;
  result.truncation_bits = bits;
  return result;
}

}  // namespace qod
