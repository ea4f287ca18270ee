#pragma once

// Brute-force ground truth: every deterministic stationary policy is
// evaluated exactly and the best one is kept. Only meant for small models.

#include <cstddef>
#include <iterator>
#include <optional>
#include <variant>
#include <vector>

#include "mdpr/core.hpp"

namespace mdpr {

inline constexpr std::size_t kDefaultOracleCap = 1'000'000;

/// Lexicographic range over all policies (the last state varies fastest).
class PolicyRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = StationaryPolicy;
    using difference_type = std::ptrdiff_t;
    using pointer = const StationaryPolicy*;
    using reference = const StationaryPolicy&;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& o) const { return done_ == o.done_ && (done_ || current_ == o.current_); }

   private:
    friend class PolicyRange;
    iterator(const FiniteMdp* m, bool done);

    const FiniteMdp* m_ = nullptr;
    StationaryPolicy current_;
    bool done_ = true;
  };

  PolicyRange(const FiniteMdp& m, std::size_t count) : m_(&m), count_(count) {}

  iterator begin() const { return iterator(m_, count_ == 0); }
  iterator end() const { return iterator(); }
  std::size_t size() const noexcept { return count_; }

 private:
  const FiniteMdp* m_;
  std::size_t count_;
};

/// prod_x |A(x)|, saturating at SIZE_MAX.
std::size_t count_policies(const FiniteMdp& m);

/// Throws Error(InvalidArgument, "instance too large for oracle") when the
/// policy count exceeds cap.
PolicyRange enumerate_policies(const FiniteMdp& m, std::size_t cap = kDefaultOracleCap);

/// Same contract as policy_total_cost.
ValueVector exact_total_cost(const FiniteMdp& m, const StationaryPolicy& phi);

/// Renewal-reward ratio at ell: with C = c_phi + taboo Q_phi C and
/// T = 1 + taboo Q_phi T, returns C(ell) / T(ell).
double exact_average_cost(const FiniteMdp& m, const StationaryPolicy& phi, std::size_t ell);

struct TotalCriterion {};
struct AverageCriterion {
  std::size_t ell = 0;
};
using Criterion = std::variant<TotalCriterion, AverageCriterion>;

struct OracleResult {
  StationaryPolicy best_policy;
  /// Total: entrywise minimum. Average: one entry holding the minimum.
  ValueVector best_value;
  std::size_t policies_enumerated = 0;
  /// Total criterion: whether best_policy attains the minimum at every state
  /// (within 1e-9 relative). Always true for the average criterion.
  bool single_policy_attains = true;
  /// Per-policy values in enumeration order, when requested.
  std::optional<std::vector<ValueVector>> per_policy;
};

OracleResult brute_force_optimum(const FiniteMdp& m, const Criterion& criterion,
                                 std::size_t cap = kDefaultOracleCap, bool keep_table = false);

}  // namespace mdpr
