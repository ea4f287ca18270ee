#pragma once

// Finite MDP data model with a nonnegative, not necessarily stochastic,
// transition kernel q. Row masses alpha(x,a) = q(X|x,a) may be 0, below 1,
// or above 1.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdpr/error.hpp"

namespace mdpr {

using ValueVector = std::vector<double>;

struct Transition {
  std::size_t target = 0;
  double mass = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// One (state, action) pair: sparse kernel row plus one-step cost.
struct ActionRow {
  std::string label;
  std::vector<Transition> kernel;
  double cost = 0.0;

  double row_mass() const noexcept;
};

/// Immutable finite MDP. Kernel rows are kept sorted by target with
/// duplicate targets merged, so two models built from the same measure
/// compare equal.
class FiniteMdp {
 public:
  FiniteMdp() = default;

  /// Throws Error(InvalidArgument) on structural problems only: label count
  /// mismatch, duplicate state labels, or kernel targets out of range.
  /// Value-level problems (negative cost, empty action set, NaN) are left
  /// for validate_model() to report.
  FiniteMdp(std::vector<std::string> state_labels,
            std::vector<std::vector<ActionRow>> rows);

  std::size_t num_states() const noexcept { return labels_.size(); }
  std::size_t num_actions(std::size_t x) const { return rows_.at(x).size(); }
  std::size_t max_actions() const noexcept;

  const ActionRow& row(std::size_t x, std::size_t a) const {
    return rows_.at(x).at(a);
  }
  std::span<const ActionRow> actions(std::size_t x) const { return rows_.at(x); }

  const std::string& state_label(std::size_t x) const { return labels_.at(x); }
  const std::vector<std::string>& state_labels() const noexcept { return labels_; }
  std::optional<std::size_t> find_state(const std::string& label) const;
  /// Like find_state but throws Error(InvalidArgument, "no such state: ...").
  std::size_t state_index(const std::string& label) const;

  double cost(std::size_t x, std::size_t a) const { return row(x, a).cost; }
  double row_mass(std::size_t x, std::size_t a) const { return row(x, a).row_mass(); }

  /// True when every row mass is 1 within tol.
  bool is_row_stochastic(double tol = 1e-12) const;

  friend bool operator==(const FiniteMdp&, const FiniteMdp&);

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<ActionRow>> rows_;
};

inline bool operator==(const ActionRow& a, const ActionRow& b) {
  return a.label == b.label && a.kernel == b.kernel && a.cost == b.cost;
}

/// Deterministic stationary policy: one action index per state.
class StationaryPolicy {
 public:
  StationaryPolicy() = default;
  explicit StationaryPolicy(std::vector<std::size_t> choice)
      : choice_(std::move(choice)) {}

  /// The policy choosing action 0 everywhere.
  static StationaryPolicy first_actions(const FiniteMdp& m) {
    return StationaryPolicy(std::vector<std::size_t>(m.num_states(), 0));
  }

  std::size_t operator[](std::size_t x) const { return choice_.at(x); }
  std::size_t size() const noexcept { return choice_.size(); }
  const std::vector<std::size_t>& choices() const noexcept { return choice_; }

  /// Throws Error(InvalidArgument) unless the policy fits m.
  void check_against(const FiniteMdp& m) const;

  friend bool operator==(const StationaryPolicy&, const StationaryPolicy&) = default;

 private:
  std::vector<std::size_t> choice_;
};

struct Violation {
  std::size_t state = 0;
  std::optional<std::size_t> action;
  std::string message;
};

struct ModelDiagnostics {
  std::vector<Violation> violations;
  double sup_row_mass = 0.0;

  bool valid() const noexcept { return violations.empty(); }
};

/// Reports every invariant violation; never throws.
ModelDiagnostics validate_model(const FiniteMdp& m);

/// alpha(x,a) together with p = q / alpha on rows where alpha > 0.
class KernelSplit {
 public:
  explicit KernelSplit(const FiniteMdp& m);

  double alpha(std::size_t x, std::size_t a) const { return alpha_.at(x).at(a); }
  bool has_p(std::size_t x, std::size_t a) const { return alpha(x, a) > 0.0; }
  /// Throws Error(InvalidArgument) where alpha == 0 (p undefined).
  const std::vector<Transition>& p(std::size_t x, std::size_t a) const;

 private:
  std::vector<std::vector<double>> alpha_;
  std::vector<std::vector<std::vector<Transition>>> p_;
};

inline KernelSplit split_kernel(const FiniteMdp& m) { return KernelSplit(m); }

/// c_phi(x) = c(x, phi(x)).
ValueVector policy_cost(const FiniteMdp& m, const StationaryPolicy& phi);

/// Q_phi u(x) = sum_y u(y) q({y} | x, phi(x)).
ValueVector apply_kernel(const FiniteMdp& m, const StationaryPolicy& phi,
                         std::span<const double> u);

/// Q_phi with the mass into `ell` dropped.
ValueVector taboo_apply(const FiniteMdp& m, const StationaryPolicy& phi,
                        std::size_t ell, std::span<const double> u);

/// Unique solution of v = c_phi + Q_phi v. Throws Error(NotTransient,
/// "policy not transient") when sum_n Q_phi^n diverges.
ValueVector policy_total_cost(const FiniteMdp& m, const StationaryPolicy& phi);

/// Copy of m with every transition into `ell` deleted; ell keeps its own
/// (reduced) rows. Its occupation sums are the taboo sums at ell.
FiniteMdp taboo_model(const FiniteMdp& m, std::size_t ell);

double sup_norm(std::span<const double> f);

}  // namespace mdpr
