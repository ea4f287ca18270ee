#include "mdpr/models.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace mdpr {
namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Returns v / step as an integer when v is a multiple of step.
std::optional<long long> grid_units(double v, double step) {
  const double q = v / step;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) return std::nullopt;
  return static_cast<long long>(r);
}

[[noreturn]] void input_error(const std::string& what) {
  throw Error(ErrorKind::InputError, "inventory spec: " + what);
}

struct GridDemand {
  long long units;
  double prob;
};

std::vector<GridDemand> grid_demand(const InventorySpec& spec) {
  std::vector<GridDemand> out;
  for (const auto& [d, g] : spec.demand_pmf) {
    if (g > 0.0) out.push_back({*grid_units(d, spec.grid_step), g});
  }
  return out;
}

FiniteMdp build_inventory(const InventorySpec& spec, bool drop_lost_sales) {
  spec.validate();
  const long long cap = *grid_units(spec.capacity, spec.grid_step);
  const long long max_order = *grid_units(spec.max_order, spec.grid_step);
  const auto demand = grid_demand(spec);
  const auto n_levels = static_cast<std::size_t>(cap + 1);
  const std::size_t lost = n_levels;

  std::vector<std::string> labels;
  for (long long i = 0; i <= cap; ++i) {
    labels.push_back(format_number(static_cast<double>(i) * spec.grid_step));
  }
  labels.emplace_back(kLostSaleLabel);

  std::vector<std::vector<ActionRow>> rows(n_levels + 1);
  for (std::size_t x = 0; x <= n_levels; ++x) {
    const long long level = x == lost ? 0 : static_cast<long long>(x);  // 0_L + y := y
    for (long long a = 0; a <= max_order; ++a) {
      const double order = static_cast<double>(a) * spec.grid_step;
      ActionRow r;
      r.label = format_number(order);
      r.cost = (a > 0 ? spec.fixed_cost : 0.0) + spec.unit_cost * order;
      double expected_holding = 0.0;
      for (const auto& d : demand) {
        if (level + a >= d.units) {
          const long long next = std::min(level + a - d.units, cap);
          r.kernel.push_back({static_cast<std::size_t>(next), d.prob});
          expected_holding += d.prob * spec.holding[static_cast<std::size_t>(next)];
        } else {
          if (!drop_lost_sales) r.kernel.push_back({lost, d.prob});
          expected_holding += d.prob * spec.holding[0];
        }
      }
      r.cost += expected_holding;
      rows[x].push_back(std::move(r));
    }
  }
  return FiniteMdp(std::move(labels), std::move(rows));
}

}  // namespace

void InventorySpec::validate() const {
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) input_error("grid_step must be > 0");
  const auto c_units = grid_units(capacity, grid_step);
  if (!(capacity > 0.0) || !c_units) input_error("capacity must be a positive multiple of grid_step");
  const auto m_units = grid_units(max_order, grid_step);
  if (!(max_order > 0.0) || !m_units) input_error("max_order must be a positive multiple of grid_step");
  if (demand_pmf.empty()) input_error("demand_pmf is empty");
  double total = 0.0;
  for (const auto& [d, g] : demand_pmf) {
    if (!(d >= 0.0) || !grid_units(d, grid_step)) {
      input_error("demand " + format_number(d) + " is not a nonnegative multiple of grid_step");
    }
    if (!(g >= 0.0) || !std::isfinite(g)) input_error("demand probabilities must be >= 0");
    total += g;
  }
  if (std::abs(total - 1.0) > 1e-12) input_error("demand_pmf sums to " + format_number(total));
  if (holding.size() != static_cast<std::size_t>(*c_units + 1)) {
    input_error("holding needs " + std::to_string(*c_units + 1) + " grid values, got " +
                std::to_string(holding.size()));
  }
  for (double h : holding) {
    if (!(h >= 0.0) || !std::isfinite(h)) input_error("holding costs must be finite and >= 0");
  }
  if (!(fixed_cost >= 0.0) || !(unit_cost >= 0.0)) input_error("costs must be >= 0");
}

std::size_t InventorySpec::levels() const {
  return static_cast<std::size_t>(*grid_units(capacity, grid_step) + 1);
}

FiniteMdp build_inventory_mdp(const InventorySpec& spec) { return build_inventory(spec, false); }

FiniteMdp build_lost_sale_total_cost_mdp(const InventorySpec& spec) {
  if (!check_assumption_D(spec).holds) {
    throw Error(ErrorKind::InputError, "Assumption D fails: demand never exceeds max_order");
  }
  return build_inventory(spec, true);
}

DemandCheck check_assumption_D(const InventorySpec& spec) {
  spec.validate();
  const long long m_units = *grid_units(spec.max_order, spec.grid_step);
  DemandCheck c;
  for (const auto& d : grid_demand(spec)) {
    if (d.units > m_units) c.gamma += d.prob;
  }
  c.holds = c.gamma > 0.0;
  return c;
}

double k_ell_bound(const InventorySpec& spec) {
  const auto d = check_assumption_D(spec);
  if (!d.holds) throw Error(ErrorKind::InvalidArgument, "Assumption D fails");
  const long long c_units = *grid_units(spec.capacity, spec.grid_step);
  const long long m_units = *grid_units(spec.max_order, spec.grid_step);
  const long long steps = (c_units + m_units - 1) / m_units + 1;
  // (steps) * (1/gamma)^steps; 1/gamma first keeps exact inputs exact.
  const double inv = 1.0 / d.gamma;
  double p = 1.0;
  for (long long i = 0; i < steps; ++i) p *= inv;
  return static_cast<double>(steps) * p;
}

InventorySpec fixture_inventory() {
  InventorySpec s;
  s.capacity = 4;
  s.max_order = 2;
  s.grid_step = 1;
  s.demand_pmf = {{0, 0.3}, {1, 0.3}, {2, 0.2}, {3, 0.2}};
  s.fixed_cost = 5;
  s.unit_cost = 1;
  s.holding = {0.0, 0.5, 1.0, 1.5, 2.0};
  return s;
}

double remark1_ell() { return (std::sqrt(5.0) - 1.0) / 2.0; }

void Remark1Spec::validate() const {
  const double ell = remark1_ell();
  double prev = 0.0;
  for (double x : interior_grid) {
    if (!(x > prev) || !(x < ell)) {
      throw Error(ErrorKind::InputError,
                  "remark1 grid must be strictly increasing inside (0, ell*)");
    }
    prev = x;
  }
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw Error(ErrorKind::InputError, "remark1 cost must be finite and >= 0");
  }
}

FiniteMdp build_remark1_mdp(const Remark1Spec& spec) {
  spec.validate();
  const double ell = remark1_ell();
  const std::size_t k = spec.interior_grid.size();
  const std::size_t zero = 0, ell_idx = k + 1;

  std::vector<std::string> labels{"0"};
  for (double x : spec.interior_grid) labels.push_back(format_number(x));
  labels.emplace_back(kRemark1EllLabel);

  std::vector<std::vector<ActionRow>> rows(k + 2);
  rows[zero].push_back(ActionRow{"a0", {{ell_idx, 1.0}}, spec.cost});
  for (std::size_t i = 0; i < k; ++i) {
    const double x = spec.interior_grid[i];
    rows[i + 1].push_back(
        ActionRow{"a0", {{zero, x}, {i + 1, x * x}, {ell_idx, 1.0 - x - x * x}}, spec.cost});
  }
  rows[ell_idx].push_back(ActionRow{"a0", {{zero, ell}, {ell_idx, 1.0 - ell}}, spec.cost});
  return FiniteMdp(std::move(labels), std::move(rows));
}

Remark1Spec fixture_remark1() {
  Remark1Spec s;
  s.interior_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, remark1_ell() - 1e-3};
  return s;
}

SimulationResult simulate_policy(const FiniteMdp& m, const StationaryPolicy& phi,
                                 std::size_t start, std::size_t horizon,
                                 std::size_t replications, std::uint64_t seed) {
  phi.check_against(m);
  if (start >= m.num_states()) {
    throw Error(ErrorKind::InvalidArgument, "no such state: index " + std::to_string(start));
  }
  if (horizon == 0 || replications == 0) {
    throw Error(ErrorKind::InvalidArgument, "horizon and replications must be positive");
  }
  if (!m.is_row_stochastic(1e-9)) {
    throw Error(ErrorKind::InvalidArgument, "simulate_policy: q is not row-stochastic");
  }

  std::vector<double> means;
  means.reserve(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 gen(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::size_t x = start;
    double total = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const auto& row = m.row(x, phi[x]);
      total += row.cost;
      const double u = unif(gen);
      double acc = 0.0;
      std::size_t next = row.kernel.back().target;
      for (const auto& tr : row.kernel) {
        acc += tr.mass;
        if (u < acc) {
          next = tr.target;
          break;
        }
      }
      x = next;
    }
    means.push_back(total / static_cast<double>(horizon));
  }

  SimulationResult res;
  res.replications = replications;
  res.mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(replications);
  if (replications > 1) {
    double ss = 0.0;
    for (double v : means) ss += (v - res.mean) * (v - res.mean);
    res.standard_error = std::sqrt(ss / static_cast<double>(replications - 1) /
                                   static_cast<double>(replications));
  }
  return res;
}

}  // namespace mdpr
