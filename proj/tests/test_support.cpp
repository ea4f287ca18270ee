#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace mdpr::testing {
namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng));
  for (auto& x : w) x /= s;
  return w;
}

std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> l;
  for (std::size_t i = 0; i < n; ++i) l.push_back("s" + std::to_string(i));
  return l;
}

}  // namespace

FiniteMdp random_transient_mdp(std::uint64_t seed, std::size_t max_states,
                               std::size_t max_actions, double max_mass) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> ns(1, max_states), na(1, max_actions);
  std::uniform_real_distribution<double> mass(0.0, max_mass), cost(0.0, 10.0);
  const std::size_t n = ns(rng);
  std::vector<std::vector<ActionRow>> rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t k = na(rng);
    for (std::size_t a = 0; a < k; ++a) {
      ActionRow r{"a" + std::to_string(a), {}, cost(rng)};
      const double alpha = mass(rng);
      const auto w = random_simplex(rng, n);
      for (std::size_t y = 0; y < n; ++y) {
        if (w[y] * alpha > 0.0) r.kernel.push_back({y, w[y] * alpha});
      }
      rows[x].push_back(std::move(r));
    }
  }
  return FiniteMdp(labels(n), std::move(rows));
}

FiniteMdp random_hitting_mdp(std::uint64_t seed, std::size_t max_states,
                             std::size_t max_actions, double min_ell_mass) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> ns(2, max_states), na(1, max_actions);
  std::uniform_real_distribution<double> to_ell(min_ell_mass, 0.6), cost(0.0, 10.0);
  const std::size_t n = ns(rng);
  std::vector<std::vector<ActionRow>> rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t k = na(rng);
    for (std::size_t a = 0; a < k; ++a) {
      ActionRow r{"a" + std::to_string(a), {}, cost(rng)};
      const double e = to_ell(rng);
      const auto w = random_simplex(rng, n - 1);
      r.kernel.push_back({0, e});
      double placed = e;
      for (std::size_t y = 1; y < n; ++y) {
        const double mass = y + 1 == n ? 1.0 - placed : w[y - 1] * (1.0 - e);
        placed += mass;
        if (mass > 0.0) r.kernel.push_back({y, mass});
      }
      rows[x].push_back(std::move(r));
    }
  }
  return FiniteMdp(labels(n), std::move(rows));
}

RowStats row_stats(const FiniteMdp& m) {
  RowStats s;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    for (const auto& r : m.actions(x)) {
      s.max_defect = std::max(s.max_defect, std::abs(r.row_mass() - 1.0));
      for (const auto& t : r.kernel) s.min_entry = std::min(s.min_entry, t.mass);
    }
  }
  return s;
}

std::string fixture_path(const std::string& name) { return std::string(MDPR_FIXTURES) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mdpr::testing
