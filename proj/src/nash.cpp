#include "ewanet/nash.hpp"

#include <bit>
#include <omp.h>
#include <stdexcept>

namespace ewanet {

namespace {

struct ActionTables {
  // ok[i][m]: action acceptable for agent i with m of its d_i neighbors on D.
  std::vector<std::vector<char>> weak_d, strict_d, weak_c, strict_c;
};

// Route 1: direct payoff comparison m*w + (d-m)*x vs m*y + (d-m)*z.
ActionTables best_response_tables(const Graph& g, const PayoffMatrix& p) {
  const int n = g.size();
  ActionTables t;
  t.weak_d.resize(n);
  t.strict_d.resize(n);
  t.weak_c.resize(n);
  t.strict_c.resize(n);
  for (int i = 0; i < n; ++i) {
    const int d = g.degree(i);
    t.weak_d[i].resize(d + 1);
    t.strict_d[i].resize(d + 1);
    t.weak_c[i].resize(d + 1);
    t.strict_c[i].resize(d + 1);
    for (int m = 0; m <= d; ++m) {
      if (p.exact) {
        const auto& [z, y, x, w] = *p.exact;
        const Rational pay_d = Rational(m) * w + Rational(d - m) * x;
        const Rational pay_c = Rational(m) * y + Rational(d - m) * z;
        t.weak_d[i][m] = pay_d >= pay_c;
        t.strict_d[i][m] = pay_d > pay_c;
        t.weak_c[i][m] = pay_c >= pay_d;
        t.strict_c[i][m] = pay_c > pay_d;
      } else {
        const double pay_d = m * p.w + (d - m) * p.x;
        const double pay_c = m * p.y + (d - m) * p.z;
        t.weak_d[i][m] = pay_d >= pay_c - kFloatStrictMargin;
        t.strict_d[i][m] = pay_d > pay_c + kFloatStrictMargin;
        t.weak_c[i][m] = pay_c >= pay_d - kFloatStrictMargin;
        t.strict_c[i][m] = pay_c > pay_d + kFloatStrictMargin;
      }
    }
  }
  return t;
}

// Route 2: cohesiveness thresholds — D side needs m/d >= r, C side
// (d-m)/d >= 1-r. Isolated agents tie both ways.
ActionTables cohesiveness_tables(const Graph& g, const PayoffMatrix& p) {
  const int n = g.size();
  ActionTables t;
  t.weak_d.resize(n);
  t.strict_d.resize(n);
  t.weak_c.resize(n);
  t.strict_c.resize(n);
  for (int i = 0; i < n; ++i) {
    const int d = g.degree(i);
    t.weak_d[i].resize(d + 1);
    t.strict_d[i].resize(d + 1);
    t.weak_c[i].resize(d + 1);
    t.strict_c[i].resize(d + 1);
    for (int m = 0; m <= d; ++m) {
      if (d == 0) {
        t.weak_d[i][m] = t.weak_c[i][m] = 1;
        t.strict_d[i][m] = t.strict_c[i][m] = 0;
        continue;
      }
      if (p.exact) {
        const Rational r = ne_threshold(p);
        const Rational frac(m, d);
        const Rational cofrac(d - m, d);
        const Rational one_minus_r = Rational(1) - r;
        t.weak_d[i][m] = frac >= r;
        t.strict_d[i][m] = frac > r;
        t.weak_c[i][m] = cofrac >= one_minus_r;
        t.strict_c[i][m] = cofrac > one_minus_r;
      } else {
        const double r = ne_threshold_value(p);
        const double frac = static_cast<double>(m) / d;
        const double cofrac = static_cast<double>(d - m) / d;
        t.weak_d[i][m] = frac >= r - kFloatStrictMargin;
        t.strict_d[i][m] = frac > r + kFloatStrictMargin;
        t.weak_c[i][m] = cofrac >= (1.0 - r) - kFloatStrictMargin;
        t.strict_c[i][m] = cofrac > (1.0 - r) + kFloatStrictMargin;
      }
    }
  }
  return t;
}

std::vector<std::uint32_t> neighbor_masks(const Graph& g) {
  std::vector<std::uint32_t> nb(g.size(), 0);
  for (int i = 0; i < g.size(); ++i)
    for (int j : g.neighbors(i)) nb[i] |= (1u << j);
  return nb;
}

bool profile_ok(const ActionTables& t, const std::vector<std::uint32_t>& nb, std::uint64_t mask,
                int n, bool* strict_out) {
  bool strict = true;
  for (int i = 0; i < n; ++i) {
    const int m = std::popcount(nb[i] & static_cast<std::uint32_t>(mask));
    const bool plays_d = (mask >> i) & 1;
    const auto& weak = plays_d ? t.weak_d[i] : t.weak_c[i];
    const auto& str = plays_d ? t.strict_d[i] : t.strict_c[i];
    if (!weak[m]) return false;
    if (!str[m]) strict = false;
  }
  if (strict_out) *strict_out = strict;
  return true;
}

void check_cap(const Graph& g, int cap) {
  if (g.size() > cap)
    throw std::invalid_argument("enumeration: " + std::to_string(g.size()) +
                                " nodes exceeds brute-force cap " + std::to_string(cap));
  if (g.size() > 32) throw std::invalid_argument("enumeration: node count above 32 unsupported");
}

}  // namespace

std::string PureProfile::to_bits() const {
  std::string out(s.size(), '0');
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] ? '1' : '0';
  return out;
}

PureProfile PureProfile::from_bits(const std::string& bits) {
  PureProfile p;
  p.s.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("PureProfile: bad bit string");
    p.s.push_back(c == '1');
  }
  return p;
}

PureProfile PureProfile::from_mask(std::uint64_t mask, int n) {
  PureProfile p;
  p.s.resize(n);
  for (int i = 0; i < n; ++i) p.s[i] = (mask >> i) & 1;
  return p;
}

std::uint64_t PureProfile::to_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) mask |= (std::uint64_t{1} << i);
  return mask;
}

namespace {

// Certificate check for a single supplied profile; works for any graph size
// (no brute-force cap applies here).
bool profile_ok_direct(const ActionTables& t, const Graph& g, const PureProfile& profile,
                       bool* strict_out) {
  bool strict = true;
  for (int i = 0; i < g.size(); ++i) {
    int m = 0;
    for (int j : g.neighbors(i)) m += profile.s[j] ? 1 : 0;
    const auto& weak = profile.s[i] ? t.weak_d[i] : t.weak_c[i];
    const auto& str = profile.s[i] ? t.strict_d[i] : t.strict_c[i];
    if (!weak[m]) return false;
    if (!str[m]) strict = false;
  }
  if (strict_out) *strict_out = strict;
  return true;
}

}  // namespace

bool is_pure_ne(const Graph& g, const PayoffMatrix& payoff, const PureProfile& profile,
                bool* strict_out) {
  if (static_cast<int>(profile.s.size()) != g.size())
    throw std::invalid_argument("is_pure_ne: profile length mismatch");
  return profile_ok_direct(best_response_tables(g, payoff), g, profile, strict_out);
}

bool cohesiveness_pure_ne(const Graph& g, const PayoffMatrix& payoff, const PureProfile& profile,
                          bool* strict_out) {
  if (static_cast<int>(profile.s.size()) != g.size())
    throw std::invalid_argument("cohesiveness_pure_ne: profile length mismatch");
  return profile_ok_direct(cohesiveness_tables(g, payoff), g, profile, strict_out);
}

std::vector<NeRecord> enumerate_pure_ne(const Graph& g, const PayoffMatrix& payoff, int cap,
                                        bool parallel) {
  check_cap(g, cap);
  const int n = g.size();
  const std::uint64_t total = std::uint64_t{1} << n;
  const auto br = best_response_tables(g, payoff);
  const auto coh = cohesiveness_tables(g, payoff);
  const auto nb = neighbor_masks(g);

  const int blocks = parallel ? omp_get_max_threads() * 4 : 1;
  std::vector<std::vector<NeRecord>> found(blocks);
  bool mismatch = false;

#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < blocks; ++b) {
    const std::uint64_t lo = total * b / blocks;
    const std::uint64_t hi = total * (b + 1) / blocks;
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      bool strict_br = false, strict_coh = false;
      const bool ok_br = profile_ok(br, nb, mask, n, &strict_br);
      const bool ok_coh = profile_ok(coh, nb, mask, n, &strict_coh);
      if (ok_br != ok_coh || (ok_br && strict_br != strict_coh)) {
#pragma omp atomic write
        mismatch = true;
        continue;
      }
      if (ok_br) found[b].push_back({PureProfile::from_mask(mask, n), strict_br});
    }
  }
  if (mismatch)
    throw std::logic_error(
        "enumerate_pure_ne: best-response and cohesiveness characterizations disagree");
  std::vector<NeRecord> out;
  for (auto& part : found)
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  return out;
}

namespace {

// Per-agent limiting-BE tables from thresholds r1(eta_i), r2(eta_i).
template <typename Eta>
std::pair<std::vector<std::vector<char>>, std::vector<std::vector<char>>> limiting_tables(
    const Graph& g, const PayoffMatrix& p, const std::vector<Eta>& eta) {
  const int n = g.size();
  if (static_cast<int>(eta.size()) != n)
    throw std::invalid_argument("enumerate_limiting_be: eta length mismatch");
  std::vector<std::vector<char>> ok_d(n), ok_c(n);
  for (int i = 0; i < n; ++i) {
    const int d = g.degree(i);
    ok_d[i].resize(d + 1);
    ok_c[i].resize(d + 1);
    if constexpr (std::is_same_v<Eta, Rational>) {
      const auto thr = limiting_thresholds(p, eta[i]);
      for (int m = 0; m <= d; ++m) {
        if (d == 0) {
          ok_d[i][m] = ok_c[i][m] = 0;
          continue;
        }
        ok_d[i][m] = Rational(m, d) > thr.r1;
        ok_c[i][m] = Rational(d - m, d) > thr.r2;
      }
    } else {
      const auto [r1, r2] = limiting_thresholds(p, static_cast<double>(eta[i]));
      for (int m = 0; m <= d; ++m) {
        if (d == 0) {
          ok_d[i][m] = ok_c[i][m] = 0;
          continue;
        }
        ok_d[i][m] = static_cast<double>(m) / d > r1 + kFloatStrictMargin;
        ok_c[i][m] = static_cast<double>(d - m) / d > r2 + kFloatStrictMargin;
      }
    }
  }
  return {ok_d, ok_c};
}

template <typename Eta>
std::vector<PureProfile> enumerate_limiting_impl(const Graph& g, const PayoffMatrix& payoff,
                                                 const std::vector<Eta>& eta, int cap,
                                                 bool parallel) {
  check_cap(g, cap);
  if (!validate(payoff).assumption1)
    throw std::invalid_argument("enumerate_limiting_be: payoff violates coordination assumptions");
  const int n = g.size();
  const std::uint64_t total = std::uint64_t{1} << n;
  const auto [ok_d, ok_c] = limiting_tables(g, payoff, eta);
  const auto nb = neighbor_masks(g);

  const int blocks = parallel ? omp_get_max_threads() * 4 : 1;
  std::vector<std::vector<PureProfile>> found(blocks);
#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < blocks; ++b) {
    const std::uint64_t lo = total * b / blocks;
    const std::uint64_t hi = total * (b + 1) / blocks;
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        const int m = std::popcount(nb[i] & static_cast<std::uint32_t>(mask));
        ok = ((mask >> i) & 1) ? static_cast<bool>(ok_d[i][m]) : static_cast<bool>(ok_c[i][m]);
      }
      if (ok) found[b].push_back(PureProfile::from_mask(mask, n));
    }
  }
  std::vector<PureProfile> out;
  for (auto& part : found)
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  return out;
}

}  // namespace

bool is_limiting_be(const Graph& g, const PayoffMatrix& payoff, const std::vector<Rational>& eta,
                    const PureProfile& profile) {
  if (static_cast<int>(profile.s.size()) != g.size())
    throw std::invalid_argument("is_limiting_be: profile length mismatch");
  const auto [ok_d, ok_c] = limiting_tables(g, payoff, eta);
  for (int i = 0; i < g.size(); ++i) {
    int m = 0;
    for (int j : g.neighbors(i)) m += profile.s[j] ? 1 : 0;
    const bool ok =
        profile.s[i] ? static_cast<bool>(ok_d[i][m]) : static_cast<bool>(ok_c[i][m]);
    if (!ok) return false;
  }
  return true;
}

std::vector<PureProfile> enumerate_limiting_be(const Graph& g, const PayoffMatrix& payoff,
                                               const std::vector<Rational>& eta, int cap,
                                               bool parallel) {
  return enumerate_limiting_impl(g, payoff, eta, cap, parallel);
}

std::vector<PureProfile> enumerate_limiting_be(const Graph& g, const PayoffMatrix& payoff,
                                               const std::vector<double>& eta, int cap,
                                               bool parallel) {
  return enumerate_limiting_impl(g, payoff, eta, cap, parallel);
}

}  // namespace ewanet
