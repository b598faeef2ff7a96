#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ewanet/graph.hpp"
#include "ewanet/payoff.hpp"

namespace ewanet {

// Pure action profile: 0 = C, 1 = D. Serialized as a bit string with agent 0
// leftmost ("001011").
struct PureProfile {
  std::vector<std::uint8_t> s;

  std::string to_bits() const;
  static PureProfile from_bits(const std::string& bits);
  static PureProfile from_mask(std::uint64_t mask, int n);
  std::uint64_t to_mask() const;

  bool operator==(const PureProfile& other) const { return s == other.s; }
};

struct NeRecord {
  PureProfile profile;
  bool strict = false;  // every inequality strict
};

// Weak best-response test for one profile (each agent's action at least ties
// the alternative against the realized neighborhood).
bool is_pure_ne(const Graph& g, const PayoffMatrix& payoff, const PureProfile& profile,
                bool* strict_out = nullptr);

// Equivalent characterization through subset cohesiveness: the D set must be
// r-cohesive and the C set (1-r)-cohesive, r = ne_threshold. Kept as an
// independent route; enumeration evaluates both and asserts they agree.
bool cohesiveness_pure_ne(const Graph& g, const PayoffMatrix& payoff, const PureProfile& profile,
                          bool* strict_out = nullptr);

// All weak pure Nash equilibria by brute force over 2^n profiles, each
// verified by both routes above. Throws when n exceeds the cap.
std::vector<NeRecord> enumerate_pure_ne(const Graph& g, const PayoffMatrix& payoff, int cap = 20,
                                        bool parallel = true);

// Pure profiles surviving the limiting thresholds: every D member needs
// m_i/d_i > r1(eta_i) and every C member (d_i-m_i)/d_i > r2(eta_i), strictly.
// The exact-rational overload never hinges on float ties.
bool is_limiting_be(const Graph& g, const PayoffMatrix& payoff, const std::vector<Rational>& eta,
                    const PureProfile& profile);
std::vector<PureProfile> enumerate_limiting_be(const Graph& g, const PayoffMatrix& payoff,
                                               const std::vector<Rational>& eta, int cap = 20,
                                               bool parallel = true);
std::vector<PureProfile> enumerate_limiting_be(const Graph& g, const PayoffMatrix& payoff,
                                               const std::vector<double>& eta, int cap = 20,
                                               bool parallel = true);

}  // namespace ewanet
