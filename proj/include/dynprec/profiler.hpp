// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dynprec {

enum class OpKind { add, sub, mul };

inline const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
  }
  return "?";
}

/// One arithmetic operation as seen by the counter. q and p are the section
/// indices of the operands (q <= p).
struct OpRecord {
  OpKind kind;
  int q;
  int p;
  std::uint64_t mults;
  std::uint64_t adds;
};

/// Tally of grossdigit work.
///
/// A grossdigit multiplication is one chunk-by-chunk product. A grossdigit
/// addition is one chunk-level sum of two operand terms at the same power;
/// carry propagation and redistribution are tallied separately as carries.
class OpCounter {
 public:
  explicit OpCounter(bool keep_breakdown = true) : keep_breakdown_(keep_breakdown) {}

  void record(OpKind kind, int q, int p, std::uint64_t mults, std::uint64_t adds) {
    if (q > p) std::swap(q, p);
    mults_ += mults;
    adds_ += adds;
    if (keep_breakdown_) breakdown_.push_back({kind, q, p, mults, adds});
  }

  void record_carries(std::uint64_t n) { carries_ += n; }

  std::uint64_t grossdigit_mults() const noexcept { return mults_; }
  std::uint64_t grossdigit_adds() const noexcept { return adds_; }
  std::uint64_t carries() const noexcept { return carries_; }
  const std::vector<OpRecord>& breakdown() const noexcept { return breakdown_; }

  void merge(const OpCounter& other) {
    mults_ += other.mults_;
    adds_ += other.adds_;
    carries_ += other.carries_;
    breakdown_.insert(breakdown_.end(), other.breakdown_.begin(), other.breakdown_.end());
  }

  /// CSV with one line per (kind, q, p): op,q,p,count,mults,adds
  void write_csv(std::ostream& os) const {
    std::map<std::tuple<int, int, int>, std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> agg;
    for (const auto& r : breakdown_) {
      auto& [n, m, a] = agg[{static_cast<int>(r.kind), r.q, r.p}];
      ++n;
      m += r.mults;
      a += r.adds;
    }
    os << "op,q,p,count,mults,adds\n";
    for (const auto& [key, val] : agg) {
      os << to_string(static_cast<OpKind>(std::get<0>(key))) << ',' << std::get<1>(key) << ','
         << std::get<2>(key) << ',' << std::get<0>(val) << ',' << std::get<1>(val) << ','
         << std::get<2>(val) << '\n';
    }
    os << "total,,,," << mults_ << ',' << adds_ << '\n';
  }

 private:
  bool keep_breakdown_;
  std::uint64_t mults_ = 0;
  std::uint64_t adds_ = 0;
  std::uint64_t carries_ = 0;
  std::vector<OpRecord> breakdown_;
};

/// Predicted cost of X^(q) * Y^(p) as tabulated for the convolution product.
inline std::pair<std::uint64_t, std::uint64_t> predict_mul_cost(int q, int p) {
  if (q > p) std::swap(q, p);
  const auto qq = static_cast<std::int64_t>(q);
  const auto pp = static_cast<std::int64_t>(p);
  return {static_cast<std::uint64_t>((qq + 1) * (pp + 1)),
          static_cast<std::uint64_t>(qq * pp - qq * (qq - 1) / 2)};
}

/// Predicted grossdigit additions of X^(q) + Y^(p).
inline std::uint64_t predict_add_cost(int q, int p) {
  return static_cast<std::uint64_t>(std::min(q, p) + 1);
}

}  // namespace dynprec
