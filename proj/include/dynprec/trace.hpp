// Copyright 2026 The dynprec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dynprec/gross_float.hpp"

namespace dynprec {

/// One row of a step table: a label, a scale column ("2^0", "-2^1") and one
/// cell per power of G (key j is the column of G^-j; j may be negative).
struct TraceRow {
  std::string label;
  std::string scale;
  std::map<int, std::string> cells;

  bool operator==(const TraceRow&) const = default;
};

inline std::string scale_text(const ArithConfig& cfg, int sign, std::int64_t exponent) {
  return std::string(sign < 0 ? "-" : "") + std::to_string(cfg.base()) + "^" + std::to_string(exponent);
}

inline TraceRow value_row(std::string label, const GrossFloat& x) {
  TraceRow r{std::move(label), "", {}};
  if (x.is_zero()) {
    r.scale = "0";
    return r;
  }
  r.scale = scale_text(x.config(), x.sign(), x.exponent());
  for (std::size_t j = 0; j < x.size(); ++j) r.cells[static_cast<int>(j)] = x.grossdigit(j).to_string();
  return r;
}

/// Row from raw per-power integers; `frac` fraction digits per cell.
inline TraceRow wide_row(std::string label, const ArithConfig& cfg, std::int64_t exponent, int top,
                         const std::vector<Wide>& wide, int frac) {
  TraceRow r{std::move(label), scale_text(cfg, 1, exponent), {}};
  for (std::size_t i = 0; i < wide.size(); ++i)
    r.cells[top + static_cast<int>(i)] = detail::format_fixed(cfg, wide[i], frac);
  return r;
}

/// "2^0 | 1.110 | 1.010 | 1.110"
inline std::string format_table_row(const GrossFloat& x) {
  if (x.is_zero()) return "0";
  std::string s = scale_text(x.config(), x.sign(), x.exponent());
  for (std::size_t j = 0; j < x.size(); ++j) s += " | " + x.grossdigit(j).to_string();
  return s;
}

/// Ordered step table in the layout of a hand-worked pipeline.
class PipelineTrace {
 public:
  void add(TraceRow row) { rows_.push_back(std::move(row)); }

  /// Appends `rows`, packing consecutive rows whose columns do not overlap
  /// into one line.
  void add_packed(const std::vector<TraceRow>& rows) {
    std::vector<TraceRow> packed;
    for (const auto& r : rows) {
      if (!packed.empty() && !packed.back().cells.empty() && !r.cells.empty() &&
          packed.back().cells.rbegin()->first < r.cells.begin()->first && packed.back().scale == r.scale &&
          r.label.empty()) {
        packed.back().cells.insert(r.cells.begin(), r.cells.end());
      } else {
        packed.push_back(r);
      }
    }
    for (auto& r : packed) rows_.push_back(std::move(r));
  }

  const std::vector<TraceRow>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }

  /// Rows whose label starts with `prefix`, plus their unlabeled continuation rows.
  std::vector<TraceRow> step(const std::string& prefix) const {
    std::vector<TraceRow> out;
    bool in = false;
    for (const auto& r : rows_) {
      if (!r.label.empty()) in = r.label.rfind(prefix, 0) == 0;
      if (in) out.push_back(r);
    }
    return out;
  }

  std::string render() const {
    if (rows_.empty()) return {};
    int lo = 0;
    int hi = 0;
    std::size_t lw = 0;
    std::size_t sw = 0;
    std::map<int, std::size_t> cw;
    for (const auto& r : rows_) {
      lw = std::max(lw, r.label.size());
      sw = std::max(sw, r.scale.size());
      for (const auto& [j, s] : r.cells) {
        lo = std::min(lo, j);
        hi = std::max(hi, j);
        cw[j] = std::max(cw[j], s.size());
      }
    }
    for (int j = lo; j <= hi; ++j) cw[j] = std::max(cw[j], std::string("G^") .size() + std::to_string(-j).size());
    auto pad = [](const std::string& s, std::size_t n) { return s + std::string(n > s.size() ? n - s.size() : 0, ' '); };
    std::ostringstream os;
    os << pad("", lw) << " | " << pad("", sw);
    for (int j = lo; j <= hi; ++j) os << " | " << pad("G^" + std::to_string(-j), cw[j]);
    os << '\n';
    for (const auto& r : rows_) {
      std::string line = pad(r.label, lw) + " | " + pad(r.scale, sw);
      for (int j = lo; j <= hi; ++j) {
        auto it = r.cells.find(j);
        line += " | " + pad(it == r.cells.end() ? "" : it->second, cw[j]);
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      os << line << '\n';
    }
    return os.str();
  }

  /// label,scale,G^<top>,...,G^<bottom>
  std::string render_csv() const {
    int lo = 0;
    int hi = 0;
    for (const auto& r : rows_)
      for (const auto& [j, s] : r.cells) {
        lo = std::min(lo, j);
        hi = std::max(hi, j);
      }
    std::ostringstream os;
    os << "label,scale";
    for (int j = lo; j <= hi; ++j) os << ",G^" << -j;
    os << '\n';
    for (const auto& r : rows_) {
      os << r.label << ',' << r.scale;
      for (int j = lo; j <= hi; ++j) {
        auto it = r.cells.find(j);
        os << ',' << (it == r.cells.end() ? "" : it->second);
      }
      os << '\n';
    }
    return os.str();
  }

 private:
  std::vector<TraceRow> rows_;
};

}  // namespace dynprec
