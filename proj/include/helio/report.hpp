// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "helio/sh.hpp"

namespace helio {

/// Returned instead of -inf when the estimate is exact.
inline constexpr double kPerfectFitDb = -300.0;

/// 20 log10( sum |truth - est| / sum |truth| ), clamped at kPerfectFitDb.
double upsample_error(std::span<const cdouble> truth, std::span<const cdouble> est);

struct ReportRow {
  std::string method;  ///< SH, NN or PINN
  std::string spec;    ///< configuration descriptor, no commas
  double freq_hz = 0.0;
  std::uint64_t seed = 0;
  double error_db = 0.0;  ///< NaN marks a failed run

  // Diagnostics carried in memory and in the JSON mirror only.
  double peak_unknown = 0.0;  ///< max |estimate| over the unknown set
  double peak_known = 0.0;    ///< max |pressure| over the known set
  std::string failure;

  bool failed() const { return !failure.empty(); }
};

struct ErrorReport {
  std::vector<ReportRow> rows;

  /// Canonical order: method, freq, seed, spec.
  void sort();
  std::size_t failed_count() const;
};

std::string report_to_csv(const ErrorReport& report);
ErrorReport report_from_csv(const std::string& text);
nlohmann::json report_to_json(const ErrorReport& report);

/// Writes the CSV (atomically) in canonical order.
void emit_report(const ErrorReport& report, const std::filesystem::path& path);
ErrorReport read_report(const std::filesystem::path& path);

struct CompareRow {
  double freq_hz = 0.0;
  std::uint64_t seed = 0;
  double a_db = 0.0;
  double b_db = 0.0;
  double delta_db = 0.0;  ///< a - b
};

struct CompareMean {
  double freq_hz = 0.0;
  double mean_delta_db = 0.0;
  std::size_t count = 0;
};

struct Comparison {
  std::vector<CompareRow> rows;
  std::vector<CompareMean> per_freq;
};

/// Matches rows on (freq, seed), optionally restricted to one method per side.
/// Keys present on one side only are skipped. Throws ConfigError when a side
/// has duplicate keys or when no key is shared.
Comparison compare_reports(const ErrorReport& a, const ErrorReport& b,
                           const std::optional<std::string>& method_a,
                           const std::optional<std::string>& method_b);

std::string comparison_to_text(const Comparison& cmp);

}  // namespace helio
