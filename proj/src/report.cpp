// SPDX-License-Identifier: Apache-2.0
#include "helio/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "helio/dataset.hpp"
#include "helio/error.hpp"
#include "helio/format.hpp"

namespace helio {

double upsample_error(std::span<const cdouble> truth, std::span<const cdouble> est) {
  if (truth.size() != est.size() || truth.empty())
    throw PreconditionError("upsample_error needs equal, nonempty lengths");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += std::abs(truth[i] - est[i]);
    den += std::abs(truth[i]);
  }
  if (!(den > 0.0)) throw DomainError("upsample_error is undefined for an all-zero ground truth");
  if (num == 0.0) return kPerfectFitDb;
  return std::max(kPerfectFitDb, 20.0 * std::log10(num / den));
}

void ErrorReport::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.method, a.freq_hz, a.seed, a.spec) <
           std::tie(b.method, b.freq_hz, b.seed, b.spec);
  });
}

std::size_t ErrorReport::failed_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.failed(); }));
}

namespace {

constexpr const char* kHeader = "method,spec,freq_hz,seed,error_db";

std::string format_db(double v) { return std::isnan(v) ? "nan" : format_double(v); }

}  // namespace

std::string report_to_csv(const ErrorReport& report) {
  ErrorReport sorted = report;
  sorted.sort();
  std::string out = std::string(kHeader) + '\n';
  for (const auto& r : sorted.rows) {
    out += r.method + ',' + r.spec + ',' + format_double(r.freq_hz) + ',' + std::to_string(r.seed) +
           ',' + format_db(r.error_db) + '\n';
  }
  return out;
}

ErrorReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kHeader)
    throw ConfigError(std::string("report CSV must start with header ") + kHeader);
  ErrorReport report;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv(trim(line));
    if (f.size() != 5)
      throw ConfigError("report CSV line " + std::to_string(lineno) + ": expected 5 fields");
    ReportRow r;
    r.method = f[0];
    r.spec = f[1];
    r.freq_hz = parse_double(f[2]);
    const long long seed = parse_int(f[3]);
    if (seed < 0) throw ConfigError("report CSV line " + std::to_string(lineno) + ": negative seed");
    r.seed = static_cast<std::uint64_t>(seed);
    if (f[4] == "nan") {
      r.error_db = std::numeric_limits<double>::quiet_NaN();
      r.failure = "failed";
    } else {
      r.error_db = parse_double(f[4]);
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

nlohmann::json report_to_json(const ErrorReport& report) {
  ErrorReport sorted = report;
  sorted.sort();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : sorted.rows) {
    nlohmann::json j = {{"method", r.method},  {"spec", r.spec},
                        {"freq_hz", r.freq_hz}, {"seed", r.seed},
                        {"peak_unknown", r.peak_unknown}, {"peak_known", r.peak_known}};
    j["error_db"] = r.failed() ? nlohmann::json(nullptr) : nlohmann::json(r.error_db);
    if (r.failed()) j["failure"] = r.failure;
    rows.push_back(std::move(j));
  }
  return {{"rows", std::move(rows)}};
}

void emit_report(const ErrorReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, report_to_csv(report));
}

ErrorReport read_report(const std::filesystem::path& path) { return report_from_csv(read_file(path)); }

Comparison compare_reports(const ErrorReport& a, const ErrorReport& b,
                           const std::optional<std::string>& method_a,
                           const std::optional<std::string>& method_b) {
  using Key = std::pair<double, std::uint64_t>;
  auto index = [](const ErrorReport& r, const std::optional<std::string>& method, const char* side) {
    std::map<Key, double> m;
    for (const auto& row : r.rows) {
      if (method && row.method != *method) continue;
      if (!m.emplace(Key{row.freq_hz, row.seed}, row.error_db).second)
        throw ConfigError(std::string("report ") + side +
                          " has several rows per (freq, seed); select one method");
    }
    return m;
  };
  const auto ia = index(a, method_a, "A");
  const auto ib = index(b, method_b, "B");

  Comparison cmp;
  std::map<double, std::pair<double, std::size_t>> sums;
  for (const auto& [key, adb] : ia) {
    const auto it = ib.find(key);
    if (it == ib.end()) continue;
    const double delta = adb - it->second;
    cmp.rows.push_back({key.first, key.second, adb, it->second, delta});
    auto& s = sums[key.first];
    s.first += delta;
    ++s.second;
  }
  if (cmp.rows.empty()) throw ConfigError("reports share no (freq, seed) keys");
  for (const auto& [freq, s] : sums)
    cmp.per_freq.push_back({freq, s.first / static_cast<double>(s.second), s.second});
  return cmp;
}

std::string comparison_to_text(const Comparison& cmp) {
  std::string out = "freq_hz,seed,a_db,b_db,delta_db\n";
  for (const auto& r : cmp.rows)
    out += format_double(r.freq_hz) + ',' + std::to_string(r.seed) + ',' + format_db(r.a_db) + ',' +
           format_db(r.b_db) + ',' + format_db(r.delta_db) + '\n';
  out += "\nfreq_hz,mean_delta_db,count\n";
  for (const auto& m : cmp.per_freq)
    out += format_double(m.freq_hz) + ',' + format_db(m.mean_delta_db) + ',' +
           std::to_string(m.count) + '\n';
  return out;
}

}  // namespace helio
