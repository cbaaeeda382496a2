#include "aqua/metrics/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "aqua/errors.hpp"

namespace aqua::metrics {
namespace {

constexpr std::array<std::string_view, 17> kIntegerKeys = {
    "bytes.access_up.first_tx",    "bytes.access_up.retransmit",
    "bytes.access_down.first_tx",  "bytes.access_down.retransmit",
    "bytes.fronthaul.first_tx",    "bytes.fronthaul.retransmit",
    "bytes.backhaul.first_tx",     "bytes.backhaul.retransmit",
    "bytes.intra_cloud.first_tx",  "bytes.intra_cloud.retransmit",
    "count.spawn",                 "count.destroy",
    "count.migrate",               "count.cache.hit",
    "count.cache.miss",            "count.offload.local",
    "count.offload.remote",
};

constexpr std::array<std::string_view, 2> kRealKeys = {"time.task.finish",
                                                       "time.stream.completion"};

bool is_integer_key(std::string_view key) {
  return std::find(kIntegerKeys.begin(), kIntegerKeys.end(), key) != kIntegerKeys.end();
}

bool is_real_key(std::string_view key) {
  return std::find(kRealKeys.begin(), kRealKeys.end(), key) != kRealKeys.end();
}

std::string value_token(const CounterValue& v) {
  if (const auto* i = std::get_if<std::uint64_t>(&v)) return std::to_string(*i);
  return format_real(std::get<double>(v));
}

struct Row {
  std::string key;
  std::string value;
  bool is_string;
};

std::vector<Row> sorted_rows(const MetricsReport& r) {
  std::vector<Row> rows;
  for (const auto& [k, v] : r.counters()) rows.push_back({k, value_token(v), false});
  for (const auto& [k, v] : r.metadata()) rows.push_back({"meta." + k, v, true});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.key < b.key; });
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_csv_rows(std::string& out, const MetricsReport& r) {
  const std::string prefix = csv_field(r.scenario()) + "," + std::to_string(r.seed()) + ",";
  for (const auto& row : sorted_rows(r)) {
    out += prefix;
    out += csv_field(row.key);
    out += ',';
    out += csv_field(row.value);
    out += '\n';
  }
}

void append_json_object(std::string& out, const MetricsReport& r) {
  out += "{\"scenario\":";
  out += nlohmann::json(r.scenario()).dump();
  out += ",\"seed\":";
  out += std::to_string(r.seed());
  for (const auto& row : sorted_rows(r)) {
    out += ',';
    out += nlohmann::json(row.key).dump();
    out += ':';
    out += row.is_string ? nlohmann::json(row.value).dump() : row.value;
  }
  out += '}';
}

}  // namespace

bool is_declared_key(std::string_view key) { return is_integer_key(key) || is_real_key(key); }

KeyKind key_kind(std::string_view key) {
  if (is_integer_key(key)) return KeyKind::Integer;
  if (is_real_key(key)) return KeyKind::Real;
  throw InternalError("undeclared metrics key: " + std::string(key));
}

void MetricsReport::negative_delta(std::string_view key) {
  throw InternalError("negative delta for counter " + std::string(key));
}

void MetricsReport::record_integer(std::string_view key, std::uint64_t delta) {
  if (key_kind(key) != KeyKind::Integer) {
    throw InternalError("integer delta recorded on real key " + std::string(key));
  }
  auto it = counters_.find(key);
  if (it == counters_.end()) {
    counters_.emplace(std::string(key), delta);
  } else {
    std::get<std::uint64_t>(it->second) += delta;
  }
}

void MetricsReport::record(std::string_view key, double delta) {
  if (key_kind(key) != KeyKind::Real) {
    throw InternalError("real delta recorded on integer key " + std::string(key));
  }
  if (!std::isfinite(delta)) throw InternalError("non-finite delta for " + std::string(key));
  auto it = counters_.find(key);
  if (it == counters_.end()) {
    counters_.emplace(std::string(key), delta);
  } else {
    std::get<double>(it->second) += delta;
  }
}

void MetricsReport::set(std::string_view key, double value) {
  if (key_kind(key) != KeyKind::Real) {
    throw InternalError("set() is only valid for time keys: " + std::string(key));
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw InternalError("time values must be finite and non-negative: " + std::string(key));
  }
  counters_.insert_or_assign(std::string(key), CounterValue{value});
}

void MetricsReport::set_metadata(std::string_view name, std::string value) {
  metadata_.insert_or_assign(std::string(name), std::move(value));
}

double MetricsReport::value(std::string_view key) const {
  auto it = counters_.find(key);
  if (it == counters_.end()) return 0.0;
  if (const auto* i = std::get_if<std::uint64_t>(&it->second)) return static_cast<double>(*i);
  return std::get<double>(it->second);
}

std::uint64_t MetricsReport::count(std::string_view key) const {
  auto it = counters_.find(key);
  if (it == counters_.end()) return 0;
  if (const auto* i = std::get_if<std::uint64_t>(&it->second)) return *i;
  throw InternalError("count() on real key " + std::string(key));
}

bool MetricsReport::has(std::string_view key) const { return counters_.contains(key); }

void MetricsReport::merge(const MetricsReport& other) {
  for (const auto& [k, v] : other.counters_) {
    if (const auto* i = std::get_if<std::uint64_t>(&v)) {
      record_integer(k, *i);
    } else {
      record(k, std::get<double>(v));
    }
  }
}

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  if (res.ec != std::errc{}) throw InternalError("cannot format real value");
  return std::string(buf, res.ptr);
}

std::string export_csv(const MetricsReport& report) {
  return export_csv(std::span<const MetricsReport>(&report, 1));
}

std::string export_csv(std::span<const MetricsReport> reports) {
  std::string out = "scenario,seed,key,value\n";
  for (const auto& r : reports) append_csv_rows(out, r);
  return out;
}

std::string export_json(const MetricsReport& report) {
  std::string out;
  append_json_object(out, report);
  out += '\n';
  return out;
}

std::string export_json(std::span<const MetricsReport> reports) {
  std::string out = "[";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i) out += ',';
    out += '\n';
    append_json_object(out, reports[i]);
  }
  out += "\n]\n";
  return out;
}

std::string export_report(const MetricsReport& report, Format format) {
  return format == Format::Csv ? export_csv(report) : export_json(report);
}

std::string export_reports(std::span<const MetricsReport> reports, Format format) {
  return format == Format::Csv ? export_csv(reports) : export_json(reports);
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ConfigurationError("unknown output format '" + std::string(name) +
                           "' (expected csv or json)");
}

}  // namespace aqua::metrics
