#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace aqua::metrics {

enum class KeyKind { Integer, Real };

/// Keys a report may carry. Byte and count keys are integers, time keys reals.
///
///   bytes.{access_up,access_down,fronthaul,backhaul,intra_cloud}.{first_tx,retransmit}
///   time.{task.finish,stream.completion}
///   count.{spawn,destroy,migrate,cache.hit,cache.miss,offload.local,offload.remote}
///
/// Run metadata (e.g. sweep parameters) lives under `meta.` and is set with
/// MetricsReport::set_metadata, never with record().
bool is_declared_key(std::string_view key);
KeyKind key_kind(std::string_view key);

using CounterValue = std::variant<std::uint64_t, double>;

/// Counters for one simulation run. Not thread-safe; immutable once the run
/// that owns it finishes.
class MetricsReport {
 public:
  MetricsReport() = default;
  MetricsReport(std::string scenario, std::uint64_t seed)
      : scenario_(std::move(scenario)), seed_(seed) {}

  const std::string& scenario() const noexcept { return scenario_; }
  void set_scenario(std::string s) { scenario_ = std::move(s); }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Adds `delta` to an integer (bytes/count) key.
  template <std::integral T>
  void record(std::string_view key, T delta) {
    if constexpr (std::is_signed_v<T>) {
      if (delta < 0) negative_delta(key);
    }
    record_integer(key, static_cast<std::uint64_t>(delta));
  }
  /// Adds `delta` to a real (time) key.
  void record(std::string_view key, double delta);

  /// Overwrites a real (time) key.
  void set(std::string_view key, double value);

  void set_metadata(std::string_view name, std::string value);

  /// Integer counters as double; absent keys read as 0.
  double value(std::string_view key) const;
  std::uint64_t count(std::string_view key) const;
  bool has(std::string_view key) const;

  const std::map<std::string, CounterValue, std::less<>>& counters() const noexcept {
    return counters_;
  }
  const std::map<std::string, std::string, std::less<>>& metadata() const noexcept {
    return metadata_;
  }

  /// Adds every counter of `other` into this report.
  void merge(const MetricsReport& other);

  bool operator==(const MetricsReport&) const = default;

 private:
  void record_integer(std::string_view key, std::uint64_t delta);
  [[noreturn]] static void negative_delta(std::string_view key);

  std::string scenario_;
  std::uint64_t seed_ = 0;
  std::map<std::string, CounterValue, std::less<>> counters_;
  std::map<std::string, std::string, std::less<>> metadata_;
};

enum class Format { Csv, Json };

/// Fixed-point with six decimals, '.' separator, independent of locale.
std::string format_real(double v);

/// Long format: header `scenario,seed,key,value`, rows sorted by key.
/// Metadata rows use `meta.<name>` keys and sort with the rest.
std::string export_csv(const MetricsReport& report);
std::string export_csv(std::span<const MetricsReport> reports);

/// Flat object: "scenario", "seed", then one member per key in the same
/// order and with the same value tokens as the CSV.
std::string export_json(const MetricsReport& report);
/// JSON array of flat objects.
std::string export_json(std::span<const MetricsReport> reports);

std::string export_report(const MetricsReport& report, Format format);
std::string export_reports(std::span<const MetricsReport> reports, Format format);

Format parse_format(std::string_view name);

}  // namespace aqua::metrics
