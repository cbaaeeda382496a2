// aquasim: run scenarios of the clone-based mobile edge simulator.
//
//   aquasim run      --config <file> [--seed N] [--out <path>] [--format csv|json]
//   aquasim sweep    --config <file> --param <key> --values <a,b,...> [--jobs N] [...]
//   aquasim validate --config <file>
//
// Exit codes: 0 ok, 1 invalid config, 2 scenario failure, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aqua/config/run_config.hpp"
#include "aqua/errors.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3 };

void write_output(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw aqua::IoError("cannot write to stdout");
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw aqua::IoError("cannot open '" + *path + "' for writing");
  out << text;
  out.close();
  if (!out) throw aqua::IoError("cannot write '" + *path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clone-based mobile edge network simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::string param;
  std::vector<std::string> values;
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "Run the configured scenario");
  run->add_option("--config", config_path, "JSON run config")->required();
  run->add_option("--seed", seed, "Override the config seed(s)");
  run->add_option("--out", out_path, "Output file (default: output.path or stdout)");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* sweep = app.add_subcommand("sweep", "Run once per value of one config key");
  sweep->add_option("--config", config_path, "JSON run config")->required();
  sweep->add_option("--param", param, "Dotted config key, e.g. streaming.wireless_loss")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  sweep->add_option("--seed", seed, "Override the config seed(s)");
  sweep->add_option("--out", out_path, "Output file (default: output.path or stdout)");
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config_path, "JSON run config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    const auto doc = aqua::config::read_document(config_path);
    if (*validate) {
      const auto cfg = aqua::config::parse_config(doc);
      std::cout << "ok: " << cfg.scenario << "\n";
      return kOk;
    }

    auto cfg = aqua::config::parse_config(doc);
    if (format) cfg.format = aqua::metrics::parse_format(*format);
    const auto destination = out_path ? out_path : cfg.output_path;

    std::vector<aqua::metrics::MetricsReport> reports;
    if (*run) {
      if (seed) cfg.seeds = {*seed};
      reports = aqua::config::run(cfg);
    } else {
      reports = aqua::config::run_sweep(doc, {param, values, jobs}, seed);
    }
    write_output(aqua::metrics::export_reports(reports, cfg.format), destination);
    return kOk;
  } catch (const aqua::ConfigurationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const aqua::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kRuntime;
  }
}
