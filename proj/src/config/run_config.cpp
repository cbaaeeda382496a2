#include "aqua/config/run_config.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "aqua/errors.hpp"

namespace aqua::config {
namespace {

using nlohmann::json;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigurationError(key + ": " + what);
}

std::string show(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

/// Typed, path-aware view of one JSON object.
class Block {
 public:
  Block(const json& j, std::string path, std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    for (const auto& [k, v] : j_.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(join(path_, k), "unknown key");
      }
    }
  }

  bool has(std::string_view key) const { return j_.contains(key); }
  const json& at(std::string_view key) const { return j_.at(key); }
  std::string key(std::string_view k) const { return join(path_, k); }

  double number(std::string_view k, double def) const {
    if (!has(k)) return def;
    const auto& v = at(k);
    if (!v.is_number()) fail(key(k), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key(k), "must be finite");
    return d;
  }

  double positive(std::string_view k, double def) const {
    const double d = number(k, def);
    if (!(d > 0.0)) fail(key(k), "must be > 0, got " + show(d));
    return d;
  }

  double non_negative(std::string_view k, double def) const {
    const double d = number(k, def);
    if (d < 0.0) fail(key(k), "must be >= 0, got " + show(d));
    return d;
  }

  std::uint64_t unsigned_int(std::string_view k, std::uint64_t def) const {
    if (!has(k)) return def;
    const auto& v = at(k);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      const auto i = v.get<std::int64_t>();
      if (i < 0) fail(key(k), "must be >= 0, got " + std::to_string(i));
      return static_cast<std::uint64_t>(i);
    }
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    }
    fail(key(k), "expected a non-negative integer");
  }

  bool boolean(std::string_view k, bool def) const {
    if (!has(k)) return def;
    if (!at(k).is_boolean()) fail(key(k), "expected true or false");
    return at(k).get<bool>();
  }

  std::string string(std::string_view k, std::string def) const {
    if (!has(k)) return def;
    if (!at(k).is_string()) fail(key(k), "expected a string");
    return at(k).get<std::string>();
  }

  std::vector<double> numbers(std::string_view k, std::vector<double> def) const {
    if (!has(k)) return def;
    if (!at(k).is_array()) fail(key(k), "expected a list of numbers");
    std::vector<double> out;
    for (const auto& v : at(k)) {
      if (!v.is_number()) fail(key(k), "expected a list of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

net::Link parse_link(const json& j, const std::string& path, net::Link link) {
  Block b(j, path, {"rate", "latency", "loss_prob"});
  link.rate = b.positive("rate", link.rate);
  link.latency = b.non_negative("latency", link.latency);
  link.loss_prob = b.number("loss_prob", link.loss_prob);
  if (link.loss_prob < 0.0 || link.loss_prob >= 1.0) {
    fail(b.key("loss_prob"), "must be in [0, 1), got " + show(link.loss_prob));
  }
  return link;
}

scenarios::TopologyParams parse_topology(const json& j) {
  Block b(j, "topology",
          {"access", "fronthaul", "backhaul", "intra_cloud", "mtu", "second_site", "links"});
  scenarios::TopologyParams t;
  if (b.has("access")) t.access = parse_link(b.at("access"), b.key("access"), t.access);
  if (b.has("fronthaul")) t.fronthaul = parse_link(b.at("fronthaul"), b.key("fronthaul"), t.fronthaul);
  if (b.has("backhaul")) t.backhaul = parse_link(b.at("backhaul"), b.key("backhaul"), t.backhaul);
  if (b.has("intra_cloud")) {
    t.intra_cloud = parse_link(b.at("intra_cloud"), b.key("intra_cloud"), t.intra_cloud);
  }
  const auto mtu = b.unsigned_int("mtu", t.mtu);
  if (mtu == 0 || mtu > 65535) fail(b.key("mtu"), "must be in [1, 65535]");
  t.mtu = static_cast<std::uint32_t>(mtu);
  t.second_site = b.boolean("second_site", t.second_site);
  if (b.has("links")) {
    const auto& list = b.at("links");
    if (!list.is_array()) fail(b.key("links"), "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "topology.links[" + std::to_string(i) + "]";
      Block l(list[i], path, {"from", "to", "rate", "latency", "loss_prob", "segment"});
      scenarios::LinkOverride o;
      o.from = l.string("from", "");
      o.to = l.string("to", "");
      if (o.from.empty()) fail(l.key("from"), "required");
      if (o.to.empty()) fail(l.key("to"), "required");
      if (l.has("rate")) o.rate = l.positive("rate", 0.0);
      if (l.has("latency")) o.latency = l.non_negative("latency", 0.0);
      if (l.has("loss_prob")) {
        o.loss_prob = l.number("loss_prob", 0.0);
        if (*o.loss_prob < 0.0 || *o.loss_prob >= 1.0) {
          fail(l.key("loss_prob"), "must be in [0, 1), got " + show(*o.loss_prob));
        }
      }
      if (l.has("segment")) {
        const auto name = l.string("segment", "");
        o.segment = net::parse_segment(name);
        if (!o.segment) fail(l.key("segment"), "unknown segment '" + name + "'");
      }
      t.links.push_back(std::move(o));
    }
  }
  return t;
}

scenarios::CloneParams parse_clone(const json& j) {
  Block b(j, "clone", {"cpu_capacity", "storage_capacity", "profile_size", "slot_capacity", "cpu_pool"});
  scenarios::CloneParams c;
  c.cpu_capacity = b.non_negative("cpu_capacity", c.cpu_capacity);
  c.storage_capacity = b.unsigned_int("storage_capacity", c.storage_capacity);
  c.profile_size = b.unsigned_int("profile_size", c.profile_size);
  c.slot_capacity = b.unsigned_int("slot_capacity", c.slot_capacity);
  c.cpu_pool = b.non_negative("cpu_pool", c.cpu_pool);
  if (c.storage_capacity == 0) fail(b.key("storage_capacity"), "must be > 0");
  if (c.cpu_capacity > c.cpu_pool) {
    fail(b.key("cpu_capacity"), "exceeds clone.cpu_pool (" + show(c.cpu_pool) + ")");
  }
  return c;
}

scenarios::TaskParams parse_task(const json& j, const std::string& path) {
  Block b(j, path, {"D", "S", "F", "local_cpu", "result_size"});
  scenarios::TaskParams t;
  t.data_total = b.non_negative("D", t.data_total);
  t.data_cached = b.non_negative("S", t.data_cached);
  t.instructions = b.non_negative("F", t.instructions);
  t.local_cpu = b.positive("local_cpu", t.local_cpu);
  t.result_size = b.unsigned_int("result_size", t.result_size);
  if (t.data_cached > t.data_total) {
    fail(b.key("S"), "must not exceed D (" + show(t.data_total) + "), got " + show(t.data_cached));
  }
  return t;
}

scenarios::AllocationParams parse_allocation(const json& j) {
  Block b(j, "allocation", {"radio_total", "cloud_total", "objective", "grid_steps", "method"});
  scenarios::AllocationParams a;
  if (!b.has("radio_total")) fail(b.key("radio_total"), "required");
  if (!b.has("cloud_total")) fail(b.key("cloud_total"), "required");
  a.capacity.radio_total = b.positive("radio_total", 0.0);
  a.capacity.cloud_total = b.positive("cloud_total", 0.0);
  try {
    a.objective = controller::parse_objective(b.string("objective", "min_sum_time"));
  } catch (const ConfigurationError& e) {
    fail(b.key("objective"), e.what());
  }
  const auto steps = b.unsigned_int("grid_steps", 200);
  if (steps < 2 || steps > 100000) fail(b.key("grid_steps"), "must be in [2, 100000]");
  a.grid_steps = static_cast<int>(steps);
  const auto method = b.string("method", "heuristic");
  if (method == "heuristic") {
    a.method = controller::Method::Heuristic;
  } else if (method == "bruteforce") {
    a.method = controller::Method::BruteForce;
  } else {
    fail(b.key("method"), "expected heuristic or bruteforce, got '" + method + "'");
  }
  return a;
}

void parse_streaming(const json& j, RunConfig& cfg) {
  Block b(j, "streaming", {"bitrate", "duration", "wireless_loss", "with_clone", "packet_payload"});
  auto& s = cfg.streaming;
  s.bitrate = b.positive("bitrate", s.bitrate);
  s.duration = b.positive("duration", s.duration);
  s.wireless_loss = b.number("wireless_loss", s.wireless_loss);
  if (s.wireless_loss < 0.0 || s.wireless_loss >= 1.0) {
    fail(b.key("wireless_loss"), "must be in [0, 1), got " + show(s.wireless_loss));
  }
  if (b.has("with_clone")) {
    const auto& v = b.at("with_clone");
    if (v.is_boolean()) {
      cfg.streaming_mode = v.get<bool>() ? CloneMode::With : CloneMode::Without;
    } else if (v.is_string() && v.get<std::string>() == "both") {
      cfg.streaming_mode = CloneMode::Both;
    } else {
      fail(b.key("with_clone"), "expected true, false or \"both\"");
    }
  }
  const auto payload = b.unsigned_int("packet_payload", s.packet_payload);
  if (payload == 0 || payload > 65535) fail(b.key("packet_payload"), "must be in [1, 65535]");
  s.packet_payload = static_cast<std::uint32_t>(payload);
}

void parse_c2c(const json& j, RunConfig& cfg) {
  Block b(j, "c2c", {"variant", "n_receivers", "content", "repeat_requests", "distinct_sites"});
  auto& c = cfg.c2c;
  if (b.has("variant")) {
    try {
      c.variant = scenarios::parse_c2c_variant(b.string("variant", ""));
    } catch (const ConfigurationError& e) {
      fail(b.key("variant"), e.what());
    }
  }
  c.n_receivers = b.unsigned_int("n_receivers", c.n_receivers);
  c.repeat_requests = b.unsigned_int("repeat_requests", c.repeat_requests);
  c.distinct_sites = b.boolean("distinct_sites", c.distinct_sites);
  if (b.has("content")) {
    Block content(b.at("content"), b.key("content"), {"id", "size"});
    c.content.id = content.string("id", c.content.id);
    c.content.size = content.unsigned_int("size", c.content.size);
  }
}

void parse_mptcp(const json& j, RunConfig& cfg) {
  Block b(j, "mptcp", {"access_paths", "clone_to_server", "bytes"});
  auto path_link = [](const json& lj, const std::string& path) {
    Block l(lj, path, {"rate", "latency"});
    net::Link link;
    if (!l.has("rate")) fail(l.key("rate"), "required");
    link.rate = l.positive("rate", 0.0);
    link.latency = l.non_negative("latency", 0.0);
    return link;
  };
  if (b.has("access_paths")) {
    const auto& list = b.at("access_paths");
    if (!list.is_array()) fail(b.key("access_paths"), "expected a list");
    cfg.mptcp.access_paths.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.mptcp.access_paths.push_back(
          path_link(list[i], "mptcp.access_paths[" + std::to_string(i) + "]"));
    }
  }
  if (b.has("clone_to_server")) {
    cfg.mptcp.clone_to_server = path_link(b.at("clone_to_server"), b.key("clone_to_server"));
  }
  cfg.mptcp_bytes = b.unsigned_int("bytes", cfg.mptcp_bytes);
}

void parse_abr(const json& j, RunConfig& cfg) {
  Block b(j, "abr", {"ladder", "safety_factor", "measured_rates", "epoch"});
  auto& a = cfg.abr;
  a.ladder.bitrates = b.numbers("ladder", a.ladder.bitrates);
  a.ladder.safety_factor = b.number("safety_factor", a.ladder.safety_factor);
  a.measured_rates = b.numbers("measured_rates", a.measured_rates);
  a.epoch = b.number("epoch", a.epoch);
}

void validate_selected(const RunConfig& cfg, const std::string& scenario) {
  if (scenario == "offload") {
    cfg.offload.validate();
  } else if (scenario == "streaming") {
    cfg.streaming.validate();
  } else if (scenario == "c2c") {
    cfg.c2c.validate();
    if (cfg.c2c.variant != scenarios::C2CVariant::D2D_Baseline &&
        cfg.c2c.content.size > cfg.clone.storage_capacity) {
      fail("c2c.content.size", "exceeds clone.storage_capacity (" +
                                   std::to_string(cfg.clone.storage_capacity) + ")");
    }
  } else if (scenario == "mptcp") {
    cfg.mptcp.validate();
    if (cfg.mptcp_bytes == 0) fail("mptcp.bytes", "must be > 0");
  } else if (scenario == "abr") {
    cfg.abr.validate();
  } else if (scenario == "evolved_bs") {
    if (cfg.evolved_base == "evolved_bs" || cfg.evolved_base == "mptcp") {
      fail("evolved_bs.base", "must name a simulated scenario other than evolved_bs and mptcp");
    }
    validate_selected(cfg, cfg.evolved_base);
  }
  // Build the topology once so link overrides are checked before running.
  scenarios::build_cran(cfg.topology, std::vector<std::string>{"ue0"});
}

std::vector<metrics::MetricsReport> run_one(const RunConfig& cfg, const std::string& scenario,
                                            const scenarios::TopologyParams& topo,
                                            std::uint64_t seed) {
  std::vector<metrics::MetricsReport> out;
  if (scenario == "offload") {
    out.push_back(scenarios::run_offload(cfg.offload, topo, cfg.clone, seed).report);
  } else if (scenario == "streaming") {
    auto s = cfg.streaming;
    if (cfg.streaming_mode != CloneMode::Without) {
      s.with_clone = true;
      out.push_back(scenarios::run_streaming(s, topo, seed));
    }
    if (cfg.streaming_mode != CloneMode::With) {
      s.with_clone = false;
      out.push_back(scenarios::run_streaming(s, topo, seed));
    }
  } else if (scenario == "c2c") {
    out.push_back(scenarios::run_c2c(cfg.c2c, topo, cfg.clone, seed).report);
  } else if (scenario == "mptcp") {
    out.push_back(scenarios::mptcp_report(cfg.mptcp, cfg.mptcp_bytes, seed));
  } else if (scenario == "abr") {
    out.push_back(scenarios::run_abr(cfg.abr, topo, cfg.clone, seed).report);
  } else {
    throw InternalError("no runner for scenario '" + scenario + "'");
  }
  return out;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"abr", "c2c", "evolved_bs", "mptcp", "offload",
                                              "streaming"};
  return names;
}

RunConfig parse_config(const json& doc) {
  Block root(doc, "", {"scenario", "seed", "seeds", "topology", "clone", "task", "allocation",
                       "offload", "streaming", "c2c", "mptcp", "abr", "evolved_bs", "output"});
  RunConfig cfg;
  if (!root.has("scenario")) fail("scenario", "required");
  cfg.scenario = root.string("scenario", "");
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), cfg.scenario) == names.end()) {
    fail("scenario", "unknown scenario '" + cfg.scenario + "'");
  }

  if (root.has("seed") && root.has("seeds")) fail("seeds", "give either seed or seeds, not both");
  if (root.has("seed")) cfg.seeds = {root.unsigned_int("seed", 1)};
  if (root.has("seeds")) {
    const auto& list = root.at("seeds");
    if (!list.is_array() || list.empty()) fail("seeds", "expected a non-empty list of integers");
    cfg.seeds.clear();
    for (const auto& v : list) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        fail("seeds", "expected a non-empty list of non-negative integers");
      }
      cfg.seeds.push_back(v.get<std::uint64_t>());
    }
  }

  if (root.has("topology")) cfg.topology = parse_topology(root.at("topology"));
  if (root.has("clone")) cfg.clone = parse_clone(root.at("clone"));
  if (root.has("task")) {
    const auto& t = root.at("task");
    cfg.offload.tasks.clear();
    if (t.is_array()) {
      if (t.empty()) fail("task", "expected at least one task");
      for (std::size_t i = 0; i < t.size(); ++i) {
        cfg.offload.tasks.push_back(parse_task(t[i], "task[" + std::to_string(i) + "]"));
      }
    } else {
      cfg.offload.tasks.push_back(parse_task(t, "task"));
    }
  }
  if (root.has("allocation")) cfg.offload.allocation = parse_allocation(root.at("allocation"));
  if (root.has("offload")) {
    Block b(root.at("offload"), "offload", {"users", "policy"});
    cfg.offload.users = b.unsigned_int("users", cfg.offload.tasks.size());
    try {
      cfg.offload.policy = scenarios::parse_offload_policy(b.string("policy", "decide"));
    } catch (const ConfigurationError& e) {
      fail(b.key("policy"), e.what());
    }
  } else {
    cfg.offload.users = cfg.offload.tasks.size();
  }
  if (root.has("streaming")) parse_streaming(root.at("streaming"), cfg);
  if (root.has("c2c")) parse_c2c(root.at("c2c"), cfg);
  if (root.has("mptcp")) parse_mptcp(root.at("mptcp"), cfg);
  if (root.has("abr")) parse_abr(root.at("abr"), cfg);
  if (root.has("evolved_bs")) {
    Block b(root.at("evolved_bs"), "evolved_bs", {"base"});
    cfg.evolved_base = b.string("base", cfg.evolved_base);
    if (std::find(names.begin(), names.end(), cfg.evolved_base) == names.end()) {
      fail("evolved_bs.base", "unknown scenario '" + cfg.evolved_base + "'");
    }
  }
  if (root.has("output")) {
    Block b(root.at("output"), "output", {"path", "format"});
    if (b.has("path")) cfg.output_path = b.string("path", "");
    try {
      cfg.format = metrics::parse_format(b.string("format", "csv"));
    } catch (const Error& e) {
      fail(b.key("format"), e.what());
    }
  }

  validate_selected(cfg, cfg.scenario);
  return cfg;
}

json read_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config '" + path.string() + "'");
  try {
    return json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigurationError("<root>: not valid JSON: " + std::string(e.what()));
  }
}

std::vector<metrics::MetricsReport> run(const RunConfig& cfg) {
  std::vector<metrics::MetricsReport> out;
  for (const auto seed : cfg.seeds) {
    if (cfg.scenario == "evolved_bs") {
      const auto evolved = scenarios::without_fronthaul(cfg.topology);
      for (auto [topo, suffix] : {std::pair{&cfg.topology, ".baseline"},
                                  std::pair{&evolved, ".evolved"}}) {
        for (auto& r : run_one(cfg, cfg.evolved_base, *topo, seed)) {
          r.set_scenario(r.scenario() + suffix);
          out.push_back(std::move(r));
        }
      }
    } else {
      for (auto& r : run_one(cfg, cfg.scenario, cfg.topology, seed)) out.push_back(std::move(r));
    }
  }
  return out;
}

void set_dotted(json& doc, std::string_view key, json value) {
  if (key.empty()) throw ConfigurationError("<param>: empty key");
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part(key.substr(start, dot == std::string_view::npos ? key.npos : dot - start));
    if (part.empty()) throw ConfigurationError(std::string(key) + ": malformed key");
    if (!node->is_object()) {
      throw ConfigurationError(std::string(key) + ": '" + part + "' is inside a non-object value");
    }
    if (dot == std::string_view::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

json parse_token(std::string_view token) {
  try {
    return json::parse(token);
  } catch (const json::parse_error&) {
    return json(std::string(token));
  }
}

std::vector<metrics::MetricsReport> run_sweep(const json& base, const SweepSpec& sweep,
                                              std::optional<std::uint64_t> seed) {
  if (sweep.values.empty()) throw ConfigurationError(sweep.param + ": no sweep values given");
  std::vector<RunConfig> configs;
  for (const auto& v : sweep.values) {
    json doc = base;
    set_dotted(doc, sweep.param, parse_token(v));
    auto cfg = parse_config(doc);
    if (seed) cfg.seeds = {*seed};
    configs.push_back(std::move(cfg));
  }

  std::vector<std::vector<metrics::MetricsReport>> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  auto work = [&](std::size_t i) {
    try {
      results[i] = run(configs[i]);
      for (auto& r : results[i]) r.set_metadata("sweep." + sweep.param, sweep.values[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(sweep.jobs, static_cast<unsigned>(configs.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<metrics::MetricsReport> out;
  for (auto& group : results) {
    for (auto& r : group) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace aqua::config
