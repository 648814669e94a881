#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "blockmix/bench.hpp"
#include "blockmix/blocksampler.hpp"
#include "blockmix/coupling.hpp"
#include "blockmix/dynamics.hpp"
#include "blockmix/graph.hpp"
#include "blockmix/io.hpp"
#include "blockmix/parallel.hpp"
#include "blockmix/params.hpp"
#include "blockmix/partition.hpp"
#include "blockmix/percolation.hpp"
#include "blockmix/spectral.hpp"
#include "blockmix/uniformity.hpp"

using namespace blockmix;
using blockmix::io::ConfigError;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.3.0";

enum Exit { kOk = 0, kValidation = 1, kConfig = 2 };

// Raised by subcommands whose checks failed after outputs were written.
struct ValidationFailed {
  std::string message;
};

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::size_t threads = 1;
  bool force = false;
  int r = -1;
  std::vector<std::string> argv;
};

// Reads one JSON object, records every value it hands out (defaults included)
// into `resolved`, and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& src, json& resolved, std::string path)
      : src_(src), out_(resolved), path_(std::move(path)) {
    if (!src_.is_null() && !src_.is_object()) throw ConfigError(where() + " must be an object");
    if (!out_.is_object()) out_ = json::object();
  }

  bool has(const std::string& key) const { return src_.is_object() && src_.contains(key); }

  template <class T>
  T get(const std::string& key, T def) {
    used_.push_back(key);
    T v = def;
    if (has(key)) {
      try {
        v = src_.at(key).get<T>();
      } catch (const json::exception&) {
        throw ConfigError(where(key) + ": wrong type");
      }
    }
    out_[key] = v;
    return v;
  }

  template <class T>
  T need(const std::string& key) {
    if (!has(key)) throw ConfigError(where(key) + " is required");
    return get<T>(key, T{});
  }

  Reader sub(const std::string& key) {
    used_.push_back(key);
    static const json empty = json::object();
    return Reader(has(key) ? src_.at(key) : empty, out_[key], where(key));
  }

  const json& raw(const std::string& key) {
    used_.push_back(key);
    if (has(key)) out_[key] = src_.at(key);
    return has(key) ? src_.at(key) : null_;
  }

  // Sections other subcommands read; tolerated so one config can drive them all.
  void allow(std::initializer_list<const char*> keys) {
    for (const char* k : keys) used_.emplace_back(k);
  }

  void done() const {
    if (!src_.is_object()) return;
    for (auto it = src_.begin(); it != src_.end(); ++it)
      if (std::find(used_.begin(), used_.end(), it.key()) == used_.end())
        throw ConfigError("unknown key " + where(it.key()));
  }

  std::string where(const std::string& key = "") const {
    std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
    return "'" + (p.empty() ? std::string("<root>") : p) + "'";
  }

 private:
  const json& src_;
  json& out_;
  std::string path_;
  std::vector<std::string> used_;
  static inline const json null_{};
};

void check(bool ok, const Reader& r, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(r.where(key) + " " + what);
}

// --- graph --------------------------------------------------------------------

struct GraphSpec {
  std::string source = "generate";  // generate | file | family
  std::size_t n = 1000;
  double d = 20.0;
  std::uint64_t seed = 0;
  std::string file;
  std::string family;

  Graph load() const {
    if (source == "generate") return gen_gnp(n, d, seed);
    if (source == "file") {
      std::ifstream in(file);
      if (!in) throw ConfigError("cannot open graph file '" + file + "'");
      try {
        return read_graph(in);
      } catch (const Error& e) {
        throw ConfigError("graph file '" + file + "': " + e.what());
      }
    }
    if (family == "path") return families::path(n);
    if (family == "cycle") return families::cycle(n);
    if (family == "complete") return families::complete(n);
    if (family == "star") return families::star(n);
    if (family == "empty") return families::empty(n);
    if (family == "petersen") return families::petersen();
    if (family == "heawood") return families::heawood();
    throw ConfigError("unknown graph family '" + family + "'");
  }
};

GraphSpec read_graph_spec(Reader& root, std::uint64_t seed) {
  Reader r = root.sub("graph");
  GraphSpec s;
  const int sources = r.has("generate") + r.has("file") + r.has("family");
  check(sources <= 1, r, "", "must name exactly one of generate, file, family");
  if (r.has("file")) {
    s.source = "file";
    s.file = r.need<std::string>("file");
  } else if (r.has("family")) {
    s.source = "family";
    s.family = r.need<std::string>("family");
    s.n = r.get<std::size_t>("n", 3);
  } else {
    Reader gen = r.sub("generate");
    s.n = gen.get<std::size_t>("n", 1000);
    s.d = gen.get<double>("d", 20.0);
    s.seed = gen.get<std::uint64_t>("seed", seed);
    check(s.n >= 1, gen, "n", "must be >= 1");
    check(s.d >= 0 && s.d < static_cast<double>(s.n), gen, "d", "must satisfy 0 <= d < n");
    gen.done();
  }
  r.done();
  return s;
}

// --- params -------------------------------------------------------------------

struct ParamSpec {
  std::optional<double> d;
  double epsilon = 0.2;
  int k = 40;
  double lambda = 1.0;
  std::optional<double> delta;
  std::optional<int> r;
};

ParamSpec read_params(Reader& root, const GraphSpec& gs, const Flags& f) {
  Reader r = root.sub("params");
  ParamSpec p;
  p.epsilon = r.get<double>("epsilon", 0.2);
  p.k = r.get<int>("k", 40);
  p.lambda = r.get<double>("lambda", 1.0);
  if (r.has("d")) p.d = r.get<double>("d", 0.0);
  else if (gs.source == "generate") p.d = r.get<double>("d", gs.d);
  if (r.has("delta")) p.delta = r.get<double>("delta", 0.0);
  if (r.has("r")) p.r = r.get<int>("r", 2);
  if (f.r >= 0) p.r = f.r;
  check(p.epsilon > 0 && p.epsilon < 1, r, "epsilon", "must lie in (0, 1)");
  check(p.k >= 1, r, "k", "must be >= 1");
  check(p.lambda >= 0, r, "lambda", "must be >= 0");
  check(!p.delta || *p.delta >= 0, r, "delta", "must be >= 0");
  check(!p.r || *p.r >= 0, r, "r", "must be >= 0");
  check(!p.d || *p.d > 0, r, "d", "must be > 0");
  r.done();
  return p;
}

Params resolve_params(const ParamSpec& s, const Graph& g) {
  double d = s.d ? *s.d
                 : (g.num_vertices() ? 2.0 * static_cast<double>(g.num_edges()) /
                                           static_cast<double>(g.num_vertices())
                                     : 1.0);
  if (!(d > 0)) d = 1.0;
  Params p = Params::make(g.num_vertices(), s.epsilon, d, s.k);
  p.lambda = s.lambda;
  if (s.delta) p.delta = *s.delta;
  if (s.r) p.r = *s.r;
  p.validate();
  return p;
}

// --- partition ----------------------------------------------------------------

struct PartitionSpec {
  std::string method = "build";  // build | singleton | whole | file
  std::string file;
  PartitionOptions opts;
};

PartitionSpec read_partition_spec(Reader& root, const std::string& def = "build") {
  Reader r = root.sub("partition");
  PartitionSpec s;
  s.method = r.get<std::string>("method", def);
  check(s.method == "build" || s.method == "singleton" || s.method == "whole" || s.method == "file", r,
        "method", "must be build, singleton, whole or file");
  if (s.method == "file") s.file = r.need<std::string>("file");
  if (s.method == "build") {
    s.opts.strict = r.get<bool>("strict", false);
    s.opts.horizon = r.get<int>("horizon", -1);
    s.opts.cycle_cap = r.get<std::size_t>("cycle_cap", 0);
  }
  r.done();
  return s;
}

BlockPartition make_from_spec(const PartitionSpec& s, const Graph& g, const Params& p) {
  if (s.method == "singleton") return singleton_partition(g);
  if (s.method == "whole") return whole_partition(g);
  if (s.method == "file") {
    std::ifstream in(s.file);
    if (!in) throw ConfigError("cannot open partition file '" + s.file + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("partition file '" + s.file + "': " + e.what());
    }
    return io::partition_from_json(g, j);
  }
  return build_partition(g, p, s.opts);
}

// --- output helpers -------------------------------------------------------------

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Run {
  Flags flags;
  std::string subcommand;
  json resolved;
  std::uint64_t seed = 0;
  std::unique_ptr<io::OutputDir> out;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::string started = utc_now();
  json extra_meta = json::object();

  void open() { out = std::make_unique<io::OutputDir>(flags.out); }

  std::ofstream csv(const std::string& name) const {
    std::ofstream f(out->file(name), std::ios::binary);
    if (!f) throw Error("cannot create " + name);
    return f;
  }

  void finish() {
    out->write_json("resolved-config.json", resolved);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json meta{{"tool", "blockmix"},
              {"version", kVersion},
              {"subcommand", subcommand},
              {"argv", flags.argv},
              {"started_utc", started},
              {"wall_seconds", wall},
              {"threads", flags.threads},
              {"compiler", __VERSION__},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                            "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"boost", BOOST_LIB_VERSION}};
    meta.update(extra_meta);
    out->write_json("metadata.json", meta);
    out->commit();
  }
};

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"slope_se", f.slope_se},
          {"intercept_se", f.intercept_se},
          {"points", f.points}};
}

Configuration initial_state(const Graph& g, Model model, int k, std::uint64_t seed) {
  if (model == Model::hardcore) return Configuration::hardcore(std::vector<char>(g.num_vertices(), 0));
  auto init = greedy_initial(g, k, seed);
  if (!init.ok)
    throw Error("greedy coloring with k=" + std::to_string(k) + " failed at vertex " +
                std::to_string(init.stuck));
  return init.cfg;
}

Model parse_model(Reader& r, const std::string& key) {
  const auto m = r.get<std::string>(key, "coloring");
  if (m == "coloring") return Model::coloring;
  if (m == "hardcore") return Model::hardcore;
  throw ConfigError(r.where(key) + " must be coloring or hardcore");
}

SampleMode parse_mode(Reader& r) {
  const auto m = r.get<std::string>("mode", "automatic");
  if (m == "automatic") return SampleMode::automatic;
  if (m == "exact") return SampleMode::exact;
  if (m == "fast") return SampleMode::fast;
  throw ConfigError(r.where("mode") + " must be automatic, exact or fast");
}

// --- subcommands ----------------------------------------------------------------

int cmd_gen_graph(Run& run, Reader& root) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  root.done();
  Graph g = gs.load();
  run.open();
  std::ostringstream text;
  write_graph(text, g);
  run.out->write_text("graph.txt", text.str());
  auto f = run.csv("degrees.csv");
  io::CsvWriter w(f, {"vertex", "degree"});
  for (Vertex v = 0; v < g.num_vertices(); ++v) w.row(v, g.degree(v));
  run.extra_meta["graph"] = {{"n", g.num_vertices()}, {"m", g.num_edges()}, {"max_degree", max_degree(g)}};
  run.finish();
  return kOk;
}

void write_blocks_csv(const Run& run, const BlockPartition& part) {
  auto f = run.csv("blocks.csv");
  io::CsvWriter w(f, {"block", "kind", "size", "inner_boundary", "outer_boundary", "cycle_length"});
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    const Block& B = part.blocks[b];
    w.row(b, to_string(B.kind), B.size(), B.inner_boundary.size(), B.outer_boundary.size(), B.cycle.size());
  }
}

int cmd_partition(Run& run, Reader& root, bool validate) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  ParamSpec ps = read_params(root, gs, run.flags);
  PartitionSpec pt = read_partition_spec(root);
  std::size_t witness_cap = 100;
  double bin_width = 100.0;
  if (validate) {
    Reader v = root.sub("validate");
    witness_cap = v.get<std::size_t>("witness_cap", 100);
    bin_width = v.get<double>("path_density_bin", 100.0);
    check(bin_width > 0, v, "path_density_bin", "must be > 0");
    v.done();
  }
  root.done();
  Graph g = gs.load();
  Params p = resolve_params(ps, g);
  BlockPartition part = make_from_spec(pt, g, p);
  run.open();
  run.out->write_json("partition.json", io::partition_to_json(part));
  write_blocks_csv(run, part);
  if (!validate) {
    run.extra_meta["blocks"] = part.num_blocks();
    run.finish();
    return kOk;
  }
  const ValidationReport rep = validate_partition(g, part, p, witness_cap);
  const PathDensityReport pd = path_density(g, part, p, bin_width);
  json j = io::to_json(rep);
  j["path_density"] = {{"paths", pd.values.size()}, {"max", pd.max}, {"bin_width", pd.bin_width},
                       {"histogram", pd.histogram}};
  j["blocks"] = part.num_blocks();
  run.out->write_json("validation.json", j);
  run.finish();
  if (!rep.structural_ok() || !rep.boundary_sets_agree)
    throw ValidationFailed{"partition violates condition 1, 2b or 3 (see validation.json)"};
  return kOk;
}

int cmd_sample(Run& run, Reader& root) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  ParamSpec ps = read_params(root, gs, run.flags);
  Reader s = root.sub("sample");
  const Model model = parse_model(s, "model");
  const auto count = s.get<std::size_t>("count", 10);
  const auto target = s.get<std::string>("target", "graph");  // graph | block
  const auto block = s.get<std::size_t>("block", 0);
  const SampleMode mode = parse_mode(s);
  check(target == "graph" || target == "block", s, "target", "must be graph or block");
  s.done();
  PartitionSpec pt;
  if (target == "block") pt = read_partition_spec(root);
  root.done();
  Graph g = gs.load();
  Params p = resolve_params(ps, g);
  BlockPartition part = target == "graph" ? whole_partition(g) : make_from_spec(pt, g, p);
  if (block >= part.num_blocks()) throw ConfigError("sample.block out of range");
  const Block& B = part.blocks[target == "graph" ? 0 : block];
  Configuration cfg = initial_state(g, model, p.k, run.seed);
  Rng rng = derive_rng(run.seed, 1);
  run.open();
  auto f = run.csv("samples.csv");
  io::CsvWriter w(f, {"sample", "vertex", "spin"});
  for (std::size_t i = 0; i < count; ++i) {
    update_block(cfg, g, B, p.lambda, rng, mode);
    for (Vertex v : B.vertices)
      w.row(i, v, model == Model::coloring ? cfg.colors[v] : static_cast<int>(cfg.occupied[v]));
  }
  run.extra_meta["block_size"] = B.size();
  run.finish();
  return kOk;
}

Probe make_probe(const std::string& name, std::uint64_t cadence, Model model) {
  auto need = [&](Model m) {
    if (m != model) throw ConfigError("probe '" + name + "' does not apply to this model");
  };
  if (name == "colors_used") {
    need(Model::coloring);
    return {name, cadence, [](const Configuration& c, const Graph&) {
              std::vector<char> u(static_cast<std::size_t>(c.k), 0);
              for (int x : c.colors) u[static_cast<std::size_t>(x)] = 1;
              return std::vector<double>{static_cast<double>(std::count(u.begin(), u.end(), 1))};
            }};
  }
  if (name == "min_available" || name == "mean_available") {
    need(Model::coloring);
    const bool mn = name == "min_available";
    return {name, cadence, [mn](const Configuration& c, const Graph& g) {
              double acc = mn ? std::numeric_limits<double>::infinity() : 0.0;
              for (Vertex v = 0; v < g.num_vertices(); ++v) {
                const auto a = static_cast<double>(available_count(c, g, v));
                acc = mn ? std::min(acc, a) : acc + a;
              }
              if (!mn && g.num_vertices()) acc /= static_cast<double>(g.num_vertices());
              return std::vector<double>{acc};
            }};
  }
  if (name == "occupied") {
    need(Model::hardcore);
    return {name, cadence, [](const Configuration& c, const Graph&) {
              return std::vector<double>{static_cast<double>(std::count(c.occupied.begin(), c.occupied.end(), 1))};
            }};
  }
  if (name == "invalid_edges") {
    return {name, cadence, [](const Configuration& c, const Graph& g) {
              double bad = 0;
              for (auto [u, v] : g.edges())
                bad += c.model == Model::coloring ? c.colors[u] == c.colors[v] : (c.occupied[u] && c.occupied[v]);
              return std::vector<double>{bad};
            }};
  }
  if (name == "units_updated") {
    return {name, cadence, [](const Configuration& c, const Graph&) {
              double n = 0;
              for (auto t : c.unit_last_update) n += t >= 0;
              return std::vector<double>{n};
            }};
  }
  throw ConfigError("unknown probe '" + name + "'");
}

int cmd_run(Run& run, Reader& root) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  ParamSpec ps = read_params(root, gs, run.flags);
  Reader c = root.sub("chain");
  ChainSpec spec;
  spec.kind = [&] {
    try {
      return chain_kind_from_string(c.get<std::string>("kind", "block"));
    } catch (const Error&) {
      throw ConfigError(c.where("kind") + " must be glauber or block");
    }
  }();
  spec.model = parse_model(c, "model");
  spec.mode = parse_mode(c);
  const auto steps = c.get<std::uint64_t>("steps", 1000);
  const auto replicas = c.get<std::size_t>("replicas", 1);
  const auto resume = c.get<std::string>("resume", "");
  check(replicas >= 1, c, "replicas", "must be >= 1");
  c.done();
  PartitionSpec pt;
  if (spec.kind == ChainKind::block) pt = read_partition_spec(root);
  std::vector<std::pair<std::string, std::uint64_t>> probe_specs;
  const json& probes = root.raw("probes");
  if (!probes.is_null()) {
    if (!probes.is_array()) throw ConfigError("'probes' must be an array");
    for (const auto& pj : probes) {
      try {
        const auto name = pj.at("name").get<std::string>();
        const auto cadence = pj.value("cadence", std::uint64_t{100});
        if (cadence == 0) throw ConfigError("probe '" + name + "' has cadence 0");
        for (auto it = pj.begin(); it != pj.end(); ++it)
          if (it.key() != "name" && it.key() != "cadence") throw ConfigError("unknown key in probe: " + it.key());
        probe_specs.emplace_back(name, cadence);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("'probes': ") + e.what());
      }
    }
  }
  std::vector<Probe> probe_list;
  for (auto& [n, cad] : probe_specs) probe_list.push_back(make_probe(n, cad, spec.model));
  root.done();

  std::vector<json> checkpoints(replicas);
  if (!resume.empty()) {
    for (std::size_t r = 0; r < replicas; ++r) {
      std::ifstream in(std::filesystem::path(resume) / ("checkpoint-" + std::to_string(r) + ".json"));
      if (!in) throw ConfigError("missing checkpoint for replica " + std::to_string(r) + " in " + resume);
      try {
        in >> checkpoints[r];
      } catch (const json::exception& e) {
        throw ConfigError(std::string("checkpoint: ") + e.what());
      }
    }
  }

  Graph g = gs.load();
  spec.params = resolve_params(ps, g);
  BlockPartition part;
  if (spec.kind == ChainKind::block) {
    part = make_from_spec(pt, g, spec.params);
    spec.partition = &part;
  }
  spec.seed = run.seed;
  spec.force = run.flags.force;
  check_ergodicity(g, spec);

  struct Out {
    Configuration cfg;
    std::string rng;
    std::vector<ProbeRecord> records;
  };
  std::vector<Out> outs(replicas);
  parallel_for(replicas, run.flags.threads, [&](std::size_t r) {
    Rng rng = derive_rng(spec.seed, r);
    Configuration cfg;
    if (resume.empty()) {
      cfg = initial_state(g, spec.model, spec.params.k, derive_rng(spec.seed, 1000 + r)());
    } else {
      cfg = io::checkpoint_from_json(checkpoints[r], &rng);
      if ((cfg.model == Model::coloring ? cfg.colors.size() : cfg.occupied.size()) != g.num_vertices() ||
          cfg.model != spec.model || !cfg.valid(g))
        throw Error("checkpoint does not match this graph/model");
    }
    Out& o = outs[r];
    for (std::uint64_t t = 1; t <= steps; ++t) {
      chain_step(cfg, g, spec, rng);
      for (const auto& p : probe_list)
        if (cfg.step_count % p.cadence == 0) o.records.push_back({cfg.step_count, p.name, p.fn(cfg, g)});
    }
    o.rng = rng_state(rng);
    o.cfg = std::move(cfg);
  });

  run.open();
  for (std::size_t r = 0; r < replicas; ++r) {
    auto f = run.csv("probes-" + std::to_string(r) + ".csv");
    io::CsvWriter w(f, {"step", "probe_name", "value"});
    for (const auto& rec : outs[r].records) {
      if (rec.values.size() == 1) {
        w.row(rec.step, rec.probe, rec.values[0]);
      } else {
        for (std::size_t i = 0; i < rec.values.size(); ++i)
          w.row(rec.step, rec.probe + "[" + std::to_string(i) + "]", rec.values[i]);
      }
    }
    Rng rng;
    set_rng_state(rng, outs[r].rng);
    run.out->write_json("checkpoint-" + std::to_string(r) + ".json", io::checkpoint_to_json(outs[r].cfg, rng));
  }
  run.extra_meta["blocks"] = spec.kind == ChainKind::block ? part.num_blocks() : g.num_vertices();
  run.finish();
  return kOk;
}

int cmd_couple(Run& run, Reader& root) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  ParamSpec ps = read_params(root, gs, run.flags);
  PartitionSpec pt = read_partition_spec(root);
  Reader c = root.sub("couple");
  const auto mode = c.get<std::string>("mode", "time");
  check(mode == "time" || mode == "contraction", c, "mode", "must be time or contraction");
  const auto pairs = c.get<std::uint64_t>("pairs", 100000);
  const auto burn_in = c.get<std::uint64_t>("burn_in", 0);
  const auto thinning = c.get<std::uint64_t>("thinning", 0);
  const auto check_diam = c.get<bool>("check_diameter", false);
  const auto t_max = c.get<std::uint64_t>("t_max", 100000000);
  const auto replicas = c.get<std::size_t>("replicas", 10);
  const auto start_s = c.get<std::string>("start", "extremal");
  const auto cadence = c.get<std::uint64_t>("trace_cadence", 0);
  check(start_s == "extremal" || start_s == "single", c, "start", "must be extremal or single");
  check(replicas >= 1, c, "replicas", "must be >= 1");
  c.done();
  root.done();

  Graph g = gs.load();
  Params p = resolve_params(ps, g);
  BlockPartition part = make_from_spec(pt, g, p);
  run.open();
  if (mode == "contraction") {
    Rng rng = derive_rng(run.seed, 0);
    ContractionOptions opts{burn_in, thinning, check_diam};
    auto rep = contraction_experiment(g, part, p.k, pairs, rng, opts);
    run.out->write_json("contraction.json", {{"trials", rep.trials},
                                             {"blocks", rep.blocks},
                                             {"max_degree", rep.max_degree},
                                             {"mean_ratio", rep.mean_ratio},
                                             {"std_error", rep.std_error},
                                             {"bound", rep.bound},
                                             {"within_bound", rep.within_bound()}});
    run.finish();
    return kOk;
  }
  std::vector<TraceRow> trace;
  const auto start = start_s == "extremal" ? StartKind::extremal : StartKind::single_disagreement;
  auto res = coupling_time(g, part, p.k, t_max, replicas, run.seed, start, &trace,
                           cadence ? cadence : std::max<std::size_t>(1, part.num_blocks() / 10),
                           run.flags.threads);
  {
    auto f = run.csv("coupling.csv");
    io::CsvWriter w(f, {"t", "dist", "diff", "d_t", "d_hist"});
    for (const auto& row : trace) w.row(row.t, io::big_to_string(row.dist), row.diff, row.d_t, row.d_hist);
  }
  {
    auto f = run.csv("coupling-times.csv");
    io::CsvWriter w(f, {"replica", "steps", "censored"});
    for (std::size_t r = 0; r < res.steps.size(); ++r) w.row(r, res.steps[r], res.censored[r] != 0);
  }
  run.out->write_json("summary.json", {{"blocks", res.blocks},
                                       {"median", res.median},
                                       {"n_log_n", res.n_log_n},
                                       {"median_over_n_log_n", res.median / res.n_log_n},
                                       {"censored", std::count(res.censored.begin(), res.censored.end(), 1)}});
  run.finish();
  return kOk;
}

std::uint32_t pick_block(const BlockPartition& part, long long requested) {
  if (requested >= 0) {
    if (static_cast<std::size_t>(requested) >= part.num_blocks()) throw ConfigError("block index out of range");
    return static_cast<std::uint32_t>(requested);
  }
  std::uint32_t best = 0;
  for (std::uint32_t b = 0; b < part.num_blocks(); ++b)
    if (part.blocks[b].size() > part.blocks[best].size() ||
        (part.blocks[b].size() == part.blocks[best].size() && part.blocks[best].outer_boundary.empty() &&
         !part.blocks[b].outer_boundary.empty()))
      best = b;
  return best;
}

int cmd_percolate(Run& run, Reader& root) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  ParamSpec ps = read_params(root, gs, run.flags);
  PartitionSpec pt = read_partition_spec(root);
  Reader c = root.sub("percolate");
  const auto mode = c.get<std::string>("mode", "tail");
  check(mode == "tail" || mode == "domination", c, "mode", "must be tail or domination");
  const auto block = c.get<long long>("block", -1);
  const auto u_req = c.get<long long>("u_star", -1);
  const auto variant_s = c.get<std::string>("variant", "simple");
  check(variant_s == "simple" || variant_s == "slack", c, "variant", "must be simple or slack");
  const auto trials = c.get<std::uint64_t>("trials", 100000);
  const auto bootstrap = c.get<std::size_t>("bootstrap", 200);
  const auto burn_in = c.get<std::uint64_t>("burn_in", 0);
  const auto radius = c.get<int>("local_radius", 3);
  check(trials >= 1, c, "trials", "must be >= 1");
  c.done();
  root.done();

  Graph g = gs.load();
  Params p = resolve_params(ps, g);
  BlockPartition part = make_from_spec(pt, g, p);
  const std::uint32_t bi = pick_block(part, block);
  const Block& B = part.blocks[bi];
  if (B.outer_boundary.empty()) throw Error("chosen block has an empty outer boundary");
  Vertex u_star = B.outer_boundary.front();
  if (u_req >= 0) {
    u_star = static_cast<Vertex>(u_req);
    if (!std::binary_search(B.outer_boundary.begin(), B.outer_boundary.end(), u_star))
      throw ConfigError("percolate.u_star is not on the block's outer boundary");
  }
  Rng rng = derive_rng(run.seed, 0);
  run.open();
  json summary{{"block", bi}, {"block_size", B.size()}, {"u_star", u_star}, {"kind", to_string(B.kind)}};
  if (mode == "tail") {
    const auto variant = variant_s == "slack" ? PercolationVariant::slack : PercolationVariant::simple;
    auto rep = tail_experiment(g, B, u_star, p, variant, trials, rng, bootstrap);
    {
      auto f = run.csv("percolation.csv");
      io::CsvWriter w(f, {"trial", "cluster", "P", "Z"});
      for (std::size_t t = 0; t < rep.p_sizes.size(); ++t) w.row(t, rep.cluster_sizes[t], rep.p_sizes[t], rep.z_values[t]);
    }
    {
      auto f = run.csv("tail.csv");
      io::CsvWriter w(f, {"l", "hits_at_least", "survival", "lower", "upper"});
      for (std::size_t l = 0; l < rep.survival.size(); ++l)
        w.row(l, rep.hits_at_least[l], rep.survival[l], rep.lower[l], rep.upper[l]);
    }
    summary["trials"] = rep.trials;
    summary["fit"] = fit_json(rep.fit);
    summary["slope_ci"] = {rep.slope_ci_low, rep.slope_ci_high};
    summary["z_fit"] = fit_json(rep.z_fit);
    summary["variant"] = variant_s;
  } else {
    DominationOptions opts;
    opts.burn_in = burn_in;
    opts.local_radius = radius;
    auto rep = domination_test(g, part, p, bi, u_star, trials, rng, opts);
    auto f = run.csv("domination.csv");
    io::CsvWriter w(f, {"l", "real_survival", "perc_survival", "sigma"});
    for (std::size_t l = 0; l < rep.real_survival.size(); ++l)
      w.row(l, rep.real_survival[l], rep.perc_survival[l], rep.sigma[l]);
    summary["trials"] = rep.trials;
    summary["dominates"] = rep.dominates;
    summary["worst_excess_sigma"] = std::isfinite(rep.worst_excess) ? json(rep.worst_excess) : json(nullptr);
  }
  run.out->write_json("summary.json", summary);
  run.finish();
  return kOk;
}

int cmd_uniformity(Run& run, Reader& root) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  ParamSpec ps = read_params(root, gs, run.flags);
  PartitionSpec pt = read_partition_spec(root);
  Reader c = root.sub("uniformity");
  UniformityOptions opts;
  opts.c0 = c.get<double>("c0", 5.0);
  opts.c = c.get<double>("c", 5.0);
  opts.record_cadence = c.get<std::uint64_t>("record_cadence", 0);
  const auto probes = c.get<std::size_t>("probes", 200);
  check(opts.c0 >= 0, c, "c0", "must be >= 0");
  check(opts.c > 0, c, "c", "must be > 0");
  c.done();
  root.done();

  Graph g = gs.load();
  Params p = resolve_params(ps, g);
  BlockPartition part = make_from_spec(pt, g, p);
  const auto vs = pick_low_degree_probes(g, p, probes, run.seed);
  auto rep = uniformity_experiment(g, part, p, vs, run.seed, opts);
  run.open();
  {
    auto f = run.csv("uniformity.csv");
    io::CsvWriter w(f, {"vertex", "deg", "t", "avail", "updated", "threshold", "violated"});
    for (const auto& r : rep.records) w.row(r.vertex, r.deg, r.t, r.avail, r.updated, r.threshold, r.violated);
  }
  run.out->write_json("summary.json", {{"blocks", rep.blocks},
                                       {"t_begin", rep.t_begin},
                                       {"t_end", rep.t_end},
                                       {"probes", rep.probes.size()},
                                       {"violating", rep.violating},
                                       {"fraction", rep.fraction},
                                       {"ci", {rep.ci_low, rep.ci_high}},
                                       {"threshold_at_d", rep.threshold_at_d},
                                       {"k_minus_max_degree", p.k - static_cast<double>(rep.max_degree)}});
  run.finish();
  return kOk;
}

int cmd_spectral(Run& run, Reader& root) {
  GraphSpec gs = read_graph_spec(root, run.seed);
  ParamSpec ps = read_params(root, gs, run.flags);
  PartitionSpec pt = read_partition_spec(root, "singleton");
  Reader c = root.sub("spectral");
  const Model model = parse_model(c, "model");
  const auto limit = c.get<std::size_t>("state_limit", 5000);
  const auto tmix_eps = c.get<double>("tmix_eps", 0.25);
  const auto comparison = c.get<bool>("comparison", model == Model::coloring);
  check(limit >= 1 && limit <= 20000, c, "state_limit", "must lie in [1, 20000]");
  check(!(comparison && model == Model::hardcore), c, "comparison", "is defined for colorings only");
  c.done();
  root.done();

  Graph g = gs.load();
  Params p = resolve_params(ps, g);
  BlockPartition part = make_from_spec(pt, g, p);
  const StateSpace sp = model == Model::coloring ? enumerate_colorings(g, p.k, limit)
                                                 : enumerate_independent_sets(g, p.lambda, limit);
  if (sp.size() == 0) throw Error("no valid configurations");
  const auto pi = sp.pi();
  json rep{{"states", sp.size()}};
  double max_dev = 0.0, row_err = 0.0, rev_err = 0.0;
  for (const auto& [name, K] : {std::pair{std::string("glauber"), glauber_kernel(sp, KernelKind::discrete)},
                                std::pair{std::string("block"), block_kernel(sp, part, KernelKind::discrete)}}) {
    const auto st = stationary(K);
    double dev = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) dev = std::max(dev, std::abs(st[i] - pi[i]));
    max_dev = std::max(max_dev, dev);
    row_err = std::max(row_err, row_sum_error(K));
    rev_err = std::max(rev_err, reversibility_error(K, pi));
    rep[name] = {{"relaxation_time", relaxation_time(K, pi)},
                 {"relaxation_time_continuous",
                  relaxation_time(name == "glauber" ? glauber_kernel(sp, KernelKind::generator)
                                                    : block_kernel(sp, part, KernelKind::generator),
                                  pi)},
                 {"tmix", exact_tmix(K, pi, tmix_eps)},
                 {"stationary_max_dev", dev}};
  }
  rep["stationary_max_dev"] = max_dev;
  rep["row_sum_error"] = row_err;
  rep["reversibility_error"] = rev_err;
  if (comparison) {
    auto cr = comparison_check(g, part, p.k);
    rep["comparison"] = {{"tau", cr.tau},           {"tau_block", cr.tau_block},
                         {"tau_b_max", cr.tau_b_max}, {"q_max", cr.q_max},
                         {"boundary_conditions", cr.boundary_conditions},
                         {"holds", cr.holds},       {"slack", cr.slack}};
  }
  run.open();
  run.out->write_json("report.json", rep);
  {
    auto f = run.csv("stationary.csv");
    io::CsvWriter w(f, {"state", "code", "pi"});
    for (std::size_t i = 0; i < sp.size(); ++i) w.row(i, sp.codes[i], pi[i]);
  }
  run.finish();
  if (comparison && !rep["comparison"]["holds"].get<bool>())
    throw ValidationFailed{"comparison inequality fails (see report.json)"};
  return kOk;
}

int cmd_bench(Run& run, Reader& root) {
  Reader c = root.sub("bench");
  const auto sizes = c.get<std::vector<std::size_t>>("sizes", {100, 300, 1000, 3000, 10000});
  const auto ks = c.get<std::vector<int>>("ks", {8, 16, 32, 64});
  const auto k_fixed = c.get<int>("k", 16);
  const auto size_fixed = c.get<std::size_t>("size", 1000);
  const auto min_seconds = c.get<double>("min_seconds", 0.05);
  const auto batches = c.get<int>("batches", 5);
  const auto mode_s = c.get<std::string>("mode", "fast");
  check(mode_s == "fast" || mode_s == "exact", c, "mode", "must be fast or exact");
  const SampleMode mode = mode_s == "fast" ? SampleMode::fast : SampleMode::exact;
  check(!sizes.empty() && !ks.empty(), c, "", "needs non-empty sizes and ks");
  for (int k : ks) check(k >= 3, c, "ks", "entries must be >= 3");
  check(k_fixed >= 3, c, "k", "must be >= 3");
  c.done();
  root.done();
  run.open();
  auto f = run.csv("bench.csv");
  io::CsvWriter w(f, {"series", "k", "block_size", "ns_per_update", "updates"});
  std::vector<double> xs, ys, xk, yk;
  for (std::size_t s : sizes) {
    auto pt = time_block_update(s, k_fixed, run.seed, min_seconds, batches, mode);
    w.row("size", pt.k, pt.block_size, pt.ns_per_update, pt.updates);
    xs.push_back(static_cast<double>(s));
    ys.push_back(pt.ns_per_update);
  }
  for (int k : ks) {
    auto pt = time_block_update(size_fixed, k, run.seed, min_seconds, batches, mode);
    w.row("k", pt.k, pt.block_size, pt.ns_per_update, pt.updates);
    xk.push_back(k);
    yk.push_back(pt.ns_per_update);
  }
  json summary = json::object();
  if (xs.size() >= 2) summary["size_exponent"] = fit_json(log_log_fit(xs, ys));
  if (xk.size() >= 2) summary["k_exponent"] = fit_json(log_log_fit(xk, yk));
  run.out->write_json("summary.json", summary);
  run.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Flags flags;
  for (int i = 0; i < argc; ++i) flags.argv.emplace_back(argv[i]);
  CLI::App app{"Block and Glauber dynamics experiments for colorings and the hard-core model"};
  app.set_version_flag("--version", kVersion);
  app.add_option("--config", flags.config, "experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", flags.seed, "master seed (overrides the config)");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--threads", flags.threads, "replica-level worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--force", flags.force, "skip the ergodicity guard");
  app.add_option("--r", flags.r, "breakpoint horizon override")->check(CLI::NonNegativeNumber);
  const std::vector<std::pair<std::string, std::string>> subs{
      {"gen-graph", "generate or load a graph"},
      {"partition", "build a block partition"},
      {"validate", "build and validate a block partition"},
      {"sample", "exact samples of a block or of the whole graph"},
      {"run", "run Glauber or block chains with probes"},
      {"couple", "contraction and coupling-time experiments"},
      {"percolate", "percolation tail or domination experiments"},
      {"uniformity", "local uniformity of available colors"},
      {"spectral", "exact kernels, stationary laws and relaxation times"},
      {"bench", "block-update cost scaling"}};
  for (const auto& [name, desc] : subs) app.add_subcommand(name, desc)->fallthrough();
  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  Run run;
  run.flags = flags;
  run.subcommand = app.get_subcommands().front()->get_name();
  try {
    json cfg = json::object();
    if (!flags.config.empty()) {
      std::ifstream in(flags.config);
      if (!in) throw ConfigError("cannot open config '" + flags.config + "'");
      try {
        in >> cfg;
      } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
      }
    }
    if (flags.out.empty()) throw ConfigError("--out is required");
    run.resolved = json::object();
    Reader root(cfg, run.resolved, "");
    root.allow({"graph", "params", "partition", "chain", "probes", "validate", "sample", "couple",
                "percolate", "uniformity", "spectral", "bench"});
    run.seed = root.get<std::uint64_t>("seed", 0);
    if (seed_opt->count()) {
      run.seed = flags.seed;
      run.resolved["seed"] = flags.seed;
    }
    const std::string& s = run.subcommand;
    if (s == "gen-graph") return cmd_gen_graph(run, root);
    if (s == "partition") return cmd_partition(run, root, false);
    if (s == "validate") return cmd_partition(run, root, true);
    if (s == "sample") return cmd_sample(run, root);
    if (s == "run") return cmd_run(run, root);
    if (s == "couple") return cmd_couple(run, root);
    if (s == "percolate") return cmd_percolate(run, root);
    if (s == "uniformity") return cmd_uniformity(run, root);
    if (s == "spectral") return cmd_spectral(run, root);
    if (s == "bench") return cmd_bench(run, root);
    throw ConfigError("unknown subcommand " + s);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ValidationFailed& e) {
    std::cerr << "validation failed: " << e.message << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
}
