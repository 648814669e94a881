#include "blockmix/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace blockmix::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  write(header);
}

void CsvWriter::write(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("csv: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out_ << c;
    } else {
      out_ << '"';
      for (char ch : c) {
        if (ch == '"') out_ << '"';
        out_ << ch;
      }
      out_ << '"';
    }
  }
  out_ << '\n';
}

namespace {

json tally(const ConditionTally& t) {
  json w = json::array();
  for (auto [b, v] : t.witnesses) w.push_back({{"block", b}, {"vertex", v}});
  return {{"checked", t.checked}, {"violations", t.violations}, {"rate", t.rate()}, {"witnesses", w}};
}

}  // namespace

json to_json(const ValidationReport& r) {
  return {{"cond1", tally(r.cond1)},
          {"cond2a", tally(r.cond2a)},
          {"cond2b", tally(r.cond2b)},
          {"cond2c", tally(r.cond2c)},
          {"cond3", tally(r.cond3)},
          {"growth", tally(r.growth)},
          {"max_block_size", r.max_block_size},
          {"multi_vertex_blocks", r.multi_vertex_blocks},
          {"boundary_incidences", r.boundary_incidences},
          {"cond3_cycle_cap", r.cond3_cycle_cap},
          {"cond3_unchecked", r.cond3_unchecked},
          {"boundary_sets_agree", r.boundary_sets_agree},
          {"loglog_horizon", r.loglog_horizon},
          {"structural_ok", r.structural_ok()}};
}

json to_json(const PartitionBuildInfo& i) {
  return {{"horizon", i.horizon},
          {"cycle_len_cap", i.cycle_len_cap},
          {"breakpoints", i.breakpoints},
          {"short_cycles", i.short_cycles},
          {"cycle_blocks_kept", i.cycle_blocks_kept},
          {"cycle_blocks_overlapping", i.cycle_blocks_overlapping},
          {"dissolved_cond1", i.dissolved_cond1},
          {"dissolved_cond2b", i.dissolved_cond2b},
          {"dissolved_cond3", i.dissolved_cond3},
          {"dissolved_vertices", i.dissolved_vertices}};
}

json partition_to_json(const BlockPartition& part) {
  json blocks = json::array();
  for (const Block& b : part.blocks) blocks.push_back({{"kind", to_string(b.kind)}, {"vertices", b.vertices}});
  return {{"n", part.owner.size()}, {"blocks", blocks}, {"build", to_json(part.info)}};
}

BlockPartition partition_from_json(const Graph& g, const json& j) {
  try {
    if (j.at("n").get<std::size_t>() != g.num_vertices())
      throw ConfigError("partition file: vertex count does not match the graph");
    std::vector<std::vector<Vertex>> groups;
    bool irregular = false;
    for (const auto& b : j.at("blocks")) {
      groups.push_back(b.at("vertices").get<std::vector<Vertex>>());
      if (b.contains("kind") && b.at("kind").get<std::string>() == "irregular") irregular = true;
    }
    return make_partition(g, std::move(groups), irregular);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("partition file: ") + e.what());
  }
}

json checkpoint_to_json(const Configuration& cfg, const Rng& rng) {
  json j{{"model", cfg.model == Model::coloring ? "coloring" : "hardcore"},
         {"step_count", cfg.step_count},
         {"rng_state", rng_state(rng)}};
  if (cfg.model == Model::coloring) {
    j["k"] = cfg.k;
    j["colors"] = cfg.colors;
  } else {
    std::vector<int> occ(cfg.occupied.begin(), cfg.occupied.end());
    j["occupied"] = occ;
  }
  return j;
}

Configuration checkpoint_from_json(const json& j, Rng* rng) {
  try {
    const auto model = j.at("model").get<std::string>();
    Configuration cfg;
    if (model == "coloring") {
      cfg = Configuration::coloring(j.at("colors").get<std::vector<int>>(), j.at("k").get<int>());
    } else if (model == "hardcore") {
      auto occ = j.at("occupied").get<std::vector<int>>();
      cfg = Configuration::hardcore(std::vector<char>(occ.begin(), occ.end()));
    } else {
      throw ConfigError("checkpoint: unknown model '" + model + "'");
    }
    cfg.step_count = j.at("step_count").get<std::uint64_t>();
    if (rng) set_rng_state(*rng, j.at("rng_state").get<std::string>());
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

std::string big_to_string(const BigCount& x) { return x.str(); }

OutputDir::OutputDir(fs::path target) : target_(std::move(target)) {
  if (target_.empty()) throw ConfigError("output directory not set (use --out)");
  const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
  fs::create_directories(parent);
  tmp_ = parent / ("." + target_.filename().string() + ".tmp-" + std::to_string(::getpid()));
  fs::remove_all(tmp_);
  fs::create_directory(tmp_);
}

OutputDir::~OutputDir() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(tmp_, ec);
  }
}

void OutputDir::write_text(const std::string& name, const std::string& text) const {
  std::ofstream f(file(name), std::ios::binary);
  f << text;
  if (!f) throw Error("cannot write " + file(name).string());
}

void OutputDir::write_json(const std::string& name, const json& j) const {
  write_text(name, j.dump(2) + "\n");
}

void OutputDir::commit() {
  if (committed_) return;
  if (fs::exists(target_)) {
    const fs::path old = tmp_.string() + ".old";
    fs::rename(target_, old);
    fs::rename(tmp_, target_);
    fs::remove_all(old);
  } else {
    fs::rename(tmp_, target_);
  }
  committed_ = true;
}

}  // namespace blockmix::io
