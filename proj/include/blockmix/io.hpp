#ifndef BLOCKMIX_IO_HPP
#define BLOCKMIX_IO_HPP

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "blockmix/coupling.hpp"
#include "blockmix/dynamics.hpp"
#include "blockmix/partition.hpp"
#include "blockmix/rng.hpp"

namespace blockmix::io {

using nlohmann::json;

// Bad or missing configuration; the CLI maps it to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Shortest round-trip decimal form; identical across runs and platforms.
std::string format_double(double x);

// CSV rows with '\n' endings. Cells with commas or quotes are quoted.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  template <class... Ts>
  void row(const Ts&... cells) {
    std::vector<std::string> r;
    r.reserve(sizeof...(cells));
    (r.push_back(cell(cells)), ...);
    write(r);
  }
  void write(const std::vector<std::string>& cells);
  std::size_t columns() const { return columns_; }

 private:
  template <class T>
  static std::string cell(const T& x) {
    if constexpr (std::is_same_v<T, bool>) return x ? "1" : "0";
    else if constexpr (std::is_floating_point_v<T>) return format_double(static_cast<double>(x));
    else if constexpr (std::is_integral_v<T>) return std::to_string(x);
    else return std::string(x);
  }
  std::ostream& out_;
  std::size_t columns_;
};

json to_json(const ValidationReport& r);
json to_json(const PartitionBuildInfo& info);
// Blocks as vertex lists plus kinds; from_json rebuilds every derived field.
json partition_to_json(const BlockPartition& part);
BlockPartition partition_from_json(const Graph& g, const json& j);

// {model, k, colors | occupied, step_count, rng_state}
json checkpoint_to_json(const Configuration& cfg, const Rng& rng);
Configuration checkpoint_from_json(const json& j, Rng* rng);

std::string big_to_string(const BigCount& x);

// Output directory written under a temporary name and renamed into place on
// commit(); dropped without commit the temporary tree is removed.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path target);
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir();

  std::filesystem::path file(const std::string& name) const { return tmp_ / name; }
  void write_text(const std::string& name, const std::string& text) const;
  void write_json(const std::string& name, const json& j) const;
  void commit();

 private:
  std::filesystem::path target_, tmp_;
  bool committed_ = false;
};

}  // namespace blockmix::io

#endif  // BLOCKMIX_IO_HPP
