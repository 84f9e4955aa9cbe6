#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rieszlab {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes);

/// Machine-readable record of one experiment. Every numeric output carries
/// either a quadrature error estimate or an explicit "heuristic" marker (for
/// grid-search lower bounds). The content hash covers everything except
/// wall_time_ms, so reruns of the same config hash identically.
class ExperimentReport {
 public:
  explicit ExperimentReport(std::string name) : experiment_(std::move(name)) {}

  json& params() { return params_; }
  const std::string& name() const { return experiment_; }

  void set_output(const std::string& key, double value, double error_estimate);
  void set_output_heuristic(const std::string& key, double value);
  double output(const std::string& key) const;

  void set_wall_time_ms(std::int64_t ms) { wall_time_ms_ = ms; }

  json to_json() const;
  std::string dump() const { return to_json().dump(2) + "\n"; }

 private:
  std::string experiment_;
  std::string schema_version_ = "riesz-lab-report/1";
  json params_ = json::object();
  std::vector<std::pair<std::string, double>> outputs_;
  std::vector<std::pair<std::string, json>> error_estimates_;
  std::int64_t wall_time_ms_ = 0;
};

/// Write-then-rename; readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& contents);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace rieszlab
