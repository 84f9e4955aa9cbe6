#include "rieszlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rieszlab {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void ExperimentReport::set_output(const std::string& key, double value, double error_estimate) {
  outputs_.emplace_back(key, value);
  error_estimates_.emplace_back(key, json(error_estimate));
}

void ExperimentReport::set_output_heuristic(const std::string& key, double value) {
  outputs_.emplace_back(key, value);
  error_estimates_.emplace_back(key, json("heuristic"));
}

double ExperimentReport::output(const std::string& key) const {
  for (const auto& [k, v] : outputs_)
    if (k == key) return v;
  throw std::out_of_range("ExperimentReport: no output named " + key);
}

json ExperimentReport::to_json() const {
  json body;
  body["schema_version"] = schema_version_;
  body["experiment"] = experiment_;
  body["params"] = params_;
  json outs = json::object();
  for (const auto& [k, v] : outputs_) outs[k] = v;
  body["outputs"] = outs;
  json errs = json::object();
  for (const auto& [k, v] : error_estimates_) errs[k] = v;
  body["error_estimates"] = errs;

  json full = body;
  full["content_hash"] = fnv1a64(body.dump());
  full["wall_time_ms"] = wall_time_ms_;
  return full;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? ',' : '\n';
  }
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
      out += (i + 1 < row.size()) ? ',' : '\n';
    }
  }
  write_file_atomic(path, out);
}

}  // namespace rieszlab
