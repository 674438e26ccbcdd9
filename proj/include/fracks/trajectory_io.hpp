#pragma once

// On-disk layout of one run:
//   <base>/run-<16 hex digits>/metadata.json
//                              records.csv
//                              final_field.csv
// The hex digits are an FNV-1a 64-bit hash of params, config and the
// initial field's samples, so identical inputs land in the same directory.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fracks/evolution.hpp"
#include "fracks/io.hpp"

namespace fracks {

namespace detail {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = kFnvOffset) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

/// Digest of the samples' bit patterns.
inline std::uint64_t field_digest(const Field& f) {
  std::uint64_t h = detail::kFnvOffset;
  for (double v : f.values()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = detail::fnv1a(&bits, sizeof bits, h);
  }
  return h;
}

inline std::string run_id(const ModelParams& p, const SolverConfig& c, const Field& u0) {
  const std::string key = nlohmann::json(p).dump() + nlohmann::json(c).dump() + detail::hex16(field_digest(u0));
  return "run-" + detail::hex16(detail::fnv1a(key.data(), key.size()));
}

inline nlohmann::json trajectory_metadata(const Trajectory& traj, const Field& u0) {
  nlohmann::json j;
  j["params"] = traj.params;
  j["config"] = traj.config;
  j["outcome"] = std::string(to_string(traj.outcome));
  j["reason"] = traj.reason;
  j["t_final"] = traj.records.empty() ? 0.0 : traj.records.back().t;
  j["steps"] = traj.steps;
  j["rejected_steps"] = traj.rejected;
  j["records"] = traj.records.size();
  j["u0_digest"] = detail::hex16(field_digest(u0));
  return j;
}

inline void write_records_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
  os << DiagnosticsRecord::csv_header() << '\n';
  for (const auto& r : records) os << r.csv_row() << '\n';
}

/// Write the run directory under `base` and return its path.
inline std::filesystem::path write_trajectory(const Trajectory& traj, const Field& u0,
                                              const std::filesystem::path& base) {
  namespace fs = std::filesystem;
  const fs::path dir = base / run_id(traj.params, traj.config, u0);
  fs::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("metadata.json");
    os << trajectory_metadata(traj, u0).dump(2) << '\n';
  }
  {
    auto os = open("records.csv");
    write_records_csv(os, traj.records);
  }
  {
    auto os = open("final_field.csv");
    write_field_csv(os, traj.final_field);
  }
  return dir;
}

}  // namespace fracks
