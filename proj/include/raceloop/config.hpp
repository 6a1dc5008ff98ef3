#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "raceloop/control.hpp"
#include "raceloop/ftg.hpp"

namespace raceloop {

// Flat `key = value` documents; '#' starts a comment.
inline std::vector<std::pair<std::string, double>> parse_kv(std::istream& in,
                                                            const std::string& origin) {
  std::vector<std::pair<std::string, double>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (auto& c : line)
      if (c == '=') c = ' ';
    std::istringstream row(line);
    std::string key;
    if (!(row >> key)) continue;
    double value;
    if (!(row >> value)) {
      throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                             ": expected `key = value`");
    }
    std::string extra;
    if (row >> extra) {
      throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                             ": trailing tokens after value");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

inline std::vector<std::pair<std::string, double>> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file: " + path);
  return parse_kv(in, path);
}

// The full tunable set of the steering and velocity laws.
inline void apply_controller_key(ControllerConfig& config, const std::string& key,
                                 double value) {
  auto& g = config.gains;
  auto& l = config.limits;
  if (key == "k_ang") g.k_ang = value;
  else if (key == "k_dist") g.k_dist = value;
  else if (key == "k_soft") g.k_soft = value;
  else if (key == "k_damp") g.k_damp = value;
  else if (key == "k_rate") g.k_rate = value;
  else if (key == "k_steer") g.k_steer = value;
  else if (key == "L_max") g.L_max = value;
  else if (key == "kappa_norm") g.kappa_norm = value;
  else if (key == "v_min") l.v_min = value;
  else if (key == "v_max") l.v_max = value;
  else if (key == "a_x_max") l.a_x_max = value;
  else if (key == "a_x_min") l.a_x_min = value;
  else if (key == "a_y_max") l.a_y_max = value;
  else if (key == "da_min") l.da_min = value;
  else if (key == "da_max") l.da_max = value;
  else throw UnknownKey("unknown controller key: " + key);
}

inline ControllerConfig load_controller_config(const std::string& path) {
  ControllerConfig config;
  for (const auto& [key, value] : parse_kv_file(path))
    apply_controller_key(config, key, value);
  return config;
}

inline void apply_ftg_key(FtgParams& params, const std::string& key, double value) {
  if (key == "bubble_radius") params.bubble_radius = value;
  else if (key == "max_considered_range") params.max_considered_range = value;
  else if (key == "min_gap_width") params.min_gap_width = static_cast<int>(value);
  else if (key == "speed_straight") params.speed_straight = value;
  else if (key == "speed_turn") params.speed_turn = value;
  else if (key == "steer_gain") params.steer_gain = value;
  else throw UnknownKey("unknown follow-the-gap key: " + key);
}

inline FtgParams load_ftg_config(const std::string& path) {
  FtgParams params;
  for (const auto& [key, value] : parse_kv_file(path)) apply_ftg_key(params, key, value);
  return params;
}

}  // namespace raceloop
