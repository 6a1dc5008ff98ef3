#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "raceloop/session.hpp"

namespace raceloop {

struct SweepSetting {
  std::vector<std::pair<std::string, double>> overrides;
};

// Grid file: one setting per line, whitespace-separated `key=value` tokens.
inline std::vector<SweepSetting> parse_sweep_grid(std::istream& in,
                                                  const std::string& origin) {
  std::vector<SweepSetting> settings;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string token;
    SweepSetting setting;
    while (row >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 >= token.size())
        throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                               ": expected key=value tokens");
      const std::string key = token.substr(0, eq);
      double value;
      try {
        value = std::stod(token.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigParseError(origin + ":" + std::to_string(lineno) +
                               ": bad number in " + token);
      }
      setting.overrides.emplace_back(key, value);
    }
    if (!setting.overrides.empty()) settings.push_back(std::move(setting));
  }
  return settings;
}

inline std::vector<SweepSetting> load_sweep_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open grid file: " + path);
  return parse_sweep_grid(in, path);
}

struct SweepRow {
  int setting_id = 0;
  ControllerConfig config;
  LapReport report;
};

// One session per setting, all from the same base config, same track and
// seed. Settings are independent; `jobs` > 1 runs them in parallel without
// changing any result.
inline std::vector<SweepRow> run_sweep(const ControllerConfig& base,
                                       const std::vector<SweepSetting>& settings,
                                       const Track& track, int laps, uint64_t seed,
                                       int jobs = 1) {
  std::vector<SweepRow> rows(settings.size());
  for (size_t i = 0; i < settings.size(); ++i) {
    rows[i].setting_id = static_cast<int>(i);
    rows[i].config = base;
    for (const auto& [key, value] : settings[i].overrides)
      apply_controller_key(rows[i].config, key, value);  // throws UnknownKey
  }

  auto run_one = [&](size_t i) {
    SessionSetup setup;
    setup.track = track;
    setup.controller = rows[i].config;
    setup.laps = laps;
    setup.seed = seed;
    rows[i].report = run_session(setup);
  };

  if (jobs <= 1) {
    for (size_t i = 0; i < rows.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> cursor{0};
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (size_t i = cursor.fetch_add(1); i < rows.size(); i = cursor.fetch_add(1))
          run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return rows;
}

// CSV table: setting_id, the union of overridden keys (first-appearance
// order), then the outcome columns.
inline void write_sweep_csv(std::ostream& out, const std::vector<SweepSetting>& settings,
                            const std::vector<SweepRow>& rows) {
  std::vector<std::string> keys;
  for (const auto& s : settings)
    for (const auto& [key, value] : s.overrides)
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);

  out << "setting_id";
  for (const auto& k : keys) out << "," << k;
  out << ",mean_lap_time,collisions,completed\n";

  for (size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].setting_id;
    for (const auto& k : keys) {
      double value = 0.0;
      bool overridden = false;
      for (const auto& [key, v] : settings[i].overrides) {
        if (key == k) {
          value = v;
          overridden = true;
        }
      }
      if (!overridden) {
        // column shows the effective value from the base config
        ControllerConfig probe = rows[i].config;
        value = [&] {
          // read back through a tiny lookup to avoid duplicating the key map
          const ControllerConfig& c = probe;
          if (k == "k_ang") return c.gains.k_ang;
          if (k == "k_dist") return c.gains.k_dist;
          if (k == "k_soft") return c.gains.k_soft;
          if (k == "k_damp") return c.gains.k_damp;
          if (k == "k_rate") return c.gains.k_rate;
          if (k == "k_steer") return c.gains.k_steer;
          if (k == "L_max") return c.gains.L_max;
          if (k == "kappa_norm") return c.gains.kappa_norm;
          if (k == "v_min") return c.limits.v_min;
          if (k == "v_max") return c.limits.v_max;
          if (k == "a_x_max") return c.limits.a_x_max;
          if (k == "a_x_min") return c.limits.a_x_min;
          if (k == "a_y_max") return c.limits.a_y_max;
          if (k == "da_min") return c.limits.da_min;
          return c.limits.da_max;
        }();
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.9g", value);
      out << "," << buf;
    }
    const double mean = steady_state_mean(rows[i].report.lap_times);
    if (std::isnan(mean)) {
      out << ",";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.9g", mean);
      out << "," << buf;
    }
    out << "," << rows[i].report.collisions << ","
        << (rows[i].report.completed ? 1 : 0) << "\n";
  }
}

}  // namespace raceloop
