// Copyright 2026 The rcac-autopilot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rcac_autopilot/adaptive.hpp"
#include "rcac_autopilot/control.hpp"

namespace rcac_autopilot {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Flat `key = value` text with '#' comments. Calls apply(key, value, where)
// for each entry; apply throws ConfigError for unknown keys.
inline void parse_flat_config(std::istream& in, const std::string& name,
                              const std::function<void(const std::string&, double,
                                                       const std::string&)>& apply) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected `key = value`");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value_str = trim(stripped.substr(eq + 1));
    if (key.empty() || value_str.empty()) {
      throw ConfigError(where + ": expected `key = value`");
    }
    double value = 0.0;
    std::istringstream vs(value_str);
    if (!(vs >> value) || !vs.eof()) {
      throw ConfigError(where + ": bad numeric value `" + value_str + "`");
    }
    apply(key, value, where);
  }
}

}  // namespace detail

// Gain file keys: one per tuning gain, axis-suffixed (K_r_x, K_vP_y, ...),
// plus tau. Unknown keys are rejected. Missing keys keep their defaults.
inline void apply_gain_entry(GainSet& g, const std::string& key, double value,
                             const std::string& where) {
  static const std::map<std::string, Vec3 GainSet::*> vec_fields = {
      {"K_r", &GainSet::K_r},   {"K_vP", &GainSet::K_vP}, {"K_vI", &GainSet::K_vI},
      {"K_vD", &GainSet::K_vD}, {"K_q", &GainSet::K_q},   {"K_wP", &GainSet::K_wP},
      {"K_wI", &GainSet::K_wI}, {"K_wD", &GainSet::K_wD}, {"K_wff", &GainSet::K_wff},
  };
  if (key == "tau") {
    if (!(value > 0.0)) throw ConfigError(where + ": tau must be positive");
    g.tau = value;
    return;
  }
  const auto us = key.rfind('_');
  if (us != std::string::npos) {
    const std::string base = key.substr(0, us);
    const std::string axis = key.substr(us + 1);
    const auto it = vec_fields.find(base);
    if (it != vec_fields.end() && axis.size() == 1) {
      const int idx = axis[0] == 'x' ? 0 : axis[0] == 'y' ? 1 : axis[0] == 'z' ? 2 : -1;
      if (idx >= 0) {
        (g.*(it->second))(idx) = value;
        return;
      }
    }
  }
  throw ConfigError(where + ": unknown gain key `" + key + "`");
}

inline GainSet parse_gains(std::istream& in, const std::string& name,
                           GainSet base = GainSet{}) {
  detail::parse_flat_config(in, name,
                            [&base](const std::string& key, double value,
                                    const std::string& where) {
                              apply_gain_entry(base, key, value, where);
                            });
  return base;
}

inline GainSet load_gains(const std::string& path, GainSet base = GainSet{}) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  return parse_gains(in, path, base);
}

// Hyperparameter file keys: p0_r, p0_v, p0_q, p0_omega and the per-loop
// coupling signs sigma_r, sigma_v, sigma_q, sigma_omega (+1 or -1).
inline void apply_hyper_entry(RcacHyper& h, const std::string& key, double value,
                              const std::string& where) {
  static const std::map<std::string, double RcacHyper::*> fields = {
      {"p0_r", &RcacHyper::p0_r},         {"p0_v", &RcacHyper::p0_v},
      {"p0_q", &RcacHyper::p0_q},         {"p0_omega", &RcacHyper::p0_omega},
      {"sigma_r", &RcacHyper::sigma_r},   {"sigma_v", &RcacHyper::sigma_v},
      {"sigma_q", &RcacHyper::sigma_q},   {"sigma_omega", &RcacHyper::sigma_omega},
  };
  const auto it = fields.find(key);
  if (it == fields.end()) {
    throw ConfigError(where + ": unknown hyperparameter key `" + key + "`");
  }
  if (key.rfind("p0_", 0) == 0 && !(value > 0.0)) {
    throw ConfigError(where + ": " + key + " must be positive");
  }
  if (key.rfind("sigma_", 0) == 0 && value != 1.0 && value != -1.0) {
    throw ConfigError(where + ": " + key + " must be +1 or -1");
  }
  h.*(it->second) = value;
}

inline RcacHyper parse_hyper(std::istream& in, const std::string& name,
                             RcacHyper base = RcacHyper{}) {
  detail::parse_flat_config(in, name,
                            [&base](const std::string& key, double value,
                                    const std::string& where) {
                              apply_hyper_entry(base, key, value, where);
                            });
  return base;
}

inline RcacHyper load_hyper(const std::string& path, RcacHyper base = RcacHyper{}) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  return parse_hyper(in, path, base);
}

}  // namespace rcac_autopilot
