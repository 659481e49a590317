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

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rcac_autopilot/dynamics.hpp"
#include "rcac_autopilot/geometry.hpp"

namespace rcac_autopilot {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal form that round-trips the exact double value.
inline std::string format_double(double x) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw CsvError(where + ": bad number `" + std::string(s) + "`");
  }
  return x;
}

// One 500 Hz telemetry sample: vehicle state, latched setpoints, adaptive
// contributions, and the achieved thrust/saturation from the mixer.
struct LogRecord {
  double t{0.0};
  Vec3 r_meas{Vec3::Zero()};
  Vec3 r_sp{Vec3::Zero()};
  Vec3 v_meas{Vec3::Zero()};
  Vec3 v_sp{Vec3::Zero()};
  UnitQuaternion q{};
  UnitQuaternion q_sp{};
  Vec3 omega{Vec3::Zero()};
  Vec3 omega_sp{Vec3::Zero()};
  Vec3 f_sp{Vec3::Zero()};
  Vec3 moment_sp{Vec3::Zero()};
  Vec3 u_r{Vec3::Zero()};
  Vec3 u_v{Vec3::Zero()};
  Vec3 u_q{Vec3::Zero()};
  Vec3 u_omega{Vec3::Zero()};
  double thrust_achieved{0.0};
  bool saturated{false};
};

using SimulationLog = std::vector<LogRecord>;

struct GainRecord {
  double t{0.0};
  std::array<double, 3> theta_r{};
  std::array<double, 9> theta_v{};
  std::array<double, 3> theta_q{};
  std::array<double, 12> theta_omega{};
};

using GainLog = std::vector<GainRecord>;

inline constexpr std::string_view kLogHeader =
    "t,r_x,r_y,r_z,r_sp_x,r_sp_y,r_sp_z,v_x,v_y,v_z,v_sp_x,v_sp_y,v_sp_z,"
    "q_w,q_x,q_y,q_z,q_sp_w,q_sp_x,q_sp_y,q_sp_z,"
    "omega_x,omega_y,omega_z,omega_sp_x,omega_sp_y,omega_sp_z,"
    "f_sp_x,f_sp_y,f_sp_z,M_sp_x,M_sp_y,M_sp_z,"
    "u_r_x,u_r_y,u_r_z,u_v_x,u_v_y,u_v_z,u_q_x,u_q_y,u_q_z,"
    "u_omega_x,u_omega_y,u_omega_z,thrust_achieved,saturated";
inline constexpr int kLogColumns = 47;

inline constexpr std::string_view kGainsHeader =
    "t,theta_r_0,theta_r_1,theta_r_2,"
    "theta_v_0,theta_v_1,theta_v_2,theta_v_3,theta_v_4,theta_v_5,theta_v_6,theta_v_7,theta_v_8,"
    "theta_q_0,theta_q_1,theta_q_2,"
    "theta_omega_0,theta_omega_1,theta_omega_2,theta_omega_3,theta_omega_4,theta_omega_5,"
    "theta_omega_6,theta_omega_7,theta_omega_8,theta_omega_9,theta_omega_10,theta_omega_11";
inline constexpr int kGainsColumns = 28;

namespace detail {

inline void append_vec3(std::string& line, const Vec3& v) {
  line += ',';
  line += format_double(v.x());
  line += ',';
  line += format_double(v.y());
  line += ',';
  line += format_double(v.z());
}

inline void append_quat(std::string& line, const UnitQuaternion& q) {
  line += ',';
  line += format_double(q.eta);
  append_vec3(line, q.eps);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline std::string log_record_to_csv(const LogRecord& rec) {
  std::string line = format_double(rec.t);
  detail::append_vec3(line, rec.r_meas);
  detail::append_vec3(line, rec.r_sp);
  detail::append_vec3(line, rec.v_meas);
  detail::append_vec3(line, rec.v_sp);
  detail::append_quat(line, rec.q);
  detail::append_quat(line, rec.q_sp);
  detail::append_vec3(line, rec.omega);
  detail::append_vec3(line, rec.omega_sp);
  detail::append_vec3(line, rec.f_sp);
  detail::append_vec3(line, rec.moment_sp);
  detail::append_vec3(line, rec.u_r);
  detail::append_vec3(line, rec.u_v);
  detail::append_vec3(line, rec.u_q);
  detail::append_vec3(line, rec.u_omega);
  line += ',';
  line += format_double(rec.thrust_achieved);
  line += ',';
  line += rec.saturated ? '1' : '0';
  return line;
}

inline void write_log_csv(const std::string& path, const SimulationLog& log) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw CsvError(path + ": cannot open for writing");
  out << kLogHeader << '\n';
  for (const LogRecord& rec : log) out << log_record_to_csv(rec) << '\n';
  if (!out) throw CsvError(path + ": write failed");
}

inline SimulationLog read_log_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path + ":1: missing header");
  if (line != kLogHeader) {
    throw CsvError(path + ":1: header does not match the expected log schema");
  }
  SimulationLog log;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto f = detail::split_csv(line);
    if (f.size() != kLogColumns) {
      throw CsvError(where + ": expected " + std::to_string(kLogColumns) +
                     " columns, got " + std::to_string(f.size()));
    }
    LogRecord r;
    int i = 0;
    auto next = [&]() { return parse_double(f[static_cast<size_t>(i++)], where); };
    auto next_vec3 = [&]() {
      Vec3 v;
      v.x() = next();
      v.y() = next();
      v.z() = next();
      return v;
    };
    r.t = next();
    r.r_meas = next_vec3();
    r.r_sp = next_vec3();
    r.v_meas = next_vec3();
    r.v_sp = next_vec3();
    r.q.eta = next();
    r.q.eps = next_vec3();
    r.q_sp.eta = next();
    r.q_sp.eps = next_vec3();
    r.omega = next_vec3();
    r.omega_sp = next_vec3();
    r.f_sp = next_vec3();
    r.moment_sp = next_vec3();
    r.u_r = next_vec3();
    r.u_v = next_vec3();
    r.u_q = next_vec3();
    r.u_omega = next_vec3();
    r.thrust_achieved = next();
    const std::string_view sat = f[static_cast<size_t>(i)];
    if (sat == "1") {
      r.saturated = true;
    } else if (sat == "0") {
      r.saturated = false;
    } else {
      throw CsvError(where + ": saturated flag must be 0 or 1");
    }
    log.push_back(r);
  }
  return log;
}

inline std::string gain_record_to_csv(const GainRecord& rec) {
  std::string line = format_double(rec.t);
  auto append = [&line](const auto& arr) {
    for (double x : arr) {
      line += ',';
      line += format_double(x);
    }
  };
  append(rec.theta_r);
  append(rec.theta_v);
  append(rec.theta_q);
  append(rec.theta_omega);
  return line;
}

inline void write_gains_csv(const std::string& path, const GainLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError(path + ": cannot open for writing");
  out << kGainsHeader << '\n';
  for (const GainRecord& rec : log) out << gain_record_to_csv(rec) << '\n';
  if (!out) throw CsvError(path + ": write failed");
}

inline GainLog read_gains_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path + ":1: missing header");
  if (line != kGainsHeader) {
    throw CsvError(path + ":1: header does not match the expected gains schema");
  }
  GainLog log;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto f = detail::split_csv(line);
    if (f.size() != kGainsColumns) {
      throw CsvError(where + ": expected " + std::to_string(kGainsColumns) +
                     " columns, got " + std::to_string(f.size()));
    }
    GainRecord r;
    int i = 0;
    auto next = [&]() { return parse_double(f[static_cast<size_t>(i++)], where); };
    r.t = next();
    for (double& x : r.theta_r) x = next();
    for (double& x : r.theta_v) x = next();
    for (double& x : r.theta_q) x = next();
    for (double& x : r.theta_omega) x = next();
    log.push_back(r);
  }
  return log;
}

}  // namespace rcac_autopilot
