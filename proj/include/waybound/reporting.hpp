/*
 * This code is part of Waybound.
 *
 * (C) Copyright Waybound Contributors 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 *
 * Any modifications or derivative works of this code must retain this
 * copyright notice, and modified files need to carry a notice indicating
 * that they have been altered from the originals.
 */

#ifndef WAYBOUND_REPORTING_HPP
#define WAYBOUND_REPORTING_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "optimize.hpp"
#include "scaling.hpp"
#include "way.hpp"

namespace waybound {

/// All floating-point output is printed with 17 significant digits so that
/// every emitted value round-trips to the exact double. Output files contain
/// nothing run-dependent (no timestamps, no wall time), which makes repeated
/// runs with one seed byte-identical regardless of thread count.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Minimal JSON emitter with caller-controlled field order and the shared
/// 17-digit float format. Off-the-shelf serializers print doubles in
/// shortest-round-trip form, which breaks the fixed-digit output contract.
class JsonObject {
 public:
  void add_int(const std::string& key, long long value) {
    fields_.emplace_back(key, std::to_string(value));
  }
  void add_uint(const std::string& key, unsigned long long value) {
    fields_.emplace_back(key, std::to_string(value));
  }
  void add_number(const std::string& key, double value) {
    fields_.emplace_back(key, format_double(value));
  }
  void add_bool(const std::string& key, bool value) {
    fields_.emplace_back(key, value ? "true" : "false");
  }
  void add_string(const std::string& key, const std::string& value) {
    std::string quoted = "\"";
    for (char c : value) {
      if (c == '"' || c == '\\') quoted += '\\';
      quoted += c;
    }
    quoted += '"';
    fields_.emplace_back(key, quoted);
  }
  void add_numbers(const std::string& key, const std::vector<double>& values) {
    std::string arr = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) arr += ", ";
      arr += format_double(values[i]);
    }
    arr += "]";
    fields_.emplace_back(key, arr);
  }
  void add_object(const std::string& key, const JsonObject& value) {
    fields_.emplace_back(key, value.dump(1));
  }

  std::string dump(int depth = 0) const {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
    std::string out = "{\n";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      out += inner + "\"" + fields_[i].first + "\": " + fields_[i].second;
      if (i + 1 < fields_.size()) out += ",";
      out += "\n";
    }
    out += pad + "}";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

inline JsonObject report_to_json(const TradeoffReport& r) {
  JsonObject o;
  o.add_number("conservation_residual", r.conservation_residual);
  o.add_number("f_app", r.f_app);
  o.add_number("f_sys", r.f_sys);
  o.add_number("lhs", r.lhs);
  o.add_number("norm_l_app", r.norm_l_app);
  o.add_number("norm_l_sys", r.norm_l_sys);
  o.add_number("rhs", r.rhs);
  o.add_bool("satisfied", r.satisfied);
  o.add_number("slack", r.slack);
  return o;
}

inline JsonObject report_to_json(const TripartiteReport& r) {
  JsonObject o;
  o.add_number("conservation_residual", r.conservation_residual);
  o.add_number("f_ae", r.f_ae);
  o.add_number("f_app", r.f_app);
  o.add_number("f_sys", r.f_sys);
  o.add_number("lhs", r.lhs);
  o.add_bool("monotone_ok", r.monotone_ok);
  o.add_number("norm_l_app", r.norm_l_app);
  o.add_number("norm_l_env", r.norm_l_env);
  o.add_number("norm_l_sys", r.norm_l_sys);
  o.add_number("rhs_joint", r.rhs_joint);
  o.add_number("rhs_traced", r.rhs_traced);
  o.add_bool("satisfied", r.satisfied);
  o.add_number("slack_joint", r.slack_joint);
  o.add_number("slack_traced", r.slack_traced);
  return o;
}

inline void write_sweep_csv(std::ostream& out,
                            const std::vector<TradeoffReport>& reports) {
  out << "trial,lhs,f_sys,f_app,norm_l_sys,norm_l_app,rhs,slack,"
         "conservation_residual,satisfied\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const TradeoffReport& r = reports[i];
    out << i << ',' << format_double(r.lhs) << ',' << format_double(r.f_sys)
        << ',' << format_double(r.f_app) << ',' << format_double(r.norm_l_sys)
        << ',' << format_double(r.norm_l_app) << ',' << format_double(r.rhs)
        << ',' << format_double(r.slack) << ','
        << format_double(r.conservation_residual) << ','
        << (r.satisfied ? 1 : 0) << '\n';
  }
}

inline void write_tripartite_csv(std::ostream& out,
                                 const std::vector<TripartiteReport>& reports) {
  out << "trial,lhs,f_sys,f_app,f_ae,norm_l_sys,norm_l_app,norm_l_env,"
         "rhs_joint,slack_joint,rhs_traced,slack_traced,"
         "conservation_residual,monotone_ok,satisfied\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const TripartiteReport& r = reports[i];
    out << i << ',' << format_double(r.lhs) << ',' << format_double(r.f_sys)
        << ',' << format_double(r.f_app) << ',' << format_double(r.f_ae) << ','
        << format_double(r.norm_l_sys) << ',' << format_double(r.norm_l_app)
        << ',' << format_double(r.norm_l_env) << ','
        << format_double(r.rhs_joint) << ',' << format_double(r.slack_joint)
        << ',' << format_double(r.rhs_traced) << ','
        << format_double(r.slack_traced) << ','
        << format_double(r.conservation_residual) << ','
        << (r.monotone_ok ? 1 : 0) << ',' << (r.satisfied ? 1 : 0) << '\n';
  }
}

inline void write_pareto_csv(std::ostream& out,
                             const std::vector<ParetoPoint>& points) {
  out << "f_app,f_sys,weight_ratio,slack\n";
  for (const ParetoPoint& p : points) {
    out << format_double(p.f_app) << ',' << format_double(p.f_sys) << ','
        << format_double(p.weight_ratio) << ',' << format_double(p.slack)
        << '\n';
  }
}

inline void write_trace_csv(std::ostream& out,
                            const std::vector<TraceEntry>& trace) {
  out << "restart,evaluation,objective_value\n";
  for (const TraceEntry& t : trace)
    out << t.restart << ',' << t.evaluation << ','
        << format_double(t.objective) << '\n';
}

inline void write_scaling_csv(std::ostream& out,
                              const std::vector<ScalingRow>& rows) {
  out << "n,norm_l_app,bound_floor,best_f_sys,best_f_app\n";
  for (const ScalingRow& r : rows) {
    out << r.n << ',' << format_double(r.norm_l_app) << ','
        << format_double(r.bound_floor) << ',' << format_double(r.best_f_sys)
        << ',' << format_double(r.best_f_app) << '\n';
  }
}

/// Violation bookkeeping for sweep summaries. A report violates when its
/// slack is below -tol; violations with conservation_residual above 1e-8 are
/// additionally counted as non-conserving, since the bound's hypothesis does
/// not apply to them.
struct ViolationCounts {
  long n_trials = 0;
  long n_violations = 0;
  long n_violations_nonconserving = 0;
  double min_slack = 0.0;
};

inline ViolationCounts count_violations(
    const std::vector<TradeoffReport>& reports, double tol) {
  ViolationCounts c;
  c.n_trials = static_cast<long>(reports.size());
  c.min_slack = reports.empty() ? 0.0 : reports.front().slack;
  for (const TradeoffReport& r : reports) {
    c.min_slack = std::min(c.min_slack, r.slack);
    if (r.slack < -tol) {
      ++c.n_violations;
      if (r.conservation_residual > 1e-8) ++c.n_violations_nonconserving;
    }
  }
  return c;
}

inline ViolationCounts count_violations(
    const std::vector<TripartiteReport>& reports, double tol) {
  ViolationCounts c;
  c.n_trials = static_cast<long>(reports.size());
  c.min_slack = reports.empty() ? 0.0 : reports.front().slack_joint;
  for (const TripartiteReport& r : reports) {
    c.min_slack = std::min({c.min_slack, r.slack_joint, r.slack_traced});
    const bool monotone_violation = !r.monotone_ok;
    if (!r.satisfied || monotone_violation) {
      ++c.n_violations;
      if (r.conservation_residual > 1e-8) ++c.n_violations_nonconserving;
    }
  }
  return c;
}

inline void write_text_file(const std::string& path,
                            const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open output file: " + path);
  out << contents;
  if (!out)
    throw std::runtime_error("failed writing output file: " + path);
}

template <typename Writer>
inline void write_csv_file(const std::string& path, Writer writer) {
  std::ostringstream buffer;
  writer(buffer);
  write_text_file(path, buffer.str());
}

}  // namespace waybound

#endif  // WAYBOUND_REPORTING_HPP
