#pragma once

// CSV serialization of traces, scatter samples and fits. Reals are printed
// with %.17g so that every value parses back to the same double.

#include "egsolve/core.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace egsolve {

inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kTraceHeader = "k,gamma,omega,norm_F_x,norm_F_xhat,dist_sq";

inline void write_trace_csv(std::ostream& os, const SolveTrace& trace) {
  os << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    os << r.k << ',' << fmt_real(r.gamma) << ',' << fmt_real(r.omega) << ',' << fmt_real(r.norm_F_x) << ','
       << fmt_real(r.norm_F_xhat) << ',';
    if (r.dist_sq) os << fmt_real(*r.dist_sq);
    os << '\n';
  }
  const TraceSummary& s = trace.summary;
  os << "# iters=" << s.iterations_run << ",min_normF=" << fmt_real(s.min_norm_F_xk)
     << ",reason=" << to_string(s.reason) << '\n';
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_csv_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(Errc::ParseError, "bad number '" + s + "'");
  }
  if (used != s.size()) throw Error(Errc::ParseError, "bad number '" + s + "'");
  return v;
}

inline std::size_t parse_csv_index(const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Error(Errc::ParseError, "bad index '" + s + "'");
}

}  // namespace detail

/// Reads what write_trace_csv wrote. Rows come back without iterates.
inline SolveTrace read_trace_csv(std::istream& is) {
  SolveTrace trace;
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw Error(Errc::ParseError, "missing trace header");
  bool have_summary = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      for (const std::string& kv : detail::split_fields(line.substr(2))) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(Errc::ParseError, "bad summary field '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "iters") trace.summary.iterations_run = detail::parse_csv_index(val);
        else if (key == "min_normF") trace.summary.min_norm_F_xk = detail::parse_csv_real(val);
        else if (key == "reason") {
          if (val == "tolerance") trace.summary.reason = StopReason::Tolerance;
          else if (val == "max_iters") trace.summary.reason = StopReason::MaxIters;
          else if (val == "extrapolation_root") trace.summary.reason = StopReason::ExtrapolationRoot;
          else throw Error(Errc::ParseError, "unknown stop reason '" + val + "'");
        }
      }
      have_summary = true;
      continue;
    }
    const auto f = detail::split_fields(line);
    if (f.size() != 6) throw Error(Errc::ParseError, "trace row needs 6 fields: '" + line + "'");
    TraceRow r;
    r.k = detail::parse_csv_index(f[0]);
    r.gamma = detail::parse_csv_real(f[1]);
    r.omega = detail::parse_csv_real(f[2]);
    r.norm_F_x = detail::parse_csv_real(f[3]);
    r.norm_F_xhat = detail::parse_csv_real(f[4]);
    if (!f[5].empty()) r.dist_sq = detail::parse_csv_real(f[5]);
    trace.rows.push_back(std::move(r));
  }
  if (!have_summary) throw Error(Errc::ParseError, "missing summary line");
  bool argmin_seen = false;
  for (const TraceRow& r : trace.rows) {
    if (r.norm_F_xhat < trace.summary.min_norm_F_xhatk) {
      trace.summary.min_norm_F_xhatk = r.norm_F_xhat;
      trace.summary.argmin_norm_F_xhatk = r.k;
    }
    if (!argmin_seen && r.norm_F_x == trace.summary.min_norm_F_xk) {
      trace.summary.argmin_norm_F_xk = r.k;
      argmin_seen = true;
    }
  }
  if (!trace.rows.empty()) {
    trace.summary.initial_dist_sq = trace.rows.front().dist_sq;
    trace.summary.final_dist_sq = trace.rows.back().dist_sq;
  }
  return trace;
}

}  // namespace egsolve
