#ifndef HOPLP_REPORT_HPP
#define HOPLP_REPORT_HPP

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "dual.hpp"

namespace hoplp {

inline std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string bound_trace_csv(const std::vector<double>& trace)
{
  std::string out = "sweep,bound\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out += std::to_string(i) + "," + format_double(trace[i]) + "\n";
  return out;
}

inline nlohmann::json solve_report_json(const solve_result& res)
{
  nlohmann::json j;
  j["bound"] = res.bound;
  j["decoded"] = res.decoded;
  j["energy"] = res.decoded_energy;
  j["gap"] = res.gap;
  j["certificate"] = res.certificate;
  j["converged"] = res.converged;
  j["sweeps"] = res.sweeps;
  j["bound_trace_csv"] = bound_trace_csv(res.bound_trace);
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content)
{
  std::ofstream out(path);
  if (!out) throw input_error("cannot open output file: " + path);
  out << content;
}

} // namespace hoplp

#endif
