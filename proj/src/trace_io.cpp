#include "chebybal/trace_io.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace chebybal {

namespace {

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> rowValues(const TraceRow & row, bool includeTiming)
{
  std::vector<double> vals;
  vals.push_back(row.com.x());
  vals.push_back(row.com.y());
  vals.push_back(row.com.z());
  for(const auto & w : row.wrenches)
  {
    for(int i = 0; i < 6; ++i)
    {
      vals.push_back(w(i));
    }
  }
  vals.push_back(row.radius);
  vals.push_back(row.r_w);
  for(size_t i = 0; i < row.mu_mes.size(); ++i)
  {
    vals.push_back(row.mu_mes[i]);
    vals.push_back(row.mu_filt[i]);
  }
  vals.push_back(includeTiming ? row.solve_time * 1e6 : 0.0);
  vals.push_back(row.max_violation);
  return vals;
}

} // namespace

std::vector<std::string> traceColumns(const Scenario & scenario)
{
  std::vector<std::string> cols = {"tick", "state", "com_x", "com_y", "com_z"};
  for(const auto & c : scenario.contacts)
  {
    for(const char * comp : {"fx", "fy", "fz", "tx", "ty", "tz"})
    {
      cols.push_back(c.id + "_" + comp);
    }
  }
  cols.push_back("radius");
  cols.push_back("r_w");
  for(const auto & c : scenario.contacts)
  {
    cols.push_back(c.id + "_mu_mes");
    cols.push_back(c.id + "_mu_filt");
  }
  cols.push_back("solve_time_us");
  cols.push_back("max_violation");
  return cols;
}

void writeTraceCsv(std::ostream & out, const Scenario & scenario, const RunResult & result,
                   bool includeTiming)
{
  auto cols = traceColumns(scenario);
  for(size_t i = 0; i < cols.size(); ++i)
  {
    out << (i ? "," : "") << cols[i];
  }
  out << "\n";
  for(const auto & row : result.rows)
  {
    out << row.tick << "," << row.state;
    for(double v : rowValues(row, includeTiming))
    {
      out << "," << fmt(v);
    }
    out << "\n";
  }
}

void writeTraceJson(std::ostream & out, const Scenario & scenario, const RunResult & result,
                    uint64_t seed, bool includeTiming)
{
  nlohmann::json doc;
  doc["meta"] = {{"seed", seed},
                 {"tick_seconds", scenario.tick_seconds},
                 {"noise_sigma", scenario.noise_sigma},
                 {"mass", scenario.robot.mass},
                 {"gravity", scenario.robot.gravity}};
  doc["columns"] = traceColumns(scenario);
  nlohmann::json rows = nlohmann::json::array();
  for(const auto & row : result.rows)
  {
    nlohmann::json r = nlohmann::json::array();
    r.push_back(row.tick);
    r.push_back(row.state);
    for(double v : rowValues(row, includeTiming))
    {
      r.push_back(v);
    }
    rows.push_back(r);
  }
  doc["rows"] = rows;
  const RunSummary & s = result.summary;
  doc["summary"] = {{"completed", s.completed},
                    {"ticks_run", s.ticks_run},
                    {"halt_reason", s.halt_reason},
                    {"violated_rows", s.violated_rows},
                    {"max_eq_residual", s.max_eq_residual},
                    {"min_radius", s.min_radius},
                    {"mean_solve_time_us", s.mean_solve_time * 1e6},
                    {"max_solve_time_us", s.max_solve_time * 1e6}};
  out << doc.dump(2) << "\n";
}

std::string summaryText(const RunSummary & s)
{
  std::ostringstream out;
  out << "ticks: " << s.ticks_run << (s.completed ? " (completed)" : " (halted)") << "\n";
  if(!s.completed)
  {
    out << "halt: " << s.halt_reason << "\n";
    for(const auto & row : s.violated_rows)
    {
      out << "  violated: " << row << "\n";
    }
  }
  out << "max equilibrium residual: " << fmt(s.max_eq_residual) << "\n";
  out << "min radius: " << fmt(s.min_radius) << "\n";
  out << "solve time us (mean/max): " << fmt(s.mean_solve_time * 1e6) << " / "
      << fmt(s.max_solve_time * 1e6) << "\n";
  return out.str();
}

} // namespace chebybal
