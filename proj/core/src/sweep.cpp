#include "adaptobs/sweep.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "adaptobs/errors.hpp"
#include "adaptobs/pipeline.hpp"

namespace adaptobs {

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw ConfigError("sweep axis '" + text + "' is not key=v1,v2,...");
  SweepAxis axis{text.substr(0, eq), {}};
  int depth = 0;
  std::string cur;
  for (char c : text.substr(eq + 1)) {
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      axis.values.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  axis.values.push_back(cur);
  for (const auto& v : axis.values)
    if (v.empty()) throw ConfigError("sweep axis '" + axis.key + "' has an empty value");
  return axis;
}

std::vector<SweepRow> sweep(const Scenario& base, const std::vector<SweepAxis>& axes, std::size_t jobs) {
  std::vector<std::vector<std::string>> combos{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& c : combos)
      for (const auto& v : axis.values) {
        auto extended = c;
        extended.push_back(axis.key + "=" + v);
        next.push_back(std::move(extended));
      }
    combos = std::move(next);
  }

  std::vector<SweepRow> rows(combos.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].index = i;
    rows[i].assignments = combos[i];
    rows[i].directory = (std::filesystem::path(base.output_dir) / fmt::format("run_{:03d}", i)).string();
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      try {
        Scenario s = base;
        for (const auto& a : row.assignments) apply_override(s, a);
        s.output_dir = row.directory;
        row.report = run(s).report;
        row.ok = !row.report.diverged;
        row.failure = row.report.failure;
      } catch (const std::exception& e) {
        row.ok = false;
        row.failure = e.what();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, rows.size());
  std::vector<std::jthread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  return rows;
}

void write_sweep_summary(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "index,directory,assignments,status,terminal_x_tilde,terminal_kappa_tilde,"
         "terminal_x_tilde_baseline,decay_rate,decay_r2,fe_met,t_e,events_proposed,"
         "events_baseline,max_jump_proposed,max_jump_baseline,wall_clock_s,failure\n";
  for (const auto& r : rows) {
    std::string joined;
    for (const auto& a : r.assignments) joined += (joined.empty() ? "" : ";") + a;
    std::string failure = r.failure;
    for (char& c : failure)
      if (c == '"' || c == '\n') c = '\'';
    const RunReport& p = r.report;
    out << fmt::format("{},{},\"{}\",{},{},{},{},{},{},{},{},{},{},{},{},{},\"{}\"\n", r.index, r.directory,
                       joined, r.ok ? "ok" : "failed", p.terminal_x_tilde, p.terminal_kappa_tilde,
                       p.terminal_x_tilde_baseline, p.decay_rate, p.decay_r2, p.fe_met ? 1 : 0, p.t_e,
                       p.events_proposed, p.events_baseline, p.max_jump_proposed, p.max_jump_baseline,
                       p.wall_clock_s, failure);
  }
}

}  // namespace adaptobs
