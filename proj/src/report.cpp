#include "coex/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "coex/error.hpp"
#include "coex/rng.hpp"

namespace coex {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

void write_training_log_csv(std::ostream& out, const TrainLog& log) {
  out << kTrainingLogHeader << '\n';
  for (const auto& e : log.episodes)
    out << e.episode << ',' << num(e.mean_reward) << ',' << num(e.t_nr_us) << ','
        << num(e.gamma_nr) << ',' << num(e.gamma_wf) << ',' << num(e.jain) << ','
        << num(e.u_nr) << ',' << num(e.u_wf) << '\n';
}

std::vector<double> read_reward_csv(std::istream& in) {
  std::vector<double> rewards;
  std::string line;
  long column = -1;
  bool first = true;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (first) {
      first = false;
      double probe;
      if (!parse_double(cells.back(), probe)) {
        const auto it = std::find(cells.begin(), cells.end(), "mean_reward");
        column = it != cells.end() ? it - cells.begin() : static_cast<long>(cells.size()) - 1;
        continue;
      }
    }
    const std::size_t c = column >= 0 ? static_cast<std::size_t>(column) : cells.size() - 1;
    double v;
    if (c >= cells.size() || !parse_double(cells[c], v))
      throw ParseError("reward CSV line " + std::to_string(line_no) + ": not a number");
    rewards.push_back(v);
  }
  return rewards;
}

std::string run_label(const RunKey& k) {
  return std::string(to_string(k.scheme)) + "_p" + std::to_string(k.priority) + "_n" +
         std::to_string(k.n_pairs) + "_t" + std::to_string(k.trial);
}

void write_sweep_csv(std::ostream& out, const ReportBundle& b) {
  out << kSweepHeader << '\n';
  for (const RunResult& r : b.runs) {
    out << to_string(r.key.scheme) << ',' << r.key.priority << ',' << r.key.n_pairs << ','
        << r.key.trial << ',';
    if (!r.ok()) {
      out << "nan,nan,nan,nan,\n";
      continue;
    }
    out << num(r.summary.agg_throughput) << ',' << num(r.summary.jain) << ','
        << num(r.summary.mean_utility) << ',' << num(r.summary.utility_fairness) << ',';
    if (r.stabilization_episode) out << *r.stabilization_episode;
    out << '\n';
  }
}

void write_summary(std::ostream& out, const ReportBundle& b) {
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  out << "ordering_throughput: LBT>Q2u>Q2>Q1 = " << verdict(b.throughput_ordering_pass()) << '\n';
  out << "ordering_fairness: Q1>Q2>Q2u>LBT = " << verdict(b.fairness_ordering_pass()) << '\n';
  if (b.throughput_checks.empty())
    out << "# orderings need LBT, Q1, Q2 and Q2u in the same (priority, N) cell\n";
  out << "margin: " << num(100.0 * kOrderingMargin) << "% relative, pairwise\n";
  out << "last_episodes: " << b.config.report.last_episodes << '\n';
  out << "trials: " << b.config.trials << '\n';

  auto dump = [&](const std::vector<OrderingCheck>& checks, const char* what) {
    for (const auto& c : checks) {
      out << '\n' << what << " p" << c.priority << " N" << c.n_pairs << " " << c.name << " = "
          << verdict(c.pass) << '\n';
      for (const auto& d : c.details) out << "  " << d << '\n';
    }
  };
  dump(b.throughput_checks, "throughput");
  dump(b.fairness_checks, "fairness");

  if (!b.mab_placement.empty()) {
    out << "\nMAB placement (not gated)\n";
    for (const auto& line : b.mab_placement) out << "  " << line << '\n';
  }

  out << "\ncells: scheme,priority,n_pairs,trials_ok,agg_throughput_mbps,gamma_nr_mbps,"
         "gamma_wf_mbps,jain,mean_utility,utility_fairness\n";
  for (const auto& [key, c] : b.cells) {
    const auto& [s, p, n] = key;
    out << "  " << to_string(s) << ',' << p << ',' << n << ',' << c.trials_ok << ','
        << num(c.mean.agg_throughput) << ',' << num(c.mean.gamma_nr) << ','
        << num(c.mean.gamma_wf) << ',' << num(c.mean.jain) << ',' << num(c.mean.mean_utility)
        << ',' << num(c.mean.utility_fairness) << '\n';
  }

  bool header = false;
  for (const RunResult& r : b.runs) {
    if (r.ok()) continue;
    if (!header) out << "\nfailed runs\n";
    header = true;
    out << "  " << run_label(r.key) << ": " << r.error << '\n';
  }
}

nlohmann::json run_metadata(const ExperimentConfig& cfg, std::string_view command) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  nlohmann::json j;
  j["command"] = std::string(command);
  j["created_utc"] = stamp;
  j["rng_family"] = kRngFamily;
  j["seed_derivation"] = "run_seed = base_seed ^ splitmix64 chain over (scheme, priority, n_pairs, trial)";
  j["config"] = to_json(cfg);
  j["defaulted_keys"] = cfg.defaulted;
  return j;
}

std::string line_chart_svg(std::string_view title, std::string_view x_label,
                           std::string_view y_label, const std::vector<Series>& series) {
  constexpr double W = 720, H = 420, L = 70, R = 150, T = 40, B = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#17becf"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
      << num(xv).substr(0, num(xv).find('.') + 2) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
      << num(yv).substr(0, num(yv).find('.') + 3) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << x_label << "</text>\n";
  o << "<text transform=\"translate(16," << (T + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % std::size(colors)];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i)
      if (std::isfinite(series[s].y[i])) o << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
    o << "\"/>\n";
    const double ly = T + 16 * static_cast<double>(s);
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\""
      << ly << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\">" << series[s].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_report(const ReportBundle& b, const fs::path& dir) {
  fs::create_directories(dir / "logs");
  {
    std::ostringstream s;
    write_sweep_csv(s, b);
    write_file(dir / "sweep.csv", s.str());
  }
  {
    std::ostringstream s;
    write_summary(s, b);
    write_file(dir / "summary.txt", s.str());
  }
  write_file(dir / "metadata.json", run_metadata(b.config, "sweep").dump(2) + "\n");
  for (const RunResult& r : b.runs) {
    if (!r.ok()) continue;
    std::ostringstream s;
    write_training_log_csv(s, r.log);
    write_file(dir / "logs" / (run_label(r.key) + ".csv"), s.str());
  }
  if (!b.config.report.plots) return;

  fs::create_directories(dir / "plots");
  // Reward traces: trial 0 of every (priority, N) cell, one line per scheme.
  std::map<std::pair<int, int>, std::vector<Series>> traces;
  for (const RunResult& r : b.runs) {
    if (!r.ok() || r.key.trial != 0) continue;
    Series s{std::string(to_string(r.key.scheme)), {}, {}};
    for (const auto& e : r.log.episodes) {
      s.x.push_back(e.episode);
      s.y.push_back(e.mean_reward);
    }
    traces[{r.key.priority, r.key.n_pairs}].push_back(std::move(s));
  }
  for (const auto& [pn, series] : traces) {
    const std::string tag = "p" + std::to_string(pn.first) + "_n" + std::to_string(pn.second);
    write_file(dir / "plots" / ("reward_" + tag + ".svg"),
               line_chart_svg("Episode mean reward, " + tag, "episode", "mean reward", series));
  }
  // Throughput against N per scheme and priority.
  std::map<int, std::map<Scheme, Series>> curves;
  for (const auto& [key, c] : b.cells) {
    const auto& [s, p, n] = key;
    if (c.trials_ok == 0) continue;
    Series& ser = curves[p][s];
    ser.name = std::string(to_string(s));
    ser.x.push_back(n);
    ser.y.push_back(c.mean.agg_throughput);
  }
  for (const auto& [p, by_scheme] : curves) {
    std::vector<Series> series;
    for (const auto& [s, ser] : by_scheme)
      if (ser.x.size() > 1) series.push_back(ser);
    if (series.empty()) continue;
    write_file(dir / "plots" / ("throughput_p" + std::to_string(p) + ".svg"),
               line_chart_svg("Aggregate throughput, priority " + std::to_string(p), "user pairs N",
                              "Mb/s", series));
  }
}

}  // namespace coex
