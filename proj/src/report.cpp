#include "pomp/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "detail.hpp"

namespace pomp {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  std::string str() const { return n ? fixed(sum / static_cast<double>(n)) : "n/a"; }
};

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

// Line chart of one series per language over instance index, y in [0, 1].
std::string svg_chart(const std::string& title, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& series) {
  const double w = 640, h = 360, left = 50, right = 120, top = 30, bottom = 40;
  const double pw = w - left - right, ph = h - top - bottom;
  std::size_t n = 0;
  for (const auto& s : series) n = std::max(n, s.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double y = top + ph * (1.0 - tick / 4.0);
    os << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
       << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << fixed(tick / 4.0, 2)
       << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10
     << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">instance (0.." << (n ? n - 1 : 0)
     << ")</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].size(); ++i) {
      const double x = left + (n > 1 ? pw * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
      const double y = top + ph * (1.0 - std::clamp(series[s][i], 0.0, 1.0));
      os << fixed(x, 1) << "," << fixed(y, 1) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << left + pw + 10 << "\" y=\"" << top + 14 * (s + 1) << "\" font-family=\"sans-serif\" "
       << "font-size=\"11\" fill=\"" << color << "\">" << names[s] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

Report render_report(const TraceLog& log, const ReportOptions& options) {
  Report report;
  std::ostringstream os;
  if (log.instances.empty()) {
    report.empty = true;
    os << "warning: trace log contains no instances; nothing to report\n";
    report.text = os.str();
    return report;
  }

  std::vector<std::string> codes;
  std::vector<std::string> names;
  if (log.header) {
    for (const auto& a : log.header->auxiliaries) {
      codes.push_back(a.code);
      names.push_back(a.display_name.empty() ? a.code : a.display_name);
    }
  } else {
    for (const auto& [code, p] : log.instances.front().probabilities_before) {
      codes.push_back(code);
      names.push_back(code);
    }
  }

  // Trajectory row 0 is the state before the first instance.
  std::vector<std::vector<double>> traj(codes.size());
  std::vector<std::size_t> updates(codes.size(), 0);
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const auto& first = log.instances.front().probabilities_before;
    const auto it = first.find(codes[c]);
    traj[c].push_back(it != first.end() ? it->second : 0.0);
  }
  Mean initial_score, refined_score, aggregate_score;
  std::size_t paths_total = 0, paths_updated = 0, refined_wins = 0;
  std::vector<double> mean_aggregate;
  for (const auto& inst : log.instances) {
    for (std::size_t c = 0; c < codes.size(); ++c) {
      const auto it = inst.probabilities_after.find(codes[c]);
      traj[c].push_back(it != inst.probabilities_after.end() ? it->second : traj[c].back());
    }
    if (inst.initial_score) initial_score.add(*inst.initial_score);
    if (inst.refined_score) refined_score.add(*inst.refined_score);
    if (!inst.refined_label.empty() && inst.refined_label != "initial") ++refined_wins;
    Mean inst_agg;
    for (const auto& p : inst.paths) {
      ++paths_total;
      if (p.updated) {
        ++paths_updated;
        for (const auto& v : p.vertices) {
          const auto pos = std::find(codes.begin(), codes.end(), v);
          if (pos != codes.end()) ++updates[static_cast<std::size_t>(pos - codes.begin())];
        }
      }
      if (p.aggregate_score) {
        aggregate_score.add(*p.aggregate_score);
        inst_agg.add(*p.aggregate_score);
      }
    }
    mean_aggregate.push_back(inst_agg.n ? inst_agg.sum / static_cast<double>(inst_agg.n) : 0.0);
  }

  const std::size_t n = log.instances.size();
  os << "instances: " << n << " (index " << log.instances.front().index << ".." << log.instances.back().index
     << ")\n";
  if (log.header) os << "languages: " << log.header->source.code << " -> " << log.header->target.code << "\n";
  os << "\n";
  os << "language   initial    final      min        max        updates\n";
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const auto [mn, mx] = std::minmax_element(traj[c].begin(), traj[c].end());
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %-10s %-10s %-10s %-10s %zu\n", codes[c].c_str(),
                  fixed(traj[c].front()).c_str(), fixed(traj[c].back()).c_str(), fixed(*mn).c_str(),
                  fixed(*mx).c_str(), updates[c]);
    os << line;
  }

  os << "\nprobability trajectory\n";
  os << "instance  ";
  for (const auto& c : codes) {
    char cell[32];
    std::snprintf(cell, sizeof(cell), "%-9s", c.c_str());
    os << cell;
  }
  os << "\n";
  std::set<std::size_t> rows;
  const std::size_t want = std::max<std::size_t>(2, options.trajectory_rows);
  for (std::size_t r = 0; r < want; ++r) rows.insert(r * n / (want - 1));
  for (std::size_t row : rows) {
    char cell[32];
    std::snprintf(cell, sizeof(cell), "%-10s", row == 0 ? "start" : std::to_string(row).c_str());
    os << cell;
    for (std::size_t c = 0; c < codes.size(); ++c) {
      std::snprintf(cell, sizeof(cell), "%-9s", fixed(traj[c][row]).c_str());
      os << cell;
    }
    os << "\n";
  }

  os << "\nscores\n";
  os << "mean initial score:    " << initial_score.str() << "\n";
  os << "mean refined score:    " << refined_score.str() << "\n";
  os << "mean aggregate score:  " << aggregate_score.str() << "\n";
  os << "refined != initial:    " << refined_wins << "/" << n << "\n";
  os << "paths updated:         " << paths_updated << "/" << paths_total << "\n";

  if (options.plot_dir) {
    std::filesystem::create_directories(*options.plot_dir);
    std::ostringstream csv;
    csv << "instance";
    for (const auto& c : codes) csv << "," << c;
    csv << ",mean_aggregate\n";
    for (std::size_t i = 0; i <= n; ++i) {
      csv << i;
      for (std::size_t c = 0; c < codes.size(); ++c) csv << "," << detail::format_decimal(traj[c][i]);
      csv << "," << (i == 0 ? "" : detail::format_decimal(mean_aggregate[i - 1])) << "\n";
    }
    const auto csv_path = *options.plot_dir / "trajectories.csv";
    detail::write_file_atomic(csv_path, csv.str());
    const auto prob_svg = *options.plot_dir / "probabilities.svg";
    detail::write_file_atomic(prob_svg, svg_chart("auxiliary probabilities", names, traj));
    const auto score_svg = *options.plot_dir / "aggregate_scores.svg";
    detail::write_file_atomic(score_svg, svg_chart("mean aggregate score", {"E"}, {mean_aggregate}));
    report.files = {csv_path, prob_svg, score_svg};
    for (const auto& f : report.files) os << "wrote " << f.filename().string() << "\n";
  }
  report.text = os.str();
  return report;
}

}  // namespace pomp
