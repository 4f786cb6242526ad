#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pomp/trace.hpp"

namespace pomp {

struct ReportOptions {
  std::optional<std::filesystem::path> plot_dir;  // writes CSV + SVG files when set
  std::size_t trajectory_rows = 10;
};

struct Report {
  std::string text;
  bool empty = false;
  std::vector<std::filesystem::path> files;
};

// Per-language probability trajectories and score summaries.
Report render_report(const TraceLog& log, const ReportOptions& options = {});

}  // namespace pomp
