#pragma once

#include "conlearn/types.hpp"

#include <string>
#include <vector>

namespace conlearn {

/// Minimal static line-chart emitter. Charts are rendered from already-written
/// CSV files so plots never compute statistics of their own.
struct PlotSeries {
  std::string name;
  std::vector<Scalar> x;
  std::vector<Scalar> y;
};

struct PlotOptions {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
};

void write_line_chart(const std::string& path,
                      const std::vector<PlotSeries>& series,
                      const PlotOptions& options);

/// Parses a CSV written by write_csv/trace_to_csv: header row then numeric
/// rows; returns (header, columns).
std::pair<std::vector<std::string>, std::vector<std::vector<Scalar>>>
read_numeric_csv(const std::string& path);

/// Chart of selected columns (by name) against an x column, straight off a CSV.
void plot_csv_columns(const std::string& csv_path, const std::string& out_path,
                      const std::string& x_column,
                      const std::vector<std::string>& y_columns,
                      const PlotOptions& options);

}  // namespace conlearn
