#include "conlearn/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace conlearn {
namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

Scalar tx(Scalar v, bool log_scale) {
  return log_scale ? std::log10(v) : v;
}

}  // namespace

void write_line_chart(const std::string& path,
                      const std::vector<PlotSeries>& series,
                      const PlotOptions& options) {
  Scalar xmin = std::numeric_limits<Scalar>::infinity(), xmax = -xmin;
  Scalar ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (options.log_x && s.x[i] <= 0) continue;
      if (options.log_y && s.y[i] <= 0) continue;
      xmin = std::min(xmin, tx(s.x[i], options.log_x));
      xmax = std::max(xmax, tx(s.x[i], options.log_x));
      ymin = std::min(ymin, tx(s.y[i], options.log_y));
      ymax = std::max(ymax, tx(s.y[i], options.log_y));
    }
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const Scalar xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](Scalar v) {
    return kMarginL + (tx(v, options.log_x) - xmin) / (xmax - xmin) *
                          (kWidth - kMarginL - kMarginR);
  };
  auto py = [&](Scalar v) {
    return kHeight - kMarginB - (tx(v, options.log_y) - ymin) / (ymax - ymin) *
                                    (kHeight - kMarginT - kMarginB);
  };

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write plot file: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='20' text-anchor='middle' "
      << "font-family='sans-serif' font-size='14'>" << options.title
      << "</text>\n";

  // axes
  out << "<line x1='" << kMarginL << "' y1='" << kHeight - kMarginB << "' x2='"
      << kWidth - kMarginR << "' y2='" << kHeight - kMarginB
      << "' stroke='black'/>\n";
  out << "<line x1='" << kMarginL << "' y1='" << kMarginT << "' x2='" << kMarginL
      << "' y2='" << kHeight - kMarginB << "' stroke='black'/>\n";

  // ticks (4 per axis)
  out.precision(4);
  for (int i = 0; i <= 4; ++i) {
    const Scalar fx = xmin + (xmax - xmin) * i / 4.0;
    const Scalar vx = options.log_x ? std::pow(10.0, fx) : fx;
    const Scalar X = kMarginL + (fx - xmin) / (xmax - xmin) *
                                    (kWidth - kMarginL - kMarginR);
    out << "<line x1='" << X << "' y1='" << kHeight - kMarginB << "' x2='" << X
        << "' y2='" << kHeight - kMarginB + 5 << "' stroke='black'/>\n";
    out << "<text x='" << X << "' y='" << kHeight - kMarginB + 18
        << "' text-anchor='middle' font-family='sans-serif' font-size='10'>"
        << vx << "</text>\n";
    const Scalar fy = ymin + (ymax - ymin) * i / 4.0;
    const Scalar vy = options.log_y ? std::pow(10.0, fy) : fy;
    const Scalar Y = kHeight - kMarginB - (fy - ymin) / (ymax - ymin) *
                                              (kHeight - kMarginT - kMarginB);
    out << "<line x1='" << kMarginL - 5 << "' y1='" << Y << "' x2='" << kMarginL
        << "' y2='" << Y << "' stroke='black'/>\n";
    out << "<text x='" << kMarginL - 8 << "' y='" << Y + 3
        << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << vy
        << "</text>\n";
  }
  out << "<text x='" << (kMarginL + kWidth - kMarginR) / 2 << "' y='"
      << kHeight - 10
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
      << options.xlabel << "</text>\n";
  out << "<text x='15' y='" << (kMarginT + kHeight - kMarginB) / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
      << "transform='rotate(-90 15 " << (kMarginT + kHeight - kMarginB) / 2
      << ")'>" << options.ylabel << "</text>\n";

  int ci = 0;
  int legend_y = kMarginT + 6;
  out.precision(8);
  for (const auto& s : series) {
    const char* color = kColors[ci % 8];
    std::ostringstream pts;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (options.log_x && s.x[i] <= 0) continue;
      if (options.log_y && s.y[i] <= 0) continue;
      pts << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    out << "<polyline fill='none' stroke='" << color
        << "' stroke-width='1.5' points='" << pts.str() << "'/>\n";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (options.log_x && s.x[i] <= 0) continue;
      if (options.log_y && s.y[i] <= 0) continue;
      out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
          << "' r='2.5' fill='" << color << "'/>\n";
    }
    out << "<rect x='" << kWidth - kMarginR - 130 << "' y='" << legend_y - 8
        << "' width='10' height='10' fill='" << color << "'/>\n";
    out << "<text x='" << kWidth - kMarginR - 115 << "' y='" << legend_y + 1
        << "' font-family='sans-serif' font-size='11'>" << s.name << "</text>\n";
    legend_y += 16;
    ++ci;
  }
  out << "</svg>\n";
}

std::pair<std::vector<std::string>, std::vector<std::vector<Scalar>>>
read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV file: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  std::vector<std::vector<Scalar>> cols(header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    size_t c = 0;
    while (std::getline(ss, field, ',') && c < cols.size())
      cols[c++].push_back(std::strtod(field.c_str(), nullptr));
  }
  return {header, cols};
}

void plot_csv_columns(const std::string& csv_path, const std::string& out_path,
                      const std::string& x_column,
                      const std::vector<std::string>& y_columns,
                      const PlotOptions& options) {
  const auto [header, cols] = read_numeric_csv(csv_path);
  auto find = [&](const std::string& name) -> Index {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<Index>(i);
    throw ConfigError("column '" + name + "' not found in " + csv_path);
  };
  const auto& xs = cols[static_cast<size_t>(find(x_column))];
  std::vector<PlotSeries> series;
  for (const auto& yc : y_columns) {
    PlotSeries s;
    s.name = yc;
    s.x = xs;
    s.y = cols[static_cast<size_t>(find(yc))];
    series.push_back(std::move(s));
  }
  write_line_chart(out_path, series, options);
}

}  // namespace conlearn
