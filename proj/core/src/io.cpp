#include "bearing_forms/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bearing_forms {

std::string format_value(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string axis_suffix(int axis) {
  static const char* named = "xyzw";
  if (axis < 4) return std::string(1, named[axis]);
  return "c" + std::to_string(axis + 1);
}

namespace {

void write_header(std::ostream& out, int n, int d, bool velocities) {
  out << "t";
  for (int i = 1; i <= n; ++i) {
    for (int c = 0; c < d; ++c) out << ",p" << i << axis_suffix(c);
  }
  if (velocities) {
    for (int i = 1; i <= n; ++i) {
      for (int c = 0; c < d; ++c) out << ",v" << i << axis_suffix(c);
    }
  }
  out << ",err_p,err_delta,err_v,min_sep\n";
}

void write_vector(std::ostream& out, const Eigen::VectorXd& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) out << "," << format_value(values(i));
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace, int n, int d, int stride) {
  const bool velocities = !trace.velocities.empty();
  write_header(out, n, d, velocities);
  for (size_t row = 0; row < trace.time.size(); row += static_cast<size_t>(stride)) {
    out << format_value(trace.time[row]);
    write_vector(out, trace.positions[row]);
    if (velocities) write_vector(out, trace.velocities[row]);
    out << "," << format_value(trace.err_position[row]) << ","
        << format_value(trace.err_orthogonal[row]) << ","
        << format_value(trace.err_velocity[row]) << ","
        << format_value(trace.min_separation[row]) << "\n";
  }
}

void write_observer_csv(std::ostream& out, const ObserverTrace& trace, int n, int d, int stride) {
  write_header(out, n, d, false);
  for (size_t row = 0; row < trace.time.size(); row += static_cast<size_t>(stride)) {
    out << format_value(trace.time[row]);
    write_vector(out, trace.estimates[row]);
    out << "," << format_value(trace.err_estimate[row]) << ","
        << format_value(trace.err_orthogonal[row]) << ","
        << format_value(trace.centroid_drift[row]) << ","
        << format_value(trace.min_separation[row]) << "\n";
  }
}

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMargin = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Mapper {
  double x_min, x_max, y_min, y_max;

  double x(double value) const {
    return kMargin + (value - x_min) / (x_max - x_min) * (kWidth - 2 * kMargin);
  }
  double y(double value) const {
    return kHeight - kMargin - (value - y_min) / (y_max - y_min) * (kHeight - 2 * kMargin);
  }
};

void svg_open(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "style=\"font:16px sans-serif\">" << title << "</text>\n";
}

void svg_axes(std::ostringstream& svg) {
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
}

}  // namespace

std::string render_error_svg(const std::vector<double>& time,
                             const std::vector<std::pair<std::string, std::vector<double>>>& series,
                             const std::string& title) {
  std::ostringstream svg;
  svg_open(svg, title);
  svg_axes(svg);
  if (time.size() >= 2 && !series.empty()) {
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    auto log_clamped = [](double v) { return std::log10(std::max(v, 1e-12)); };
    for (const auto& [label, values] : series) {
      for (const double v : values) {
        y_min = std::min(y_min, log_clamped(v));
        y_max = std::max(y_max, log_clamped(v));
      }
    }
    if (y_max - y_min < 1e-9) y_max = y_min + 1.0;
    const Mapper map{time.front(), time.back(), y_min, y_max};

    for (size_t s = 0; s < series.size(); ++s) {
      const auto& [label, values] = series[s];
      const char* color = kPalette[s % std::size(kPalette)];
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      const size_t stride = std::max<size_t>(1, values.size() / 2000);
      for (size_t i = 0; i < values.size(); i += stride) {
        svg << format_value(map.x(time[i])) << "," << format_value(map.y(log_clamped(values[i])))
            << " ";
      }
      svg << "\"/>\n";
      svg << "<text x=\"" << kWidth - kMargin - 8 << "\" y=\"" << kMargin + 18 * (s + 1)
          << "\" text-anchor=\"end\" style=\"font:12px sans-serif\" fill=\"" << color << "\">"
          << label << "</text>\n";
    }
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" style=\"font:12px sans-serif\">t [s] (value axis: log10)"
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_trajectory_svg(const std::vector<Eigen::VectorXd>& positions, int n, int d,
                                  const std::vector<Edge>& edges, const std::string& title) {
  std::ostringstream svg;
  svg_open(svg, title);
  if (positions.size() >= 2) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& stacked : positions) {
      for (int i = 0; i < n; ++i) {
        x_min = std::min(x_min, stacked(i * d));
        x_max = std::max(x_max, stacked(i * d));
        y_min = std::min(y_min, stacked(i * d + 1));
        y_max = std::max(y_max, stacked(i * d + 1));
      }
    }
    const double pad = 0.05 * std::max(x_max - x_min, y_max - y_min) + 1e-9;
    const Mapper map{x_min - pad, x_max + pad, y_min - pad, y_max + pad};

    const size_t stride = std::max<size_t>(1, positions.size() / 2000);
    for (int i = 0; i < n; ++i) {
      const char* color = kPalette[i % std::size(kPalette)];
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1\" opacity=\"0.7\" points=\"";
      for (size_t row = 0; row < positions.size(); row += stride) {
        svg << format_value(map.x(positions[row](i * d))) << ","
            << format_value(map.y(positions[row](i * d + 1))) << " ";
      }
      svg << "\"/>\n";
    }

    // Formation edges and agent markers at the first and last snapshot.
    for (const bool final_snapshot : {false, true}) {
      const auto& stacked = final_snapshot ? positions.back() : positions.front();
      for (const Edge& e : edges) {
        svg << "<line x1=\"" << format_value(map.x(stacked((e.tail - 1) * d))) << "\" y1=\""
            << format_value(map.y(stacked((e.tail - 1) * d + 1))) << "\" x2=\""
            << format_value(map.x(stacked((e.head - 1) * d))) << "\" y2=\""
            << format_value(map.y(stacked((e.head - 1) * d + 1)))
            << "\" stroke=\"#333\" stroke-width=\"1\""
            << (final_snapshot ? "" : " stroke-dasharray=\"4 3\" opacity=\"0.5\"") << "/>\n";
      }
      for (int i = 0; i < n; ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        svg << "<circle cx=\"" << format_value(map.x(stacked(i * d))) << "\" cy=\""
            << format_value(map.y(stacked(i * d + 1))) << "\" r=\"4\" stroke=\"" << color
            << "\" fill=\"" << (final_snapshot ? color : "white") << "\"/>\n";
      }
    }
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" style=\"font:12px sans-serif\">projection onto the first "
           "two axes; open markers t=start, filled t=end</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bearing_forms
