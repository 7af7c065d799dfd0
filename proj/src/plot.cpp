#include "kzp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "kzp/error.hpp"

namespace kzp::svg {

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  void pad() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string LineChart::render() const {
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  const auto ty = [this](double y) { return log_y ? std::log10(y) : y; };
  const auto usable = [this](double y) {
    return std::isfinite(y) && (!log_y || y > 0.0);
  };

  Range xr, yr;
  for (const auto& line : lines) {
    for (std::size_t i = 0; i < std::min(line.x.size(), line.y.size()); ++i) {
      if (!std::isfinite(line.x[i]) || !usable(line.y[i])) continue;
      xr.add(line.x[i]);
      yr.add(ty(line.y[i]));
    }
  }
  xr.pad();
  yr.pad();
  const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  const auto py = [&](double y) { return top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * plot_h; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title) << "</text>\n";
  s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
    << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    s << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(top + plot_h) << "\" x2=\""
      << num(px(fx)) << "\" y2=\"" << num(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(top + plot_h + 20)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick_label(fx) << "</text>\n";
    s << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(fy)) << "\" x2=\""
      << num(left) << "\" y2=\"" << num(py(fy)) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(fy) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick_label(log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  s << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(height - 12.0)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
    << escape(x_label) << "</text>\n";
  s << "<text x=\"16\" y=\"" << num(top + plot_h / 2)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
    << "transform=\"rotate(-90 16 " << num(top + plot_h / 2) << ")\">"
    << escape(y_label + (log_y ? " (log scale)" : "")) << "</text>\n";

  double legend_y = top + 14;
  for (const auto& line : lines) {
    const std::size_t count = std::min(line.x.size(), line.y.size());
    if (line.markers) {
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::isfinite(line.x[i]) || !usable(line.y[i])) continue;
        const double base = log_y ? yr.lo : std::clamp(0.0, yr.lo, yr.hi);
        s << "<line x1=\"" << num(px(line.x[i])) << "\" y1=\"" << num(py(base))
          << "\" x2=\"" << num(px(line.x[i])) << "\" y2=\"" << num(py(ty(line.y[i])))
          << "\" stroke=\"" << line.color << "\"/>\n";
      }
    } else {
      // Gaps (masked or unusable points) split the path.
      s << "<path fill=\"none\" stroke=\"" << line.color << "\" stroke-width=\"1.2\" d=\"";
      bool pen_down = false;
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::isfinite(line.x[i]) || !usable(line.y[i])) {
          pen_down = false;
          continue;
        }
        s << (pen_down ? 'L' : 'M') << num(px(line.x[i])) << ',' << num(py(ty(line.y[i])))
          << ' ';
        pen_down = true;
      }
      s << "\"/>\n";
    }
    if (!line.label.empty()) {
      s << "<line x1=\"" << num(left + plot_w - 150) << "\" y1=\"" << num(legend_y - 4)
        << "\" x2=\"" << num(left + plot_w - 130) << "\" y2=\"" << num(legend_y - 4)
        << "\" stroke=\"" << line.color << "\" stroke-width=\"2\"/>\n";
      s << "<text x=\"" << num(left + plot_w - 124) << "\" y=\"" << num(legend_y)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(line.label)
        << "</text>\n";
      legend_y += 16;
    }
  }
  s << "</svg>\n";
  return s.str();
}

void LineChart::save(const std::filesystem::path& path) const {
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  file << render();
}

}  // namespace kzp::svg
