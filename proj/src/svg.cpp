#include "tsasim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsasim/runio.hpp"

namespace tsasim {

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, const std::string& name) {
  series_.push_back({Series::Kind::Line, x, y, {}, color, name, 1.0, 2.0});
}

void SvgPlot::add_band(const std::vector<double>& x, const std::vector<double>& lo,
                       const std::vector<double>& hi, const std::string& color, double opacity) {
  series_.push_back({Series::Kind::Band, x, lo, hi, color, "", opacity, 2.0});
}

void SvgPlot::add_points(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& color, double radius) {
  series_.push_back({Series::Kind::Points, x, y, {}, color, "", 1.0, radius});
}

std::string SvgPlot::render(int width, int height) const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
    for (double v : s.y2) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ml = 64, mr = 18, mt = 34, mb = 48;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return mt + (1.0 - (v - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"14\">" << title_ << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    out << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << csv_number(fx) << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << csv_number(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label_
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
      << mt + ph / 2 << ")\">" << y_label_ << "</text>\n";

  for (const auto& s : series_) {
    if (s.kind == Series::Kind::Band) {
      out << "<polygon fill=\"" << s.color << "\" fill-opacity=\"" << s.opacity
          << "\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      for (std::size_t i = s.x.size(); i-- > 0;) out << px(s.x[i]) << ',' << py(s.y2[i]) << ' ';
      out << "\"/>\n";
    } else if (s.kind == Series::Kind::Line) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"" << s.radius
            << "\" fill=\"" << s.color << "\"/>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

void SvgPlot::save(const std::string& path, int width, int height) const {
  write_file_atomic(path, render(width, height));
}

}  // namespace tsasim
