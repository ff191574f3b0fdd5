#pragma once

#include <string>
#include <vector>

namespace tsasim {

/// Minimal standalone SVG line/band plots; no display dependency.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& color, const std::string& name = "");
  /// Shaded band between a lower and an upper trace.
  void add_band(const std::vector<double>& x, const std::vector<double>& lo,
                const std::vector<double>& hi, const std::string& color, double opacity = 0.25);
  void add_points(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, double radius = 2.0);

  std::string render(int width = 720, int height = 480) const;
  void save(const std::string& path, int width = 720, int height = 480) const;

 private:
  struct Series {
    enum class Kind { Line, Band, Points } kind;
    std::vector<double> x, y, y2;
    std::string color;
    std::string name;
    double opacity = 1.0;
    double radius = 2.0;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
};

}  // namespace tsasim
