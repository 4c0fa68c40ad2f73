#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace confront {

/// Minimal SVG canvas for derived plots (classification strips, front
/// slices). Plots are artifacts only, never inputs.
class SvgCanvas {
public:
    SvgCanvas(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.0);
    void text(double x, double y, const std::string& s, int size = 12);

    void save(const std::filesystem::path& path) const;

private:
    double width_, height_;
    std::ostringstream body_;
};

}  // namespace confront
