#pragma once

#include <vector>

namespace confront {

/// Monotone (Fritsch-Carlson) cubic Hermite interpolant on a sorted table.
/// Never overshoots the data, which keeps sign patterns of tabulated
/// reaction terms intact. Evaluation outside the table clamps to the ends.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double value(double x) const;
    double derivative(double x) const;
    /// Integral from x.front() to x, exact on each cubic piece.
    double integral(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    int interval(double x) const;

    std::vector<double> x_, y_, slope_;
    std::vector<double> cumint_;  // integral up to each knot
};

}  // namespace confront
