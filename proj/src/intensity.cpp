#include "chronon/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chronon {

namespace {
constexpr double kNuFloor = 1e-6;
}

IntensityProfile IntensityProfile::constant(double value) {
    if (!(value >= kNuFloor) || !std::isfinite(value))
        throw std::invalid_argument("IntensityProfile: constant value must be >= 1e-6 and finite");
    IntensityProfile p;
    p.kind_ = Kind::constant;
    p.const_value_ = value;
    p.nu_min_ = p.nu_max_ = value;
    return p;
}

IntensityProfile IntensityProfile::tabulated(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() != values.size() || xs.size() < 2)
        throw std::invalid_argument("IntensityProfile: need >= 2 matching knots");
    if (xs.front() != 0.0)
        throw std::invalid_argument("IntensityProfile: table must start at x = 0");
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("IntensityProfile: knots must be strictly increasing");
    for (double v : values)
        if (!(v >= kNuFloor) || !std::isfinite(v))
            throw std::invalid_argument("IntensityProfile: values must be >= 1e-6 and finite");

    IntensityProfile p;
    p.kind_ = Kind::tabulated;
    p.xs_ = std::move(xs);
    p.vals_ = std::move(values);
    p.nu_min_ = *std::min_element(p.vals_.begin(), p.vals_.end());
    p.nu_max_ = *std::max_element(p.vals_.begin(), p.vals_.end());
    // cumulative trapezoid over the knots, exact for linear interpolation
    p.cum_.assign(p.xs_.size(), 0.0);
    for (size_t i = 1; i < p.xs_.size(); ++i)
        p.cum_[i] = p.cum_[i - 1] +
                    0.5 * (p.vals_[i] + p.vals_[i - 1]) * (p.xs_[i] - p.xs_[i - 1]);
    return p;
}

double IntensityProfile::value(double x) const {
    if (kind_ == Kind::constant) {
        if (x < 0.0) throw std::out_of_range("IntensityProfile: x < 0");
        return const_value_;
    }
    if (x < 0.0 || x > xs_.back() * (1.0 + 1e-12) + 1e-15)
        throw std::out_of_range("IntensityProfile: x outside tabulated domain");
    x = std::min(x, xs_.back());
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const size_t hi = std::min<size_t>(xs_.size() - 1, static_cast<size_t>(it - xs_.begin()));
    const size_t lo = hi == 0 ? 0 : hi - 1;
    if (hi == lo) return vals_[lo];
    const double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return vals_[lo] + w * (vals_[hi] - vals_[lo]);
}

double IntensityProfile::integral_to(double x) const {
    if (x < 0.0) throw std::out_of_range("IntensityProfile: x < 0");
    if (kind_ == Kind::constant) return const_value_ * x;
    if (x > xs_.back() * (1.0 + 1e-12) + 1e-15)
        throw std::out_of_range("IntensityProfile: x outside tabulated domain");
    x = std::min(x, xs_.back());
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const size_t hi = std::min<size_t>(xs_.size() - 1, static_cast<size_t>(it - xs_.begin()));
    const size_t lo = hi == 0 ? 0 : hi - 1;
    if (hi == lo) return cum_[lo];
    const double vx = value(x);
    return cum_[lo] + 0.5 * (vals_[lo] + vx) * (x - xs_[lo]);
}

double IntensityProfile::domain_end() const {
    return kind_ == Kind::constant ? std::numeric_limits<double>::infinity() : xs_.back();
}

}  // namespace chronon
