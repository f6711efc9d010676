#pragma once

#include <stdexcept>
#include <vector>

namespace chronon {

/// Strictly positive interaction-frequency profile nu(x) on [0, horizon].
/// Either constant or tabulated with linear interpolation between knots.
/// Positivity is enforced with a floor of 1e-6 so that 1/nu weights stay
/// bounded downstream.
class IntensityProfile {
public:
    enum class Kind { constant, tabulated };

    static IntensityProfile constant(double value);
    static IntensityProfile tabulated(std::vector<double> xs, std::vector<double> values);

    Kind kind() const { return kind_; }
    double value(double x) const;
    /// Integral of nu over [0, x]; exact for the piecewise-linear table.
    double integral_to(double x) const;
    double nu_min() const { return nu_min_; }
    double nu_max() const { return nu_max_; }
    /// End of the tabulated domain; infinity for constant profiles.
    double domain_end() const;

    const std::vector<double>& knots() const { return xs_; }
    const std::vector<double>& knot_values() const { return vals_; }

private:
    IntensityProfile() = default;

    Kind kind_ = Kind::constant;
    double const_value_ = 0.0;
    std::vector<double> xs_, vals_, cum_;
    double nu_min_ = 0.0, nu_max_ = 0.0;
};

}  // namespace chronon
