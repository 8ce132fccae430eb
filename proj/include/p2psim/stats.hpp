#pragma once

#include <span>
#include <utility>
#include <vector>

namespace p2psim {

struct CcdfPoint {
    double t;
    //! P(X > t)
    double p;
};

//! Empirical CCDF evaluated at each distinct sample value, ascending. Throws on empty input.
std::vector<CcdfPoint> ccdf(std::span<const double> samples);

//! Fraction of samples strictly greater than t.
double ccdf_at(std::span<const double> samples, double t);

struct MeanCi {
    double mean;
    double half_width;
};

//! Sample mean with a Student-t half-width on n-1 degrees of freedom. Needs n >= 2.
MeanCi mean_ci(std::span<const double> values, double level = 0.95);

//! Two-sided critical value t_{(1+level)/2, dof}.
double t_critical(double level, int dof);

double mean(std::span<const double> values);
//! Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);
//! Nearest-rank percentile, q in (0, 1]. Throws on empty input.
double percentile(std::vector<double> values, double q);
double median(std::vector<double> values);

}  // namespace p2psim
