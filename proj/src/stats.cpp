#include "p2psim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace p2psim {

std::vector<CcdfPoint> ccdf(std::span<const double> samples)
{
    if (samples.empty()) throw std::invalid_argument("ccdf: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<CcdfPoint> out;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.push_back(CcdfPoint{sorted[i], static_cast<double>(sorted.size() - j) / n});
        i = j;
    }
    return out;
}

double ccdf_at(std::span<const double> samples, double t)
{
    if (samples.empty()) throw std::invalid_argument("ccdf_at: no samples");
    const auto above = std::count_if(samples.begin(), samples.end(), [t](double x) { return x > t; });
    return static_cast<double>(above) / static_cast<double>(samples.size());
}

double t_critical(double level, int dof)
{
    if (dof < 1) throw std::invalid_argument("t_critical: need at least one degree of freedom");
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.5 + level / 2.0);
}

double mean(std::span<const double> values)
{
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values)
{
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

MeanCi mean_ci(std::span<const double> values, double level)
{
    if (values.size() < 2) throw std::invalid_argument("mean_ci: need at least two replications");
    const double s = sample_stddev(values);
    const double hw = t_critical(level, static_cast<int>(values.size()) - 1) * s / std::sqrt(static_cast<double>(values.size()));
    return MeanCi{mean(values), hw};
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty()) throw std::invalid_argument("percentile: no samples");
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must be in (0, 1]");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

double median(std::vector<double> values)
{
    return percentile(std::move(values), 0.5);
}

}  // namespace p2psim
