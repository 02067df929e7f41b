#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace rwre {

struct SeqStat {
    double mean = 0, stderr_ = 0;
};

// Weighted mean with the w_i^2-propagated standard error.
inline SeqStat weighted_stat(const std::vector<double>& value,
                             const std::vector<double>& weight) {
    double wsum = 0, m = 0;
    for (std::size_t i = 0; i < value.size(); ++i) {
        wsum += weight[i];
        m += weight[i] * value[i];
    }
    m /= wsum;
    if (value.size() < 2) return {m, 0.0};
    double v = 0;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const double d = value[i] - m;
        v += weight[i] * weight[i] * d * d;
    }
    return {m, std::sqrt(v) / wsum};
}

struct LinFit {
    double slope = 0, intercept = 0, r2 = 1;
};

// Ordinary least squares y = slope*x + intercept with unit weights.
inline LinFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

} // namespace rwre
