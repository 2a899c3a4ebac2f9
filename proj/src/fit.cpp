#include "qnls/fit.hpp"

#include <cmath>
#include <string>

#include "qnls/error.hpp"

namespace qnls {

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size(), "fit_loglog: x and y differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i]) && x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    const auto m = static_cast<int>(lx.size());
    if (m < 3) throw ContractError("degenerate fit: " + std::to_string(m) + " usable points, need at least 3");
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < m; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw ContractError("degenerate fit: all x values coincide");
    LinearFit f;
    f.points = m;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

}  // namespace qnls
