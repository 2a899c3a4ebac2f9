#pragma once

#include <vector>

namespace qnls {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

// Least squares of log y against log x over the pairs with x, y finite and positive.
// Fewer than 3 usable pairs is a ContractError.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qnls
