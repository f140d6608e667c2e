#pragma once

#include <vector>

namespace gazescore::linear {

struct LinearFit {
  std::vector<double> coef;
  double intercept = 0;

  double predict(const std::vector<double>& x) const;
};

/// Ordinary least squares with an intercept, solved by column-pivoted QR on
/// the augmented design. If the design is numerically singular the normal
/// equations are retried with a 1e-8 ridge jitter.
/// Throws NumericError("underdetermined ...") when rows < cols + 1.
LinearFit fit_least_squares(const std::vector<std::vector<double>>& x,
                            const std::vector<double>& y);

/// Ridge with an unpenalized intercept, handled by centering features and
/// targets. Solves the primal (d x d) normal equations, or the dual (n x n)
/// system when d > n. lambda == 0 requires full column rank.
LinearFit fit_ridge(const std::vector<std::vector<double>>& x,
                    const std::vector<double>& y, double lambda);

/// Logistic regression by iteratively reweighted least squares. Converges
/// when the max parameter delta drops below 1e-8, capped at 100 iterations;
/// the Hessian carries a 1e-6 L2 jitter so separable data stays finite.
/// Throws NumericError("degenerate ...") when only one class is present.
LinearFit fit_logistic(const std::vector<std::vector<double>>& x,
                       const std::vector<char>& y);

}  // namespace gazescore::linear
