#include "gazescore/linear.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "gazescore/errors.hpp"

namespace gazescore::linear {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& x) {
  if (x.empty()) throw NumericError("empty design matrix");
  const auto rows = static_cast<Eigen::Index>(x.size());
  const auto cols = static_cast<Eigen::Index>(x[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(x[static_cast<std::size_t>(i)].size()) != cols) {
      throw NumericError("ragged design matrix");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& y) {
  return Eigen::Map<const Eigen::VectorXd>(y.data(),
                                           static_cast<Eigen::Index>(y.size()));
}

LinearFit pack(const Eigen::VectorXd& coef, double intercept) {
  LinearFit f;
  f.coef.assign(coef.data(), coef.data() + coef.size());
  f.intercept = intercept;
  return f;
}

}  // namespace

double LinearFit::predict(const std::vector<double>& x) const {
  double v = intercept;
  for (std::size_t j = 0; j < coef.size(); ++j) v += coef[j] * x[j];
  return v;
}

LinearFit fit_least_squares(const std::vector<std::vector<double>>& x,
                            const std::vector<double>& y) {
  Eigen::MatrixXd m = to_matrix(x);
  if (m.rows() != static_cast<Eigen::Index>(y.size())) {
    throw NumericError("design/target size mismatch");
  }
  const Eigen::Index n = m.rows(), d = m.cols();
  if (n < d + 1) {
    throw NumericError("underdetermined least-squares problem (" +
                       std::to_string(n) + " rows for " + std::to_string(d + 1) +
                       " parameters)");
  }
  Eigen::MatrixXd a(n, d + 1);
  a.col(0).setOnes();
  a.rightCols(d) = m;
  Eigen::VectorXd yv = to_vector(y);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() == d + 1) {
    Eigen::VectorXd sol = qr.solve(yv);
    return pack(sol.tail(d), sol(0));
  }
  // singular design: normal equations with a tiny ridge jitter
  Eigen::MatrixXd gram = a.transpose() * a;
  gram.diagonal().array() += 1e-8;
  Eigen::VectorXd sol = gram.ldlt().solve(a.transpose() * yv);
  return pack(sol.tail(d), sol(0));
}

LinearFit fit_ridge(const std::vector<std::vector<double>>& x,
                    const std::vector<double>& y, double lambda) {
  if (lambda < 0) throw NumericError("lambda must be >= 0");
  Eigen::MatrixXd m = to_matrix(x);
  if (m.rows() != static_cast<Eigen::Index>(y.size())) {
    throw NumericError("design/target size mismatch");
  }
  const Eigen::Index n = m.rows(), d = m.cols();
  Eigen::VectorXd yv = to_vector(y);

  const Eigen::RowVectorXd xmean = m.colwise().mean();
  const double ymean = yv.mean();
  Eigen::MatrixXd xc = m.rowwise() - xmean;
  Eigen::VectorXd yc = yv.array() - ymean;

  Eigen::VectorXd theta;
  if (lambda == 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    if (qr.rank() < d) {
      throw NumericError(
          "centered design is rank-deficient at lambda=0; use lambda > 0");
    }
    theta = qr.solve(yc);
  } else if (d <= n) {
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;
    theta = gram.ldlt().solve(xc.transpose() * yc);
  } else {
    // dual form: theta = Xc' (Xc Xc' + lambda I)^-1 yc
    Eigen::MatrixXd k = xc * xc.transpose();
    k.diagonal().array() += lambda;
    theta = xc.transpose() * k.ldlt().solve(yc);
  }
  const double intercept = ymean - xmean.dot(theta);
  return pack(theta, intercept);
}

LinearFit fit_logistic(const std::vector<std::vector<double>>& x,
                       const std::vector<char>& y) {
  Eigen::MatrixXd m = to_matrix(x);
  const Eigen::Index n = m.rows(), d = m.cols();
  if (n != static_cast<Eigen::Index>(y.size())) {
    throw NumericError("design/target size mismatch");
  }
  long positives = 0;
  for (char v : y) positives += v ? 1 : 0;
  if (positives == 0 || positives == static_cast<long>(y.size())) {
    throw NumericError("degenerate skip pattern: only one class present");
  }

  Eigen::MatrixXd a(n, d + 1);
  a.col(0).setOnes();
  a.rightCols(d) = m;
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)] ? 1.0 : 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd eta = a * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = eta(i);
      const double pi = e >= 0 ? 1.0 / (1.0 + std::exp(-e))
                               : std::exp(e) / (1.0 + std::exp(e));
      p(i) = pi;
      w(i) = pi * (1.0 - pi);
    }
    Eigen::MatrixXd h = a.transpose() * w.asDiagonal() * a;
    h.diagonal().array() += 1e-6;
    Eigen::VectorXd g = a.transpose() * (yv - p);
    Eigen::VectorXd delta = h.ldlt().solve(g);
    beta += delta;
    if (delta.cwiseAbs().maxCoeff() < 1e-8) break;
  }
  if (!beta.allFinite()) {
    throw NumericError("logistic fit diverged");
  }
  return pack(beta.tail(d), beta(0));
}

}  // namespace gazescore::linear
