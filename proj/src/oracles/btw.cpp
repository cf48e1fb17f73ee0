#include "carousel/oracles/btw.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "carousel/errors.hpp"

namespace carousel::oracles {

LinearFit least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                        const std::vector<double>& sigma) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m == 0 || rows.size() != y.size()) throw ConfigError("least_squares: shape mismatch");
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  if (m < p) throw ConfigError("least_squares: fewer rows than coefficients");
  if (!sigma.empty() && sigma.size() != y.size()) throw ConfigError("least_squares: sigma size");
  Eigen::MatrixXd X(m, p);
  Eigen::VectorXd Y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != p) throw ConfigError("least_squares: ragged rows");
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rows[i][j];
    Y(i) = y[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  LinearFit out;
  out.condition_number = sv(p - 1) > 0.0 ? sv(0) / sv(p - 1) : INFINITY;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::VectorXd b = qr.solve(Y);
  out.coef.assign(b.data(), b.data() + p);
  out.stderr_.assign(p, 0.0);
  if (!sigma.empty()) {
    // pinv(X) maps data errors to coefficient errors.
    const Eigen::MatrixXd pinv = qr.solve(Eigen::MatrixXd::Identity(m, m));
    for (Eigen::Index j = 0; j < p; ++j) {
      double v = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) v += pinv(j, i) * pinv(j, i) * sigma[i] * sigma[i];
      out.stderr_[j] = std::sqrt(v);
    }
  }
  return out;
}

namespace {

BtwFit fit(const std::vector<double>& lambdas, const std::vector<double>& y,
           const std::vector<double>& sigma) {
  if (lambdas.size() < 3 || lambdas.size() != y.size()) {
    throw ConfigError("btw fit needs at least three lambdas with one value each");
  }
  std::vector<std::vector<double>> rows;
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("btw fit: lambdas must be positive");
    rows.push_back({l, std::log(l), 1.0});
  }
  BtwFit f;
  const auto lf = least_squares(rows, y, sigma);
  f.condition_number = lf.condition_number;
  if (!(lf.condition_number < kBtwMaxCondition)) {
    f.declined = true;
    return f;
  }
  f.slope = lf.coef[0];
  f.log_coefficient = lf.coef[1];
  f.intercept = lf.coef[2];
  f.slope_stderr = lf.stderr_[0];
  f.log_coefficient_stderr = lf.stderr_[1];
  return f;
}

}  // namespace

BtwFit btw_fit_values(const std::vector<double>& lambdas, const std::vector<double>& y) {
  return fit(lambdas, y, {});
}

BtwFit btw_slope_check(const std::vector<double>& lambdas, const std::vector<GapEstimate>& e0,
                       const std::vector<GapEstimate>& e1) {
  if (e0.size() != lambdas.size() || e1.size() != lambdas.size()) {
    throw ConfigError("btw_slope_check: one E(0) and one E(1) estimate per lambda");
  }
  std::vector<double> y;
  std::vector<double> sigma;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double r0 = e0[i].stderr_ / e0[i].value;
    const double r1 = e1[i].stderr_ / e1[i].value;
    if (!(e0[i].value > 0.0 && e1[i].value > 0.0) || !(r0 < 0.2) || !(r1 < 0.2)) {
      throw ConfigError("btw_slope_check: every estimate needs relative stderr < 20%");
    }
    y.push_back(std::log(e1[i].value) - std::log(e0[i].value));
    sigma.push_back(std::hypot(r0, r1));
  }
  return fit(lambdas, y, sigma);
}

}  // namespace carousel::oracles
