#include "propsim/path_loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "propsim/error.hpp"

namespace propsim {

double lambert_w(double y) {
  if (std::isnan(y) || y < 0.0) throw DomainError("lambert_w: argument must be non-negative");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return y;

  // Halley iteration on w e^w - y from log(1 + y), which brackets the root
  // from above for y > 0 and keeps the iterate non-negative.
  double w = std::log1p(y);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    const double fp = ew * (w + 1.0);
    const double step = f / (fp - 0.5 * (w + 2.0) * f / (w + 1.0));
    double next = w - step;
    if (next < 0.0) next = 0.5 * w;
    const bool done = std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * next;
    w = next;
    if (done) break;
  }
  return w;
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

PathLoss PathLoss::power_law(double K, double beta) {
  require_positive(K, "power-law K");
  require_positive(beta, "power-law beta");
  return PathLoss(PowerLaw{K, beta});
}

PathLoss PathLoss::exp_power(double alpha, double beta) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("exp-power alpha must be non-negative and finite");
  }
  require_positive(beta, "exp-power beta");
  return PathLoss(ExpPower{alpha, beta});
}

PathLoss PathLoss::multi_slope(std::vector<double> breakpoints, std::vector<double> exponents,
                               double b1) {
  require_positive(b1, "multi-slope b1");
  if (exponents.size() != breakpoints.size() + 1) {
    throw ParameterError("multi-slope needs exactly one more exponent than breakpoints");
  }
  for (double beta : exponents) require_positive(beta, "multi-slope exponent");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    require_positive(breakpoints[i], "multi-slope breakpoint");
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw ParameterError("multi-slope breakpoints must be strictly increasing");
    }
  }

  MultiSlope m;
  m.breakpoints = std::move(breakpoints);
  m.exponents = std::move(exponents);
  m.coefficients.push_back(b1);
  for (std::size_t i = 0; i < m.breakpoints.size(); ++i) {
    // Continuity at r_i: r_i^beta_i / b_i = r_i^beta_{i+1} / b_{i+1}.
    const double r = m.breakpoints[i];
    m.coefficients.push_back(m.coefficients[i] * std::pow(r, m.exponents[i + 1] - m.exponents[i]));
  }
  for (std::size_t i = 0; i < m.breakpoints.size(); ++i) {
    m.thresholds.push_back(std::pow(m.breakpoints[i], m.exponents[i]) / m.coefficients[i]);
  }
  for (std::size_t i = 0; i < m.exponents.size(); ++i) {
    m.inverse_scale.push_back(std::pow(m.coefficients[i], 1.0 / m.exponents[i]));
  }
  return PathLoss(std::move(m));
}

PathLoss PathLoss::tabulated(std::vector<double> knots, std::vector<double> values) {
  if (values.size() != knots.size() + 1) {
    throw ParameterError("tabulated path loss needs one more value than knots");
  }
  require_positive(values.front(), "tabulated gain");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_positive(knots[i], "tabulated knot");
    if (i > 0 && !(knots[i] > knots[i - 1])) {
      throw ParameterError("tabulated knots must be strictly increasing");
    }
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] >= values[i - 1]) || !std::isfinite(values[i])) {
      throw ParameterError("tabulated gains must be finite and nondecreasing");
    }
  }
  return PathLoss(Tabulated{std::move(knots), std::move(values)});
}

PathLoss::Kind PathLoss::kind() const noexcept {
  return static_cast<Kind>(model_.index());
}

std::string PathLoss::kind_name() const {
  switch (kind()) {
    case Kind::power_law:
      return "power_law";
    case Kind::exp_power:
      return "exp_power";
    case Kind::multi_slope:
      return "multi_slope";
    case Kind::tabulated:
      return "tabulated";
  }
  return "unknown";
}

double PathLoss::evaluate(double r) const {
  if (!(r > 0.0)) throw DomainError("path loss is defined for r > 0 only");
  return std::visit(
      overloaded{
          [r](const PowerLaw& m) { return std::pow(m.K * r, m.beta); },
          [r](const ExpPower& m) { return std::pow(r, m.beta) * std::exp(m.alpha * r); },
          [r](const MultiSlope& m) {
            const auto i = static_cast<std::size_t>(
                std::upper_bound(m.breakpoints.begin(), m.breakpoints.end(), r) -
                m.breakpoints.begin());
            return std::pow(r, m.exponents[i]) / m.coefficients[i];
          },
          [r](const Tabulated& m) {
            const auto j = static_cast<std::size_t>(
                std::lower_bound(m.knots.begin(), m.knots.end(), r) - m.knots.begin());
            return m.values[j];
          },
      },
      model_);
}

double PathLoss::inverse(double y) const {
  if (std::isnan(y) || y < 0.0) throw DomainError("path loss inverse needs y >= 0");
  return std::visit(
      overloaded{
          [y](const PowerLaw& m) { return std::pow(y, 1.0 / m.beta) / m.K; },
          [y](const ExpPower& m) {
            const double root = std::pow(y, 1.0 / m.beta);
            if (m.alpha == 0.0) return root;
            const double ratio = m.alpha / m.beta;
            return lambert_w(ratio * root) / ratio;
          },
          [y](const MultiSlope& m) {
            const auto i = static_cast<std::size_t>(
                std::upper_bound(m.thresholds.begin(), m.thresholds.end(), y) -
                m.thresholds.begin());
            return m.inverse_scale[i] * std::pow(y, 1.0 / m.exponents[i]);
          },
          [y](const Tabulated& m) {
            // First step whose value exceeds y; h > y exactly to the right of
            // the knot that opens it.
            const auto j = static_cast<std::size_t>(
                std::upper_bound(m.values.begin(), m.values.end(), y) - m.values.begin());
            if (j == 0) return 0.0;
            if (j == m.values.size()) return std::numeric_limits<double>::infinity();
            return m.knots[j - 1];
          },
      },
      model_);
}

}  // namespace propsim
