#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace propsim {

// Principal branch of the Lambert W function on [0, inf): the w >= 0 with
// w * exp(w) = y. Throws DomainError for y < 0.
double lambert_w(double y);

// h(r) = (K r)^beta.
struct PowerLaw {
  double K = 1.0;
  double beta = 1.0;
};

// h(r) = r^beta * exp(alpha r), alpha >= 0.
struct ExpPower {
  double alpha = 0.0;
  double beta = 1.0;
};

// h(r) = r^beta_i / b_i on [r_{i-1}, r_i) with r_0 = 0 and r_{k+1} = inf.
// Only b_1 is free; the remaining coefficients make h continuous.
struct MultiSlope {
  std::vector<double> breakpoints;   // r_1 < ... < r_k
  std::vector<double> exponents;     // beta_1 .. beta_{k+1}
  std::vector<double> coefficients;  // b_1 .. b_{k+1}
  std::vector<double> thresholds;    // s_i = r_i^beta_i / b_i, i = 1..k
  std::vector<double> inverse_scale; // c_i = b_i^(1/beta_i)

  std::size_t segments() const noexcept { return exponents.size(); }
};

// Left-continuous step function: values[0] on (0, knots[0]], values[j] on
// (knots[j-1], knots[j]], values.back() beyond the last knot.
struct Tabulated {
  std::vector<double> knots;
  std::vector<double> values;
};

// Radial path gain h with g(x) = h(|x|): left-continuous, nondecreasing and
// positive on (0, inf).
class PathLoss {
 public:
  enum class Kind { power_law, exp_power, multi_slope, tabulated };

  static PathLoss power_law(double K, double beta);
  static PathLoss exp_power(double alpha, double beta);
  static PathLoss multi_slope(std::vector<double> breakpoints, std::vector<double> exponents,
                              double b1);
  static PathLoss tabulated(std::vector<double> knots, std::vector<double> values);

  Kind kind() const noexcept;
  std::string kind_name() const;

  // h(r); throws DomainError for r <= 0.
  double evaluate(double r) const;
  // inf{x > 0 : h(x) > y}. May be +inf for bounded tabulated gains.
  double inverse(double y) const;
  bool strictly_increasing() const noexcept { return kind() != Kind::tabulated; }

  const PowerLaw* as_power_law() const noexcept { return std::get_if<PowerLaw>(&model_); }
  const ExpPower* as_exp_power() const noexcept { return std::get_if<ExpPower>(&model_); }
  const MultiSlope* as_multi_slope() const noexcept { return std::get_if<MultiSlope>(&model_); }
  const Tabulated* as_tabulated() const noexcept { return std::get_if<Tabulated>(&model_); }

 private:
  using Model = std::variant<PowerLaw, ExpPower, MultiSlope, Tabulated>;
  explicit PathLoss(Model model) : model_(std::move(model)) {}

  Model model_;
};

}  // namespace propsim
