#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cstar/log_point.hpp"

namespace cstar {

using Complex = std::complex<double>;

// f(z) = rot * z^n * exp(g(z) + h(1/z)) with polynomial g, h without
// constant terms. g_coeffs()[j-1] is the coefficient of z^j.
class CStarMap {
 public:
  CStarMap(int index_n, std::vector<Complex> g_coeffs, std::vector<Complex> h_coeffs,
           double rotation_angle = 0.0, std::string label = {});

  int index_n() const { return index_n_; }
  const std::vector<Complex>& g_coeffs() const { return g_; }
  const std::vector<Complex>& h_coeffs() const { return h_; }
  double rotation_angle() const { return rotation_angle_; }
  Complex rot() const { return std::polar(1.0, rotation_angle_); }
  const std::string& label() const { return label_; }

  int degree_g() const { return static_cast<int>(g_.size()); }
  int degree_h() const { return static_cast<int>(h_.size()); }
  int degree() const;

  // Largest |log r| at which the map is evaluated. Defaults to 300/degree so
  // that every term of g(z) and h(1/z) stays inside double range.
  double horizon() const { return horizon_; }
  CStarMap with_horizon(double log_horizon) const;

  // Set when the map was built by arnold(); used to format it back.
  const std::optional<std::pair<double, double>>& arnold_params() const { return arnold_; }

  friend bool operator==(const CStarMap& a, const CStarMap& b);

 private:
  friend CStarMap arnold(double alpha, double beta);

  int index_n_;
  std::vector<Complex> g_;
  std::vector<Complex> h_;
  double rotation_angle_;
  std::string label_;
  double horizon_;
  std::optional<std::pair<double, double>> arnold_;
};

// Evaluates the map on one circle |z| = e^L. All per-circle powers are
// computed once; eval() and the modulus search share this path so that their
// results agree bit for bit.
class CircleView {
 public:
  CircleView(const CStarMap& map, double L);

  double L() const { return L_; }

  // log|f(e^{L + i theta})|.
  double log_modulus(double theta) const;

  // log f as L' + i*Phi where Phi is the continuous (unwrapped) argument.
  Complex log_image(double theta) const;

  // z f'(z)/f(z), the derivative of log f with respect to log z.
  Complex log_derivative_log(double theta) const;

  // Upper bound for |z f'/f| on the whole circle.
  double derivative_bound() const { return derivative_bound_; }

  // Upper bound for |d^2/dtheta^2 log|f|| on the circle.
  double curvature_bound() const { return curvature_bound_; }

 private:
  int n_;
  double L_;
  double rotation_angle_;
  std::vector<Complex> a_;  // c_j e^{jL}
  std::vector<Complex> b_;  // d_j e^{-jL}
  double derivative_bound_;
  double curvature_bound_;
};

LogPoint eval(const CStarMap& map, const LogPoint& z);

// f'(z)/f(z) = n/z + g'(z) - h'(1/z)/z^2.
Complex log_derivative(const CStarMap& map, const LogPoint& z);

// z e^{i alpha} e^{beta (z - 1/z)/2}.
CStarMap arnold(double alpha, double beta);

// Map grammar:
//   arnold(<float>, <float>)
//   n=<int>; g=<poly>; h=<poly>[; rot=<float>]
// <poly> is a sum of terms <coef><var>[^k], var z for g and w for h, where
// <coef> is a float or a complex pair "(re,im)". Constant terms are rejected.
CStarMap parse_map(std::string_view spec);
std::string format_map(const CStarMap& map);

}  // namespace cstar
