#include "cstar/map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cstar/errors.hpp"

namespace cstar {

namespace {

void trim_trailing_zeros(std::vector<Complex>& c) {
  while (!c.empty() && c.back() == Complex(0.0, 0.0)) c.pop_back();
}

bool all_finite(const std::vector<Complex>& c) {
  return std::all_of(c.begin(), c.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

CStarMap::CStarMap(int index_n, std::vector<Complex> g_coeffs, std::vector<Complex> h_coeffs,
                   double rotation_angle, std::string label)
    : index_n_(index_n),
      g_(std::move(g_coeffs)),
      h_(std::move(h_coeffs)),
      rotation_angle_(rotation_angle),
      label_(std::move(label)) {
  if (!all_finite(g_) || !all_finite(h_) || !std::isfinite(rotation_angle_)) {
    throw NonFinite("map coefficients must be finite");
  }
  trim_trailing_zeros(g_);
  trim_trailing_zeros(h_);
  if (g_.empty()) throw InvalidParameter("g must be non-constant");
  if (h_.empty()) throw InvalidParameter("h must be non-constant");
  horizon_ = 300.0 / degree();
  if (label_.empty()) label_ = format_map(*this);
}

int CStarMap::degree() const { return std::max(degree_g(), degree_h()); }

CStarMap CStarMap::with_horizon(double log_horizon) const {
  if (!(log_horizon > 0.0) || !std::isfinite(log_horizon)) {
    throw InvalidParameter("horizon must be positive and finite");
  }
  CStarMap copy = *this;
  copy.horizon_ = log_horizon;
  return copy;
}

bool operator==(const CStarMap& a, const CStarMap& b) {
  return a.index_n_ == b.index_n_ && a.g_ == b.g_ && a.h_ == b.h_ &&
         a.rotation_angle_ == b.rotation_angle_ && a.label_ == b.label_;
}

CircleView::CircleView(const CStarMap& map, double L)
    : n_(map.index_n()), L_(L), rotation_angle_(map.rotation_angle()) {
  if (std::isnan(L)) throw NonFinite("log-radius is NaN");
  if (std::abs(L) > map.horizon()) {
    std::ostringstream msg;
    msg << "log-radius " << L << " outside horizon " << map.horizon();
    throw HorizonExceeded(msg.str());
  }
  derivative_bound_ = std::abs(static_cast<double>(n_));
  curvature_bound_ = 0.0;
  a_.reserve(map.g_coeffs().size());
  b_.reserve(map.h_coeffs().size());
  for (std::size_t k = 0; k < map.g_coeffs().size(); ++k) {
    const double j = static_cast<double>(k + 1);
    Complex a = map.g_coeffs()[k] * std::exp(j * L);
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw HorizonExceeded("g term overflows at this radius");
    }
    a_.push_back(a);
    derivative_bound_ += j * std::abs(a);
    curvature_bound_ += j * j * std::abs(a);
  }
  for (std::size_t k = 0; k < map.h_coeffs().size(); ++k) {
    const double j = static_cast<double>(k + 1);
    Complex b = map.h_coeffs()[k] * std::exp(-j * L);
    if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) {
      throw HorizonExceeded("h term overflows at this radius");
    }
    b_.push_back(b);
    derivative_bound_ += j * std::abs(b);
    curvature_bound_ += j * j * std::abs(b);
  }
}

Complex CircleView::log_image(double theta) const {
  double re = n_ * L_;
  double im = n_ * theta + rotation_angle_;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double j = static_cast<double>(k + 1);
    const Complex t = a_[k] * std::polar(1.0, j * theta);
    re += t.real();
    im += t.imag();
  }
  for (std::size_t k = 0; k < b_.size(); ++k) {
    const double j = static_cast<double>(k + 1);
    const Complex t = b_[k] * std::polar(1.0, -j * theta);
    re += t.real();
    im += t.imag();
  }
  if (std::isnan(re) || std::isnan(im)) throw NonFinite("map evaluation produced NaN");
  if (!std::isfinite(re) || !std::isfinite(im)) throw HorizonExceeded("image log-modulus overflows");
  return {re, im};
}

double CircleView::log_modulus(double theta) const { return log_image(theta).real(); }

Complex CircleView::log_derivative_log(double theta) const {
  Complex acc(static_cast<double>(n_), 0.0);
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double j = static_cast<double>(k + 1);
    acc += j * a_[k] * std::polar(1.0, j * theta);
  }
  for (std::size_t k = 0; k < b_.size(); ++k) {
    const double j = static_cast<double>(k + 1);
    acc -= j * b_[k] * std::polar(1.0, -j * theta);
  }
  return acc;
}

LogPoint eval(const CStarMap& map, const LogPoint& z) {
  if (std::isnan(z.theta)) throw NonFinite("angle is NaN");
  const Complex w = CircleView(map, z.L).log_image(z.theta);
  return LogPoint(w.real(), w.imag());
}

Complex log_derivative(const CStarMap& map, const LogPoint& z) {
  const Complex zf = CircleView(map, z.L).log_derivative_log(z.theta);
  const Complex result = zf * std::polar(std::exp(-z.L), -z.theta);
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag())) {
    throw HorizonExceeded("logarithmic derivative overflows");
  }
  return result;
}

CStarMap arnold(double alpha, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(alpha)) {
    throw InvalidParameter("arnold family requires beta > 0");
  }
  CStarMap map(1, {Complex(beta / 2.0, 0.0)}, {Complex(-beta / 2.0, 0.0)}, alpha,
               "arnold(" + shortest(alpha) + ", " + shortest(beta) + ")");
  map.arnold_ = std::make_pair(alpha, beta);
  return map;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class MapParser {
 public:
  explicit MapParser(std::string_view s) : s_(s) {}

  CStarMap parse() {
    skip_ws();
    if (s_.substr(pos_, 6) == "arnold") return parse_arnold();
    return parse_general();
  }

 private:
  [[noreturn]] void fail(const std::string& reason) const { throw ParseError(pos_, reason); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_end() const { return pos_ >= s_.size(); }

  void expect(char c) {
    skip_ws();
    if (at_end() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // Returns +1/-1 when a sign is consumed, 0 otherwise. Accepts U+2212.
  int take_sign() {
    skip_ws();
    if (at_end()) return 0;
    if (s_[pos_] == '+') {
      ++pos_;
      return 1;
    }
    if (s_[pos_] == '-') {
      ++pos_;
      return -1;
    }
    if (s_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      return -1;
    }
    return 0;
  }

  double parse_float() {
    skip_ws();
    const int sign = take_sign();
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr == first) fail("expected a number");
    if (!std::isfinite(v)) fail("number must be finite");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return sign < 0 ? -v : v;
  }

  bool starts_number() const {
    if (at_end()) return false;
    const char c = s_[pos_];
    return (c >= '0' && c <= '9') || c == '.';
  }

  int parse_int() {
    skip_ws();
    const int sign = take_sign();
    int v = 0;
    const char* first = s_.data() + pos_;
    auto res = std::from_chars(first, s_.data() + s_.size(), v);
    if (res.ec != std::errc() || res.ptr == first) fail("expected an integer");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return sign < 0 ? -v : v;
  }

  CStarMap parse_arnold() {
    pos_ += 6;
    expect('(');
    const double alpha = parse_float();
    expect(',');
    const std::size_t beta_pos = pos_;
    const double beta = parse_float();
    expect(')');
    skip_ws();
    if (!at_end()) fail("trailing characters");
    if (!(beta > 0.0)) throw ParseError(beta_pos, "arnold family requires beta > 0");
    return arnold(alpha, beta);
  }

  std::vector<Complex> parse_poly(char var) {
    std::vector<Complex> coeffs;
    bool first_term = true;
    for (;;) {
      skip_ws();
      if (at_end() || s_[pos_] == ';') break;
      int sign = take_sign();
      if (sign == 0) {
        if (!first_term) fail("expected '+' or '-' between terms");
        sign = 1;
      }
      skip_ws();
      Complex coef(1.0, 0.0);
      if (!at_end() && s_[pos_] == '(') {
        ++pos_;
        const double re = parse_float();
        expect(',');
        const double im = parse_float();
        expect(')');
        coef = Complex(re, im);
      } else if (starts_number()) {
        coef = Complex(parse_float(), 0.0);
      }
      skip_ws();
      if (at_end() || s_[pos_] != var) {
        fail(std::string("constant terms are not permitted; expected variable '") + var + "'");
      }
      ++pos_;
      int degree = 1;
      skip_ws();
      if (!at_end() && s_[pos_] == '^') {
        ++pos_;
        degree = parse_int();
        if (degree < 1) fail("degree must be at least 1");
        if (degree > 64) fail("degree above 64 is not supported");
      }
      if (coeffs.size() < static_cast<std::size_t>(degree)) coeffs.resize(degree);
      coeffs[degree - 1] += static_cast<double>(sign) * coef;
      first_term = false;
    }
    if (first_term) fail(std::string("empty polynomial for '") + var + "'");
    return coeffs;
  }

  std::string parse_key() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  CStarMap parse_general() {
    std::optional<int> n;
    std::optional<std::vector<Complex>> g, h;
    std::optional<double> rot;
    std::size_t g_pos = 0, h_pos = 0;
    for (;;) {
      const std::size_t key_pos = pos_;
      const std::string key = parse_key();
      expect('=');
      if (key == "n") {
        if (n) throw ParseError(key_pos, "duplicate key n");
        n = parse_int();
      } else if (key == "g") {
        if (g) throw ParseError(key_pos, "duplicate key g");
        g_pos = pos_;
        g = parse_poly('z');
      } else if (key == "h") {
        if (h) throw ParseError(key_pos, "duplicate key h");
        h_pos = pos_;
        h = parse_poly('w');
      } else if (key == "rot") {
        if (rot) throw ParseError(key_pos, "duplicate key rot");
        rot = parse_float();
      } else {
        throw ParseError(key_pos, "unknown key '" + key + "'");
      }
      skip_ws();
      if (at_end()) break;
      expect(';');
    }
    if (!n) fail("missing n");
    if (!g) fail("missing g");
    if (!h) fail("missing h");
    auto nonzero = [](const std::vector<Complex>& c) {
      return std::any_of(c.begin(), c.end(), [](const Complex& v) { return v != Complex(0.0, 0.0); });
    };
    if (!nonzero(*g)) throw ParseError(g_pos, "g must be non-constant");
    if (!nonzero(*h)) throw ParseError(h_pos, "h must be non-constant");
    return CStarMap(*n, std::move(*g), std::move(*h), rot.value_or(0.0));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string format_poly(const std::vector<Complex>& c, char var) {
  std::string out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == Complex(0.0, 0.0)) continue;
    std::string term;
    if (c[k].imag() == 0.0) {
      const double v = c[k].real();
      if (out.empty()) {
        term = shortest(v);
      } else {
        term = (std::signbit(v) ? "-" : "+") + shortest(std::abs(v));
      }
    } else {
      term = std::string(out.empty() ? "" : "+") + "(" + shortest(c[k].real()) + "," +
             shortest(c[k].imag()) + ")";
    }
    term += var;
    if (k > 0) term += "^" + std::to_string(k + 1);
    out += term;
  }
  return out;
}

}  // namespace

CStarMap parse_map(std::string_view spec) { return MapParser(spec).parse(); }

std::string format_map(const CStarMap& map) {
  if (map.arnold_params()) {
    return "arnold(" + shortest(map.arnold_params()->first) + ", " +
           shortest(map.arnold_params()->second) + ")";
  }
  std::string out = "n=" + std::to_string(map.index_n()) + "; g=" + format_poly(map.g_coeffs(), 'z') +
                    "; h=" + format_poly(map.h_coeffs(), 'w');
  if (map.rotation_angle() != 0.0) out += "; rot=" + shortest(map.rotation_angle());
  return out;
}

}  // namespace cstar
