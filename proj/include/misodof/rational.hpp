// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_RATIONAL_HPP
#define MISODOF_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Core>

#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace misodof {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational, always normalized: gcd(num, den) = 1 and
/// den > 0. Hosts every exact DoF value, constraint coefficient and ledger
/// ratio in the project; floats appear only at the presentation boundary.
class ExactRatio {
 public:
  ExactRatio() : num_(0), den_(1) {}
  ExactRatio(long long v) : num_(v), den_(1) {}  // NOLINT: implicit by design
  ExactRatio(BigInt v) : num_(std::move(v)), den_(1) {}
  ExactRatio(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ == 0) throw std::invalid_argument("ExactRatio: zero denominator");
    normalize();
  }

  /// Parses "a", "a/b" or a decimal string like "-0.25" exactly.
  static ExactRatio parse(const std::string& text);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

  double to_double() const {
    return num_.convert_to<double>() / den_.convert_to<double>();
  }

  /// "num/den" when den != 1, plain "num" otherwise.
  std::string str() const {
    std::string s = num_.str();
    if (den_ != 1) s += "/" + den_.str();
    return s;
  }

  friend ExactRatio operator+(const ExactRatio& a, const ExactRatio& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend ExactRatio operator-(const ExactRatio& a, const ExactRatio& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend ExactRatio operator*(const ExactRatio& a, const ExactRatio& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend ExactRatio operator/(const ExactRatio& a, const ExactRatio& b) {
    if (b.num_ == 0) throw std::domain_error("ExactRatio: division by zero");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  ExactRatio operator-() const {
    ExactRatio r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  ExactRatio& operator+=(const ExactRatio& o) { return *this = *this + o; }
  ExactRatio& operator-=(const ExactRatio& o) { return *this = *this - o; }
  ExactRatio& operator*=(const ExactRatio& o) { return *this = *this * o; }
  ExactRatio& operator/=(const ExactRatio& o) { return *this = *this / o; }

  friend bool operator==(const ExactRatio& a, const ExactRatio& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const ExactRatio& a, const ExactRatio& b) { return !(a == b); }
  friend bool operator<(const ExactRatio& a, const ExactRatio& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator>(const ExactRatio& a, const ExactRatio& b) { return b < a; }
  friend bool operator<=(const ExactRatio& a, const ExactRatio& b) { return !(b < a); }
  friend bool operator>=(const ExactRatio& a, const ExactRatio& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const ExactRatio& r) {
    return os << r.str();
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  BigInt num_;
  BigInt den_;
};

inline ExactRatio abs(const ExactRatio& r) { return r.sign() < 0 ? -r : r; }

namespace detail {
// Base-10 only; BigInt's own string constructor would read a leading zero as
// an octal prefix.
inline BigInt parse_decimal_digits(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  if (i == text.size()) throw std::invalid_argument("ExactRatio: no digits in '" + text + "'");
  BigInt value = 0;
  for (; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9')
      throw std::invalid_argument("ExactRatio: cannot parse '" + text + "'");
    value = value * 10 + (text[i] - '0');
  }
  return negative ? BigInt(-value) : value;
}
}  // namespace detail

inline ExactRatio ExactRatio::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("ExactRatio: empty string");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return {detail::parse_decimal_digits(text.substr(0, slash)),
            detail::parse_decimal_digits(text.substr(slash + 1))};
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return {detail::parse_decimal_digits(text)};
  const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  BigInt den = 1;
  for (std::size_t i = 0; i < text.size() - dot - 1; ++i) den *= 10;
  return {detail::parse_decimal_digits(digits), den};
}

using RationalVector = Eigen::Matrix<ExactRatio, Eigen::Dynamic, 1>;
using RationalMatrix = Eigen::Matrix<ExactRatio, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace misodof

namespace Eigen {

template <>
struct NumTraits<misodof::ExactRatio> : GenericNumTraits<misodof::ExactRatio> {
  using Real = misodof::ExactRatio;
  using NonInteger = misodof::ExactRatio;
  using Nested = misodof::ExactRatio;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 60,
    MulCost = 60
  };
};

}  // namespace Eigen

#endif  // MISODOF_RATIONAL_HPP
