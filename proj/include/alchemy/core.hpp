#ifndef ALCHEMY_CORE_HPP
#define ALCHEMY_CORE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace alchemy {

using Symbol = int;
using Word = std::vector<Symbol>;

/// Exact rational scalar. Expression templates are disabled so that the type
/// behaves like a plain value inside Eigen expressions.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using IndexMatrix = Eigen::MatrixXi;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation needs a topologically mixing (primitive) shift.
class NotPrimitive : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Exact arithmetic was requested but some quantity is not rational.
class InexactArithmetic : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Scalar traits

template <typename Scalar>
inline constexpr bool is_exact_v = std::is_same_v<Scalar, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Natural log of a positive rational without overflowing through double.
double log_of(const Rational& x);
inline double log_of(double x) { return std::log(x); }

/// Best rational approximation by continued fractions with denominator bounded.
Rational rationalize(double x, std::int64_t max_denominator);

/// Parses "3/10", "-2", "0.125", "1e-3" into an exact rational. Decimal
/// literals are read exactly as written, not through binary floating point.
Rational parse_rational(std::string_view text);

/// Terminating decimal expansion when the reduced denominator is 2^a 5^b,
/// otherwise "numerator/denominator".
std::string format_exact(const Rational& x);

/// Shortest round-trip formatting of a double.
std::string format_double(double x);

inline std::string format_scalar(double x) { return format_double(x); }
inline std::string format_scalar(const Rational& x) { return format_exact(x); }

}  // namespace alchemy

#endif  // ALCHEMY_CORE_HPP
