#include "alchemy/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <gmp.h>

namespace alchemy {

namespace {

double log_of_integer(const BigInt& n) {
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, n.backend().data());
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

}  // namespace

double log_of(const Rational& x) {
  if (x <= 0) throw std::domain_error("log of a non-positive rational");
  return log_of_integer(BigInt(numerator(x))) - log_of_integer(BigInt(denominator(x)));
}

Rational rationalize(double x, std::int64_t max_denominator) {
  if (!std::isfinite(x)) throw std::domain_error("cannot rationalize a non-finite value");
  // Convergents h/k of the continued fraction of x.
  BigInt h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
  BigInt k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  while (frac > 1e-300) {
    double inv = 1.0 / frac;
    double a = std::floor(inv);
    if (a > 1e15) break;
    BigInt ai = static_cast<std::int64_t>(a);
    BigInt k_next = ai * k + k_prev;
    if (k_next > max_denominator) break;
    BigInt h_next = ai * h + h_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    frac = inv - a;
  }
  return Rational(h, k);
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  }

  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long long exponent = 0;
  bool seen_point = false, seen_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      long long e = 0;
      auto rest = std::string_view(s).substr(pos + 1);
      if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), e);
      if (ec != std::errc() || ptr != rest.data() + rest.size())
        throw std::invalid_argument("malformed exponent in '" + s + "'");
      exponent += e;
      pos = s.size();
      break;
    } else {
      throw std::invalid_argument("malformed number '" + s + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed number '" + s + "'");
  BigInt mantissa(digits);
  BigInt ten_power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::llabs(exponent)));
  Rational value = exponent >= 0 ? Rational(mantissa * ten_power) : Rational(mantissa, ten_power);
  return negative ? Rational(-value) : value;
}

std::string format_exact(const Rational& x) {
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  BigInt rest = den;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return num.str() + "/" + den.str();

  unsigned places = std::max(twos, fives);
  // x = num * 10^places / den is an integer.
  BigInt scaled = num * boost::multiprecision::pow(BigInt(10), places) / den;
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (places > 0) {
    if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
  }
  return negative ? "-" + digits : digits;
}

std::string format_double(double x) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
  if (ec != std::errc()) return std::to_string(x);
  return std::string(buffer, ptr);
}

}  // namespace alchemy
