#include "rankone/rational.hpp"

#include <cstdio>
#include <stdexcept>

namespace rankone {

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole) {
  std::string s(text);
  if (s.empty() || s == "+" || s == "-")
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  if (s[0] == '+') s.erase(0, 1);
  return BigInt(s, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  BigInt num = parse_integer(text.substr(0, slash), text);
  std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  return make_rational(num, parse_integer(den_text, text));
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigInt floor_of(const Rational& q) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

BigInt ceil_of(const Rational& q) {
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

long long to_int64(const Rational& q) {
  if (q.get_den() != 1 || !q.get_num().fits_slong_p())
    throw std::out_of_range("rational " + to_string(q) + " is not a machine integer");
  return q.get_num().get_si();
}

std::string approx_decimal(const Rational& q, int significant) {
  if (significant < 1) throw std::invalid_argument("significant digits must be positive");
  if (q == 0) return "0." + std::string(static_cast<std::size_t>(significant - 1), '0') + "e+00";

  const bool negative = q < 0;
  Rational a = abs(q);

  // Find exponent e with 10^e <= a < 10^(e+1).
  long e = static_cast<long>(a.get_num().get_str().size()) -
           static_cast<long>(a.get_den().get_str().size());
  auto pow10 = [](long k) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k < 0 ? -k : k));
    return k < 0 ? Rational(BigInt(1), p) : Rational(p);
  };
  while (a >= pow10(e + 1)) ++e;
  while (a < pow10(e)) --e;

  // scaled in [10^(s-1), 10^s)
  Rational scaled = a * pow10(significant - 1 - e);
  BigInt digits = floor_of(scaled);
  Rational frac = scaled - Rational(digits);
  if (frac > Rational(1, 2) || (frac == Rational(1, 2) && mpz_odd_p(digits.get_mpz_t()))) {
    digits += 1;
  }
  std::string ds = digits.get_str();
  if (static_cast<int>(ds.size()) > significant) {  // rounded up to 10^s
    ds.pop_back();
    ++e;
  }

  std::string out = negative ? "-" : "";
  out += ds.substr(0, 1);
  if (significant > 1) out += "." + ds.substr(1);
  char exp_buf[16];
  std::snprintf(exp_buf, sizeof(exp_buf), "e%+03ld", e);
  out += exp_buf;
  return out;
}

}  // namespace rankone
