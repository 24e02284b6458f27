#include "eqshares/num.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace eqs {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

Int pow10(long exponent) {
  Int result = 1;
  for (long i = 0; i < exponent; ++i) result *= 10;
  return result;
}

std::optional<Num> parse_decimal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) return std::nullopt;
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (!whole.empty() && !all_digits(whole)) return std::nullopt;
    if (!frac.empty() && !all_digits(frac)) return std::nullopt;
    digits = std::string(whole) + std::string(frac);
    fraction_digits = static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) return std::nullopt;
    digits = std::string(s);
  }
  if (digits.empty()) return std::nullopt;
  // a leading zero would make the string constructor read octal
  auto first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);
  Num value{Int(digits)};
  const long scale = exponent - fraction_digits;
  if (scale > 0) value *= Num(pow10(scale));
  if (scale < 0) value /= Num(pow10(-scale));
  return negative ? Num(-value) : value;
}

}  // namespace

std::optional<Num> try_parse_num(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_decimal(text.substr(0, slash));
    auto den = parse_decimal(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return Num(*num / *den);
  }
  return parse_decimal(text);
}

Num parse_num(std::string_view text) {
  if (auto value = try_parse_num(text)) return *value;
  throw std::invalid_argument("not a number: '" + std::string(text) + "'");
}

std::string to_string(const Num& value) {
  if (is_integer(value)) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

std::optional<std::string> to_decimal(const Num& value) {
  Int den = denominator(value);
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::nullopt;
  const int places = std::max(twos, fives);
  if (places == 0) return numerator(value).str();
  Int scaled = numerator(value * Num(pow10(places)));
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= places) {
    digits.insert(0, static_cast<std::size_t>(places) - digits.size() + 1, '0');
  }
  digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  return negative ? "-" + digits : digits;
}

double to_double(const Num& value) { return value.convert_to<double>(); }

Num from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
  return Num(value);
}

Int ceil(const Num& value) {
  Int q = numerator(value) / denominator(value);  // truncates toward zero
  if (Num(q) < value) q += 1;
  return q;
}

}  // namespace eqs
