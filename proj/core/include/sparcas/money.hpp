#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace sparcas {

// Exact rational amount. Values, payments and redistribution credits all use
// it so budget balance can be checked with ==.
using Money = boost::multiprecision::mpq_rational;

// "p/q", or "p" when the denominator is 1.
std::string to_exact_string(const Money& amount);

// Accepts "p", "p/q" and plain decimals such as "0.065". Throws
// std::invalid_argument on anything else.
Money parse_money(std::string_view text);

double to_double(const Money& amount);

std::string to_decimal_string(const Money& amount, int digits = 6);

}  // namespace sparcas
