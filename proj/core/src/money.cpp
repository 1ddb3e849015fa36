#include "sparcas/money.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace sparcas {

namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) {
        return false;
    }
    for (size_t i = start; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

boost::multiprecision::mpz_int parse_integer(std::string_view s) {
    if (!s.empty() && s[0] == '+') {
        s.remove_prefix(1);
    }
    return boost::multiprecision::mpz_int(std::string(s));
}

}  // namespace

std::string to_exact_string(const Money& amount) {
    auto num = boost::multiprecision::numerator(amount);
    auto den = boost::multiprecision::denominator(amount);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

Money parse_money(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-') {
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        }
        auto d = parse_integer(den);
        if (d == 0) {
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        }
        return Money(parse_integer(num), d);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole = text.substr(0, dot);
        auto frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
            whole.remove_prefix(1);
        }
        if ((whole.empty() && frac.empty()) || (!whole.empty() && !is_integer_literal(whole)) ||
                (!frac.empty() && !is_integer_literal(frac)) || (!frac.empty() && !std::isdigit(static_cast<unsigned char>(frac[0])))) {
            throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
        }
        boost::multiprecision::mpz_int scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) {
            scale *= 10;
        }
        boost::multiprecision::mpz_int digits = parse_integer(std::string(whole.empty() ? "0" : whole) + std::string(frac));
        Money value(digits, scale);
        return negative ? Money(-value) : value;
    }
    if (!is_integer_literal(text)) {
        throw std::invalid_argument("malformed amount '" + std::string(text) + "'");
    }
    return Money(parse_integer(text));
}

double to_double(const Money& amount) {
    return amount.convert_to<double>();
}

std::string to_decimal_string(const Money& amount, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, to_double(amount));
    return buffer;
}

}  // namespace sparcas
