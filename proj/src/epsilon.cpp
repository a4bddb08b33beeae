#include "lexdiv/epsilon.hpp"

#include <cmath>
#include <numeric>

#include "lexdiv/core.hpp"

namespace lexdiv {

namespace {

__extension__ typedef __int128 i128;

bool only_twos_and_fives(std::int64_t d, int& digits) {
    int twos = 0;
    int fives = 0;
    while (d % 2 == 0) d /= 2, ++twos;
    while (d % 5 == 0) d /= 5, ++fives;
    digits = std::max(twos, fives);
    return d == 1;
}

}  // namespace

Epsilon Epsilon::from_ratio(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw InputError("epsilon denominator is zero");
    if (denominator < 0) numerator = -numerator, denominator = -denominator;
    const std::int64_t g = std::gcd(numerator < 0 ? -numerator : numerator, denominator);
    Epsilon e;
    e.num_ = g == 0 ? 0 : numerator / g;
    e.den_ = g == 0 ? 1 : denominator / g;
    return e;
}

Epsilon Epsilon::parse(std::string_view text) {
    const std::string original(text);
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw InputError("empty epsilon value");
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_point = false;
    bool seen_digit = false;
    for (char ch : text) {
        if (ch == '.' && !seen_point) {
            seen_point = true;
            continue;
        }
        if (ch < '0' || ch > '9') throw InputError("invalid epsilon value '" + original + "'");
        seen_digit = true;
        if (num > (std::int64_t{1} << 58) / 10 || (seen_point && den > (std::int64_t{1} << 58) / 10))
            throw InputError("epsilon value '" + original + "' has too many digits");
        num = num * 10 + (ch - '0');
        if (seen_point) den *= 10;
    }
    if (!seen_digit) throw InputError("invalid epsilon value '" + original + "'");
    return from_ratio(negative ? -num : num, den);
}

Epsilon Epsilon::from_double(double value) {
    if (!std::isfinite(value)) throw InputError("epsilon must be finite");
    return from_ratio(static_cast<std::int64_t>(std::llround(value * 1e9)), 1'000'000'000);
}

bool Epsilon::far(std::size_t distance, std::size_t n_cases) const {
    return static_cast<i128>(distance) * den_ >= static_cast<i128>(num_) * static_cast<i128>(n_cases);
}

std::size_t Epsilon::far_threshold(std::size_t n_cases) const {
    if (num_ <= 0) return 0;
    const i128 scaled = static_cast<i128>(num_) * static_cast<i128>(n_cases);
    return static_cast<std::size_t>((scaled + den_ - 1) / den_);
}

std::string Epsilon::to_string() const {
    int digits = 0;
    if (!only_twos_and_fives(den_, digits) || digits > 18) {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const i128 scaled = static_cast<i128>(num_) * (scale / den_);
    const bool negative = scaled < 0;
    const i128 mag = negative ? -scaled : scaled;
    std::string whole = std::to_string(static_cast<std::int64_t>(mag / scale));
    std::string out = negative ? "-" + whole : whole;
    if (digits > 0) {
        std::string frac = std::to_string(static_cast<std::int64_t>(mag % scale));
        frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
        out += "." + frac;
    }
    return out;
}

std::strong_ordering operator<=>(const Epsilon& a, const Epsilon& b) {
    return static_cast<i128>(a.num_) * b.den_ <=> static_cast<i128>(b.num_) * a.den_;
}

Epsilon Epsilon::operator+(const Epsilon& other) const {
    const std::int64_t l = std::lcm(den_, other.den_);
    return from_ratio(num_ * (l / den_) + other.num_ * (l / other.den_), l);
}

std::vector<Epsilon> epsilon_grid(Epsilon lo, Epsilon hi, Epsilon step) {
    if (step <= Epsilon{}) throw InputError("epsilon grid step must be positive");
    if (hi < lo) throw InputError("epsilon grid upper end is below its lower end");
    std::vector<Epsilon> grid;
    for (Epsilon e = lo; e <= hi; e = e + step) grid.push_back(e);
    return grid;
}

std::vector<Epsilon> parse_epsilon_grid(std::string_view spec) {
    const auto first = spec.find(':');
    const auto second = first == std::string_view::npos ? first : spec.find(':', first + 1);
    if (second == std::string_view::npos || spec.find(':', second + 1) != std::string_view::npos)
        throw InputError("epsilon grid must look like lo:hi:step, got '" + std::string(spec) + "'");
    return epsilon_grid(Epsilon::parse(spec.substr(0, first)),
                        Epsilon::parse(spec.substr(first + 1, second - first - 1)),
                        Epsilon::parse(spec.substr(second + 1)));
}

std::vector<Epsilon> default_epsilon_grid() {
    return epsilon_grid(Epsilon::from_ratio(5, 100), Epsilon::from_ratio(60, 100), Epsilon::from_ratio(5, 100));
}

}  // namespace lexdiv
