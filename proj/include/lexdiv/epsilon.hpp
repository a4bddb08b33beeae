#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexdiv {

/// Similarity fraction held as an exact reduced rational.
///
/// Grid values such as 0.05 are never rounded, so "distance >= eps * C" is an
/// exact integer comparison and stepping a grid does not accumulate error.
class Epsilon {
public:
    constexpr Epsilon() = default;

    static Epsilon from_ratio(std::int64_t numerator, std::int64_t denominator);
    /// Parses a plain decimal such as "0.25", ".5" or "1".
    static Epsilon parse(std::string_view decimal);
    /// Nearest multiple of 1e-9; meant for programmatic use, prefer parse() for user input.
    static Epsilon from_double(double value);

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// True when a pair at `distance` counts as far apart: distance >= eps * n_cases.
    bool far(std::size_t distance, std::size_t n_cases) const;
    /// Smallest distance that counts as far: ceil(eps * n_cases).
    std::size_t far_threshold(std::size_t n_cases) const;

    /// Exact decimal when the denominator has only factors 2 and 5, otherwise "num/den".
    std::string to_string() const;

    friend bool operator==(const Epsilon& a, const Epsilon& b) = default;
    friend std::strong_ordering operator<=>(const Epsilon& a, const Epsilon& b);

    Epsilon operator+(const Epsilon& other) const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Inclusive grid lo, lo+step, ..., <= hi.
std::vector<Epsilon> epsilon_grid(Epsilon lo, Epsilon hi, Epsilon step);
/// "lo:hi:step", e.g. "0.05:0.60:0.05".
std::vector<Epsilon> parse_epsilon_grid(std::string_view spec);
/// 0.05, 0.10, ..., 0.60.
std::vector<Epsilon> default_epsilon_grid();

}  // namespace lexdiv
