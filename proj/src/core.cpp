#include "lexdiv/core.hpp"

#include <cmath>
#include <numeric>
#include <string_view>
#include <unordered_map>

namespace lexdiv {

namespace {

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string_view row_signature(const ErrorMatrix& m, std::size_t i) {
    auto row = m.row(i);
    return {reinterpret_cast<const char*>(row.data()), row.size_bytes()};
}

}  // namespace

const char* to_string(LossKind kind) {
    return kind == LossKind::discrete ? "discrete" : "real";
}

LossKind parse_loss_kind(std::string_view text) {
    if (text == "discrete") return LossKind::discrete;
    if (text == "real") return LossKind::real;
    throw InputError("unknown loss kind '" + std::string(text) + "' (expected discrete or real)");
}

ErrorMatrix::ErrorMatrix(std::size_t n_individuals, std::size_t n_cases, std::vector<double> losses,
                         LossKind kind, std::vector<std::string> individual_labels,
                         std::vector<std::string> case_labels)
    : n_(n_individuals),
      c_(n_cases),
      losses_(std::move(losses)),
      kind_(kind),
      individual_labels_(std::move(individual_labels)),
      case_labels_(std::move(case_labels)) {
    if (n_ == 0 || c_ == 0) throw InputError("error matrix needs at least one individual and one case");
    if (losses_.size() != n_ * c_) {
        throw InputError("error matrix has " + std::to_string(losses_.size()) + " cells, expected " +
                         std::to_string(n_) + "x" + std::to_string(c_));
    }
    if (!individual_labels_.empty() && individual_labels_.size() != n_)
        throw InputError("individual label count does not match row count");
    if (!case_labels_.empty() && case_labels_.size() != c_)
        throw InputError("case label count does not match column count");

    for (std::size_t k = 0; k < losses_.size(); ++k) {
        double& v = losses_[k];
        if (!std::isfinite(v)) {
            throw InputError("non-finite loss at individual " + std::to_string(k / c_) + ", case " +
                             std::to_string(k % c_));
        }
        if (kind_ == LossKind::discrete) {
            if (v != std::trunc(v) || std::fabs(v) > kMaxExactInteger) {
                throw InputError("discrete loss at individual " + std::to_string(k / c_) + ", case " +
                                 std::to_string(k % c_) + " is not an exact integer");
            }
            v += 0.0;  // -0.0 -> +0.0 so byte signatures agree with value equality
        }
    }
}

std::size_t DedupProfile::n_original() const {
    std::size_t total = 0;
    for (const auto& g : groups) total += g.size();
    return total;
}

DedupProfile DedupProfile::identity(ErrorMatrix matrix) {
    std::vector<std::vector<std::size_t>> groups(matrix.n_individuals());
    for (std::size_t i = 0; i < groups.size(); ++i) groups[i] = {i};
    return DedupProfile{std::move(matrix), std::move(groups)};
}

DedupProfile deduplicate(const ErrorMatrix& matrix) {
    if (matrix.kind() != LossKind::discrete) {
        throw NeedsBinarization(
            "deduplication needs discrete losses; binarize real-valued losses first "
            "(static epsilon-lexicase)");
    }
    const std::size_t n = matrix.n_individuals();
    const std::size_t c = matrix.n_cases();

    std::unordered_map<std::string_view, std::size_t> index;
    index.reserve(n);
    std::vector<std::size_t> first_rows;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        auto [it, inserted] = index.try_emplace(row_signature(matrix, i), groups.size());
        if (inserted) {
            first_rows.push_back(i);
            groups.emplace_back();
        }
        groups[it->second].push_back(i);
    }

    std::vector<double> losses;
    losses.reserve(first_rows.size() * c);
    std::vector<std::string> labels;
    for (std::size_t r : first_rows) {
        auto row = matrix.row(r);
        losses.insert(losses.end(), row.begin(), row.end());
        if (!matrix.individual_labels().empty()) labels.push_back(matrix.individual_labels()[r]);
    }
    ErrorMatrix unique(first_rows.size(), c, std::move(losses), LossKind::discrete, std::move(labels),
                       matrix.case_labels());
    return DedupProfile{std::move(unique), std::move(groups)};
}

ErrorMatrix expand(const DedupProfile& profile) {
    const std::size_t n = profile.n_original();
    const std::size_t c = profile.n_cases();
    std::vector<double> losses(n * c);
    for (std::size_t u = 0; u < profile.groups.size(); ++u) {
        auto row = profile.unique.row(u);
        for (std::size_t original : profile.groups[u]) {
            if (original >= n) throw InputError("clone group refers to individual outside the population");
            std::copy(row.begin(), row.end(), losses.begin() + static_cast<std::ptrdiff_t>(original * c));
        }
    }
    return ErrorMatrix(n, c, std::move(losses), profile.unique.kind(), {}, profile.unique.case_labels());
}

RngStream RngStream::substream(std::uint64_t i) const {
    return RngStream(master_seed_, splitmix64(stream_index_ ^ splitmix64(i + 1)));
}

RngStream::engine_type RngStream::engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed_), static_cast<std::uint32_t>(master_seed_ >> 32),
                      static_cast<std::uint32_t>(stream_index_), static_cast<std::uint32_t>(stream_index_ >> 32)};
    return engine_type(seq);
}

}  // namespace lexdiv
