#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexdiv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad file, bad parameter, violated precondition).
class InputError : public Error {
public:
    using Error::Error;
};

/// Raised when an operation that needs discrete losses receives a real-valued matrix.
/// Real losses have to go through static_epsilon_binarize first.
class NeedsBinarization : public InputError {
public:
    using InputError::InputError;
};

enum class LossKind { discrete, real };

const char* to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);

/// N x C table of per-case losses, row-major.
///
/// Discrete matrices hold exactly representable integers (|x| <= 2^53), so
/// equality on the stored doubles is equality of losses. Negative zero is
/// canonicalised on construction. Immutable once built.
class ErrorMatrix {
public:
    ErrorMatrix(std::size_t n_individuals, std::size_t n_cases, std::vector<double> losses,
                LossKind kind, std::vector<std::string> individual_labels = {},
                std::vector<std::string> case_labels = {});

    std::size_t n_individuals() const { return n_; }
    std::size_t n_cases() const { return c_; }
    LossKind kind() const { return kind_; }

    double at(std::size_t individual, std::size_t c) const { return losses_[individual * c_ + c]; }
    std::span<const double> row(std::size_t individual) const {
        return {losses_.data() + individual * c_, c_};
    }
    std::span<const double> data() const { return losses_; }

    const std::vector<std::string>& individual_labels() const { return individual_labels_; }
    const std::vector<std::string>& case_labels() const { return case_labels_; }

    friend bool operator==(const ErrorMatrix&, const ErrorMatrix&) = default;

private:
    std::size_t n_;
    std::size_t c_;
    std::vector<double> losses_;
    LossKind kind_;
    std::vector<std::string> individual_labels_;
    std::vector<std::string> case_labels_;
};

/// Distinct behaviours of a population plus the clone groups behind each of them.
struct DedupProfile {
    ErrorMatrix unique;
    /// groups[u] lists, ascending, the original individuals whose loss row equals unique row u.
    std::vector<std::vector<std::size_t>> groups;

    std::size_t n_unique() const { return unique.n_individuals(); }
    std::size_t n_original() const;
    std::size_t n_cases() const { return unique.n_cases(); }

    /// Wraps a matrix without collapsing anything: one singleton group per row.
    /// Used for real-valued matrices (where duplicate detection is not transitive)
    /// and for down-sampled views whose rows may collide.
    static DedupProfile identity(ErrorMatrix matrix);
};

/// Collapses behavioural clones. Unique rows keep first-occurrence order.
/// Throws NeedsBinarization for real-valued matrices.
DedupProfile deduplicate(const ErrorMatrix& matrix);

/// Inverse of deduplicate: rebuilds the original population row order.
ErrorMatrix expand(const DedupProfile& profile);

/// Addressable, reproducible random stream.
///
/// A stream is a pure value: (master_seed, stream_index) fully determines the
/// generated sequence, so the same stream can be replayed on any thread.
/// Independent tasks take disjoint substreams.
class RngStream {
public:
    using engine_type = std::mt19937_64;

    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : master_seed_(master_seed), stream_index_(stream_index) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    RngStream substream(std::uint64_t i) const;

    /// Fresh engine positioned at the start of this stream.
    engine_type engine() const;

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
};

}  // namespace lexdiv
