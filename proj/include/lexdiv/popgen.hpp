#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "lexdiv/core.hpp"

namespace lexdiv {

/// A generator could not meet its constraints within the retry limit.
class GenerationError : public Error {
public:
    using Error::Error;
};

enum class GenKind { adversarial_single_case, log_binary, two_cluster, random_uniform, clustered };

const char* to_string(GenKind kind);
GenKind parse_gen_kind(std::string_view text);

struct GenSpec {
    GenKind kind = GenKind::random_uniform;
    std::size_t n = 0;
    std::size_t c = 0;
    std::size_t levels = 4;    // random_uniform, clustered
    std::size_t clusters = 2;  // clustered
    double spread = 0.0;       // clustered
    std::uint64_t seed = 0;
};

/// Identical rows except case 0, where row i has loss i.
ErrorMatrix gen_adversarial_single_case(std::size_t n, std::size_t c);

/// Row i carries the binary expansion of i (most significant bit first) on the
/// first log2(n) cases and zeros elsewhere. n must be a power of two.
ErrorMatrix gen_log_binary(std::size_t n, std::size_t c);

/// Two clusters of n/2 rows at opposite corners. Cluster A is all 0 with
/// member j raised to 1 on case j; cluster B is all 1 with member j raised to 2
/// on case j. Within-cluster distance 2, between-cluster distance >= c - 1.
ErrorMatrix gen_two_cluster(std::size_t n, std::size_t c);

/// I.i.d. uniform losses on {0..levels-1}; colliding rows are redrawn.
ErrorMatrix gen_random_uniform(std::size_t n, std::size_t c, std::size_t levels, const RngStream& rng);

/// `clusters` centres at pairwise distance >= ceil(c/2), rows dealt to clusters
/// in contiguous blocks. Member 0 of a cluster is its centre; member m >= 1
/// changes the centre on its designated case m-1 and on up to
/// floor(spread*c) - 1 further random non-designated cases, so each member
/// differs from its centre on max(1, floor(spread*c)) cases at most.
ErrorMatrix gen_clustered(std::size_t n, std::size_t c, std::size_t clusters, double spread, const RngStream& rng,
                          std::size_t levels = 4);

ErrorMatrix generate(const GenSpec& spec);

GenSpec genspec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GenSpec& spec);

/// Real-valued copy with uniform jitter in [0, delta/4] added to each cell.
/// With delta < 0.8, the delta-distance of the result equals the discrete
/// distance of the input.
ErrorMatrix add_jitter(const ErrorMatrix& matrix, double delta, const RngStream& rng);

}  // namespace lexdiv
