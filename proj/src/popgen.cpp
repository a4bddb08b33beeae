#include "lexdiv/popgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace lexdiv {

namespace {

constexpr int kMaxRounds = 1000;

std::size_t draw(RngStream::engine_type& gen, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
}

std::string row_key(const std::vector<double>& losses, std::size_t row, std::size_t c) {
    return {reinterpret_cast<const char*>(losses.data() + row * c), c * sizeof(double)};
}

bool has_duplicate_rows(const std::vector<double>& losses, std::size_t n, std::size_t c) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i)
        if (!seen.insert(row_key(losses, i, c)).second) return true;
    return false;
}

}  // namespace

const char* to_string(GenKind kind) {
    switch (kind) {
        case GenKind::adversarial_single_case: return "adversarial";
        case GenKind::log_binary: return "log_binary";
        case GenKind::two_cluster: return "two_cluster";
        case GenKind::random_uniform: return "random_uniform";
        case GenKind::clustered: return "clustered";
    }
    return "?";
}

GenKind parse_gen_kind(std::string_view text) {
    if (text == "adversarial" || text == "adversarial_single_case") return GenKind::adversarial_single_case;
    if (text == "log_binary") return GenKind::log_binary;
    if (text == "two_cluster") return GenKind::two_cluster;
    if (text == "random_uniform") return GenKind::random_uniform;
    if (text == "clustered") return GenKind::clustered;
    throw InputError("unknown generator kind '" + std::string(text) + "'");
}

ErrorMatrix gen_adversarial_single_case(std::size_t n, std::size_t c) {
    if (n < 2 || c < 1) throw InputError("adversarial population needs n >= 2 and c >= 1");
    std::vector<double> losses(n * c, 0.0);
    for (std::size_t i = 0; i < n; ++i) losses[i * c] = static_cast<double>(i);
    return ErrorMatrix(n, c, std::move(losses), LossKind::discrete);
}

ErrorMatrix gen_log_binary(std::size_t n, std::size_t c) {
    if (n < 2 || !std::has_single_bit(n)) throw InputError("log-binary population needs n to be a power of two >= 2");
    const auto bits = static_cast<std::size_t>(std::countr_zero(n));
    if (c < bits) throw InputError("log-binary population needs c >= log2(n)");
    std::vector<double> losses(n * c, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < bits; ++b) losses[i * c + b] = static_cast<double>((i >> (bits - 1 - b)) & 1U);
    return ErrorMatrix(n, c, std::move(losses), LossKind::discrete);
}

ErrorMatrix gen_two_cluster(std::size_t n, std::size_t c) {
    if (n < 2 || n % 2 != 0) throw InputError("two-cluster population needs an even n >= 2");
    const std::size_t half = n / 2;
    if (c < half) throw InputError("two-cluster population needs c >= n/2");
    std::vector<double> losses(n * c, 0.0);
    for (std::size_t j = 0; j < half; ++j) {
        losses[j * c + j] = 1.0;
        const std::size_t b = half + j;
        std::fill_n(losses.begin() + static_cast<std::ptrdiff_t>(b * c), c, 1.0);
        losses[b * c + j] = 2.0;
    }
    return ErrorMatrix(n, c, std::move(losses), LossKind::discrete);
}

ErrorMatrix gen_random_uniform(std::size_t n, std::size_t c, std::size_t levels, const RngStream& rng) {
    if (n < 1 || c < 1) throw InputError("random population needs n >= 1 and c >= 1");
    if (levels < 2) throw InputError("random population needs levels >= 2");
    auto gen = rng.engine();
    std::vector<double> losses(n * c);
    auto fill_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < c; ++j) losses[i * c + j] = static_cast<double>(draw(gen, 0, levels - 1));
    };
    for (std::size_t i = 0; i < n; ++i) fill_row(i);

    for (int round = 0;; ++round) {
        std::unordered_set<std::string> seen;
        std::vector<std::size_t> clashes;
        for (std::size_t i = 0; i < n; ++i)
            if (!seen.insert(row_key(losses, i, c)).second) clashes.push_back(i);
        if (clashes.empty()) break;
        if (round == kMaxRounds)
            throw GenerationError("random population still has duplicate rows after " + std::to_string(kMaxRounds) +
                                  " rounds; increase c or levels");
        for (std::size_t i : clashes) fill_row(i);
    }
    return ErrorMatrix(n, c, std::move(losses), LossKind::discrete);
}

ErrorMatrix gen_clustered(std::size_t n, std::size_t c, std::size_t clusters, double spread, const RngStream& rng,
                          std::size_t levels) {
    if (clusters < 1 || clusters > n) throw InputError("clustered population needs 1 <= clusters <= n");
    if (levels < 2) throw InputError("clustered population needs levels >= 2");
    if (!(spread >= 0.0) || !(spread * static_cast<double>(c) < static_cast<double>(c) / 2.0))
        throw InputError("clustered population needs 0 <= spread < 1/2");
    const std::size_t largest = (n + clusters - 1) / clusters;
    if (largest - 1 > c) throw InputError("clustered population needs c >= cluster size - 1 for designated cases");

    const std::size_t min_centre_distance = (c + 1) / 2;
    const auto budget = static_cast<std::size_t>(std::floor(spread * static_cast<double>(c)));
    auto gen = rng.engine();

    for (int attempt = 0; attempt < kMaxRounds; ++attempt) {
        std::vector<std::vector<double>> centres;
        for (std::size_t k = 0; k < clusters; ++k) {
            bool placed = false;
            for (int tries = 0; tries < kMaxRounds && !placed; ++tries) {
                std::vector<double> candidate(c);
                for (double& v : candidate) v = static_cast<double>(draw(gen, 0, levels - 1));
                placed = std::all_of(centres.begin(), centres.end(), [&](const std::vector<double>& other) {
                    std::size_t d = 0;
                    for (std::size_t j = 0; j < c; ++j) d += candidate[j] != other[j];
                    return d >= min_centre_distance;
                });
                if (placed) centres.push_back(std::move(candidate));
            }
            if (!placed)
                throw GenerationError("could not place " + std::to_string(clusters) + " cluster centres at distance >= " +
                                      std::to_string(min_centre_distance));
        }

        std::vector<double> losses;
        losses.reserve(n * c);
        for (std::size_t k = 0; k < clusters; ++k) {
            const std::size_t size = n / clusters + (k < n % clusters ? 1 : 0);
            const auto& centre = centres[k];
            // Cases 0..size-2 are reserved as designated cases in this cluster.
            std::vector<std::size_t> free_cases(c - (size - 1));
            std::iota(free_cases.begin(), free_cases.end(), size - 1);
            for (std::size_t m = 0; m < size; ++m) {
                std::vector<double> row = centre;
                if (m > 0) {
                    const std::size_t designated = m - 1;
                    row[designated] = static_cast<double>((static_cast<std::size_t>(centre[designated]) + 1) % levels);
                    const std::size_t extras = std::min(budget > 0 ? budget - 1 : 0, free_cases.size());
                    std::vector<std::size_t> chosen;
                    std::sample(free_cases.begin(), free_cases.end(), std::back_inserter(chosen), extras, gen);
                    for (std::size_t j : chosen) {
                        const std::size_t shift = draw(gen, 1, levels - 1);
                        row[j] = static_cast<double>((static_cast<std::size_t>(centre[j]) + shift) % levels);
                    }
                }
                losses.insert(losses.end(), row.begin(), row.end());
            }
        }
        if (!has_duplicate_rows(losses, n, c)) return ErrorMatrix(n, c, std::move(losses), LossKind::discrete);
    }
    throw GenerationError("clustered population kept producing duplicate rows; lower spread");
}

ErrorMatrix generate(const GenSpec& spec) {
    const RngStream rng(spec.seed);
    switch (spec.kind) {
        case GenKind::adversarial_single_case: return gen_adversarial_single_case(spec.n, spec.c);
        case GenKind::log_binary: return gen_log_binary(spec.n, spec.c);
        case GenKind::two_cluster: return gen_two_cluster(spec.n, spec.c);
        case GenKind::random_uniform: return gen_random_uniform(spec.n, spec.c, spec.levels, rng);
        case GenKind::clustered: return gen_clustered(spec.n, spec.c, spec.clusters, spec.spread, rng, spec.levels);
    }
    throw InputError("unknown generator kind");
}

GenSpec genspec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("generator spec must be a JSON object");
    GenSpec spec;
    try {
        spec.kind = parse_gen_kind(j.at("kind").get<std::string>());
        spec.n = j.at("n").get<std::size_t>();
        spec.c = j.at("c").get<std::size_t>();
        spec.levels = j.value("levels", spec.levels);
        spec.clusters = j.value("clusters", spec.clusters);
        spec.spread = j.value("spread", spec.spread);
        spec.seed = j.value("seed", spec.seed);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("invalid generator spec: ") + e.what());
    }
    return spec;
}

nlohmann::json to_json(const GenSpec& spec) {
    return nlohmann::json{{"kind", to_string(spec.kind)}, {"n", spec.n},
                          {"c", spec.c},                  {"levels", spec.levels},
                          {"clusters", spec.clusters},    {"spread", spec.spread},
                          {"seed", spec.seed}};
}

ErrorMatrix add_jitter(const ErrorMatrix& matrix, double delta, const RngStream& rng) {
    if (matrix.kind() != LossKind::discrete) throw InputError("jitter is applied to discrete matrices");
    if (!(delta > 0.0 && delta < 0.8)) throw InputError("jitter needs 0 < delta < 0.8");
    auto gen = rng.engine();
    std::uniform_real_distribution<double> noise(0.0, delta / 4.0);
    std::vector<double> out(matrix.data().begin(), matrix.data().end());
    for (double& v : out) v += noise(gen);
    return ErrorMatrix(matrix.n_individuals(), matrix.n_cases(), std::move(out), LossKind::real,
                       matrix.individual_labels(), matrix.case_labels());
}

}  // namespace lexdiv
