#include "lexdiv/reference.hpp"

#include "lexdiv/engine.hpp"

namespace lexdiv::reference {

SimilarityGraph build_similarity_graph(const DedupProfile& profile, Epsilon epsilon, double delta) {
    const std::size_t n = profile.n_unique();
    SimilarityGraph g(n, epsilon, delta);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (!epsilon.far(phenotypic_distance(profile.unique, a, b, delta), profile.n_cases())) g.add_edge(a, b);
    return g;
}

RunStats estimate_runtime(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng) {
    if (trials == 0) throw InputError("estimate_runtime needs at least one trial");
    RunTally tally;
    for (std::uint64_t i = 0; i < trials; ++i) tally.add(lexicase_select(profile, rng.substream(i)));
    return tally.finish();
}

std::vector<double> selection_distribution(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng) {
    if (trials == 0) throw InputError("selection_distribution needs at least one trial");
    std::vector<std::uint64_t> wins(profile.n_original(), 0);
    for (std::uint64_t i = 0; i < trials; ++i) ++wins[lexicase_select(profile, rng.substream(i)).winner_original_index];
    std::vector<double> freq(wins.size());
    for (std::size_t j = 0; j < wins.size(); ++j)
        freq[j] = static_cast<double>(wins[j]) / static_cast<double>(trials);
    return freq;
}

}  // namespace lexdiv::reference
