#include "mpgm/compositions/mlda_words.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace mpgm::compositions {

MldaWordsResult fit_mlda_words(const LabeledCorpus& labeled, const mixture::MldaConfig& config,
                               int sweeps, std::uint64_t seed) {
    const auto& corpus = labeled.corpus;
    if (corpus.size() < 2) throw std::invalid_argument("fit_mlda_words: need at least two objects");
    if (labeled.word_modality < 0 || labeled.word_modality >= config.n_modalities)
        throw std::invalid_argument("fit_mlda_words: bad word modality index");
    bool any_words = false;
    for (const auto& obj : corpus)
        any_words |= !obj.tokens[static_cast<std::size_t>(labeled.word_modality)].empty();
    if (!any_words) throw std::invalid_argument("fit_mlda_words: word modality is empty");

    RngStream rng(seed, RngStream::fnv1a("mlda_words"));
    mixture::MldaState state(config, corpus, rng);
    for (int s = 0; s < sweeps; ++s) state.gibbs_sweep(rng);

    MldaWordsResult result{std::move(state), {}, {}, 0.0, 0.0};
    const int d = static_cast<int>(corpus.size());
    const int k = config.n_topics;

    for (int o = 0; o < d; ++o) {
        const auto th = result.state.theta(o);
        result.topic_of_object.push_back(static_cast<int>(
            std::max_element(th.begin(), th.end()) - th.begin()));
    }
    for (int t = 0; t < k; ++t) {
        const auto ph = result.state.phi(labeled.word_modality, t);
        result.word_of_topic.push_back(static_cast<int>(
            std::max_element(ph.begin(), ph.end()) - ph.begin()));
    }

    if (!labeled.truth.empty()) {
        // purity: majority ground-truth category within each topic cluster
        std::map<int, std::map<int, int>> topic_truth;
        int scored = 0;
        for (int o = 0; o < d; ++o) {
            if (labeled.truth[static_cast<std::size_t>(o)] < 0) continue;
            topic_truth[result.topic_of_object[static_cast<std::size_t>(o)]]
                       [labeled.truth[static_cast<std::size_t>(o)]] += 1;
            ++scored;
        }
        int agree = 0;
        for (const auto& [topic, hist] : topic_truth) {
            int best = 0;
            for (const auto& [cat, c] : hist) best = std::max(best, c);
            agree += best;
        }
        result.purity = scored > 0 ? static_cast<double>(agree) / scored : 0.0;

        // canonical word per category = majority word among its objects
        std::map<int, std::map<int, int>> cat_words;
        std::map<int, std::map<int, int>> cat_topics;
        for (int o = 0; o < d; ++o) {
            const int cat = labeled.truth[static_cast<std::size_t>(o)];
            if (cat < 0) continue;
            for (int w : corpus[static_cast<std::size_t>(o)].tokens[static_cast<std::size_t>(labeled.word_modality)])
                cat_words[cat][w] += 1;
            cat_topics[cat][result.topic_of_object[static_cast<std::size_t>(o)]] += 1;
        }
        int correct = 0;
        for (const auto& [cat, words] : cat_words) {
            int canon = -1, best = -1;
            for (const auto& [w, c] : words)
                if (c > best) {
                    best = c;
                    canon = w;
                }
            int major_topic = -1;
            best = -1;
            for (const auto& [topic, c] : cat_topics[cat])
                if (c > best) {
                    best = c;
                    major_topic = topic;
                }
            if (major_topic >= 0 &&
                result.word_of_topic[static_cast<std::size_t>(major_topic)] == canon)
                ++correct;
        }
        result.word_accuracy =
            cat_words.empty() ? 0.0 : static_cast<double>(correct) / cat_words.size();
    }
    return result;
}

}  // namespace mpgm::compositions
