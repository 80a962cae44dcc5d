#pragma once

#include "mpgm/mixture/mlda.hpp"

#include <cstdint>
#include <vector>

namespace mpgm::compositions {

/// Corpus plus optional ground-truth category per object (-1 = unknown),
/// used only for scoring.
struct LabeledCorpus {
    mixture::MldaCorpus corpus;
    std::vector<int> truth;
    int word_modality = 0;  // which modality carries word tokens
};

struct MldaWordsResult {
    mixture::MldaState state;
    std::vector<int> topic_of_object;  // argmax posterior topic proportion
    std::vector<int> word_of_topic;    // argmax word-modality distribution
    double purity = 0.0;               // topic clusters vs ground truth
    double word_accuracy = 0.0;        // canonical-word recovery per category
};

/// Fit MLDA on a corpus whose designated modality holds word tokens and
/// derive the topic -> word map. Purity and word accuracy are scored against
/// the ground truth when present (canonical word of a category = the
/// majority word among its objects' word tokens).
MldaWordsResult fit_mlda_words(const LabeledCorpus& corpus, const mixture::MldaConfig& config,
                               int sweeps, std::uint64_t seed);

}  // namespace mpgm::compositions
