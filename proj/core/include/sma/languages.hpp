#pragma once

#include <string_view>

#include "sma/automaton.hpp"
#include "sma/rng.hpp"

namespace sma {

// The six benchmark languages:
//   L1: 0w1 over {0,1}          L2: even length over {0,1}
//   L3: a^n b^n                 L4: palindromes over {0,1}
//   L5: a^n b^n c^n             L6: ww over {0,1}
enum class LanguageId { L1, L2, L3, L4, L5, L6 };

constexpr int kLanguageCount = 6;
constexpr int kDefaultMaxLen = 20;

std::string_view language_name(LanguageId id);
LanguageId language_from_name(std::string_view name);

struct LanguageProfile {
    LanguageId id = LanguageId::L1;
    Alphabet alphabet;
    int head_count = 1;
    Way way = Way::OneWay;
};

// Head counts and movement restrictions used for training each language.
LanguageProfile profile_for(LanguageId id);

// Exact membership test. Throws std::invalid_argument on symbols outside
// the language's alphabet.
bool membership(LanguageId id, const Word& word);

// Length of the shortest member (2 for L1, 0 otherwise).
int min_member_length(LanguageId id);

// Uniformly picks a feasible length <= max_len, then a uniform member of
// that length.
Word generate_member(LanguageId id, int max_len, Rng& rng);

// Length uniform in [0, max_len], each symbol uniform over the alphabet.
Word generate_random(const Alphabet& alphabet, int max_len, Rng& rng);

struct LabeledWord {
    Word word;
    bool label = false;
};

// Coin flip between generate_member and generate_random; the label always
// comes from the membership oracle, so random draws that happen to be
// members are labeled true.
LabeledWord sample_episode_input(const LanguageProfile& profile, int max_len, Rng& rng);

}  // namespace sma
