#include "sma/languages.hpp"

#include <algorithm>
#include <stdexcept>

namespace sma {

std::string_view language_name(LanguageId id) {
    switch (id) {
        case LanguageId::L1: return "L1";
        case LanguageId::L2: return "L2";
        case LanguageId::L3: return "L3";
        case LanguageId::L4: return "L4";
        case LanguageId::L5: return "L5";
        case LanguageId::L6: return "L6";
    }
    return "?";
}

LanguageId language_from_name(std::string_view name) {
    for (int i = 0; i < kLanguageCount; ++i) {
        auto id = static_cast<LanguageId>(i);
        if (name == language_name(id)) return id;
    }
    throw std::invalid_argument("unknown language '" + std::string(name) + "'");
}

LanguageProfile profile_for(LanguageId id) {
    switch (id) {
        case LanguageId::L1: return {id, Alphabet::binary(), 1, Way::OneWay};
        case LanguageId::L2: return {id, Alphabet::binary(), 1, Way::OneWay};
        case LanguageId::L3: return {id, Alphabet::ab(), 2, Way::OneWay};
        case LanguageId::L4: return {id, Alphabet::binary(), 2, Way::TwoWay};
        case LanguageId::L5: return {id, Alphabet::abc(), 3, Way::OneWay};
        case LanguageId::L6: return {id, Alphabet::binary(), 3, Way::OneWay};
    }
    throw std::invalid_argument("unknown language id");
}

static void check_symbols(const Word& word, int input_count) {
    for (Symbol s : word)
        if (s < 0 || s >= input_count)
            throw std::invalid_argument("word contains symbol id " + std::to_string(s) +
                                        " outside the alphabet");
}

bool membership(LanguageId id, const Word& word) {
    int input_count = profile_for(id).alphabet.input_count();
    check_symbols(word, input_count);
    size_t n = word.size();
    switch (id) {
        case LanguageId::L1:
            return n >= 2 && word.front() == 0 && word.back() == 1;
        case LanguageId::L2:
            return n % 2 == 0;
        case LanguageId::L3: {
            size_t a = 0;
            while (a < n && word[a] == 0) ++a;
            for (size_t i = a; i < n; ++i)
                if (word[i] != 1) return false;
            return n == 2 * a;
        }
        case LanguageId::L4: {
            for (size_t i = 0, j = n; i < j; ++i, --j)
                if (word[i] != word[j - 1]) return false;
            return true;
        }
        case LanguageId::L5: {
            size_t a = 0;
            while (a < n && word[a] == 0) ++a;
            size_t b = a;
            while (b < n && word[b] == 1) ++b;
            for (size_t i = b; i < n; ++i)
                if (word[i] != 2) return false;
            return n == 3 * a && b == 2 * a;
        }
        case LanguageId::L6: {
            if (n % 2 != 0) return false;
            size_t half = n / 2;
            return std::equal(word.begin(), word.begin() + half, word.begin() + half);
        }
    }
    throw std::invalid_argument("unknown language id");
}

int min_member_length(LanguageId id) { return id == LanguageId::L1 ? 2 : 0; }

static Word random_bits(size_t length, int input_count, Rng& rng) {
    Word word(length);
    for (Symbol& s : word) s = static_cast<Symbol>(rng.uniform_int(static_cast<uint64_t>(input_count)));
    return word;
}

Word generate_member(LanguageId id, int max_len, Rng& rng) {
    if (max_len < min_member_length(id))
        throw std::invalid_argument("max_len below the shortest member length");
    switch (id) {
        case LanguageId::L1: {
            int len = static_cast<int>(rng.uniform_range(2, max_len));
            Word word = random_bits(static_cast<size_t>(len), 2, rng);
            word.front() = 0;
            word.back() = 1;
            return word;
        }
        case LanguageId::L2: {
            int half = static_cast<int>(rng.uniform_range(0, max_len / 2));
            return random_bits(static_cast<size_t>(2 * half), 2, rng);
        }
        case LanguageId::L3: {
            int n = static_cast<int>(rng.uniform_range(0, max_len / 2));
            Word word(static_cast<size_t>(2 * n), 0);
            std::fill(word.begin() + n, word.end(), 1);
            return word;
        }
        case LanguageId::L4: {
            int len = static_cast<int>(rng.uniform_range(0, max_len));
            Word half = random_bits(static_cast<size_t>((len + 1) / 2), 2, rng);
            Word word = half;
            word.resize(static_cast<size_t>(len));
            for (int i = 0; i < len / 2; ++i)
                word[static_cast<size_t>(len - 1 - i)] = half[static_cast<size_t>(i)];
            return word;
        }
        case LanguageId::L5: {
            int n = static_cast<int>(rng.uniform_range(0, max_len / 3));
            Word word(static_cast<size_t>(3 * n), 0);
            std::fill(word.begin() + n, word.begin() + 2 * n, 1);
            std::fill(word.begin() + 2 * n, word.end(), 2);
            return word;
        }
        case LanguageId::L6: {
            int half = static_cast<int>(rng.uniform_range(0, max_len / 2));
            Word word = random_bits(static_cast<size_t>(half), 2, rng);
            word.insert(word.end(), word.begin(), word.begin() + half);
            return word;
        }
    }
    throw std::invalid_argument("unknown language id");
}

Word generate_random(const Alphabet& alphabet, int max_len, Rng& rng) {
    int len = static_cast<int>(rng.uniform_range(0, max_len));
    return random_bits(static_cast<size_t>(len), alphabet.input_count(), rng);
}

LabeledWord sample_episode_input(const LanguageProfile& profile, int max_len, Rng& rng) {
    LabeledWord sample;
    if (rng.bernoulli(0.5))
        sample.word = generate_member(profile.id, max_len, rng);
    else
        sample.word = generate_random(profile.alphabet, max_len, rng);
    sample.label = membership(profile.id, sample.word);
    return sample;
}

}  // namespace sma
