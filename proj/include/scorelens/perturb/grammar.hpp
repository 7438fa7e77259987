#pragma once

#include <array>
#include <string>
#include <string_view>

#include "scorelens/perturb/spelling.hpp"

namespace scorelens::perturb {

enum class GrammarMode { single_word, compound, segmentation };

inline constexpr std::array<GrammarMode, 3> kGrammarModes = {GrammarMode::single_word, GrammarMode::compound,
                                                             GrammarMode::segmentation};

std::string_view to_string(GrammarMode mode);

/// Replaces each alphabetic word missing from the dictionary with its closest
/// suggestion. Casing, punctuation and spacing are kept.
std::string correct_single_words(std::string_view text, const SpellIndex& index);

/// Lowercases, strips punctuation and runs compound-aware correction over the
/// whole text.
std::string correct_compound(std::string_view text, const SpellIndex& index);

/// Drops punctuation and splits run-together words. Original casing is kept.
std::string segment_text(std::string_view text, const FrequencyDictionary& dictionary);

std::string correct(GrammarMode mode, std::string_view text, const SpellIndex& index);

}  // namespace scorelens::perturb
