#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace scorelens::provenance {

std::uint64_t fnv1a64(std::string_view bytes);

/// 16 lowercase hex digits of fnv1a64.
std::string text_hash(std::string_view bytes);

/// Hash of a source/summary pair; the two parts are length-prefixed so that
/// moving bytes across the boundary changes the hash.
std::string pair_hash(std::string_view source, std::string_view summary);

}  // namespace scorelens::provenance
