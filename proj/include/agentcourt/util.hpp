#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace agentcourt {

// FNV-1a, used for stable entry ids and store content hashes.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 14695981039346656037ULL) {
    uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= static_cast<uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t value);

std::vector<std::string_view> split_whitespace(std::string_view text);

// Budget approximation: whitespace-split word count x 1.3, rounded up.
int64_t approx_token_count(std::string_view text);

// Lowercases ASCII letters, folds ASCII punctuation to nothing and runs of
// whitespace to single spaces. Non-ASCII bytes pass through untouched so
// UTF-8 text stays intact.
std::string normalize_content(std::string_view text);

// Decimal rounding with ties away from zero; `decimals` in [0, 6].
double round_half_up(double value, int decimals);

std::string trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);
bool contains(std::string_view haystack, std::string_view needle);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Replaces every occurrence of `from` in `text`.
std::string replace_all(std::string text, std::string_view from, std::string_view to);

// Applies fn to every index in [0, count) using at most `workers` threads;
// workers <= 1 runs inline. fn must not throw (wrap exceptions into the
// result slot instead).
void parallel_for_index(size_t count, int workers, const std::function<void(size_t)>& fn);

}  // namespace agentcourt
