#pragma once
// Gazetteer entity linking over literal texts and windowed text co-occurrence.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "litkg/sparse_matrix.hpp"
#include "litkg/vocabulary.hpp"

namespace litkg {

/// Lowercases ASCII letters and splits on every run of characters that are
/// neither ASCII alphanumerics nor bytes >= 0x80 (so UTF-8 words stay whole).
std::vector<std::string> tokenize(std::string_view text);

struct MatcherStats {
    std::size_t patterns = 0;
    std::size_t empty_labels = 0;
    std::size_t collisions = 0;
};

/// Token trie over normalized labels.
class EntityMatcher {
public:
    struct Match {
        TermId term;
        std::size_t length;  // tokens consumed
    };

    /// Adds a pattern; returns false (keeping the existing owner) if the same
    /// token sequence is already mapped.
    bool add(const std::vector<std::string>& tokens, TermId term);

    /// Longest pattern starting at tokens[start]; length 0 if none.
    Match longest_match(std::span<const std::string> tokens, std::size_t start) const;

    /// Term owning exactly this token sequence, if any.
    std::optional<TermId> lookup(const std::vector<std::string>& tokens) const;

    std::size_t size() const noexcept { return patterns_; }

private:
    static constexpr TermId kNoTerm = static_cast<TermId>(-1);

    struct Node {
        std::unordered_map<std::string, std::uint32_t> children;
        TermId term = kNoTerm;
    };

    std::vector<Node> nodes_{Node{}};
    std::size_t patterns_ = 0;
};

struct MatcherOptions {
    /// Also register predicate labels as patterns.
    bool match_predicates = false;
};

/// One pattern per entity (optionally predicate) with a non-empty normalized
/// label, inserted in TermId order so label collisions keep the smaller id.
EntityMatcher build_matcher(const Vocabulary& vocab, const MatcherOptions& options = {},
                            MatcherStats* stats = nullptr);

using TokenSequence = std::vector<TermId>;

/// Greedy left-to-right longest-match linking. Unmatched tokens are interned
/// into `vocab` as Word terms.
TokenSequence link_text(std::string_view text, const EntityMatcher& matcher, Vocabulary& vocab);

enum class WindowWeighting { Harmonic, Uniform };

struct TextCoocParams {
    std::size_t window = 5;
    WindowWeighting weighting = WindowWeighting::Harmonic;
    /// Word terms occurring fewer times in the corpus lose all their cells.
    std::size_t min_word_count = 5;

    void validate() const;
};

/// Symmetric windowed counts: each pair at distance d (1 <= d <= window)
/// inside one document adds 1/d (or 1) to both (t_i, t_j) and (t_j, t_i).
/// The matrix dimension is vocab.size().
SparseMatrix text_cooccurrence(std::span<const TokenSequence> docs, const Vocabulary& vocab,
                               const TextCoocParams& params);

/// One document per line, tokens space separated, entities/predicates as `<IRI>`.
void write_linked_corpus(std::ostream& out, std::span<const TokenSequence> docs, const Vocabulary& vocab);

WindowWeighting parse_weighting(std::string_view text);
std::string_view to_string(WindowWeighting weighting);

}  // namespace litkg
