#include "litkg/text_cooc.hpp"

#include <ostream>

#include "litkg/error.hpp"
#include "litkg/rdf_ingest.hpp"

namespace litkg {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool EntityMatcher::add(const std::vector<std::string>& tokens, TermId term) {
    if (tokens.empty()) return false;
    std::uint32_t node = 0;
    for (const std::string& tok : tokens) {
        auto it = nodes_[node].children.find(tok);
        if (it == nodes_[node].children.end()) {
            auto child = static_cast<std::uint32_t>(nodes_.size());
            nodes_[node].children.emplace(tok, child);
            nodes_.emplace_back();
            node = child;
        } else {
            node = it->second;
        }
    }
    if (nodes_[node].term != kNoTerm) return false;
    nodes_[node].term = term;
    ++patterns_;
    return true;
}

EntityMatcher::Match EntityMatcher::longest_match(std::span<const std::string> tokens, std::size_t start) const {
    Match best{kNoTerm, 0};
    std::uint32_t node = 0;
    for (std::size_t i = start; i < tokens.size(); ++i) {
        auto it = nodes_[node].children.find(tokens[i]);
        if (it == nodes_[node].children.end()) break;
        node = it->second;
        if (nodes_[node].term != kNoTerm) best = Match{nodes_[node].term, i - start + 1};
    }
    return best;
}

std::optional<TermId> EntityMatcher::lookup(const std::vector<std::string>& tokens) const {
    Match m = longest_match(tokens, 0);
    if (m.length != tokens.size() || tokens.empty()) return std::nullopt;
    return m.term;
}

EntityMatcher build_matcher(const Vocabulary& vocab, const MatcherOptions& options, MatcherStats* stats) {
    EntityMatcher matcher;
    MatcherStats local;
    for (TermId id = 0; id < vocab.size(); ++id) {
        TermKind kind = vocab.kind(id);
        if (kind == TermKind::Word) continue;
        if (kind == TermKind::Predicate && !options.match_predicates) continue;
        auto tokens = tokenize(entity_label(vocab, id));
        if (tokens.empty()) {
            ++local.empty_labels;
            continue;
        }
        if (matcher.add(tokens, id)) {
            ++local.patterns;
        } else {
            ++local.collisions;
        }
    }
    if (stats) *stats = local;
    return matcher;
}

TokenSequence link_text(std::string_view text, const EntityMatcher& matcher, Vocabulary& vocab) {
    const auto tokens = tokenize(text);
    TokenSequence out;
    out.reserve(tokens.size());
    std::size_t i = 0;
    while (i < tokens.size()) {
        auto match = matcher.longest_match(tokens, i);
        if (match.length > 0) {
            out.push_back(match.term);
            i += match.length;
        } else {
            out.push_back(vocab.intern(tokens[i], TermKind::Word));
            ++i;
        }
    }
    return out;
}

void TextCoocParams::validate() const {
    if (window < 1) throw Error("window must be at least 1");
}

SparseMatrix text_cooccurrence(std::span<const TokenSequence> docs, const Vocabulary& vocab,
                               const TextCoocParams& params) {
    params.validate();
    const std::size_t dim = vocab.size();
    auto key = [](TermId a, TermId b) { return (static_cast<std::uint64_t>(a) << 32) | b; };

    std::unordered_map<std::uint64_t, double> counts;
    std::vector<std::size_t> frequency(dim, 0);
    for (const TokenSequence& doc : docs) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (doc[i] >= dim) throw UnknownTerm(doc[i]);
            ++frequency[doc[i]];
            for (std::size_t d = 1; d <= params.window && i + d < doc.size(); ++d) {
                const double w = params.weighting == WindowWeighting::Harmonic ? 1.0 / static_cast<double>(d) : 1.0;
                counts[key(doc[i], doc[i + d])] += w;
                counts[key(doc[i + d], doc[i])] += w;
            }
        }
    }

    auto kept = [&](TermId id) {
        return vocab.kind(id) != TermKind::Word || frequency[id] >= params.min_word_count;
    };
    std::vector<Cell> cells;
    cells.reserve(counts.size());
    for (const auto& [k, w] : counts) {
        auto focus = static_cast<TermId>(k >> 32);
        auto context = static_cast<TermId>(k & 0xFFFFFFFFu);
        if (kept(focus) && kept(context)) cells.push_back(Cell{focus, context, w});
    }
    return SparseMatrix::from_cells(dim, std::move(cells));
}

void write_linked_corpus(std::ostream& out, std::span<const TokenSequence> docs, const Vocabulary& vocab) {
    for (const TokenSequence& doc : docs) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (i) out << ' ';
            const Term& t = vocab.at(doc[i]);
            if (t.kind == TermKind::Word) {
                out << t.name;
            } else {
                out << '<' << t.name << '>';
            }
        }
        out << '\n';
    }
}

WindowWeighting parse_weighting(std::string_view text) {
    if (text == "harmonic") return WindowWeighting::Harmonic;
    if (text == "uniform") return WindowWeighting::Uniform;
    throw Error("unknown weighting '" + std::string(text) + "'");
}

std::string_view to_string(WindowWeighting weighting) {
    return weighting == WindowWeighting::Harmonic ? "harmonic" : "uniform";
}

}  // namespace litkg
