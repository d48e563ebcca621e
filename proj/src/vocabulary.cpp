#include "litkg/vocabulary.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "litkg/error.hpp"

namespace litkg {

std::string_view to_string(TermKind kind) {
    switch (kind) {
        case TermKind::Entity: return "entity";
        case TermKind::Predicate: return "predicate";
        case TermKind::Word: return "word";
    }
    return "?";
}

TermKind parse_term_kind(std::string_view text) {
    if (text == "entity") return TermKind::Entity;
    if (text == "predicate") return TermKind::Predicate;
    if (text == "word") return TermKind::Word;
    throw Error("unknown term kind '" + std::string(text) + "'");
}

TermId Vocabulary::intern(std::string_view name, TermKind kind) {
    std::string key(name);
    auto it = index_.find(key);
    if (it != index_.end()) {
        const Term& existing = terms_[it->second];
        if (existing.kind != kind) {
            throw KindConflict("term '" + key + "' is a " + std::string(to_string(existing.kind)) +
                               ", cannot re-insert as " + std::string(to_string(kind)));
        }
        return it->second;
    }
    auto id = static_cast<TermId>(terms_.size());
    terms_.push_back(Term{key, kind, std::nullopt});
    index_.emplace(std::move(key), id);
    return id;
}

std::optional<TermId> Vocabulary::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const Term& Vocabulary::at(TermId id) const {
    if (id >= terms_.size()) throw UnknownTerm(id);
    return terms_[id];
}

void Vocabulary::set_label(TermId id, std::string label) {
    if (id >= terms_.size()) throw UnknownTerm(id);
    Term& term = terms_[id];
    if (term.kind == TermKind::Word) {
        throw KindConflict("word term '" + term.name + "' cannot carry a label");
    }
    term.label = std::move(label);
}

std::size_t Vocabulary::count(TermKind kind) const {
    std::size_t n = 0;
    for (const auto& t : terms_) n += t.kind == kind;
    return n;
}

namespace {

void write_escaped(std::ostream& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '\\': out << "\\\\"; break;
            case '\t': out << "\\t"; break;
            case '\n': out << "\\n"; break;
            case '\r': out << "\\r"; break;
            default: out << c;
        }
    }
}

std::string unescape(std::string_view s) {
    std::string r;
    r.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            r += s[i];
            continue;
        }
        switch (s[++i]) {
            case 't': r += '\t'; break;
            case 'n': r += '\n'; break;
            case 'r': r += '\r'; break;
            default: r += s[i];
        }
    }
    return r;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
    const auto& terms = vocab.terms();
    for (std::size_t id = 0; id < terms.size(); ++id) {
        const Term& t = terms[id];
        out << id << '\t' << to_string(t.kind) << '\t';
        write_escaped(out, t.name);
        out << '\t';
        if (t.label) write_escaped(out, *t.label);
        out << '\n';
    }
}

// An empty label field reads back as "no label"; a stored empty label is
// indistinguishable and is dropped.
Vocabulary read_vocabulary(std::istream& in) {
    Vocabulary vocab;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 4) {
            throw Error("vocabulary line " + std::to_string(lineno) + ": expected 4 fields");
        }
        TermId id = 0;
        auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), id);
        if (ec != std::errc{} || ptr != fields[0].data() + fields[0].size() || id != vocab.size()) {
            throw Error("vocabulary line " + std::to_string(lineno) + ": ids must be dense and ascending");
        }
        TermId got = vocab.intern(unescape(fields[2]), parse_term_kind(fields[1]));
        if (got != id) {
            throw Error("vocabulary line " + std::to_string(lineno) + ": duplicate term");
        }
        if (!fields[3].empty()) vocab.set_label(id, unescape(fields[3]));
    }
    return vocab;
}

}  // namespace litkg
