#pragma once
// Unified identifier space for entities, predicates and words.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace litkg {

using TermId = std::uint32_t;

enum class TermKind : std::uint8_t { Entity, Predicate, Word };

std::string_view to_string(TermKind kind);
TermKind parse_term_kind(std::string_view text);

struct Term {
    std::string name;  // IRI, blank node (`_:x`) or word token
    TermKind kind;
    std::optional<std::string> label;
};

/// Dense bijection TermId <-> term. Ids are assigned in insertion order and
/// never change; a term's kind is fixed on first insertion.
class Vocabulary {
public:
    /// Returns the id of `name`, inserting it if absent.
    /// Throws KindConflict if it already exists with a different kind.
    TermId intern(std::string_view name, TermKind kind);

    std::optional<TermId> find(std::string_view name) const;

    const Term& at(TermId id) const;
    TermKind kind(TermId id) const { return at(id).kind; }
    const std::string& name(TermId id) const { return at(id).name; }

    /// Labels are only allowed on Entity and Predicate terms.
    void set_label(TermId id, std::string label);

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    std::size_t count(TermKind kind) const;

    const std::vector<Term>& terms() const noexcept { return terms_; }

private:
    std::vector<Term> terms_;
    std::unordered_map<std::string, TermId> index_;
};

/// TSV `id<TAB>kind<TAB>term<TAB>label`, ids ascending. Tabs, newlines and
/// backslashes inside fields are backslash-escaped.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);

}  // namespace litkg
