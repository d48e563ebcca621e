#include "litkg/rdf_ingest.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <string_view>
#include <variant>

#include "litkg/error.hpp"

namespace litkg {

namespace {

enum class NodeType { Iri, Blank, Literal };

struct ParsedNode {
    NodeType type;
    std::string value;  // IRI body, `_:label`, or unescaped literal text
    std::optional<std::string> language;
};

struct ParsedTriple {
    ParsedNode subject;
    std::string predicate;
    ParsedNode object;
};

/// Parse failure at a position within the current line.
struct LineError {
    std::size_t pos;
    std::string what;
};

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class LineParser {
public:
    explicit LineParser(std::string_view line) : s_(line) {}

    ParsedTriple triple() {
        ParsedTriple t;
        skip_ws();
        t.subject = subject();
        require_ws();
        t.predicate = iri();
        require_ws();
        t.object = object();
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected '.'");
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] != '#') fail("trailing characters after '.'");
        return t;
    }

private:
    [[noreturn]] void fail(std::string what) const { throw LineError{pos_, std::move(what)}; }

    bool at_ws() const { return pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'); }

    void skip_ws() {
        while (at_ws()) ++pos_;
    }

    void require_ws() {
        if (!at_ws()) fail("expected whitespace");
        skip_ws();
    }

    ParsedNode subject() {
        if (pos_ < s_.size() && s_[pos_] == '_') return ParsedNode{NodeType::Blank, blank(), {}};
        return ParsedNode{NodeType::Iri, iri(), {}};
    }

    ParsedNode object() {
        if (pos_ < s_.size()) {
            if (s_[pos_] == '_') return ParsedNode{NodeType::Blank, blank(), {}};
            if (s_[pos_] == '"') return literal();
        }
        return ParsedNode{NodeType::Iri, iri(), {}};
    }

    std::string iri() {
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected IRI");
        std::size_t start = ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '>') {
            char c = s_[pos_];
            if (c == ' ' || c == '\t' || c == '<' || c == '"') fail("invalid character in IRI");
            ++pos_;
        }
        if (pos_ >= s_.size()) fail("unterminated IRI");
        if (pos_ == start) fail("empty IRI");
        std::string value(s_.substr(start, pos_ - start));
        ++pos_;
        return value;
    }

    std::string blank() {
        if (s_.substr(pos_, 2) != "_:") fail("expected blank node");
        std::size_t start = pos_;
        pos_ += 2;
        while (pos_ < s_.size()) {
            unsigned char c = static_cast<unsigned char>(s_[pos_]);
            if (std::isalnum(c) || c == '_' || c == '-' || c == '.' || c >= 0x80) {
                ++pos_;
            } else {
                break;
            }
        }
        // A label cannot end in '.'; the final dot terminates the triple.
        while (pos_ > start + 2 && s_[pos_ - 1] == '.') --pos_;
        if (pos_ == start + 2) fail("empty blank node label");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::uint32_t hex(std::size_t digits) {
        if (pos_ + digits > s_.size()) fail("truncated unicode escape");
        std::uint32_t cp = 0;
        for (std::size_t i = 0; i < digits; ++i) {
            char c = s_[pos_ + i];
            cp <<= 4;
            if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
            else fail("invalid hex digit in unicode escape");
        }
        if (cp > 0x10FFFF) fail("code point out of range");
        pos_ += digits;
        return cp;
    }

    ParsedNode literal() {
        ++pos_;  // opening quote
        std::string text;
        for (;;) {
            if (pos_ >= s_.size()) fail("unterminated string literal");
            char c = s_[pos_];
            if (c == '"') break;
            if (c != '\\') {
                text += c;
                ++pos_;
                continue;
            }
            if (++pos_ >= s_.size()) fail("unterminated escape");
            char e = s_[pos_++];
            switch (e) {
                case 't': text += '\t'; break;
                case 'b': text += '\b'; break;
                case 'n': text += '\n'; break;
                case 'r': text += '\r'; break;
                case 'f': text += '\f'; break;
                case '"': text += '"'; break;
                case '\'': text += '\''; break;
                case '\\': text += '\\'; break;
                case 'u': append_utf8(text, hex(4)); break;
                case 'U': append_utf8(text, hex(8)); break;
                default: --pos_; fail("invalid escape sequence");
            }
        }
        ++pos_;  // closing quote
        ParsedNode node{NodeType::Literal, std::move(text), {}};
        if (pos_ < s_.size() && s_[pos_] == '@') {
            std::size_t start = ++pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) {
                ++pos_;
            }
            if (pos_ == start || !std::isalpha(static_cast<unsigned char>(s_[start]))) {
                fail("invalid language tag");
            }
            node.language = std::string(s_.substr(start, pos_ - start));
        } else if (s_.substr(pos_, 2) == "^^") {
            pos_ += 2;
            iri();  // datatype is accepted and ignored
        }
        return node;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

bool is_english(const std::optional<std::string>& language) {
    if (!language) return true;
    return language->size() >= 2 && std::tolower(static_cast<unsigned char>((*language)[0])) == 'e' &&
           std::tolower(static_cast<unsigned char>((*language)[1])) == 'n';
}

class GraphBuilder {
public:
    GraphBuilder(const ParseOptions& options, Vocabulary vocab) : options_(options) {
        result_.vocab = std::move(vocab);
    }

    void line(std::string_view text, std::size_t lineno, std::size_t line_offset) {
        std::size_t first = text.find_first_not_of(" \t");
        if (first == std::string_view::npos || text[first] == '#') return;
        ++result_.stats.lines;
        try {
            LineParser parser(text);
            apply(parser.triple());
        } catch (const LineError& e) {
            reject(lineno, line_offset + e.pos, e.what);
        } catch (const KindConflict& e) {
            reject(lineno, line_offset + first, e.what());
        }
    }

    ParseResult finish() && { return std::move(result_); }

private:
    void reject(std::size_t lineno, std::size_t offset, const std::string& what) {
        if (!options_.lenient) throw MalformedLine(lineno, offset, what);
        ++result_.stats.malformed;
    }

    void check_kind(const std::string& name, TermKind kind) const {
        if (auto id = result_.vocab.find(name); id && result_.vocab.kind(*id) != kind) {
            throw KindConflict("term '" + name + "' is a " + std::string(to_string(result_.vocab.kind(*id))) +
                               ", used here as " + std::string(to_string(kind)));
        }
    }

    void apply(const ParsedTriple& t) {
        Vocabulary& vocab = result_.vocab;
        ParseStats& stats = result_.stats;
        if (t.object.type != NodeType::Literal) {
            check_kind(t.subject.value, TermKind::Entity);
            check_kind(t.predicate, TermKind::Predicate);
            check_kind(t.object.value, TermKind::Entity);
            Edge e;
            e.subject = vocab.intern(t.subject.value, TermKind::Entity);
            e.predicate = vocab.intern(t.predicate, TermKind::Predicate);
            e.object = vocab.intern(t.object.value, TermKind::Entity);
            result_.graph.edges.push_back(e);
            ++stats.edges;
            return;
        }
        if (!is_english(t.object.language)) {
            ++stats.literals_dropped;
            return;
        }
        if (t.predicate == options_.label_property) {
            // Labels may attach to an already-known predicate; otherwise the
            // subject is an entity.
            auto existing = vocab.find(t.subject.value);
            if (existing && vocab.kind(*existing) == TermKind::Word) {
                throw KindConflict("word term '" + t.subject.value + "' cannot carry a label");
            }
            TermId id = existing ? *existing : vocab.intern(t.subject.value, TermKind::Entity);
            if (!vocab.at(id).label) vocab.set_label(id, t.object.value);
            ++stats.labels;
            return;
        }
        if (options_.capture_all_literals || options_.literal_properties.count(t.predicate) > 0) {
            check_kind(t.subject.value, TermKind::Entity);
            TermId id = vocab.intern(t.subject.value, TermKind::Entity);
            result_.graph.literals[id].push_back(Literal{t.predicate, t.object.value, t.object.language});
            ++stats.literals_captured;
            return;
        }
        ++stats.literals_dropped;
    }

    const ParseOptions& options_;
    ParseResult result_;
};

void write_node(std::ostream& out, const std::string& name) {
    if (name.starts_with("_:")) {
        out << name;
    } else {
        out << '<' << name << '>';
    }
}

}  // namespace

ParseResult parse_ntriples(std::istream& in, const ParseOptions& options) {
    return parse_ntriples(in, options, Vocabulary{});
}

ParseResult parse_ntriples(std::istream& in, const ParseOptions& options, Vocabulary vocab) {
    GraphBuilder builder(options, std::move(vocab));
    std::string line;
    std::size_t lineno = 0;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t consumed = line.size() + (in.eof() ? 0 : 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        builder.line(line, lineno, offset);
        offset += consumed;
    }
    return std::move(builder).finish();
}

std::string escape_literal(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    out += "\\u00";
                    out += kHex[(c >> 4) & 0xF];
                    out += kHex[c & 0xF];
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void write_ntriples(std::ostream& out, const KnowledgeGraph& graph, const Vocabulary& vocab,
                    const std::string& label_property) {
    for (const Edge& e : graph.edges) {
        write_node(out, vocab.name(e.subject));
        out << " <" << vocab.name(e.predicate) << "> ";
        write_node(out, vocab.name(e.object));
        out << " .\n";
    }
    const auto& terms = vocab.terms();
    for (const Term& t : terms) {
        if (!t.label) continue;
        write_node(out, t.name);
        out << " <" << label_property << "> \"" << escape_literal(*t.label) << "\" .\n";
    }
    for (const auto& [id, literals] : graph.literals) {
        for (const Literal& lit : literals) {
            write_node(out, vocab.name(id));
            out << " <" << lit.property << "> \"" << escape_literal(lit.text) << '"';
            if (lit.language) out << '@' << *lit.language;
            out << " .\n";
        }
    }
}

std::string entity_label(const Vocabulary& vocab, TermId id) {
    const Term& term = vocab.at(id);
    if (term.label) return *term.label;
    if (term.kind == TermKind::Word) return term.name;
    if (term.name.starts_with("_:")) return {};
    auto cut = term.name.find_last_of("/#");
    std::string local = cut == std::string::npos ? term.name : term.name.substr(cut + 1);
    for (char& c : local) {
        if (c == '_') c = ' ';
    }
    return local;
}

}  // namespace litkg
