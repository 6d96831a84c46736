#include "privcomp/turtle.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "privcomp/error.hpp"
#include "privcomp/schema.hpp"

namespace privcomp {

namespace {

struct PrefixDecl {
  std::string_view name;
  std::string_view ns;
};

constexpr PrefixDecl kPrefixes[] = {
    {"cc", kCcNamespace},
    {"rdf", kRdfNamespace},
    {"xsd", kXsdNamespace},
};

bool is_local_start(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_local_char(char c) {
  return is_local_start(c) || c == '-' || c == '.';
}

bool is_safe_local(std::string_view local) {
  if (local.empty() || !is_local_start(local.front()) || local.back() == '.') return false;
  for (char c : local) {
    if (!is_local_char(c)) return false;
  }
  return true;
}

std::string write_iri(const Iri& iri) {
  const std::string& value = iri.value();
  for (const auto& prefix : kPrefixes) {
    if (value.size() > prefix.ns.size() && value.starts_with(prefix.ns)) {
      std::string_view local = std::string_view(value).substr(prefix.ns.size());
      if (is_safe_local(local)) return std::string(prefix.name) + ":" + std::string(local);
    }
  }
  return "<" + value + ">";
}

std::string escape_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          static constexpr char kHex[] = "0123456789ABCDEF";
          out += "\\u00";
          out += kHex[c >> 4];
          out += kHex[c & 0xF];
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

std::string write_node(const Node& node) {
  if (const auto* iri = std::get_if<Iri>(&node)) return write_iri(*iri);
  const auto& lit = std::get<Literal>(node);
  switch (lit.datatype()) {
    case Datatype::Integer: return lit.lexical();
    case Datatype::AnyUri: return escape_string(lit.lexical()) + "^^xsd:anyURI";
    case Datatype::String: break;
  }
  return escape_string(lit.lexical());
}

// ---------------------------------------------------------------------------

class TurtleReader {
 public:
  explicit TurtleReader(std::string_view text) : text_(text) {}

  Graph run() {
    Graph graph;
    for (;;) {
      skip_ws();
      if (at_end()) break;
      if (peek() == '@') {
        at_prefix();
        continue;
      }
      if (starts_with_keyword("PREFIX")) {
        sparql_prefix();
        continue;
      }
      statement(graph);
    }
    return graph;
  }

 private:
  void statement(Graph& graph) {
    const Iri subject = read_iri_term("subject");
    for (;;) {
      skip_ws();
      const Iri predicate = read_verb();
      for (;;) {
        skip_ws();
        graph.insert(Triple{subject, predicate, read_object()});
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
      skip_ws();
      if (peek() == ';') {
        ++pos_;
        skip_ws();
        // Trailing ';' before '.' is permitted.
        if (peek() == '.') break;
        continue;
      }
      break;
    }
    skip_ws();
    expect('.');
  }

  void at_prefix() {
    if (!text_.substr(pos_).starts_with("@prefix")) fail("unsupported directive");
    pos_ += 7;
    read_prefix_body();
    skip_ws();
    expect('.');
  }

  void sparql_prefix() {
    pos_ += 6;
    read_prefix_body();
  }

  void read_prefix_body() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && peek() != ':') {
      const char c = peek();
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
        fail("invalid prefix name");
      }
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    expect(':');
    skip_ws();
    if (peek() != '<') fail("expected <namespace> in prefix declaration");
    prefixes_[name] = read_iriref();
  }

  Iri read_verb() {
    if (peek() == 'a') {
      const char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : ' ';
      if (std::isspace(static_cast<unsigned char>(next)) || next == '<' || next == '"') {
        ++pos_;
        return vocab().type;
      }
    }
    return read_iri_term("predicate");
  }

  Iri read_iri_term(const char* what) {
    skip_ws();
    if (at_end()) fail(std::string("expected ") + what);
    if (peek() == '<') return Iri(read_iriref());
    if (peek() == '_' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ':') {
      fail("blank nodes are not supported");
    }
    if (peek() == '[' || peek() == '(') fail("blank nodes and collections are not supported");
    return read_prefixed_name();
  }

  Node read_object() {
    if (at_end()) fail("expected object");
    const char c = peek();
    if (c == '"') return read_literal();
    if (c == '\'') fail("single-quoted strings are not supported");
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) return read_integer();
    return read_iri_term("object");
  }

  Literal read_integer() {
    const std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    const std::size_t digits = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == digits) fail("malformed number");
    if (!at_end() && (peek() == 'e' || peek() == 'E' ||
                      (peek() == '.' && pos_ + 1 < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))))) {
      fail("only integer numerals are supported");
    }
    try {
      return Literal(std::string(text_.substr(start, pos_ - start)), Datatype::Integer);
    } catch (const Error&) {
      fail("integer out of range");
    }
  }

  Literal read_literal() {
    if (text_.substr(pos_).starts_with("\"\"\"")) fail("long strings are not supported");
    ++pos_;
    std::string value;
    for (;;) {
      if (at_end()) fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\n' || c == '\r') fail("newline inside string");
      if (c != '\\') {
        value += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': value += '\n'; break;
        case 'r': value += '\r'; break;
        case 't': value += '\t'; break;
        case 'b': value += '\b'; break;
        case 'f': value += '\f'; break;
        case '"': value += '"'; break;
        case '\'': value += '\''; break;
        case '\\': value += '\\'; break;
        case 'u': append_utf8(value, read_hex(4)); break;
        case 'U': append_utf8(value, read_hex(8)); break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    if (!at_end() && peek() == '@') fail("language tags are not supported");
    if (text_.substr(pos_).starts_with("^^")) {
      pos_ += 2;
      const Iri datatype = read_iri_term("datatype");
      const std::string xsd(kXsdNamespace);
      if (datatype.value() == xsd + "string") return Literal::string(std::move(value));
      if (datatype.value() == xsd + "anyURI") return Literal::any_uri(std::move(value));
      if (datatype.value() == xsd + "integer") {
        try {
          return Literal(std::move(value), Datatype::Integer);
        } catch (const Error&) {
          fail("invalid xsd:integer lexical form");
        }
      }
      fail("unsupported datatype <" + datatype.value() + ">");
    }
    return Literal::string(std::move(value));
  }

  std::uint32_t read_hex(int digits) {
    std::uint32_t value = 0;
    for (int i = 0; i < digits; ++i) {
      if (at_end()) fail("truncated unicode escape");
      const char c = text_[pos_++];
      value <<= 4;
      if (c >= '0' && c <= '9') value |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value |= static_cast<std::uint32_t>(c - 'A' + 10);
      else fail("invalid hex digit in unicode escape");
    }
    if (value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) fail("invalid code point");
    return value;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
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

  std::string read_iriref() {
    ++pos_;  // '<'
    const std::size_t start = pos_;
    while (!at_end() && peek() != '>') {
      if (peek() == '\n') fail("newline inside IRI");
      ++pos_;
    }
    if (at_end()) fail("unterminated IRI");
    std::string value(text_.substr(start, pos_ - start));
    ++pos_;
    if (!is_valid_iri(value)) fail("invalid IRI <" + value + ">");
    return value;
  }

  Iri read_prefixed_name() {
    const std::size_t start = pos_;
    while (!at_end() && peek() != ':') {
      const char c = peek();
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
        fail("unexpected character '" + std::string(1, c) + "'");
      }
      ++pos_;
    }
    if (at_end()) fail("expected prefixed name");
    const std::string prefix(text_.substr(start, pos_ - start));
    ++pos_;  // ':'
    const std::size_t local_start = pos_;
    while (!at_end() && (is_local_char(peek()) || peek() == ':')) ++pos_;
    // A trailing '.' terminates the statement rather than the name.
    while (pos_ > local_start && text_[pos_ - 1] == '.') --pos_;
    const std::string local(text_.substr(local_start, pos_ - local_start));
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + ":'");
    const std::string value = it->second + local;
    if (!is_valid_iri(value)) fail("invalid IRI from prefixed name");
    return Iri(value);
  }

  void skip_ws() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool starts_with_keyword(std::string_view kw) const {
    if (!text_.substr(pos_).starts_with(kw)) return false;
    const std::size_t after = pos_ + kw.size();
    return after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]));
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::size_t line() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') ++n;
    }
    return n;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::TurtleSyntax, message, line());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace

std::string serialize_turtle(const Graph& graph) {
  std::ostringstream out;
  for (const auto& prefix : kPrefixes) {
    out << "@prefix " << prefix.name << ": <" << prefix.ns << "> .\n";
  }
  out << '\n';
  for (const Triple& t : graph) {
    out << write_iri(t.subject) << ' ' << write_iri(t.predicate) << ' ' << write_node(t.object)
        << " .\n";
  }
  return out.str();
}

Graph parse_turtle(std::string_view text) { return TurtleReader(text).run(); }

}  // namespace privcomp
