#include "kgealign/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "kgealign/errors.hpp"

namespace kgealign {

std::string normalize_label(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

namespace {

struct LiteralValue {
  std::string lexical;
  std::string lang;  // empty when untagged
};

struct RawTriple {
  std::string subject;
  std::string predicate;
  std::string object;  // IRI when !object_is_literal
  bool object_is_literal = false;
  std::string object_lang;
  std::size_t line = 0;
};

bool is_pname_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == '%';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Token-level scanner shared by the N-Triples and Turtle-subset grammars.
class Lexer {
 public:
  struct Token {
    enum class Kind { iri, pname, literal, punct, keyword_a, prefix_directive, eof };
    Kind kind = Kind::eof;
    std::string text;  // expanded IRI / raw pname / lexical form / punct char
    std::string lang;
    std::size_t line = 0;
  };

  explicit Lexer(const std::string& text) : text_(text) {
    // Strip a UTF-8 BOM so the first token is clean.
    if (text_.rfind("\xEF\xBB\xBF", 0) == 0) pos_ = 3;
  }

  Token next() {
    skip_ws_and_comments();
    Token tok;
    tok.line = line_;
    if (pos_ >= text_.size()) return tok;

    const char c = text_[pos_];
    if (c == '<') {
      tok.kind = Token::Kind::iri;
      tok.text = read_iri();
      return tok;
    }
    if (c == '"') {
      read_literal(tok);
      return tok;
    }
    if (c == '\'') throw unsupported_error("single-quoted literal", line_);
    if (c == '[' || c == ']') throw unsupported_error("blank node property list", line_);
    if (c == '(' || c == ')') throw unsupported_error("collection", line_);
    if (c == '_' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ':')
      throw unsupported_error("blank node", line_);
    if (c == '.' || c == ';' || c == ',') {
      ++pos_;
      tok.kind = Token::Kind::punct;
      tok.text = std::string(1, c);
      return tok;
    }
    if (c == '@') {
      ++pos_;
      std::string word = read_bare_word();
      if (word == "prefix") {
        tok.kind = Token::Kind::prefix_directive;
        return tok;
      }
      throw unsupported_error("@" + word + " directive", tok.line);
    }

    std::string word = read_bare_word();
    if (word.empty()) throw syntax_error("unexpected character '" + std::string(1, c) + "'", line_);
    // A lone trailing '.' terminates the statement, not the name.
    if (word.size() > 1 && word.back() == '.') {
      word.pop_back();
      --pos_;
    }
    if (word == "a") {
      tok.kind = Token::Kind::keyword_a;
      return tok;
    }
    if (word == "PREFIX" || word == "BASE")
      throw unsupported_error("SPARQL-style " + word + " directive", tok.line);
    const auto colon = word.find(':');
    if (colon == std::string::npos) {
      if (std::isdigit(static_cast<unsigned char>(word[0])) || word[0] == '+' || word[0] == '-' ||
          word == "true" || word == "false")
        throw unsupported_error("abbreviated literal '" + word + "'", tok.line);
      throw syntax_error("expected IRI, prefixed name, or literal, got '" + word + "'", tok.line);
    }
    tok.kind = Token::Kind::pname;
    tok.text = word;
    return tok;
  }

 private:
  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string read_iri() {
    ++pos_;  // consume '<'
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '>') {
        ++pos_;
        return out;
      }
      if (c == '\n') throw syntax_error("unterminated IRI", line_);
      if (c == '\\') {
        out += read_escape();
        continue;
      }
      out.push_back(c);
      ++pos_;
    }
    throw syntax_error("unterminated IRI", line_);
  }

  void read_literal(Token& tok) {
    if (text_.compare(pos_, 3, "\"\"\"") == 0)
      throw unsupported_error("triple-quoted literal", line_);
    ++pos_;  // consume '"'
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) throw syntax_error("unterminated literal", tok.line);
      const char c = text_[pos_];
      if (c == '"') {
        ++pos_;
        break;
      }
      if (c == '\n') throw syntax_error("unterminated literal", tok.line);
      if (c == '\\') {
        out += read_escape();
        continue;
      }
      out.push_back(c);
      ++pos_;
    }
    tok.kind = Token::Kind::literal;
    tok.text = std::move(out);
    // Optional language tag or datatype annotation; the datatype is parsed
    // and discarded (literals are treated as plain text nodes).
    if (pos_ < text_.size() && text_[pos_] == '@') {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-'))
        tok.lang.push_back(text_[pos_++]);
      if (tok.lang.empty()) throw syntax_error("empty language tag", tok.line);
    } else if (text_.compare(pos_, 2, "^^") == 0) {
      pos_ += 2;
      if (pos_ < text_.size() && text_[pos_] == '<') {
        read_iri();
      } else {
        std::string word = read_bare_word();
        if (word.size() > 1 && word.back() == '.') {
          word.pop_back();
          --pos_;
        }
        if (word.find(':') == std::string::npos)
          throw syntax_error("malformed datatype annotation", tok.line);
      }
    }
  }

  std::string read_escape() {
    ++pos_;  // consume '\\'
    if (pos_ >= text_.size()) throw syntax_error("dangling escape", line_);
    const char c = text_[pos_++];
    switch (c) {
      case 't': return "\t";
      case 'b': return "\b";
      case 'n': return "\n";
      case 'r': return "\r";
      case 'f': return "\f";
      case '"': return "\"";
      case '\'': return "'";
      case '\\': return "\\";
      case 'u':
      case 'U': {
        const std::size_t digits = (c == 'u') ? 4 : 8;
        if (pos_ + digits > text_.size()) throw syntax_error("truncated \\u escape", line_);
        std::uint32_t cp = 0;
        for (std::size_t i = 0; i < digits; ++i) {
          const char h = text_[pos_ + i];
          cp <<= 4;
          if (h >= '0' && h <= '9') cp |= static_cast<std::uint32_t>(h - '0');
          else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
          else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
          else throw syntax_error("bad hex digit in \\u escape", line_);
        }
        pos_ += digits;
        std::string s;
        append_utf8(s, cp);
        return s;
      }
      default:
        throw syntax_error(std::string("unknown escape \\") + c, line_);
    }
  }

  std::string read_bare_word() {
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ':' || is_pname_char(c)) {
        out.push_back(c);
        ++pos_;
      } else {
        break;
      }
    }
    return out;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

class TripleParser {
 public:
  explicit TripleParser(const std::string& text) : lexer_(text) { advance(); }

  std::vector<RawTriple> parse_all() {
    std::vector<RawTriple> triples;
    while (tok_.kind != Lexer::Token::Kind::eof) {
      if (tok_.kind == Lexer::Token::Kind::prefix_directive) {
        parse_prefix();
      } else {
        parse_statement(triples);
      }
    }
    return triples;
  }

 private:
  using Token = Lexer::Token;

  void advance() { tok_ = lexer_.next(); }

  void expect_punct(char c) {
    if (tok_.kind != Token::Kind::punct || tok_.text[0] != c)
      throw syntax_error(std::string("expected '") + c + "'", tok_.line);
    advance();
  }

  void parse_prefix() {
    advance();  // past @prefix
    if (tok_.kind != Token::Kind::pname || tok_.text.back() != ':')
      throw syntax_error("expected prefix name after @prefix", tok_.line);
    const std::string name = tok_.text.substr(0, tok_.text.size() - 1);
    advance();
    if (tok_.kind != Token::Kind::iri)
      throw syntax_error("expected IRI in @prefix directive", tok_.line);
    prefixes_[name] = tok_.text;
    advance();
    expect_punct('.');
  }

  std::string resolve_pname(const Token& tok) {
    const auto colon = tok.text.find(':');
    const std::string prefix = tok.text.substr(0, colon);
    const auto it = prefixes_.find(prefix);
    if (it == prefixes_.end())
      throw syntax_error("undeclared prefix '" + prefix + ":'", tok.line);
    return it->second + tok.text.substr(colon + 1);
  }

  std::string parse_iri_term(const char* role) {
    std::string iri;
    if (tok_.kind == Token::Kind::iri) {
      iri = tok_.text;
    } else if (tok_.kind == Token::Kind::pname) {
      iri = resolve_pname(tok_);
    } else {
      throw syntax_error(std::string("expected IRI for ") + role, tok_.line);
    }
    if (iri.empty()) throw syntax_error(std::string("empty IRI for ") + role, tok_.line);
    advance();
    return iri;
  }

  void parse_statement(std::vector<RawTriple>& out) {
    const std::size_t line = tok_.line;
    const std::string subject = parse_iri_term("subject");
    while (true) {
      std::string predicate;
      if (tok_.kind == Token::Kind::keyword_a) {
        predicate = kRdfType;
        advance();
      } else {
        predicate = parse_iri_term("predicate");
      }
      while (true) {
        RawTriple t;
        t.subject = subject;
        t.predicate = predicate;
        t.line = line;
        if (tok_.kind == Token::Kind::literal) {
          t.object = tok_.text;
          t.object_is_literal = true;
          t.object_lang = tok_.lang;
          advance();
        } else {
          t.object = parse_iri_term("object");
        }
        out.push_back(std::move(t));
        if (tok_.kind == Token::Kind::punct && tok_.text[0] == ',') {
          advance();
          continue;
        }
        break;
      }
      if (tok_.kind == Token::Kind::punct && tok_.text[0] == ';') {
        advance();
        // Turtle permits a trailing ';' right before the final '.'.
        if (tok_.kind == Token::Kind::punct && tok_.text[0] == '.') break;
        continue;
      }
      break;
    }
    expect_punct('.');
  }

  Lexer lexer_;
  Token tok_;
  std::map<std::string, std::string> prefixes_;
};

bool is_english(const std::string& lang) {
  if (lang.size() < 2) return false;
  const char a = static_cast<char>(std::tolower(static_cast<unsigned char>(lang[0])));
  const char b = static_cast<char>(std::tolower(static_cast<unsigned char>(lang[1])));
  if (a != 'e' || b != 'n') return false;
  return lang.size() == 2 || lang[2] == '-';
}

// rdfs:label wins (en, then untagged, then first seen); otherwise the IRI
// fragment, then the last path segment. Candidates that normalize to the
// empty string are skipped.
class LabelResolver {
 public:
  void add_label(const std::string& iri, const LiteralValue& lit) {
    auto& c = candidates_[iri];
    if (normalize_label(lit.lexical).empty()) return;
    if (is_english(lit.lang)) {
      if (c.english.empty()) c.english = lit.lexical;
    } else if (lit.lang.empty()) {
      if (c.untagged.empty()) c.untagged = lit.lexical;
    }
    if (c.any.empty()) c.any = lit.lexical;
  }

  std::string resolve(const std::string& iri) const {
    const auto it = candidates_.find(iri);
    if (it != candidates_.end()) {
      if (!it->second.english.empty()) return it->second.english;
      if (!it->second.untagged.empty()) return it->second.untagged;
      if (!it->second.any.empty()) return it->second.any;
    }
    const auto hash = iri.rfind('#');
    if (hash != std::string::npos) {
      std::string frag = iri.substr(hash + 1);
      if (!normalize_label(frag).empty()) return frag;
    }
    const auto slash = iri.rfind('/');
    if (slash != std::string::npos) {
      std::string seg = iri.substr(slash + 1);
      if (!normalize_label(seg).empty()) return seg;
    }
    return iri;
  }

 private:
  struct Candidates {
    std::string english;
    std::string untagged;
    std::string any;
  };
  std::map<std::string, Candidates> candidates_;
};

std::string literal_marker(const std::string& lexical) { return "\"" + lexical + "\""; }

std::string literal_label(const std::string& lexical) {
  if (normalize_label(lexical).empty()) return "_blank_";
  return lexical;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("read failure: " + path);
  return ss.str();
}

}  // namespace

OntologyDocument parse_ontology_text(const std::string& text, Side side,
                                     const std::string& name) {
  std::vector<RawTriple> raws;
  try {
    TripleParser parser(text);
    raws = parser.parse_all();
  } catch (const Error& e) {
    throw Error(e.kind(), name + ": " + e.what());
  }

  LabelResolver labels;
  for (const auto& t : raws) {
    if (t.predicate == kRdfsLabel && t.object_is_literal)
      labels.add_label(t.subject, {t.object, t.object_lang});
  }

  OntologyDocument doc;
  doc.side = side;
  doc.statements.reserve(raws.size());
  for (const auto& t : raws) {
    Statement st;
    st.subject_iri = t.subject;
    st.subject_label = labels.resolve(t.subject);
    st.predicate_iri = t.predicate;
    st.predicate_label = labels.resolve(t.predicate);
    if (t.object_is_literal) {
      st.object_iri = literal_marker(t.object);
      st.object_label = literal_label(t.object);
      st.object_is_literal = true;
    } else {
      st.object_iri = t.object;
      st.object_label = labels.resolve(t.object);
    }
    doc.statements.push_back(std::move(st));

    if (t.predicate == kRdfType && !t.object_is_literal && t.object == kOwlClass)
      doc.class_entities.insert(t.subject);
    if (t.predicate == kRdfsSubClassOf) {
      doc.class_entities.insert(t.subject);
      if (!t.object_is_literal) doc.class_entities.insert(t.object);
    }
  }
  return doc;
}

OntologyDocument parse_ontology(const std::string& path, Side side) {
  return parse_ontology_text(read_file(path), side, path);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string::npos) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else {
      out.push_back(s[i++]);
      continue;
    }
    i = semi + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

constexpr const char* kTsvHeader = "source_iri\ttarget_iri\trelation\tconfidence";

ReferenceAlignment load_reference_tsv(const std::string& text, const std::string& name) {
  ReferenceAlignment ref;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (row == 1 && line == kTsvHeader) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2)
      throw Error(ErrorKind::syntax, name + ": malformed reference row", row);
    const std::string src = trim(fields[0]);
    const std::string tgt = trim(fields[1]);
    if (src.empty() || tgt.empty())
      throw Error(ErrorKind::syntax, name + ": empty IRI in reference row", row);
    std::string rel = fields.size() >= 3 ? trim(fields[2]) : std::string();
    if (rel.empty()) rel = "=";
    ref.add(src, tgt, rel);
  }
  return ref;
}

// Minimal cell reader for the alignment XML subset: entity1, entity2,
// relation, measure. Anything else in the document is ignored.
ReferenceAlignment load_reference_xml(const std::string& text, const std::string& name) {
  ReferenceAlignment ref;
  std::size_t pos = 0;
  std::size_t cell_index = 0;
  auto attr_resource = [&](const std::string& block, const char* tag,
                           std::size_t row) -> std::string {
    const auto tag_pos = block.find(std::string("<") + tag);
    if (tag_pos == std::string::npos)
      throw Error(ErrorKind::syntax, name + ": cell missing <" + tag + ">", row);
    const auto res_pos = block.find("rdf:resource", tag_pos);
    if (res_pos == std::string::npos)
      throw Error(ErrorKind::syntax, name + ": <" + std::string(tag) + "> missing rdf:resource",
                  row);
    const auto q1 = block.find_first_of("\"'", res_pos);
    if (q1 == std::string::npos)
      throw Error(ErrorKind::syntax, name + ": malformed rdf:resource", row);
    const auto q2 = block.find(block[q1], q1 + 1);
    if (q2 == std::string::npos)
      throw Error(ErrorKind::syntax, name + ": malformed rdf:resource", row);
    return xml_unescape(block.substr(q1 + 1, q2 - q1 - 1));
  };
  auto element_text = [&](const std::string& block, const char* tag) -> std::string {
    const auto open = block.find(std::string("<") + tag);
    if (open == std::string::npos) return {};
    const auto gt = block.find('>', open);
    const auto close = block.find(std::string("</") + tag + ">", open);
    if (gt == std::string::npos || close == std::string::npos || close < gt) return {};
    return xml_unescape(trim(block.substr(gt + 1, close - gt - 1)));
  };
  while (true) {
    const auto open = text.find("<Cell", pos);
    if (open == std::string::npos) break;
    const auto close = text.find("</Cell>", open);
    ++cell_index;
    if (close == std::string::npos)
      throw Error(ErrorKind::syntax, name + ": unterminated <Cell>", cell_index);
    const std::string block = text.substr(open, close - open);
    const std::string e1 = attr_resource(block, "entity1", cell_index);
    const std::string e2 = attr_resource(block, "entity2", cell_index);
    std::string rel = element_text(block, "relation");
    if (rel.empty()) rel = "=";
    if (trim(e1).empty() || trim(e2).empty())
      throw Error(ErrorKind::syntax, name + ": empty IRI in cell", cell_index);
    ref.add(trim(e1), trim(e2), rel);
    pos = close + 7;
  }
  return ref;
}

}  // namespace

ReferenceAlignment load_reference_text(const std::string& text, const std::string& name) {
  const std::string head = trim(text.substr(0, 64));
  if (!head.empty() && head[0] == '<') return load_reference_xml(text, name);
  return load_reference_tsv(text, name);
}

ReferenceAlignment load_reference(const std::string& path) {
  return load_reference_text(read_file(path), path);
}

namespace {

std::string confidence_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string format_alignment(const Alignment& alignment, AlignmentFormat format) {
  std::ostringstream out;
  if (format == AlignmentFormat::tsv) {
    out << kTsvHeader << "\n";
    for (const auto& m : alignment.mappings) {
      out << m.source_iri << "\t" << m.target_iri << "\t" << m.relation << "\t"
          << confidence_str(m.confidence) << "\n";
    }
    return out.str();
  }
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
      << "<rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/alignment\"\n"
      << "         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">\n"
      << "  <Alignment>\n"
      << "    <xml>yes</xml>\n"
      << "    <level>0</level>\n"
      << "    <type>11</type>\n";
  for (const auto& m : alignment.mappings) {
    out << "    <map><Cell>\n"
        << "      <entity1 rdf:resource=\"" << xml_escape(m.source_iri) << "\"/>\n"
        << "      <entity2 rdf:resource=\"" << xml_escape(m.target_iri) << "\"/>\n"
        << "      <relation>" << xml_escape(m.relation) << "</relation>\n"
        << "      <measure>" << confidence_str(m.confidence) << "</measure>\n"
        << "    </Cell></map>\n";
  }
  out << "  </Alignment>\n</rdf:RDF>\n";
  return out.str();
}

void write_alignment(const Alignment& alignment, const std::string& path,
                     AlignmentFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << format_alignment(alignment, format);
  out.flush();
  if (!out) throw io_error("write failure: " + path);
}

}  // namespace kgealign
