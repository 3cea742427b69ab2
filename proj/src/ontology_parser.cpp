// Recursive-descent parser for ELF, one statement per line.

#include <map>
#include <string>
#include <string_view>

#include "ozsl/error.hpp"
#include "ozsl/ontology.hpp"

namespace ozsl {
namespace {

enum class Tok { Ident, LParen, RParen, String, Arrow, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t column;  // 1-based
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident:
      return "identifier";
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::String:
      return "quoted string";
    case Tok::Arrow:
      return "'->'";
    case Tok::End:
      return "end of line";
  }
  return "?";
}

enum class Sort { Concept, Relation, Individual };

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Concept:
      return "concept";
    case Sort::Relation:
      return "relation";
    case Sort::Individual:
      return "individual";
  }
  return "?";
}

class LineParser {
public:
  LineParser(std::string_view line, std::size_t line_no, Ontology& out,
             std::map<std::string, Sort, std::less<>>& names)
      : line_(line), line_no_(line_no), out_(out), names_(names) {
    tokenize();
  }

  void parse_statement() {
    if (peek().type == Tok::End) return;  // blank or comment-only line
    Token head = expect(Tok::Ident, "statement keyword");
    expect(Tok::LParen, "'('");
    const std::string& kw = head.text;
    if (kw == "Concept") {
      declare(Sort::Concept);
    } else if (kw == "Relation") {
      declare(Sort::Relation);
    } else if (kw == "Individual") {
      declare(Sort::Individual);
    } else if (kw == "SubClassOf") {
      Expr sub = expr();
      Expr sup = expr();
      out_.axioms.emplace_back(SubClassOf{sub, sup});
    } else if (kw == "EquivalentTo") {
      Expr l = expr();
      Expr r = expr();
      out_.axioms.emplace_back(EquivalentTo{l, r});
    } else if (kw == "SubRelationOf") {
      std::string a = name(Sort::Relation);
      std::string b = name(Sort::Relation);
      out_.axioms.emplace_back(SubRelationOf{a, b});
    } else if (kw == "RelationChain") {
      RelationChain rc;
      rc.chain.push_back(name(Sort::Relation));
      while (peek().type == Tok::Ident) rc.chain.push_back(name(Sort::Relation));
      expect(Tok::Arrow, "'->' or relation name");
      rc.sup = name(Sort::Relation);
      out_.axioms.emplace_back(std::move(rc));
    } else if (kw == "Instance") {
      std::string ind = name(Sort::Individual);
      Expr c = expr();
      out_.axioms.emplace_back(Instance{ind, c});
    } else if (kw == "RelationInstance") {
      std::string r = name(Sort::Relation);
      std::string s = name(Sort::Individual);
      std::string o = name(Sort::Individual);
      out_.axioms.emplace_back(RelationInstance{r, s, o});
    } else if (kw == "Label" || kw == "Comment") {
      std::string entity = any_name();
      Token text = expect(Tok::String, "quoted string");
      if (text.text.empty()) fail(ParseError::Reason::Syntax, text.column, "empty annotation text");
      out_.axioms.emplace_back(Annotation{
          entity, kw == "Label" ? AnnotationKind::Label : AnnotationKind::Comment, text.text});
    } else {
      fail(ParseError::Reason::Syntax, head.column, "unknown statement '" + kw + "'");
    }
    expect(Tok::RParen, "')'");
    expect(Tok::End, "end of line");
  }

private:
  [[noreturn]] void fail(ParseError::Reason reason, std::size_t column, const std::string& msg) const {
    throw ParseError(reason, line_no_, column, msg);
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < line_.size()) {
      char c = line_[i];
      std::size_t col = i + 1;
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
      } else if (c == '#') {
        break;
      } else if (c == '(') {
        toks_.push_back({Tok::LParen, "(", col});
        ++i;
      } else if (c == ')') {
        toks_.push_back({Tok::RParen, ")", col});
        ++i;
      } else if (c == '-' && i + 1 < line_.size() && line_[i + 1] == '>') {
        toks_.push_back({Tok::Arrow, "->", col});
        i += 2;
      } else if (c == '"') {
        std::string text;
        ++i;
        bool closed = false;
        while (i < line_.size()) {
          char d = line_[i];
          if (d == '"') {
            closed = true;
            ++i;
            break;
          }
          if (d == '\\') {
            if (i + 1 >= line_.size()) break;
            char e = line_[i + 1];
            if (e == 'n') {
              text += '\n';
            } else if (e == '"' || e == '\\') {
              text += e;
            } else {
              fail(ParseError::Reason::Syntax, i + 1, "invalid escape sequence");
            }
            i += 2;
            continue;
          }
          text += d;
          ++i;
        }
        if (!closed) fail(ParseError::Reason::Syntax, col, "unterminated string");
        toks_.push_back({Tok::String, std::move(text), col});
      } else if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_') {
        std::size_t j = i + 1;
        while (j < line_.size()) {
          char d = line_[j];
          if ((d >= 'A' && d <= 'Z') || (d >= 'a' && d <= 'z') || (d >= '0' && d <= '9') || d == '_')
            ++j;
          else
            break;
        }
        toks_.push_back({Tok::Ident, std::string(line_.substr(i, j - i)), col});
        i = j;
      } else {
        fail(ParseError::Reason::Syntax, col, std::string("unexpected character '") + c + "'");
      }
    }
    std::size_t end_col = std::min(line_.size(), line_.find('#') == std::string_view::npos
                                                     ? line_.size()
                                                     : line_.find('#'));
    // End-of-line errors point at the last character so positions stay inside the input.
    toks_.push_back({Tok::End, "", end_col == 0 ? 1 : end_col});
  }

  const Token& peek() const { return toks_[pos_]; }

  Token expect(Tok t, const std::string& what) {
    const Token& tok = peek();
    if (tok.type != t) {
      std::string found = tok.type == Tok::End ? "end of line" : "'" + tok.text + "'";
      if (tok.type == Tok::String) found = std::string(describe(tok.type));
      fail(ParseError::Reason::Syntax, tok.column, "expected " + what + ", found " + found);
    }
    return toks_[pos_++];
  }

  Token ident_token(const char* what) {
    Token t = expect(Tok::Ident, what);
    if (is_reserved_word(t.text))
      fail(ParseError::Reason::Syntax, t.column, "expected " + std::string(what) + ", found keyword '" + t.text + "'");
    return t;
  }

  void declare(Sort s) {
    Token t = ident_token(sort_name(s));
    auto it = names_.find(t.text);
    if (it != names_.end()) {
      if (it->second == s)
        fail(ParseError::Reason::DuplicateDeclaration, t.column,
             "duplicate declaration of " + std::string(sort_name(s)) + " '" + t.text + "'");
      fail(ParseError::Reason::SignatureOverlap, t.column,
           "'" + t.text + "' already declared as " + sort_name(it->second));
    }
    names_.emplace(t.text, s);
    switch (s) {
      case Sort::Concept:
        out_.concepts.push_back(t.text);
        break;
      case Sort::Relation:
        out_.relations.push_back(t.text);
        break;
      case Sort::Individual:
        out_.individuals.push_back(t.text);
        break;
    }
  }

  std::string name(Sort s) {
    Token t = ident_token(sort_name(s));
    resolve(t, s);
    return t.text;
  }

  std::string any_name() {
    Token t = ident_token("entity name");
    if (names_.find(t.text) == names_.end())
      fail(ParseError::Reason::UndeclaredName, t.column, "undeclared name '" + t.text + "'");
    return t.text;
  }

  void resolve(const Token& t, Sort s) const {
    auto it = names_.find(t.text);
    if (it == names_.end())
      fail(ParseError::Reason::UndeclaredName, t.column,
           "undeclared " + std::string(sort_name(s)) + " '" + t.text + "'");
    if (it->second != s)
      fail(ParseError::Reason::UndeclaredName, t.column,
           "'" + t.text + "' is a " + sort_name(it->second) + ", expected " + sort_name(s));
  }

  Expr expr() {
    const Token& t = peek();
    if (t.type != Tok::Ident) {
      expect(Tok::Ident, "concept expression");
    }
    Token head = toks_[pos_++];
    if (head.text == "Top") return Expr::top();
    if (head.text == "Bottom") return Expr::bottom();
    if (head.text == "And") {
      expect(Tok::LParen, "'('");
      std::vector<Expr> parts;
      parts.push_back(expr());
      parts.push_back(expr());
      while (peek().type != Tok::RParen) parts.push_back(expr());
      expect(Tok::RParen, "')'");
      return Expr::conjunction_of(parts);
    }
    if (head.text == "Some") {
      expect(Tok::LParen, "'('");
      std::string r = name(Sort::Relation);
      Expr filler = expr();
      expect(Tok::RParen, "')'");
      return Expr::existential(std::move(r), std::move(filler));
    }
    if (head.text == "One") {
      expect(Tok::LParen, "'('");
      std::string a = name(Sort::Individual);
      expect(Tok::RParen, "')'");
      return Expr::nominal(std::move(a));
    }
    resolve(head, Sort::Concept);
    return Expr::atomic(head.text);
  }

  std::string_view line_;
  std::size_t line_no_;
  Ontology& out_;
  std::map<std::string, Sort, std::less<>>& names_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Ontology parse_ontology(std::string_view text) {
  Ontology out;
  std::map<std::string, Sort, std::less<>> names;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    LineParser(text.substr(start, end - start), line_no, out, names).parse_statement();
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace ozsl
