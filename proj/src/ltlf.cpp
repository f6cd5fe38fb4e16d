#include "lisaforge/ltlf.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace lisaforge {

// ---------------------------------------------------------------------------
// Arena and handles
// ---------------------------------------------------------------------------

std::size_t FormulaArena::NodeKeyHash::operator()(const NodeKey& k) const {
  std::size_t h = std::hash<std::uint32_t>{}(
      (static_cast<std::uint32_t>(k.op) << 24) ^ k.atom);
  for (std::uint32_t c : k.children) {
    h ^= std::hash<std::uint32_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
  }
  return h;
}

FormulaArena::FormulaArena() {
  // Slots 0 and 1 are pinned to the constants.
  nodes_.push_back(Node{Op::False, 0, 0, 0});
  nodes_.push_back(Node{Op::True, 0, 0, 0});
}

std::uint32_t FormulaArena::intern(Op op, std::uint32_t atom,
                                   const std::vector<std::uint32_t>& children) {
  NodeKey key{op, atom, children};
  auto it = intern_table_.find(key);
  if (it != intern_table_.end()) return it->second;
  Node node;
  node.op = op;
  node.atom = atom;
  node.first_child = static_cast<std::uint32_t>(child_pool_.size());
  node.num_children = static_cast<std::uint32_t>(children.size());
  child_pool_.insert(child_pool_.end(), children.begin(), children.end());
  std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(node);
  intern_table_.emplace(std::move(key), id);
  return id;
}

Formula FormulaArena::constant(bool value) { return wrap(value ? 1u : 0u); }

namespace {

bool valid_atom_name(std::string_view name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
    return false;
  for (char c : name.substr(1)) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  }
  static const std::unordered_set<std::string_view> reserved = {
      "true", "false", "X", "U", "R", "F", "G"};
  return !reserved.count(name);
}

}  // namespace

Formula FormulaArena::atom(std::string_view name) {
  if (!valid_atom_name(name)) {
    throw std::invalid_argument("invalid atom name: '" + std::string(name) +
                                "'");
  }
  auto it = atom_ids_.find(std::string(name));
  std::uint32_t atom_idx;
  if (it != atom_ids_.end()) {
    atom_idx = it->second;
  } else {
    atom_idx = static_cast<std::uint32_t>(atom_names_.size());
    atom_names_.emplace_back(name);
    atom_ids_.emplace(atom_names_.back(), atom_idx);
  }
  return wrap(intern(Op::Atom, atom_idx, {}));
}

Formula FormulaArena::make_not(Formula f) {
  assert(f.arena() == this);
  switch (f.op()) {
    case Op::True:
      return constant(false);
    case Op::False:
      return constant(true);
    case Op::Not:
      return f.child(0);
    default:
      return wrap(intern(Op::Not, 0, {f.id()}));
  }
}

Formula FormulaArena::make_and(std::vector<Formula> children) {
  std::vector<std::uint32_t> flat;
  std::unordered_set<std::uint32_t> seen;
  for (const Formula& c : children) {
    assert(c.arena() == this);
    if (c.op() == Op::False) return constant(false);
    if (c.op() == Op::True) continue;
    if (c.op() == Op::And) {
      // Nested And nodes are already flat, one level suffices.
      for (Formula g : c.children()) {
        if (seen.insert(g.id()).second) flat.push_back(g.id());
      }
    } else if (seen.insert(c.id()).second) {
      flat.push_back(c.id());
    }
  }
  if (flat.empty()) return constant(true);
  if (flat.size() == 1) return wrap(flat[0]);
  return wrap(intern(Op::And, 0, flat));
}

Formula FormulaArena::make_or(std::vector<Formula> children) {
  std::vector<std::uint32_t> flat;
  std::unordered_set<std::uint32_t> seen;
  for (const Formula& c : children) {
    assert(c.arena() == this);
    if (c.op() == Op::True) return constant(true);
    if (c.op() == Op::False) continue;
    if (c.op() == Op::Or) {
      for (Formula g : c.children()) {
        if (seen.insert(g.id()).second) flat.push_back(g.id());
      }
    } else if (seen.insert(c.id()).second) {
      flat.push_back(c.id());
    }
  }
  if (flat.empty()) return constant(false);
  if (flat.size() == 1) return wrap(flat[0]);
  return wrap(intern(Op::Or, 0, flat));
}

Formula FormulaArena::make_next(Formula f) {
  assert(f.arena() == this);
  // X false can never hold; X true is *not* true (it needs a next position).
  if (f.op() == Op::False) return constant(false);
  return wrap(intern(Op::Next, 0, {f.id()}));
}

Formula FormulaArena::make_until(Formula lhs, Formula rhs) {
  assert(lhs.arena() == this && rhs.arena() == this);
  if (rhs.op() == Op::True) return constant(true);
  if (rhs.op() == Op::False) return constant(false);
  if (lhs.op() == Op::False) return rhs;
  return wrap(intern(Op::Until, 0, {lhs.id(), rhs.id()}));
}

Formula FormulaArena::make_release(Formula lhs, Formula rhs) {
  assert(lhs.arena() == this && rhs.arena() == this);
  if (rhs.op() == Op::True) return constant(true);
  if (rhs.op() == Op::False) return constant(false);
  if (lhs.op() == Op::True) return rhs;
  return wrap(intern(Op::Release, 0, {lhs.id(), rhs.id()}));
}

Formula FormulaArena::make_finally(Formula f) {
  assert(f.arena() == this);
  if (f.is_constant()) return f;
  return wrap(intern(Op::Finally, 0, {f.id()}));
}

Formula FormulaArena::make_globally(Formula f) {
  assert(f.arena() == this);
  if (f.is_constant()) return f;
  return wrap(intern(Op::Globally, 0, {f.id()}));
}

Formula FormulaArena::empty_trace_marker() {
  return wrap(intern(Op::Globally, 0, {constant(false).id()}));
}

Op Formula::op() const { return arena_->nodes_[id_].op; }

const std::string& Formula::name() const {
  const auto& node = arena_->nodes_[id_];
  if (node.op != Op::Atom)
    throw std::logic_error("name() called on a non-atom node");
  return arena_->atom_names_[node.atom];
}

std::size_t Formula::num_children() const {
  return arena_->nodes_[id_].num_children;
}

Formula Formula::child(std::size_t i) const {
  const auto& node = arena_->nodes_[id_];
  assert(i < node.num_children);
  return Formula(arena_, arena_->child_pool_[node.first_child + i]);
}

std::vector<Formula> Formula::children() const {
  std::vector<Formula> out;
  out.reserve(num_children());
  for (std::size_t i = 0; i < num_children(); ++i) out.push_back(child(i));
  return out;
}

bool Formula::is_temporal() const {
  switch (op()) {
    case Op::Next:
    case Op::Until:
    case Op::Release:
    case Op::Finally:
    case Op::Globally:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  LParen,
  RParen,
  Not,
  And,
  Or,
  Implies,
  Iff,
  NextOp,
  UntilOp,
  ReleaseOp,
  FinallyOp,
  GloballyOp,
  TrueLit,
  FalseLit,
  Ident,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {  // line comment
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    auto push = [&](Tok kind, std::size_t len) {
      out.push_back(Token{kind, std::string(text.substr(i, len)), tl, tc});
      advance(len);
    };
    if (c == '(') {
      push(Tok::LParen, 1);
    } else if (c == ')') {
      push(Tok::RParen, 1);
    } else if (c == '!') {
      push(Tok::Not, 1);
    } else if (c == '&') {
      push(Tok::And, 1);
    } else if (c == '|') {
      push(Tok::Or, 1);
    } else if (c == '-') {
      if (i + 1 < text.size() && text[i + 1] == '>') {
        push(Tok::Implies, 2);
      } else {
        throw ParseError("unknown token '-'", tl, tc);
      }
    } else if (c == '<') {
      if (i + 2 < text.size() && text[i + 1] == '-' && text[i + 2] == '>') {
        push(Tok::Iff, 3);
      } else {
        throw ParseError("unknown token '<'", tl, tc);
      }
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t len = 1;
      while (i + len < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i + len])) ||
              text[i + len] == '_')) {
        ++len;
      }
      std::string_view word = text.substr(i, len);
      if (word == "true") {
        push(Tok::TrueLit, len);
      } else if (word == "false") {
        push(Tok::FalseLit, len);
      } else if (word == "X") {
        push(Tok::NextOp, len);
      } else if (word == "U") {
        push(Tok::UntilOp, len);
      } else if (word == "R") {
        push(Tok::ReleaseOp, len);
      } else if (word == "F") {
        push(Tok::FinallyOp, len);
      } else if (word == "G") {
        push(Tok::GloballyOp, len);
      } else {
        push(Tok::Ident, len);
      }
    } else {
      throw ParseError(std::string("unknown token '") + c + "'", tl, tc);
    }
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, FormulaArena& arena)
      : tokens_(std::move(tokens)), arena_(arena) {}

  Formula run() {
    Formula f = parse_iff();
    const Token& t = peek();
    if (t.kind == Tok::RParen) {
      throw ParseError("unbalanced parentheses", t.line, t.column);
    }
    if (t.kind != Tok::End) {
      throw ParseError("syntax error: unexpected '" + t.text + "'", t.line,
                       t.column);
    }
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  Token take() { return tokens_[pos_++]; }

  [[noreturn]] void fail_expected(const char* what) {
    const Token& t = peek();
    if (t.kind == Tok::End) {
      throw ParseError(std::string("syntax error: expected ") + what +
                           " but input ended",
                       t.line, t.column);
    }
    throw ParseError(std::string("syntax error: expected ") + what +
                         " before '" + t.text + "'",
                     t.line, t.column);
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    while (peek().kind == Tok::Iff) {
      take();
      Formula rhs = parse_implies();
      lhs = arena_.make_iff(lhs, rhs);
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (peek().kind == Tok::Implies) {
      take();
      Formula rhs = parse_implies();  // right associative
      return arena_.make_implies(lhs, rhs);
    }
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (peek().kind == Tok::Or) {
      take();
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? parts[0] : arena_.make_or(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_until()};
    while (peek().kind == Tok::And) {
      take();
      parts.push_back(parse_until());
    }
    return parts.size() == 1 ? parts[0] : arena_.make_and(std::move(parts));
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (peek().kind == Tok::UntilOp) {
      take();
      Formula rhs = parse_until();  // right associative
      return arena_.make_until(lhs, rhs);
    }
    if (peek().kind == Tok::ReleaseOp) {
      const Token& t = peek();
      throw ParseError("unknown token 'R' (release has no surface form)",
                       t.line, t.column);
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not:
        take();
        return arena_.make_not(parse_unary());
      case Tok::NextOp:
        take();
        return arena_.make_next(parse_unary());
      case Tok::FinallyOp:
        take();
        return arena_.make_finally(parse_unary());
      case Tok::GloballyOp:
        take();
        return arena_.make_globally(parse_unary());
      default:
        return parse_primary();
    }
  }

  Formula parse_primary() {
    Token t = peek();
    switch (t.kind) {
      case Tok::TrueLit:
        take();
        return arena_.constant(true);
      case Tok::FalseLit:
        take();
        return arena_.constant(false);
      case Tok::Ident:
        take();
        return arena_.atom(t.text);
      case Tok::LParen: {
        take();
        Formula f = parse_iff();
        if (peek().kind != Tok::RParen) {
          throw ParseError("unbalanced parentheses", peek().line,
                           peek().column);
        }
        take();
        return f;
      }
      default:
        fail_expected("a formula");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  FormulaArena& arena_;
};

}  // namespace

Formula parse(std::string_view text, FormulaArena& arena) {
  return Parser(tokenize(text), arena).run();
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Binding strength used only for parenthesis placement.
int print_prec(Op op) {
  switch (op) {
    case Op::Or:
      return 1;
    case Op::And:
      return 2;
    case Op::Until:
    case Op::Release:
      return 3;
    case Op::Not:
    case Op::Next:
    case Op::Finally:
    case Op::Globally:
      return 4;
    default:
      return 5;
  }
}

void print_rec(std::ostream& os, Formula f, int min_prec) {
  int prec = print_prec(f.op());
  bool parens = prec < min_prec;
  if (parens) os << '(';
  switch (f.op()) {
    case Op::True:
      os << "true";
      break;
    case Op::False:
      os << "false";
      break;
    case Op::Atom:
      os << f.name();
      break;
    case Op::Not:
      os << '!';
      print_rec(os, f.child(0), 4);
      break;
    case Op::Next:
      os << "X ";
      print_rec(os, f.child(0), 4);
      break;
    case Op::Finally:
      os << "F ";
      print_rec(os, f.child(0), 4);
      break;
    case Op::Globally:
      os << "G ";
      print_rec(os, f.child(0), 4);
      break;
    case Op::Until:
    case Op::Release:
      print_rec(os, f.child(0), 4);
      os << (f.op() == Op::Until ? " U " : " R ");
      print_rec(os, f.child(1), 3);
      break;
    case Op::And: {
      bool first = true;
      for (Formula c : f.children()) {
        if (!first) os << " & ";
        first = false;
        print_rec(os, c, 3);
      }
      break;
    }
    case Op::Or: {
      bool first = true;
      for (Formula c : f.children()) {
        if (!first) os << " | ";
        first = false;
        print_rec(os, c, 2);
      }
      break;
    }
  }
  if (parens) os << ')';
}

}  // namespace

std::string to_string(Formula f) {
  std::ostringstream os;
  print_rec(os, f, 0);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, Formula f) {
  print_rec(os, f, 0);
  return os;
}

// ---------------------------------------------------------------------------
// Negation normal form
// ---------------------------------------------------------------------------

namespace {

Formula nnf_rec(Formula f, bool negated, FormulaArena& a) {
  switch (f.op()) {
    case Op::True:
      return a.constant(!negated);
    case Op::False:
      return a.constant(negated);
    case Op::Atom:
      return negated ? a.make_not(f) : f;
    case Op::Not:
      return nnf_rec(f.child(0), !negated, a);
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.num_children());
      for (Formula c : f.children()) kids.push_back(nnf_rec(c, negated, a));
      bool as_and = (f.op() == Op::And) != negated;
      return as_and ? a.make_and(std::move(kids)) : a.make_or(std::move(kids));
    }
    case Op::Next: {
      // The dual of strong Next stays as a negated Next node; the child is
      // still normalised positively underneath it.
      Formula inner = nnf_rec(f.child(0), false, a);
      Formula next = a.make_next(inner);
      return negated ? a.make_not(next) : next;
    }
    case Op::Until: {
      Formula l = nnf_rec(f.child(0), negated, a);
      Formula r = nnf_rec(f.child(1), negated, a);
      return negated ? a.make_release(l, r) : a.make_until(l, r);
    }
    case Op::Release: {
      Formula l = nnf_rec(f.child(0), negated, a);
      Formula r = nnf_rec(f.child(1), negated, a);
      return negated ? a.make_until(l, r) : a.make_release(l, r);
    }
    case Op::Finally: {
      Formula c = nnf_rec(f.child(0), negated, a);
      return negated ? a.make_globally(c) : a.make_finally(c);
    }
    case Op::Globally: {
      Formula c = nnf_rec(f.child(0), negated, a);
      return negated ? a.make_finally(c) : a.make_globally(c);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Formula to_nnf(Formula f) { return nnf_rec(f, false, *f.arena()); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

// Post-order list of distinct subformula ids (children before parents).
void closure_rec(Formula f, std::unordered_set<std::uint32_t>& seen,
                 std::vector<Formula>& out) {
  if (!seen.insert(f.id()).second) return;
  for (std::size_t i = 0; i < f.num_children(); ++i) {
    closure_rec(f.child(i), seen, out);
  }
  out.push_back(f);
}

}  // namespace

bool evaluate(const Trace& trace, Formula f) {
  if (trace.empty()) {
    throw std::invalid_argument("evaluate: trace must be nonempty");
  }
  std::unordered_set<std::uint32_t> seen;
  std::vector<Formula> closure;
  closure_rec(f, seen, closure);
  std::unordered_map<std::uint32_t, std::size_t> index;
  for (std::size_t i = 0; i < closure.size(); ++i) index[closure[i].id()] = i;

  std::vector<char> cur(closure.size()), nxt(closure.size());
  const std::size_t n = trace.size();
  for (std::size_t rev = 0; rev < n; ++rev) {
    std::size_t pos = n - 1 - rev;
    bool has_next = pos + 1 < n;
    const Letter& sigma = trace[pos];
    for (std::size_t i = 0; i < closure.size(); ++i) {
      Formula g = closure[i];
      bool v = false;
      switch (g.op()) {
        case Op::True:
          v = true;
          break;
        case Op::False:
          v = false;
          break;
        case Op::Atom:
          v = sigma.count(g.name()) > 0;
          break;
        case Op::Not:
          v = !cur[index[g.child(0).id()]];
          break;
        case Op::And: {
          v = true;
          for (Formula c : g.children()) v = v && cur[index[c.id()]];
          break;
        }
        case Op::Or: {
          v = false;
          for (Formula c : g.children()) v = v || cur[index[c.id()]];
          break;
        }
        case Op::Next:
          v = has_next && nxt[index[g.child(0).id()]];
          break;
        case Op::Until:
          v = cur[index[g.child(1).id()]] ||
              (cur[index[g.child(0).id()]] && has_next && nxt[i]);
          break;
        case Op::Release:
          v = cur[index[g.child(1).id()]] &&
              (cur[index[g.child(0).id()]] || !has_next || nxt[i]);
          break;
        case Op::Finally:
          v = cur[index[g.child(0).id()]] || (has_next && nxt[i]);
          break;
        case Op::Globally:
          v = cur[index[g.child(0).id()]] && (!has_next || nxt[i]);
          break;
      }
      cur[i] = v;
    }
    nxt = cur;
  }
  return cur[index[f.id()]] != 0;
}

// ---------------------------------------------------------------------------
// Structure helpers
// ---------------------------------------------------------------------------

std::vector<Formula> split_conjuncts(Formula f) {
  if (f.op() == Op::And) return f.children();
  return {f};
}

namespace {

void props_rec(Formula f, std::unordered_set<std::uint32_t>& seen,
               std::set<std::string>& out) {
  if (!seen.insert(f.id()).second) return;
  if (f.op() == Op::Atom) {
    out.insert(f.name());
    return;
  }
  for (std::size_t i = 0; i < f.num_children(); ++i) {
    props_rec(f.child(i), seen, out);
  }
}

}  // namespace

std::set<std::string> propositions(Formula f) {
  std::unordered_set<std::uint32_t> seen;
  std::set<std::string> out;
  props_rec(f, seen, out);
  return out;
}

// ---------------------------------------------------------------------------
// Partitions and files
// ---------------------------------------------------------------------------

bool Partition::is_input(std::string_view name) const {
  return std::find(inputs.begin(), inputs.end(), name) != inputs.end();
}

bool Partition::is_output(std::string_view name) const {
  return std::find(outputs.begin(), outputs.end(), name) != outputs.end();
}

void Partition::validate() const {
  for (const std::string& name : inputs) {
    if (is_output(name)) {
      throw std::invalid_argument("partition: '" + name +
                                  "' appears as both input and output");
    }
  }
}

namespace {

std::vector<std::string> split_names(std::string_view rest, int line_no) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(rest)};
  std::string word;
  while (ss >> word) {
    if (!valid_atom_name(word)) {
      throw std::invalid_argument("partition line " + std::to_string(line_no) +
                                  ": invalid name '" + word + "'");
    }
    if (std::find(out.begin(), out.end(), word) == out.end()) {
      out.push_back(word);
    }
  }
  return out;
}

}  // namespace

Partition parse_partition(std::string_view text) {
  Partition p;
  bool saw_inputs = false, saw_outputs = false;
  std::istringstream ss{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = raw;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line[0])))
      line.remove_prefix(1);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind(".inputs:", 0) == 0) {
      p.inputs = split_names(line.substr(8), line_no);
      saw_inputs = true;
    } else if (line.rfind(".outputs:", 0) == 0) {
      p.outputs = split_names(line.substr(9), line_no);
      saw_outputs = true;
    } else {
      throw std::invalid_argument("partition line " + std::to_string(line_no) +
                                  ": expected '.inputs:' or '.outputs:'");
    }
  }
  if (!saw_inputs || !saw_outputs) {
    throw std::invalid_argument(
        "partition: both '.inputs:' and '.outputs:' lines are required");
  }
  p.validate();
  return p;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Formula read_formula_file(const std::string& path, FormulaArena& arena) {
  return parse(slurp(path), arena);
}

Partition read_partition_file(const std::string& path) {
  return parse_partition(slurp(path));
}

}  // namespace lisaforge
