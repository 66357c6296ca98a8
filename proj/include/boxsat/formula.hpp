#pragma once

// NNF formula core: interned immutable formula DAG, the pre-NNF input syntax,
// the text grammar parser/printer, NNF conversion and structural metrics.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace boxsat {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

enum class Kind : std::uint8_t { Bottom, Top, Lit, And, Or, Box, Dia };

struct FormulaNode {
  Kind kind;
  bool negated = false;  // Lit only
  int agent = 0;         // Box / Dia only
  std::string name;      // Lit only
  const FormulaNode* left = nullptr;
  const FormulaNode* right = nullptr;

  // Structural data fixed at interning time.
  std::uint32_t size = 1;         // node count
  std::uint32_t height = 0;       // tree height, leaves = 0
  std::uint32_t modal_depth = 0;  // max nesting of Box/Dia
  bool diamond_free = true;
  std::uint64_t hash = 0;
};

namespace detail {

inline std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 12) + (h >> 4);
  return h;
}

// Interning arena. Nodes live forever; equality of interned formulas is
// pointer equality.
class FormulaArena {
 public:
  static FormulaArena& instance() {
    static FormulaArena arena;
    return arena;
  }

  const FormulaNode* intern(Kind kind, bool negated, int agent,
                            const std::string& name, const FormulaNode* left,
                            const FormulaNode* right) {
    Key key{kind, negated, agent, name, left, right};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = table_.find(key);
    if (it != table_.end()) return it->second.get();
    auto node = std::make_unique<FormulaNode>();
    node->kind = kind;
    node->negated = negated;
    node->agent = agent;
    node->name = name;
    node->left = left;
    node->right = right;
    std::uint64_t h = mix_hash(0x9ae16a3b2f90404fULL,
                               static_cast<std::uint64_t>(kind) * 131 +
                                   (negated ? 7 : 0) + agent * 1315423911ULL);
    for (char c : name) h = mix_hash(h, static_cast<unsigned char>(c));
    if (left) {
      h = mix_hash(h, left->hash);
      node->size += left->size;
      node->height = left->height + 1;
      node->modal_depth = left->modal_depth;
      node->diamond_free = left->diamond_free;
    }
    if (right) {
      h = mix_hash(h, right->hash);
      node->size += right->size;
      node->height = std::max(node->height, right->height + 1);
      node->modal_depth = std::max(node->modal_depth, right->modal_depth);
      node->diamond_free = node->diamond_free && right->diamond_free;
    }
    if (kind == Kind::Box || kind == Kind::Dia) {
      node->modal_depth += 1;
      if (kind == Kind::Dia) node->diamond_free = false;
    }
    node->hash = h;
    const FormulaNode* raw = node.get();
    table_.emplace(std::move(key), std::move(node));
    return raw;
  }

 private:
  struct Key {
    Kind kind;
    bool negated;
    int agent;
    std::string name;
    const FormulaNode* left;
    const FormulaNode* right;
    bool operator==(const Key& o) const {
      return kind == o.kind && negated == o.negated && agent == o.agent &&
             left == o.left && right == o.right && name == o.name;
    }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.kind);
      h = mix_hash(h, k.negated ? 1 : 2);
      h = mix_hash(h, static_cast<std::uint64_t>(k.agent));
      h = mix_hash(h, std::hash<std::string>{}(k.name));
      h = mix_hash(h, reinterpret_cast<std::uintptr_t>(k.left));
      h = mix_hash(h, reinterpret_cast<std::uintptr_t>(k.right));
      return static_cast<std::size_t>(h);
    }
  };

  std::mutex mutex_;
  std::unordered_map<Key, std::unique_ptr<FormulaNode>, KeyHash> table_;
};

}  // namespace detail

// Immutable interned NNF formula handle. Negation appears only inside
// literals; Top is a first-class variant rather than sugar for ~false.
class Formula {
 public:
  Formula() : n_(nullptr) {}

  static Formula bottom() {
    return Formula(detail::FormulaArena::instance().intern(
        Kind::Bottom, false, 0, "", nullptr, nullptr));
  }
  static Formula top() {
    return Formula(detail::FormulaArena::instance().intern(
        Kind::Top, false, 0, "", nullptr, nullptr));
  }
  static Formula lit(const std::string& name, bool negated = false) {
    if (name.empty()) throw std::invalid_argument("empty literal name");
    return Formula(detail::FormulaArena::instance().intern(
        Kind::Lit, negated, 0, name, nullptr, nullptr));
  }
  static Formula conj(Formula a, Formula b) {
    return Formula(detail::FormulaArena::instance().intern(
        Kind::And, false, 0, "", a.n_, b.n_));
  }
  static Formula disj(Formula a, Formula b) {
    return Formula(detail::FormulaArena::instance().intern(
        Kind::Or, false, 0, "", a.n_, b.n_));
  }
  static Formula box(int agent, Formula a) {
    if (agent < 1) throw std::invalid_argument("agent index must be >= 1");
    return Formula(detail::FormulaArena::instance().intern(
        Kind::Box, false, agent, "", a.n_, nullptr));
  }
  static Formula dia(int agent, Formula a) {
    if (agent < 1) throw std::invalid_argument("agent index must be >= 1");
    return Formula(detail::FormulaArena::instance().intern(
        Kind::Dia, false, agent, "", a.n_, nullptr));
  }

  bool valid() const { return n_ != nullptr; }
  Kind kind() const { return n_->kind; }
  bool negated() const { return n_->negated; }
  int agent() const { return n_->agent; }
  const std::string& name() const { return n_->name; }
  Formula left() const { return Formula(n_->left); }
  Formula right() const { return Formula(n_->right); }
  Formula sub() const { return Formula(n_->left); }  // Box/Dia child
  std::uint32_t size() const { return n_->size; }
  std::uint32_t height() const { return n_->height; }
  std::uint32_t modal_depth() const { return n_->modal_depth; }
  bool diamond_free() const { return n_->diamond_free; }
  std::uint64_t hash() const { return n_->hash; }
  const FormulaNode* raw() const { return n_; }

  bool operator==(const Formula& o) const { return n_ == o.n_; }
  bool operator!=(const Formula& o) const { return n_ != o.n_; }

  // History-independent structural total order (interning order plays no
  // part, so runs are reproducible regardless of arena state).
  static int compare(Formula a, Formula b) {
    if (a.n_ == b.n_) return 0;
    if (a.n_->size != b.n_->size) return a.n_->size < b.n_->size ? -1 : 1;
    if (a.n_->height != b.n_->height) return a.n_->height < b.n_->height ? -1 : 1;
    if (a.n_->kind != b.n_->kind) return a.n_->kind < b.n_->kind ? -1 : 1;
    if (a.n_->negated != b.n_->negated) return a.n_->negated ? 1 : -1;
    if (a.n_->agent != b.n_->agent) return a.n_->agent < b.n_->agent ? -1 : 1;
    if (int c = a.n_->name.compare(b.n_->name)) return c < 0 ? -1 : 1;
    if (a.n_->left != b.n_->left) {
      int c = compare(Formula(a.n_->left), Formula(b.n_->left));
      if (c) return c;
    }
    if (a.n_->right != b.n_->right) {
      if (!a.n_->right) return -1;
      if (!b.n_->right) return 1;
      int c = compare(Formula(a.n_->right), Formula(b.n_->right));
      if (c) return c;
    }
    return 0;
  }

  struct Less {
    bool operator()(const Formula& a, const Formula& b) const {
      return compare(a, b) < 0;
    }
  };

 private:
  explicit Formula(const FormulaNode* n) : n_(n) {}
  const FormulaNode* n_;
};

using FormulaSet = std::set<Formula, Formula::Less>;

// ---------------------------------------------------------------------------
// Pre-NNF input syntax: what the parser produces. Negation and implication
// are allowed anywhere.

enum class InKind : std::uint8_t {
  Bottom,
  Top,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Box,
  Dia
};

struct InputNode;
using InputFormula = std::shared_ptr<const InputNode>;

struct InputNode {
  InKind kind;
  std::string name;  // Atom
  int agent = 0;     // Box / Dia
  InputFormula a, b;
};

inline InputFormula in_bottom() {
  return std::make_shared<InputNode>(InputNode{InKind::Bottom, "", 0, nullptr, nullptr});
}
inline InputFormula in_top() {
  return std::make_shared<InputNode>(InputNode{InKind::Top, "", 0, nullptr, nullptr});
}
inline InputFormula in_atom(const std::string& name) {
  return std::make_shared<InputNode>(InputNode{InKind::Atom, name, 0, nullptr, nullptr});
}
inline InputFormula in_not(InputFormula a) {
  return std::make_shared<InputNode>(InputNode{InKind::Not, "", 0, std::move(a), nullptr});
}
inline InputFormula in_and(InputFormula a, InputFormula b) {
  return std::make_shared<InputNode>(
      InputNode{InKind::And, "", 0, std::move(a), std::move(b)});
}
inline InputFormula in_or(InputFormula a, InputFormula b) {
  return std::make_shared<InputNode>(
      InputNode{InKind::Or, "", 0, std::move(a), std::move(b)});
}
inline InputFormula in_implies(InputFormula a, InputFormula b) {
  return std::make_shared<InputNode>(
      InputNode{InKind::Implies, "", 0, std::move(a), std::move(b)});
}
inline InputFormula in_box(int agent, InputFormula a) {
  return std::make_shared<InputNode>(InputNode{InKind::Box, "", agent, std::move(a), nullptr});
}
inline InputFormula in_dia(int agent, InputFormula a) {
  return std::make_shared<InputNode>(InputNode{InKind::Dia, "", agent, std::move(a), nullptr});
}

inline bool input_equal(const InputFormula& x, const InputFormula& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind || x->name != y->name || x->agent != y->agent)
    return false;
  return input_equal(x->a, y->a) && input_equal(x->b, y->b);
}

// ---------------------------------------------------------------------------
// Parser for the formula grammar:
//   formula := implied ; implied := disj ("->" disj)*   (right-assoc)
//   disj := conj ("|" conj)* ; conj := unary ("&" unary)*
//   unary := "~" unary | "[" INT "]" unary | "<" INT ">" unary | atom
//   atom := "false" | "true" | IDENT | "(" formula ")"
//   IDENT := [a-z][a-z0-9_]* ; INT := [1-9][0-9]*

namespace detail {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  InputFormula parse() {
    InputFormula f = implied();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  InputFormula implied() {
    InputFormula lhs = disj();
    skip_ws();
    if (match("->")) {
      InputFormula rhs = implied();  // right-associative
      return in_implies(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  InputFormula disj() {
    InputFormula f = conj();
    for (;;) {
      skip_ws();
      // "|" but not part of "->" lookalikes; single char, easy.
      if (peek() == '|') {
        ++pos_;
        f = in_or(std::move(f), conj());
      } else {
        return f;
      }
    }
  }

  InputFormula conj() {
    InputFormula f = unary();
    for (;;) {
      skip_ws();
      if (peek() == '&') {
        ++pos_;
        f = in_and(std::move(f), unary());
      } else {
        return f;
      }
    }
  }

  InputFormula unary() {
    skip_ws();
    char c = peek();
    if (c == '~') {
      ++pos_;
      return in_not(unary());
    }
    if (c == '[') {
      ++pos_;
      int agent = integer();
      expect(']');
      return in_box(agent, unary());
    }
    if (c == '<') {
      ++pos_;
      int agent = integer();
      expect('>');
      return in_dia(agent, unary());
    }
    return atom();
  }

  InputFormula atom() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      ++pos_;
      InputFormula f = implied();
      expect(')');
      return f;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t start = pos_;
      ++pos_;
      while (pos_ < s_.size() && (islower_digit(s_[pos_]) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "false") return in_bottom();
      if (id == "true") return in_top();
      return in_atom(id);
    }
    fail(c ? std::string("expected formula, found '") + c + "'"
           : "expected formula, found end of input");
    return nullptr;  // unreachable
  }

  int integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
    if (pos_ == start) fail("expected agent index");
    std::string digits = s_.substr(start, pos_ - start);
    if (digits.size() > 6) fail("agent index out of range");
    int v = std::stoi(digits);
    if (v == 0) fail("agent index 0 is not allowed (agents start at 1)");
    if (digits[0] == '0') fail("agent index may not have leading zeros");
    return v;
  }

  static bool islower_digit(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  bool match(const char* tok) {
    std::size_t n = std::char_traits<char>::length(tok);
    if (s_.compare(pos_, n, tok) == 0) {
      pos_ += n;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() &&
           (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
            s_[pos_] == '\r'))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos_);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline InputFormula parse(const std::string& text) {
  return detail::Parser(text).parse();
}

// ---------------------------------------------------------------------------
// NNF conversion. Implications rewrite as ~a | b, then negations are pushed
// to the literals.

namespace detail {

inline Formula to_nnf_rec(const InputFormula& f, bool neg) {
  switch (f->kind) {
    case InKind::Bottom:
      return neg ? Formula::top() : Formula::bottom();
    case InKind::Top:
      return neg ? Formula::bottom() : Formula::top();
    case InKind::Atom:
      return Formula::lit(f->name, neg);
    case InKind::Not:
      return to_nnf_rec(f->a, !neg);
    case InKind::And:
      return neg ? Formula::disj(to_nnf_rec(f->a, true), to_nnf_rec(f->b, true))
                 : Formula::conj(to_nnf_rec(f->a, false), to_nnf_rec(f->b, false));
    case InKind::Or:
      return neg ? Formula::conj(to_nnf_rec(f->a, true), to_nnf_rec(f->b, true))
                 : Formula::disj(to_nnf_rec(f->a, false), to_nnf_rec(f->b, false));
    case InKind::Implies:
      // a -> b  ==  ~a | b
      return neg ? Formula::conj(to_nnf_rec(f->a, false), to_nnf_rec(f->b, true))
                 : Formula::disj(to_nnf_rec(f->a, true), to_nnf_rec(f->b, false));
    case InKind::Box:
      return neg ? Formula::dia(f->agent, to_nnf_rec(f->a, true))
                 : Formula::box(f->agent, to_nnf_rec(f->a, false));
    case InKind::Dia:
      return neg ? Formula::box(f->agent, to_nnf_rec(f->a, true))
                 : Formula::dia(f->agent, to_nnf_rec(f->a, false));
  }
  throw std::logic_error("to_nnf: bad kind");
}

}  // namespace detail

inline Formula to_nnf(const InputFormula& f) { return detail::to_nnf_rec(f, false); }

// Reinterpret an NNF formula in the input syntax (negative literals become
// Not(Atom)).
inline InputFormula embed(Formula f) {
  switch (f.kind()) {
    case Kind::Bottom:
      return in_bottom();
    case Kind::Top:
      return in_top();
    case Kind::Lit:
      return f.negated() ? in_not(in_atom(f.name())) : in_atom(f.name());
    case Kind::And:
      return in_and(embed(f.left()), embed(f.right()));
    case Kind::Or:
      return in_or(embed(f.left()), embed(f.right()));
    case Kind::Box:
      return in_box(f.agent(), embed(f.sub()));
    case Kind::Dia:
      return in_dia(f.agent(), embed(f.sub()));
  }
  throw std::logic_error("embed: bad kind");
}

// ---------------------------------------------------------------------------
// Printer. Emits the same grammar the parser reads; parse(print(f)) followed
// by to_nnf reproduces f.

namespace detail {

// precedence levels: Or = 1, And = 2, unary/atom = 3
inline void print_rec(std::ostream& os, Formula f, int min_prec) {
  switch (f.kind()) {
    case Kind::Bottom:
      os << "false";
      return;
    case Kind::Top:
      os << "true";
      return;
    case Kind::Lit:
      if (f.negated()) os << '~';
      os << f.name();
      return;
    case Kind::Or: {
      bool paren = min_prec > 1;
      if (paren) os << '(';
      print_rec(os, f.left(), 1);
      os << " | ";
      print_rec(os, f.right(), 2);  // right operand must bind tighter
      if (paren) os << ')';
      return;
    }
    case Kind::And: {
      bool paren = min_prec > 2;
      if (paren) os << '(';
      print_rec(os, f.left(), 2);
      os << " & ";
      print_rec(os, f.right(), 3);
      if (paren) os << ')';
      return;
    }
    case Kind::Box:
      os << '[' << f.agent() << ']';
      print_rec(os, f.sub(), 3);
      return;
    case Kind::Dia:
      os << '<' << f.agent() << '>';
      print_rec(os, f.sub(), 3);
      return;
  }
}

}  // namespace detail

inline std::string print(Formula f) {
  std::ostringstream os;
  detail::print_rec(os, f, 0);
  return os.str();
}

inline Formula parse_nnf(const std::string& text) { return to_nnf(parse(text)); }

// ---------------------------------------------------------------------------
// Subformula enumeration: every distinct subformula exactly once, ordered by
// size ascending, ties broken by first occurrence in a leftmost-innermost
// (post-order) traversal. The last element is the formula itself.

inline std::vector<Formula> enumerate_subformulas(Formula f) {
  std::vector<Formula> post;  // post-order, first occurrences only
  std::set<const FormulaNode*> seen;
  // explicit stack post-order
  struct Item {
    Formula f;
    bool expanded;
  };
  std::vector<Item> stack{{f, false}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.expanded) {
      if (seen.insert(it.f.raw()).second) post.push_back(it.f);
      continue;
    }
    stack.push_back({it.f, true});
    // push children so the left child is visited first
    switch (it.f.kind()) {
      case Kind::And:
      case Kind::Or:
        stack.push_back({it.f.right(), false});
        stack.push_back({it.f.left(), false});
        break;
      case Kind::Box:
      case Kind::Dia:
        stack.push_back({it.f.sub(), false});
        break;
      default:
        break;
    }
  }
  std::vector<Formula> out = post;
  std::stable_sort(out.begin(), out.end(), [](Formula a, Formula b) {
    return a.size() < b.size();
  });
  return out;
}

struct Metrics {
  std::uint32_t modal_depth = 0;
  bool diamond_free = true;
  std::set<std::string> variables;
  std::uint32_t node_count = 0;
};

inline void collect_variables(Formula f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Kind::Lit:
      out.insert(f.name());
      return;
    case Kind::And:
    case Kind::Or:
      collect_variables(f.left(), out);
      collect_variables(f.right(), out);
      return;
    case Kind::Box:
    case Kind::Dia:
      collect_variables(f.sub(), out);
      return;
    default:
      return;
  }
}

inline Metrics metrics(Formula f) {
  Metrics m;
  m.modal_depth = f.modal_depth();
  m.diamond_free = f.diamond_free();
  m.node_count = f.size();
  collect_variables(f, m.variables);
  return m;
}

inline int max_agent(Formula f) {
  switch (f.kind()) {
    case Kind::And:
    case Kind::Or:
      return std::max(max_agent(f.left()), max_agent(f.right()));
    case Kind::Box:
    case Kind::Dia:
      return std::max(f.agent(), max_agent(f.sub()));
    default:
      return 0;
  }
}

// Fresh variable not occurring in `taken`: "q", then "q0", "q1", ...
inline std::string fresh_variable(const std::set<std::string>& taken) {
  if (!taken.count("q")) return "q";
  for (int i = 0;; ++i) {
    std::string cand = "q" + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

}  // namespace boxsat
