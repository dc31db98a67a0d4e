#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kodaira/group.hpp"

namespace kodaira {

/// Free-group word: sequence of (generator index, nonzero exponent) pairs.
/// Normalized: adjacent pairs carry distinct generators, exponents nonzero.
/// The empty word is the identity.
struct Word {
  std::vector<std::pair<int, int>> syms;

  bool empty() const { return syms.empty(); }
  Word inverse() const;
  Word operator*(const Word& o) const;
  void append(int gen, int exp);  // normalizing append
  static Word gen(int g, int e = 1);
  static Word commutator_of(const Word& a, const Word& b);  // a b a^-1 b^-1

  bool operator==(const Word&) const = default;
};

struct Presentation {
  std::vector<std::string> generator_names;
  std::vector<Word> relators;  // each relator r means r = 1
  std::string label;

  int num_generators() const { return static_cast<int>(generator_names.size()); }
};

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(int ln, int col, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(ln) + ":" +
                           std::to_string(col) + ": " + msg),
        line(ln), column(col) {}
};

/// Parses the presentation DSL. Two accepted shapes:
///
///   group "label" { gens x, y; rel x^2 = 1; rel x*y*x^-1 = y^-1; }
///
/// or the same body without the wrapper. Words support `*`, `^int`,
/// parentheses, commutator brackets [a,b] = a*b*a^-1*b^-1 and the literal
/// `1`. A rel statement may chain equalities (rel a = b = c;), stored as the
/// relators a*b^-1 and b*c^-1. Generator lists accept ranges like x1..x6.
/// `#` starts a comment. Throws ParseError with line/column on bad input.
Presentation parse_presentation(const std::string& text);

/// Renders a word using the presentation's generator names, e.g. "x*y^-2".
std::string word_to_string(const Word& w, const std::vector<std::string>& names);

/// Parses a single word in an existing generator context (same word grammar
/// as the DSL). Used for annotation data such as subgroup generator lists.
Word parse_word(const std::vector<std::string>& generator_names,
                const std::string& text);

/// Evaluates a word in G under an assignment of generator index -> element.
/// Unassigned generators are marked by -1; evaluating one throws.
ElemId evaluate_word(const FiniteGroup& G, std::span<const ElemId> assignment,
                     const Word& w);

}  // namespace kodaira
