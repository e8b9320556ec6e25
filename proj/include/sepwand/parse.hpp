#ifndef SEPWAND_PARSE_HPP
#define SEPWAND_PARSE_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sepwand/assertion.hpp"

namespace sepwand {

// Prefix s-expression surface syntax. The readers here invert the
// str() printers on Term, Prop and Assertion, so anything the library
// prints can be read back verbatim.

struct Sexpr {
  bool atom = true;
  std::string text;          // atom spelling
  std::vector<Sexpr> items;  // list elements
  int line = 0;
  int col = 0;
};

std::vector<Sexpr> read_sexprs(const std::string& text);
// Exactly one expression; trailing input is an error.
Sexpr read_sexpr(const std::string& text);

// Variables in scope while parsing, each with its declared sort.
// Quantifier binders extend the scope for their body only.
using VarScope = std::map<std::string, Sort>;

Sort parse_sort_node(const Sexpr& e);
Term parse_term(const Sexpr& e, const VarScope& sc);
Prop parse_prop(const Sexpr& e, const VarScope& sc);
Assertion parse_assertion(const Sexpr& e, const VarScope& sc);

// Head-of-file declarations plus entailment records:
//   (sorts (name shape) ...)
//   (vars (name Sort) ...)
//   (entail ante succ) ...
// The sorts block registers named aggregate shapes; shape syntax is
// int, val, a previously declared name, or a parenthesized field list.
struct EntailFile {
  VarScope vars;
  std::vector<std::pair<Assertion, Assertion>> entailments;
};
EntailFile parse_entail_file(const std::string& text);

// True for names callers may introduce: nonempty, starts with a
// letter or underscore, continues with letters, digits, underscores
// or primes. The suffix characters ^, ! and # are reserved for
// binders and fresh names the library makes up itself.
bool valid_user_name(const std::string& name);

}  // namespace sepwand

#endif
