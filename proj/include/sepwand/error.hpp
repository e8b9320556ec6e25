#ifndef SEPWAND_ERROR_HPP
#define SEPWAND_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sepwand {

// Base class for everything this library throws on purpose. Catching
// sepwand::Error is enough to contain any failure that is the caller's
// fault (bad sorts, unprovable side conditions, malformed input).
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A term or assertion was built with operands of the wrong sort.
struct SortError : Error {
  explicit SortError(const std::string& what) : Error("sort error: " + what) {}
};

// A predicate occurrence could not be unfolded, usually because the
// argument that drives the case analysis is not constructor-headed.
struct CannotUnfold : Error {
  explicit CannotUnfold(const std::string& what)
      : Error("cannot unfold: " + what) {}
};

// Evaluation of a term or proposition hit something without a value
// under the given environment (unbound variable, null offset, ...).
struct EvalError : Error {
  explicit EvalError(const std::string& what) : Error("eval: " + what) {}
};

// A sort has no finite enumeration under the given bounds.
struct EnumError : Error {
  explicit EnumError(const std::string& what) : Error("enumerate: " + what) {}
};

// The proof kernel refused a rule application. `rule` names the
// offending primitive; the message says which side condition failed.
struct KernelReject : Error {
  std::string rule;
  KernelReject(const std::string& rule_, const std::string& what)
      : Error("kernel: " + rule_ + ": " + what), rule(rule_) {}
};

// A derived construction (lemma builder, tactic) needed a side
// condition that does not hold for the supplied arguments.
struct SideConditionError : Error {
  explicit SideConditionError(const std::string& what)
      : Error("side condition: " + what) {}
};

// A path does not exist in the aggregate shape it was applied to.
struct PathError : Error {
  explicit PathError(const std::string& what) : Error("path: " + what) {}
};

// A shape-level operation was handed a value outside its domain.
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error("shape: " + what) {}
};

// Symbolic execution could not expose the cell a load or store needs.
struct MemorySafetyError : Error {
  explicit MemorySafetyError(const std::string& what)
      : Error("memory safety: " + what) {}
};

// A high-level specification derivation asked for a functional fact
// that has no recorded evidence.
struct JustificationIncomplete : Error {
  explicit JustificationIncomplete(const std::string& what)
      : Error("justification incomplete: " + what) {}
};

// Surface syntax errors: s-expression files, assertion grammar, .mh
// programs. `line` is 1-based, 0 when unknown.
struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& what)
      : Error("parse" + (line_ ? " (line " + std::to_string(line_) + ")" : std::string()) +
              ": " + what),
        line(line_) {}
};

}  // namespace sepwand

#endif
