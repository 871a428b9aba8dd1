#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace strconf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
  public:
    SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& what)
        : Error(what), position_(position), expected_(std::move(expected)) {}

    /// Offset in code points from the start of the parsed text.
    std::size_t position() const noexcept { return position_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

  private:
    std::size_t position_;
    std::vector<std::string> expected_;
};

class LetterOutsideAlphabet : public Error {
  public:
    explicit LetterOutsideAlphabet(std::string letter)
        : Error("letter outside alphabet: '" + letter + "'"), letter_(std::move(letter)) {}
    const std::string& letter() const noexcept { return letter_; }

  private:
    std::string letter_;
};

class AlphabetMismatch : public Error {
  public:
    AlphabetMismatch() : Error("automata are defined over different alphabets") {}
};

/// Problem definition is malformed (unknown variable, bad JSON shape, bad EOL usage).
class InvalidProblem : public Error {
  public:
    using Error::Error;
};

class InfeasibleProblem : public Error {
  public:
    InfeasibleProblem() : Error("No feasible solutions") {}
};

class InvalidAppend : public Error {
  public:
    InvalidAppend() : Error("invalid append") {}
};

class VariableCompleted : public Error {
  public:
    explicit VariableCompleted(const std::string& var) : Error("variable completed: " + var) {}
};

class CompletionDisabled : public Error {
  public:
    CompletionDisabled() : Error("completion disabled: problem has no end-of-line letter") {}
};

class NothingToUndo : public Error {
  public:
    NothingToUndo() : Error("nothing to undo") {}
};

class UnknownVariable : public Error {
  public:
    explicit UnknownVariable(const std::string& var) : Error("unknown variable: " + var) {}
};

/// A desk-scale enumeration or product construction outgrew its budget.
class BudgetExceeded : public Error {
  public:
    using Error::Error;
};

} // namespace strconf
