#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridhop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flows are only defined on radial switch states.
class NonRadialState : public Error {
public:
    using Error::Error;
};

/// No radial, constraint-satisfying state exists for a contingency.
class Infeasible : public Error {
public:
    using Error::Error;
};

class IncompatiblePlacement : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

class InvalidRate : public Error {
public:
    using Error::Error;
};

class Unclassifiable : public Error {
public:
    using Error::Error;
};

/// One problem found while reading a document. `location` is either
/// "line L, column C" for syntax errors or a JSON pointer for schema and
/// reference errors.
struct DocumentIssue {
    std::string location;
    std::string message;
};

class DocumentError : public Error {
public:
    DocumentError(const std::string& what, std::vector<DocumentIssue> issues)
        : Error(compose(what, issues)), issues_(std::move(issues)) {}

    [[nodiscard]] const std::vector<DocumentIssue>& issues() const noexcept { return issues_; }

private:
    static std::string compose(const std::string& what, const std::vector<DocumentIssue>& issues) {
        std::string out = what;
        for (const auto& issue : issues) {
            out += "\n  " + issue.location + ": " + issue.message;
        }
        return out;
    }

    std::vector<DocumentIssue> issues_;
};

class ParseError : public DocumentError {
public:
    explicit ParseError(std::vector<DocumentIssue> issues)
        : DocumentError("malformed document", std::move(issues)) {}
};

class SchemaError : public DocumentError {
public:
    explicit SchemaError(std::vector<DocumentIssue> issues)
        : DocumentError("document does not match schema", std::move(issues)) {}
};

class ReferenceError : public DocumentError {
public:
    explicit ReferenceError(std::vector<DocumentIssue> issues)
        : DocumentError("unresolved reference", std::move(issues)) {}
};

} // namespace gridhop
