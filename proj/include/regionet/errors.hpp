#pragma once

#include <stdexcept>
#include <string>

namespace regionet {

// A path could not be opened, read, or written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A file was readable but violates its format contract (bad header,
// malformed row, negative weight, unknown node id, ...). Messages carry
// the offending line number where one exists.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace regionet
