#pragma once

#include <iosfwd>
#include <string>

#include "dfrc/types.hpp"

namespace dfrc {

// Text matrix format: line 1 "rows cols", then one line per row holding
// space-separated "re im" pairs (17 significant digits, so values round-trip).
void write_matrix(std::ostream& os, const CMatrix& A);
void write_matrix(const std::string& path, const CMatrix& A);

// Throws std::runtime_error on malformed input or unreadable files.
CMatrix read_matrix(std::istream& is);
CMatrix read_matrix(const std::string& path);

}  // namespace dfrc
