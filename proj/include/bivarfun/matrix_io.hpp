#pragma once

#include <iosfwd>
#include <string>

#include "bivarfun/linalg.hpp"

namespace bivarfun::io {

/// JSON layout: {"rows": m, "cols": n, "entries": [[re, im], ...]} with the
/// entries listed row-major. Doubles are written so they round-trip
/// bit-exactly.
ComplexMatrix read_matrix_json(std::istream& in);
void write_matrix_json(const ComplexMatrix& m, std::ostream& out);

/// Matrix Market "array" and "coordinate" formats with complex or real field.
/// Writing always uses the dense array/complex form.
ComplexMatrix read_matrix_market(std::istream& in);
void write_matrix_market(const ComplexMatrix& m, std::ostream& out);

/// Reads either format; picks by filename extension (.json vs .mtx/.mm),
/// falling back to sniffing the first byte. Validates that every entry is
/// finite.
ComplexMatrix read_matrix(const std::string& path);

/// Writes by extension: .mtx/.mm -> Matrix Market, anything else -> JSON.
void write_matrix(const ComplexMatrix& m, const std::string& path);

}  // namespace bivarfun::io
