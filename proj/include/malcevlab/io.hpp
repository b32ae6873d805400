#pragma once

/// Text formats and the JSON report.
///
/// Two line-oriented text formats, both versioned by a leading comment
/// `# format: malcev-lab v1` and both using `#` comments to end-of-line:
///
///   algebra file:    algebra <name>
///                    size <n>
///                    op <name> <arity>      (repeated; followed by exactly
///                    <n^arity integers>      n^arity whitespace-separated
///                                            entries, row-major, first
///                                            argument most significant)
///
///   structure file:  structure <name>
///                    size <n>
///                    rel <name> <arity>     (repeated; followed by tuple
///                    <arity integers>        lines, one tuple per line,
///                    ...                     closed by a line `end`)
///                    end
///
/// Parsers reject malformed input with <source>:<line>:<column> diagnostics;
/// emitters produce the canonical layout, so emit(parse(x)) is a fixed point.
/// The report emitter renders the analysis result as JSON with a frozen key
/// order; `timings_ms` appears only when timing collection was requested, so
/// default reports are byte-identical across runs.

#include <string>

#include "malcevlab/algebra.hpp"
#include "malcevlab/malcev.hpp"
#include "malcevlab/relstruct.hpp"

namespace malcevlab {

inline constexpr const char* kFormatHeader = "# format: malcev-lab v1";

FiniteAlgebra parse_algebra(const std::string& text,
                            const std::string& source = "<input>");
RelStructure parse_structure(const std::string& text,
                             const std::string& source = "<input>");

std::string emit_algebra(const FiniteAlgebra& a);
std::string emit_structure(const RelStructure& s);

FiniteAlgebra load_algebra_file(const std::string& path);
RelStructure load_structure_file(const std::string& path);

/// Canonical JSON rendering of a report (two-space indent, trailing
/// newline).  Inconclusive answers render as null, never as a boolean.
std::string emit_report(const Report& r);

} // namespace malcevlab
