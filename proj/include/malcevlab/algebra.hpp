#pragma once

/// Finite algebras as operation tables.
///
/// An algebra here is a universe {0, ..., size-1} together with finitely many
/// named finitary operations, each given by its full value table.  Tables are
/// stored row-major with the FIRST argument most significant, so for an m-ary
/// operation f over n elements,
///
///     f(a0, a1, ..., a_{m-1}) = table[a0 * n^{m-1} + a1 * n^{m-2} + ... + a_{m-1}]
///
/// Nullary operations are allowed (table of length 1) and make an algebra
/// non-idempotent by convention unless the constant is the only element.
///
/// The second half of this header is a generic closure engine: given a list
/// of equal-length tuples over a base algebra, close the set under the
/// componentwise operations, remembering for every produced tuple which
/// operation was applied to which earlier tuples.  Those derivation records
/// are what later turn abstract membership facts into explicit terms.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "malcevlab/errors.hpp"

namespace malcevlab {

/// One operation given by its full value table (first argument most
/// significant).  A nullary operation has arity 0 and a 1-entry table.
struct OpTable {
    std::string name;
    int arity = 0;
    std::vector<int> table;

    /// Evaluate on a full argument tuple; n is the universe size.
    int apply(std::span<const int> args, int n) const;

    /// Table index of an argument tuple.
    static std::size_t index_of(std::span<const int> args, int n);
};

/// A finite algebra: universe {0, ..., size-1} plus named operations.
struct FiniteAlgebra {
    std::string name;
    int size = 0;
    std::vector<OpTable> ops;

    /// Throw input_error if any table has the wrong length, an out-of-range
    /// entry, a duplicate operation name, or the universe is empty.
    void validate() const;

    /// Every operation satisfies f(x, ..., x) = x.  An algebra with a
    /// nullary operation is idempotent only if it has one element.
    bool is_idempotent() const;

    bool has_nullary_op() const;

    /// Largest arity among the operations (0 if there are none).
    int max_arity() const;

    int apply(int op, std::span<const int> args) const;

    /// Index of the operation with this name, or -1.
    int op_index(const std::string& opname) const;
};

/// n-th direct power.  Elements of the power are encoded as integers with the
/// FIRST coordinate most significant: (a0, ..., a_{n-1}) has code
/// a0 * size^{n-1} + ... + a_{n-1}.  Throws cap_exceeded if any materialized
/// table would exceed max_cells entries.
FiniteAlgebra direct_power(const FiniteAlgebra& a, int n,
                           std::size_t max_cells = 50'000'000);

/// Binary direct product of two algebras with identical signatures
/// (same operation names and arities, in order).  Element (a, b) has code
/// a * b_size + b.
FiniteAlgebra direct_product(const FiniteAlgebra& a, const FiniteAlgebra& b,
                             std::size_t max_cells = 50'000'000);

/// Encode/decode tuples under the power encoding above.
std::vector<int> power_decode(std::size_t code, int base, int n);
std::size_t power_encode(std::span<const int> coords, int base);

/// Smallest subuniverse containing the seeds, as a sorted element list.
/// Nullary operations are always included.
std::vector<int> subuniverse_closure(const FiniteAlgebra& a,
                                     std::vector<int> seeds);

/// All nonempty subuniverses, each sorted, the list ordered by (size, lex).
/// Enumerates closures of all nonempty subsets of the universe, so this is
/// exponential in the universe size; intended for small algebras.
std::vector<std::vector<int>> all_subuniverses(const FiniteAlgebra& a);

/// How an element of a closure came to be: either a seed (op == -1 and `var`
/// is the seed's position in the seed list) or op applied to earlier
/// elements (indices in `args` are strictly smaller than the element's own).
struct Derivation {
    int op = -1;
    int var = -1;
    std::vector<int> args;
};

/// Result of closing a set of equal-length tuples under the componentwise
/// operations of a base algebra.  `tuples` is in insertion order: seeds
/// first (duplicates among seeds are kept only once, with the first
/// derivation), then derived tuples in the deterministic order of the
/// closure loop.
struct TupleClosure {
    std::vector<std::vector<int>> tuples;
    std::vector<Derivation> how;

    /// Index of a tuple, or -1 if absent.
    int find(std::span<const int> t) const;
};

/// Close `seeds` (equal-length tuples with entries in the base universe)
/// under the componentwise operations of `base`.  Deterministic: elements are
/// processed in insertion order and argument tuples in lexicographic order.
/// Throws cap_exceeded once more than `cap` tuples have been produced.
TupleClosure close_tuples(const FiniteAlgebra& base,
                          const std::vector<std::vector<int>>& seeds,
                          std::size_t cap);

} // namespace malcevlab
