#pragma once

/// Free algebras, free structures, and strong colorings.
///
/// The free algebra F(k) of a finite algebra A on generators x_0, ..., x_{k-1}
/// is realized concretely inside A^(A^k): each element is the full value
/// table of a k-variable term, and the generators are the projection tables.
/// Assignments are indexed with the FIRST generator most significant, matching
/// the operation-table convention.  Closure runs the same deterministic loop
/// as close_tuples; when A has two elements and the table fits in 64 bits the
/// loop runs on packed words instead (identical insertion order), which is
/// what makes five-generator free algebras of small lattices instant.
///
/// Given a target structure B, the free structure lifts each relation R of B
/// to R^F: the subalgebra of F^r generated by the tuples
/// (x_{b_1}, ..., x_{b_r}) for (b_1, ..., b_r) in R.  When R is an
/// equivalence, R^F is the congruence of F generated by the corresponding
/// generator pairs, and it is computed directly by a kernel argument —
/// two elements are congruent exactly when their tables agree on every
/// assignment that is constant on R-classes — with no tuple closure at all.
/// When R is a reflexive transitive binary relation, the closure is followed
/// by transitive refinement.  Everything else is a raw tuple closure.
///
/// A strong coloring of A by B is a homomorphism from the free structure on
/// |B| generators to B that sends x_b to b.  Whether one exists is decided by
/// the deterministic search in solve_hom; congruence-realized relations enter
/// the search as class-consistency constraints rather than pair lists.

#include <cstdint>
#include <optional>
#include <vector>

#include "malcevlab/algebra.hpp"
#include "malcevlab/partition.hpp"
#include "malcevlab/relstruct.hpp"
#include "malcevlab/term.hpp"

namespace malcevlab {

struct FreeAlgebra {
    FiniteAlgebra base;      ///< the algebra the free algebra was built over
    int n_generators = 0;
    std::size_t table_len = 0;  ///< |A|^k entries per element
    std::vector<std::vector<uint8_t>> elems;  ///< value tables, insertion order
    std::vector<Derivation> how;              ///< how each element was produced
    std::vector<int> gen_index;               ///< element index of each generator

    int size() const { return static_cast<int>(elems.size()); }
    int generator(int i) const { return gen_index[static_cast<std::size_t>(i)]; }

    /// Index of an element's value table, or -1.
    int find(const std::vector<uint8_t>& table) const;

    /// Apply a base operation componentwise to elements; the result is always
    /// an element again.
    int apply(int op, std::span<const int> elem_indices) const;

    /// Reconstruct a defining term (DAG-shared) for an element.
    TermPtr term_of(int elem) const;

    /// Materialize the free algebra itself as operation tables.  Throws
    /// cap_exceeded when a table would exceed max_cells entries.
    FiniteAlgebra as_finite_algebra(const std::string& name,
                                    std::size_t max_cells = 50'000'000) const;
};

/// Build F(k); throws cap_exceeded if more than `cap` elements appear.
FreeAlgebra free_algebra(const FiniteAlgebra& a, int k, std::size_t cap);

/// Shared store of free algebras of one base algebra, keyed by generator
/// count; deciders asking for the same F(k) reuse the same object.
class FreeCache {
  public:
    FreeCache(FiniteAlgebra a, std::size_t cap);
    const FreeAlgebra& get(int k);
    const FiniteAlgebra& base() const { return alg_; }
    std::size_t cap() const { return cap_; }

  private:
    FiniteAlgebra alg_;
    std::size_t cap_;
    std::map<int, FreeAlgebra> store_;
};

/// One target relation lifted to the free algebra: either a congruence
/// (partition of the free algebra's elements) or an explicit tuple set with
/// derivations.
struct FreeRelation {
    std::string name;
    int arity = 0;
    bool as_congruence = false;
    Partition congruence;
    std::vector<std::vector<int>> tuples;  ///< element-index tuples
    std::vector<Derivation> how;           ///< derivations for `tuples`
};

struct FreeStructure {
    const FreeAlgebra* F = nullptr;
    std::vector<FreeRelation> rels;
};

/// How to realize lifted relations.
enum class RefineMode {
    automatic,  ///< congruences and preorders refined, everything else raw
    raw,        ///< force tuple closures for everything
};

/// Lift every relation of `target` over the free algebra on target.size
/// generators.  Uses `cache` for the free algebra.
FreeStructure free_structure(FreeCache& cache, const RelStructure& target,
                             RefineMode mode = RefineMode::automatic);

/// Congruence of F generated by identifying generators along `theta`
/// (a partition of the generators), by the kernel argument above.
Partition refine_congruence(const FreeAlgebra& F, const Partition& theta);

/// Transitive closure of a set of binary element tuples (ordered pairs)
/// over n elements.  Throws cap_exceeded if n exceeds 4096.
std::vector<std::vector<int>> refine_transitive(
    const std::vector<std::vector<int>>& pairs, int n);

struct ColoringResult {
    bool found = false;
    std::vector<int> map;        ///< element -> target value (when found)
    std::size_t free_size = 0;   ///< number of free-algebra elements
};

/// Decide whether a (strong) coloring of the cached base algebra by `target`
/// exists.  `pinned` = true requires x_b -> b; false asks for any
/// homomorphism from the free structure.
ColoringResult strong_coloring(FreeCache& cache, const RelStructure& target,
                               bool pinned = true,
                               RefineMode mode = RefineMode::automatic);

/// Rebuild the term for a derived tuple of a closure: derivation `idx` from
/// a parallel (tuples, how) pair, with seed s becoming variable x_s.
TermPtr term_from_derivations(const std::vector<Derivation>& how, int idx);

} // namespace malcevlab
