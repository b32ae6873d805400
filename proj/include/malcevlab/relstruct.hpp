#pragma once

/// Relational structures, polymorphisms, and homomorphism search.
///
/// A relational structure is a universe {0, ..., size-1} with finitely many
/// named relations, each a set of tuples of a fixed arity.  The module also
/// carries the small catalogue of target structures the deciders color
/// against:
///
///   p0       four elements with three equivalences alpha = 03|12,
///            beta = 01|23, gamma = 0|12|3 — the pentagon that controls
///            congruence modularity;
///   w<n>     n+1 elements with alpha = 01|23|... and beta = 0|12|34|... —
///            the zigzag that controls congruence n-permutability;
///   order2   the two-element chain with its order relation;
///   s        two elements with the graph of binary join — the target for
///            the Kearnes-Kiss congruence-identity test;
///   b<n>     two elements with the n-ary relation {0,1}^n minus the all-zero
///            tuple — the target for n-cube terms (and b0, the family
///            truncated at a chosen width).
///
/// An operation f is a polymorphism of a structure when applying f to related
/// tuples coordinatewise lands in the relation again.  hom_search decides
/// whether one structure maps homomorphically into another, with optional
/// pinned values; it runs a deterministic backtracking search that keeps
/// every constraint arc-consistent, with bitmask domains (targets are capped
/// at 64 elements).

#include <optional>
#include <string>
#include <vector>

#include "malcevlab/algebra.hpp"
#include "malcevlab/partition.hpp"

namespace malcevlab {

struct Relation {
    std::string name;
    int arity = 0;
    std::vector<std::vector<int>> tuples;

    /// Sort lexicographically and drop duplicates.
    void normalize();
    /// Binary search; requires normalized tuples.
    bool contains(std::span<const int> t) const;
};

/// Optional bookkeeping for structures whose universe is a power: size =
/// sort_size^sorts with coordinates encoded first-most-significant.
struct ProductInfo {
    int sorts = 1;
    int sort_size = 0;
};

struct RelStructure {
    std::string name;
    int size = 0;
    std::vector<Relation> rels;
    std::optional<ProductInfo> product;

    /// Normalize all relations and throw input_error on out-of-range
    /// entries, duplicate relation names, or mixed arities inside one
    /// relation.
    void validate_and_normalize();

    const Relation* find_relation(const std::string& rel_name) const;
};

RelStructure build_p0();
RelStructure build_wn(int n);      // n >= 2
RelStructure build_order2();
RelStructure build_s();
RelStructure build_bn(int n);      // n >= 1
RelStructure build_b0(int kmax);   // relations r1..r<kmax>

/// Convert a binary relation that happens to be an equivalence into a
/// partition; input_error if it is not one.
Partition relation_as_partition(const Relation& r, int size);
Relation partition_as_relation(const std::string& name, const Partition& p);

/// Witness that `op` is not a polymorphism of a relation in `s`.
struct PolymorphismViolation {
    std::string op;
    std::string relation;
    std::vector<std::vector<int>> rows;  ///< related argument tuples
    std::vector<int> image;              ///< coordinatewise image, not in the relation
};

/// First violation in deterministic order, or nullopt if every operation of
/// the algebra is a polymorphism of every relation.  Universe sizes must
/// match.
std::optional<PolymorphismViolation> polymorphism_violation(
    const RelStructure& s, const FiniteAlgebra& a);
bool compatible(const RelStructure& s, const FiniteAlgebra& a);
bool is_polymorphism(const RelStructure& s, const OpTable& op, int size);

/// Homomorphism search problem over bitmask domains.  This is the engine
/// beneath hom_search and the free-structure coloring tests; the pointers
/// must outlive the solve call.
struct HomProblem {
    int n_vars = 0;
    int n_vals = 0;  ///< at most 64

    struct TupleConstraint {
        std::vector<int> scope;                          ///< variable indices
        const std::vector<std::vector<int>>* targets;    ///< allowed images
    };
    struct EquivalenceConstraint {
        const Partition* source;  ///< over variables
        const Partition* target;  ///< over values
    };

    std::vector<std::pair<int, int>> pins;  ///< (variable, value)
    std::vector<TupleConstraint> tuple_constraints;
    std::vector<EquivalenceConstraint> eq_constraints;
};

/// Deterministic MAC backtracking: static most-constrained-first variable
/// order (ties to the smaller index), ascending value order, full
/// propagation after every assignment.
std::optional<std::vector<int>> solve_hom(const HomProblem& p);

/// Homomorphism from src to dst respecting relation names (every relation of
/// src must exist in dst with the same arity), with optional pinned values.
std::optional<std::vector<int>> hom_search(
    const RelStructure& src, const RelStructure& dst,
    const std::vector<std::pair<int, int>>& pins = {});

/// Pentagon shape check for a structure with equivalences alpha, beta,
/// gamma: requires alpha ^ beta = 0, alpha o beta = 1, gamma v beta = 1 and
/// gamma strictly below alpha.  `failures` lists every axiom that does not
/// hold.
struct PentagonCheck {
    bool ok = false;
    std::vector<std::string> failures;
};
PentagonCheck verify_pentagon(const RelStructure& s);

/// Canonical factorization of a verified pentagon.  Because alpha o beta is
/// total and alpha ^ beta is zero, x -> (a(x), b(x)) is a bijection with
/// A x B, where a(x) indexes x's alpha-class and b(x) its beta-class (classes
/// ordered by least member).  The gamma fibers gamma^a are partitions of B;
/// the pentagon is special when every fiber is either total or one fixed
/// eta, and very special when that eta is the zero partition.  U collects
/// the a with total fiber.
struct PentagonClassification {
    int a_size = 0;
    int b_size = 0;
    std::vector<int> a_of;  ///< element -> A coordinate
    std::vector<int> b_of;  ///< element -> B coordinate
    std::vector<Partition> fibers;  ///< indexed by A
    bool special = false;
    bool very_special = false;
    std::vector<int> u;              ///< marked A-elements (total fibers)
    std::optional<Partition> eta;    ///< the common non-total fiber, if special
};

/// Classify a structure that verify_pentagon accepts; throws
/// precondition_error otherwise, and input_error if the expected factor
/// sizes are given and do not match.
PentagonClassification classify_pentagon(const RelStructure& s,
                                         int expect_a = -1, int expect_b = -1);

} // namespace malcevlab
