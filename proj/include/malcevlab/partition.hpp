#pragma once

/// Partitions, congruences, and the congruence-lattice toolkit.
///
/// A Partition is an equivalence relation on {0, ..., n-1} kept in a
/// union-find; its normal form labels every element with the least element of
/// its class, which is the representation all comparisons use.  On top of
/// that sit the lattice operations (join and meet), alternating relational
/// composition, congruence generation inside a finite algebra, quotients, the
/// Dedekind modular-law test for a concrete triple, and the search for a
/// compatible partial order with at least one strict pair (the classical
/// witness that an algebra generates a variety that is not congruence
/// n-permutable for any n).
///
/// Congruence generation uses the unary-polynomial worklist: a pair (a, b)
/// forces t(a) = t(b) for every translation t obtained from a basic operation
/// by fixing all but one argument, and derived pairs are swept the same way
/// until a fixed point.  Together with the transitivity the union-find
/// provides for free, sweeping each explicitly united pair once is a
/// complete procedure.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "malcevlab/algebra.hpp"

namespace malcevlab {

class Partition {
  public:
    Partition() = default;
    /// The discrete partition (all classes singletons).
    explicit Partition(int n);

    int size() const { return static_cast<int>(parent_.size()); }
    int find(int a) const;
    bool same(int a, int b) const { return find(a) == find(b); }
    /// Merge the classes of a and b; true if they were distinct.
    bool unite(int a, int b);

    /// normal_form()[i] = least element of i's class.
    std::vector<int> normal_form() const;
    /// Classes ordered by least element, members ascending.
    std::vector<std::vector<int>> classes() const;
    int n_classes() const;
    bool is_discrete() const { return n_classes() == size(); }
    bool is_total() const { return n_classes() <= 1; }

    /// Refinement order: every class of *this lies inside a class of other.
    bool leq(const Partition& other) const;
    bool operator==(const Partition& other) const;

    static Partition discrete(int n) { return Partition(n); }
    static Partition total(int n);
    static Partition from_pairs(int n,
                                const std::vector<std::pair<int, int>>& pairs);
    /// Classes need not cover the universe; unmentioned elements are
    /// singletons.  Throws input_error on overlap or range errors.
    static Partition from_classes(int n,
                                  const std::vector<std::vector<int>>& cls);

    /// Compact rendering like "0 3 | 1 2" (singleton classes included).
    std::string to_string() const;

  private:
    mutable std::vector<int> parent_;
};

Partition join(const Partition& p, const Partition& q);
Partition meet(const Partition& p, const Partition& q);

/// Binary relation on {0, ..., n-1} as a bit matrix.
struct BinRelation {
    int n = 0;
    std::vector<uint8_t> bits;  // row-major, n*n

    BinRelation() = default;
    explicit BinRelation(int n_) : n(n_), bits(static_cast<std::size_t>(n_) *
                                               static_cast<std::size_t>(n_)) {}
    bool at(int a, int b) const {
        return bits[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(b)] != 0;
    }
    void set(int a, int b) {
        bits[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(b)] = 1;
    }
    bool is_reflexive() const;
    bool is_symmetric() const;
    bool is_antisymmetric() const;  // at(a,b) && at(b,a) => a == b
    bool is_transitive() const;
    std::vector<std::pair<int, int>> pairs() const;  // lex order
};

/// Is (a, b) in the alternating composition p o q o p o ... with `steps`
/// factors, starting with p?  steps >= 1.
bool in_compose_n(const Partition& p, const Partition& q, int steps, int a,
                  int b);

/// The full alternating composition as a relation (reflexive, since both
/// factors are).  Computed row by row with frontier sets.
BinRelation compose_n(const Partition& p, const Partition& q, int steps);

/// Congruence generated by the pairs: the least equivalence containing them
/// that every unary polynomial translation preserves.
Partition cg(const FiniteAlgebra& a, const std::vector<std::pair<int, int>>& pairs);

/// One witness that a partition fails to be a congruence.
struct CongruenceViolation {
    int op;        ///< operation index
    int position;  ///< argument position that was varied
    std::vector<int> fixed_args;  ///< full argument tuple with `position` varied
    int a, b;      ///< related elements whose translations are not related
};

/// Check that the partition is preserved by every translation; nullopt means
/// it is a congruence.  Only pairs (class representative, member) are tested,
/// which suffices by transitivity.
std::optional<CongruenceViolation> congruence_violation(const FiniteAlgebra& a,
                                                        const Partition& p);
bool is_congruence(const FiniteAlgebra& a, const Partition& p);

/// Quotient algebra A/p together with the class map.  Class k of the
/// quotient is the k-th class of p in least-element order.  Throws
/// precondition_error if p is not a congruence.
struct Quotient {
    FiniteAlgebra algebra;
    std::vector<int> class_of;  ///< original element -> quotient element
};
Quotient quotient(const FiniteAlgebra& a, const Partition& p);

/// Dedekind's modular law at a concrete triple: requires gamma <= alpha and
/// returns whether gamma v (alpha ^ beta) equals alpha ^ (gamma v beta).
/// Throws precondition_error if gamma is not below alpha.
bool modularity_law_holds(const Partition& alpha, const Partition& beta,
                          const Partition& gamma);

/// Search for a partial order compatible with every operation (each
/// operation monotone in every argument) that contains at least one strict
/// pair.  Seeds each ordered pair (a, b), a != b, in lexicographic order,
/// closes under reflexivity, transitivity, and monotone translations, and
/// returns the first closure that is antisymmetric.  nullopt if every seed
/// collapses to a symmetric pair.
std::optional<BinRelation> find_compatible_order(const FiniteAlgebra& a);

} // namespace malcevlab
