#pragma once

/// Combinatorial witnesses: pentagons, Tarski squaring, blocker families.
///
/// The constructive side of the workbench.  Where the deciders answer yes/no,
/// these functions build the objects that make a "no" tangible:
///
///   build_modularity_blocker   from an idempotent algebra without Day terms,
///                              grow the largest "blocky" congruence on
///                              F(2) x F(2) that keeps ((y,x),(y,y)) apart:
///                              start from Cg((x,x),(x,y)) and greedily add
///                              row-generators ((f,f),(f,g)) in lexicographic
///                              order whenever the forbidden pair stays
///                              separate.  The rows with total fibers form
///                              the marked set U, the common non-total fiber
///                              is a congruence eta of F(2).
///   pentagon_from_blocker      the very special pentagon on F(2) x F(2)/eta:
///                              alpha, beta the product kernels, gamma total
///                              over marked rows and discrete elsewhere.
///   pentagon_tarski_step       squares a very special pentagon: the new
///                              carrier is the square of the old one, the new
///                              fiber over (a1, a2) is the square of the old
///                              fiber over a2, so U' = A x U and sizes square
///                              while very-specialness persists; the diagonal
///                              embeds the old pentagon.
///   tarski_step                the same squaring for a bare algebra with a
///                              marked subset.
///   finite_P / finite_B /      the finite relational companions: the
///   finite_C                   pentagon structure on m x m with marked rows,
///                              the "not entirely outside U" family, and the
///                              cross structure on m^n whose compatibility
///                              excludes n-cube terms.
///   blocker_polymorphism_      the coordinate criterion for a componentwise
///   criterion                  operation (f1 on A-parts, f2 on B-parts) to
///                              preserve the pentagon's gamma: whenever
///                              f1(a) lands outside U, f2 may not depend on
///                              the coordinates whose a_i lie inside U.
///   pentagon_witnesses /       explicit operation families satisfying the
///   blocker_witnesses          criterion together with their defining
///                              identities, verified on construction.
///   no_small_model             exhaustive proof that on a two-element
///                              universe no family of k idempotent binary
///                              operations with the witness identities exists
///                              once k reaches 3 (the f_i would need three
///                              distinct values at a point).

#include <optional>
#include <string>
#include <vector>

#include "malcevlab/algebra.hpp"
#include "malcevlab/free_objects.hpp"
#include "malcevlab/partition.hpp"
#include "malcevlab/relstruct.hpp"

namespace malcevlab {

/// Output of the greedy blocker search over F(2) x F(2).
struct ModularityBlocker {
    FiniteAlgebra f2;        ///< F(2) materialized as operation tables
    Partition gamma;         ///< the saturated congruence on f2 x f2
    Partition eta;           ///< common non-total fiber, a congruence of f2
    std::vector<int> u;      ///< rows (f2 elements) with total fiber
};

/// Requires an idempotent algebra; throws precondition_error when the
/// forbidden pair collapses immediately (the algebra then has Day terms and
/// no blocker exists), and verification_error if saturation does not end in
/// a special configuration.
ModularityBlocker build_modularity_blocker(const FiniteAlgebra& a,
                                           std::size_t cap = 2'000'000);

/// A pentagon carried by an actual algebra: universe a_size * b_size with
/// element (a, b) coded a * b_size + b, alpha/beta the product kernels,
/// gamma a congruence of the carrier.
struct Pentagon {
    FiniteAlgebra algebra;
    int a_size = 0;
    int b_size = 0;
    Partition alpha, beta, gamma;
    std::vector<int> u;  ///< A-elements with total gamma fiber

    /// The alpha/beta/gamma relations as a structure (for verify/classify).
    RelStructure structure(const std::string& name) const;
};

/// Assemble and fully check the very special pentagon of a blocker.
Pentagon pentagon_from_blocker(const ModularityBlocker& b);

/// One Tarski squaring step; checks that the result is again a very special
/// pentagon whose gamma is a congruence and that the diagonal embedding
/// restricts everything correctly.
Pentagon pentagon_tarski_step(const Pentagon& p);

/// Bare algebra-with-marked-subset squaring: A -> A^2, U -> A x U.
struct TarskiStage {
    FiniteAlgebra algebra;
    std::vector<int> marked;
};
TarskiStage tarski_step(const FiniteAlgebra& a, const std::vector<int>& marked);

/// Pentagon structure on m x m: alpha/beta the coordinate kernels, gamma
/// relating (a,b) ~ (a,c) iff a lies in u or b = c.  Requires m >= 2 and
/// u a proper nonempty subset of [0, m).
RelStructure finite_P(int m, const std::vector<int>& u);

/// Structure on m elements with relations r1..r<kmax>, where r_k holds the
/// k-tuples having at least one coordinate in u.
RelStructure finite_B(int m, const std::vector<int>& u, int kmax);

/// Cross structure on m^n (one marked subset per coordinate): the coordinate
/// kernels alpha1..alphan plus the unary relation of all codes with some
/// coordinate i in us[i].  Every u must be a proper nonempty subset.
RelStructure finite_C(int m, const std::vector<std::vector<int>>& us);

/// Coordinate criterion for gamma-preservation of a componentwise operation
/// (comp1 acts on A-parts, comp2 on B-parts, both over m with equal arity):
/// for every argument row a with comp1(a) outside u, comp2(b) = comp2(b')
/// whenever b and b' agree on all positions whose a-entry is outside u.
bool blocker_polymorphism_criterion(const OpTable& comp1, const OpTable& comp2,
                                    int m, const std::vector<int>& u);

/// Build the product operation on m*m from two component tables.
OpTable product_op(const std::string& name, const OpTable& comp1,
                   const OpTable& comp2, int m);

enum class WitnessKind { pentagon, blocker };

/// A verified witness family; `checks` lists what was verified (identities,
/// idempotence, absorption / criterion per operation).  Construction throws
/// verification_error if any check fails.
struct WitnessFamily {
    WitnessKind kind;
    FiniteAlgebra algebra;  ///< on m*m (pentagon) or m (blocker)
    int m = 0;
    std::vector<int> u;
    int n_indices = 0;
    std::vector<std::string> checks;
};

/// Pentagon witness family on the product m x m.  For each index i < n the
/// componentwise binary f_i is i-th-constant off the diagonal; for each
/// ordered pair i != j the ternary p/q/r recognize the f-values:
/// p(x, f_j(x,z), z) = x and r(x, f_i(x,z), z) = z outright, while q returns
/// x against f_j and z against f_i in its B-component (first match wins).
/// Requires |u| >= n_indices + 1 and m >= n_indices, u proper nonempty.
WitnessFamily pentagon_witnesses(int m, const std::vector<int>& u,
                                 int n_indices);

/// Blocker witness family on m itself: f_i is constant i off the diagonal
/// (so indices must lie inside u), p answers x when its middle argument
/// equals f_j(x,z), q answers z against f_i, both defaulting into u; every
/// operation has a u-absorbing coordinate.
WitnessFamily blocker_witnesses(int m, const std::vector<int>& u,
                                int n_indices);

/// Exhaustively decide whether a two-element model of the witness identities
/// with k idempotent binary operations exists; true means NO model.  k in
/// 1..3; universe size fixed at 2.
bool no_small_model(WitnessKind kind, int k, int universe_size = 2);

} // namespace malcevlab
