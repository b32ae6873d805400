#pragma once

/// Deciders for Mal'cev-style conditions of a finite idempotent algebra.
///
/// Every question is answered twice, by two genuinely different routes, and
/// the answers are reconciled before anything is reported; a disagreement
/// throws verification_error and is never folded into a result.
///
///   day terms            authority: strong coloring against p0
///                        cross:     (x0, x3) in gamma v (alpha ^ beta)
///                                   inside F(4), with alpha = Cg(x0x3|x1x2),
///                                   beta = Cg(x0x1|x2x3), gamma = Cg(x1x2)
///   n-permutability      authority: strong coloring against w<n>
///                        cross:     (x0, xn) in the n-fold alternating
///                                   composition beta o alpha o ... in F(n+1),
///                                   alpha = Cg(x0x1|x2x3|...),
///                                   beta = Cg(x1x2|x3x4|...)
///   n-permutability      authority: strong coloring against order2
///   for some n           cross:     a compatible order with a strict pair on
///                                   A itself refutes; absence is inconclusive
///   congruence identity  authority: strong coloring against s
///   (Kearnes-Kiss)       cross:     (x0, x3) in delta v (alpha ^ beta) in
///                                   F(4), delta = Cg(x1x2x3)
///   n-cube term          authority: membership of (x0, ..., x0) in the
///                                   lifted cube relation over F(2)
///                        cross:     pinned coloring against b<n>
///
/// A coloring that does exist refutes the condition and is kept as the
/// witness; when the condition holds, the membership fact is unwound through
/// the closure derivations into explicit terms (a Day / Kearnes-Kiss chain,
/// a Hagemann-Mitschke chain, a cube term), and each witness is re-verified
/// syntactically by evaluating the defining identities before it is
/// returned.
///
/// Resource caps surface as inconclusive cross-checks or inconclusive
/// decisions, never as wrong answers.

#include <optional>
#include <string>
#include <vector>

#include "malcevlab/algebra.hpp"
#include "malcevlab/free_objects.hpp"
#include "malcevlab/relstruct.hpp"
#include "malcevlab/term.hpp"

namespace malcevlab {

struct CrossCheck {
    std::string name;
    std::optional<bool> result;  ///< nullopt: inconclusive (capped / one-way)
    std::string note;
};

struct Decision {
    std::string question;
    std::optional<bool> holds;
    std::string authority;
    std::vector<CrossCheck> cross_checks;

    /// Term witnesses: the full chain for day / kearnes-kiss / permutability,
    /// a single cube term for cube questions.  Empty when the condition
    /// fails or the witness was not reconstructible under the cap.
    std::vector<TermPtr> chain;

    /// The authority coloring outcome (map present when a coloring exists).
    std::optional<ColoringResult> coloring;

    std::vector<std::string> notes;
};

struct DeciderOptions {
    std::size_t cap = 2'000'000;
    /// Negate every conclusive cross-check result before reconciliation;
    /// used by tests to prove disagreement detection is live.
    bool flip_cross_checks = false;
};

Decision decide_day_terms(FreeCache& cache, const DeciderOptions& opts = {});
Decision decide_n_permutable(FreeCache& cache, int n,
                             const DeciderOptions& opts = {});
Decision decide_n_permutable_any(FreeCache& cache,
                                 const DeciderOptions& opts = {});
Decision decide_congruence_identity(FreeCache& cache,
                                    const DeciderOptions& opts = {});
Decision decide_n_cube_term(FreeCache& cache, int n,
                            const DeciderOptions& opts = {});

/// Search for a cube-term blocker: a subuniverse S with a proper nonempty
/// subset U such that every basic operation restricted to S has a
/// U-absorbing coordinate (a position that, fed a U-value, forces the result
/// into U).  First hit in (size, lex) order over subuniverses and subsets.
/// Requires an idempotent algebra of at most 16 elements.
struct BlockerResult {
    bool found = false;
    std::vector<int> subuniverse;
    std::vector<int> subset;
};
BlockerResult find_cube_blocker(const FiniteAlgebra& a);

/// Does every operation of the algebra preserve every relation of a
/// cross structure (a structure over A^sorts, carrying ProductInfo)?
bool check_cross_compatibility(const FiniteAlgebra& a, const RelStructure& cross);

/// Whole-algebra report.
struct ColoringReportEntry {
    std::string target;
    bool exists = false;   ///< some homomorphism from the free structure
    bool strong = false;   ///< a pinned one (x_b -> b)
    std::optional<std::vector<int>> map;  ///< pinned map, when small enough
};

struct Report {
    std::string algebra;
    int size = 0;
    bool idempotent = false;

    std::optional<bool> has_day_terms;
    std::string day_authority;
    std::optional<int> day_chain_length;

    std::optional<int> permutable_first_n;
    int permutable_checked_up_to = 0;

    std::optional<bool> permutable_any;
    std::string permutable_any_authority;

    std::optional<bool> has_kearnes_kiss;
    std::string congruence_identity_authority;

    std::optional<int> cube_first_n;
    int cube_checked_up_to = 0;
    std::optional<BlockerResult> cube_blocker;

    std::vector<ColoringReportEntry> colorings;
    std::vector<std::string> inconclusive;
    std::vector<std::pair<std::string, double>> timings_ms;
};

struct AnalyzeOptions {
    int max_perm = 4;
    int max_cube = 3;
    std::size_t cap = 2'000'000;
    bool timings = false;
    bool flip_cross_checks = false;
};

/// Run every decider over one algebra.  Requires idempotence (the coloring
/// criteria are stated for idempotent algebras); throws precondition_error
/// otherwise.
Report analyze(const FiniteAlgebra& a, const AnalyzeOptions& opts = {});

} // namespace malcevlab
