#pragma once

/// Terms over an operation signature.
///
/// A term is either a variable x_i or an operation applied to subterms.
/// Nodes are immutable and shared through shared_ptr, so terms recovered from
/// closure derivations form DAGs: a subterm reused many times is stored once.
/// Evaluation is vectorized — eval_table computes the whole value table of a
/// term over all assignments at once, walking each DAG node once — which is
/// what makes identity checking on reconstructed witnesses cheap even when
/// the term tree, written out, would be enormous.
///
/// Value tables use the same convention as operation tables: the assignment
/// (v_0, ..., v_{k-1}) to variables x_0, ..., x_{k-1} sits at index
/// v_0 * n^{k-1} + ... + v_{k-1} (first variable most significant).

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "malcevlab/algebra.hpp"

namespace malcevlab {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    int var = -1;              ///< >= 0 for a variable leaf
    int op = -1;               ///< operation index for an application
    std::vector<TermPtr> args;

    bool is_var() const { return var >= 0; }

    static TermPtr make_var(int v);
    static TermPtr make_app(int op, std::vector<TermPtr> args);
};

/// Render with the algebra's operation names and variable names x0, x1, ...
/// (or the provided names).  Purely syntactic; shared subterms are printed
/// each time they occur, so the output can be exponentially larger than the
/// DAG.
std::string term_to_string(const TermPtr& t, const FiniteAlgebra& a,
                           const std::vector<std::string>& var_names = {});

/// Number of distinct DAG nodes.
std::size_t term_dag_size(const TermPtr& t);

/// Full value table of the term over `nvars` variables (variables with index
/// >= nvars are an error).  One pass over the DAG; each node costs
/// O(size^nvars) table lookups.
std::vector<int> eval_table(const TermPtr& t, const FiniteAlgebra& a, int nvars);

/// Evaluate at a single assignment.
int eval_term(const TermPtr& t, const FiniteAlgebra& a,
              std::span<const int> assignment);

/// Do lhs and rhs have identical value tables over nvars variables?
bool satisfies_identity(const FiniteAlgebra& a, const TermPtr& lhs,
                        const TermPtr& rhs, int nvars);

/// Substitute variables simultaneously: x_i becomes replacement[i]
/// (out-of-range variables are an error).  Shares structure with the input.
TermPtr substitute(const TermPtr& t, const std::vector<TermPtr>& replacement);

} // namespace malcevlab
