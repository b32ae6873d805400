#include "malcevlab/term.hpp"

#include <functional>
#include <unordered_map>

namespace malcevlab {

TermPtr Term::make_var(int v) {
    auto t = std::make_shared<Term>();
    t->var = v;
    return t;
}

TermPtr Term::make_app(int op, std::vector<TermPtr> args) {
    auto t = std::make_shared<Term>();
    t->op = op;
    t->args = std::move(args);
    return t;
}

std::string term_to_string(const TermPtr& t, const FiniteAlgebra& a,
                           const std::vector<std::string>& var_names) {
    std::string out;
    // Explicit stack, since reconstructed witnesses can be deep.
    struct Frame {
        const Term* node;
        std::size_t next_child = 0;
    };
    std::vector<Frame> stack{{t.get()}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        const Term* n = f.node;
        if (n->is_var()) {
            if (static_cast<std::size_t>(n->var) < var_names.size())
                out += var_names[static_cast<std::size_t>(n->var)];
            else
                out += "x" + std::to_string(n->var);
            stack.pop_back();
            continue;
        }
        if (f.next_child == 0) {
            out += a.ops[static_cast<std::size_t>(n->op)].name;
            out += "(";
        } else if (f.next_child < n->args.size()) {
            out += ",";
        }
        if (f.next_child < n->args.size()) {
            const Term* child = n->args[f.next_child].get();
            ++f.next_child;
            stack.push_back({child});
        } else {
            out += ")";
            stack.pop_back();
        }
    }
    return out;
}

std::size_t term_dag_size(const TermPtr& t) {
    std::unordered_map<const Term*, char> seen;
    std::vector<const Term*> stack{t.get()};
    while (!stack.empty()) {
        const Term* n = stack.back();
        stack.pop_back();
        if (!seen.emplace(n, 1).second)
            continue;
        for (const TermPtr& c : n->args)
            stack.push_back(c.get());
    }
    return seen.size();
}

std::vector<int> eval_table(const TermPtr& t, const FiniteAlgebra& a, int nvars) {
    std::size_t cells = 1;
    for (int i = 0; i < nvars; ++i)
        cells *= static_cast<std::size_t>(a.size);

    std::unordered_map<const Term*, std::vector<int>> memo;
    // Post-order over the DAG without recursion.
    std::vector<std::pair<const Term*, bool>> stack{{t.get(), false}};
    std::vector<int> col;
    while (!stack.empty()) {
        auto [n, expanded] = stack.back();
        stack.pop_back();
        if (memo.count(n))
            continue;
        if (!expanded) {
            stack.push_back({n, true});
            for (const TermPtr& c : n->args)
                stack.push_back({c.get(), false});
            continue;
        }
        std::vector<int> tab(cells);
        if (n->is_var()) {
            if (n->var >= nvars)
                throw input_error("eval_table: term uses variable x" +
                                  std::to_string(n->var) + " but only " +
                                  std::to_string(nvars) + " variables are in scope");
            // stride of x_v with the first variable most significant
            std::size_t stride = 1;
            for (int i = n->var + 1; i < nvars; ++i)
                stride *= static_cast<std::size_t>(a.size);
            for (std::size_t idx = 0; idx < cells; ++idx)
                tab[idx] = static_cast<int>(
                    (idx / stride) % static_cast<std::size_t>(a.size));
        } else {
            const OpTable& op = a.ops[static_cast<std::size_t>(n->op)];
            std::vector<const std::vector<int>*> kids;
            kids.reserve(n->args.size());
            for (const TermPtr& c : n->args)
                kids.push_back(&memo.at(c.get()));
            col.resize(n->args.size());
            for (std::size_t idx = 0; idx < cells; ++idx) {
                for (std::size_t q = 0; q < kids.size(); ++q)
                    col[q] = (*kids[q])[idx];
                tab[idx] = op.apply(col, a.size);
            }
        }
        memo.emplace(n, std::move(tab));
    }
    return memo.at(t.get());
}

int eval_term(const TermPtr& t, const FiniteAlgebra& a,
              std::span<const int> assignment) {
    std::unordered_map<const Term*, int> memo;
    std::vector<std::pair<const Term*, bool>> stack{{t.get(), false}};
    std::vector<int> col;
    while (!stack.empty()) {
        auto [n, expanded] = stack.back();
        stack.pop_back();
        if (memo.count(n))
            continue;
        if (!expanded) {
            stack.push_back({n, true});
            for (const TermPtr& c : n->args)
                stack.push_back({c.get(), false});
            continue;
        }
        int v;
        if (n->is_var()) {
            if (static_cast<std::size_t>(n->var) >= assignment.size())
                throw input_error("eval_term: assignment too short");
            v = assignment[static_cast<std::size_t>(n->var)];
        } else {
            col.resize(n->args.size());
            for (std::size_t q = 0; q < n->args.size(); ++q)
                col[q] = memo.at(n->args[q].get());
            v = a.apply(n->op, col);
        }
        memo.emplace(n, v);
    }
    return memo.at(t.get());
}

bool satisfies_identity(const FiniteAlgebra& a, const TermPtr& lhs,
                        const TermPtr& rhs, int nvars) {
    return eval_table(lhs, a, nvars) == eval_table(rhs, a, nvars);
}

TermPtr substitute(const TermPtr& t, const std::vector<TermPtr>& replacement) {
    std::unordered_map<const Term*, TermPtr> memo;
    std::vector<std::pair<const Term*, bool>> stack{{t.get(), false}};
    while (!stack.empty()) {
        auto [n, expanded] = stack.back();
        stack.pop_back();
        if (memo.count(n))
            continue;
        if (!expanded) {
            stack.push_back({n, true});
            for (const TermPtr& c : n->args)
                stack.push_back({c.get(), false});
            continue;
        }
        if (n->is_var()) {
            if (static_cast<std::size_t>(n->var) >= replacement.size())
                throw input_error("substitute: no replacement for variable x" +
                                  std::to_string(n->var));
            memo.emplace(n, replacement[static_cast<std::size_t>(n->var)]);
        } else {
            std::vector<TermPtr> args;
            args.reserve(n->args.size());
            for (const TermPtr& c : n->args)
                args.push_back(memo.at(c.get()));
            memo.emplace(n, Term::make_app(n->op, std::move(args)));
        }
    }
    return memo.at(t.get());
}

} // namespace malcevlab
