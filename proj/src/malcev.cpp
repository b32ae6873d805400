#include "malcevlab/malcev.hpp"

#include <algorithm>
#include <chrono>

namespace malcevlab {

namespace {

void require_idempotent(const FiniteAlgebra& a, const char* who) {
    if (!a.is_idempotent())
        throw precondition_error(std::string(who) +
                                 ": the algebra must be idempotent");
}

std::string tristate(std::optional<bool> v) {
    if (!v)
        return "inconclusive";
    return *v ? "yes" : "no";
}

/// Flip injected faults, then compare every conclusive cross-check against
/// the authority's answer.
void reconcile(Decision& d, bool flip) {
    for (CrossCheck& c : d.cross_checks)
        if (flip && c.result)
            c.result = !*c.result;
    if (!d.holds)
        return;
    for (const CrossCheck& c : d.cross_checks) {
        if (c.result && *c.result != *d.holds)
            throw verification_error(
                "question '" + d.question + "': authority route '" +
                d.authority + "' answered " + tristate(d.holds) +
                " but cross-check '" + c.name + "' answered " +
                tristate(c.result));
    }
}

/// Shortest path between two elements along the union of two partitions
/// (consecutive path elements share a p-class or a q-class).  Empty result:
/// no path.
std::vector<int> bfs_path(const Partition& p, const Partition& q, int s, int t) {
    int n = p.size();
    std::vector<int> parent(static_cast<std::size_t>(n), -2);
    std::vector<int> queue{s};
    parent[static_cast<std::size_t>(s)] = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int u = queue[head];
        if (u == t)
            break;
        for (int v = 0; v < n; ++v) {
            if (parent[static_cast<std::size_t>(v)] != -2)
                continue;
            if (p.same(u, v) || q.same(u, v)) {
                parent[static_cast<std::size_t>(v)] = u;
                queue.push_back(v);
            }
        }
    }
    if (parent[static_cast<std::size_t>(t)] == -2)
        return {};
    std::vector<int> path;
    for (int v = t; v != -1; v = parent[static_cast<std::size_t>(v)])
        path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

/// Turn a p/q-path into a strictly alternating chain (p-steps at even chain
/// positions, q-steps at odd), padding with repeats where the parity does
/// not match.  Both partitions are reflexive, so a repeat is always legal.
std::vector<int> alternate_chain(const Partition& p, const Partition& q,
                                 const std::vector<int>& path) {
    std::vector<int> chain{path[0]};
    for (std::size_t e = 0; e + 1 < path.size(); ++e) {
        int u = path[e], v = path[e + 1];
        const Partition& expected = (chain.size() - 1) % 2 == 0 ? p : q;
        const Partition& other = (chain.size() - 1) % 2 == 0 ? q : p;
        if (expected.same(u, v)) {
            chain.push_back(v);
        } else {
            if (!other.same(u, v))
                throw verification_error(
                    "alternate_chain: path edge lies in neither relation");
            chain.push_back(u);  // pad
            chain.push_back(v);
        }
    }
    return chain;
}

/// Substitution that collapses each class of a generator partition to its
/// least member, renumbered consecutively.  Returns the replacement terms
/// and the variable count after renumbering.
std::pair<std::vector<TermPtr>, int> collapse_substitution(
    const Partition& gens) {
    auto cls = gens.classes();
    std::vector<TermPtr> repl(static_cast<std::size_t>(gens.size()));
    for (std::size_t c = 0; c < cls.size(); ++c)
        for (int g : cls[c])
            repl[static_cast<std::size_t>(g)] =
                Term::make_var(static_cast<int>(c));
    return {repl, static_cast<int>(cls.size())};
}

/// Verify a join-membership chain syntactically: consecutive terms must
/// satisfy the defining identity of the step's relation, and the endpoints
/// must be the outer variables.  `even_part` is the relation used at even
/// steps; odd steps check both `odd_a` and `odd_b` collapses.
void verify_chain_identities(const FiniteAlgebra& alg, const FreeAlgebra& F,
                             const std::vector<int>& chain,
                             const Partition& even_gens,
                             const Partition& odd_gens_a,
                             const Partition& odd_gens_b, int first_gen,
                             int last_gen) {
    int k = F.n_generators;
    std::vector<TermPtr> terms;
    terms.reserve(chain.size());
    for (int e : chain)
        terms.push_back(F.term_of(e));

    if (!satisfies_identity(alg, terms.front(), Term::make_var(first_gen), k))
        throw verification_error("witness chain does not start at x" +
                                 std::to_string(first_gen));
    if (!satisfies_identity(alg, terms.back(), Term::make_var(last_gen), k))
        throw verification_error("witness chain does not end at x" +
                                 std::to_string(last_gen));

    auto [even_repl, even_vars] = collapse_substitution(even_gens);
    auto [odda_repl, odda_vars] = collapse_substitution(odd_gens_a);
    auto [oddb_repl, oddb_vars] = collapse_substitution(odd_gens_b);

    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        if (i % 2 == 0) {
            if (!satisfies_identity(alg, substitute(terms[i], even_repl),
                                    substitute(terms[i + 1], even_repl),
                                    even_vars))
                throw verification_error(
                    "witness chain: even step " + std::to_string(i) +
                    " fails its collapse identity");
        } else {
            if (!satisfies_identity(alg, substitute(terms[i], odda_repl),
                                    substitute(terms[i + 1], odda_repl),
                                    odda_vars) ||
                !satisfies_identity(alg, substitute(terms[i], oddb_repl),
                                    substitute(terms[i + 1], oddb_repl),
                                    oddb_vars))
                throw verification_error(
                    "witness chain: odd step " + std::to_string(i) +
                    " fails a collapse identity");
        }
    }
}

/// Day-style decision shared by the day and Kearnes-Kiss questions: the
/// authority colors against `target`; the cross-check asks whether
/// (x0, x3) lies in even v (alpha ^ beta) inside F(4), where `even_classes`
/// generates the even-step congruence (gamma for day, delta for KK).
Decision decide_join_question(FreeCache& cache, const DeciderOptions& opts,
                              const std::string& question,
                              const RelStructure& target,
                              const std::vector<std::vector<int>>& even_classes,
                              const std::string& cross_name) {
    require_idempotent(cache.base(), question.c_str());
    Decision d;
    d.question = question;
    d.authority = "coloring:" + target.name;
    try {
        ColoringResult col = strong_coloring(cache, target);
        d.holds = !col.found;
        d.coloring = std::move(col);
    } catch (const cap_exceeded& e) {
        d.notes.push_back(std::string("authority capped: ") + e.what());
    }

    Partition even_gens = Partition::from_classes(4, even_classes);
    Partition alpha_gens = Partition::from_classes(4, {{0, 3}, {1, 2}});
    Partition beta_gens = Partition::from_classes(4, {{0, 1}, {2, 3}});

    CrossCheck cc;
    cc.name = cross_name;
    try {
        const FreeAlgebra& F4 = cache.get(4);
        Partition even = refine_congruence(F4, even_gens);
        Partition ab = meet(refine_congruence(F4, alpha_gens),
                            refine_congruence(F4, beta_gens));
        Partition jn = join(even, ab);
        bool member = jn.same(F4.generator(0), F4.generator(3));
        cc.result = member;
        if (member) {
            auto path = bfs_path(even, ab, F4.generator(0), F4.generator(3));
            if (path.empty())
                throw verification_error(
                    question + ": join membership without a connecting path");
            auto chain = alternate_chain(even, ab, path);
            verify_chain_identities(cache.base(), F4, chain, even_gens,
                                    alpha_gens, beta_gens, 0, 3);
            d.chain.reserve(chain.size());
            for (int e : chain)
                d.chain.push_back(F4.term_of(e));
        }
    } catch (const cap_exceeded& e) {
        cc.note = std::string("capped: ") + e.what();
    }
    d.cross_checks.push_back(std::move(cc));
    reconcile(d, opts.flip_cross_checks);
    return d;
}

} // namespace

Decision decide_day_terms(FreeCache& cache, const DeciderOptions& opts) {
    return decide_join_question(cache, opts, "day-terms", build_p0(),
                                {{0}, {1, 2}, {3}}, "congruence-join:f4");
}

Decision decide_congruence_identity(FreeCache& cache,
                                    const DeciderOptions& opts) {
    return decide_join_question(cache, opts, "kearnes-kiss", build_s(),
                                {{0}, {1, 2, 3}}, "congruence-join:f4");
}

namespace {

/// Witness chain for an alternating-composition membership: parents per
/// level, least-parent choice, deterministic.
std::optional<std::vector<int>> compose_chain(const Partition& first,
                                              const Partition& second,
                                              int steps, int s, int t) {
    int n = first.size();
    std::vector<std::vector<int>> level_parent(
        static_cast<std::size_t>(steps) + 1,
        std::vector<int>(static_cast<std::size_t>(n), -1));
    std::vector<char> frontier(static_cast<std::size_t>(n), 0);
    frontier[static_cast<std::size_t>(s)] = 1;
    std::vector<char> next(static_cast<std::size_t>(n));
    for (int step = 1; step <= steps; ++step) {
        const Partition& rel = (step % 2 == 1) ? first : second;
        std::vector<char> roots(static_cast<std::size_t>(n), 0);
        for (int x = 0; x < n; ++x)
            if (frontier[static_cast<std::size_t>(x)])
                roots[static_cast<std::size_t>(rel.find(x))] = 1;
        std::fill(next.begin(), next.end(), 0);
        for (int v = 0; v < n; ++v) {
            if (!roots[static_cast<std::size_t>(rel.find(v))])
                continue;
            next[static_cast<std::size_t>(v)] = 1;
            for (int u = 0; u < n; ++u) {
                if (frontier[static_cast<std::size_t>(u)] && rel.same(u, v)) {
                    level_parent[static_cast<std::size_t>(step)]
                                [static_cast<std::size_t>(v)] = u;
                    break;
                }
            }
        }
        frontier = next;
    }
    if (!frontier[static_cast<std::size_t>(t)])
        return std::nullopt;
    std::vector<int> chain(static_cast<std::size_t>(steps) + 1);
    chain[static_cast<std::size_t>(steps)] = t;
    for (int step = steps; step >= 1; --step)
        chain[static_cast<std::size_t>(step - 1)] =
            level_parent[static_cast<std::size_t>(step)]
                        [static_cast<std::size_t>(chain[static_cast<std::size_t>(step)])];
    return chain;
}

} // namespace

Decision decide_n_permutable(FreeCache& cache, int n,
                             const DeciderOptions& opts) {
    if (n < 2)
        throw input_error("decide_n_permutable: n must be at least 2");
    require_idempotent(cache.base(), "decide_n_permutable");
    Decision d;
    d.question = "permutable:" + std::to_string(n);
    RelStructure wn = build_wn(n);
    d.authority = "coloring:" + wn.name;
    try {
        ColoringResult col = strong_coloring(cache, wn);
        d.holds = !col.found;
        d.coloring = std::move(col);
    } catch (const cap_exceeded& e) {
        d.notes.push_back(std::string("authority capped: ") + e.what());
    }

    CrossCheck cc;
    cc.name = "congruence-compose:f" + std::to_string(n + 1);
    try {
        const FreeAlgebra& F = cache.get(n + 1);
        Partition alpha_gens =
            relation_as_partition(*wn.find_relation("alpha"), n + 1);
        Partition beta_gens =
            relation_as_partition(*wn.find_relation("beta"), n + 1);
        Partition alpha = refine_congruence(F, alpha_gens);
        Partition beta = refine_congruence(F, beta_gens);
        bool member =
            in_compose_n(beta, alpha, n, F.generator(0), F.generator(n));
        cc.result = member;
        if (member && F.size() <= 4096) {
            auto chain =
                compose_chain(beta, alpha, n, F.generator(0), F.generator(n));
            if (!chain)
                throw verification_error(
                    "decide_n_permutable: membership without a chain");
            // Even chain steps are beta-steps here (the composition starts
            // with beta), odd steps alpha; both collapse identities of an
            // alpha-step coincide, so pass alpha twice.
            verify_chain_identities(cache.base(), F, *chain, beta_gens,
                                    alpha_gens, alpha_gens, 0, n);
            for (int e : *chain)
                d.chain.push_back(F.term_of(e));
        }
    } catch (const cap_exceeded& e) {
        cc.note = std::string("capped: ") + e.what();
    }
    d.cross_checks.push_back(std::move(cc));
    reconcile(d, opts.flip_cross_checks);
    return d;
}

Decision decide_n_permutable_any(FreeCache& cache, const DeciderOptions& opts) {
    require_idempotent(cache.base(), "decide_n_permutable_any");
    Decision d;
    d.question = "permutable-any";
    d.authority = "coloring:order2";
    try {
        ColoringResult col = strong_coloring(cache, build_order2());
        d.holds = !col.found;
        d.coloring = std::move(col);
    } catch (const cap_exceeded& e) {
        d.notes.push_back(std::string("authority capped: ") + e.what());
    }

    CrossCheck cc;
    cc.name = "compatible-order";
    auto ord = find_compatible_order(cache.base());
    if (ord) {
        cc.result = false;  // a strict compatible order refutes permutability
    } else {
        cc.note =
            "no compatible order with a strict pair on the algebra itself; "
            "this direction alone cannot confirm";
    }
    d.cross_checks.push_back(std::move(cc));
    reconcile(d, opts.flip_cross_checks);
    return d;
}

Decision decide_n_cube_term(FreeCache& cache, int n,
                            const DeciderOptions& opts) {
    if (n < 2)
        throw input_error("decide_n_cube_term: n must be at least 2");
    require_idempotent(cache.base(), "decide_n_cube_term");
    Decision d;
    d.question = "cube-term:" + std::to_string(n);
    d.authority = "subpower-membership:f2";
    RelStructure bn = build_bn(n);
    const Relation& pattern = bn.rels[0];

    try {
        FreeStructure fs = free_structure(cache, bn, RefineMode::automatic);
        const FreeAlgebra& F = *fs.F;
        const FreeRelation& R = fs.rels[0];

        std::vector<int> allx(static_cast<std::size_t>(n), F.generator(0));
        int idx = -1;
        for (std::size_t i = 0; i < R.tuples.size(); ++i)
            if (R.tuples[i] == allx) {
                idx = static_cast<int>(i);
                break;
            }
        d.holds = (idx >= 0);

        CrossCheck cc;
        cc.name = "coloring:" + bn.name;
        HomProblem hp;
        hp.n_vars = F.size();
        hp.n_vals = 2;
        hp.pins = {{F.generator(0), 0}, {F.generator(1), 1}};
        for (const auto& t : R.tuples) {
            HomProblem::TupleConstraint tc;
            tc.scope = t;
            tc.targets = &pattern.tuples;
            hp.tuple_constraints.push_back(std::move(tc));
        }
        auto sol = solve_hom(hp);
        cc.result = !sol.has_value();
        if (sol) {
            ColoringResult col;
            col.found = true;
            col.map = std::move(*sol);
            col.free_size = static_cast<std::size_t>(F.size());
            d.coloring = std::move(col);
        }
        d.cross_checks.push_back(std::move(cc));

        if (idx >= 0) {
            TermPtr t = term_from_derivations(R.how, idx);
            // Re-verify the n cube identities: substituting x for 0 and y
            // for 1 down each pattern column must evaluate to x.
            for (int j = 0; j < n; ++j) {
                std::vector<TermPtr> repl;
                repl.reserve(pattern.tuples.size());
                for (const auto& pat : pattern.tuples)
                    repl.push_back(
                        Term::make_var(pat[static_cast<std::size_t>(j)]));
                if (!satisfies_identity(cache.base(), substitute(t, repl),
                                        Term::make_var(0), 2))
                    throw verification_error(
                        "cube witness fails identity for row " +
                        std::to_string(j));
            }
            d.chain = {t};
        }
    } catch (const cap_exceeded& e) {
        d.notes.push_back(std::string("capped: ") + e.what());
    }
    reconcile(d, opts.flip_cross_checks);
    return d;
}

BlockerResult find_cube_blocker(const FiniteAlgebra& a) {
    require_idempotent(a, "find_cube_blocker");
    if (a.size > 16)
        throw precondition_error(
            "find_cube_blocker: subuniverse enumeration is exponential; "
            "universes above 16 elements are not supported");
    BlockerResult out;
    for (const auto& s : all_subuniverses(a)) {
        if (s.size() < 2)
            continue;
        // proper nonempty subsets of s, by (size, lex)
        std::size_t k = s.size();
        for (std::size_t usize = 1; usize < k; ++usize) {
            std::vector<std::size_t> comb(usize);
            for (std::size_t i = 0; i < usize; ++i)
                comb[i] = i;
            while (true) {
                std::vector<char> in_u(static_cast<std::size_t>(a.size), 0);
                std::vector<int> u;
                for (std::size_t pos : comb) {
                    u.push_back(s[pos]);
                    in_u[static_cast<std::size_t>(s[pos])] = 1;
                }
                // every operation restricted to s needs a u-absorbing spot
                bool all_ops_ok = true;
                for (const OpTable& op : a.ops) {
                    int m = op.arity;
                    bool op_ok = false;
                    std::vector<int> args(static_cast<std::size_t>(m));
                    for (int i = 0; i < m && !op_ok; ++i) {
                        bool absorbing = true;
                        std::vector<std::size_t> odo(static_cast<std::size_t>(m),
                                                     0);
                        while (absorbing) {
                            for (int q = 0; q < m; ++q)
                                args[static_cast<std::size_t>(q)] =
                                    s[odo[static_cast<std::size_t>(q)]];
                            if (in_u[static_cast<std::size_t>(
                                    args[static_cast<std::size_t>(i)])] &&
                                !in_u[static_cast<std::size_t>(
                                    op.apply(args, a.size))])
                                absorbing = false;
                            int j = m - 1;
                            for (; j >= 0; --j) {
                                if (odo[static_cast<std::size_t>(j)] + 1 < k) {
                                    ++odo[static_cast<std::size_t>(j)];
                                    std::fill(odo.begin() + j + 1, odo.end(),
                                              0);
                                    break;
                                }
                            }
                            if (j < 0)
                                break;
                        }
                        op_ok = absorbing;
                    }
                    if (!op_ok) {
                        all_ops_ok = false;
                        break;
                    }
                }
                if (all_ops_ok) {
                    out.found = true;
                    out.subuniverse = s;
                    out.subset = u;
                    return out;
                }
                // next combination in lex order
                bool advanced = false;
                std::size_t j = usize;
                while (j-- > 0) {
                    if (comb[j] + 1 <= k - (usize - j)) {
                        ++comb[j];
                        for (std::size_t l = j + 1; l < usize; ++l)
                            comb[l] = comb[l - 1] + 1;
                        advanced = true;
                        break;
                    }
                }
                if (!advanced)
                    break;
            }
        }
    }
    return out;
}

bool check_cross_compatibility(const FiniteAlgebra& a,
                               const RelStructure& cross) {
    if (!cross.product)
        throw input_error(
            "check_cross_compatibility: structure lacks product bookkeeping");
    if (cross.product->sort_size != a.size)
        throw input_error("check_cross_compatibility: sort size " +
                          std::to_string(cross.product->sort_size) +
                          " does not match the algebra's universe");
    FiniteAlgebra power = direct_power(a, cross.product->sorts);
    if (power.size != cross.size)
        throw input_error(
            "check_cross_compatibility: structure universe is not the full power");
    return compatible(cross, power);
}

Report analyze(const FiniteAlgebra& a, const AnalyzeOptions& opts) {
    a.validate();
    if (!a.is_idempotent())
        throw precondition_error(
            "analyze: the coloring criteria require an idempotent algebra");

    Report r;
    r.algebra = a.name;
    r.size = a.size;
    r.idempotent = true;

    FreeCache cache(a, opts.cap);
    DeciderOptions dop;
    dop.cap = opts.cap;
    dop.flip_cross_checks = opts.flip_cross_checks;

    using clock = std::chrono::steady_clock;
    auto timed = [&](const std::string& name, auto&& fn) {
        auto t0 = clock::now();
        fn();
        auto t1 = clock::now();
        if (opts.timings)
            r.timings_ms.emplace_back(
                name,
                std::chrono::duration<double, std::milli>(t1 - t0).count());
    };

    timed("day", [&] {
        Decision day = decide_day_terms(cache, dop);
        r.has_day_terms = day.holds;
        r.day_authority = day.authority;
        if (day.holds && *day.holds && !day.chain.empty())
            r.day_chain_length = static_cast<int>(day.chain.size());
        if (!day.holds)
            r.inconclusive.push_back("day");
    });

    timed("permutable", [&] {
        for (int n = 2; n <= opts.max_perm; ++n) {
            Decision p = decide_n_permutable(cache, n, dop);
            r.permutable_checked_up_to = n;
            if (!p.holds) {
                r.inconclusive.push_back("permutable:" + std::to_string(n));
            } else if (*p.holds) {
                r.permutable_first_n = n;
                break;
            }
        }
    });

    timed("permutable-any", [&] {
        Decision p = decide_n_permutable_any(cache, dop);
        r.permutable_any = p.holds;
        r.permutable_any_authority = p.authority;
        if (!p.holds)
            r.inconclusive.push_back("permutable-any");
    });

    timed("congruence-identity", [&] {
        Decision kk = decide_congruence_identity(cache, dop);
        r.has_kearnes_kiss = kk.holds;
        r.congruence_identity_authority = kk.authority;
        if (!kk.holds)
            r.inconclusive.push_back("congruence-identity");
    });

    timed("cube", [&] {
        for (int n = 2; n <= opts.max_cube; ++n) {
            Decision c = decide_n_cube_term(cache, n, dop);
            r.cube_checked_up_to = n;
            if (!c.holds) {
                r.inconclusive.push_back("cube:" + std::to_string(n));
            } else if (*c.holds) {
                r.cube_first_n = n;
                break;
            }
        }
    });

    timed("blocker", [&] {
        if (a.size <= 16)
            r.cube_blocker = find_cube_blocker(a);
    });

    timed("colorings", [&] {
        std::vector<std::pair<std::string, RelStructure>> targets;
        targets.emplace_back("p0", build_p0());
        targets.emplace_back("order2", build_order2());
        targets.emplace_back("s", build_s());
        for (int n = 2; n <= opts.max_perm; ++n)
            targets.emplace_back("w" + std::to_string(n), build_wn(n));
        for (int n = 2; n <= opts.max_cube; ++n)
            targets.emplace_back("b" + std::to_string(n), build_bn(n));
        for (auto& [name, target] : targets) {
            try {
                ColoringReportEntry e;
                e.target = name;
                e.exists = strong_coloring(cache, target, false).found;
                ColoringResult sc = strong_coloring(cache, target, true);
                e.strong = sc.found;
                if (sc.found && sc.free_size <= 64)
                    e.map = sc.map;
                r.colorings.push_back(std::move(e));
            } catch (const cap_exceeded&) {
                r.inconclusive.push_back("coloring:" + name);
            }
        }
    });

    return r;
}

} // namespace malcevlab
