#include "malcevlab/relstruct.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>

namespace malcevlab {

void Relation::normalize() {
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
}

bool Relation::contains(std::span<const int> t) const {
    auto cmp = [](const std::vector<int>& a, std::span<const int> b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                            b.end());
    };
    auto it = std::lower_bound(tuples.begin(), tuples.end(), t, cmp);
    return it != tuples.end() && it->size() == t.size() &&
           std::equal(it->begin(), it->end(), t.begin());
}

void RelStructure::validate_and_normalize() {
    if (size <= 0)
        throw input_error("structure '" + name + "': universe must be nonempty");
    std::set<std::string> seen;
    for (Relation& r : rels) {
        if (r.name.empty())
            throw input_error("structure '" + name + "': relation with empty name");
        if (!seen.insert(r.name).second)
            throw input_error("structure '" + name + "': duplicate relation '" +
                              r.name + "'");
        if (r.arity <= 0)
            throw input_error("relation '" + r.name + "': arity must be positive");
        for (const auto& t : r.tuples) {
            if (static_cast<int>(t.size()) != r.arity)
                throw input_error("relation '" + r.name +
                                  "': tuple of wrong length");
            for (int v : t)
                if (v < 0 || v >= size)
                    throw input_error("relation '" + r.name +
                                      "': tuple entry out of range");
        }
        r.normalize();
    }
}

const Relation* RelStructure::find_relation(const std::string& rel_name) const {
    for (const Relation& r : rels)
        if (r.name == rel_name)
            return &r;
    return nullptr;
}

Partition relation_as_partition(const Relation& r, int size) {
    if (r.arity != 2)
        throw input_error("relation '" + r.name + "' is not binary");
    BinRelation b(size);
    for (const auto& t : r.tuples)
        b.set(t[0], t[1]);
    if (!b.is_reflexive() || !b.is_symmetric() || !b.is_transitive())
        throw input_error("relation '" + r.name + "' is not an equivalence");
    Partition p(size);
    for (const auto& t : r.tuples)
        p.unite(t[0], t[1]);
    return p;
}

Relation partition_as_relation(const std::string& name, const Partition& p) {
    Relation r;
    r.name = name;
    r.arity = 2;
    for (int i = 0; i < p.size(); ++i)
        for (int j = 0; j < p.size(); ++j)
            if (p.same(i, j))
                r.tuples.push_back({i, j});
    r.normalize();
    return r;
}

RelStructure build_p0() {
    RelStructure s;
    s.name = "p0";
    s.size = 4;
    s.rels.push_back(partition_as_relation(
        "alpha", Partition::from_classes(4, {{0, 3}, {1, 2}})));
    s.rels.push_back(partition_as_relation(
        "beta", Partition::from_classes(4, {{0, 1}, {2, 3}})));
    s.rels.push_back(partition_as_relation(
        "gamma", Partition::from_classes(4, {{0}, {1, 2}, {3}})));
    s.validate_and_normalize();
    return s;
}

RelStructure build_wn(int n) {
    if (n < 2)
        throw input_error("build_wn: n must be at least 2");
    RelStructure s;
    s.name = "w" + std::to_string(n);
    s.size = n + 1;
    std::vector<std::vector<int>> acls, bcls;
    for (int i = 0; i <= n; i += 2) {
        std::vector<int> c{i};
        if (i + 1 <= n)
            c.push_back(i + 1);
        acls.push_back(std::move(c));
    }
    bcls.push_back({0});
    for (int i = 1; i <= n; i += 2) {
        std::vector<int> c{i};
        if (i + 1 <= n)
            c.push_back(i + 1);
        bcls.push_back(std::move(c));
    }
    s.rels.push_back(partition_as_relation(
        "alpha", Partition::from_classes(n + 1, acls)));
    s.rels.push_back(partition_as_relation(
        "beta", Partition::from_classes(n + 1, bcls)));
    s.validate_and_normalize();
    return s;
}

RelStructure build_order2() {
    RelStructure s;
    s.name = "order2";
    s.size = 2;
    Relation leq;
    leq.name = "leq";
    leq.arity = 2;
    leq.tuples = {{0, 0}, {0, 1}, {1, 1}};
    s.rels.push_back(std::move(leq));
    s.validate_and_normalize();
    return s;
}

RelStructure build_s() {
    RelStructure s;
    s.name = "s";
    s.size = 2;
    Relation j;
    j.name = "join";
    j.arity = 3;
    j.tuples = {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
    s.rels.push_back(std::move(j));
    s.validate_and_normalize();
    return s;
}

namespace {

Relation cube_relation(const std::string& name, int n) {
    Relation r;
    r.name = name;
    r.arity = n;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> t(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            t[static_cast<std::size_t>(i)] =
                static_cast<int>((mask >> (n - 1 - i)) & 1u);
        r.tuples.push_back(std::move(t));
    }
    return r;
}

} // namespace

RelStructure build_bn(int n) {
    if (n < 1 || n > 20)
        throw input_error("build_bn: n must be between 1 and 20");
    RelStructure s;
    s.name = "b" + std::to_string(n);
    s.size = 2;
    s.rels.push_back(cube_relation("r", n));
    s.validate_and_normalize();
    return s;
}

RelStructure build_b0(int kmax) {
    if (kmax < 1 || kmax > 20)
        throw input_error("build_b0: width must be between 1 and 20");
    RelStructure s;
    s.name = "b0k" + std::to_string(kmax);
    s.size = 2;
    for (int k = 1; k <= kmax; ++k)
        s.rels.push_back(cube_relation("r" + std::to_string(k), k));
    s.validate_and_normalize();
    return s;
}

std::optional<PolymorphismViolation> polymorphism_violation(
    const RelStructure& s, const FiniteAlgebra& a) {
    if (s.size != a.size)
        throw input_error("polymorphism_violation: universe sizes differ");
    for (const OpTable& op : a.ops) {
        int m = op.arity;
        for (const Relation& rel : s.rels) {
            if (rel.tuples.empty())
                continue;
            std::size_t nrows = rel.tuples.size();
            std::vector<std::size_t> odo(static_cast<std::size_t>(m), 0);
            std::vector<int> col(static_cast<std::size_t>(m));
            std::vector<int> image(static_cast<std::size_t>(rel.arity));
            while (true) {
                for (int j = 0; j < rel.arity; ++j) {
                    for (int q = 0; q < m; ++q)
                        col[static_cast<std::size_t>(q)] =
                            rel.tuples[odo[static_cast<std::size_t>(q)]]
                                      [static_cast<std::size_t>(j)];
                    image[static_cast<std::size_t>(j)] = op.apply(col, a.size);
                }
                if (!rel.contains(image)) {
                    PolymorphismViolation v;
                    v.op = op.name;
                    v.relation = rel.name;
                    for (int q = 0; q < m; ++q)
                        v.rows.push_back(
                            rel.tuples[odo[static_cast<std::size_t>(q)]]);
                    v.image = image;
                    return v;
                }
                int j = m - 1;
                for (; j >= 0; --j) {
                    if (odo[static_cast<std::size_t>(j)] + 1 < nrows) {
                        ++odo[static_cast<std::size_t>(j)];
                        std::fill(odo.begin() + j + 1, odo.end(), 0);
                        break;
                    }
                }
                if (j < 0)
                    break;
            }
        }
    }
    return std::nullopt;
}

bool compatible(const RelStructure& s, const FiniteAlgebra& a) {
    return !polymorphism_violation(s, a).has_value();
}

bool is_polymorphism(const RelStructure& s, const OpTable& op, int size) {
    FiniteAlgebra a;
    a.name = "single";
    a.size = size;
    a.ops.push_back(op);
    return compatible(s, a);
}

// --------------------------------------------------------------------------
// Homomorphism engine
// --------------------------------------------------------------------------

namespace {

struct Solver {
    const HomProblem& prob;
    uint64_t full;
    std::vector<uint64_t> dom;

    // tuple constraints indexed by var
    std::vector<std::vector<int>> var_tcons;

    // equivalence constraints, flattened to (constraint, source class)
    struct EqClass {
        std::vector<int> members;       // variables
        uint64_t allowed_classes;       // over target class indices
    };
    struct EqData {
        std::vector<int> value_class;          // target value -> class index
        std::vector<uint64_t> class_values;    // class index -> value mask
        std::vector<EqClass> classes;          // only classes with >= 2 members
    };
    std::vector<EqData> eqs;
    std::vector<std::vector<std::pair<int, int>>> var_eqcons;  // var -> (eq, class)

    // trail
    struct DomEntry { int var; uint64_t old_dom; };
    struct ClsEntry { int eq; int cls; uint64_t old_mask; };
    std::vector<DomEntry> dom_trail;
    std::vector<ClsEntry> cls_trail;

    std::deque<int> queue;
    std::vector<char> queued;
    std::vector<int> order;

    explicit Solver(const HomProblem& p) : prob(p) {
        full = (p.n_vals >= 64) ? ~0ull : ((1ull << p.n_vals) - 1);
        dom.assign(static_cast<std::size_t>(p.n_vars), full);
        var_tcons.resize(static_cast<std::size_t>(p.n_vars));
        var_eqcons.resize(static_cast<std::size_t>(p.n_vars));
        queued.assign(static_cast<std::size_t>(p.n_vars), 0);

        for (std::size_t ci = 0; ci < p.tuple_constraints.size(); ++ci)
            for (int v : p.tuple_constraints[ci].scope)
                var_tcons[static_cast<std::size_t>(v)].push_back(
                    static_cast<int>(ci));

        for (std::size_t ei = 0; ei < p.eq_constraints.size(); ++ei) {
            const auto& ec = p.eq_constraints[ei];
            EqData data;
            auto tcls = ec.target->classes();
            data.value_class.resize(static_cast<std::size_t>(p.n_vals));
            data.class_values.resize(tcls.size());
            for (std::size_t c = 0; c < tcls.size(); ++c) {
                for (int v : tcls[c]) {
                    data.value_class[static_cast<std::size_t>(v)] =
                        static_cast<int>(c);
                    data.class_values[c] |= 1ull << v;
                }
            }
            uint64_t all_classes =
                (tcls.size() >= 64) ? ~0ull : ((1ull << tcls.size()) - 1);
            for (const auto& scls : ec.source->classes()) {
                if (scls.size() < 2)
                    continue;
                EqClass e;
                e.members = scls;
                e.allowed_classes = all_classes;
                int cls_idx = static_cast<int>(data.classes.size());
                data.classes.push_back(std::move(e));
                for (int v : scls)
                    var_eqcons[static_cast<std::size_t>(v)].emplace_back(
                        static_cast<int>(ei), cls_idx);
            }
            eqs.push_back(std::move(data));
        }

        // static variable order: most constrained first, ties to lower index
        std::vector<long> degree(static_cast<std::size_t>(p.n_vars), 0);
        for (const auto& tc : p.tuple_constraints)
            for (int v : tc.scope)
                degree[static_cast<std::size_t>(v)] += 1;
        for (const auto& ed : eqs)
            for (const auto& cls : ed.classes)
                for (int v : cls.members)
                    degree[static_cast<std::size_t>(v)] +=
                        static_cast<long>(cls.members.size()) - 1;
        order.resize(static_cast<std::size_t>(p.n_vars));
        for (int i = 0; i < p.n_vars; ++i)
            order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return degree[static_cast<std::size_t>(x)] >
                   degree[static_cast<std::size_t>(y)];
        });
    }

    void enqueue(int v) {
        if (!queued[static_cast<std::size_t>(v)]) {
            queued[static_cast<std::size_t>(v)] = 1;
            queue.push_back(v);
        }
    }

    bool shrink(int v, uint64_t nd) {
        uint64_t od = dom[static_cast<std::size_t>(v)];
        if (nd == od)
            return true;
        dom_trail.push_back({v, od});
        dom[static_cast<std::size_t>(v)] = nd;
        if (nd == 0)
            return false;
        enqueue(v);
        return true;
    }

    bool revise_tuple(int ci) {
        const auto& tc = prob.tuple_constraints[static_cast<std::size_t>(ci)];
        std::size_t r = tc.scope.size();
        uint64_t masks[32];
        if (r > 32)
            throw input_error("solve_hom: constraint arity above 32");
        std::fill(masks, masks + r, 0ull);
        for (const auto& t : *tc.targets) {
            bool ok = true;
            for (std::size_t q = 0; q < r; ++q) {
                if (!(dom[static_cast<std::size_t>(tc.scope[q])] &
                      (1ull << t[q]))) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                for (std::size_t q = 0; q < r; ++q)
                    masks[q] |= 1ull << t[q];
        }
        for (std::size_t q = 0; q < r; ++q) {
            int v = tc.scope[q];
            if (!shrink(v, dom[static_cast<std::size_t>(v)] & masks[q]))
                return false;
        }
        return true;
    }

    bool revise_eq(int ei, int cls_idx) {
        EqData& ed = eqs[static_cast<std::size_t>(ei)];
        EqClass& ec = ed.classes[static_cast<std::size_t>(cls_idx)];
        uint64_t mask = ec.allowed_classes;
        for (int u : ec.members) {
            uint64_t reach = 0;
            uint64_t du = dom[static_cast<std::size_t>(u)];
            for (std::size_t c = 0; c < ed.class_values.size(); ++c)
                if (ed.class_values[c] & du)
                    reach |= 1ull << c;
            mask &= reach;
        }
        if (mask != ec.allowed_classes) {
            cls_trail.push_back({ei, cls_idx, ec.allowed_classes});
            ec.allowed_classes = mask;
        }
        if (mask == 0)
            return false;
        uint64_t allowed = 0;
        for (uint64_t rest = mask; rest; rest &= rest - 1)
            allowed |= ed.class_values[static_cast<std::size_t>(
                std::countr_zero(rest))];
        for (int u : ec.members)
            if (!shrink(u, dom[static_cast<std::size_t>(u)] & allowed))
                return false;
        return true;
    }

    bool propagate() {
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            queued[static_cast<std::size_t>(v)] = 0;
            for (int ci : var_tcons[static_cast<std::size_t>(v)])
                if (!revise_tuple(ci))
                    return false;
            for (auto [ei, cls] : var_eqcons[static_cast<std::size_t>(v)])
                if (!revise_eq(ei, cls))
                    return false;
        }
        return true;
    }

    void clear_queue() {
        while (!queue.empty()) {
            queued[static_cast<std::size_t>(queue.front())] = 0;
            queue.pop_front();
        }
    }

    void undo(std::size_t dmark, std::size_t cmark) {
        while (dom_trail.size() > dmark) {
            auto e = dom_trail.back();
            dom_trail.pop_back();
            dom[static_cast<std::size_t>(e.var)] = e.old_dom;
        }
        while (cls_trail.size() > cmark) {
            auto e = cls_trail.back();
            cls_trail.pop_back();
            eqs[static_cast<std::size_t>(e.eq)]
                .classes[static_cast<std::size_t>(e.cls)]
                .allowed_classes = e.old_mask;
        }
    }

    bool dfs() {
        int branch = -1;
        for (int v : order) {
            if (std::popcount(dom[static_cast<std::size_t>(v)]) > 1) {
                branch = v;
                break;
            }
        }
        if (branch < 0)
            return true;  // all singleton; propagation keeps them consistent
        uint64_t d = dom[static_cast<std::size_t>(branch)];
        for (uint64_t rest = d; rest; rest &= rest - 1) {
            uint64_t bit = rest & (~rest + 1);
            std::size_t dmark = dom_trail.size();
            std::size_t cmark = cls_trail.size();
            dom_trail.push_back({branch, d});
            dom[static_cast<std::size_t>(branch)] = bit;
            enqueue(branch);
            if (propagate() && dfs())
                return true;
            clear_queue();
            undo(dmark, cmark);
        }
        return false;
    }

    std::optional<std::vector<int>> run() {
        for (auto [v, val] : prob.pins) {
            if (v < 0 || v >= prob.n_vars || val < 0 || val >= prob.n_vals)
                throw input_error("solve_hom: pin out of range");
            if (!shrink(v, dom[static_cast<std::size_t>(v)] & (1ull << val)))
                return std::nullopt;
        }
        for (int v = 0; v < prob.n_vars; ++v)
            enqueue(v);
        if (!propagate())
            return std::nullopt;
        if (!dfs())
            return std::nullopt;
        std::vector<int> sol(static_cast<std::size_t>(prob.n_vars));
        for (int v = 0; v < prob.n_vars; ++v)
            sol[static_cast<std::size_t>(v)] =
                std::countr_zero(dom[static_cast<std::size_t>(v)]);
        return sol;
    }
};

} // namespace

std::optional<std::vector<int>> solve_hom(const HomProblem& p) {
    if (p.n_vals < 1 || p.n_vals > 64)
        throw input_error("solve_hom: target size must be between 1 and 64");
    Solver s(p);
    return s.run();
}

std::optional<std::vector<int>> hom_search(
    const RelStructure& src, const RelStructure& dst,
    const std::vector<std::pair<int, int>>& pins) {
    HomProblem p;
    p.n_vars = src.size;
    p.n_vals = dst.size;
    p.pins = pins;
    for (const Relation& r : src.rels) {
        const Relation* t = dst.find_relation(r.name);
        if (!t || t->arity != r.arity)
            throw input_error("hom_search: target lacks relation '" + r.name +
                              "' of arity " + std::to_string(r.arity));
        for (const auto& tup : r.tuples) {
            HomProblem::TupleConstraint tc;
            tc.scope = tup;
            tc.targets = &t->tuples;
            p.tuple_constraints.push_back(std::move(tc));
        }
    }
    return solve_hom(p);
}

// --------------------------------------------------------------------------
// Pentagons
// --------------------------------------------------------------------------

PentagonCheck verify_pentagon(const RelStructure& s) {
    PentagonCheck out;
    std::vector<Partition> parts;
    for (const char* rname : {"alpha", "beta", "gamma"}) {
        const Relation* r = s.find_relation(rname);
        if (!r) {
            out.failures.push_back(std::string("missing relation '") + rname +
                                   "'");
            continue;
        }
        try {
            parts.push_back(relation_as_partition(*r, s.size));
        } catch (const input_error& e) {
            out.failures.push_back(e.what());
        }
    }
    if (parts.size() != 3) {
        out.ok = false;
        return out;
    }
    const Partition& alpha = parts[0];
    const Partition& beta = parts[1];
    const Partition& gamma = parts[2];

    if (!meet(alpha, beta).is_discrete())
        out.failures.push_back("alpha ^ beta is not the zero partition");
    BinRelation comp = compose_n(alpha, beta, 2);
    bool comp_total = true;
    for (int i = 0; i < s.size && comp_total; ++i)
        for (int j = 0; j < s.size; ++j)
            if (!comp.at(i, j)) {
                comp_total = false;
                break;
            }
    if (!comp_total)
        out.failures.push_back("alpha o beta is not total");
    if (!join(gamma, beta).is_total())
        out.failures.push_back("gamma v beta is not the one partition");
    if (!gamma.leq(alpha) || gamma == alpha)
        out.failures.push_back("gamma is not strictly below alpha");

    out.ok = out.failures.empty();
    return out;
}

PentagonClassification classify_pentagon(const RelStructure& s, int expect_a,
                                         int expect_b) {
    PentagonCheck check = verify_pentagon(s);
    if (!check.ok) {
        std::string msg = "classify_pentagon: structure is not a pentagon:";
        for (const auto& f : check.failures)
            msg += " " + f + ";";
        throw precondition_error(msg);
    }
    Partition alpha = relation_as_partition(*s.find_relation("alpha"), s.size);
    Partition beta = relation_as_partition(*s.find_relation("beta"), s.size);
    Partition gamma = relation_as_partition(*s.find_relation("gamma"), s.size);

    PentagonClassification out;
    auto acls = alpha.classes();
    auto bcls = beta.classes();
    out.a_size = static_cast<int>(acls.size());
    out.b_size = static_cast<int>(bcls.size());
    if (expect_a >= 0 && expect_a != out.a_size)
        throw input_error("classify_pentagon: expected " +
                          std::to_string(expect_a) + " alpha-classes, found " +
                          std::to_string(out.a_size));
    if (expect_b >= 0 && expect_b != out.b_size)
        throw input_error("classify_pentagon: expected " +
                          std::to_string(expect_b) + " beta-classes, found " +
                          std::to_string(out.b_size));

    out.a_of.resize(static_cast<std::size_t>(s.size));
    out.b_of.resize(static_cast<std::size_t>(s.size));
    for (std::size_t c = 0; c < acls.size(); ++c)
        for (int x : acls[c])
            out.a_of[static_cast<std::size_t>(x)] = static_cast<int>(c);
    for (std::size_t c = 0; c < bcls.size(); ++c)
        for (int x : bcls[c])
            out.b_of[static_cast<std::size_t>(x)] = static_cast<int>(c);

    // alpha ^ beta = 0 and alpha o beta = 1 force x -> (a(x), b(x)) to be a
    // bijection with the full product; anything else is an internal bug.
    if (s.size != out.a_size * out.b_size)
        throw verification_error(
            "classify_pentagon: factorization does not cover the product");
    std::vector<int> elem_at(static_cast<std::size_t>(s.size), -1);
    for (int x = 0; x < s.size; ++x) {
        int code = out.a_of[static_cast<std::size_t>(x)] * out.b_size +
                   out.b_of[static_cast<std::size_t>(x)];
        if (elem_at[static_cast<std::size_t>(code)] >= 0)
            throw verification_error(
                "classify_pentagon: factorization is not injective");
        elem_at[static_cast<std::size_t>(code)] = x;
    }

    // gamma fiber over each A-element, transported to B.
    std::vector<const Partition*> nontotal;
    for (int a = 0; a < out.a_size; ++a) {
        Partition fib(out.b_size);
        for (int b1 = 0; b1 < out.b_size; ++b1)
            for (int b2 = b1 + 1; b2 < out.b_size; ++b2) {
                int x = elem_at[static_cast<std::size_t>(a * out.b_size + b1)];
                int y = elem_at[static_cast<std::size_t>(a * out.b_size + b2)];
                if (gamma.same(x, y))
                    fib.unite(b1, b2);
            }
        out.fibers.push_back(std::move(fib));
    }
    for (int a = 0; a < out.a_size; ++a) {
        if (out.fibers[static_cast<std::size_t>(a)].is_total())
            out.u.push_back(a);
        else
            nontotal.push_back(&out.fibers[static_cast<std::size_t>(a)]);
    }
    out.special = true;
    for (std::size_t i = 1; i < nontotal.size(); ++i)
        if (!(*nontotal[i] == *nontotal[0])) {
            out.special = false;
            break;
        }
    if (out.special && !nontotal.empty())
        out.eta = *nontotal[0];
    out.very_special =
        out.special && (nontotal.empty() || out.eta->is_discrete());
    return out;
}

} // namespace malcevlab
