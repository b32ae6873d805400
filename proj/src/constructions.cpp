#include "malcevlab/constructions.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

#include "malcevlab/errors.hpp"

namespace malcevlab {
namespace {

std::vector<int> checked_subset(std::vector<int> u, int m, const std::string& what,
                                bool proper) {
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (u.empty()) throw input_error(what + ": the marked set is empty");
    if (u.front() < 0 || u.back() >= m)
        throw input_error(what + ": marked element out of range");
    if (proper && static_cast<int>(u.size()) == m)
        throw input_error(what + ": the marked set must be a proper subset");
    return u;
}

std::vector<char> subset_mask(const std::vector<int>& u, int m) {
    std::vector<char> mask(static_cast<std::size_t>(m), 0);
    for (int x : u) mask[static_cast<std::size_t>(x)] = 1;
    return mask;
}

/// Advance a base-`base` odometer; false once it wraps to all zeros.
bool advance(std::vector<int>& t, int base) {
    for (int i = static_cast<int>(t.size()); i-- > 0;) {
        if (++t[i] < base) return true;
        t[i] = 0;
    }
    return false;
}

std::size_t checked_pow(int base, int exp, std::size_t limit,
                        const std::string& what) {
    std::size_t v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > limit / static_cast<std::size_t>(base))
            throw cap_exceeded(what + ": table size exceeds " +
                               std::to_string(limit));
        v *= static_cast<std::size_t>(base);
    }
    return v;
}

void check_component(const OpTable& t, int m, const std::string& what) {
    std::size_t want = checked_pow(m, t.arity, 100'000'000, what);
    if (t.table.size() != want)
        throw input_error(what + ": component table has wrong length");
    for (int v : t.table)
        if (v < 0 || v >= m)
            throw input_error(what + ": component table entry out of range");
}

/// gamma fiber over row a as a partition of the second factor.
Partition row_fiber(const Partition& gamma, int a, int b_size) {
    Partition fiber(b_size);
    for (int b1 = 0; b1 < b_size; ++b1)
        for (int b2 = b1 + 1; b2 < b_size; ++b2)
            if (gamma.same(a * b_size + b1, a * b_size + b2)) fiber.unite(b1, b2);
    return fiber;
}

/// Full re-verification of the Pentagon invariants; `stage` names the caller
/// in error messages.  Everything here is a consistency check on our own
/// output, so failures are verification_error.
void validate_pentagon(const Pentagon& p, const std::string& stage) {
    auto bad = [&](const std::string& msg) {
        throw verification_error(stage + ": " + msg);
    };
    const int n = p.algebra.size;
    if (n != p.a_size * p.b_size) bad("carrier size is not a_size * b_size");
    if (p.alpha.size() != n || p.beta.size() != n || p.gamma.size() != n)
        bad("partition size mismatch");

    if (congruence_violation(p.algebra, p.alpha)) bad("alpha is not a congruence");
    if (congruence_violation(p.algebra, p.beta)) bad("beta is not a congruence");
    if (congruence_violation(p.algebra, p.gamma)) bad("gamma is not a congruence");

    if (!meet(p.alpha, p.beta).is_discrete()) bad("alpha ^ beta is not zero");
    BinRelation comp = compose_n(p.alpha, p.beta, 2);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (!comp.at(x, y)) bad("alpha o beta is not total");
    if (!join(p.gamma, p.beta).is_total()) bad("gamma v beta is not total");
    if (!p.gamma.leq(p.alpha)) bad("gamma is not below alpha");
    if (p.gamma == p.alpha) bad("gamma equals alpha");

    // Very special shape: fibers over u are total, all others discrete, and
    // u records exactly the total rows.
    std::vector<char> in_u = subset_mask(p.u, p.a_size);
    for (int a = 0; a < p.a_size; ++a) {
        Partition fiber = row_fiber(p.gamma, a, p.b_size);
        if (in_u[static_cast<std::size_t>(a)]) {
            if (!fiber.is_total())
                bad("fiber over a marked row is not total");
        } else if (!fiber.is_discrete()) {
            bad("fiber over an unmarked row is not discrete");
        }
    }

    // The axioms force the modular-law failure; make it explicit.
    if (modularity_law_holds(p.alpha, p.beta, p.gamma))
        bad("the modular law unexpectedly holds at (alpha, beta, gamma)");
}

} // namespace

ModularityBlocker build_modularity_blocker(const FiniteAlgebra& a,
                                           std::size_t cap) {
    a.validate();
    if (!a.is_idempotent())
        throw precondition_error(
            "modularity blocker: the algebra must be idempotent");

    FreeAlgebra F = free_algebra(a, 2, cap);
    FiniteAlgebra f2 = F.as_finite_algebra("free2");
    const int n = f2.size;
    if (n > 64)
        throw cap_exceeded(
            "modularity blocker: the free algebra on two generators has " +
            std::to_string(n) + " elements; at most 64 are supported");
    FiniteAlgebra ff = direct_power(f2, 2);
    auto idx = [n](int f, int g) { return f * n + g; };

    const int gx = F.generator(0);
    const int gy = F.generator(1);
    std::vector<std::pair<int, int>> gens;
    gens.emplace_back(idx(gx, gx), idx(gx, gy));
    const std::pair<int, int> forbidden{idx(gy, gx), idx(gy, gy)};

    Partition gamma = cg(ff, gens);
    if (gamma.same(forbidden.first, forbidden.second))
        throw precondition_error(
            "modularity blocker: the key pair ((y,x),(y,y)) collapses already; "
            "the algebra has Day terms and no blocker exists");

    // Greedy saturation: make a row total whenever the key pair survives.
    for (int f = 0; f < n; ++f) {
        for (int g = 0; g < n; ++g) {
            if (f == g || gamma.same(idx(f, f), idx(f, g))) continue;
            auto trial = gens;
            trial.emplace_back(idx(f, f), idx(f, g));
            Partition t = cg(ff, trial);
            if (!t.same(forbidden.first, forbidden.second)) {
                gens = std::move(trial);
                gamma = std::move(t);
            }
        }
    }

    std::vector<int> u;
    std::vector<Partition> nontotal;
    for (int f = 0; f < n; ++f) {
        Partition fiber = row_fiber(gamma, f, n);
        if (fiber.is_total())
            u.push_back(f);
        else
            nontotal.push_back(std::move(fiber));
    }
    if (u.empty() || nontotal.empty())
        throw verification_error(
            "modularity blocker: saturation must leave both total and "
            "non-total rows");
    for (std::size_t i = 1; i < nontotal.size(); ++i)
        if (!(nontotal[i] == nontotal[0]))
            throw verification_error(
                "modularity blocker: non-total fibers disagree; the saturated "
                "congruence is not special");
    Partition eta = std::move(nontotal[0]);
    if (congruence_violation(f2, eta))
        throw verification_error(
            "modularity blocker: the common fiber is not a congruence of the "
            "free algebra");

    return ModularityBlocker{std::move(f2), std::move(gamma), std::move(eta),
                             std::move(u)};
}

RelStructure Pentagon::structure(const std::string& name) const {
    RelStructure s;
    s.name = name;
    s.size = algebra.size;
    s.rels.push_back(partition_as_relation("alpha", alpha));
    s.rels.push_back(partition_as_relation("beta", beta));
    s.rels.push_back(partition_as_relation("gamma", gamma));
    s.validate_and_normalize();
    return s;
}

Pentagon pentagon_from_blocker(const ModularityBlocker& bl) {
    const FiniteAlgebra& A = bl.f2;
    Quotient q = quotient(A, bl.eta);
    FiniteAlgebra B = q.algebra;
    const int as = A.size;
    const int bs = B.size;

    Pentagon p;
    p.algebra = direct_product(A, B);
    p.algebra.name = "pentagon";
    p.a_size = as;
    p.b_size = bs;
    p.u = bl.u;

    p.alpha = Partition(as * bs);
    p.beta = Partition(as * bs);
    p.gamma = Partition(as * bs);
    std::vector<char> in_u = subset_mask(bl.u, as);
    for (int a = 0; a < as; ++a)
        for (int b = 0; b < bs; ++b) {
            if (b > 0) p.alpha.unite(a * bs, a * bs + b);
            if (a > 0) p.beta.unite(b, a * bs + b);
            if (b > 0 && in_u[static_cast<std::size_t>(a)])
                p.gamma.unite(a * bs, a * bs + b);
        }

    validate_pentagon(p, "pentagon_from_blocker");
    return p;
}

Pentagon pentagon_tarski_step(const Pentagon& p) {
    const int as = p.a_size, bs = p.b_size, ps = as * bs;
    const int as2 = as * as, bs2 = bs * bs;
    const int n2 = ps * ps;

    // The squared carrier keeps the pentagon coding: element
    // ((a1,a2),(b1,b2)) sits at (a1*as + a2)*bs2 + (b1*bs + b2), which is a
    // relabeling of the plain square's p1*ps + p2.
    auto encode = [&](int p1, int p2) {
        int a1 = p1 / bs, b1 = p1 % bs, a2 = p2 / bs, b2 = p2 % bs;
        return (a1 * as + a2) * bs2 + (b1 * bs + b2);
    };
    std::vector<int> first(static_cast<std::size_t>(n2)),
        second(static_cast<std::size_t>(n2));
    for (int p1 = 0; p1 < ps; ++p1)
        for (int p2 = 0; p2 < ps; ++p2) {
            int c = encode(p1, p2);
            first[static_cast<std::size_t>(c)] = p1;
            second[static_cast<std::size_t>(c)] = p2;
        }

    Pentagon next;
    next.a_size = as2;
    next.b_size = bs2;
    next.algebra.name = p.algebra.name + "^2";
    next.algebra.size = n2;
    for (std::size_t oi = 0; oi < p.algebra.ops.size(); ++oi) {
        const OpTable& op = p.algebra.ops[oi];
        OpTable t;
        t.name = op.name;
        t.arity = op.arity;
        std::size_t len =
            checked_pow(n2, op.arity, 50'000'000, "pentagon_tarski_step");
        t.table.resize(len);
        std::vector<int> args(static_cast<std::size_t>(op.arity), 0);
        std::vector<int> a1(args.size()), a2(args.size());
        std::size_t j = 0;
        do {
            for (std::size_t i = 0; i < args.size(); ++i) {
                a1[i] = first[static_cast<std::size_t>(args[i])];
                a2[i] = second[static_cast<std::size_t>(args[i])];
            }
            t.table[j++] = encode(p.algebra.apply(static_cast<int>(oi), a1),
                                  p.algebra.apply(static_cast<int>(oi), a2));
        } while (op.arity > 0 && advance(args, n2));
        next.algebra.ops.push_back(std::move(t));
    }
    next.algebra.validate();

    // Factor maps of the new coding.
    auto a_of = [&](int x) { return x / bs2; };
    auto b_of = [&](int x) { return x % bs2; };

    next.alpha = Partition(n2);
    next.beta = Partition(n2);
    for (int x = 1; x < n2; ++x) {
        // Union each element toward the least element sharing its coordinate.
        int ra = a_of(x) * bs2;           // least with same a-part
        int rb = b_of(x);                 // least with same b-part
        next.alpha.unite(ra, x);
        next.beta.unite(rb, x);
    }

    std::vector<char> in_u = subset_mask(p.u, as);
    next.gamma = Partition(n2);
    next.u.clear();
    for (int na = 0; na < as2; ++na) {
        bool marked = in_u[static_cast<std::size_t>(na % as)] != 0;
        if (marked) {
            next.u.push_back(na);
            for (int b = 1; b < bs2; ++b)
                next.gamma.unite(na * bs2, na * bs2 + b);
        }
    }

    validate_pentagon(next, "pentagon_tarski_step");

    // The diagonal embeds the old pentagon: operations, the three
    // partitions, and the marked set all restrict correctly.
    auto embed = [&](int x) {
        int a = x / bs, b = x % bs;
        return (a * as + a) * bs2 + (b * bs + b);
    };
    for (std::size_t oi = 0; oi < p.algebra.ops.size(); ++oi) {
        const OpTable& op = p.algebra.ops[oi];
        std::vector<int> args(static_cast<std::size_t>(op.arity), 0);
        std::vector<int> eargs(args.size());
        do {
            for (std::size_t i = 0; i < args.size(); ++i)
                eargs[i] = embed(args[i]);
            int want = embed(p.algebra.apply(static_cast<int>(oi), args));
            if (next.algebra.apply(static_cast<int>(oi), eargs) != want)
                throw verification_error(
                    "pentagon_tarski_step: the diagonal is not an embedding");
        } while (op.arity > 0 && advance(args, ps));
    }
    for (int x = 0; x < ps; ++x)
        for (int y = 0; y < ps; ++y) {
            if (p.alpha.same(x, y) != next.alpha.same(embed(x), embed(y)) ||
                p.beta.same(x, y) != next.beta.same(embed(x), embed(y)) ||
                p.gamma.same(x, y) != next.gamma.same(embed(x), embed(y)))
                throw verification_error(
                    "pentagon_tarski_step: the partitions do not restrict to "
                    "the diagonal copy");
        }
    std::vector<char> in_u2 = subset_mask(next.u, as2);
    for (int a = 0; a < as; ++a)
        if ((in_u[static_cast<std::size_t>(a)] != 0) !=
            (in_u2[static_cast<std::size_t>(a * as + a)] != 0))
            throw verification_error(
                "pentagon_tarski_step: the marked set does not restrict to "
                "the diagonal copy");

    return next;
}

TarskiStage tarski_step(const FiniteAlgebra& a, const std::vector<int>& marked) {
    a.validate();
    auto u = checked_subset(marked, a.size, "tarski_step", /*proper=*/false);
    TarskiStage stage;
    stage.algebra = direct_power(a, 2);
    for (int x = 0; x < a.size; ++x)
        for (int m : u) stage.marked.push_back(x * a.size + m);
    return stage;
}

RelStructure finite_P(int m, const std::vector<int>& u_in) {
    if (m < 2 || m > 32)
        throw input_error("finite_P: m must lie in 2..32");
    auto u = checked_subset(u_in, m, "finite_P", /*proper=*/true);
    std::vector<char> in_u = subset_mask(u, m);

    RelStructure s;
    s.name = "p" + std::to_string(m);
    s.size = m * m;
    Relation alpha{"alpha", 2, {}};
    Relation beta{"beta", 2, {}};
    Relation gamma{"gamma", 2, {}};
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                alpha.tuples.push_back({a * m + b, a * m + c});
                beta.tuples.push_back({b * m + a, c * m + a});
                if (in_u[static_cast<std::size_t>(a)] || b == c)
                    gamma.tuples.push_back({a * m + b, a * m + c});
            }
    s.rels = {std::move(alpha), std::move(beta), std::move(gamma)};
    s.product = ProductInfo{2, m};
    s.validate_and_normalize();
    return s;
}

RelStructure finite_B(int m, const std::vector<int>& u_in, int kmax) {
    if (m < 2) throw input_error("finite_B: m must be at least 2");
    if (kmax < 1 || kmax > 8)
        throw input_error("finite_B: kmax must lie in 1..8");
    checked_pow(m, kmax, 200'000, "finite_B");
    auto u = checked_subset(u_in, m, "finite_B", /*proper=*/true);
    std::vector<char> in_u = subset_mask(u, m);

    RelStructure s;
    s.name = "bfam" + std::to_string(m);
    s.size = m;
    for (int k = 1; k <= kmax; ++k) {
        Relation r{"r" + std::to_string(k), k, {}};
        std::vector<int> t(static_cast<std::size_t>(k), 0);
        do {
            bool hit = false;
            for (int v : t)
                if (in_u[static_cast<std::size_t>(v)]) { hit = true; break; }
            if (hit) r.tuples.push_back(t);
        } while (advance(t, m));
        s.rels.push_back(std::move(r));
    }
    s.validate_and_normalize();
    return s;
}

RelStructure finite_C(int m, const std::vector<std::vector<int>>& us) {
    if (m < 2) throw input_error("finite_C: m must be at least 2");
    const int n = static_cast<int>(us.size());
    if (n < 1 || n > 9)
        throw input_error("finite_C: need between 1 and 9 coordinate sets");
    std::size_t size = checked_pow(m, n, 512, "finite_C");

    std::vector<std::vector<char>> masks;
    for (int i = 0; i < n; ++i)
        masks.push_back(subset_mask(
            checked_subset(us[static_cast<std::size_t>(i)], m,
                           "finite_C (coordinate " + std::to_string(i) + ")",
                           /*proper=*/true),
            m));

    RelStructure s;
    s.name = "c" + std::to_string(m) + "_" + std::to_string(n);
    s.size = static_cast<int>(size);
    // Coordinate kernels: pairs of codes agreeing at coordinate i.
    for (int i = 0; i < n; ++i) {
        Relation alpha{"alpha" + std::to_string(i + 1), 2, {}};
        for (int x = 0; x < s.size; ++x)
            for (int y = 0; y < s.size; ++y) {
                auto cx = power_decode(static_cast<std::size_t>(x), m, n);
                auto cy = power_decode(static_cast<std::size_t>(y), m, n);
                if (cx[static_cast<std::size_t>(i)] ==
                    cy[static_cast<std::size_t>(i)])
                    alpha.tuples.push_back({x, y});
            }
        s.rels.push_back(std::move(alpha));
    }
    // The cross: codes with some coordinate inside its marked set.
    Relation cross{"cross", 1, {}};
    for (int x = 0; x < s.size; ++x) {
        auto cx = power_decode(static_cast<std::size_t>(x), m, n);
        for (int i = 0; i < n; ++i)
            if (masks[static_cast<std::size_t>(i)]
                     [static_cast<std::size_t>(cx[static_cast<std::size_t>(i)])]) {
                cross.tuples.push_back({x});
                break;
            }
    }
    s.rels.push_back(std::move(cross));
    s.product = ProductInfo{n, m};
    s.validate_and_normalize();
    return s;
}

bool blocker_polymorphism_criterion(const OpTable& comp1, const OpTable& comp2,
                                    int m, const std::vector<int>& u_in) {
    if (m < 1) throw input_error("blocker criterion: empty universe");
    if (comp1.arity != comp2.arity)
        throw input_error("blocker criterion: component arities differ");
    const int k = comp1.arity;
    if (k < 0 || k > 8)
        throw input_error("blocker criterion: arity must lie in 0..8");
    check_component(comp1, m, "blocker criterion");
    check_component(comp2, m, "blocker criterion");
    auto u = checked_subset(u_in, m, "blocker criterion", /*proper=*/false);
    std::vector<char> in_u = subset_mask(u, m);

    std::size_t len = comp1.table.size();
    std::vector<int> row(static_cast<std::size_t>(k), 0);
    std::vector<int> seen;
    std::size_t ri = 0;
    do {
        if (!in_u[static_cast<std::size_t>(comp1.table[ri])]) {
            // D = positions whose entry lies in u; comp2 may not depend on
            // them.  Group all argument tuples by their off-D projection and
            // demand a constant value per group.
            std::vector<char> in_d(static_cast<std::size_t>(k), 0);
            int off = 0;
            bool any = false;
            for (int i = 0; i < k; ++i) {
                if (in_u[static_cast<std::size_t>(row[static_cast<std::size_t>(i)])]) {
                    in_d[static_cast<std::size_t>(i)] = 1;
                    any = true;
                } else {
                    ++off;
                }
            }
            if (any) {
                std::size_t groups = 1;
                for (int i = 0; i < off; ++i) groups *= static_cast<std::size_t>(m);
                seen.assign(groups, -1);
                std::vector<int> b(static_cast<std::size_t>(k), 0);
                std::size_t bi = 0;
                do {
                    std::size_t key = 0;
                    for (int i = 0; i < k; ++i)
                        if (!in_d[static_cast<std::size_t>(i)])
                            key = key * static_cast<std::size_t>(m) +
                                  static_cast<std::size_t>(b[static_cast<std::size_t>(i)]);
                    int v = comp2.table[bi];
                    if (seen[key] < 0)
                        seen[key] = v;
                    else if (seen[key] != v)
                        return false;
                    ++bi;
                } while (advance(b, m));
                (void)len;
            }
        }
        ++ri;
    } while (advance(row, m));
    return true;
}

OpTable product_op(const std::string& name, const OpTable& comp1,
                   const OpTable& comp2, int m) {
    if (comp1.arity != comp2.arity)
        throw input_error("product_op: component arities differ");
    check_component(comp1, m, "product_op");
    check_component(comp2, m, "product_op");
    const int k = comp1.arity;
    const int M = m * m;
    OpTable op;
    op.name = name;
    op.arity = k;
    op.table.resize(checked_pow(M, k, 50'000'000, "product_op"));
    std::vector<int> args(static_cast<std::size_t>(k), 0);
    std::size_t j = 0;
    do {
        std::size_t i1 = 0, i2 = 0;
        for (int i = 0; i < k; ++i) {
            int a = args[static_cast<std::size_t>(i)] / m;
            int b = args[static_cast<std::size_t>(i)] % m;
            i1 = i1 * static_cast<std::size_t>(m) + static_cast<std::size_t>(a);
            i2 = i2 * static_cast<std::size_t>(m) + static_cast<std::size_t>(b);
        }
        op.table[j++] = comp1.table[i1] * m + comp2.table[i2];
    } while (k > 0 && advance(args, M));
    return op;
}

namespace {

/// Binary component table from a formula.
template <typename F>
OpTable comp2_table(int m, F&& f) {
    OpTable t;
    t.arity = 2;
    t.table.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            t.table[static_cast<std::size_t>(x * m + y)] = f(x, y);
    return t;
}

template <typename F>
OpTable comp3_table(int m, F&& f) {
    OpTable t;
    t.arity = 3;
    t.table.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m) *
                   static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z)
                t.table[static_cast<std::size_t>((x * m + y) * m + z)] = f(x, y, z);
    return t;
}

/// First u-absorbing coordinate of an operation: position c such that any
/// argument tuple whose c-th entry lies in u evaluates into u.  -1 if none.
int absorbing_coordinate(const OpTable& op, int size,
                         const std::vector<char>& in_u) {
    for (int c = 0; c < op.arity; ++c) {
        bool ok = true;
        std::vector<int> args(static_cast<std::size_t>(op.arity), 0);
        std::size_t j = 0;
        do {
            if (in_u[static_cast<std::size_t>(args[static_cast<std::size_t>(c)])] &&
                !in_u[static_cast<std::size_t>(op.table[j])]) {
                ok = false;
                break;
            }
            ++j;
        } while (advance(args, size));
        if (ok) return c;
    }
    return -1;
}

} // namespace

WitnessFamily pentagon_witnesses(int m, const std::vector<int>& u_in,
                                 int n_indices) {
    if (m < 2 || m > 16)
        throw input_error("pentagon_witnesses: m must lie in 2..16");
    auto u = checked_subset(u_in, m, "pentagon_witnesses", /*proper=*/true);
    if (n_indices < 1 || n_indices > 9)
        throw input_error("pentagon_witnesses: index count must lie in 1..9");
    if (static_cast<int>(u.size()) < n_indices + 1)
        throw precondition_error(
            "pentagon_witnesses: need at least n_indices + 1 marked elements");
    if (m < n_indices)
        throw precondition_error("pentagon_witnesses: need m >= n_indices");

    const int c1 = u[0];  // default value inside u for the A-components
    const int c2 = 0;     // default value for the B-components
    auto f1 = [&](int i) {
        return comp2_table(m, [&](int x, int y) { return x == y ? x : u[static_cast<std::size_t>(i)]; });
    };
    auto f2 = [&](int i) {
        return comp2_table(m, [&](int x, int y) { return x == y ? x : i; });
    };
    auto f1val = [&](int i, int x, int z) { return x == z ? x : u[static_cast<std::size_t>(i)]; };
    auto f2val = [&](int i, int x, int z) { return x == z ? x : i; };

    // Component pairs, then their product operations.
    std::vector<std::pair<OpTable, OpTable>> comps;
    std::vector<std::string> names;
    for (int i = 0; i < n_indices; ++i) {
        comps.emplace_back(f1(i), f2(i));
        names.push_back("f" + std::to_string(i));
    }
    OpTable proj1 = comp3_table(m, [](int x, int, int) { return x; });
    OpTable proj3 = comp3_table(m, [](int, int, int z) { return z; });
    for (int i = 0; i < n_indices; ++i)
        for (int j = 0; j < n_indices; ++j) {
            if (i == j) continue;
            std::string suffix = std::to_string(i) + std::to_string(j);
            comps.emplace_back(
                comp3_table(m, [&](int x, int y, int z) {
                    return y == f1val(j, x, z) ? x : c1;
                }),
                proj1);
            names.push_back("p" + suffix);
            comps.emplace_back(
                comp3_table(m, [&](int x, int y, int z) {
                    return (x == y && y == z) ? x : c1;
                }),
                comp3_table(m, [&](int x, int y, int z) {
                    if (y == f2val(j, x, z)) return x;
                    if (y == f2val(i, x, z)) return z;
                    return c2;
                }));
            names.push_back("q" + suffix);
            comps.emplace_back(
                comp3_table(m, [&](int x, int y, int z) {
                    return y == f1val(i, x, z) ? z : c1;
                }),
                proj3);
            names.push_back("r" + suffix);
        }

    WitnessFamily w;
    w.kind = WitnessKind::pentagon;
    w.m = m;
    w.u = u;
    w.n_indices = n_indices;
    w.algebra.name = "pentagon-witness";
    w.algebra.size = m * m;
    for (std::size_t i = 0; i < comps.size(); ++i)
        w.algebra.ops.push_back(
            product_op(names[i], comps[i].first, comps[i].second, m));
    w.algebra.validate();

    if (!w.algebra.is_idempotent())
        throw verification_error("pentagon_witnesses: an operation is not idempotent");
    w.checks.push_back("all operations idempotent");

    const int M = m * m;
    for (int i = 0; i < n_indices; ++i)
        for (int j = 0; j < n_indices; ++j) {
            if (i == j) continue;
            std::string suffix = std::to_string(i) + std::to_string(j);
            int oi = w.algebra.op_index("f" + std::to_string(i));
            int oj = w.algebra.op_index("f" + std::to_string(j));
            int opp = w.algebra.op_index("p" + suffix);
            int opq = w.algebra.op_index("q" + suffix);
            int opr = w.algebra.op_index("r" + suffix);
            for (int X = 0; X < M; ++X)
                for (int Z = 0; Z < M; ++Z) {
                    std::vector<int> xz{X, Z};
                    int FJ = w.algebra.apply(oj, xz);
                    int FI = w.algebra.apply(oi, xz);
                    std::vector<int> aj{X, FJ, Z};
                    std::vector<int> ai{X, FI, Z};
                    if (w.algebra.apply(opp, aj) != X)
                        throw verification_error(
                            "pentagon_witnesses: p(x, f_j(x,z), z) = x fails");
                    if (w.algebra.apply(opr, ai) != Z)
                        throw verification_error(
                            "pentagon_witnesses: r(x, f_i(x,z), z) = z fails");
                    if (w.algebra.apply(opq, aj) % m != X % m)
                        throw verification_error(
                            "pentagon_witnesses: q against f_j does not return "
                            "x on B-components");
                    if (w.algebra.apply(opq, ai) % m != Z % m)
                        throw verification_error(
                            "pentagon_witnesses: q against f_i does not return "
                            "z on B-components");
                }
        }
    w.checks.push_back("p(x, f_j(x,z), z) = x for every ordered pair");
    w.checks.push_back("r(x, f_i(x,z), z) = z for every ordered pair");
    w.checks.push_back(
        "q returns x against f_j and z against f_i on B-components");

    for (std::size_t i = 0; i < comps.size(); ++i)
        if (!blocker_polymorphism_criterion(comps[i].first, comps[i].second, m, u))
            throw verification_error("pentagon_witnesses: operation " + names[i] +
                                     " violates the gamma criterion");
    w.checks.push_back("every operation satisfies the gamma criterion");

    RelStructure pent = finite_P(m, u);
    if (auto v = polymorphism_violation(pent, w.algebra))
        throw verification_error("pentagon_witnesses: operation " + v->op +
                                 " is not a polymorphism of relation " +
                                 v->relation);
    w.checks.push_back("every operation is a polymorphism of the pentagon structure");
    return w;
}

WitnessFamily blocker_witnesses(int m, const std::vector<int>& u_in,
                                int n_indices) {
    if (m < 2 || m > 32)
        throw input_error("blocker_witnesses: m must lie in 2..32");
    auto u = checked_subset(u_in, m, "blocker_witnesses", /*proper=*/true);
    if (n_indices < 1 || n_indices > 9)
        throw input_error("blocker_witnesses: index count must lie in 1..9");
    std::vector<char> in_u = subset_mask(u, m);
    for (int i = 0; i < n_indices; ++i)
        if (!in_u[static_cast<std::size_t>(i)])
            throw precondition_error(
                "blocker_witnesses: every index must lie in the marked set "
                "(the off-diagonal constants are the indices themselves)");

    const int c = u[0];
    auto fval = [&](int i, int x, int z) { return x == z ? x : i; };

    WitnessFamily w;
    w.kind = WitnessKind::blocker;
    w.m = m;
    w.u = u;
    w.n_indices = n_indices;
    w.algebra.name = "blocker-witness";
    w.algebra.size = m;
    for (int i = 0; i < n_indices; ++i) {
        OpTable t = comp2_table(m, [&](int x, int y) { return fval(i, x, y); });
        t.name = "f" + std::to_string(i);
        w.algebra.ops.push_back(std::move(t));
    }
    for (int i = 0; i < n_indices; ++i)
        for (int j = 0; j < n_indices; ++j) {
            if (i == j) continue;
            std::string suffix = std::to_string(i) + std::to_string(j);
            OpTable p = comp3_table(m, [&](int x, int y, int z) {
                return y == fval(j, x, z) ? x : c;
            });
            p.name = "p" + suffix;
            OpTable q = comp3_table(m, [&](int x, int y, int z) {
                return y == fval(i, x, z) ? z : c;
            });
            q.name = "q" + suffix;
            w.algebra.ops.push_back(std::move(p));
            w.algebra.ops.push_back(std::move(q));
        }
    w.algebra.validate();

    if (!w.algebra.is_idempotent())
        throw verification_error("blocker_witnesses: an operation is not idempotent");
    w.checks.push_back("all operations idempotent");

    for (int i = 0; i < n_indices; ++i)
        for (int j = 0; j < n_indices; ++j) {
            if (i == j) continue;
            std::string suffix = std::to_string(i) + std::to_string(j);
            int opp = w.algebra.op_index("p" + suffix);
            int opq = w.algebra.op_index("q" + suffix);
            for (int x = 0; x < m; ++x)
                for (int z = 0; z < m; ++z) {
                    std::vector<int> aj{x, fval(j, x, z), z};
                    std::vector<int> ai{x, fval(i, x, z), z};
                    if (w.algebra.apply(opp, aj) != x)
                        throw verification_error(
                            "blocker_witnesses: p(x, f_j(x,z), z) = x fails");
                    if (w.algebra.apply(opq, ai) != z)
                        throw verification_error(
                            "blocker_witnesses: q(x, f_i(x,z), z) = z fails");
                }
        }
    w.checks.push_back("p(x, f_j(x,z), z) = x for every ordered pair");
    w.checks.push_back("q(x, f_i(x,z), z) = z for every ordered pair");

    for (const OpTable& op : w.algebra.ops) {
        int pos = absorbing_coordinate(op, m, in_u);
        if (pos < 0)
            throw verification_error("blocker_witnesses: operation " + op.name +
                                     " has no u-absorbing coordinate");
        w.checks.push_back("operation " + op.name +
                           " absorbs into u at coordinate " +
                           std::to_string(pos));
    }
    return w;
}

bool no_small_model(WitnessKind kind, int k, int universe_size) {
    if (universe_size != 2)
        throw input_error("no_small_model: only the two-element search is implemented");
    if (k < 1 || k > 3)
        throw input_error("no_small_model: k must lie in 1..3");

    // Idempotent binary tables on {0,1}: two free cells, encoded as
    // bit 0 = f(0,1), bit 1 = f(1,0).
    auto fval = [](int t, int x, int z) {
        if (x == z) return x;
        return x == 0 ? (t & 1) : ((t >> 1) & 1);
    };
    // Idempotent ternary tables: six free cells at positions x*4+y*2+z for
    // (x,y,z) not on the diagonal, encoded ascending in bits 0..5.
    auto tval = [](int code, int x, int y, int z) {
        if (x == y && y == z) return x;
        int idx = x * 4 + y * 2 + z;  // 1..6 here
        return (code >> (idx - 1)) & 1;
    };

    // p searches an x-recognizer against f_j; r a z-recognizer against f_i;
    // q must play both projection roles in one table — the collapse a genuine
    // cube-term-style operation would force, and the identity that carries
    // the pigeonhole argument.
    auto exists_p = [&](int tj) {
        for (int code = 0; code < 64; ++code) {
            bool ok = true;
            for (int x = 0; x < 2 && ok; ++x)
                for (int z = 0; z < 2 && ok; ++z)
                    ok = tval(code, x, fval(tj, x, z), z) == x;
            if (ok) return true;
        }
        return false;
    };
    auto exists_r = [&](int ti) {
        for (int code = 0; code < 64; ++code) {
            bool ok = true;
            for (int x = 0; x < 2 && ok; ++x)
                for (int z = 0; z < 2 && ok; ++z)
                    ok = tval(code, x, fval(ti, x, z), z) == z;
            if (ok) return true;
        }
        return false;
    };
    auto exists_q = [&](int ti, int tj) {
        for (int code = 0; code < 64; ++code) {
            bool ok = true;
            for (int x = 0; x < 2 && ok; ++x)
                for (int z = 0; z < 2 && ok; ++z)
                    ok = tval(code, x, fval(tj, x, z), z) == x &&
                         tval(code, x, fval(ti, x, z), z) == z;
            if (ok) return true;
        }
        return false;
    };

    std::vector<int> f(static_cast<std::size_t>(k), 0);
    do {
        bool model = true;
        for (int i = 0; i < k && model; ++i)
            for (int j = 0; j < k && model; ++j) {
                if (i == j) continue;
                int ti = f[static_cast<std::size_t>(i)];
                int tj = f[static_cast<std::size_t>(j)];
                bool pair_ok = exists_p(tj) && exists_q(ti, tj);
                if (kind == WitnessKind::pentagon)
                    pair_ok = pair_ok && exists_r(ti);
                model = pair_ok;
            }
        if (model) return false;  // a two-element family exists
    } while (advance(f, 4));
    return true;
}

} // namespace malcevlab
