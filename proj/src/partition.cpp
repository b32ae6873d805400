#include "malcevlab/partition.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace malcevlab {

Partition::Partition(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
}

int Partition::find(int a) const {
    // Union is always towards the smaller root, so the root of a class is its
    // least element; path halving keeps chains short.
    while (parent_[static_cast<std::size_t>(a)] != a) {
        parent_[static_cast<std::size_t>(a)] =
            parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(a)])];
        a = parent_[static_cast<std::size_t>(a)];
    }
    return a;
}

bool Partition::unite(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb)
        return false;
    if (ra > rb)
        std::swap(ra, rb);
    parent_[static_cast<std::size_t>(rb)] = ra;
    return true;
}

std::vector<int> Partition::normal_form() const {
    std::vector<int> nf(parent_.size());
    for (int i = 0; i < size(); ++i)
        nf[static_cast<std::size_t>(i)] = find(i);
    return nf;
}

std::vector<std::vector<int>> Partition::classes() const {
    std::vector<std::vector<int>> out;
    std::vector<int> slot(parent_.size(), -1);
    for (int i = 0; i < size(); ++i) {
        int r = find(i);
        if (slot[static_cast<std::size_t>(r)] < 0) {
            slot[static_cast<std::size_t>(r)] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
    }
    return out;
}

int Partition::n_classes() const {
    int c = 0;
    for (int i = 0; i < size(); ++i)
        if (find(i) == i)
            ++c;
    return c;
}

bool Partition::leq(const Partition& other) const {
    if (size() != other.size())
        throw input_error("Partition::leq: sizes differ");
    for (int i = 0; i < size(); ++i)
        if (other.find(i) != other.find(find(i)))
            return false;
    return true;
}

bool Partition::operator==(const Partition& other) const {
    return size() == other.size() && leq(other) && other.leq(*this);
}

Partition Partition::total(int n) {
    Partition p(n);
    for (int i = 1; i < n; ++i)
        p.unite(0, i);
    return p;
}

Partition Partition::from_pairs(int n,
                                const std::vector<std::pair<int, int>>& pairs) {
    Partition p(n);
    for (auto [a, b] : pairs) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw input_error("Partition::from_pairs: element out of range");
        p.unite(a, b);
    }
    return p;
}

Partition Partition::from_classes(int n,
                                  const std::vector<std::vector<int>>& cls) {
    Partition p(n);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto& c : cls) {
        for (int x : c) {
            if (x < 0 || x >= n)
                throw input_error("Partition::from_classes: element out of range");
            if (seen[static_cast<std::size_t>(x)])
                throw input_error("Partition::from_classes: element " +
                                  std::to_string(x) + " listed twice");
            seen[static_cast<std::size_t>(x)] = 1;
        }
        for (std::size_t i = 1; i < c.size(); ++i)
            p.unite(c[0], c[i]);
    }
    return p;
}

std::string Partition::to_string() const {
    std::string out;
    for (const auto& c : classes()) {
        if (!out.empty())
            out += " | ";
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i)
                out += " ";
            out += std::to_string(c[i]);
        }
    }
    return out;
}

Partition join(const Partition& p, const Partition& q) {
    if (p.size() != q.size())
        throw input_error("join: partition sizes differ");
    Partition r = p;
    for (int i = 0; i < q.size(); ++i)
        r.unite(i, q.find(i));
    return r;
}

Partition meet(const Partition& p, const Partition& q) {
    if (p.size() != q.size())
        throw input_error("meet: partition sizes differ");
    Partition r(p.size());
    std::map<std::pair<int, int>, int> leader;
    for (int i = 0; i < p.size(); ++i) {
        auto key = std::make_pair(p.find(i), q.find(i));
        auto [it, fresh] = leader.emplace(key, i);
        if (!fresh)
            r.unite(it->second, i);
    }
    return r;
}

bool BinRelation::is_reflexive() const {
    for (int i = 0; i < n; ++i)
        if (!at(i, i))
            return false;
    return true;
}

bool BinRelation::is_symmetric() const {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (at(i, j) != at(j, i))
                return false;
    return true;
}

bool BinRelation::is_antisymmetric() const {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (at(i, j) && at(j, i))
                return false;
    return true;
}

bool BinRelation::is_transitive() const {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (at(i, j))
                for (int k = 0; k < n; ++k)
                    if (at(j, k) && !at(i, k))
                        return false;
    return true;
}

std::vector<std::pair<int, int>> BinRelation::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (at(i, j))
                out.emplace_back(i, j);
    return out;
}

namespace {

/// Grow `frontier` (a membership vector) through `steps` alternating class
/// closures, starting with p.  Frontiers only grow because partitions are
/// reflexive.
void grow_frontier(const Partition& p, const Partition& q, int steps,
                   std::vector<char>& frontier) {
    int n = p.size();
    std::vector<char> roots(static_cast<std::size_t>(n));
    for (int s = 1; s <= steps; ++s) {
        const Partition& rel = (s % 2 == 1) ? p : q;
        std::fill(roots.begin(), roots.end(), 0);
        for (int x = 0; x < n; ++x)
            if (frontier[static_cast<std::size_t>(x)])
                roots[static_cast<std::size_t>(rel.find(x))] = 1;
        for (int x = 0; x < n; ++x)
            if (roots[static_cast<std::size_t>(rel.find(x))])
                frontier[static_cast<std::size_t>(x)] = 1;
    }
}

} // namespace

bool in_compose_n(const Partition& p, const Partition& q, int steps, int a,
                  int b) {
    if (p.size() != q.size())
        throw input_error("in_compose_n: partition sizes differ");
    if (steps < 1)
        throw input_error("in_compose_n: need at least one factor");
    std::vector<char> frontier(static_cast<std::size_t>(p.size()), 0);
    frontier[static_cast<std::size_t>(a)] = 1;
    grow_frontier(p, q, steps, frontier);
    return frontier[static_cast<std::size_t>(b)] != 0;
}

BinRelation compose_n(const Partition& p, const Partition& q, int steps) {
    if (p.size() != q.size())
        throw input_error("compose_n: partition sizes differ");
    if (steps < 1)
        throw input_error("compose_n: need at least one factor");
    int n = p.size();
    BinRelation r(n);
    std::vector<char> frontier(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        std::fill(frontier.begin(), frontier.end(), 0);
        frontier[static_cast<std::size_t>(a)] = 1;
        grow_frontier(p, q, steps, frontier);
        for (int b = 0; b < n; ++b)
            if (frontier[static_cast<std::size_t>(b)])
                r.set(a, b);
    }
    return r;
}

namespace {

/// Apply every basic translation (one operation, one varying position, all
/// constant tuples elsewhere) to the pair (a, b) and hand each image pair to
/// the callback.  The callback returns false to abort the sweep.
template <typename F>
bool sweep_translations(const FiniteAlgebra& alg, int a, int b, F&& emit) {
    std::vector<int> args;
    for (std::size_t oi = 0; oi < alg.ops.size(); ++oi) {
        const OpTable& op = alg.ops[oi];
        int m = op.arity;
        if (m == 0)
            continue;
        args.assign(static_cast<std::size_t>(m), 0);
        for (int pos = 0; pos < m; ++pos) {
            // odometer over the m-1 constant positions
            std::fill(args.begin(), args.end(), 0);
            while (true) {
                args[static_cast<std::size_t>(pos)] = a;
                int ta = op.apply(args, alg.size);
                args[static_cast<std::size_t>(pos)] = b;
                int tb = op.apply(args, alg.size);
                if (ta != tb && !emit(ta, tb))
                    return false;
                int j = m - 1;
                for (; j >= 0; --j) {
                    if (j == pos)
                        continue;
                    if (args[static_cast<std::size_t>(j)] < alg.size - 1) {
                        ++args[static_cast<std::size_t>(j)];
                        for (int k = j + 1; k < m; ++k)
                            if (k != pos)
                                args[static_cast<std::size_t>(k)] = 0;
                        break;
                    }
                }
                if (j < 0)
                    break;
            }
        }
    }
    return true;
}

} // namespace

Partition cg(const FiniteAlgebra& a,
             const std::vector<std::pair<int, int>>& pairs) {
    Partition theta(a.size);
    std::deque<std::pair<int, int>> work;
    auto push = [&](int x, int y) {
        if (theta.unite(x, y))
            work.emplace_back(x, y);
    };
    for (auto [x, y] : pairs) {
        if (x < 0 || x >= a.size || y < 0 || y >= a.size)
            throw input_error("cg: generator pair out of range");
        push(x, y);
    }
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        sweep_translations(a, x, y, [&](int tx, int ty) {
            push(tx, ty);
            return true;
        });
    }
    return theta;
}

std::optional<CongruenceViolation> congruence_violation(const FiniteAlgebra& alg,
                                                        const Partition& p) {
    if (p.size() != alg.size)
        throw input_error("congruence_violation: partition size mismatch");
    for (const auto& cls : p.classes()) {
        int rep = cls[0];
        for (std::size_t i = 1; i < cls.size(); ++i) {
            int b = cls[i];
            // Find a translation separating rep from b, if any.  Re-derive
            // the violating translation's details with a second pass so the
            // fast path stays allocation-free.
            std::optional<CongruenceViolation> found;
            std::vector<int> args;
            for (std::size_t oi = 0; oi < alg.ops.size() && !found; ++oi) {
                const OpTable& op = alg.ops[oi];
                int m = op.arity;
                if (m == 0)
                    continue;
                args.assign(static_cast<std::size_t>(m), 0);
                for (int pos = 0; pos < m && !found; ++pos) {
                    std::fill(args.begin(), args.end(), 0);
                    while (true) {
                        args[static_cast<std::size_t>(pos)] = rep;
                        int ta = op.apply(args, alg.size);
                        args[static_cast<std::size_t>(pos)] = b;
                        int tb = op.apply(args, alg.size);
                        if (!p.same(ta, tb)) {
                            CongruenceViolation v;
                            v.op = static_cast<int>(oi);
                            v.position = pos;
                            v.fixed_args = args;
                            v.a = rep;
                            v.b = b;
                            found = std::move(v);
                            break;
                        }
                        int j = m - 1;
                        for (; j >= 0; --j) {
                            if (j == pos)
                                continue;
                            if (args[static_cast<std::size_t>(j)] < alg.size - 1) {
                                ++args[static_cast<std::size_t>(j)];
                                for (int k = j + 1; k < m; ++k)
                                    if (k != pos)
                                        args[static_cast<std::size_t>(k)] = 0;
                                break;
                            }
                        }
                        if (j < 0)
                            break;
                    }
                }
            }
            if (found)
                return found;
        }
    }
    return std::nullopt;
}

bool is_congruence(const FiniteAlgebra& a, const Partition& p) {
    return !congruence_violation(a, p).has_value();
}

Quotient quotient(const FiniteAlgebra& a, const Partition& p) {
    if (auto v = congruence_violation(a, p))
        throw precondition_error(
            "quotient: partition is not a congruence (operation '" +
            a.ops[static_cast<std::size_t>(v->op)].name + "' separates " +
            std::to_string(v->a) + " and " + std::to_string(v->b) + ")");
    auto cls = p.classes();
    Quotient q;
    q.class_of.resize(static_cast<std::size_t>(a.size));
    std::vector<int> rep(cls.size());
    for (std::size_t k = 0; k < cls.size(); ++k) {
        rep[k] = cls[k][0];
        for (int x : cls[k])
            q.class_of[static_cast<std::size_t>(x)] = static_cast<int>(k);
    }
    q.algebra.name = a.name + "/theta";
    q.algebra.size = static_cast<int>(cls.size());
    for (const OpTable& op : a.ops) {
        OpTable nq;
        nq.name = op.name;
        nq.arity = op.arity;
        std::size_t cells = 1;
        for (int i = 0; i < op.arity; ++i)
            cells *= cls.size();
        nq.table.resize(cells);
        std::vector<int> args(static_cast<std::size_t>(op.arity));
        for (std::size_t code = 0; code < cells; ++code) {
            std::size_t rest = code;
            for (int j = op.arity - 1; j >= 0; --j) {
                args[static_cast<std::size_t>(j)] =
                    rep[rest % cls.size()];
                rest /= cls.size();
            }
            nq.table[code] =
                q.class_of[static_cast<std::size_t>(op.apply(args, a.size))];
        }
        q.algebra.ops.push_back(std::move(nq));
    }
    return q;
}

bool modularity_law_holds(const Partition& alpha, const Partition& beta,
                          const Partition& gamma) {
    if (!gamma.leq(alpha))
        throw precondition_error(
            "modularity_law_holds: gamma must lie below alpha");
    Partition lhs = join(gamma, meet(alpha, beta));
    Partition rhs = meet(alpha, join(gamma, beta));
    return lhs == rhs;
}

std::optional<BinRelation> find_compatible_order(const FiniteAlgebra& alg) {
    int n = alg.size;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b)
                continue;
            BinRelation r(n);
            for (int i = 0; i < n; ++i)
                r.set(i, i);
            bool symmetric_pair = false;
            std::deque<std::pair<int, int>> sweep;

            // Insert (u, v) and restore transitivity in one shot; every pair
            // that is genuinely new is queued for a translation sweep.
            auto insert = [&](int u, int v) {
                if (r.at(u, v))
                    return true;
                std::vector<int> above, below;
                for (int x = 0; x < n; ++x) {
                    if (r.at(x, u))
                        below.push_back(x);  // includes u (reflexive)
                    if (r.at(v, x))
                        above.push_back(x);  // includes v
                }
                for (int x : below) {
                    for (int y : above) {
                        if (!r.at(x, y)) {
                            if (x != y && r.at(y, x)) {
                                symmetric_pair = true;
                                return false;
                            }
                            r.set(x, y);
                            sweep.emplace_back(x, y);
                        }
                    }
                }
                return true;
            };

            bool ok = insert(a, b);
            while (ok && !sweep.empty()) {
                auto [u, v] = sweep.front();
                sweep.pop_front();
                ok = sweep_translations(alg, u, v, [&](int tu, int tv) {
                    return insert(tu, tv);
                });
            }
            if (ok && !symmetric_pair)
                return r;
        }
    }
    return std::nullopt;
}

} // namespace malcevlab
