#include "malcevlab/algebra.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace malcevlab {

namespace {

/// FNV-1a over the bytes of an int vector; good enough for closure maps.
struct TupleHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (int x : v) {
            for (int b = 0; b < 4; ++b) {
                h ^= static_cast<unsigned char>(x >> (8 * b));
                h *= 1099511628211ull;
            }
        }
        return h;
    }
};

std::size_t checked_pow(std::size_t base, int exp, std::size_t limit) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base)
            throw cap_exceeded("table size overflows the materialization cap");
        r *= base;
    }
    return r;
}

} // namespace

std::size_t OpTable::index_of(std::span<const int> args, int n) {
    std::size_t idx = 0;
    for (int a : args)
        idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
    return idx;
}

int OpTable::apply(std::span<const int> args, int n) const {
    return table[index_of(args, n)];
}

void FiniteAlgebra::validate() const {
    if (size <= 0)
        throw input_error("algebra '" + name + "': universe must be nonempty");
    std::set<std::string> seen;
    for (const OpTable& op : ops) {
        if (op.name.empty())
            throw input_error("algebra '" + name + "': operation with empty name");
        if (!seen.insert(op.name).second)
            throw input_error("algebra '" + name + "': duplicate operation name '" +
                              op.name + "'");
        if (op.arity < 0)
            throw input_error("operation '" + op.name + "': negative arity");
        std::size_t want = 1;
        for (int i = 0; i < op.arity; ++i)
            want *= static_cast<std::size_t>(size);
        if (op.table.size() != want)
            throw input_error("operation '" + op.name + "': table has " +
                              std::to_string(op.table.size()) + " entries, expected " +
                              std::to_string(want));
        for (int v : op.table)
            if (v < 0 || v >= size)
                throw input_error("operation '" + op.name +
                                  "': table entry out of range");
    }
}

bool FiniteAlgebra::is_idempotent() const {
    for (const OpTable& op : ops) {
        std::vector<int> diag(static_cast<std::size_t>(std::max(op.arity, 1)));
        for (int x = 0; x < size; ++x) {
            std::fill(diag.begin(), diag.end(), x);
            std::span<const int> args(diag.data(),
                                      static_cast<std::size_t>(op.arity));
            if (op.apply(args, size) != x)
                return false;
        }
    }
    return true;
}

bool FiniteAlgebra::has_nullary_op() const {
    for (const OpTable& op : ops)
        if (op.arity == 0)
            return true;
    return false;
}

int FiniteAlgebra::max_arity() const {
    int m = 0;
    for (const OpTable& op : ops)
        m = std::max(m, op.arity);
    return m;
}

int FiniteAlgebra::apply(int op, std::span<const int> args) const {
    return ops[static_cast<std::size_t>(op)].apply(args, size);
}

int FiniteAlgebra::op_index(const std::string& opname) const {
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].name == opname)
            return static_cast<int>(i);
    return -1;
}

std::vector<int> power_decode(std::size_t code, int base, int n) {
    std::vector<int> coords(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        coords[static_cast<std::size_t>(i)] =
            static_cast<int>(code % static_cast<std::size_t>(base));
        code /= static_cast<std::size_t>(base);
    }
    return coords;
}

std::size_t power_encode(std::span<const int> coords, int base) {
    std::size_t code = 0;
    for (int c : coords)
        code = code * static_cast<std::size_t>(base) + static_cast<std::size_t>(c);
    return code;
}

FiniteAlgebra direct_power(const FiniteAlgebra& a, int n, std::size_t max_cells) {
    if (n < 1)
        throw input_error("direct_power: exponent must be at least 1");
    std::size_t psize = checked_pow(static_cast<std::size_t>(a.size), n, max_cells);
    FiniteAlgebra p;
    p.name = a.name + "^" + std::to_string(n);
    p.size = static_cast<int>(psize);
    for (const OpTable& op : a.ops) {
        std::size_t cells = checked_pow(psize, op.arity, max_cells);
        OpTable q;
        q.name = op.name;
        q.arity = op.arity;
        q.table.resize(cells);
        std::vector<std::vector<int>> arg_coords(
            static_cast<std::size_t>(op.arity));
        std::vector<int> col(static_cast<std::size_t>(op.arity));
        std::vector<int> res(static_cast<std::size_t>(n));
        for (std::size_t code = 0; code < cells; ++code) {
            std::size_t rest = code;
            for (int j = op.arity - 1; j >= 0; --j) {
                arg_coords[static_cast<std::size_t>(j)] = power_decode(
                    rest % psize, a.size, n);
                rest /= psize;
            }
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < op.arity; ++j)
                    col[static_cast<std::size_t>(j)] =
                        arg_coords[static_cast<std::size_t>(j)]
                                  [static_cast<std::size_t>(i)];
                res[static_cast<std::size_t>(i)] = op.apply(col, a.size);
            }
            q.table[code] = static_cast<int>(power_encode(res, a.size));
        }
        p.ops.push_back(std::move(q));
    }
    return p;
}

FiniteAlgebra direct_product(const FiniteAlgebra& a, const FiniteAlgebra& b,
                             std::size_t max_cells) {
    if (a.ops.size() != b.ops.size())
        throw input_error("direct_product: signatures differ in operation count");
    for (std::size_t i = 0; i < a.ops.size(); ++i)
        if (a.ops[i].name != b.ops[i].name || a.ops[i].arity != b.ops[i].arity)
            throw input_error("direct_product: signatures differ at operation '" +
                              a.ops[i].name + "'");
    std::size_t psize =
        static_cast<std::size_t>(a.size) * static_cast<std::size_t>(b.size);
    if (psize > max_cells)
        throw cap_exceeded("direct_product: universe exceeds the cap");
    FiniteAlgebra p;
    p.name = a.name + "x" + b.name;
    p.size = static_cast<int>(psize);
    for (std::size_t oi = 0; oi < a.ops.size(); ++oi) {
        const OpTable& fa = a.ops[oi];
        const OpTable& fb = b.ops[oi];
        std::size_t cells = checked_pow(psize, fa.arity, max_cells);
        OpTable q;
        q.name = fa.name;
        q.arity = fa.arity;
        q.table.resize(cells);
        std::vector<int> left(static_cast<std::size_t>(fa.arity));
        std::vector<int> right(static_cast<std::size_t>(fa.arity));
        for (std::size_t code = 0; code < cells; ++code) {
            std::size_t rest = code;
            for (int j = fa.arity - 1; j >= 0; --j) {
                std::size_t pair = rest % psize;
                rest /= psize;
                left[static_cast<std::size_t>(j)] =
                    static_cast<int>(pair / static_cast<std::size_t>(b.size));
                right[static_cast<std::size_t>(j)] =
                    static_cast<int>(pair % static_cast<std::size_t>(b.size));
            }
            int va = fa.apply(left, a.size);
            int vb = fb.apply(right, b.size);
            q.table[code] =
                static_cast<int>(va * b.size + vb);
        }
        p.ops.push_back(std::move(q));
    }
    return p;
}

std::vector<int> subuniverse_closure(const FiniteAlgebra& a,
                                     std::vector<int> seeds) {
    std::vector<char> in(static_cast<std::size_t>(a.size), 0);
    std::vector<int> elems;
    auto add = [&](int x) {
        if (x < 0 || x >= a.size)
            throw input_error("subuniverse_closure: element out of range");
        if (!in[static_cast<std::size_t>(x)]) {
            in[static_cast<std::size_t>(x)] = 1;
            elems.push_back(x);
        }
    };
    for (int s : seeds)
        add(s);
    for (const OpTable& op : a.ops)
        if (op.arity == 0)
            add(op.table[0]);

    // Process each element against everything inserted no later than itself;
    // for arity m enumerate exactly the argument tuples whose largest index
    // is the current one, so every tuple over the final set is tried once.
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const OpTable& op : a.ops) {
            int m = op.arity;
            if (m == 0)
                continue;
            std::vector<int> args(static_cast<std::size_t>(m));
            // p = first position holding the newest element.
            for (int p = 0; p < m; ++p) {
                // positions < p range over [0, i); position p is i;
                // positions > p range over [0, i].
                std::vector<std::size_t> odo(static_cast<std::size_t>(m), 0);
                odo[static_cast<std::size_t>(p)] = i;
                bool feasible = true;
                for (int j = 0; j < p; ++j)
                    if (i == 0) { feasible = false; break; }
                if (!feasible)
                    continue;
                while (true) {
                    for (int j = 0; j < m; ++j)
                        args[static_cast<std::size_t>(j)] =
                            elems[odo[static_cast<std::size_t>(j)]];
                    add(op.apply(args, a.size));
                    // advance odometer (skipping position p)
                    int j = m - 1;
                    for (; j >= 0; --j) {
                        if (j == p)
                            continue;
                        std::size_t lim = (j < p) ? i - 1 : i;
                        if (odo[static_cast<std::size_t>(j)] < lim) {
                            ++odo[static_cast<std::size_t>(j)];
                            for (int k = j + 1; k < m; ++k)
                                if (k != p)
                                    odo[static_cast<std::size_t>(k)] = 0;
                            break;
                        }
                    }
                    if (j < 0)
                        break;
                }
            }
        }
    }
    std::sort(elems.begin(), elems.end());
    return elems;
}

std::vector<std::vector<int>> all_subuniverses(const FiniteAlgebra& a) {
    std::set<std::vector<int>> seen;
    std::size_t subsets = std::size_t{1} << a.size;
    for (std::size_t mask = 1; mask < subsets; ++mask) {
        std::vector<int> seeds;
        for (int x = 0; x < a.size; ++x)
            if (mask & (std::size_t{1} << x))
                seeds.push_back(x);
        seen.insert(subuniverse_closure(a, std::move(seeds)));
    }
    std::vector<std::vector<int>> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size())
            return x.size() < y.size();
        return x < y;
    });
    return out;
}

int TupleClosure::find(std::span<const int> t) const {
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (tuples[i].size() == t.size() &&
            std::equal(tuples[i].begin(), tuples[i].end(), t.begin()))
            return static_cast<int>(i);
    }
    return -1;
}

TupleClosure close_tuples(const FiniteAlgebra& base,
                          const std::vector<std::vector<int>>& seeds,
                          std::size_t cap) {
    if (seeds.empty())
        throw input_error("close_tuples: need at least one seed tuple");
    const std::size_t len = seeds[0].size();
    TupleClosure out;
    std::unordered_map<std::vector<int>, int, TupleHash> index;

    auto add = [&](std::vector<int> t, Derivation d) -> int {
        auto it = index.find(t);
        if (it != index.end())
            return it->second;
        if (out.tuples.size() >= cap)
            throw cap_exceeded("close_tuples: closure exceeded cap of " +
                               std::to_string(cap) + " tuples");
        int id = static_cast<int>(out.tuples.size());
        index.emplace(t, id);
        out.tuples.push_back(std::move(t));
        out.how.push_back(std::move(d));
        return id;
    };

    for (std::size_t s = 0; s < seeds.size(); ++s) {
        if (seeds[s].size() != len)
            throw input_error("close_tuples: seed tuples have mixed lengths");
        for (int v : seeds[s])
            if (v < 0 || v >= base.size)
                throw input_error("close_tuples: seed entry out of range");
        Derivation d;
        d.var = static_cast<int>(s);
        add(seeds[s], std::move(d));
    }
    for (std::size_t oi = 0; oi < base.ops.size(); ++oi) {
        if (base.ops[oi].arity == 0) {
            Derivation d;
            d.op = static_cast<int>(oi);
            d.var = -1;
            add(std::vector<int>(len, base.ops[oi].table[0]), std::move(d));
        }
    }

    std::vector<int> argidx;
    std::vector<int> col;
    std::vector<int> result(len);
    for (std::size_t i = 0; i < out.tuples.size(); ++i) {
        for (std::size_t oi = 0; oi < base.ops.size(); ++oi) {
            const OpTable& op = base.ops[oi];
            int m = op.arity;
            if (m == 0)
                continue;
            argidx.assign(static_cast<std::size_t>(m), 0);
            col.resize(static_cast<std::size_t>(m));
            for (int p = 0; p < m; ++p) {
                if (p > 0 && i == 0)
                    break;  // positions before p need an index < i
                std::vector<std::size_t> odo(static_cast<std::size_t>(m), 0);
                odo[static_cast<std::size_t>(p)] = i;
                while (true) {
                    for (std::size_t j = 0; j < len; ++j) {
                        for (int q = 0; q < m; ++q)
                            col[static_cast<std::size_t>(q)] =
                                out.tuples[odo[static_cast<std::size_t>(q)]][j];
                        result[j] = op.apply(col, base.size);
                    }
                    Derivation d;
                    d.op = static_cast<int>(oi);
                    d.args.assign(odo.begin(), odo.end());
                    add(result, std::move(d));
                    int j = m - 1;
                    for (; j >= 0; --j) {
                        if (j == p)
                            continue;
                        std::size_t lim = (j < p) ? i - 1 : i;
                        if (odo[static_cast<std::size_t>(j)] < lim) {
                            ++odo[static_cast<std::size_t>(j)];
                            for (int k = j + 1; k < m; ++k)
                                if (k != p)
                                    odo[static_cast<std::size_t>(k)] = 0;
                            break;
                        }
                    }
                    if (j < 0)
                        break;
                }
            }
        }
    }
    return out;
}

} // namespace malcevlab
