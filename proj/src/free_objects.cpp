#include "malcevlab/free_objects.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace malcevlab {

namespace {

struct ByteVecHash {
    std::size_t operator()(const std::vector<uint8_t>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (uint8_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

/// Packed closure for two-element base algebras whose tables fit in one
/// 64-bit word: an element is the word whose bit j is the table entry at
/// assignment index j.  The loop structure mirrors close_tuples exactly
/// (same seed handling, same odometer), so insertion order is identical.
struct PackedClosure {
    std::vector<uint64_t> words;
    std::vector<Derivation> how;
};

uint64_t apply_packed(const OpTable& op, const uint64_t* args, uint64_t all) {
    uint64_t res = 0;
    int m = op.arity;
    for (std::size_t pat = 0; pat < op.table.size(); ++pat) {
        if (!op.table[pat])
            continue;
        uint64_t acc = all;
        for (int i = 0; i < m; ++i) {
            uint64_t a = args[i];
            acc &= ((pat >> (m - 1 - i)) & 1u) ? a : ~a;
        }
        res |= acc;
    }
    return res & all;
}

PackedClosure close_packed(const FiniteAlgebra& base,
                           const std::vector<uint64_t>& seeds,
                           std::size_t len, std::size_t cap) {
    uint64_t all = (len >= 64) ? ~0ull : ((1ull << len) - 1);
    PackedClosure out;
    std::unordered_map<uint64_t, int> index;

    auto add = [&](uint64_t w, Derivation d) {
        auto it = index.find(w);
        if (it != index.end())
            return;
        if (out.words.size() >= cap)
            throw cap_exceeded("free_algebra: closure exceeded cap of " +
                               std::to_string(cap) + " elements");
        index.emplace(w, static_cast<int>(out.words.size()));
        out.words.push_back(w);
        out.how.push_back(std::move(d));
    };

    for (std::size_t s = 0; s < seeds.size(); ++s) {
        Derivation d;
        d.var = static_cast<int>(s);
        add(seeds[s], std::move(d));
    }
    for (std::size_t oi = 0; oi < base.ops.size(); ++oi) {
        if (base.ops[oi].arity == 0) {
            Derivation d;
            d.op = static_cast<int>(oi);
            d.var = -1;
            add(base.ops[oi].table[0] ? all : 0ull, std::move(d));
        }
    }

    uint64_t argbuf[16];
    for (std::size_t i = 0; i < out.words.size(); ++i) {
        for (std::size_t oi = 0; oi < base.ops.size(); ++oi) {
            const OpTable& op = base.ops[oi];
            int m = op.arity;
            if (m == 0)
                continue;
            if (m > 16)
                throw input_error("free_algebra: operation arity above 16");
            for (int p = 0; p < m; ++p) {
                if (p > 0 && i == 0)
                    break;
                std::vector<std::size_t> odo(static_cast<std::size_t>(m), 0);
                odo[static_cast<std::size_t>(p)] = i;
                while (true) {
                    for (int q = 0; q < m; ++q)
                        argbuf[q] = out.words[odo[static_cast<std::size_t>(q)]];
                    Derivation d;
                    d.op = static_cast<int>(oi);
                    d.args.assign(odo.begin(), odo.end());
                    add(apply_packed(op, argbuf, all), std::move(d));
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

std::unordered_map<std::vector<uint8_t>, int, ByteVecHash> make_index(
    const std::vector<std::vector<uint8_t>>& elems) {
    std::unordered_map<std::vector<uint8_t>, int, ByteVecHash> index;
    index.reserve(elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i)
        index.emplace(elems[i], static_cast<int>(i));
    return index;
}

// One shared index per FreeAlgebra would bloat the struct; the lookups are
// rare enough that rebuilding on demand inside the two entry points that
// need them (find/apply via a thread-local cache keyed on the elems address)
// is not worth the complexity either.  Keep it simple: build per call site
// that loops, linear-scan otherwise.

} // namespace

int FreeAlgebra::find(const std::vector<uint8_t>& table) const {
    for (std::size_t i = 0; i < elems.size(); ++i)
        if (elems[i] == table)
            return static_cast<int>(i);
    return -1;
}

int FreeAlgebra::apply(int op, std::span<const int> elem_indices) const {
    const OpTable& o = base.ops[static_cast<std::size_t>(op)];
    std::vector<uint8_t> res(table_len);
    std::vector<int> col(elem_indices.size());
    for (std::size_t j = 0; j < table_len; ++j) {
        for (std::size_t q = 0; q < elem_indices.size(); ++q)
            col[q] = elems[static_cast<std::size_t>(elem_indices[q])][j];
        res[j] = static_cast<uint8_t>(o.apply(col, base.size));
    }
    int idx = find(res);
    if (idx < 0)
        throw verification_error("FreeAlgebra::apply: image not in the closure");
    return idx;
}

TermPtr term_from_derivations(const std::vector<Derivation>& how, int idx) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= how.size())
        throw input_error("term_from_derivations: index out of range");
    std::vector<TermPtr> memo(static_cast<std::size_t>(idx) + 1);
    for (int i = 0; i <= idx; ++i) {
        const Derivation& d = how[static_cast<std::size_t>(i)];
        if (d.op < 0) {
            memo[static_cast<std::size_t>(i)] = Term::make_var(d.var);
        } else {
            std::vector<TermPtr> args;
            args.reserve(d.args.size());
            for (int a : d.args)
                args.push_back(memo[static_cast<std::size_t>(a)]);
            memo[static_cast<std::size_t>(i)] =
                Term::make_app(d.op, std::move(args));
        }
    }
    return memo[static_cast<std::size_t>(idx)];
}

TermPtr FreeAlgebra::term_of(int elem) const {
    return term_from_derivations(how, elem);
}

FiniteAlgebra FreeAlgebra::as_finite_algebra(const std::string& name,
                                             std::size_t max_cells) const {
    FiniteAlgebra out;
    out.name = name;
    out.size = size();
    auto index = make_index(elems);
    std::vector<int> col;
    std::vector<uint8_t> res(table_len);
    for (std::size_t oi = 0; oi < base.ops.size(); ++oi) {
        const OpTable& o = base.ops[oi];
        std::size_t cells = 1;
        for (int i = 0; i < o.arity; ++i) {
            if (cells > max_cells / static_cast<std::size_t>(std::max(out.size, 1)))
                throw cap_exceeded(
                    "as_finite_algebra: table exceeds the materialization cap");
            cells *= static_cast<std::size_t>(out.size);
        }
        OpTable q;
        q.name = o.name;
        q.arity = o.arity;
        q.table.resize(cells);
        std::vector<int> args(static_cast<std::size_t>(o.arity));
        col.resize(static_cast<std::size_t>(o.arity));
        for (std::size_t code = 0; code < cells; ++code) {
            std::size_t rest = code;
            for (int j = o.arity - 1; j >= 0; --j) {
                args[static_cast<std::size_t>(j)] =
                    static_cast<int>(rest % static_cast<std::size_t>(out.size));
                rest /= static_cast<std::size_t>(out.size);
            }
            for (std::size_t j = 0; j < table_len; ++j) {
                for (int qq = 0; qq < o.arity; ++qq)
                    col[static_cast<std::size_t>(qq)] =
                        elems[static_cast<std::size_t>(
                            args[static_cast<std::size_t>(qq)])][j];
                res[j] = static_cast<uint8_t>(o.apply(col, base.size));
            }
            auto it = index.find(res);
            if (it == index.end())
                throw verification_error(
                    "as_finite_algebra: image not in the closure");
            q.table[code] = it->second;
        }
        out.ops.push_back(std::move(q));
    }
    return out;
}

FreeAlgebra free_algebra(const FiniteAlgebra& a, int k, std::size_t cap) {
    a.validate();
    if (k < 1)
        throw input_error("free_algebra: need at least one generator");
    std::size_t len = 1;
    for (int i = 0; i < k; ++i) {
        if (len > (std::size_t{16} << 20) / static_cast<std::size_t>(a.size))
            throw cap_exceeded("free_algebra: assignment table too long");
        len *= static_cast<std::size_t>(a.size);
    }

    FreeAlgebra F;
    F.base = a;
    F.n_generators = k;
    F.table_len = len;

    // stride of generator i (first generator most significant)
    std::vector<std::size_t> stride(static_cast<std::size_t>(k), 1);
    for (int i = k - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] =
            stride[static_cast<std::size_t>(i + 1)] *
            static_cast<std::size_t>(a.size);

    if (a.size == 2 && len <= 64) {
        std::vector<uint64_t> seeds;
        for (int i = 0; i < k; ++i) {
            uint64_t w = 0;
            for (std::size_t j = 0; j < len; ++j)
                if ((j / stride[static_cast<std::size_t>(i)]) % 2u)
                    w |= 1ull << j;
            seeds.push_back(w);
        }
        PackedClosure pc = close_packed(a, seeds, len, cap);
        F.elems.reserve(pc.words.size());
        for (uint64_t w : pc.words) {
            std::vector<uint8_t> t(len);
            for (std::size_t j = 0; j < len; ++j)
                t[j] = static_cast<uint8_t>((w >> j) & 1u);
            F.elems.push_back(std::move(t));
        }
        F.how = std::move(pc.how);
    } else {
        std::vector<std::vector<int>> seeds;
        for (int i = 0; i < k; ++i) {
            std::vector<int> t(len);
            for (std::size_t j = 0; j < len; ++j)
                t[j] = static_cast<int>((j / stride[static_cast<std::size_t>(i)]) %
                                        static_cast<std::size_t>(a.size));
            seeds.push_back(std::move(t));
        }
        TupleClosure tc = close_tuples(a, seeds, cap);
        F.elems.reserve(tc.tuples.size());
        for (const auto& t : tc.tuples)
            F.elems.emplace_back(t.begin(), t.end());
        F.how = std::move(tc.how);
    }

    // Locate the generators (projections can coincide on a one-element base).
    auto index = make_index(F.elems);
    for (int i = 0; i < k; ++i) {
        std::vector<uint8_t> t(len);
        for (std::size_t j = 0; j < len; ++j)
            t[j] = static_cast<uint8_t>(
                (j / stride[static_cast<std::size_t>(i)]) %
                static_cast<std::size_t>(a.size));
        auto it = index.find(t);
        if (it == index.end())
            throw verification_error("free_algebra: generator missing");
        F.gen_index.push_back(it->second);
    }
    return F;
}

FreeCache::FreeCache(FiniteAlgebra a, std::size_t cap)
    : alg_(std::move(a)), cap_(cap) {
    alg_.validate();
}

const FreeAlgebra& FreeCache::get(int k) {
    auto it = store_.find(k);
    if (it == store_.end())
        it = store_.emplace(k, free_algebra(alg_, k, cap_)).first;
    return it->second;
}

Partition refine_congruence(const FreeAlgebra& F, const Partition& theta) {
    if (theta.size() != F.n_generators)
        throw input_error(
            "refine_congruence: partition size must match the generator count");
    int n = F.base.size;
    int k = F.n_generators;
    auto cls = theta.classes();
    int c = static_cast<int>(cls.size());
    std::vector<int> class_of(static_cast<std::size_t>(k));
    for (int ci = 0; ci < c; ++ci)
        for (int g : cls[static_cast<std::size_t>(ci)])
            class_of[static_cast<std::size_t>(g)] = ci;

    std::vector<std::size_t> stride(static_cast<std::size_t>(k), 1);
    for (int i = k - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] =
            stride[static_cast<std::size_t>(i + 1)] *
            static_cast<std::size_t>(n);

    // Assignment indices of every assignment constant on theta-classes.
    std::vector<std::size_t> idxs;
    std::vector<int> digits(static_cast<std::size_t>(c), 0);
    while (true) {
        std::size_t idx = 0;
        for (int i = 0; i < k; ++i)
            idx += static_cast<std::size_t>(
                       digits[static_cast<std::size_t>(
                           class_of[static_cast<std::size_t>(i)])]) *
                   stride[static_cast<std::size_t>(i)];
        idxs.push_back(idx);
        int j = c - 1;
        for (; j >= 0; --j) {
            if (digits[static_cast<std::size_t>(j)] < n - 1) {
                ++digits[static_cast<std::size_t>(j)];
                std::fill(digits.begin() + j + 1, digits.end(), 0);
                break;
            }
        }
        if (j < 0)
            break;
    }

    // Two elements are congruent iff their tables agree on those assignments:
    // group elements by the restricted table.
    Partition out(F.size());
    std::unordered_map<std::vector<uint8_t>, int, ByteVecHash> leader;
    std::vector<uint8_t> sig(idxs.size());
    for (int e = 0; e < F.size(); ++e) {
        for (std::size_t m = 0; m < idxs.size(); ++m)
            sig[m] = F.elems[static_cast<std::size_t>(e)][idxs[m]];
        auto [it, fresh] = leader.emplace(sig, e);
        if (!fresh)
            out.unite(it->second, e);
    }
    return out;
}

std::vector<std::vector<int>> refine_transitive(
    const std::vector<std::vector<int>>& pairs, int n) {
    if (n > 4096)
        throw cap_exceeded("refine_transitive: universe above 4096 elements");
    std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
    std::vector<std::vector<uint64_t>> row(
        static_cast<std::size_t>(n), std::vector<uint64_t>(words, 0));
    for (const auto& p : pairs) {
        if (p.size() != 2)
            throw input_error("refine_transitive: tuples must be pairs");
        row[static_cast<std::size_t>(p[0])][static_cast<std::size_t>(p[1]) / 64] |=
            1ull << (static_cast<std::size_t>(p[1]) % 64);
    }
    for (int k = 0; k < n; ++k) {
        std::size_t kw = static_cast<std::size_t>(k) / 64;
        uint64_t kb = 1ull << (static_cast<std::size_t>(k) % 64);
        for (int i = 0; i < n; ++i) {
            if (row[static_cast<std::size_t>(i)][kw] & kb)
                for (std::size_t w = 0; w < words; ++w)
                    row[static_cast<std::size_t>(i)][w] |=
                        row[static_cast<std::size_t>(k)][w];
        }
    }
    std::vector<std::vector<int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) / 64] &
                (1ull << (static_cast<std::size_t>(j) % 64)))
                out.push_back({i, j});
    return out;
}

namespace {

bool relation_is_equivalence(const Relation& r, int size) {
    if (r.arity != 2)
        return false;
    BinRelation b(size);
    for (const auto& t : r.tuples)
        b.set(t[0], t[1]);
    return b.is_reflexive() && b.is_symmetric() && b.is_transitive();
}

bool relation_is_preorder(const Relation& r, int size) {
    if (r.arity != 2)
        return false;
    BinRelation b(size);
    for (const auto& t : r.tuples)
        b.set(t[0], t[1]);
    return b.is_reflexive() && b.is_transitive();
}

} // namespace

FreeStructure free_structure(FreeCache& cache, const RelStructure& target,
                             RefineMode mode) {
    const FreeAlgebra& F = cache.get(target.size);
    FreeStructure fs;
    fs.F = &F;

    std::optional<FiniteAlgebra> F_alg;  // materialized lazily for closures
    auto base_for_closure = [&]() -> const FiniteAlgebra& {
        if (!F_alg)
            F_alg = F.as_finite_algebra("free");
        return *F_alg;
    };

    for (const Relation& r : target.rels) {
        FreeRelation fr;
        fr.name = r.name;
        fr.arity = r.arity;
        if (mode == RefineMode::automatic &&
            relation_is_equivalence(r, target.size)) {
            fr.as_congruence = true;
            fr.congruence =
                refine_congruence(F, relation_as_partition(r, target.size));
        } else {
            std::vector<std::vector<int>> seeds;
            seeds.reserve(r.tuples.size());
            for (const auto& t : r.tuples) {
                std::vector<int> s(t.size());
                for (std::size_t q = 0; q < t.size(); ++q)
                    s[q] = F.generator(t[q]);
                seeds.push_back(std::move(s));
            }
            TupleClosure tc = close_tuples(base_for_closure(), seeds, cache.cap());
            if (mode == RefineMode::automatic &&
                relation_is_preorder(r, target.size)) {
                fr.tuples = refine_transitive(tc.tuples, F.size());
                // derivations no longer line up after refinement
            } else {
                fr.tuples = std::move(tc.tuples);
                fr.how = std::move(tc.how);
            }
        }
        fs.rels.push_back(std::move(fr));
    }
    return fs;
}

ColoringResult strong_coloring(FreeCache& cache, const RelStructure& target,
                               bool pinned, RefineMode mode) {
    if (target.size < 1 || target.size > 64)
        throw input_error("strong_coloring: target size must be 1..64");
    FreeStructure fs = free_structure(cache, target, mode);
    const FreeAlgebra& F = *fs.F;

    // Target-side partitions for congruence-realized relations must stay
    // alive through the solve.
    std::deque<Partition> target_parts;
    HomProblem p;
    p.n_vars = F.size();
    p.n_vals = target.size;
    for (const FreeRelation& fr : fs.rels) {
        if (fr.as_congruence) {
            const Relation* tr = target.find_relation(fr.name);
            target_parts.push_back(relation_as_partition(*tr, target.size));
            p.eq_constraints.push_back({&fr.congruence, &target_parts.back()});
        } else {
            const Relation* tr = target.find_relation(fr.name);
            for (const auto& t : fr.tuples) {
                HomProblem::TupleConstraint tc;
                tc.scope = t;
                tc.targets = &tr->tuples;
                p.tuple_constraints.push_back(std::move(tc));
            }
        }
    }
    if (pinned)
        for (int b = 0; b < target.size; ++b)
            p.pins.emplace_back(F.generator(b), b);

    ColoringResult out;
    out.free_size = static_cast<std::size_t>(F.size());
    auto sol = solve_hom(p);
    out.found = sol.has_value();
    if (sol)
        out.map = std::move(*sol);
    return out;
}

} // namespace malcevlab
