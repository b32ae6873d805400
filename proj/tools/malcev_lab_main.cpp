/// malcev-lab: command-line surface over the workbench.
///
/// Subcommands load an algebra or structure file, run one decider or
/// construction, and print a deterministic plain-text summary (or the JSON
/// report, for `analyze`).  Exit codes: 0 the analysis completed (whatever
/// the mathematical answer), 1 bad input or violated precondition, 2 a
/// resource cap was exceeded, 3 an internal verification failed — the last
/// is reachable only through the hidden fault-injection flag or a genuine
/// bug, never on well-formed inputs.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "malcevlab/algebra.hpp"
#include "malcevlab/constructions.hpp"
#include "malcevlab/errors.hpp"
#include "malcevlab/free_objects.hpp"
#include "malcevlab/io.hpp"
#include "malcevlab/malcev.hpp"
#include "malcevlab/partition.hpp"
#include "malcevlab/relstruct.hpp"
#include "malcevlab/term.hpp"

namespace {

using namespace malcevlab;

std::string yn(const std::optional<bool>& v) {
    if (!v) return "inconclusive";
    return *v ? "yes" : "no";
}

std::vector<int> parse_int_list(const std::string& spec, const char* what) {
    std::vector<int> out;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty())
            throw input_error(std::string(what) + ": empty entry in '" + spec + "'");
        try {
            std::size_t used = 0;
            int v = std::stoi(cur, &used);
            if (used != cur.size()) throw std::invalid_argument(cur);
            out.push_back(v);
        } catch (const std::exception&) {
            throw input_error(std::string(what) + ": '" + cur +
                              "' is not an integer");
        }
        cur.clear();
    };
    for (char c : spec) {
        if (c == ',')
            flush();
        else
            cur.push_back(c);
    }
    flush();
    return out;
}

RelStructure parse_target(const std::string& spec) {
    if (spec == "p0") return build_p0();
    if (spec == "order2") return build_order2();
    if (spec == "s") return build_s();
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string head = spec.substr(0, colon);
        std::string tail = spec.substr(colon + 1);
        if (head == "file") return load_structure_file(tail);
        int v = 0;
        try {
            std::size_t used = 0;
            v = std::stoi(tail, &used);
            if (used != tail.size()) throw std::invalid_argument(tail);
        } catch (const std::exception&) {
            throw input_error("color target '" + spec +
                              "': expected an integer after '" + head + ":'");
        }
        if (head == "wn") return build_wn(v);
        if (head == "bn") return build_bn(v);
        if (head == "b0") return build_b0(v);
    }
    throw input_error("unknown color target '" + spec +
                      "' (expected p0|wn:<n>|order2|s|bn:<n>|b0:<kmax>|file:<path>)");
}

void print_coloring(const ColoringResult& col) {
    std::cout << "refuting coloring over " << col.free_size
              << " free elements\n";
    if (col.map.size() <= 64) {
        std::cout << "map:";
        for (int v : col.map) std::cout << " " << v;
        std::cout << "\n";
    } else {
        std::cout << "map suppressed (" << col.map.size() << " entries)\n";
    }
}

void print_decision(const Decision& d, const FiniteAlgebra& a) {
    std::cout << "question: " << d.question << "\n";
    std::cout << "holds: " << yn(d.holds) << "\n";
    std::cout << "authority: " << d.authority << "\n";
    for (const CrossCheck& cc : d.cross_checks) {
        std::cout << "cross-check " << cc.name << ": " << yn(cc.result);
        if (!cc.note.empty()) std::cout << " (" << cc.note << ")";
        std::cout << "\n";
    }
    for (const std::string& note : d.notes) std::cout << "note: " << note << "\n";
    if (d.coloring && d.coloring->found) print_coloring(*d.coloring);
    if (!d.chain.empty()) {
        if (d.question.rfind("cube-term:", 0) == 0) {
            std::cout << "term: " << term_to_string(d.chain[0], a) << "\n";
            int n = std::stoi(d.question.substr(std::string("cube-term:").size()));
            RelStructure bn = build_bn(n);
            const Relation& pattern = bn.rels[0];
            for (std::size_t i = 0; i < pattern.tuples.size(); ++i) {
                std::cout << "  x" << i << " selects pattern";
                for (int b : pattern.tuples[i]) std::cout << " " << b;
                std::cout << "\n";
            }
        } else {
            std::cout << "chain (" << d.chain.size() << " terms):\n";
            for (const TermPtr& t : d.chain)
                std::cout << "  " << term_to_string(t, a) << "\n";
        }
    }
}

struct CommonArgs {
    std::string alg_path;
    std::size_t cap = 2'000'000;
    bool inject_fault = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("algebra", args.alg_path, "algebra file")->required();
    sub->add_option("--cap", args.cap, "closure size cap");
    sub->add_flag("--inject-cross-fault", args.inject_fault,
                  "negate cross-check results (fault-injection test hook)")
        ->group("");
}

DeciderOptions decider_options(const CommonArgs& args) {
    DeciderOptions opts;
    opts.cap = args.cap;
    opts.flip_cross_checks = args.inject_fault;
    return opts;
}

int run(int argc, char** argv) {
    CLI::App app{"malcev-lab: Mal'cev conditions of finite idempotent algebras"};
    app.require_subcommand(1);

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "full report for an algebra");
    CommonArgs an_args;
    AnalyzeOptions an_opts;
    std::string an_json_out;
    analyze_cmd->add_option("algebra", an_args.alg_path, "algebra file")->required();
    analyze_cmd->add_option("--max-perm", an_opts.max_perm,
                            "largest n for n-permutability (default 4)");
    analyze_cmd->add_option("--max-cube", an_opts.max_cube,
                            "largest n for n-cube terms (default 3)");
    analyze_cmd->add_option("--cap", an_opts.cap, "closure size cap");
    analyze_cmd->add_option("--json", an_json_out, "write the report to this file");
    analyze_cmd->add_flag("--timings", an_opts.timings,
                          "include phase timings in the report");
    analyze_cmd
        ->add_flag("--inject-cross-fault", an_opts.flip_cross_checks,
                   "negate cross-check results (fault-injection test hook)")
        ->group("");
    analyze_cmd->callback([&]() {
        FiniteAlgebra a = load_algebra_file(an_args.alg_path);
        Report r = analyze(a, an_opts);
        std::string text = emit_report(r);
        if (an_json_out.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(an_json_out, std::ios::binary);
            if (!out) throw input_error("cannot write '" + an_json_out + "'");
            out << text;
        }
    });

    // day / kk
    auto* day_cmd = app.add_subcommand("day", "decide Day terms (congruence modularity)");
    CommonArgs day_args;
    add_common(day_cmd, day_args);
    day_cmd->callback([&]() {
        FiniteAlgebra a = load_algebra_file(day_args.alg_path);
        FreeCache cache(a, day_args.cap);
        print_decision(decide_day_terms(cache, decider_options(day_args)), a);
    });

    auto* kk_cmd = app.add_subcommand(
        "kk", "decide Kearnes-Kiss terms (non-trivial congruence identity)");
    CommonArgs kk_args;
    add_common(kk_cmd, kk_args);
    kk_cmd->callback([&]() {
        FiniteAlgebra a = load_algebra_file(kk_args.alg_path);
        FreeCache cache(a, kk_args.cap);
        print_decision(decide_congruence_identity(cache, decider_options(kk_args)),
                       a);
    });

    // permutable
    auto* perm_cmd = app.add_subcommand("permutable", "decide congruence n-permutability");
    CommonArgs perm_args;
    int perm_n = 0;
    bool perm_any = false;
    add_common(perm_cmd, perm_args);
    auto* perm_n_opt = perm_cmd->add_option("--n", perm_n, "concrete n (>= 2)");
    auto* perm_any_opt =
        perm_cmd->add_flag("--any", perm_any, "permutability for some n");
    perm_n_opt->excludes(perm_any_opt);
    perm_any_opt->excludes(perm_n_opt);
    perm_cmd->callback([&]() {
        if (perm_n == 0 && !perm_any)
            throw input_error("permutable: pass --n <n> or --any");
        FiniteAlgebra a = load_algebra_file(perm_args.alg_path);
        FreeCache cache(a, perm_args.cap);
        Decision d = perm_any
                         ? decide_n_permutable_any(cache, decider_options(perm_args))
                         : decide_n_permutable(cache, perm_n,
                                               decider_options(perm_args));
        print_decision(d, a);
    });

    // cube
    auto* cube_cmd = app.add_subcommand("cube", "decide existence of an n-cube term");
    CommonArgs cube_args;
    int cube_n = 2;
    add_common(cube_cmd, cube_args);
    cube_cmd->add_option("--n", cube_n, "cube dimension (>= 2)")->required();
    cube_cmd->callback([&]() {
        FiniteAlgebra a = load_algebra_file(cube_args.alg_path);
        FreeCache cache(a, cube_args.cap);
        print_decision(decide_n_cube_term(cache, cube_n, decider_options(cube_args)),
                       a);
    });

    // blocker
    auto* blocker_cmd =
        app.add_subcommand("blocker", "search for a cube-term blocker");
    CommonArgs blocker_args;
    add_common(blocker_cmd, blocker_args);
    blocker_cmd->callback([&]() {
        FiniteAlgebra a = load_algebra_file(blocker_args.alg_path);
        BlockerResult b = find_cube_blocker(a);
        if (!b.found) {
            std::cout << "none\n";
            return;
        }
        std::cout << "blocker: yes\n";
        std::cout << "subuniverse:";
        for (int v : b.subuniverse) std::cout << " " << v;
        std::cout << "\nsubset:";
        for (int v : b.subset) std::cout << " " << v;
        std::cout << "\n";
    });

    // color
    auto* color_cmd =
        app.add_subcommand("color", "strong coloring against a target structure");
    CommonArgs color_args;
    std::string color_target;
    add_common(color_cmd, color_args);
    color_cmd
        ->add_option("--target", color_target,
                     "p0|wn:<n>|order2|s|bn:<n>|b0:<kmax>|file:<path>")
        ->required();
    color_cmd->callback([&]() {
        FiniteAlgebra a = load_algebra_file(color_args.alg_path);
        FreeCache cache(a, color_args.cap);
        RelStructure target = parse_target(color_target);
        ColoringResult res = strong_coloring(cache, target);
        if (!res.found) {
            std::cout << "none\n";
            return;
        }
        std::cout << "coloring over " << res.free_size << " free elements\n";
        std::cout << "map:";
        for (int v : res.map) std::cout << " " << v;
        std::cout << "\n";
    });

    // free
    auto* free_cmd = app.add_subcommand("free", "free algebra on k generators");
    CommonArgs free_args;
    int free_gens = 0;
    bool free_dump = false;
    add_common(free_cmd, free_args);
    free_cmd->add_option("--gens", free_gens, "number of generators")->required();
    free_cmd->add_flag("--dump", free_dump, "print every element as a term");
    free_cmd->callback([&]() {
        FiniteAlgebra a = load_algebra_file(free_args.alg_path);
        FreeCache cache(a, free_args.cap);
        const FreeAlgebra& F = cache.get(free_gens);
        std::cout << "elements: " << F.size() << "\n";
        if (free_dump)
            for (int i = 0; i < F.size(); ++i)
                std::cout << "e" << i << " = "
                          << term_to_string(F.term_of(i), a) << "\n";
    });

    // pentagon verify / classify
    auto* pent_cmd = app.add_subcommand("pentagon", "pentagon checks on a structure");
    pent_cmd->require_subcommand(1);
    auto* pent_verify = pent_cmd->add_subcommand("verify", "check the pentagon axioms");
    std::string pent_verify_path;
    pent_verify->add_option("structure", pent_verify_path, "structure file")
        ->required();
    pent_verify->callback([&]() {
        RelStructure s = load_structure_file(pent_verify_path);
        PentagonCheck chk = verify_pentagon(s);
        if (!chk.ok) {
            std::cout << "pentagon: no\n";
            for (const std::string& f : chk.failures)
                std::cout << "  - " << f << "\n";
            return;
        }
        PentagonClassification cls = classify_pentagon(s);
        std::string shape = cls.very_special
                                ? "very-special"
                                : (cls.special ? "special" : "factors");
        std::cout << "pentagon: yes; " << shape << " under " << cls.a_size << "x"
                  << cls.b_size << "\n";
    });
    auto* pent_classify =
        pent_cmd->add_subcommand("classify", "full pentagon classification");
    std::string pent_classify_path;
    std::string pent_factor;
    pent_classify->add_option("structure", pent_classify_path, "structure file")
        ->required();
    pent_classify->add_option("--factor", pent_factor,
                              "expected factorization, e.g. 2x2");
    pent_classify->callback([&]() {
        RelStructure s = load_structure_file(pent_classify_path);
        int ea = -1, eb = -1;
        if (!pent_factor.empty()) {
            auto x = pent_factor.find('x');
            if (x == std::string::npos)
                throw input_error("--factor expects <a>x<b>, e.g. 2x2");
            ea = parse_int_list(pent_factor.substr(0, x), "--factor")[0];
            eb = parse_int_list(pent_factor.substr(x + 1), "--factor")[0];
        }
        PentagonClassification cls = classify_pentagon(s, ea, eb);
        std::cout << "factors: " << cls.a_size << "x" << cls.b_size << "\n";
        std::cout << "a-map:";
        for (int v : cls.a_of) std::cout << " " << v;
        std::cout << "\nb-map:";
        for (int v : cls.b_of) std::cout << " " << v;
        std::cout << "\nspecial: " << (cls.special ? "yes" : "no") << "\n";
        std::cout << "very-special: " << (cls.very_special ? "yes" : "no") << "\n";
        std::cout << "u:";
        for (int v : cls.u) std::cout << " " << v;
        std::cout << "\n";
        if (cls.eta) std::cout << "eta: " << cls.eta->to_string() << "\n";
        for (std::size_t i = 0; i < cls.fibers.size(); ++i)
            std::cout << "fiber a=" << i << ": " << cls.fibers[i].to_string()
                      << "\n";
    });

    // tarski
    auto* tarski_cmd =
        app.add_subcommand("tarski", "iterated marked squaring of an algebra");
    CommonArgs tarski_args;
    std::string tarski_marked;
    int tarski_steps = 1;
    add_common(tarski_cmd, tarski_args);
    tarski_cmd->add_option("--marked", tarski_marked, "marked subset, e.g. 0,2")
        ->required();
    tarski_cmd->add_option("--steps", tarski_steps, "number of squaring steps")
        ->required();
    tarski_cmd->callback([&]() {
        if (tarski_steps < 1 || tarski_steps > 4)
            throw input_error("tarski: steps must lie in 1..4");
        FiniteAlgebra a = load_algebra_file(tarski_args.alg_path);
        std::vector<int> marked = parse_int_list(tarski_marked, "--marked");
        TarskiStage stage{a, marked};
        std::cout << "stage 0: size " << stage.algebra.size << ", marked "
                  << marked.size() << "\n";
        for (int step = 1; step <= tarski_steps; ++step) {
            int old_size = stage.algebra.size;
            TarskiStage next = tarski_step(stage.algebra, stage.marked);
            // The diagonal embedding x -> (x, x) and its marked restriction
            // are rechecked here so every printed stage is a verified one.
            auto diag = [&](int x) { return x * old_size + x; };
            for (std::size_t oi = 0; oi < stage.algebra.ops.size(); ++oi) {
                const OpTable& op = stage.algebra.ops[oi];
                std::vector<int> args(static_cast<std::size_t>(op.arity), 0);
                std::vector<int> dargs(args.size());
                for (;;) {
                    for (std::size_t i = 0; i < args.size(); ++i)
                        dargs[i] = diag(args[i]);
                    if (next.algebra.apply(static_cast<int>(oi), dargs) !=
                        diag(stage.algebra.apply(static_cast<int>(oi), args)))
                        throw verification_error(
                            "tarski: the diagonal is not an embedding");
                    int j = static_cast<int>(args.size()) - 1;
                    for (; j >= 0; --j) {
                        if (++args[static_cast<std::size_t>(j)] < old_size) break;
                        args[static_cast<std::size_t>(j)] = 0;
                    }
                    if (j < 0) break;
                }
            }
            std::vector<char> in_marked(
                static_cast<std::size_t>(next.algebra.size), 0);
            for (int v : next.marked) in_marked[static_cast<std::size_t>(v)] = 1;
            std::vector<char> in_old(static_cast<std::size_t>(old_size), 0);
            for (int v : stage.marked) in_old[static_cast<std::size_t>(v)] = 1;
            for (int x = 0; x < old_size; ++x)
                if (in_old[static_cast<std::size_t>(x)] !=
                    in_marked[static_cast<std::size_t>(diag(x))])
                    throw verification_error(
                        "tarski: the marked set does not restrict to the diagonal");
            stage = std::move(next);
            std::cout << "stage " << step << ": size " << stage.algebra.size
                      << ", marked " << stage.marked.size()
                      << " (diagonal embedding ok, marked restriction ok)\n";
        }
    });

    // witness
    auto* witness_cmd =
        app.add_subcommand("witness", "build and verify an operation family");
    witness_cmd->require_subcommand(1);
    struct WitnessArgs {
        int m = 0;
        std::string u;
        int indices = 0;
    };
    auto add_witness_args = [](CLI::App* sub, WitnessArgs& args) {
        sub->add_option("--m", args.m, "base universe size")->required();
        sub->add_option("--u", args.u, "marked subset, e.g. 0,1,2")->required();
        sub->add_option("--indices", args.indices, "number of indexed operations")
            ->required();
    };
    auto print_family = [](const WitnessFamily& w) {
        std::cout << emit_algebra(w.algebra);
        std::cout << "# verified:\n";
        for (const std::string& c : w.checks) std::cout << "#   " << c << "\n";
    };
    WitnessArgs wp_args, wb_args;
    auto* witness_pent = witness_cmd->add_subcommand(
        "pentagon", "componentwise family on the m x m product");
    add_witness_args(witness_pent, wp_args);
    witness_pent->callback([&]() {
        print_family(pentagon_witnesses(
            wp_args.m, parse_int_list(wp_args.u, "--u"), wp_args.indices));
    });
    auto* witness_blk = witness_cmd->add_subcommand(
        "blocker", "absorbing family on the base universe");
    add_witness_args(witness_blk, wb_args);
    witness_blk->callback([&]() {
        print_family(blocker_witnesses(
            wb_args.m, parse_int_list(wb_args.u, "--u"), wb_args.indices));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const verification_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 3;
    } catch (const cap_exceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 2;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
