/// Python bindings for the workbench core.  The module exposes the finite
/// algebra type plus the main entry points: parsing, free-algebra sizes,
/// the Mal'cev-condition deciders, strong colorings, cube-term blockers,
/// the full analysis report (as the same JSON text the CLI emits), and
/// pentagon verification for relational structures.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "malcevlab/algebra.hpp"
#include "malcevlab/constructions.hpp"
#include "malcevlab/errors.hpp"
#include "malcevlab/free_objects.hpp"
#include "malcevlab/io.hpp"
#include "malcevlab/malcev.hpp"
#include "malcevlab/relstruct.hpp"

namespace py = pybind11;
using namespace malcevlab;

namespace {

RelStructure target_by_name(const std::string& spec) {
    if (spec == "p0") return build_p0();
    if (spec == "order2") return build_order2();
    if (spec == "s") return build_s();
    if (spec.size() >= 2 && (spec[0] == 'w' || spec[0] == 'b')) {
        int n = std::stoi(spec.substr(1));
        return spec[0] == 'w' ? build_wn(n) : build_bn(n);
    }
    throw input_error("unknown coloring target: " + spec);
}

py::dict decision_to_dict(const Decision& d) {
    py::dict out;
    out["question"] = d.question;
    out["holds"] = d.holds ? py::object(py::bool_(*d.holds))
                           : py::object(py::none());
    out["authority"] = d.authority;
    py::list crosses;
    for (const CrossCheck& cc : d.cross_checks) {
        py::dict c;
        c["name"] = cc.name;
        c["result"] = cc.result ? py::object(py::bool_(*cc.result))
                                : py::object(py::none());
        if (!cc.note.empty()) c["note"] = cc.note;
        crosses.append(std::move(c));
    }
    out["cross_checks"] = std::move(crosses);
    out["chain_length"] = static_cast<int>(d.chain.size());
    if (!d.notes.empty()) out["notes"] = d.notes;
    return out;
}

} // namespace

PYBIND11_MODULE(_malcevlab, m) {
    m.doc() = "finite-algebra Mal'cev condition workbench";

    py::register_exception<input_error>(m, "InputError");
    py::register_exception<precondition_error>(m, "PreconditionError");
    py::register_exception<cap_exceeded>(m, "CapExceeded");
    py::register_exception<verification_error>(m, "VerificationError");

    py::class_<FiniteAlgebra>(m, "Algebra")
        .def_static("from_text",
                    [](const std::string& text) {
                        return parse_algebra(text, "<string>");
                    },
                    py::arg("text"))
        .def_static("from_file", &load_algebra_file, py::arg("path"))
        .def_readonly("name", &FiniteAlgebra::name)
        .def_readonly("size", &FiniteAlgebra::size)
        .def_property_readonly("n_ops",
                               [](const FiniteAlgebra& a) {
                                   return static_cast<int>(a.ops.size());
                               })
        .def("is_idempotent", &FiniteAlgebra::is_idempotent)
        .def("emit", [](const FiniteAlgebra& a) { return emit_algebra(a); })
        .def("__repr__", [](const FiniteAlgebra& a) {
            return "<Algebra " + a.name + " size=" + std::to_string(a.size) +
                   ">";
        });

    m.def(
        "free_size",
        [](const FiniteAlgebra& a, int k, std::size_t cap) {
            FreeCache cache(a, cap);
            return static_cast<int>(cache.get(k).size());
        },
        py::arg("algebra"), py::arg("k"), py::arg("cap") = 2'000'000,
        "Number of elements of the free algebra on k generators.");

    m.def(
        "day_terms",
        [](const FiniteAlgebra& a, std::size_t cap) {
            FreeCache cache(a, cap);
            return decision_to_dict(decide_day_terms(cache));
        },
        py::arg("algebra"), py::arg("cap") = 2'000'000,
        "Decide congruence modularity via Day terms.");

    m.def(
        "n_permutable",
        [](const FiniteAlgebra& a, int n, std::size_t cap) {
            FreeCache cache(a, cap);
            return decision_to_dict(decide_n_permutable(cache, n));
        },
        py::arg("algebra"), py::arg("n"), py::arg("cap") = 2'000'000,
        "Decide congruence n-permutability.");

    m.def(
        "permutable_any",
        [](const FiniteAlgebra& a, std::size_t cap) {
            FreeCache cache(a, cap);
            return decision_to_dict(decide_n_permutable_any(cache));
        },
        py::arg("algebra"), py::arg("cap") = 2'000'000,
        "Decide n-permutability for some n at once.");

    m.def(
        "congruence_identity",
        [](const FiniteAlgebra& a, std::size_t cap) {
            FreeCache cache(a, cap);
            return decision_to_dict(decide_congruence_identity(cache));
        },
        py::arg("algebra"), py::arg("cap") = 2'000'000,
        "Decide the Kearnes-Kiss term condition (non-trivial congruence "
        "identity).");

    m.def(
        "cube_term",
        [](const FiniteAlgebra& a, int n, std::size_t cap) {
            FreeCache cache(a, cap);
            return decision_to_dict(decide_n_cube_term(cache, n));
        },
        py::arg("algebra"), py::arg("n"), py::arg("cap") = 2'000'000,
        "Decide existence of an n-cube term.");

    m.def(
        "cube_blocker",
        [](const FiniteAlgebra& a)
            -> std::optional<std::pair<std::vector<int>, std::vector<int>>> {
            BlockerResult b = find_cube_blocker(a);
            if (!b.found) return std::nullopt;
            return std::make_pair(b.subuniverse, b.subset);
        },
        py::arg("algebra"),
        "First cube-term blocker (subuniverse, subset), or None.");

    m.def(
        "coloring",
        [](const FiniteAlgebra& a, const std::string& target, bool pinned,
           std::size_t cap) {
            FreeCache cache(a, cap);
            ColoringResult col =
                strong_coloring(cache, target_by_name(target), pinned);
            py::dict out;
            out["found"] = col.found;
            out["free_size"] = static_cast<int>(col.free_size);
            if (col.found) out["map"] = col.map;
            return out;
        },
        py::arg("algebra"), py::arg("target"), py::arg("pinned") = true,
        py::arg("cap") = 2'000'000,
        "Strong coloring of the free structure by a named target "
        "(p0, order2, s, w<n>, b<n>).");

    m.def(
        "analyze",
        [](const FiniteAlgebra& a, int max_perm, int max_cube,
           std::size_t cap) {
            AnalyzeOptions opts;
            opts.max_perm = max_perm;
            opts.max_cube = max_cube;
            opts.cap = cap;
            return emit_report(analyze(a, opts));
        },
        py::arg("algebra"), py::arg("max_perm") = 4, py::arg("max_cube") = 3,
        py::arg("cap") = 2'000'000,
        "Full analysis; returns the report as JSON text.");

    m.def(
        "verify_pentagon_file",
        [](const std::string& path) {
            PentagonCheck chk = verify_pentagon(load_structure_file(path));
            return std::make_pair(chk.ok, chk.failures);
        },
        py::arg("path"),
        "Verify the pentagon contract of a structure file; returns "
        "(ok, failures).");
}
