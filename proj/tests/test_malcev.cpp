#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "malcevlab/algebra.hpp"
#include "malcevlab/constructions.hpp"
#include "malcevlab/errors.hpp"
#include "malcevlab/free_objects.hpp"
#include "malcevlab/malcev.hpp"
#include "malcevlab/term.hpp"

using namespace malcevlab;

namespace {

FiniteAlgebra semilattice2() {
    FiniteAlgebra a;
    a.name = "sl2";
    a.size = 2;
    a.ops.push_back({"join", 2, {0, 1, 1, 1}});
    return a;
}

FiniteAlgebra lattice2() {
    FiniteAlgebra a;
    a.name = "l2";
    a.size = 2;
    a.ops.push_back({"meet", 2, {0, 0, 0, 1}});
    a.ops.push_back({"join", 2, {0, 1, 1, 1}});
    return a;
}

FiniteAlgebra boolean_group_reduct() {
    FiniteAlgebra a;
    a.name = "m2";
    a.size = 2;
    a.ops.push_back({"mal", 3, {0, 1, 1, 0, 1, 0, 0, 1}});
    return a;
}

FiniteAlgebra majority2() {
    FiniteAlgebra a;
    a.name = "maj2";
    a.size = 2;
    a.ops.push_back({"maj", 3, {0, 0, 0, 1, 0, 1, 1, 1}});
    return a;
}

bool conclusive_cross_agrees(const Decision& d) {
    REQUIRE(d.holds.has_value());
    bool any = false;
    for (const CrossCheck& cc : d.cross_checks)
        if (cc.result.has_value()) {
            any = true;
            CHECK(*cc.result == *d.holds);
        }
    return any;
}

} // namespace

TEST_CASE("day terms across the zoo") {
    FreeCache sl2(semilattice2(), 2'000'000);
    Decision d = decide_day_terms(sl2);
    CHECK(d.holds == false);
    REQUIRE(d.coloring.has_value());
    CHECK(d.coloring->found);
    CHECK(conclusive_cross_agrees(d));

    for (const FiniteAlgebra& a :
         {lattice2(), boolean_group_reduct(), majority2()}) {
        FreeCache cache(a, 2'000'000);
        Decision yes = decide_day_terms(cache);
        CHECK(yes.holds == true);
        CHECK_FALSE(yes.chain.empty());
        CHECK(conclusive_cross_agrees(yes));
    }
}

TEST_CASE("permutability across the zoo") {
    FreeCache m2(boolean_group_reduct(), 2'000'000);
    Decision two = decide_n_permutable(m2, 2);
    CHECK(two.holds == true);
    REQUIRE_FALSE(two.chain.empty());
    // The Hagemann-Mitschke chain for n = 2 runs x, p(x,y,z), z: the two
    // endpoint generators with a single Mal'cev term between them.
    CHECK(two.chain.size() == 3);
    CHECK(decide_n_permutable_any(m2).holds == true);

    FreeCache sl2(semilattice2(), 2'000'000);
    CHECK(decide_n_permutable(sl2, 2).holds == false);
    CHECK(decide_n_permutable(sl2, 3).holds == false);
    CHECK(decide_n_permutable_any(sl2).holds == false);

    FreeCache l2(lattice2(), 2'000'000);
    CHECK(decide_n_permutable(l2, 2).holds == false);
    CHECK(decide_n_permutable(l2, 3).holds == false);
    CHECK(decide_n_permutable_any(l2).holds == false);

    FreeCache maj2(majority2(), 2'000'000);
    CHECK(decide_n_permutable(maj2, 2).holds == false);
    CHECK(decide_n_permutable(maj2, 3).holds == false);
    CHECK(decide_n_permutable_any(maj2).holds == false);
}

TEST_CASE("congruence identities across the zoo") {
    FreeCache sl2(semilattice2(), 2'000'000);
    Decision no = decide_congruence_identity(sl2);
    CHECK(no.holds == false);
    CHECK(conclusive_cross_agrees(no));

    for (const FiniteAlgebra& a :
         {lattice2(), boolean_group_reduct(), majority2()}) {
        FreeCache cache(a, 2'000'000);
        Decision yes = decide_congruence_identity(cache);
        CHECK(yes.holds == true);
        CHECK(conclusive_cross_agrees(yes));
    }
}

TEST_CASE("cube terms across the zoo") {
    FreeCache m2(boolean_group_reduct(), 2'000'000);
    Decision mal = decide_n_cube_term(m2, 2);
    CHECK(mal.holds == true);
    REQUIRE(mal.chain.size() == 1);
    // A 2-cube term is exactly a Mal'cev term: re-verify its identities.
    const FiniteAlgebra a = boolean_group_reduct();
    TermPtr t = mal.chain[0];
    TermPtr x = Term::make_var(0), y = Term::make_var(1);
    CHECK(satisfies_identity(a, substitute(t, {y, y, x}), x, 2));
    CHECK(satisfies_identity(a, substitute(t, {y, x, y}), x, 2));

    FreeCache sl2(semilattice2(), 2'000'000);
    CHECK(decide_n_cube_term(sl2, 2).holds == false);
    CHECK(decide_n_cube_term(sl2, 3).holds == false);

    FreeCache l2(lattice2(), 2'000'000);
    CHECK(decide_n_cube_term(l2, 2).holds == false);
    CHECK(decide_n_cube_term(l2, 3).holds == true);

    FreeCache maj2(majority2(), 2'000'000);
    CHECK(decide_n_cube_term(maj2, 2).holds == false);
    CHECK(decide_n_cube_term(maj2, 3).holds == true);
}

TEST_CASE("cube term blockers") {
    BlockerResult b = find_cube_blocker(semilattice2());
    REQUIRE(b.found);
    CHECK(b.subuniverse == std::vector<int>{0, 1});
    CHECK(b.subset == std::vector<int>{1});

    CHECK_FALSE(find_cube_blocker(boolean_group_reduct()).found);
    CHECK_FALSE(find_cube_blocker(majority2()).found);
    CHECK_FALSE(find_cube_blocker(lattice2()).found);
}

TEST_CASE("injected cross faults are detected, not absorbed") {
    DeciderOptions bad;
    bad.flip_cross_checks = true;

    FreeCache sl2(semilattice2(), 2'000'000);
    CHECK_THROWS_AS(decide_day_terms(sl2, bad), verification_error);

    FreeCache m2(boolean_group_reduct(), 2'000'000);
    CHECK_THROWS_AS(decide_n_permutable(m2, 2, bad), verification_error);
    CHECK_THROWS_AS(decide_n_cube_term(m2, 2, bad), verification_error);
}

TEST_CASE("cross compatibility versus cube terms") {
    RelStructure cross = finite_C(2, {{1}, {1}});
    CHECK(check_cross_compatibility(semilattice2(), cross));
    CHECK_FALSE(check_cross_compatibility(boolean_group_reduct(), cross));

    RelStructure cross3 = finite_C(2, {{1}, {1}, {1}});
    CHECK(check_cross_compatibility(semilattice2(), cross3));
    CHECK_FALSE(check_cross_compatibility(majority2(), cross3));
    CHECK_FALSE(check_cross_compatibility(lattice2(), cross3));
}

TEST_CASE("whole-algebra reports match the frozen zoo facts") {
    Report sl2 = analyze(semilattice2());
    CHECK(sl2.has_day_terms == false);
    CHECK_FALSE(sl2.permutable_first_n.has_value());
    CHECK(sl2.permutable_any == false);
    CHECK(sl2.has_kearnes_kiss == false);
    CHECK_FALSE(sl2.cube_first_n.has_value());
    CHECK(sl2.cube_checked_up_to == 3);
    REQUIRE(sl2.cube_blocker.has_value());
    CHECK(sl2.cube_blocker->subuniverse == std::vector<int>{0, 1});
    CHECK(sl2.cube_blocker->subset == std::vector<int>{1});

    Report l2 = analyze(lattice2());
    CHECK(l2.has_day_terms == true);
    CHECK(l2.permutable_any == false);
    CHECK(l2.has_kearnes_kiss == true);
    CHECK(l2.cube_first_n == 3);

    Report m2 = analyze(boolean_group_reduct());
    CHECK(m2.has_day_terms == true);
    CHECK(m2.permutable_first_n == 2);
    CHECK(m2.has_kearnes_kiss == true);
    CHECK(m2.cube_first_n == 2);
    CHECK((!m2.cube_blocker.has_value() || !m2.cube_blocker->found));

    Report maj2 = analyze(majority2());
    CHECK(maj2.has_day_terms == true);
    CHECK(maj2.permutable_any == false);
    CHECK(maj2.has_kearnes_kiss == true);
    CHECK(maj2.cube_first_n == 3);
    CHECK((!maj2.cube_blocker.has_value() || !maj2.cube_blocker->found));
}

TEST_CASE("analysis requires idempotence") {
    FiniteAlgebra pointed = semilattice2();
    pointed.ops.push_back({"zero", 0, {0}});
    CHECK_THROWS_AS(analyze(pointed), precondition_error);
}
