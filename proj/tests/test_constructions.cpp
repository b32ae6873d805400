#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "malcevlab/algebra.hpp"
#include "malcevlab/constructions.hpp"
#include "malcevlab/errors.hpp"
#include "malcevlab/partition.hpp"
#include "malcevlab/relstruct.hpp"

using namespace malcevlab;

namespace {

FiniteAlgebra semilattice2() {
    FiniteAlgebra a;
    a.name = "sl2";
    a.size = 2;
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

} // namespace

TEST_CASE("the semilattice blocker saturates to the frozen congruence") {
    ModularityBlocker b = build_modularity_blocker(semilattice2());
    // F(2) of the two-element semilattice is {x, y, x v y}.
    CHECK(b.f2.size == 3);
    // gamma on F(2)^2 (codes r * 3 + c): row x total, y split as {y} vs
    // {y ^ join-images}, row x v y total.
    CHECK(b.gamma == Partition::from_classes(
                         9, {{0, 1, 2}, {3}, {4, 5}, {6, 7, 8}}));
    CHECK(b.eta == Partition::from_classes(3, {{1, 2}}));
    CHECK(b.u == std::vector<int>{0, 2});
    CHECK(is_congruence(b.f2, b.eta));
}

TEST_CASE("algebras with day terms have no blocker to build") {
    CHECK_THROWS_AS(build_modularity_blocker(boolean_group_reduct()),
                    precondition_error);
}

TEST_CASE("the blocker assembles into a six-element very special pentagon") {
    ModularityBlocker b = build_modularity_blocker(semilattice2());
    Pentagon p = pentagon_from_blocker(b);
    CHECK(p.a_size == 3);
    CHECK(p.b_size == 2);
    CHECK(p.algebra.size == 6);
    CHECK(p.u == std::vector<int>{0, 2});
    CHECK(p.algebra.is_idempotent());
    CHECK(is_congruence(p.algebra, p.alpha));
    CHECK(is_congruence(p.algebra, p.beta));
    CHECK(is_congruence(p.algebra, p.gamma));
    CHECK_FALSE(modularity_law_holds(p.alpha, p.beta, p.gamma));

    RelStructure s = p.structure("pent");
    CHECK(verify_pentagon(s).ok);
    PentagonClassification cls = classify_pentagon(s, 3, 2);
    CHECK(cls.very_special);
    CHECK(cls.u == std::vector<int>{0, 2});
}

TEST_CASE("one squaring step preserves the pentagon invariants") {
    Pentagon p = pentagon_from_blocker(build_modularity_blocker(semilattice2()));
    Pentagon q = pentagon_tarski_step(p);
    CHECK(q.a_size == 9);
    CHECK(q.b_size == 4);
    CHECK(q.algebra.size == 36);
    CHECK(q.u.size() == 6);  // A x U
    CHECK(is_congruence(q.algebra, q.gamma));
    PentagonClassification cls = classify_pentagon(q.structure("sq"), 9, 4);
    CHECK(cls.very_special);
    CHECK_FALSE(modularity_law_holds(q.alpha, q.beta, q.gamma));
}

TEST_CASE("bare marked squaring") {
    TarskiStage s = tarski_step(semilattice2(), {1});
    CHECK(s.algebra.size == 4);
    CHECK(s.algebra.is_idempotent());
    CHECK(s.marked == std::vector<int>{1, 3});  // second coordinate marked

    TarskiStage t = tarski_step(s.algebra, s.marked);
    CHECK(t.algebra.size == 16);
    CHECK(t.marked.size() == 8);
}

TEST_CASE("finite pentagon structures") {
    RelStructure p = finite_P(2, {1});
    CHECK(p.size == 4);
    CHECK(verify_pentagon(p).ok);
    PentagonClassification cls = classify_pentagon(p, 2, 2);
    CHECK(cls.very_special);
    CHECK(cls.u == std::vector<int>{1});

    RelStructure p3 = finite_P(3, {0, 2});
    CHECK(p3.size == 9);
    CHECK(verify_pentagon(p3).ok);
    CHECK(classify_pentagon(p3, 3, 3).u == std::vector<int>{0, 2});

    CHECK_THROWS_AS(finite_P(2, {0, 1}), input_error);  // u must be proper
    CHECK_THROWS_AS(finite_P(2, std::vector<int>{}), input_error);
}

TEST_CASE("finite blocker structures") {
    RelStructure b = finite_B(2, {1}, 3);
    REQUIRE(b.rels.size() == 3);
    CHECK(b.find_relation("r1")->tuples.size() == 1);
    CHECK(b.find_relation("r2")->tuples.size() == 3);
    CHECK(b.find_relation("r3")->tuples.size() == 7);
    CHECK(compatible(b, semilattice2()));
    CHECK_FALSE(compatible(b, boolean_group_reduct()));
}

TEST_CASE("finite cross structures") {
    RelStructure c = finite_C(2, {{1}, {1}});
    CHECK(c.size == 4);
    REQUIRE(c.product.has_value());
    CHECK(c.product->sorts == 2);
    CHECK(c.product->sort_size == 2);
    const Relation* cross = c.find_relation("cross");
    REQUIRE(cross != nullptr);
    CHECK(cross->arity == 1);
    // Codes with some coordinate in its subset: 1 = (0,1), 2 = (1,0), 3 = (1,1).
    CHECK(cross->tuples ==
          std::vector<std::vector<int>>{{1}, {2}, {3}});
    CHECK(relation_as_partition(*c.find_relation("alpha1"), 4) ==
          Partition::from_classes(4, {{0, 1}, {2, 3}}));
    CHECK(relation_as_partition(*c.find_relation("alpha2"), 4) ==
          Partition::from_classes(4, {{0, 2}, {1, 3}}));

    RelStructure mixed = finite_C(3, {{0}, {1, 2}});
    CHECK(mixed.size == 9);
    const Relation* mcross = mixed.find_relation("cross");
    // (1,0) = code 3 has no coordinate in place: 1 not in {0}, 0 not in {1,2}.
    CHECK_FALSE(mcross->contains(std::vector<int>{3}));
    CHECK(mcross->contains(std::vector<int>{1}));  // (0,1): second in {1,2}
    CHECK(mcross->contains(std::vector<int>{0}));  // (0,0): first in {0}
}

TEST_CASE("the coordinate criterion matches real polymorphism checks") {
    const int m = 2;
    const std::vector<int> u{1};
    RelStructure pent = finite_P(m, u);

    // All unary pairs.
    for (int t1 = 0; t1 < 4; ++t1)
        for (int t2 = 0; t2 < 4; ++t2) {
            OpTable c1{"c1", 1, {t1 / 2, t1 % 2}};
            OpTable c2{"c2", 1, {t2 / 2, t2 % 2}};
            bool criterion = blocker_polymorphism_criterion(c1, c2, m, u);
            bool real = is_polymorphism(pent, product_op("f", c1, c2, m), m * m);
            CHECK(criterion == real);
        }

    // All binary pairs.
    for (int t1 = 0; t1 < 16; ++t1)
        for (int t2 = 0; t2 < 16; ++t2) {
            OpTable c1{"c1", 2,
                       {(t1 >> 3) & 1, (t1 >> 2) & 1, (t1 >> 1) & 1, t1 & 1}};
            OpTable c2{"c2", 2,
                       {(t2 >> 3) & 1, (t2 >> 2) & 1, (t2 >> 1) & 1, t2 & 1}};
            bool criterion = blocker_polymorphism_criterion(c1, c2, m, u);
            bool real = is_polymorphism(pent, product_op("f", c1, c2, m), m * m);
            CHECK(criterion == real);
        }
}

TEST_CASE("product operations act componentwise") {
    OpTable join{"join", 2, {0, 1, 1, 1}};
    OpTable meet{"meet", 2, {0, 0, 0, 1}};
    OpTable p = product_op("jm", join, meet, 2);
    CHECK(p.arity == 2);
    // (0,1) join/meet (1,0) = (join(0,1), meet(1,0)) = (1, 0) = code 2.
    CHECK(p.apply(std::vector<int>{1, 2}, 4) == 2);
    CHECK(p.apply(std::vector<int>{3, 3}, 4) == 3);
}

TEST_CASE("pentagon witness families verify their identities") {
    WitnessFamily w = pentagon_witnesses(4, {0, 1, 2}, 2);
    CHECK(w.kind == WitnessKind::pentagon);
    CHECK(w.algebra.size == 16);
    CHECK(w.algebra.is_idempotent());
    CHECK(w.algebra.op_index("f0") >= 0);
    CHECK(w.algebra.op_index("f1") >= 0);
    CHECK(w.algebra.op_index("p01") >= 0);
    CHECK(w.algebra.op_index("q01") >= 0);
    CHECK(w.algebra.op_index("r01") >= 0);
    CHECK(w.algebra.op_index("q10") >= 0);
    CHECK_FALSE(w.checks.empty());

    CHECK_THROWS_AS(pentagon_witnesses(4, {0, 1}, 2), precondition_error);
    CHECK_THROWS_AS(pentagon_witnesses(2, {0, 1, 2}, 2), input_error);
}

TEST_CASE("blocker witness families verify their identities") {
    WitnessFamily w = blocker_witnesses(4, {0, 1, 2}, 2);
    CHECK(w.kind == WitnessKind::blocker);
    CHECK(w.algebra.size == 4);
    CHECK(w.algebra.is_idempotent());
    CHECK(w.algebra.op_index("f0") >= 0);
    CHECK(w.algebra.op_index("p01") >= 0);
    CHECK(w.algebra.op_index("q01") >= 0);
    CHECK_FALSE(w.checks.empty());

    // The indexed constants must lie inside the marked set.
    CHECK_THROWS_AS(blocker_witnesses(4, {1, 2}, 2), precondition_error);
}

TEST_CASE("no two-element model separates the families at three indices") {
    CHECK_FALSE(no_small_model(WitnessKind::pentagon, 1));
    CHECK_FALSE(no_small_model(WitnessKind::pentagon, 2));
    CHECK(no_small_model(WitnessKind::pentagon, 3));

    CHECK_FALSE(no_small_model(WitnessKind::blocker, 1));
    CHECK_FALSE(no_small_model(WitnessKind::blocker, 2));
    CHECK(no_small_model(WitnessKind::blocker, 3));

    CHECK_THROWS_AS(no_small_model(WitnessKind::pentagon, 2, 3), input_error);
}
