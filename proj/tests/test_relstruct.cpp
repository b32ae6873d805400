#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "malcevlab/algebra.hpp"
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

TEST_CASE("the pentagon target") {
    RelStructure p0 = build_p0();
    CHECK(p0.size == 4);
    REQUIRE(p0.rels.size() == 3);
    CHECK(relation_as_partition(*p0.find_relation("alpha"), 4) ==
          Partition::from_classes(4, {{0, 3}, {1, 2}}));
    CHECK(relation_as_partition(*p0.find_relation("beta"), 4) ==
          Partition::from_classes(4, {{0, 1}, {2, 3}}));
    CHECK(relation_as_partition(*p0.find_relation("gamma"), 4) ==
          Partition::from_classes(4, {{1, 2}}));
}

TEST_CASE("the permutability zigzags") {
    RelStructure w2 = build_wn(2);
    CHECK(w2.size == 3);
    CHECK(relation_as_partition(*w2.find_relation("alpha"), 3) ==
          Partition::from_classes(3, {{0, 1}, {2}}));
    CHECK(relation_as_partition(*w2.find_relation("beta"), 3) ==
          Partition::from_classes(3, {{0}, {1, 2}}));

    RelStructure w3 = build_wn(3);
    CHECK(w3.size == 4);
    CHECK(relation_as_partition(*w3.find_relation("alpha"), 4) ==
          Partition::from_classes(4, {{0, 1}, {2, 3}}));
    CHECK(relation_as_partition(*w3.find_relation("beta"), 4) ==
          Partition::from_classes(4, {{1, 2}, {3}}));

    CHECK_THROWS_AS(build_wn(1), input_error);
}

TEST_CASE("order, join-graph and cube targets") {
    RelStructure ord = build_order2();
    CHECK(ord.size == 2);
    REQUIRE(ord.rels.size() == 1);
    CHECK(ord.rels[0].arity == 2);
    CHECK(ord.rels[0].tuples.size() == 3);  // (0,0), (0,1), (1,1)
    CHECK(ord.rels[0].contains(std::vector<int>{0, 1}));
    CHECK_FALSE(ord.rels[0].contains(std::vector<int>{1, 0}));

    RelStructure s = build_s();
    CHECK(s.size == 2);
    REQUIRE(s.rels.size() == 1);
    CHECK(s.rels[0].arity == 3);
    CHECK(s.rels[0].tuples.size() == 4);  // graph of binary join
    CHECK(s.rels[0].contains(std::vector<int>{0, 1, 1}));
    CHECK_FALSE(s.rels[0].contains(std::vector<int>{0, 1, 0}));

    RelStructure b2 = build_bn(2);
    CHECK(b2.size == 2);
    REQUIRE(b2.rels.size() == 1);
    CHECK(b2.rels[0].tuples.size() == 3);  // {0,1}^2 minus 00
    CHECK_FALSE(b2.rels[0].contains(std::vector<int>{0, 0}));

    RelStructure b3 = build_bn(3);
    CHECK(b3.rels[0].tuples.size() == 7);

    RelStructure b0 = build_b0(3);
    REQUIRE(b0.rels.size() == 3);
    CHECK(b0.find_relation("r1")->tuples.size() == 1);
    CHECK(b0.find_relation("r2")->tuples.size() == 3);
    CHECK(b0.find_relation("r3")->tuples.size() == 7);
}

TEST_CASE("relations and partitions convert both ways") {
    Partition p = Partition::from_classes(4, {{0, 3}, {1, 2}});
    Relation r = partition_as_relation("alpha", p);
    CHECK(r.tuples.size() == 8);
    CHECK(relation_as_partition(r, 4) == p);

    Relation nonrefl{"r", 2, {{0, 1}}};
    nonrefl.normalize();
    CHECK_THROWS_AS(relation_as_partition(nonrefl, 2), input_error);
}

TEST_CASE("polymorphism checks") {
    RelStructure ord = build_order2();
    CHECK_FALSE(polymorphism_violation(ord, semilattice2()).has_value());
    CHECK(compatible(ord, semilattice2()));
    CHECK(is_polymorphism(ord, semilattice2().ops[0], 2));

    auto v = polymorphism_violation(ord, boolean_group_reduct());
    REQUIRE(v.has_value());
    CHECK(v->op == "mal");
    CHECK(v->relation == ord.rels[0].name);
    REQUIRE(v->rows.size() == 3);
    // Re-evaluate the reported rows and confirm the image really escapes.
    const FiniteAlgebra m2 = boolean_group_reduct();
    std::vector<int> image(2);
    for (int c = 0; c < 2; ++c) {
        std::vector<int> args;
        for (const auto& row : v->rows) args.push_back(row[c]);
        image[c] = m2.apply(0, args);
    }
    CHECK(image == v->image);
    CHECK_FALSE(ord.rels[0].contains(image));
}

TEST_CASE("homomorphism search between structures") {
    RelStructure ord = build_order2();
    auto id = hom_search(ord, ord);
    REQUIRE(id.has_value());
    CHECK(hom_search(ord, ord, {{0, 0}, {1, 1}}).has_value());
    CHECK_FALSE(hom_search(ord, ord, {{0, 1}, {1, 0}}).has_value());

    RelStructure chain;
    chain.name = "chain3";
    chain.size = 3;
    chain.rels.push_back(
        {ord.rels[0].name, 2, {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}});
    chain.validate_and_normalize();
    CHECK(hom_search(chain, ord).has_value());
    CHECK(hom_search(chain, ord, {{0, 0}, {2, 1}}).has_value());
}

TEST_CASE("the hom engine honors equivalence constraints") {
    Partition src = Partition::total(2);
    Partition dst = Partition::discrete(2);
    HomProblem p;
    p.n_vars = 2;
    p.n_vals = 2;
    p.eq_constraints.push_back({&src, &dst});

    p.pins = {{0, 0}};
    auto sol = solve_hom(p);
    REQUIRE(sol.has_value());
    CHECK((*sol)[0] == (*sol)[1]);

    p.pins = {{0, 0}, {1, 1}};
    CHECK_FALSE(solve_hom(p).has_value());
}

TEST_CASE("pentagon verification and classification") {
    RelStructure p0 = build_p0();
    PentagonCheck chk = verify_pentagon(p0);
    CHECK(chk.ok);
    CHECK(chk.failures.empty());

    PentagonClassification cls = classify_pentagon(p0, 2, 2);
    CHECK(cls.a_size == 2);
    CHECK(cls.b_size == 2);
    CHECK(cls.special);
    CHECK(cls.very_special);
    CHECK(cls.u == std::vector<int>{1});
    REQUIRE(cls.fibers.size() == 2);
    CHECK(cls.fibers[0].is_discrete());
    CHECK(cls.fibers[1].is_total());
    REQUIRE(cls.eta.has_value());
    CHECK(cls.eta->is_discrete());

    // Element coordinates: 0 = (0,0), 1 = (1,0), 2 = (1,1), 3 = (0,1).
    CHECK(cls.a_of == std::vector<int>{0, 1, 1, 0});
    CHECK(cls.b_of == std::vector<int>{0, 0, 1, 1});

    CHECK_THROWS_AS(classify_pentagon(p0, 4, 1), input_error);
}

TEST_CASE("broken pentagons are rejected with reasons") {
    RelStructure s = build_p0();
    // Make gamma equal to alpha: gamma < alpha fails.
    s.rels[2].tuples = s.rels[0].tuples;
    s.validate_and_normalize();
    PentagonCheck chk = verify_pentagon(s);
    CHECK_FALSE(chk.ok);
    CHECK_FALSE(chk.failures.empty());
    CHECK_THROWS_AS(classify_pentagon(s), precondition_error);
}
